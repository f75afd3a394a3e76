#ifndef DPC_SCENARIO_HPP
#define DPC_SCENARIO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpc/contract.hpp"
#include "dpc/linalg.hpp"
#include "dpc/numerics.hpp"
#include "dpc/rng.hpp"

namespace dpc {

enum class Condition { Clean, OcclusionLike, NoiseBlurLike };

inline std::string to_string(Condition c) {
    switch (c) {
        case Condition::Clean: return "clean";
        case Condition::OcclusionLike: return "occlusion_like";
        case Condition::NoiseBlurLike: return "noise_blur_like";
    }
    return "clean";
}

inline Condition condition_from_string(const std::string& s) {
    if (s == "clean") return Condition::Clean;
    if (s == "occlusion_like") return Condition::OcclusionLike;
    if (s == "noise_blur_like") return Condition::NoiseBlurLike;
    throw contract_error("unknown condition: " + s);
}

/// Per-stage audio and visual feature vectors for N fusion stages.
struct StageBundle {
    std::size_t dim = 0;
    std::vector<Vec> audio;
    std::vector<Vec> visual;

    std::size_t num_stages() const { return audio.size(); }

    void validate() const {
        DPC_REQUIRE(audio.size() == visual.size(), "bundle: stage count mismatch");
        DPC_REQUIRE(!audio.empty(), "bundle: needs at least one stage");
        DPC_REQUIRE(dim >= 1, "bundle: dim must be positive");
        for (std::size_t l = 0; l < audio.size(); ++l) {
            DPC_REQUIRE(audio[l].size() == dim && visual[l].size() == dim,
                        "bundle: inconsistent feature dim at stage " + std::to_string(l + 1));
            DPC_REQUIRE(all_finite(audio[l]) && all_finite(visual[l]),
                        "bundle: non-finite feature at stage " + std::to_string(l + 1));
        }
    }
};

/// Ground-truth readiness factors, computed analytically from the recipe.
struct PlantedFactors {
    Vec agreement;  // modality-pair cosine per stage
    Vec influence;  // outgoing chain weight spectral norm, relative to stage average
    Vec coverage;   // cosine of stage state to its supported-subspace projection
};

/// Synthetic propagation chain: z_{l+1} = normalize(tanh(W_l z_l + U_a a_{l+1}
/// + U_v v_{l+1})), summary f_f = F_a a_N + F_v v_N + W_N z_N. Chain states are
/// unit-normalized so matched-energy perturbations are comparable across
/// stages. The z_1 projection is fixed to the modality average. W norms carry
/// the planted influence scaling.
struct EncoderChain {
    std::vector<Matrix> stage_weight;  // W_1..W_N; W_N is the summary z-block
    Matrix input_audio;                // U_a, shared across stages
    Matrix input_visual;               // U_v, shared across stages
    Matrix summary_audio;              // F_a
    Matrix summary_visual;             // F_v
    Vec stage_weight_norm;             // spectral norms as set by construction
};

/// Generator knobs. The degradation and planting magnitudes are fixed
/// defaults, overridable here; the structural steps are not.
struct ScenarioParams {
    double attenuation = 0.3;       // stage-specific supported component factor at the planted stage
    double off_weight = 1.0;        // magnitude of the unsupported component at the planted stage
    double distractor_weight = 0.0; // optional second, visually fragile near-bottleneck
    double influence_scale = 2.0;   // outgoing-weight scaling at the planted stage
    double mask_fraction = 0.4;     // occlusion_like: contiguous zeroed slice of visual
    double noise_var_ratio = 0.25;  // noise_blur_like: added noise variance ratio
    int blur_taps = 3;              // noise_blur_like: moving-average width
    double core_weight = 1.0;       // shared supported core present at every stage
    double fresh_weight = 0.6;      // per-stage supported component
    double carry = 2.0;             // weight of consolidated stage content in final features
    double sigma = 0.35;            // per-modality noise at ordinary stages
    double sigma_planted = 0.02;    // per-modality noise at the planted stage
    double chain_weight_norm = 0.6; // spectral norm of W_l at ordinary stages
    double chain_input_norm = 0.35; // spectral norm of U_a, U_v, F_a, F_v
    double chain_identity_mix = 0.4;  // off-identity mass in the chain maps
};

struct PlantedScenario {
    StageBundle bundle;
    PlantedFactors factors;
    std::size_t planted_bottleneck = 0;  // 1-based stage index
    EncoderChain chain;
    Vec target;  // unit-norm utility anchor inside the supported subspace
    Condition condition = Condition::Clean;
    std::uint64_t seed = 0;
    ScenarioParams params;

    std::size_t num_stages() const { return bundle.num_stages(); }
    std::size_t dim() const { return bundle.dim; }
};

struct PsiSpec {
    PsiMode mode = PsiMode::Smooth;
    double beta = 10.0;
};

struct Thresholds {
    double agreement = 0.0;
    double propagation = 0.0;
    double coverage = 0.0;
};

/// D_l = psi(A_l - tau_A) * psi(P_l - tau_P) * psi(tau_C - C_l).
inline Vec analytical_deficiency(const PlantedFactors& f, const Thresholds& tau,
                                 const PsiSpec& psi) {
    const std::size_t n = f.agreement.size();
    DPC_REQUIRE(f.influence.size() == n && f.coverage.size() == n,
                "factors: stage count mismatch");
    Vec d(n);
    for (std::size_t l = 0; l < n; ++l) {
        d[l] = smooth_positive_part(f.agreement[l] - tau.agreement, psi.beta, psi.mode) *
               smooth_positive_part(f.influence[l] - tau.propagation, psi.beta, psi.mode) *
               smooth_positive_part(tau.coverage - f.coverage[l], psi.beta, psi.mode);
    }
    return d;
}

inline double median(Vec v) {
    DPC_REQUIRE(!v.empty(), "median: empty input");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline Thresholds median_thresholds(const PlantedFactors& f) {
    return Thresholds{median(f.agreement), median(f.influence), median(f.coverage)};
}

/// Lowest-index argmax.
inline std::size_t argmax_index(const Vec& v) {
    DPC_REQUIRE(!v.empty(), "argmax: empty input");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

namespace detail {

inline Vec project_onto_rows(const Matrix& basis, const Vec& x) {
    return basis.apply_transposed(basis.apply(x));
}

inline Matrix gaussian_with_spectral_norm(std::size_t r, std::size_t c, double target,
                                          SeededRng& rng) {
    Matrix m = Matrix::gaussian(r, c, rng);
    const double sn = spectral_norm(m);
    DPC_REQUIRE(sn > 1e-12, "degenerate gaussian matrix draw");
    m.scale_in_place(target / sn);
    return m;
}

/// Identity plus a scaled gaussian, normalized to a target spectral norm.
/// Keeps the chain maps feature-coherent: states remain blends of feature
/// directions rather than arbitrary rotations, which is what makes support
/// injection into a chain state meaningful.
inline Matrix identity_anchored(std::size_t dim, double target, double mix, SeededRng& rng) {
    Matrix m = Matrix::gaussian(dim, dim, rng);
    const double gn = spectral_norm(m);
    DPC_REQUIRE(gn > 1e-12, "degenerate gaussian matrix draw");
    for (auto& v : m.data) v *= mix / gn;
    for (std::size_t i = 0; i < dim; ++i) m(i, i) += 1.0;
    const double sn = spectral_norm(m);
    m.scale_in_place(target / sn);
    return m;
}

inline void apply_occlusion(StageBundle& bundle, std::size_t start, std::size_t width) {
    if (width == 0) return;
    for (auto& v : bundle.visual)
        std::fill(v.begin() + static_cast<std::ptrdiff_t>(start),
                  v.begin() + static_cast<std::ptrdiff_t>(start + width), 0.0);
}

inline void apply_noise_blur(StageBundle& bundle, double var_ratio, int taps, SeededRng& rng) {
    const std::size_t d = bundle.dim;
    const int half = taps / 2;
    for (auto& v : bundle.visual) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(d);
        const double sd = std::sqrt(var_ratio * var);
        for (auto& x : v) x += sd * rng.gaussian();
        Vec blurred(d);
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
            const std::size_t hi = std::min(d - 1, i + static_cast<std::size_t>(half));
            double acc = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) acc += v[j];
            blurred[i] = acc / static_cast<double>(hi - lo + 1);
        }
        v = blurred;
    }
}

}  // namespace detail

struct PropagateResult {
    std::vector<Vec> states;  // realized z_1..z_N
    Vec fused_summary;        // f_f delivered downstream
    double utility = 0.0;     // cos(f_f, target), in [-1, 1]
};

/// Runs the chain. Overrides (1-based stage -> state) replace the computed
/// state at that stage before it feeds later propagation and the summary.
inline PropagateResult propagate(const PlantedScenario& sc,
                                 const std::map<std::size_t, Vec>& overrides = {}) {
    const std::size_t n = sc.num_stages();
    const std::size_t d = sc.dim();
    for (const auto& [stage, value] : overrides) {
        DPC_REQUIRE(stage >= 1 && stage <= n, "propagate: override stage out of range");
        DPC_REQUIRE(value.size() == d, "propagate: override dim mismatch");
    }
    PropagateResult out;
    out.states.resize(n);

    auto realized = [&](std::size_t stage_1based, Vec computed) -> Vec {
        auto it = overrides.find(stage_1based);
        return it == overrides.end() ? computed : it->second;
    };

    Vec z0 = normalized(scaled(added(sc.bundle.audio[0], sc.bundle.visual[0]), 0.5));
    out.states[0] = realized(1, std::move(z0));
    for (std::size_t l = 1; l < n; ++l) {
        Vec pre = sc.chain.stage_weight[l - 1].apply(out.states[l - 1]);
        add_scaled_in_place(pre, sc.chain.input_audio.apply(sc.bundle.audio[l]), 1.0);
        add_scaled_in_place(pre, sc.chain.input_visual.apply(sc.bundle.visual[l]), 1.0);
        for (auto& x : pre) x = std::tanh(x);
        out.states[l] = realized(l + 1, normalized(pre));
    }

    out.fused_summary = sc.chain.summary_audio.apply(sc.bundle.audio[n - 1]);
    add_scaled_in_place(out.fused_summary, sc.chain.summary_visual.apply(sc.bundle.visual[n - 1]), 1.0);
    add_scaled_in_place(out.fused_summary, sc.chain.stage_weight[n - 1].apply(out.states[n - 1]), 1.0);
    out.utility = cosine_similarity(out.fused_summary, sc.target);
    return out;
}

namespace detail {

/// One construction attempt. Returns false when the drawn randomness fails
/// the planted-argmax soundness check and the caller should redraw.
inline bool try_generate(std::size_t num_stages, std::size_t feature_dim, Condition condition,
                         std::size_t planted, std::uint64_t seed, const ScenarioParams& p,
                         std::uint64_t attempt, PlantedScenario& out) {
    const std::size_t n = num_stages;
    const std::size_t d = feature_dim;
    const std::size_t rank = d / 2;

    SeededRng rng_basis(derive_seed(seed, 11 + attempt * 101));
    SeededRng rng_feat(derive_seed(seed, 29 + attempt * 101));
    SeededRng rng_chain(derive_seed(seed, 47 + attempt * 101));

    // supported subspace
    const Matrix basis = orthonormal_rows(rank, d, rng_basis);

    // Occlusion window: seed-determined for every condition so matched seeds
    // share it; only the occlusion_like condition applies the mask.
    const auto mask_width =
        static_cast<std::size_t>(std::llround(p.mask_fraction * static_cast<double>(d)));
    SeededRng rng_window(derive_seed(seed, 83 + attempt * 101));
    const std::size_t mask_start =
        mask_width >= d ? 0 : rng_window.uniform_index(d - mask_width + 1);

    // Unsupported direction: orthogonal to the supported subspace, zero on
    // the occlusion window, and seeded from a smooth low-frequency profile.
    // Degradation removes supported mass but leaves this direction mostly
    // intact, so the planted deficit gets sharper, not blurrier, under
    // degraded conditions. Found by alternating projections; falls back to a
    // plain orthogonal draw when the window leaves no room.
    Vec off_dir(d);
    {
        const double phase = static_cast<double>(rng_basis.uniform_index(d));
        for (std::size_t i = 0; i < d; ++i)
            off_dir[i] = 1.0 + std::cos(2.0 * 3.14159265358979323846 *
                                        (static_cast<double>(i) - phase) / static_cast<double>(d));
        const bool window_feasible = mask_width + rank + 1 <= d;
        for (int it = 0; it < 200; ++it) {
            if (window_feasible && mask_width > 0)
                std::fill(off_dir.begin() + static_cast<std::ptrdiff_t>(mask_start),
                          off_dir.begin() + static_cast<std::ptrdiff_t>(mask_start + mask_width),
                          0.0);
            off_dir = subtracted(off_dir, project_onto_rows(basis, off_dir));
        }
        if (norm(off_dir) < 1e-9) return false;
        off_dir = normalized(off_dir);
    }

    // Optional distractor direction: unsupported mass concentrated inside
    // the occlusion window and high-frequency, so degradation destroys it.
    // A stage carrying it looks committed under clean input and loses its
    // agreement once the visual side degrades: selections concentrate on
    // the true bottleneck exactly when conditions worsen.
    Vec distractor_dir(d, 0.0);
    std::size_t distractor_stage = 0;  // 1-based; 0 = none
    if (p.distractor_weight > 0.0) {
        Vec x = rng_basis.gaussian_vector(d);
        if (mask_width > 0)
            for (std::size_t i = 0; i < d; ++i)
                if (i < mask_start || i >= mask_start + mask_width) x[i] = 0.0;
        x = subtracted(x, project_onto_rows(basis, x));
        add_scaled_in_place(x, off_dir, -dot(x, off_dir));
        if (norm(x) < 1e-9) return false;
        distractor_dir = normalized(x);
        distractor_stage = planted <= (n + 1) / 2 ? n - 1 : 2;
        if (distractor_stage == planted) return false;
    }

    // Shared supported core: every stage carries it, which is what makes
    // healthy stages look covered by the all-stage evidence.
    Vec shared_core = basis.apply_transposed(rng_basis.gaussian_vector(rank));
    shared_core = normalized(shared_core);

    // Stage features. Ordinary stages put both modalities around the shared
    // core plus a stage-specific supported component. The planted stage
    // keeps the shared core, attenuates its own component, and adds a unit
    // unsupported direction shared by both modalities: strong agreement,
    // thin support, inflated state norm. The final stage additionally
    // consolidates every earlier stage pool with the planted pool weighted
    // by the influence scale; that is what anchors the planted content to
    // the delivered summary.
    //
    // A counterfactual ideal bundle (same draws, no corruption at the
    // planted stage) is built alongside; the utility target anchors to its
    // summary, so the planted corruption costs utility by construction and
    // repairing it recovers utility.
    StageBundle bundle, ideal;
    bundle.dim = ideal.dim = d;
    bundle.audio.resize(n);
    bundle.visual.resize(n);
    ideal.audio.resize(n);
    ideal.visual.resize(n);
    std::vector<Vec> pools(n), ideal_pools(n);
    for (std::size_t l = 0; l < n; ++l) {
        Vec fresh = basis.apply_transposed(rng_feat.gaussian_vector(rank));
        add_scaled_in_place(fresh, shared_core, -dot(fresh, shared_core));
        fresh = normalized(fresh);
        const Vec noise_a = rng_feat.gaussian_vector(d);
        const Vec noise_v = rng_feat.gaussian_vector(d);

        const bool is_planted = (l + 1 == planted);
        Vec core = scaled(shared_core, p.core_weight);
        Vec ideal_core = core;
        add_scaled_in_place(ideal_core, fresh, p.fresh_weight);
        double noise_sd = p.sigma;
        if (is_planted) {
            add_scaled_in_place(core, fresh, p.attenuation * p.fresh_weight);
            add_scaled_in_place(core, off_dir, p.off_weight);
            noise_sd = p.sigma_planted;
        } else if (l + 1 == distractor_stage) {
            core = ideal_core;
            add_scaled_in_place(core, distractor_dir, p.distractor_weight);
            noise_sd = p.sigma_planted;
        } else {
            core = ideal_core;
        }
        if (l + 1 == n && !is_planted) {
            const double scale = p.carry / std::sqrt(static_cast<double>(n - 1));
            Vec consolidated(d, 0.0), ideal_consolidated(d, 0.0);
            for (std::size_t k = 0; k + 1 < n; ++k) {
                const double w = (k + 1 == planted ? p.influence_scale : 1.0);
                add_scaled_in_place(consolidated, pools[k], w);
                add_scaled_in_place(ideal_consolidated, ideal_pools[k], w);
            }
            add_scaled_in_place(core, consolidated, scale);
            add_scaled_in_place(ideal_core, ideal_consolidated, scale);
        }
        const double ideal_sd = p.sigma;
        auto make_feature = [&](const Vec& c, const Vec& noise, double sd) {
            Vec f = c;
            add_scaled_in_place(f, noise, sd / std::sqrt(static_cast<double>(d)));
            return normalized(f);
        };
        bundle.audio[l] = make_feature(core, noise_a, noise_sd);
        bundle.visual[l] = make_feature(core, noise_v, noise_sd);
        ideal.audio[l] = make_feature(ideal_core, noise_a, ideal_sd);
        ideal.visual[l] = make_feature(ideal_core, noise_v, ideal_sd);
        pools[l] = scaled(added(bundle.audio[l], bundle.visual[l]), 0.5);
        ideal_pools[l] = scaled(added(ideal.audio[l], ideal.visual[l]), 0.5);
    }

    // propagation chain with the planted outgoing weight scaled up
    EncoderChain chain;
    chain.stage_weight.reserve(n);
    chain.stage_weight_norm.resize(n);
    for (std::size_t l = 0; l < n; ++l) {
        const double target_norm =
            p.chain_weight_norm * (l + 1 == planted ? p.influence_scale : 1.0);
        chain.stage_weight.push_back(
            identity_anchored(d, target_norm, p.chain_identity_mix, rng_chain));
        chain.stage_weight_norm[l] = target_norm;
    }
    chain.input_audio = identity_anchored(d, p.chain_input_norm, p.chain_identity_mix, rng_chain);
    chain.input_visual = identity_anchored(d, p.chain_input_norm, p.chain_identity_mix, rng_chain);
    chain.summary_audio =
        identity_anchored(d, p.chain_input_norm, p.chain_identity_mix, rng_chain);
    chain.summary_visual =
        identity_anchored(d, p.chain_input_norm, p.chain_identity_mix, rng_chain);

    // same degradation draws hit both bundles
    if (condition == Condition::OcclusionLike) {
        apply_occlusion(bundle, mask_start, mask_width);
        apply_occlusion(ideal, mask_start, mask_width);
    } else if (condition == Condition::NoiseBlurLike) {
        SeededRng noise_actual(derive_seed(seed, 131 + attempt * 101));
        SeededRng noise_ideal(derive_seed(seed, 131 + attempt * 101));
        apply_noise_blur(bundle, p.noise_var_ratio, p.blur_taps, noise_actual);
        apply_noise_blur(ideal, p.noise_var_ratio, p.blur_taps, noise_ideal);
    }
    bundle.validate();
    ideal.validate();

    out = PlantedScenario{};
    out.bundle = std::move(bundle);
    out.planted_bottleneck = planted;
    out.chain = std::move(chain);
    out.condition = condition;
    out.seed = seed;
    out.params = p;

    // hidden utility target: supported-subspace direction of the summary the
    // chain would deliver without the planted corruption
    out.target = Vec(d, 0.0);
    PlantedScenario ideal_run = out;
    ideal_run.bundle = std::move(ideal);
    Vec t = project_onto_rows(basis, propagate(ideal_run).fused_summary);
    if (norm(t) < 1e-9) return false;
    out.target = normalized(t);

    // analytic ground-truth factors from the final construction
    PlantedFactors f;
    f.agreement.resize(n);
    f.coverage.resize(n);
    f.influence.resize(n);
    double mean_norm = 0.0;
    for (double w : out.chain.stage_weight_norm) mean_norm += w;
    mean_norm /= static_cast<double>(n);
    for (std::size_t l = 0; l < n; ++l) {
        f.agreement[l] = cosine_similarity(out.bundle.audio[l], out.bundle.visual[l]);
        const Vec s = scaled(added(out.bundle.audio[l], out.bundle.visual[l]), 0.5);
        f.coverage[l] = cosine_similarity(s, project_onto_rows(basis, s));
        f.influence[l] = out.chain.stage_weight_norm[l] / mean_norm;
    }
    out.factors = std::move(f);

    // soundness: the planted stage must be the unique analytic-deficiency argmax
    // under hard psi with per-scenario median thresholds
    const Vec defic = analytical_deficiency(out.factors, median_thresholds(out.factors),
                                            PsiSpec{PsiMode::Hard, 10.0});
    const std::size_t best = argmax_index(defic);
    if (best != planted - 1 || defic[best] <= 0.0) return false;
    for (std::size_t l = 0; l < n; ++l)
        if (l != best && defic[l] >= defic[best]) return false;
    return true;
}

}  // namespace detail

/// Seeded scenario with planted ground truth. Deterministic: the same
/// arguments always yield the same scenario. Internally redraws (bounded,
/// seed-derived) until the construction soundness check passes.
inline PlantedScenario generate_scenario(std::size_t num_stages, std::size_t feature_dim,
                                         Condition condition, std::size_t planted_bottleneck,
                                         std::uint64_t seed,
                                         const ScenarioParams& params = ScenarioParams{}) {
    DPC_REQUIRE(num_stages >= 2, "generate_scenario: need at least two stages");
    DPC_REQUIRE(feature_dim >= 8, "generate_scenario: feature_dim must be >= 8");
    DPC_REQUIRE(planted_bottleneck >= 1 && planted_bottleneck <= num_stages,
                "generate_scenario: planted stage out of range");
    PlantedScenario sc;
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
        if (detail::try_generate(num_stages, feature_dim, condition, planted_bottleneck, seed,
                                 params, attempt, sc))
            return sc;
    }
    throw contract_error("generate_scenario: soundness check failed for every redraw");
}

}  // namespace dpc

#endif
