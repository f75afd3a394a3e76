#ifndef DPC_ASSESSMENT_HPP
#define DPC_ASSESSMENT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dpc/contract.hpp"
#include "dpc/linalg.hpp"
#include "dpc/numerics.hpp"
#include "dpc/scenario.hpp"

namespace dpc {

enum class ProjectionInit { IdentityLike, SeededOrthogonal };

inline std::string to_string(ProjectionInit p) {
    return p == ProjectionInit::IdentityLike ? "identity_like" : "seeded_orthogonal";
}

inline ProjectionInit projection_init_from_string(const std::string& s) {
    if (s == "identity_like") return ProjectionInit::IdentityLike;
    if (s == "seeded_orthogonal") return ProjectionInit::SeededOrthogonal;
    throw contract_error("unknown projection init: " + s);
}

/// Untrained projections for the assessment cues. Pairs whose outputs are
/// compared by cosine share one draw (P_a with P_v, P_z with P_f) so the
/// similarities stay geometric rather than decorrelating under independent
/// random maps.
struct ProjectionSet {
    Matrix stage;        // 2d -> d, fused stage state
    Matrix summary;      // 2d -> d, downstream summary anchor
    Matrix audio;        // d -> d, agreement lhs
    Matrix visual;       // d -> d, agreement rhs
    Matrix anchoring;    // d -> d, applied to both sides of the anchoring cue
    Matrix support;      // d -> d, support key/value and coverage projection
    ProjectionInit init = ProjectionInit::IdentityLike;
    std::uint64_t seed = 0;

    static ProjectionSet identity_like(std::size_t dim) {
        ProjectionSet p;
        p.init = ProjectionInit::IdentityLike;
        Matrix half(dim, 2 * dim);
        for (std::size_t i = 0; i < dim; ++i) {
            half(i, i) = 0.5;
            half(i, i + dim) = 0.5;
        }
        p.stage = half;
        p.summary = half;
        p.audio = Matrix::identity(dim);
        p.visual = p.audio;
        p.anchoring = p.audio;
        p.support = p.audio;
        return p;
    }

    static ProjectionSet seeded_orthogonal(std::size_t dim, std::uint64_t seed) {
        ProjectionSet p;
        p.init = ProjectionInit::SeededOrthogonal;
        p.seed = seed;
        SeededRng rng(derive_seed(seed, 5));
        p.stage = orthonormal_rows(dim, 2 * dim, rng);
        p.summary = p.stage;
        p.audio = orthonormal_rows(dim, dim, rng);
        p.visual = p.audio;
        p.anchoring = orthonormal_rows(dim, dim, rng);
        p.support = orthonormal_rows(dim, dim, rng);
        return p;
    }

    static ProjectionSet make(ProjectionInit init, std::size_t dim, std::uint64_t seed) {
        return init == ProjectionInit::IdentityLike ? identity_like(dim)
                                                    : seeded_orthogonal(dim, seed);
    }
};

enum class Normalization { PerScenarioZscore, None };

inline std::string to_string(Normalization n) {
    return n == Normalization::PerScenarioZscore ? "per_scenario_zscore" : "none";
}

inline Normalization normalization_from_string(const std::string& s) {
    if (s == "per_scenario_zscore") return Normalization::PerScenarioZscore;
    if (s == "none") return Normalization::None;
    throw contract_error("unknown normalization: " + s);
}

struct AssessmentConfig {
    // Thresholds live in the normalized score space. The propagation gate
    // sits below the cross-stage mean: the downstream summary aggregates
    // every stage's shared content, so a bottleneck's unsupported mass
    // always depresses its anchoring cosine somewhat, and a mean-level gate
    // would zero the very stage the score is meant to find. The gate only
    // needs to exclude clearly propagation-irrelevant stages.
    Thresholds tau{0.0, -1.5, 0.0};
    double beta = 10.0;             // psi sharpness
    double routing_tau = 0.5;       // softmax temperature for routing weights
    PsiMode psi_mode = PsiMode::Smooth;
    Normalization normalization = Normalization::PerScenarioZscore;
    double support_tau = 2.0;       // temperature of the support attention

    void validate() const {
        DPC_REQUIRE(routing_tau > 0.0, "config: routing temperature must be positive");
        DPC_REQUIRE(support_tau > 0.0, "config: support temperature must be positive");
        if (psi_mode == PsiMode::Smooth)
            DPC_REQUIRE(beta > 0.0, "config: beta must be positive in smooth mode");
    }

    PsiSpec psi() const { return PsiSpec{psi_mode, beta}; }
};

/// Per-stage readiness cues plus the support aggregation intermediates.
struct CueSet {
    Vec agreement;                 // audio-visual agreement per stage
    Vec anchoring;                 // similarity to the downstream summary
    Vec coverage;                  // similarity to aggregated support evidence
    std::vector<Vec> support;      // q_l per stage
    Matrix attention_audio;        // row l: weights over audio source stages
    Matrix attention_visual;       // row l: weights over visual source stages
};

/// Mean/std used for one cue's z-scoring; fallback marks a degenerate
/// (zero-spread) cue that was passed through unnormalized.
struct CueNormalization {
    double mean = 0.0;
    double stddev = 1.0;
    bool fallback = false;

    double apply(double x) const { return fallback ? x : (x - mean) / stddev; }
};

struct SurrogateResult {
    Vec deficiency;                          // D-hat per stage, nonnegative
    Vec agreement_n, anchoring_n, coverage_n;  // cues after normalization
    std::array<CueNormalization, 3> stats;   // agreement, anchoring, coverage
};

struct RouteResult {
    Vec weights;              // softmax(D-hat / tau_s)
    Vec one_hot;              // hard-selection weights
    std::size_t selected = 0; // 1-based argmax stage, lowest-index tie-break
    bool tie = false;         // a non-unique maximum was resolved by index
};

struct StageStates {
    std::vector<Vec> states;  // z_l per stage
    Vec summary;              // f_f from the final-stage features
};

/// z_l = P_stage [a_l; v_l] per stage; f_f = P_summary [a_N; v_N]. The summary
/// is computed once from uncorrected final-stage features and is not revised
/// after completion.
inline StageStates fuse_states(const StageBundle& bundle, const ProjectionSet& proj) {
    bundle.validate();
    const std::size_t n = bundle.num_stages();
    DPC_REQUIRE(proj.stage.cols == 2 * bundle.dim && proj.summary.cols == 2 * bundle.dim,
                "fuse_states: projection shape mismatch");
    StageStates out;
    out.states.reserve(n);
    for (std::size_t l = 0; l < n; ++l)
        out.states.push_back(proj.stage.apply(concat(bundle.audio[l], bundle.visual[l])));
    out.summary = proj.summary.apply(concat(bundle.audio[n - 1], bundle.visual[n - 1]));
    return out;
}

namespace detail {

/// Tempered cosine attention of one query over one modality's stage features.
/// Returns the pooled value vector; weights go to the given matrix row.
inline Vec attend_modality(const Vec& query, const std::vector<Vec>& features,
                           const Matrix& key_value_proj, double tau, Matrix* weights_out,
                           std::size_t row) {
    const std::size_t n = features.size();
    Vec scores(n);
    std::vector<Vec> values(n);
    for (std::size_t j = 0; j < n; ++j) {
        values[j] = key_value_proj.apply(features[j]);
        scores[j] = cosine_similarity(query, values[j]);
    }
    const Vec alpha = softmax_temperature(scores, tau);
    Vec pooled(query.size(), 0.0);
    for (std::size_t j = 0; j < n; ++j) add_scaled_in_place(pooled, values[j], alpha[j]);
    if (weights_out)
        for (std::size_t j = 0; j < n; ++j) (*weights_out)(row, j) = alpha[j];
    return pooled;
}

}  // namespace detail

/// Aggregated all-stage support for one query state: modality-wise tempered
/// cosine attention, averaged across modalities.
inline Vec support_evidence(const Vec& query, const StageBundle& bundle,
                            const ProjectionSet& proj, double tau) {
    const Vec qa = detail::attend_modality(query, bundle.audio, proj.support, tau, nullptr, 0);
    const Vec qv = detail::attend_modality(query, bundle.visual, proj.support, tau, nullptr, 0);
    return scaled(added(qa, qv), 0.5);
}

inline CueSet compute_cues(const StageBundle& bundle, const StageStates& st,
                           const ProjectionSet& proj, const AssessmentConfig& cfg) {
    const std::size_t n = bundle.num_stages();
    DPC_REQUIRE(st.states.size() == n, "compute_cues: state count mismatch");
    CueSet out;
    out.agreement.resize(n);
    out.anchoring.resize(n);
    out.coverage.resize(n);
    out.support.resize(n);
    out.attention_audio = Matrix(n, n);
    out.attention_visual = Matrix(n, n);

    const Vec anchored_summary = proj.anchoring.apply(st.summary);
    for (std::size_t l = 0; l < n; ++l) {
        out.agreement[l] = cosine_similarity(proj.audio.apply(bundle.audio[l]),
                                             proj.visual.apply(bundle.visual[l]));
        out.anchoring[l] =
            cosine_similarity(proj.anchoring.apply(st.states[l]), anchored_summary);
        const Vec qa = detail::attend_modality(st.states[l], bundle.audio, proj.support,
                                               cfg.support_tau, &out.attention_audio, l);
        const Vec qv = detail::attend_modality(st.states[l], bundle.visual, proj.support,
                                               cfg.support_tau, &out.attention_visual, l);
        out.support[l] = scaled(added(qa, qv), 0.5);
        out.coverage[l] = cosine_similarity(proj.support.apply(st.states[l]),
                                            proj.support.apply(out.support[l]));
    }
    return out;
}

namespace detail {

inline CueNormalization cue_stats(const Vec& x, Normalization mode) {
    CueNormalization s;
    if (mode == Normalization::None || x.size() < 2) {
        s.fallback = (mode != Normalization::None);
        return s;
    }
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    const double sd = std::sqrt(var);
    if (sd < 1e-12) {
        s.fallback = true;  // zero spread across stages: pass the cue through raw
        return s;
    }
    s.mean = mean;
    s.stddev = sd;
    return s;
}

}  // namespace detail

/// Deficiency surrogate from pre-computed cue vectors. Normalization stats
/// are derived here and recorded for report echo and frozen-stat re-use.
inline SurrogateResult readiness_surrogate(const Vec& agreement, const Vec& anchoring,
                                           const Vec& coverage, const AssessmentConfig& cfg) {
    const std::size_t n = agreement.size();
    DPC_REQUIRE(n >= 1, "readiness_surrogate: empty cues");
    DPC_REQUIRE(anchoring.size() == n && coverage.size() == n,
                "readiness_surrogate: cue length mismatch");
    cfg.validate();
    SurrogateResult out;
    out.stats[0] = detail::cue_stats(agreement, cfg.normalization);
    out.stats[1] = detail::cue_stats(anchoring, cfg.normalization);
    out.stats[2] = detail::cue_stats(coverage, cfg.normalization);
    out.agreement_n.resize(n);
    out.anchoring_n.resize(n);
    out.coverage_n.resize(n);
    out.deficiency.resize(n);
    for (std::size_t l = 0; l < n; ++l) {
        out.agreement_n[l] = out.stats[0].apply(agreement[l]);
        out.anchoring_n[l] = out.stats[1].apply(anchoring[l]);
        out.coverage_n[l] = out.stats[2].apply(coverage[l]);
        out.deficiency[l] =
            smooth_positive_part(out.agreement_n[l] - cfg.tau.agreement, cfg.beta, cfg.psi_mode) *
            smooth_positive_part(out.anchoring_n[l] - cfg.tau.propagation, cfg.beta, cfg.psi_mode) *
            smooth_positive_part(cfg.tau.coverage - out.coverage_n[l], cfg.beta, cfg.psi_mode);
    }
    return out;
}

/// Same surrogate evaluated under previously frozen normalization stats;
/// used when cues are recomputed at a corrected state and must stay
/// comparable to the baseline score space.
inline Vec deficiency_with_stats(const Vec& agreement, const Vec& anchoring, const Vec& coverage,
                                 const std::array<CueNormalization, 3>& stats,
                                 const AssessmentConfig& cfg) {
    const std::size_t n = agreement.size();
    Vec d(n);
    for (std::size_t l = 0; l < n; ++l) {
        d[l] = smooth_positive_part(stats[0].apply(agreement[l]) - cfg.tau.agreement, cfg.beta,
                                    cfg.psi_mode) *
               smooth_positive_part(stats[1].apply(anchoring[l]) - cfg.tau.propagation, cfg.beta,
                                    cfg.psi_mode) *
               smooth_positive_part(cfg.tau.coverage - stats[2].apply(coverage[l]), cfg.beta,
                                    cfg.psi_mode);
    }
    return d;
}

/// Partial derivatives of the unnormalized surrogate with respect to the
/// three cues at one stage: (dD/dA, dD/dP, dD/dC). Smooth mode only.
inline std::array<double, 3> deficiency_partials(double agreement, double anchoring,
                                                 double coverage, const AssessmentConfig& cfg) {
    DPC_REQUIRE(cfg.psi_mode == PsiMode::Smooth, "deficiency_partials: smooth mode only");
    const double fa = smooth_positive_part(agreement - cfg.tau.agreement, cfg.beta);
    const double fp = smooth_positive_part(anchoring - cfg.tau.propagation, cfg.beta);
    const double fc = smooth_positive_part(cfg.tau.coverage - coverage, cfg.beta);
    const double da = smooth_positive_part_derivative(agreement - cfg.tau.agreement, cfg.beta);
    const double dp = smooth_positive_part_derivative(anchoring - cfg.tau.propagation, cfg.beta);
    const double dc = smooth_positive_part_derivative(cfg.tau.coverage - coverage, cfg.beta);
    return {da * fp * fc, fa * dp * fc, -fa * fp * dc};
}

/// Routing weights plus hard selection with lowest-index tie-break.
inline RouteResult route(const Vec& deficiency, const AssessmentConfig& cfg) {
    cfg.validate();
    RouteResult out;
    out.weights = softmax_temperature(deficiency, cfg.routing_tau);
    out.selected = argmax_index(deficiency) + 1;
    for (std::size_t l = 0; l < deficiency.size(); ++l)
        if (l + 1 != out.selected && deficiency[l] == deficiency[out.selected - 1]) out.tie = true;
    out.one_hot = Vec(deficiency.size(), 0.0);
    out.one_hot[out.selected - 1] = 1.0;
    return out;
}

/// Full commitment-assessment record for one bundle.
struct ReadinessReport {
    Vec agreement, anchoring, coverage;      // raw cues
    SurrogateResult surrogate;
    RouteResult routing;
    AssessmentConfig config;
    ProjectionInit projection_init = ProjectionInit::IdentityLike;
    std::uint64_t projection_seed = 0;

    std::size_t num_stages() const { return agreement.size(); }
};

struct AssessmentOutcome {
    StageStates states;
    CueSet cues;
    ReadinessReport report;
};

inline AssessmentOutcome assess(const StageBundle& bundle, const ProjectionSet& proj,
                                const AssessmentConfig& cfg) {
    AssessmentOutcome out;
    out.states = fuse_states(bundle, proj);
    out.cues = compute_cues(bundle, out.states, proj, cfg);
    out.report.agreement = out.cues.agreement;
    out.report.anchoring = out.cues.anchoring;
    out.report.coverage = out.cues.coverage;
    out.report.surrogate =
        readiness_surrogate(out.cues.agreement, out.cues.anchoring, out.cues.coverage, cfg);
    out.report.routing = route(out.report.surrogate.deficiency, cfg);
    out.report.config = cfg;
    out.report.projection_init = proj.init;
    out.report.projection_seed = proj.seed;
    return out;
}

}  // namespace dpc

#endif
