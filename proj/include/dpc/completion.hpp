#ifndef DPC_COMPLETION_HPP
#define DPC_COMPLETION_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpc/assessment.hpp"
#include "dpc/contract.hpp"
#include "dpc/linalg.hpp"

namespace dpc {

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline Vec sigmoid_vec(const Vec& x) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = sigmoid(x[i]);
    return out;
}

enum class CompletionInit { Untrained, Zeroed };

inline std::string to_string(CompletionInit c) {
    return c == CompletionInit::Untrained ? "untrained" : "zeroed";
}

inline CompletionInit completion_init_from_string(const std::string& s) {
    if (s == "untrained") return CompletionInit::Untrained;
    if (s == "zeroed") return CompletionInit::Zeroed;
    throw contract_error("unknown completion init: " + s);
}

/// Untrained parameters of the support-aware completion path. The value path
/// (attention values, joint projection, refine layer) is identity-preserving
/// so the refined support stays in feature space and points at the pooled
/// evidence; the gate projections are seeded orthogonal draws.
struct CompletionParams {
    Matrix audio_from_visual;  // d -> d, gate projection inside u_a
    Matrix visual_from_audio;  // d -> d, gate projection inside u_v
    Matrix combine;            // 2d -> d, joint support projection
    Matrix gate;               // 2d -> d, residual gate projection
    Matrix refine_weight;      // d -> d, tanh-affine refine layer
    Vec refine_bias;           // d
    Matrix la_proj;            // d -> d, layer-aware attention key/value
    double la_tau = 0.5;       // layer-aware attention temperature
    CompletionInit init = CompletionInit::Untrained;
    std::uint64_t seed = 0;

    static CompletionParams untrained(std::size_t dim, std::uint64_t seed) {
        CompletionParams p;
        p.init = CompletionInit::Untrained;
        p.seed = seed;
        SeededRng rng(derive_seed(seed, 7));
        p.audio_from_visual = orthonormal_rows(dim, dim, rng);
        p.visual_from_audio = orthonormal_rows(dim, dim, rng);
        Matrix half(dim, 2 * dim);
        for (std::size_t i = 0; i < dim; ++i) {
            half(i, i) = 0.5;
            half(i, i + dim) = 0.5;
        }
        p.combine = half;
        p.gate = orthonormal_rows(dim, 2 * dim, rng);
        p.refine_weight = Matrix::identity(dim);
        p.refine_bias = Vec(dim, 0.0);
        p.la_proj = Matrix::identity(dim);
        return p;
    }

    /// All-zero parameters; the refined support collapses to zero, giving a
    /// null completion (used by the recovery-baseline tests).
    static CompletionParams zeroed(std::size_t dim) {
        CompletionParams p;
        p.init = CompletionInit::Zeroed;
        p.audio_from_visual = Matrix(dim, dim);
        p.visual_from_audio = Matrix(dim, dim);
        p.combine = Matrix(dim, 2 * dim);
        p.gate = Matrix(dim, 2 * dim);
        p.refine_weight = Matrix(dim, dim);
        p.refine_bias = Vec(dim, 0.0);
        p.la_proj = Matrix(dim, dim);
        return p;
    }

    static CompletionParams make(CompletionInit init, std::size_t dim, std::uint64_t seed) {
        return init == CompletionInit::Untrained ? untrained(dim, seed) : zeroed(dim);
    }
};

enum class CorrectionMode { Gated, Scalar };

struct CorrectionResult {
    Vec bottleneck;        // z_bn
    Vec visual_support;    // c_v
    Vec audio_support;     // c_a
    Vec mixed_audio;       // u_a
    Vec mixed_visual;      // u_v
    Vec refined_support;   // q_bn
    Vec gate;              // g_bn, empty in scalar mode
    Vec corrected;         // corrected bottleneck state
    CorrectionMode mode = CorrectionMode::Gated;
    std::optional<double> lambda_used;
};

/// z_bn = sum_l w_l z_l. A one-hot weight vector returns the selected state
/// verbatim so hard selection is exact.
inline Vec bottleneck_state(const Vec& weights, const std::vector<Vec>& states) {
    DPC_REQUIRE(weights.size() == states.size(), "bottleneck_state: weight/state count mismatch");
    DPC_REQUIRE(!states.empty(), "bottleneck_state: no states");
    double sum = 0.0;
    for (double w : weights) sum += w;
    DPC_REQUIRE(std::abs(sum - 1.0) <= 1e-6, "bottleneck_state: weights must sum to 1");
    for (std::size_t l = 0; l < weights.size(); ++l)
        if (weights[l] == 1.0) return states[l];
    Vec out(states[0].size(), 0.0);
    for (std::size_t l = 0; l < weights.size(); ++l)
        add_scaled_in_place(out, states[l], weights[l]);
    return out;
}

struct SupportEvidence {
    Vec visual_support;   // c_v
    Vec audio_support;    // c_a
    Vec mixed_audio;      // u_a
    Vec mixed_visual;     // u_v
    Vec refined_support;  // q_bn
};

/// Layer-aware support aggregation, cross-modal interaction, and refinement.
inline SupportEvidence aggregate_support(const Vec& bottleneck, const StageBundle& bundle,
                                         const CompletionParams& params) {
    DPC_REQUIRE(bottleneck.size() == bundle.dim, "aggregate_support: state dim mismatch");
    SupportEvidence out;
    out.visual_support = detail::attend_modality(bottleneck, bundle.visual, params.la_proj,
                                                 params.la_tau, nullptr, 0);
    out.audio_support = detail::attend_modality(bottleneck, bundle.audio, params.la_proj,
                                                params.la_tau, nullptr, 0);

    const Vec gate_a = sigmoid_vec(params.audio_from_visual.apply(out.visual_support));
    out.mixed_audio = out.visual_support;
    for (std::size_t i = 0; i < out.mixed_audio.size(); ++i)
        out.mixed_audio[i] += gate_a[i] * out.audio_support[i];

    const Vec gate_v = sigmoid_vec(params.visual_from_audio.apply(out.audio_support));
    out.mixed_visual = out.audio_support;
    for (std::size_t i = 0; i < out.mixed_visual.size(); ++i)
        out.mixed_visual[i] += gate_v[i] * out.visual_support[i];

    Vec pre = params.refine_weight.apply(
        params.combine.apply(concat(out.mixed_audio, out.mixed_visual)));
    for (std::size_t i = 0; i < pre.size(); ++i)
        pre[i] = std::tanh(pre[i] + params.refine_bias[i]);
    out.refined_support = std::move(pre);
    return out;
}

/// Residual correction. Gated mode scales the support injection entrywise by
/// a sigmoid gate; scalar mode applies the plain z + lambda * q update.
inline CorrectionResult gated_correction(const Vec& bottleneck, const SupportEvidence& support,
                                         const CompletionParams& params, CorrectionMode mode,
                                         double lambda = 1.0) {
    CorrectionResult out;
    out.bottleneck = bottleneck;
    out.visual_support = support.visual_support;
    out.audio_support = support.audio_support;
    out.mixed_audio = support.mixed_audio;
    out.mixed_visual = support.mixed_visual;
    out.refined_support = support.refined_support;
    out.mode = mode;
    if (mode == CorrectionMode::Scalar) {
        DPC_REQUIRE(lambda >= 0.0 && lambda <= 1.0, "gated_correction: lambda outside [0,1]");
        out.lambda_used = lambda;
        out.corrected = bottleneck;
        add_scaled_in_place(out.corrected, support.refined_support, lambda);
        return out;
    }
    out.gate = sigmoid_vec(params.gate.apply(concat(bottleneck, support.refined_support)));
    out.corrected = bottleneck;
    for (std::size_t i = 0; i < out.corrected.size(); ++i)
        out.corrected[i] += out.gate[i] * support.refined_support[i];
    return out;
}

/// Full completion at a routed bottleneck: blend states, aggregate support,
/// apply the residual correction.
inline CorrectionResult complete_at(const Vec& weights, const std::vector<Vec>& states,
                                    const StageBundle& bundle, const CompletionParams& params,
                                    CorrectionMode mode = CorrectionMode::Gated,
                                    double lambda = 1.0) {
    const Vec z = bottleneck_state(weights, states);
    const SupportEvidence support = aggregate_support(z, bundle, params);
    return gated_correction(z, support, params, mode, lambda);
}

}  // namespace dpc

#endif
