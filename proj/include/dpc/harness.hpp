#ifndef DPC_HARNESS_HPP
#define DPC_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpc/assessment.hpp"
#include "dpc/completion.hpp"
#include "dpc/contract.hpp"
#include "dpc/numerics.hpp"
#include "dpc/scenario.hpp"

namespace dpc {

// ---------------------------------------------------------------------------
// counterfactual perturbation and recovery
// ---------------------------------------------------------------------------

struct DropOutcome {
    double baseline_utility = 0.0;
    double perturbed_utility = 0.0;
    double drop = 0.0;  // baseline - perturbed
};

/// Utility drop from a matched-energy perturbation of the chain state at one
/// stage (1-based).
inline DropOutcome measure_drop(const PlantedScenario& sc, std::size_t stage, double eps,
                                double eps0, SeededRng& rng) {
    DPC_REQUIRE(stage >= 1 && stage <= sc.num_stages(), "measure_drop: stage out of range");
    const PropagateResult base = propagate(sc);
    const Vec perturbed = matched_energy_perturb(base.states[stage - 1], eps, eps0, rng);
    const PropagateResult hit = propagate(sc, {{stage, perturbed}});
    return DropOutcome{base.utility, hit.utility, base.utility - hit.utility};
}

struct RecoveryOutcome {
    double baseline_utility = 0.0;
    double perturbed_utility = 0.0;
    double recovered_utility = 0.0;
    double drop = 0.0;
    double recovery = 0.0;  // recovered - perturbed
};

/// Utility regained by running support-aware completion on the perturbed
/// state and re-propagating.
inline RecoveryOutcome measure_recovery(const PlantedScenario& sc, std::size_t stage, double eps,
                                        double eps0, const CompletionParams& params,
                                        SeededRng& rng) {
    DPC_REQUIRE(stage >= 1 && stage <= sc.num_stages(), "measure_recovery: stage out of range");
    const PropagateResult base = propagate(sc);
    const Vec perturbed = matched_energy_perturb(base.states[stage - 1], eps, eps0, rng);
    const PropagateResult hit = propagate(sc, {{stage, perturbed}});
    const SupportEvidence support = aggregate_support(perturbed, sc.bundle, params);
    const CorrectionResult corr =
        gated_correction(perturbed, support, params, CorrectionMode::Gated);
    const PropagateResult healed = propagate(sc, {{stage, corr.corrected}});
    RecoveryOutcome out;
    out.baseline_utility = base.utility;
    out.perturbed_utility = hit.utility;
    out.recovered_utility = healed.utility;
    out.drop = base.utility - hit.utility;
    out.recovery = healed.utility - hit.utility;
    return out;
}

// ---------------------------------------------------------------------------
// intervention targets and aggregated experiment
// ---------------------------------------------------------------------------

enum class TargetKind { Selected, Adjacent, Random, Fixed };

inline std::string to_string(TargetKind t) {
    switch (t) {
        case TargetKind::Selected: return "selected";
        case TargetKind::Adjacent: return "adjacent";
        case TargetKind::Random: return "random";
        case TargetKind::Fixed: return "fixed";
    }
    return "selected";
}

/// Resolve a target to a stage. Adjacent is the stage after the selection
/// when one exists, otherwise the stage before.
inline std::size_t resolve_target(TargetKind kind, std::size_t selected, std::size_t num_stages,
                                  std::size_t fixed_k, SeededRng& rng) {
    switch (kind) {
        case TargetKind::Selected: return selected;
        case TargetKind::Adjacent: return selected < num_stages ? selected + 1 : selected - 1;
        case TargetKind::Random: return 1 + rng.uniform_index(num_stages);
        case TargetKind::Fixed:
            DPC_REQUIRE(fixed_k >= 1 && fixed_k <= num_stages, "fixed target out of range");
            return fixed_k;
    }
    return selected;
}

struct InterventionRow {
    std::string target;
    std::string variant;
    std::size_t trials = 0;
    double mean_drop = 0.0, std_drop = 0.0;
    double mean_recovery = 0.0, std_recovery = 0.0;
};

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

inline MeanStd mean_std(const Vec& xs) {
    MeanStd out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    return out;
}

// ---------------------------------------------------------------------------
// selection criteria
// ---------------------------------------------------------------------------

enum class CriterionKind {
    FullReadiness,
    AgreementOnly,
    PropagationOnly,
    SupportDeficitOnly,
    AttentionResponse,
    FixedDepth,
    Random
};

struct CriterionSpec {
    CriterionKind kind = CriterionKind::FullReadiness;
    std::size_t fixed_k = 3;  // 1-based, FixedDepth only
};

inline std::string to_string(CriterionKind k) {
    switch (k) {
        case CriterionKind::FullReadiness: return "full_readiness";
        case CriterionKind::AgreementOnly: return "agreement_only";
        case CriterionKind::PropagationOnly: return "propagation_only";
        case CriterionKind::SupportDeficitOnly: return "support_deficit_only";
        case CriterionKind::AttentionResponse: return "attention_response";
        case CriterionKind::FixedDepth: return "fixed_depth";
        case CriterionKind::Random: return "random";
    }
    return "full_readiness";
}

inline std::vector<CriterionSpec> all_criteria(std::size_t fixed_k) {
    return {{CriterionKind::FullReadiness, fixed_k},    {CriterionKind::AgreementOnly, fixed_k},
            {CriterionKind::PropagationOnly, fixed_k},  {CriterionKind::SupportDeficitOnly, fixed_k},
            {CriterionKind::AttentionResponse, fixed_k}, {CriterionKind::FixedDepth, fixed_k},
            {CriterionKind::Random, fixed_k}};
}

inline std::size_t argmin_index(const Vec& v) {
    DPC_REQUIRE(!v.empty(), "argmin: empty input");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

inline double entropy_nats(const Vec& p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log(x);
    return h;
}

/// Attention-response score per stage: complement of the normalized entropy
/// of the support attention rows, averaged over modalities. One admissible
/// reading of selecting by interaction magnitude; reports label it as such.
inline Vec attention_response_scores(const CueSet& cues) {
    const std::size_t n = cues.agreement.size();
    const double log_n = std::log(static_cast<double>(n));
    Vec scores(n, 0.0);
    if (n == 1) return scores;
    for (std::size_t l = 0; l < n; ++l) {
        Vec row_a(n), row_v(n);
        for (std::size_t j = 0; j < n; ++j) {
            row_a[j] = cues.attention_audio(l, j);
            row_v[j] = cues.attention_visual(l, j);
        }
        scores[l] = 1.0 - (entropy_nats(row_a) + entropy_nats(row_v)) / (2.0 * log_n);
    }
    return scores;
}

/// Stage (1-based) chosen by a selection criterion.
inline std::size_t select_stage(const CriterionSpec& criterion, const AssessmentOutcome& outcome,
                                SeededRng& rng) {
    const std::size_t n = outcome.report.num_stages();
    switch (criterion.kind) {
        case CriterionKind::FullReadiness: return outcome.report.routing.selected;
        case CriterionKind::AgreementOnly: return argmax_index(outcome.report.agreement) + 1;
        case CriterionKind::PropagationOnly: return argmax_index(outcome.report.anchoring) + 1;
        case CriterionKind::SupportDeficitOnly: return argmin_index(outcome.report.coverage) + 1;
        case CriterionKind::AttentionResponse:
            return argmax_index(attention_response_scores(outcome.cues)) + 1;
        case CriterionKind::FixedDepth:
            DPC_REQUIRE(criterion.fixed_k >= 1 && criterion.fixed_k <= n,
                        "fixed_depth criterion out of range");
            return criterion.fixed_k;
        case CriterionKind::Random: return 1 + rng.uniform_index(n);
    }
    return 1;
}

struct CriterionRow {
    std::string criterion;
    std::size_t fixed_k = 0;
    std::size_t trials = 0;
    double mean_utility = 0.0;  // post perturb-at-selection + complete-at-selection
    double std_utility = 0.0;
    double mean_drop = 0.0;
    double mean_recovery = 0.0;
};

/// Selection-criterion comparison. Every criterion shares the completion
/// parameters and the per-trial perturbation seed; they differ only in which
/// stage is perturbed and then corrected.
inline std::vector<CriterionRow> compare_criteria(const std::vector<PlantedScenario>& scenarios,
                                                  const std::vector<CriterionSpec>& criteria,
                                                  const ProjectionSet& proj,
                                                  const AssessmentConfig& cfg,
                                                  const CompletionParams& params, double eps,
                                                  double eps0, std::uint64_t seed) {
    DPC_REQUIRE(!scenarios.empty(), "compare_criteria: no scenarios");
    DPC_REQUIRE(!criteria.empty(), "compare_criteria: empty criteria list");
    std::vector<Vec> finals(criteria.size()), drops(criteria.size()), recs(criteria.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const PlantedScenario& sc = scenarios[i];
        const AssessmentOutcome outcome = assess(sc.bundle, proj, cfg);
        const std::uint64_t trial_seed = derive_seed(seed, 900 + i);
        SeededRng select_rng(derive_seed(trial_seed, 1));
        for (std::size_t c = 0; c < criteria.size(); ++c) {
            const std::size_t stage = select_stage(criteria[c], outcome, select_rng);
            SeededRng pert_rng(trial_seed);  // bitwise-shared draw across criteria
            const RecoveryOutcome r = measure_recovery(sc, stage, eps, eps0, params, pert_rng);
            finals[c].push_back(r.recovered_utility);
            drops[c].push_back(r.drop);
            recs[c].push_back(r.recovery);
        }
    }
    std::vector<CriterionRow> rows;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        const MeanStd u = mean_std(finals[c]);
        CriterionRow row;
        row.criterion = to_string(criteria[c].kind);
        row.fixed_k = criteria[c].kind == CriterionKind::FixedDepth ? criteria[c].fixed_k : 0;
        row.trials = finals[c].size();
        row.mean_utility = u.mean;
        row.std_utility = u.stddev;
        row.mean_drop = mean_std(drops[c]).mean;
        row.mean_recovery = mean_std(recs[c]).mean;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// readiness trajectories
// ---------------------------------------------------------------------------

struct TrajectoryRecord {
    std::string condition;
    std::size_t num_stages = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<ReadinessReport> reports;       // one per seed
    std::vector<std::size_t> selected;          // per seed, 1-based
    Vec coverage_before, coverage_after;        // at the selected stage
    Vec deficiency_before, deficiency_after;    // frozen-stat score space
    Vec histogram;                              // selected-stage counts
    Vec mean_agreement, mean_anchoring, mean_coverage, mean_deficiency;
};

/// Cues recomputed after replacing the state at one stage (1-based). The
/// bundle features are untouched; only the query state changes.
inline CueSet cues_with_state(const StageBundle& bundle, StageStates states,
                              const ProjectionSet& proj, const AssessmentConfig& cfg,
                              std::size_t stage, const Vec& replacement) {
    states.states[stage - 1] = replacement;
    return compute_cues(bundle, states, proj, cfg);
}

/// Assessment across seeds for one condition: per-stage cue maps, the
/// selected-stage histogram, and coverage/deficiency around the gated
/// correction at the selected stage.
inline TrajectoryRecord record_trajectory(Condition condition,
                                          const std::vector<std::uint64_t>& seeds,
                                          std::size_t num_stages, std::size_t feature_dim,
                                          std::size_t planted, const ScenarioParams& sp,
                                          const AssessmentConfig& cfg, ProjectionInit proj_init,
                                          CompletionInit comp_init) {
    DPC_REQUIRE(!seeds.empty(), "record_trajectory: no seeds");
    TrajectoryRecord rec;
    rec.condition = to_string(condition);
    rec.num_stages = num_stages;
    rec.seeds = seeds;
    rec.histogram = Vec(num_stages, 0.0);
    rec.mean_agreement = Vec(num_stages, 0.0);
    rec.mean_anchoring = Vec(num_stages, 0.0);
    rec.mean_coverage = Vec(num_stages, 0.0);
    rec.mean_deficiency = Vec(num_stages, 0.0);

    for (std::uint64_t seed : seeds) {
        const PlantedScenario sc =
            generate_scenario(num_stages, feature_dim, condition, planted, seed, sp);
        const ProjectionSet proj = ProjectionSet::make(proj_init, feature_dim, seed);
        const CompletionParams params = CompletionParams::make(comp_init, feature_dim, seed);
        const AssessmentOutcome outcome = assess(sc.bundle, proj, cfg);
        const std::size_t sel = outcome.report.routing.selected;

        const Vec z_bn = outcome.states.states[sel - 1];
        const SupportEvidence support = aggregate_support(z_bn, sc.bundle, params);
        const CorrectionResult corr =
            gated_correction(z_bn, support, params, CorrectionMode::Gated);
        const CueSet after =
            cues_with_state(sc.bundle, outcome.states, proj, cfg, sel, corr.corrected);
        const Vec d_after = deficiency_with_stats(after.agreement, after.anchoring,
                                                  after.coverage, outcome.report.surrogate.stats,
                                                  cfg);

        rec.reports.push_back(outcome.report);
        rec.selected.push_back(sel);
        rec.histogram[sel - 1] += 1.0;
        rec.coverage_before.push_back(outcome.report.coverage[sel - 1]);
        rec.coverage_after.push_back(after.coverage[sel - 1]);
        rec.deficiency_before.push_back(outcome.report.surrogate.deficiency[sel - 1]);
        rec.deficiency_after.push_back(d_after[sel - 1]);
        for (std::size_t l = 0; l < num_stages; ++l) {
            rec.mean_agreement[l] += outcome.report.agreement[l];
            rec.mean_anchoring[l] += outcome.report.anchoring[l];
            rec.mean_coverage[l] += outcome.report.coverage[l];
            rec.mean_deficiency[l] += outcome.report.surrogate.deficiency[l];
        }
    }
    const double inv = 1.0 / static_cast<double>(seeds.size());
    for (std::size_t l = 0; l < num_stages; ++l) {
        rec.mean_agreement[l] *= inv;
        rec.mean_anchoring[l] *= inv;
        rec.mean_coverage[l] *= inv;
        rec.mean_deficiency[l] *= inv;
    }
    return rec;
}

/// Entropy (nats) of a selected-stage histogram.
inline double histogram_entropy(const Vec& histogram) {
    double total = 0.0;
    for (double c : histogram) total += c;
    if (total <= 0.0) return 0.0;
    Vec p = histogram;
    for (auto& x : p) x /= total;
    return entropy_nats(p);
}

// ---------------------------------------------------------------------------
// Proposition 1: ordering-preserving localization under bounded noise
// ---------------------------------------------------------------------------

enum class NoiseModel { Uniform, AdversarialSign };

inline std::string to_string(NoiseModel m) {
    return m == NoiseModel::Uniform ? "uniform" : "adversarial_sign";
}

struct Prop1Stratum {
    std::size_t count = 0;
    std::size_t preserved = 0;

    double pass_rate() const {
        return count == 0 ? 1.0 : static_cast<double>(preserved) / static_cast<double>(count);
    }
};

struct Prop1Result {
    double eps = 0.0;
    NoiseModel noise = NoiseModel::Uniform;
    std::size_t trials = 0;
    Prop1Stratum wide_margin;    // margin > 2*eps: must be 100% preserved
    Prop1Stratum narrow_margin;  // margin <= 2*eps: informational
};

/// Monte-Carlo check of the ordering-preservation guarantee: true deficiency
/// vectors with unique maxima, additive noise bounded by eps, argmax compared
/// before and after. The adversarial model puts +eps on the runner-up and
/// -eps on the leader to probe tightness of the 2*eps margin condition.
inline Prop1Result verify_prop1(std::size_t trials, double eps, std::size_t num_stages,
                                NoiseModel noise, std::uint64_t seed) {
    DPC_REQUIRE(eps >= 0.0, "verify_prop1: eps must be nonnegative");
    DPC_REQUIRE(num_stages >= 2, "verify_prop1: need at least two stages");
    Prop1Result out;
    out.eps = eps;
    out.noise = noise;
    out.trials = trials;
    SeededRng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        Vec d(num_stages);
        for (auto& x : d) x = rng.uniform();
        const std::size_t leader = argmax_index(d);
        double second = -1.0;
        std::size_t runner_up = leader == 0 ? 1 : 0;
        for (std::size_t l = 0; l < num_stages; ++l)
            if (l != leader && d[l] > second) {
                second = d[l];
                runner_up = l;
            }
        const double margin = d[leader] - second;

        Vec observed = d;
        if (noise == NoiseModel::Uniform) {
            for (auto& x : observed) x += rng.uniform(-eps, eps);
        } else {
            observed[leader] -= eps;
            observed[runner_up] += eps;
        }
        const bool preserved = argmax_index(observed) == leader;
        Prop1Stratum& s = margin > 2.0 * eps ? out.wide_margin : out.narrow_margin;
        s.count += 1;
        s.preserved += preserved ? 1 : 0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Proposition 2: local support correction raises coverage
// ---------------------------------------------------------------------------

struct Prop2Record {
    std::uint64_t seed = 0;
    std::size_t selected = 0;
    double derivative = 0.0;       // directional derivative of coverage along q_bn
    bool condition_met = false;    // derivative > 0
    double best_lambda = 0.0;
    double coverage_before = 0.0, coverage_after = 0.0;
    bool improved = false;         // some lambda raised coverage
    double deficiency_before = 0.0, deficiency_after = 0.0;
    double ap_factor_before = 0.0, ap_factor_after = 0.0;  // agreement*anchoring psi product
    bool deficiency_decreased = false;
};

inline std::vector<double> prop2_lambda_grid() {
    return {1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0};
}

/// Executable Proposition 2 on one scenario: estimate the coverage derivative
/// along the refined support by central differences, then search the lambda
/// grid with the scalar-mode update. Deficiency comparisons reuse the frozen
/// baseline normalization so the score space does not shift mid-check.
inline Prop2Record verify_prop2_single(const PlantedScenario& sc, const ProjectionSet& proj,
                                       const AssessmentConfig& cfg,
                                       const CompletionParams& params, double h = 1e-4) {
    const AssessmentOutcome outcome = assess(sc.bundle, proj, cfg);
    const std::size_t sel = outcome.report.routing.selected;
    const Vec z_bn = outcome.states.states[sel - 1];
    const SupportEvidence support = aggregate_support(z_bn, sc.bundle, params);
    const Vec& q = support.refined_support;
    const auto& stats = outcome.report.surrogate.stats;

    auto coverage_at = [&](const Vec& state) {
        const Vec evidence = support_evidence(state, sc.bundle, proj, cfg.support_tau);
        return cosine_similarity(proj.support.apply(state), proj.support.apply(evidence));
    };
    auto ap_factor_at = [&](const CueSet& cues) {
        return smooth_positive_part(stats[0].apply(cues.agreement[sel - 1]) - cfg.tau.agreement,
                                    cfg.beta, cfg.psi_mode) *
               smooth_positive_part(stats[1].apply(cues.anchoring[sel - 1]) - cfg.tau.propagation,
                                    cfg.beta, cfg.psi_mode);
    };

    Prop2Record rec;
    rec.seed = sc.seed;
    rec.selected = sel;
    rec.coverage_before = outcome.report.coverage[sel - 1];
    rec.deficiency_before = outcome.report.surrogate.deficiency[sel - 1];
    rec.ap_factor_before = ap_factor_at(outcome.cues);

    Vec plus = z_bn, minus = z_bn;
    add_scaled_in_place(plus, q, h);
    add_scaled_in_place(minus, q, -h);
    rec.derivative = (coverage_at(plus) - coverage_at(minus)) / (2.0 * h);
    rec.condition_met = rec.derivative > 0.0;

    double best_cov = rec.coverage_before;
    Vec best_state = z_bn;
    for (double lambda : prop2_lambda_grid()) {
        const CorrectionResult corr =
            gated_correction(z_bn, support, params, CorrectionMode::Scalar, lambda);
        const double cov = coverage_at(corr.corrected);
        if (cov > best_cov) {
            best_cov = cov;
            best_state = corr.corrected;
            rec.best_lambda = lambda;
            rec.improved = true;
        }
    }
    rec.coverage_after = best_cov;

    const CueSet after = cues_with_state(sc.bundle, outcome.states, proj, cfg, sel, best_state);
    const Vec d_after =
        deficiency_with_stats(after.agreement, after.anchoring, after.coverage, stats, cfg);
    rec.deficiency_after = d_after[sel - 1];
    rec.ap_factor_after = ap_factor_at(after);
    rec.deficiency_decreased = rec.deficiency_after < rec.deficiency_before;
    return rec;
}

}  // namespace dpc

#endif
