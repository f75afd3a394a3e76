#ifndef DPC_SERIALIZE_HPP
#define DPC_SERIALIZE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "dpc/assessment.hpp"
#include "dpc/completion.hpp"
#include "dpc/contract.hpp"
#include "dpc/harness.hpp"
#include "dpc/report_io.hpp"
#include "dpc/scenario.hpp"

namespace dpc {

using json = nlohmann::json;
// ordered_json would keep insertion order; the plain object sorts keys,
// which is what the diff-stable manifests want.

inline json to_json(const Matrix& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

inline Matrix matrix_from_json(const json& j) {
    Matrix m;
    m.rows = j.at("rows").get<std::size_t>();
    m.cols = j.at("cols").get<std::size_t>();
    m.data = j.at("data").get<std::vector<double>>();
    DPC_REQUIRE(m.rows >= 1 && m.cols >= 1 && m.data.size() == m.rows * m.cols,
                "matrix json: inconsistent shape");
    DPC_REQUIRE(all_finite(m.data), "matrix json: non-finite entry");
    return m;
}

// ---------------------------------------------------------------------------
// scenario documents
// ---------------------------------------------------------------------------

inline json to_json(const ScenarioParams& p) {
    return json{{"attenuation", p.attenuation},
                {"off_weight", p.off_weight},
                {"distractor_weight", p.distractor_weight},
                {"influence_scale", p.influence_scale},
                {"mask_fraction", p.mask_fraction},
                {"noise_var_ratio", p.noise_var_ratio},
                {"blur_taps", p.blur_taps},
                {"core_weight", p.core_weight},
                {"fresh_weight", p.fresh_weight},
                {"carry", p.carry},
                {"sigma", p.sigma},
                {"sigma_planted", p.sigma_planted},
                {"chain_weight_norm", p.chain_weight_norm},
                {"chain_identity_mix", p.chain_identity_mix},
                {"chain_input_norm", p.chain_input_norm}};
}

inline ScenarioParams scenario_params_from_json(const json& j) {
    ScenarioParams p;
    p.attenuation = j.value("attenuation", p.attenuation);
    p.off_weight = j.value("off_weight", p.off_weight);
    p.distractor_weight = j.value("distractor_weight", p.distractor_weight);
    p.influence_scale = j.value("influence_scale", p.influence_scale);
    p.mask_fraction = j.value("mask_fraction", p.mask_fraction);
    p.noise_var_ratio = j.value("noise_var_ratio", p.noise_var_ratio);
    p.blur_taps = j.value("blur_taps", p.blur_taps);
    p.core_weight = j.value("core_weight", p.core_weight);
    p.fresh_weight = j.value("fresh_weight", p.fresh_weight);
    p.carry = j.value("carry", p.carry);
    p.sigma = j.value("sigma", p.sigma);
    p.sigma_planted = j.value("sigma_planted", p.sigma_planted);
    p.chain_weight_norm = j.value("chain_weight_norm", p.chain_weight_norm);
    p.chain_input_norm = j.value("chain_input_norm", p.chain_input_norm);
    p.chain_identity_mix = j.value("chain_identity_mix", p.chain_identity_mix);
    return p;
}

inline json to_json(const PlantedScenario& sc) {
    json j;
    j["schema_version"] = 1;
    j["header"] = json{{"num_stages", sc.num_stages()},
                       {"dim", sc.dim()},
                       {"condition", to_string(sc.condition)},
                       {"seed", sc.seed},
                       {"planted_bottleneck", sc.planted_bottleneck}};
    j["audio"] = sc.bundle.audio;
    j["visual"] = sc.bundle.visual;
    j["factors"] = json{{"agreement", sc.factors.agreement},
                        {"influence", sc.factors.influence},
                        {"coverage", sc.factors.coverage}};
    json weights = json::array();
    for (const auto& w : sc.chain.stage_weight) weights.push_back(to_json(w));
    j["chain"] = json{{"stage_weight", weights},
                      {"stage_weight_norm", sc.chain.stage_weight_norm},
                      {"input_audio", to_json(sc.chain.input_audio)},
                      {"input_visual", to_json(sc.chain.input_visual)},
                      {"summary_audio", to_json(sc.chain.summary_audio)},
                      {"summary_visual", to_json(sc.chain.summary_visual)}};
    j["target"] = sc.target;
    j["params"] = to_json(sc.params);
    return j;
}

inline PlantedScenario scenario_from_json(const json& j) {
    DPC_REQUIRE(j.value("schema_version", 0) == 1, "scenario json: unsupported schema_version");
    const json& h = j.at("header");
    PlantedScenario sc;
    sc.condition = condition_from_string(h.at("condition").get<std::string>());
    sc.seed = h.at("seed").get<std::uint64_t>();
    sc.planted_bottleneck = h.at("planted_bottleneck").get<std::size_t>();
    sc.bundle.dim = h.at("dim").get<std::size_t>();
    sc.bundle.audio = j.at("audio").get<std::vector<Vec>>();
    sc.bundle.visual = j.at("visual").get<std::vector<Vec>>();
    sc.bundle.validate();
    const std::size_t n = h.at("num_stages").get<std::size_t>();
    DPC_REQUIRE(sc.bundle.num_stages() == n, "scenario json: stage count mismatch");
    DPC_REQUIRE(sc.planted_bottleneck >= 1 && sc.planted_bottleneck <= n,
                "scenario json: planted stage out of range");
    sc.factors.agreement = j.at("factors").at("agreement").get<Vec>();
    sc.factors.influence = j.at("factors").at("influence").get<Vec>();
    sc.factors.coverage = j.at("factors").at("coverage").get<Vec>();
    const json& c = j.at("chain");
    for (const auto& w : c.at("stage_weight")) sc.chain.stage_weight.push_back(matrix_from_json(w));
    sc.chain.stage_weight_norm = c.at("stage_weight_norm").get<Vec>();
    sc.chain.input_audio = matrix_from_json(c.at("input_audio"));
    sc.chain.input_visual = matrix_from_json(c.at("input_visual"));
    sc.chain.summary_audio = matrix_from_json(c.at("summary_audio"));
    sc.chain.summary_visual = matrix_from_json(c.at("summary_visual"));
    DPC_REQUIRE(sc.chain.stage_weight.size() == n, "scenario json: chain weight count mismatch");
    sc.target = j.at("target").get<Vec>();
    DPC_REQUIRE(sc.target.size() == sc.bundle.dim, "scenario json: target dim mismatch");
    sc.params = scenario_params_from_json(j.at("params"));

    const Vec defic = analytical_deficiency(sc.factors, median_thresholds(sc.factors),
                                            PsiSpec{PsiMode::Hard, 10.0});
    DPC_REQUIRE(argmax_index(defic) == sc.planted_bottleneck - 1 &&
                    defic[sc.planted_bottleneck - 1] > 0.0,
                "scenario json: planted-argmax invariant violated");
    return sc;
}

inline std::string scenario_to_string(const PlantedScenario& sc) {
    return to_json(sc).dump(2) + "\n";
}

inline PlantedScenario scenario_from_string(const std::string& text) {
    return scenario_from_json(json::parse(text));
}

// ---------------------------------------------------------------------------
// assessment configuration and reports
// ---------------------------------------------------------------------------

inline json to_json(const AssessmentConfig& cfg) {
    return json{{"tau_agreement", cfg.tau.agreement},
                {"tau_propagation", cfg.tau.propagation},
                {"tau_coverage", cfg.tau.coverage},
                {"beta", cfg.beta},
                {"routing_tau", cfg.routing_tau},
                {"psi_mode", cfg.psi_mode == PsiMode::Smooth ? "smooth" : "hard"},
                {"normalization", to_string(cfg.normalization)},
                {"support_tau", cfg.support_tau}};
}

inline AssessmentConfig assessment_config_from_json(const json& j) {
    AssessmentConfig cfg;
    cfg.tau.agreement = j.value("tau_agreement", cfg.tau.agreement);
    cfg.tau.propagation = j.value("tau_propagation", cfg.tau.propagation);
    cfg.tau.coverage = j.value("tau_coverage", cfg.tau.coverage);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.routing_tau = j.value("routing_tau", cfg.routing_tau);
    if (j.contains("psi_mode")) {
        const std::string m = j.at("psi_mode").get<std::string>();
        if (m == "smooth") cfg.psi_mode = PsiMode::Smooth;
        else if (m == "hard") cfg.psi_mode = PsiMode::Hard;
        else throw contract_error("unknown psi_mode: " + m);
    }
    if (j.contains("normalization"))
        cfg.normalization = normalization_from_string(j.at("normalization").get<std::string>());
    cfg.support_tau = j.value("support_tau", cfg.support_tau);
    cfg.validate();
    return cfg;
}

inline json to_json(const ReadinessReport& r) {
    json stats = json::array();
    const char* cue_names[3] = {"agreement", "anchoring", "coverage"};
    for (int i = 0; i < 3; ++i)
        stats.push_back(json{{"cue", cue_names[i]},
                             {"mean", r.surrogate.stats[i].mean},
                             {"stddev", r.surrogate.stats[i].stddev},
                             {"fallback", r.surrogate.stats[i].fallback}});
    return json{{"schema_version", 1},
                {"stages", r.num_stages()},
                {"agreement", r.agreement},
                {"anchoring", r.anchoring},
                {"coverage", r.coverage},
                {"normalized",
                 json{{"agreement", r.surrogate.agreement_n},
                      {"anchoring", r.surrogate.anchoring_n},
                      {"coverage", r.surrogate.coverage_n}}},
                {"deficiency", r.surrogate.deficiency},
                {"routing",
                 json{{"weights", r.routing.weights},
                      {"one_hot", r.routing.one_hot},
                      {"selected", r.routing.selected},
                      {"tie", r.routing.tie}}},
                {"normalization_stats", stats},
                {"config", to_json(r.config)},
                {"projection",
                 json{{"init", to_string(r.projection_init)}, {"seed", r.projection_seed}}}};
}

inline std::string report_to_csv(const ReadinessReport& r) {
    CsvBuilder csv({"stage", "A_hat", "P_hat", "C_hat", "D_hat", "omega", "selected"});
    for (std::size_t l = 0; l < r.num_stages(); ++l) {
        csv.row({std::to_string(l + 1), format_double(r.agreement[l]),
                 format_double(r.anchoring[l]), format_double(r.coverage[l]),
                 format_double(r.surrogate.deficiency[l]), format_double(r.routing.weights[l]),
                 l + 1 == r.routing.selected ? "1" : "0"});
    }
    return csv.str();
}

inline json to_json(const CorrectionResult& c) {
    json j{{"schema_version", 1},
           {"mode", c.mode == CorrectionMode::Gated ? "gated" : "scalar"},
           {"bottleneck", c.bottleneck},
           {"visual_support", c.visual_support},
           {"audio_support", c.audio_support},
           {"mixed_audio", c.mixed_audio},
           {"mixed_visual", c.mixed_visual},
           {"refined_support", c.refined_support},
           {"corrected", c.corrected}};
    if (!c.gate.empty()) j["gate"] = c.gate;
    if (c.lambda_used) j["lambda_used"] = *c.lambda_used;
    return j;
}

// ---------------------------------------------------------------------------
// harness result tables
// ---------------------------------------------------------------------------

inline std::string criteria_to_csv(const std::vector<CriterionRow>& rows) {
    CsvBuilder csv({"criterion", "fixed_k", "trials", "mean_utility", "std_utility", "mean_drop",
                    "mean_recovery"});
    for (const auto& r : rows)
        csv.row({r.criterion, std::to_string(r.fixed_k), std::to_string(r.trials),
                 format_double(r.mean_utility), format_double(r.std_utility),
                 format_double(r.mean_drop), format_double(r.mean_recovery)});
    return csv.str();
}

inline std::string intervention_to_csv(const std::vector<InterventionRow>& rows) {
    CsvBuilder csv({"target", "variant", "trials", "mean_drop", "std_drop", "mean_recovery",
                    "std_recovery"});
    for (const auto& r : rows)
        csv.row({r.target, r.variant, std::to_string(r.trials), format_double(r.mean_drop),
                 format_double(r.std_drop), format_double(r.mean_recovery),
                 format_double(r.std_recovery)});
    return csv.str();
}

inline std::string trajectory_to_csv(const TrajectoryRecord& rec) {
    CsvBuilder csv({"condition", "seed", "stage", "A_hat", "P_hat", "C_hat", "D_hat", "omega",
                    "selected", "C_sel_before", "C_sel_after", "D_sel_before", "D_sel_after"});
    for (std::size_t i = 0; i < rec.seeds.size(); ++i) {
        const ReadinessReport& r = rec.reports[i];
        for (std::size_t l = 0; l < rec.num_stages; ++l) {
            const bool sel = (l + 1 == rec.selected[i]);
            csv.row({rec.condition, std::to_string(rec.seeds[i]), std::to_string(l + 1),
                     format_double(r.agreement[l]), format_double(r.anchoring[l]),
                     format_double(r.coverage[l]), format_double(r.surrogate.deficiency[l]),
                     format_double(r.routing.weights[l]), sel ? "1" : "0",
                     sel ? format_double(rec.coverage_before[i]) : "",
                     sel ? format_double(rec.coverage_after[i]) : "",
                     sel ? format_double(rec.deficiency_before[i]) : "",
                     sel ? format_double(rec.deficiency_after[i]) : ""});
        }
    }
    return csv.str();
}

inline std::string prop1_to_csv(const std::vector<Prop1Result>& results) {
    CsvBuilder csv({"eps", "noise_model", "trials", "stratum", "count", "preserved", "pass_rate"});
    for (const auto& r : results) {
        csv.row({format_double(r.eps), to_string(r.noise), std::to_string(r.trials),
                 "margin_gt_2eps", std::to_string(r.wide_margin.count),
                 std::to_string(r.wide_margin.preserved), format_double(r.wide_margin.pass_rate())});
        csv.row({format_double(r.eps), to_string(r.noise), std::to_string(r.trials),
                 "margin_le_2eps", std::to_string(r.narrow_margin.count),
                 std::to_string(r.narrow_margin.preserved),
                 format_double(r.narrow_margin.pass_rate())});
    }
    return csv.str();
}

inline std::string prop2_to_csv(const std::vector<Prop2Record>& records) {
    CsvBuilder csv({"seed", "selected", "derivative", "condition_met", "best_lambda", "C_before",
                    "C_after", "improved", "D_before", "D_after", "ap_factor_before",
                    "ap_factor_after", "D_decreased"});
    for (const auto& r : records)
        csv.row({std::to_string(r.seed), std::to_string(r.selected), format_double(r.derivative),
                 r.condition_met ? "1" : "0", format_double(r.best_lambda),
                 format_double(r.coverage_before), format_double(r.coverage_after),
                 r.improved ? "1" : "0", format_double(r.deficiency_before),
                 format_double(r.deficiency_after), format_double(r.ap_factor_before),
                 format_double(r.ap_factor_after), r.deficiency_decreased ? "1" : "0"});
    return csv.str();
}

}  // namespace dpc

#endif
