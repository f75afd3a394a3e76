// Command-line front end: scenario generation, assessment, completion,
// and the mechanism experiments (intervention, criteria, trajectory,
// proposition checks). Every run writes a manifest echoing the resolved
// configuration; re-running from a manifest reproduces the outputs.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpc/assessment.hpp"
#include "dpc/completion.hpp"
#include "dpc/harness.hpp"
#include "dpc/report_io.hpp"
#include "dpc/scenario.hpp"
#include "dpc/serialize.hpp"
#include "dpc/sha1.hpp"
#include "dpc/svg.hpp"

namespace {

using dpc::json;

struct RunConfig {
    std::size_t stages = 6;
    std::size_t dim = 32;
    std::string condition = "clean";
    std::size_t planted = 4;  // 0 cycles the interior stages across trials
    std::uint64_t seed = 7;
    std::size_t trials = 100;
    double eps = 0.1;
    double eps0 = 1e-6;
    std::string out = "out";
    std::string experiment = "prop1";  // verify: prop1 | prop2
    std::size_t fixed_depth_k = 3;
    std::string routing = "hard";   // complete: soft | hard
    std::string variant = "single"; // complete: single | top2 | iter2
    std::string scenario_file;      // load instead of generating
    std::string projection_init = "identity_like";
    std::uint64_t projection_seed = 0;  // 0: reuse the scenario seed
    std::string completion_init = "untrained";
    std::uint64_t completion_seed = 0;  // 0: reuse the scenario seed
    dpc::AssessmentConfig assessment;
    dpc::ScenarioParams scenario;
};

json to_json(const RunConfig& c) {
    return json{{"schema_version", 1},
                {"stages", c.stages},
                {"dim", c.dim},
                {"condition", c.condition},
                {"planted", c.planted},
                {"seed", c.seed},
                {"trials", c.trials},
                {"eps", c.eps},
                {"eps0", c.eps0},
                {"out", c.out},
                {"experiment", c.experiment},
                {"fixed_depth_k", c.fixed_depth_k},
                {"routing", c.routing},
                {"variant", c.variant},
                {"scenario_file", c.scenario_file},
                {"projection_init", c.projection_init},
                {"projection_seed", c.projection_seed},
                {"completion_init", c.completion_init},
                {"completion_seed", c.completion_seed},
                {"assessment", dpc::to_json(c.assessment)},
                {"scenario", dpc::to_json(c.scenario)}};
}

void apply_config_json(const json& j, RunConfig& c) {
    if (j.contains("schema_version"))
        DPC_REQUIRE(j.at("schema_version").get<int>() == 1, "config: unsupported schema_version");
    c.stages = j.value("stages", c.stages);
    c.dim = j.value("dim", c.dim);
    c.condition = j.value("condition", c.condition);
    c.planted = j.value("planted", c.planted);
    c.seed = j.value("seed", c.seed);
    c.trials = j.value("trials", c.trials);
    c.eps = j.value("eps", c.eps);
    c.eps0 = j.value("eps0", c.eps0);
    c.out = j.value("out", c.out);
    c.experiment = j.value("experiment", c.experiment);
    c.fixed_depth_k = j.value("fixed_depth_k", c.fixed_depth_k);
    c.routing = j.value("routing", c.routing);
    c.variant = j.value("variant", c.variant);
    c.scenario_file = j.value("scenario_file", c.scenario_file);
    c.projection_init = j.value("projection_init", c.projection_init);
    c.projection_seed = j.value("projection_seed", c.projection_seed);
    c.completion_init = j.value("completion_init", c.completion_init);
    c.completion_seed = j.value("completion_seed", c.completion_seed);
    if (j.contains("assessment"))
        c.assessment = dpc::assessment_config_from_json(j.at("assessment"));
    if (j.contains("scenario"))
        c.scenario = dpc::scenario_params_from_json(j.at("scenario"));
}

void validate_config(const RunConfig& c) {
    DPC_REQUIRE(c.stages >= 2, "config: stages must be >= 2");
    DPC_REQUIRE(c.dim >= 8, "config: dim must be >= 8");
    DPC_REQUIRE(c.planted <= c.stages, "config: planted stage out of range");
    DPC_REQUIRE(c.trials >= 1, "config: trials must be >= 1");
    DPC_REQUIRE(c.eps >= 0.0, "config: eps must be nonnegative");
    DPC_REQUIRE(c.eps0 > 0.0, "config: eps0 must be positive");
    DPC_REQUIRE(c.fixed_depth_k >= 1 && c.fixed_depth_k <= c.stages,
                "config: fixed_depth_k out of range");
    DPC_REQUIRE(c.routing == "soft" || c.routing == "hard", "config: routing must be soft|hard");
    DPC_REQUIRE(c.variant == "single" || c.variant == "top2" || c.variant == "iter2",
                "config: variant must be single|top2|iter2");
    DPC_REQUIRE(c.experiment == "prop1" || c.experiment == "prop2",
                "config: experiment must be prop1|prop2");
    dpc::condition_from_string(c.condition);
    dpc::projection_init_from_string(c.projection_init);
    dpc::completion_init_from_string(c.completion_init);
    c.assessment.validate();
}

/// Planted stage for one trial: a fixed index, or interior-stage cycling
/// when the config says 0.
std::size_t planted_for_trial(const RunConfig& c, std::size_t trial) {
    if (c.planted >= 1) return c.planted;
    const std::size_t interior = c.stages - 2;
    return 2 + (trial % interior);
}

dpc::PlantedScenario scenario_for_trial(const RunConfig& c, std::size_t trial) {
    const std::uint64_t seed = c.trials == 1 ? c.seed : dpc::derive_seed(c.seed, 300 + trial);
    return dpc::generate_scenario(c.stages, c.dim, dpc::condition_from_string(c.condition),
                                  planted_for_trial(c, trial), seed, c.scenario);
}

dpc::ProjectionSet projections_for(const RunConfig& c, std::uint64_t scenario_seed) {
    const std::uint64_t seed = c.projection_seed ? c.projection_seed : scenario_seed;
    return dpc::ProjectionSet::make(dpc::projection_init_from_string(c.projection_init), c.dim,
                                    seed);
}

dpc::CompletionParams completion_for(const RunConfig& c, std::uint64_t scenario_seed) {
    const std::uint64_t seed = c.completion_seed ? c.completion_seed : scenario_seed;
    return dpc::CompletionParams::make(dpc::completion_init_from_string(c.completion_init), c.dim,
                                       seed);
}

struct OutputSink {
    std::filesystem::path dir;
    std::vector<std::string> written;
    std::map<std::string, std::string> scenario_hashes;

    void write(const std::string& name, const std::string& content) {
        dpc::atomic_write_file(dir / name, content);
        written.push_back(name);
    }

    void write_scenario(const std::string& name, const std::string& content) {
        write(name, content);
        scenario_hashes[name] = dpc::git_blob_sha1(content);
    }
};

void write_manifest(const RunConfig& cfg, const std::string& command, OutputSink& sink) {
    json j{{"schema_version", 1},
           {"command", command},
           {"config", to_json(cfg)},
           {"outputs", sink.written},
           {"config_sha1", dpc::sha1_hex(to_json(cfg).dump(2))}};
    if (!sink.scenario_hashes.empty()) j["scenario_hashes"] = sink.scenario_hashes;
    sink.write("manifest.json", j.dump(2) + "\n");
}

dpc::PlantedScenario load_or_generate(const RunConfig& cfg, OutputSink* sink) {
    if (!cfg.scenario_file.empty()) {
        const std::string text = dpc::read_file(cfg.scenario_file);
        if (sink) sink->scenario_hashes["input:" + cfg.scenario_file] = dpc::git_blob_sha1(text);
        return dpc::scenario_from_string(text);
    }
    const std::size_t planted = cfg.planted >= 1 ? cfg.planted : 2;
    return dpc::generate_scenario(cfg.stages, cfg.dim, dpc::condition_from_string(cfg.condition),
                                  planted, cfg.seed, cfg.scenario);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_generate(const RunConfig& cfg) {
    OutputSink sink{cfg.out, {}, {}};
    const dpc::PlantedScenario sc = load_or_generate(cfg, nullptr);
    sink.write_scenario("scenario.json", dpc::scenario_to_string(sc));
    write_manifest(cfg, "generate", sink);
    std::cout << "wrote " << (sink.dir / "scenario.json").string() << "\n";
    return 0;
}

int cmd_assess(const RunConfig& cfg) {
    OutputSink sink{cfg.out, {}, {}};
    const dpc::PlantedScenario sc = load_or_generate(cfg, &sink);
    const dpc::ProjectionSet proj = projections_for(cfg, sc.seed);
    const dpc::AssessmentOutcome outcome = dpc::assess(sc.bundle, proj, cfg.assessment);
    sink.write("report.json", dpc::to_json(outcome.report).dump(2) + "\n");
    sink.write("report.csv", dpc::report_to_csv(outcome.report));
    write_manifest(cfg, "assess", sink);
    std::cout << "selected stage " << outcome.report.routing.selected << " (planted "
              << sc.planted_bottleneck << ")\n";
    return 0;
}

std::size_t second_best_stage(const dpc::Vec& deficiency, std::size_t selected) {
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t l = 0; l < deficiency.size(); ++l) {
        if (l + 1 == selected) continue;
        if (deficiency[l] > best_v) {
            best_v = deficiency[l];
            best = l + 1;
        }
    }
    return best;
}

int cmd_complete(const RunConfig& cfg) {
    OutputSink sink{cfg.out, {}, {}};
    const dpc::PlantedScenario sc = load_or_generate(cfg, &sink);
    const dpc::ProjectionSet proj = projections_for(cfg, sc.seed);
    const dpc::CompletionParams params = completion_for(cfg, sc.seed);
    const dpc::AssessmentOutcome outcome = dpc::assess(sc.bundle, proj, cfg.assessment);
    const dpc::PropagateResult base = dpc::propagate(sc);
    const std::size_t sel = outcome.report.routing.selected;

    // Bottleneck built from chain states: soft routing blends them, hard
    // routing picks the selected stage; the corrected state is injected at
    // the selected stage either way.
    const dpc::Vec& weights = cfg.routing == "soft" ? outcome.report.routing.weights
                                                    : outcome.report.routing.one_hot;
    std::map<std::size_t, dpc::Vec> overrides;
    json corrections = json::array();

    auto correct_at = [&](std::size_t stage, const dpc::Vec& state) {
        const dpc::SupportEvidence support = dpc::aggregate_support(state, sc.bundle, params);
        const dpc::CorrectionResult corr =
            dpc::gated_correction(state, support, params, dpc::CorrectionMode::Gated);
        overrides[stage] = corr.corrected;
        json cj = dpc::to_json(corr);
        cj["stage"] = stage;
        corrections.push_back(cj);
    };

    if (cfg.variant == "single") {
        correct_at(sel, dpc::bottleneck_state(weights, base.states));
    } else if (cfg.variant == "top2") {
        const std::size_t second = second_best_stage(outcome.report.surrogate.deficiency, sel);
        correct_at(sel, dpc::bottleneck_state(weights, base.states));
        correct_at(second, base.states[second - 1]);
    } else {  // iter2: re-propagate after the first correction, then correct
        correct_at(sel, dpc::bottleneck_state(weights, base.states));
        const dpc::PropagateResult mid = dpc::propagate(sc, overrides);
        const std::size_t second = second_best_stage(outcome.report.surrogate.deficiency, sel);
        correct_at(second, mid.states[second - 1]);
    }
    const dpc::PropagateResult healed = dpc::propagate(sc, overrides);

    json j{{"schema_version", 1},
           {"routing", cfg.routing},
           {"variant", cfg.variant},
           {"selected", sel},
           {"utility_before", base.utility},
           {"utility_after", healed.utility},
           {"corrections", corrections},
           {"report", dpc::to_json(outcome.report)}};
    sink.write("correction.json", j.dump(2) + "\n");
    write_manifest(cfg, "complete", sink);
    std::cout << "utility " << base.utility << " -> " << healed.utility << "\n";
    return 0;
}

int cmd_intervene(const RunConfig& cfg) {
    OutputSink sink{cfg.out, {}, {}};
    const std::vector<dpc::TargetKind> targets = {dpc::TargetKind::Selected,
                                                  dpc::TargetKind::Adjacent,
                                                  dpc::TargetKind::Random, dpc::TargetKind::Fixed};
    std::vector<dpc::Vec> drops(targets.size()), recs(targets.size());
    for (std::size_t i = 0; i < cfg.trials; ++i) {
        const dpc::PlantedScenario sc = scenario_for_trial(cfg, i);
        const dpc::ProjectionSet proj = projections_for(cfg, sc.seed);
        const dpc::CompletionParams params = completion_for(cfg, sc.seed);
        const dpc::AssessmentOutcome outcome = dpc::assess(sc.bundle, proj, cfg.assessment);
        const std::uint64_t pert_seed = dpc::derive_seed(sc.seed, 17);
        dpc::SeededRng target_rng(dpc::derive_seed(sc.seed, 23));
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const std::size_t stage =
                dpc::resolve_target(targets[t], outcome.report.routing.selected, cfg.stages,
                                    cfg.fixed_depth_k, target_rng);
            dpc::SeededRng rng(pert_seed);  // shared draw across targets
            const dpc::RecoveryOutcome r =
                dpc::measure_recovery(sc, stage, cfg.eps, cfg.eps0, params, rng);
            drops[t].push_back(r.drop);
            recs[t].push_back(r.recovery);
        }
    }
    std::vector<dpc::InterventionRow> rows;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        dpc::InterventionRow row;
        row.target = dpc::to_string(targets[t]);
        row.variant = cfg.variant;
        row.trials = cfg.trials;
        const dpc::MeanStd d = dpc::mean_std(drops[t]);
        const dpc::MeanStd r = dpc::mean_std(recs[t]);
        row.mean_drop = d.mean;
        row.std_drop = d.stddev;
        row.mean_recovery = r.mean;
        row.std_recovery = r.stddev;
        rows.push_back(row);
    }
    sink.write("intervention.csv", dpc::intervention_to_csv(rows));
    write_manifest(cfg, "intervene", sink);
    std::cout << "intervention over " << cfg.trials << " trials written\n";
    return 0;
}

int cmd_criteria(const RunConfig& cfg) {
    OutputSink sink{cfg.out, {}, {}};
    std::vector<dpc::PlantedScenario> scenarios;
    scenarios.reserve(cfg.trials);
    for (std::size_t i = 0; i < cfg.trials; ++i) scenarios.push_back(scenario_for_trial(cfg, i));
    const dpc::ProjectionSet proj = projections_for(cfg, cfg.seed);
    const dpc::CompletionParams params = completion_for(cfg, cfg.seed);
    const auto rows =
        dpc::compare_criteria(scenarios, dpc::all_criteria(cfg.fixed_depth_k), proj,
                              cfg.assessment, params, cfg.eps, cfg.eps0, cfg.seed);
    sink.write("criteria.csv", dpc::criteria_to_csv(rows));
    write_manifest(cfg, "criteria", sink);
    std::cout << "criteria comparison over " << cfg.trials << " scenarios written\n";
    return 0;
}

int cmd_trajectory(const RunConfig& cfg) {
    OutputSink sink{cfg.out, {}, {}};
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < cfg.trials; ++i)
        seeds.push_back(cfg.trials == 1 ? cfg.seed : dpc::derive_seed(cfg.seed, 300 + i));
    const std::size_t planted = cfg.planted >= 1 ? cfg.planted : 4;
    const dpc::TrajectoryRecord rec = dpc::record_trajectory(
        dpc::condition_from_string(cfg.condition), seeds, cfg.stages, cfg.dim, planted,
        cfg.scenario, cfg.assessment, dpc::projection_init_from_string(cfg.projection_init),
        dpc::completion_init_from_string(cfg.completion_init));
    sink.write("trajectory.csv", dpc::trajectory_to_csv(rec));
    sink.write("heatmap.svg", dpc::render_heatmap(rec));
    write_manifest(cfg, "trajectory", sink);
    std::cout << "trajectory over " << cfg.trials << " seeds written (entropy "
              << dpc::histogram_entropy(rec.histogram) << ")\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    OutputSink sink{cfg.out, {}, {}};
    if (cfg.experiment == "prop1") {
        std::vector<dpc::Prop1Result> results;
        results.push_back(dpc::verify_prop1(cfg.trials, cfg.eps, cfg.stages,
                                            dpc::NoiseModel::Uniform, cfg.seed));
        results.push_back(dpc::verify_prop1(cfg.trials, cfg.eps, cfg.stages,
                                            dpc::NoiseModel::AdversarialSign, cfg.seed));
        sink.write("prop1.csv", dpc::prop1_to_csv(results));
        write_manifest(cfg, "verify", sink);
        std::cout << "prop1: wide-margin pass rate (uniform) = "
                  << results[0].wide_margin.pass_rate() << "\n";
        return 0;
    }
    std::vector<dpc::Prop2Record> records;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
        const dpc::PlantedScenario sc = scenario_for_trial(cfg, i);
        const dpc::ProjectionSet proj = projections_for(cfg, sc.seed);
        const dpc::CompletionParams params = completion_for(cfg, sc.seed);
        records.push_back(dpc::verify_prop2_single(sc, proj, cfg.assessment, params));
    }
    sink.write("prop2.csv", dpc::prop2_to_csv(records));
    write_manifest(cfg, "verify", sink);
    std::size_t met = 0, improved = 0;
    for (const auto& r : records) {
        met += r.condition_met ? 1 : 0;
        improved += r.improved ? 1 : 0;
    }
    std::cout << "prop2: " << met << "/" << records.size() << " condition met, " << improved
              << " improved\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    if (const char* env_seed = std::getenv("DPC_SEED")) {
        try {
            cfg.seed = std::stoull(env_seed);
        } catch (...) {
            std::cerr << "invalid DPC_SEED: " << env_seed << "\n";
            return 2;
        }
    }

    // pass 1: pull the config file, if any, so flags can override it
    {
        std::string config_path;
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
            else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
        }
        if (!config_path.empty()) {
            try {
                json j = json::parse(dpc::read_file(config_path));
                // accept either a plain config document or a run manifest
                apply_config_json(j.contains("config") ? j.at("config") : j, cfg);
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
        }
    }

    CLI::App app{"delayed-commitment readiness toolkit"};
    app.require_subcommand(1);
    std::string config_path_parsed;

    std::string psi_mode = cfg.assessment.psi_mode == dpc::PsiMode::Smooth ? "smooth" : "hard";
    std::string normalization = to_string(cfg.assessment.normalization);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path_parsed, "JSON config file or run manifest");
        sub->add_option("--stages", cfg.stages, "fusion stage count");
        sub->add_option("--dim", cfg.dim, "feature dimension");
        sub->add_option("--condition", cfg.condition, "clean|occlusion_like|noise_blur_like");
        sub->add_option("--planted", cfg.planted, "planted stage (0 cycles interior stages)");
        sub->add_option("--seed", cfg.seed, "base seed (env DPC_SEED supplies the default)");
        sub->add_option("--trials", cfg.trials, "trial / scenario count");
        sub->add_option("--eps", cfg.eps, "perturbation energy fraction");
        sub->add_option("--eps0", cfg.eps0, "perturbation norm guard");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--fixed-depth-k", cfg.fixed_depth_k, "fixed-depth control stage");
        sub->add_option("--routing", cfg.routing, "soft|hard bottleneck construction");
        sub->add_option("--variant", cfg.variant, "single|top2|iter2 correction variant");
        sub->add_option("--scenario-file", cfg.scenario_file, "load a scenario JSON");
        sub->add_option("--projection-init", cfg.projection_init,
                        "identity_like|seeded_orthogonal");
        sub->add_option("--projection-seed", cfg.projection_seed, "0 reuses the scenario seed");
        sub->add_option("--completion-init", cfg.completion_init, "untrained|zeroed");
        sub->add_option("--completion-seed", cfg.completion_seed, "0 reuses the scenario seed");
        sub->add_option("--assessment.tau_a", cfg.assessment.tau.agreement, "agreement threshold");
        sub->add_option("--assessment.tau_p", cfg.assessment.tau.propagation,
                        "propagation threshold");
        sub->add_option("--assessment.tau_c", cfg.assessment.tau.coverage, "coverage threshold");
        sub->add_option("--assessment.beta_s", cfg.assessment.beta, "psi sharpness");
        sub->add_option("--assessment.tau_s", cfg.assessment.routing_tau, "routing temperature");
        sub->add_option("--assessment.tau_h", cfg.assessment.support_tau,
                        "support attention temperature");
        sub->add_option("--assessment.psi_mode", psi_mode, "smooth|hard");
        sub->add_option("--assessment.normalization", normalization, "per_scenario_zscore|none");
        sub->add_option("--scenario.attenuation", cfg.scenario.attenuation);
        sub->add_option("--scenario.off_weight", cfg.scenario.off_weight);
        sub->add_option("--scenario.distractor_weight", cfg.scenario.distractor_weight);
        sub->add_option("--scenario.influence_scale", cfg.scenario.influence_scale);
        sub->add_option("--scenario.mask_fraction", cfg.scenario.mask_fraction);
        sub->add_option("--scenario.noise_var_ratio", cfg.scenario.noise_var_ratio);
        sub->add_option("--scenario.blur_taps", cfg.scenario.blur_taps);
        sub->add_option("--scenario.core_weight", cfg.scenario.core_weight);
        sub->add_option("--scenario.fresh_weight", cfg.scenario.fresh_weight);
        sub->add_option("--scenario.carry", cfg.scenario.carry);
        sub->add_option("--scenario.sigma", cfg.scenario.sigma);
        sub->add_option("--scenario.sigma_planted", cfg.scenario.sigma_planted);
        sub->add_option("--scenario.chain_weight_norm", cfg.scenario.chain_weight_norm);
        sub->add_option("--scenario.chain_input_norm", cfg.scenario.chain_input_norm);
        sub->add_option("--scenario.chain_identity_mix", cfg.scenario.chain_identity_mix);
    };

    CLI::App* generate = app.add_subcommand("generate", "write a planted scenario JSON");
    CLI::App* assess = app.add_subcommand("assess", "readiness report for one scenario");
    CLI::App* complete = app.add_subcommand("complete", "support-aware correction + utility");
    CLI::App* intervene = app.add_subcommand("intervene", "drop/recovery per target");
    CLI::App* criteria = app.add_subcommand("criteria", "selection-criterion comparison");
    CLI::App* trajectory = app.add_subcommand("trajectory", "cue maps, histogram, heatmap");
    CLI::App* verify = app.add_subcommand("verify", "proposition checks");
    verify->add_option("--experiment", cfg.experiment, "prop1|prop2");
    for (CLI::App* sub : {generate, assess, complete, intervene, criteria, trajectory, verify})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        cfg.assessment.psi_mode = psi_mode == "hard" ? dpc::PsiMode::Hard : dpc::PsiMode::Smooth;
        if (psi_mode != "smooth" && psi_mode != "hard")
            throw dpc::contract_error("unknown psi_mode: " + psi_mode);
        cfg.assessment.normalization = dpc::normalization_from_string(normalization);
        validate_config(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (generate->parsed()) return cmd_generate(cfg);
        if (assess->parsed()) return cmd_assess(cfg);
        if (complete->parsed()) return cmd_complete(cfg);
        if (intervene->parsed()) return cmd_intervene(cfg);
        if (criteria->parsed()) return cmd_criteria(cfg);
        if (trajectory->parsed()) return cmd_trajectory(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
