#include <catch_amalgamated.hpp>

#include <filesystem>

#include "dpc/assessment.hpp"
#include "dpc/completion.hpp"
#include "dpc/harness.hpp"
#include "dpc/report_io.hpp"
#include "dpc/scenario.hpp"
#include "dpc/serialize.hpp"
#include "dpc/sha1.hpp"
#include "dpc/svg.hpp"

using namespace dpc;
using Catch::Approx;

#ifndef DPC_GOLDEN_DIR
#define DPC_GOLDEN_DIR "tests/golden"
#endif

namespace {
std::filesystem::path golden(const std::string& name) {
    return std::filesystem::path(DPC_GOLDEN_DIR) / name;
}
}  // namespace

TEST_CASE("csv quoting follows rfc 4180") {
    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("with,comma") == "\"with,comma\"");
    CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_quote("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("csv builder emits a header and crlf rows") {
    CsvBuilder csv({"a", "b"});
    csv.row({"1", "x,y"});
    CHECK(csv.str() == "a,b\r\n1,\"x,y\"\r\n");
}

TEST_CASE("full-precision doubles round-trip through text") {
    SeededRng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double x = rng.gaussian() * std::pow(10.0, static_cast<double>(rng.uniform_index(8)));
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("sha1 matches known vectors") {
    CHECK(sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
    CHECK(sha1_hex("The quick brown fox jumps over the lazy dog") ==
          "2fd4e1c67a2d28fced849ee1bb76e7391b93eb12");
}

TEST_CASE("git blob hashing matches git") {
    CHECK(git_blob_sha1("what is up, doc?") == "bd9dbf5aae1a3862dd1526723246b20206e5fc37");
    CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("atomic writes create parents and replace content") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "dpc_io_test" / "nested";
    const std::filesystem::path file = dir / "out.txt";
    std::filesystem::remove_all(dir.parent_path());
    atomic_write_file(file, "first");
    CHECK(read_file(file) == "first");
    atomic_write_file(file, "second");
    CHECK(read_file(file) == "second");
    CHECK_FALSE(std::filesystem::exists(file.string() + ".tmp"));
    std::filesystem::remove_all(dir.parent_path());
}

TEST_CASE("report serialization carries every stage row") {
    const AssessmentConfig cfg;
    const PlantedScenario sc = generate_scenario(6, 32, Condition::Clean, 4, 7);
    const AssessmentOutcome out = assess(sc.bundle, ProjectionSet::identity_like(32), cfg);
    const json j = to_json(out.report);
    CHECK(j.at("stages").get<std::size_t>() == 6);
    CHECK(j.at("deficiency").size() == 6);
    CHECK(j.at("routing").at("selected").get<std::size_t>() == 4);
    CHECK(j.at("config").at("beta").get<double>() == 10.0);

    const std::string csv = report_to_csv(out.report);
    CHECK(csv.rfind("stage,A_hat,P_hat,C_hat,D_hat,omega,selected\r\n", 0) == 0);
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 7);  // header + six stages
    CHECK(csv.find(",1\r\n") != std::string::npos);  // a selected flag somewhere
}

TEST_CASE("harness tables serialize with documented headers") {
    CHECK(criteria_to_csv({}).rfind(
              "criterion,fixed_k,trials,mean_utility,std_utility,mean_drop,mean_recovery\r\n",
              0) == 0);
    CHECK(intervention_to_csv({}).rfind(
              "target,variant,trials,mean_drop,std_drop,mean_recovery,std_recovery\r\n", 0) == 0);
    const Prop1Result p1 = verify_prop1(100, 0.1, 6, NoiseModel::Uniform, 1);
    const std::string csv = prop1_to_csv({p1});
    CHECK(csv.find("margin_gt_2eps") != std::string::npos);
    CHECK(csv.find("margin_le_2eps") != std::string::npos);
    CHECK(csv.find("uniform") != std::string::npos);
}

TEST_CASE("heatmap is deterministic and handles degenerate inputs") {
    TrajectoryRecord rec;
    rec.condition = "clean";
    rec.num_stages = 1;
    rec.mean_agreement = {0.5};
    rec.mean_anchoring = {0.25};
    rec.mean_coverage = {0.75};
    rec.mean_deficiency = {0.1};
    const std::string one = render_heatmap(rec);
    CHECK(one == render_heatmap(rec));
    std::size_t cells = 0;
    for (std::size_t pos = one.find("<rect"); pos != std::string::npos;
         pos = one.find("<rect", pos + 1))
        ++cells;
    CHECK(cells == 1 + 4);  // background + 1x4 grid

    TrajectoryRecord flat;
    flat.condition = "clean";
    flat.num_stages = 3;
    flat.mean_agreement = {0.4, 0.4, 0.4};
    flat.mean_anchoring = {0.4, 0.4, 0.4};
    flat.mean_coverage = {0.4, 0.4, 0.4};
    flat.mean_deficiency = {0.4, 0.4, 0.4};
    const std::string svg = render_heatmap(flat);
    std::size_t uniform_cells = 0;
    for (std::size_t pos = svg.find("fill-opacity=\"0.500000\""); pos != std::string::npos;
         pos = svg.find("fill-opacity=\"0.500000\"", pos + 1))
        ++uniform_cells;
    CHECK(uniform_cells == 12);  // every cue cell renders at the constant-field opacity
}

TEST_CASE("golden scenario bytes are stable") {
    const PlantedScenario sc = generate_scenario(6, 32, Condition::Clean, 4, 7);
    CHECK(scenario_to_string(sc) == read_file(golden("scenario_seed7.json")));
}

TEST_CASE("golden reference values are stable") {
    const json ref = json::parse(read_file(golden("reference_values.json")));

    const PlantedScenario sc = generate_scenario(6, 32, Condition::Clean, 4, 7);
    CHECK(propagate(sc).utility == ref.at("baseline_utility").get<double>());

    SeededRng pert(11);
    const DropOutcome drop = measure_drop(sc, 4, 0.1, 1e-6, pert);
    CHECK(drop.drop == ref.at("drop_seed11_target4").get<double>());

    const StageStates orth = fuse_states(sc.bundle, ProjectionSet::seeded_orthogonal(32, 7));
    const Vec want_summary = ref.at("fused_summary_orth7").get<Vec>();
    REQUIRE(orth.summary.size() == want_summary.size());
    for (std::size_t i = 0; i < want_summary.size(); ++i)
        CHECK(orth.summary[i] == want_summary[i]);

    const AssessmentConfig cfg;
    const AssessmentOutcome out = assess(sc.bundle, ProjectionSet::identity_like(32), cfg);
    const CompletionParams params = CompletionParams::untrained(32, 7);
    const SupportEvidence support =
        aggregate_support(out.states.states[out.report.routing.selected - 1], sc.bundle, params);
    const Vec want_q = ref.at("refined_support").get<Vec>();
    REQUIRE(support.refined_support.size() == want_q.size());
    for (std::size_t i = 0; i < want_q.size(); ++i)
        CHECK(support.refined_support[i] == Approx(want_q[i]).margin(1e-10));
}

TEST_CASE("golden heatmap hash is stable") {
    const TrajectoryRecord rec =
        record_trajectory(Condition::Clean, {7}, 6, 32, 4, ScenarioParams{}, AssessmentConfig{},
                          ProjectionInit::IdentityLike, CompletionInit::Untrained);
    const std::string svg = render_heatmap(rec);
    const json ref = json::parse(read_file(golden("reference_values.json")));
    CHECK(sha1_hex(svg) == ref.at("heatmap_seed7_sha1").get<std::string>());
    CHECK(svg == read_file(golden("heatmap_seed7.svg")));
}
