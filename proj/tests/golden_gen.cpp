// Writes the frozen reference files under tests/golden/. Run manually after
// an intentional behavior change, then commit the outputs:
//   build/tests/golden_gen tests/golden
#include <cstdio>
#include <filesystem>

#include "dpc/assessment.hpp"
#include "dpc/completion.hpp"
#include "dpc/harness.hpp"
#include "dpc/report_io.hpp"
#include "dpc/scenario.hpp"
#include "dpc/serialize.hpp"
#include "dpc/sha1.hpp"
#include "dpc/svg.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: golden_gen <output-dir>\n");
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    using namespace dpc;

    const PlantedScenario sc = generate_scenario(6, 32, Condition::Clean, 4, 7);
    atomic_write_file(dir / "scenario_seed7.json", scenario_to_string(sc));

    json ref;
    ref["baseline_utility"] = propagate(sc).utility;

    SeededRng pert(11);
    ref["drop_seed11_target4"] = measure_drop(sc, 4, 0.1, 1e-6, pert).drop;

    ref["fused_summary_orth7"] =
        fuse_states(sc.bundle, ProjectionSet::seeded_orthogonal(32, 7)).summary;

    const AssessmentConfig cfg;
    const AssessmentOutcome out = assess(sc.bundle, ProjectionSet::identity_like(32), cfg);
    const CompletionParams params = CompletionParams::untrained(32, 7);
    ref["refined_support"] =
        aggregate_support(out.states.states[out.report.routing.selected - 1], sc.bundle, params)
            .refined_support;

    const TrajectoryRecord rec =
        record_trajectory(Condition::Clean, {7}, 6, 32, 4, ScenarioParams{}, cfg,
                          ProjectionInit::IdentityLike, CompletionInit::Untrained);
    const std::string svg = render_heatmap(rec);
    atomic_write_file(dir / "heatmap_seed7.svg", svg);
    ref["heatmap_seed7_sha1"] = sha1_hex(svg);

    atomic_write_file(dir / "reference_values.json", ref.dump(2) + "\n");
    std::printf("golden files written to %s\n", dir.string().c_str());
    return 0;
}
