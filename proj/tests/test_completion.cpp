#include <catch_amalgamated.hpp>

#include <cmath>

#include "dpc/assessment.hpp"
#include "dpc/completion.hpp"
#include "dpc/scenario.hpp"

using namespace dpc;
using Catch::Approx;

TEST_CASE("one-hot weights select the state verbatim") {
    std::vector<Vec> states = {{1.0, 2.0}, {3.0, -4.0}, {0.5, 0.25}};
    const Vec z = bottleneck_state({0.0, 0.0, 1.0}, states);
    CHECK(z == states[2]);
}

TEST_CASE("uniform weights average the states") {
    std::vector<Vec> states = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {2.0, 2.0}};
    const Vec z = bottleneck_state(Vec(4, 0.25), states);
    CHECK(z[0] == Approx(1.0).epsilon(1e-12));
    CHECK(z[1] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weighted blend matches the analytic example") {
    std::vector<Vec> states = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    const Vec z = bottleneck_state({0.25, 0.75}, states);
    CHECK(z == Vec{0.25, 0.75, 0.0});
}

TEST_CASE("bottleneck_state contracts") {
    std::vector<Vec> states = {{1.0}, {2.0}};
    CHECK_THROWS_AS(bottleneck_state({0.5, 0.2}, states), contract_error);
    CHECK_THROWS_AS(bottleneck_state({0.5, 0.5, 0.0}, states), contract_error);
}

TEST_CASE("identical visual features pool to the projected feature") {
    StageBundle b;
    b.dim = 4;
    const Vec w = {0.5, -0.25, 1.0, 0.0};
    SeededRng rng(4);
    for (int l = 0; l < 3; ++l) {
        b.visual.push_back(w);
        b.audio.push_back(normalized(rng.gaussian_vector(4)));
    }
    CompletionParams params = CompletionParams::untrained(4, 7);
    const Vec query = {1.0, 0.0, 0.0, 0.0};
    const SupportEvidence s = aggregate_support(query, b, params);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(s.visual_support[i] == Approx(w[i]).margin(1e-12));  // la_proj is identity
}

TEST_CASE("zero audio with zero interaction projections follows the sigmoid-at-zero formula") {
    StageBundle b;
    b.dim = 4;
    SeededRng rng(5);
    for (int l = 0; l < 3; ++l) {
        b.audio.push_back(Vec(4, 0.0));
        b.visual.push_back(normalized(rng.gaussian_vector(4)));
    }
    CompletionParams params = CompletionParams::untrained(4, 7);
    params.audio_from_visual = Matrix(4, 4);
    params.visual_from_audio = Matrix(4, 4);
    const Vec query = normalized(rng.gaussian_vector(4));
    const SupportEvidence s = aggregate_support(query, b, params);
    CHECK(s.audio_support == Vec(4, 0.0));
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(s.mixed_audio[i] == Approx(s.visual_support[i]).margin(1e-12));
        CHECK(s.mixed_visual[i] == Approx(0.5 * s.visual_support[i]).margin(1e-12));
    }
}

TEST_CASE("scalar mode at lambda zero returns the bottleneck state") {
    const PlantedScenario sc = generate_scenario(6, 32, Condition::Clean, 4, 7);
    const CompletionParams params = CompletionParams::untrained(32, 7);
    const Vec z = normalized(SeededRng(1).gaussian_vector(32));
    const SupportEvidence s = aggregate_support(z, sc.bundle, params);
    const CorrectionResult r = gated_correction(z, s, params, CorrectionMode::Scalar, 0.0);
    CHECK(r.corrected == z);
    CHECK(r.lambda_used.value() == 0.0);
}

TEST_CASE("scalar mode cancels an opposite support exactly") {
    const Vec z = {0.5, -1.0, 2.0};
    SupportEvidence s;
    s.refined_support = scaled(z, -1.0);
    CompletionParams params = CompletionParams::zeroed(3);
    const CorrectionResult r = gated_correction(z, s, params, CorrectionMode::Scalar, 1.0);
    for (double x : r.corrected) CHECK(x == Approx(0.0).margin(1e-15));
}

TEST_CASE("gated mode with zero support returns the bottleneck state") {
    const Vec z = {0.5, -1.0, 2.0};
    SupportEvidence s;
    s.refined_support = Vec(3, 0.0);
    CompletionParams params = CompletionParams::untrained(3, 7);
    const CorrectionResult r = gated_correction(z, s, params, CorrectionMode::Gated);
    CHECK(r.corrected == z);
}

TEST_CASE("scalar lambda outside the unit interval is rejected") {
    const Vec z = {1.0};
    SupportEvidence s;
    s.refined_support = {1.0};
    CompletionParams params = CompletionParams::zeroed(1);
    CHECK_THROWS_AS(gated_correction(z, s, params, CorrectionMode::Scalar, 1.5), contract_error);
    CHECK_THROWS_AS(gated_correction(z, s, params, CorrectionMode::Scalar, -0.1), contract_error);
}

TEST_CASE("gate entries are strictly inside the unit interval") {
    const PlantedScenario sc = generate_scenario(6, 32, Condition::Clean, 4, 7);
    const CompletionParams params = CompletionParams::untrained(32, 7);
    const Vec z = normalized(SeededRng(2).gaussian_vector(32));
    const SupportEvidence s = aggregate_support(z, sc.bundle, params);
    const CorrectionResult r = gated_correction(z, s, params, CorrectionMode::Gated);
    for (double g : r.gate) {
        CHECK(g > 0.0);
        CHECK(g < 1.0);
    }
}

TEST_CASE("correction is bounded by the support in both modes") {
    SeededRng rng(6);
    const PlantedScenario sc = generate_scenario(6, 32, Condition::Clean, 4, 7);
    const CompletionParams params = CompletionParams::untrained(32, 7);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec z = normalized(rng.gaussian_vector(32));
        const SupportEvidence s = aggregate_support(z, sc.bundle, params);
        const CorrectionResult gated = gated_correction(z, s, params, CorrectionMode::Gated);
        const double lambda = rng.uniform();
        const CorrectionResult scalar =
            gated_correction(z, s, params, CorrectionMode::Scalar, lambda);
        for (std::size_t i = 0; i < 32; ++i)
            CHECK(std::abs(gated.corrected[i] - z[i]) <= std::abs(s.refined_support[i]));
        CHECK(norm(subtracted(gated.corrected, z)) <= norm(s.refined_support) + 1e-12);
        CHECK(norm(subtracted(scalar.corrected, z)) <= norm(s.refined_support) + 1e-12);
    }
}

TEST_CASE("scalar corrections are affine in lambda") {
    const PlantedScenario sc = generate_scenario(6, 32, Condition::Clean, 4, 7);
    const CompletionParams params = CompletionParams::untrained(32, 7);
    const Vec z = normalized(SeededRng(8).gaussian_vector(32));
    const SupportEvidence s = aggregate_support(z, sc.bundle, params);
    const Vec lo = gated_correction(z, s, params, CorrectionMode::Scalar, 0.0).corrected;
    const Vec hi = gated_correction(z, s, params, CorrectionMode::Scalar, 1.0).corrected;
    const Vec mid = gated_correction(z, s, params, CorrectionMode::Scalar, 0.5).corrected;
    for (std::size_t i = 0; i < 32; ++i)
        CHECK(mid[i] == Approx(0.5 * (lo[i] + hi[i])).margin(1e-12));
}

TEST_CASE("hard routing through the pipeline equals completing the selected state directly") {
    const AssessmentConfig cfg;
    const PlantedScenario sc = generate_scenario(6, 32, Condition::Clean, 4, 7);
    const ProjectionSet proj = ProjectionSet::identity_like(32);
    const AssessmentOutcome out = assess(sc.bundle, proj, cfg);
    const CompletionParams params = CompletionParams::untrained(32, 7);

    const CorrectionResult via_pipeline = complete_at(out.report.routing.one_hot,
                                                      out.states.states, sc.bundle, params);
    const Vec& direct_state = out.states.states[out.report.routing.selected - 1];
    const SupportEvidence s = aggregate_support(direct_state, sc.bundle, params);
    const CorrectionResult direct = gated_correction(direct_state, s, params,
                                                     CorrectionMode::Gated);
    CHECK(via_pipeline.corrected == direct.corrected);
    CHECK(via_pipeline.refined_support == direct.refined_support);
}

TEST_CASE("zeroed parameters give a null completion") {
    const PlantedScenario sc = generate_scenario(6, 32, Condition::Clean, 4, 7);
    const CompletionParams params = CompletionParams::zeroed(32);
    const Vec z = normalized(SeededRng(9).gaussian_vector(32));
    const SupportEvidence s = aggregate_support(z, sc.bundle, params);
    CHECK(s.refined_support == Vec(32, 0.0));
    const CorrectionResult r = gated_correction(z, s, params, CorrectionMode::Gated);
    CHECK(r.corrected == z);
}
