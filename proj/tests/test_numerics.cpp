#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "dpc/numerics.hpp"

using namespace dpc;
using Catch::Approx;

TEST_CASE("cosine similarity basics") {
    Vec v = {1.0, 2.0, -3.0, 0.5};
    CHECK(cosine_similarity(v, v) == Approx(1.0).margin(1e-12));
    CHECK(cosine_similarity(v, scaled(v, -1.0)) == Approx(-1.0).margin(1e-12));
    CHECK(cosine_similarity({1.0, 0.0}, {0.0, 1.0}) == Approx(0.0).margin(1e-15));
}

TEST_CASE("cosine similarity degenerate input returns neutral cue") {
    Vec zero(4, 0.0);
    Vec v = {1.0, 2.0, 3.0, 4.0};
    CHECK(cosine_similarity(zero, v) == 0.0);
    CHECK(cosine_similarity(v, zero) == 0.0);
    Vec tiny(4, 1e-14);
    CHECK(cosine_similarity(tiny, v) == 0.0);
}

TEST_CASE("cosine similarity dimension mismatch") {
    CHECK_THROWS_AS(cosine_similarity({1.0, 2.0}, {1.0}), contract_error);
}

TEST_CASE("cosine similarity bounded and symmetric") {
    SeededRng rng(42);
    for (int i = 0; i < 200; ++i) {
        const Vec a = rng.gaussian_vector(8);
        const Vec b = rng.gaussian_vector(8);
        const double ab = cosine_similarity(a, b);
        CHECK(ab >= -1.0);
        CHECK(ab <= 1.0);
        CHECK(ab == cosine_similarity(b, a));
    }
}

TEST_CASE("psi at zero equals ln2 over beta") {
    CHECK(smooth_positive_part(0.0, 10.0) == Approx(std::log(2.0) / 10.0).epsilon(1e-12));
}

TEST_CASE("psi hard mode clamps negatives") {
    CHECK(smooth_positive_part(-0.5, 10.0, PsiMode::Hard) == 0.0);
    CHECK(smooth_positive_part(0.7, 10.0, PsiMode::Hard) == 0.7);
}

TEST_CASE("psi high-precision value") {
    // (1/beta) ln(1 + e^(beta x)) at x=1, beta=10, evaluated independently
    // via long-double softplus
    const long double beta = 10.0L, x = 1.0L;
    const long double oracle = std::log1p(std::exp(beta * x)) / beta;
    CHECK(smooth_positive_part(1.0, 10.0) ==
          Approx(static_cast<double>(oracle)).epsilon(1e-12));
    CHECK(smooth_positive_part(1.0, 10.0) == Approx(1.0000454).margin(1e-7));
}

TEST_CASE("psi survives large arguments without overflow") {
    CHECK(std::isfinite(smooth_positive_part(500.0, 100.0)));
    CHECK(smooth_positive_part(500.0, 100.0) == Approx(500.0));
    CHECK(smooth_positive_part(-500.0, 100.0) == 0.0);
    CHECK(std::isfinite(smooth_positive_part(50.0, 100.0)));
}

TEST_CASE("psi monotone, dominates positive part, gap peaks at ln2/beta") {
    for (double beta : {1.0, 10.0, 100.0}) {
        double prev = smooth_positive_part(-6.0, beta);
        double sup_gap = 0.0;
        for (int i = 0; i <= 12000; ++i) {
            const double x = (i - 6000) * 1e-3;
            const double y = smooth_positive_part(x, beta);
            CHECK(y >= prev);
            CHECK(y >= std::max(0.0, x));
            sup_gap = std::max(sup_gap, y - std::max(0.0, x));
            prev = y;
        }
        CHECK(sup_gap == Approx(std::log(2.0) / beta).margin(1e-9));
    }
}

TEST_CASE("psi non-finite input rejected") {
    CHECK_THROWS_AS(smooth_positive_part(std::nan(""), 10.0), contract_error);
    CHECK_THROWS_AS(smooth_positive_part(0.0, -1.0), contract_error);
}

TEST_CASE("softmax analytic values") {
    const Vec w = softmax_temperature({0.0, std::log(2.0)}, 1.0);
    CHECK(w[0] == Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(w[1] == Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("softmax uniform under equal scores") {
    const Vec w = softmax_temperature({0.7, 0.7, 0.7, 0.7}, 0.3);
    for (double x : w) CHECK(x == Approx(0.25).epsilon(1e-12));
}

TEST_CASE("softmax low temperature concentrates") {
    const Vec w = softmax_temperature({0.1, 0.5, 0.2}, 1e-4);
    CHECK(w[1] >= 1.0 - 1e-6);
}

TEST_CASE("softmax sums to one with positive entries across seeds") {
    // positivity is checked inside the non-underflow envelope: at extreme
    // score/temperature ratios (the tau=1e-4 argmax limit) the off-argmax
    // entries are denormal-zero by design
    SeededRng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(12);
        Vec scores(n);
        for (auto& s : scores) s = rng.uniform(-10.0, 10.0);
        const Vec w = softmax_temperature(scores, rng.uniform(0.05, 10.0));
        double sum = 0.0;
        for (double x : w) {
            CHECK(x > 0.0);
            sum += x;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("softmax contract violations") {
    CHECK_THROWS_AS(softmax_temperature({}, 1.0), contract_error);
    CHECK_THROWS_AS(softmax_temperature({1.0}, 0.0), contract_error);
}

TEST_CASE("matched-energy perturbation edge cases") {
    SeededRng rng(11);
    const Vec zero(16, 0.0);
    CHECK(matched_energy_perturb(zero, 0.1, 1e-6, rng) == zero);
    const Vec z = {1.0, -2.0, 0.5, 3.0};
    SeededRng rng2(11);
    CHECK(matched_energy_perturb(z, 0.0, 1e-6, rng2) == z);
    SeededRng rng3(11);
    CHECK_THROWS_AS(matched_energy_perturb(z, 0.1, 0.0, rng3), contract_error);
}

TEST_CASE("matched-energy perturbation norm matches the formula") {
    SeededRng rng(13);
    Vec z = rng.gaussian_vector(32);
    z = scaled(z, 2.0 / norm(z));
    SeededRng pert(17);
    const Vec out = matched_energy_perturb(z, 0.1, 1e-6, pert);
    const double delta = norm(subtracted(out, z));
    CHECK(delta >= 0.19);
    CHECK(delta <= 0.20001);
}

TEST_CASE("matched-energy relative perturbation stays in the eps band") {
    SeededRng rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        Vec z = rng.gaussian_vector(8 + rng.uniform_index(56));
        z = scaled(z, (1.0 + rng.uniform()) / norm(z));
        const double eps = 0.1;
        const Vec out = matched_energy_perturb(z, eps, 1e-6, rng);
        const double rel = norm(subtracted(out, z)) / norm(z);
        CHECK(rel >= eps * (1.0 - 1e-3));
        CHECK(rel <= eps);
    }
}

TEST_CASE("identical seed replays bitwise-identical perturbations") {
    const Vec z = {0.3, -1.2, 2.2, 0.0, 5.0, -0.7};
    SeededRng a(123456), b(123456);
    const Vec pa = matched_energy_perturb(z, 0.1, 1e-6, a);
    const Vec pb = matched_energy_perturb(z, 0.1, 1e-6, b);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
}

TEST_CASE("rng integer stream is deterministic") {
    SeededRng a(99), b(99);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
    SeededRng c(100);
    bool differs = false;
    SeededRng a2(99);
    for (int i = 0; i < 8; ++i) differs |= (a2.next_u64() != c.next_u64());
    CHECK(differs);
}

TEST_CASE("finite differences agree for a linear function") {
    const Vec slope = {2.0, -1.0, 0.5};
    auto f = [&](const Vec& x) { return dot(slope, x); };
    const double err = finite_difference_check(f, {0.2, 0.4, -0.1}, slope, 1e-6);
    CHECK(err <= 1e-9);
}

TEST_CASE("finite differences validate the psi derivative") {
    auto f = [](const Vec& x) { return smooth_positive_part(x[0], 10.0); };
    const Vec grad = {smooth_positive_part_derivative(0.3, 10.0)};
    CHECK(grad[0] == Approx(1.0 / (1.0 + std::exp(-3.0))).epsilon(1e-12));
    CHECK(finite_difference_check(f, {0.3}, grad, 1e-5) <= 1e-5);
}

TEST_CASE("finite differences validate the softmax jacobian") {
    const Vec scores = {0.4, -0.2, 0.9, 0.1};
    const double tau = 0.7;
    const Matrix jac = softmax_temperature_jacobian(scores, tau);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto f = [&](const Vec& s) { return softmax_temperature(s, tau)[i]; };
        Vec row(scores.size());
        for (std::size_t j = 0; j < scores.size(); ++j) row[j] = jac(i, j);
        CHECK(finite_difference_check(f, scores, row, 1e-5) <= 1e-4);
    }
}

TEST_CASE("spectral norm of a known matrix") {
    Matrix m(2, 2);
    m(0, 0) = 3.0;
    m(1, 1) = 4.0;
    CHECK(spectral_norm(m) == Approx(4.0).epsilon(1e-9));
}

TEST_CASE("orthonormal rows are orthonormal") {
    SeededRng rng(5);
    const Matrix q = orthonormal_rows(8, 16, rng);
    for (std::size_t i = 0; i < q.rows; ++i)
        for (std::size_t k = 0; k <= i; ++k) {
            double d = 0.0;
            for (std::size_t j = 0; j < q.cols; ++j) d += q(i, j) * q(k, j);
            CHECK(d == Approx(i == k ? 1.0 : 0.0).margin(1e-8));
        }
}
