#ifndef DPC_NUMERICS_HPP
#define DPC_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "dpc/contract.hpp"
#include "dpc/linalg.hpp"
#include "dpc/rng.hpp"

namespace dpc {

/// Cosine similarity in [-1, 1]. Near-zero-norm inputs give a neutral 0
/// cue instead of an error: degraded scenarios may zero a modality out.
inline double cosine_similarity(const Vec& x, const Vec& y) {
    DPC_REQUIRE(x.size() == y.size(), "cosine_similarity: dimension mismatch");
    double xx = 0.0, yy = 0.0, xy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx += x[i] * x[i];
        yy += y[i] * y[i];
        xy += x[i] * y[i];
    }
    const double nx = std::sqrt(xx);
    const double ny = std::sqrt(yy);
    if (nx < 1e-12 || ny < 1e-12) return 0.0;
    return std::clamp(xy / (nx * ny), -1.0, 1.0);
}

enum class PsiMode { Smooth, Hard };

/// Non-negative activation psi. Smooth mode is softplus sharpened by beta,
/// (1/beta) * ln(1 + exp(beta*x)), evaluated in the overflow-safe form
/// max(t,0) + log1p(exp(-|t|)) so beta*x up to 1e2-scale stays exact.
/// Hard mode is the positive part max(0, x).
inline double smooth_positive_part(double x, double beta, PsiMode mode = PsiMode::Smooth) {
    DPC_REQUIRE(std::isfinite(x), "psi: non-finite input");
    if (mode == PsiMode::Hard) return std::max(0.0, x);
    DPC_REQUIRE(beta > 0.0, "psi: beta must be positive in smooth mode");
    const double t = beta * x;
    const double stable = std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
    return stable / beta;
}

/// Companion derivative: logistic(beta*x) in smooth mode, unit step in hard
/// mode (0 at and below zero).
inline double smooth_positive_part_derivative(double x, double beta,
                                              PsiMode mode = PsiMode::Smooth) {
    DPC_REQUIRE(std::isfinite(x), "psi': non-finite input");
    if (mode == PsiMode::Hard) return x > 0.0 ? 1.0 : 0.0;
    DPC_REQUIRE(beta > 0.0, "psi': beta must be positive in smooth mode");
    const double t = beta * x;
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

/// Tempered softmax with max-subtraction. Output entries are positive and
/// sum to 1 within 1e-12.
inline Vec softmax_temperature(const Vec& scores, double tau) {
    DPC_REQUIRE(!scores.empty(), "softmax: empty input");
    DPC_REQUIRE(tau > 0.0, "softmax: tau must be positive");
    DPC_REQUIRE(all_finite(scores), "softmax: non-finite score");
    double hi = scores[0];
    for (double s : scores) hi = std::max(hi, s);
    Vec out(scores.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp((scores[i] - hi) / tau);
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

/// Jacobian of softmax_temperature: J(i,j) = (w_i * (delta_ij - w_j)) / tau.
inline Matrix softmax_temperature_jacobian(const Vec& scores, double tau) {
    const Vec w = softmax_temperature(scores, tau);
    Matrix j(w.size(), w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t k = 0; k < w.size(); ++k)
            j(i, k) = w[i] * ((i == k ? 1.0 : 0.0) - w[k]) / tau;
    return j;
}

/// Matched-energy perturbation: z + eps * (||z|| / (||xi|| + eps0)) * xi with
/// xi ~ N(0, I). Always consumes dim(z) gaussian draws, so the rng stream
/// position does not depend on eps.
inline Vec matched_energy_perturb(const Vec& z, double eps, double eps0, SeededRng& rng) {
    DPC_REQUIRE(eps >= 0.0, "matched_energy_perturb: eps must be nonnegative");
    DPC_REQUIRE(eps0 > 0.0, "matched_energy_perturb: eps0 must be positive");
    const Vec xi = rng.gaussian_vector(z.size());
    const double scale = eps * norm(z) / (norm(xi) + eps0);
    Vec out = z;
    add_scaled_in_place(out, xi, scale);
    return out;
}

/// Central-difference check of an analytic gradient. Returns the maximum
/// entrywise relative error, with denominator max(|analytic_i|, 1e-8).
inline double finite_difference_check(const std::function<double(const Vec&)>& f,
                                      const Vec& x, const Vec& analytic_grad, double h) {
    DPC_REQUIRE(h > 0.0, "finite_difference_check: h must be positive");
    DPC_REQUIRE(x.size() == analytic_grad.size(), "finite_difference_check: dim mismatch");
    double worst = 0.0;
    Vec probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double fp = f(probe);
        probe[i] = x[i] - h;
        const double fm = f(probe);
        probe[i] = x[i];
        DPC_REQUIRE(std::isfinite(fp) && std::isfinite(fm),
                    "finite_difference_check: non-finite function value");
        const double numeric = (fp - fm) / (2.0 * h);
        const double denom = std::max(std::abs(analytic_grad[i]), 1e-8);
        worst = std::max(worst, std::abs(numeric - analytic_grad[i]) / denom);
    }
    return worst;
}

}  // namespace dpc

#endif
