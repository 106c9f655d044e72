// Copyright 2026 The cvqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Protocol efficiency: the probability, per emitted pair, that Bob's outcome
// falls in the secure window around Alice's and the two sign bits agree,
//
//   E = Int_{all x_a, x_b : |x_b| - |x_a| in D(|x_a|)} (1 - eps(x_a, x_b)) m(x_a, x_b).
//
// m(x, y) != m(x, -y), so the four sign quadrants are folded onto x, y > 0 as
// 2 (1 - eps) (m(x, y) + m(x, -y)).

#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include "cvqkd/analysis.hpp"
#include "cvqkd/parallel.hpp"

namespace cvqkd {

struct QuadratureSpec {
    double rel_tol = 1e-6;
    /// Truncation radius in marginal standard deviations sqrt(lambda / 2).
    double radius_sigmas = 6.0;
    unsigned max_depth = 20;
};

struct MonteCarloSpec {
    std::uint64_t samples = 10'000'000;
    std::uint64_t seed = 1;
    /// Equal-probability strata over Alice's outcome; one RNG substream each.
    std::uint64_t strata = 1000;
    unsigned workers = default_workers();
};

enum class EfficiencyMethod { quadrature, monte_carlo };

inline std::string_view to_string(EfficiencyMethod m) {
    return m == EfficiencyMethod::quadrature ? "quadrature" : "monte-carlo";
}

struct EfficiencyEstimate {
    double value = 0.0;
    EfficiencyMethod method = EfficiencyMethod::quadrature;
    /// Quadrature: estimated absolute integration error. Monte Carlo: standard error.
    double error_bound = 0.0;
    /// Probability mass of the outcome distribution outside the integration box.
    double tail_bound = 0.0;
    Attack attack = Attack::individual;
    std::uint64_t samples = 0;
};

namespace detail {

struct StripIntegral {
    double value = 0.0;
    double error = 0.0;
};

/// Integrates f(x, y) over x in [x_min, x_max], y in [x (1 + lo_unit), min(x (1 + hi_unit),
/// y_cap)]. The outer range is split where either y bound meets y_cap.
template <class F>
StripIntegral integrate_strip(double lo_unit, double hi_unit, double x_min, double x_max,
                              double y_cap, F&& f, double rel_tol, unsigned max_depth) {
    using boost::math::quadrature::gauss_kronrod;
    const bool open_top = std::isinf(hi_unit);
    const double inner_tol = 0.01 * rel_tol;
    double max_inner_error = 0.0;

    auto inner = [&](double x) {
        const double lower = std::max(0.0, x * (1.0 + lo_unit));
        const double upper = open_top ? y_cap : std::min(x * (1.0 + hi_unit), y_cap);
        if (!(upper > lower)) return 0.0;
        double err = 0.0;
        const double v = gauss_kronrod<double, 15>::integrate(
            [&](double y) { return f(x, y); }, lower, upper, max_depth, inner_tol, &err);
        max_inner_error = std::max(max_inner_error, err);
        return v;
    };

    std::vector<double> cuts{x_min, x_max};
    if (!open_top) cuts.push_back(y_cap / (1.0 + hi_unit));
    if (1.0 + lo_unit > 0.0) cuts.push_back(y_cap / (1.0 + lo_unit));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(
        std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c < x_min || c > x_max; }),
        cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    StripIntegral out;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double err = 0.0;
        out.value += gauss_kronrod<double, 15>::integrate(inner, cuts[k], cuts[k + 1], max_depth,
                                                          rel_tol, &err);
        out.error += err;
    }
    out.error += (x_max - x_min) * max_inner_error;
    return out;
}

/// 2 (1 - eps) (m(x, y) + m(x, -y)) for x, y >= 0.
inline double folded_correlated_density(const StdSymmetricState& s, double x, double y) {
    return 2.0 * (1.0 - error_rate(s, x, y)) * (xx_marginal(s, x, y) + xx_marginal(s, x, -y));
}

}  // namespace detail

/// Deterministic nested adaptive Gauss-Kronrod evaluation of E.
/// Throws ConvergenceError when the error estimate exceeds rel_tol * E.
inline EfficiencyEstimate efficiency(const StdSymmetricState& s, Attack attack,
                                     const QuadratureSpec& spec = {}) {
    const double g = window_parameter(s, attack);
    const auto [lo_unit, hi_unit] = window_units(g);
    const double radius = spec.radius_sigmas * std::sqrt(0.5 * s.lambda());

    const auto strip = detail::integrate_strip(
        lo_unit, hi_unit, 0.0, radius, radius,
        [&](double x, double y) { return detail::folded_correlated_density(s, x, y); },
        spec.rel_tol, spec.max_depth);

    EfficiencyEstimate est;
    est.value = strip.value;
    est.error_bound = strip.error;
    // Each marginal is N(0, lambda/2): P(|X| > R) = erfc(R / sqrt(lambda)).
    est.tail_bound = 2.0 * std::erfc(radius / std::sqrt(s.lambda()));
    est.method = EfficiencyMethod::quadrature;
    est.attack = attack;
    if (!(est.error_bound <= std::max(spec.rel_tol * std::abs(est.value), 1e-14)))
        throw ConvergenceError("efficiency quadrature did not converge: error estimate " +
                               std::to_string(est.error_bound) + " for value " +
                               std::to_string(est.value));
    return est;
}

/// Stratified Monte Carlo estimate of E: Alice's outcome is drawn by inverse
/// CDF within equal-probability strata, Bob's from the conditional normal,
/// and the estimator is (1 - eps) on accepted pairs.
inline EfficiencyEstimate efficiency_monte_carlo(const StdSymmetricState& s, Attack attack,
                                                 const MonteCarloSpec& spec = {}) {
    if (spec.strata == 0 || spec.samples < 2 * spec.strata)
        throw DomainError("efficiency_monte_carlo: need at least two samples per stratum");
    const double g = window_parameter(s, attack);
    const auto [lo_unit, hi_unit] = window_units(g);
    const bool open_top = std::isinf(hi_unit);

    const double l = s.lambda(), cx = s.cx();
    const double sd_a = std::sqrt(0.5 * l);
    const double slope = cx / l;
    const double sd_b = std::sqrt((l * l - cx * cx) / (2.0 * l));

    const std::uint64_t strata = spec.strata;
    std::vector<double> means(strata), variances(strata);
    std::vector<std::uint64_t> counts(strata);

    parallel_for(
        strata,
        [&](std::size_t k) {
            Rng rng = substream(spec.seed, k);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            std::normal_distribution<double> normal(0.0, 1.0);
            const std::uint64_t n = spec.samples / strata + (k < spec.samples % strata ? 1 : 0);
            double mean = 0.0, m2 = 0.0;
            for (std::uint64_t i = 0; i < n; ++i) {
                double u = (static_cast<double>(k) + unif(rng)) / static_cast<double>(strata);
                u = std::clamp(u, std::numeric_limits<double>::min(), 1.0 - 1e-16);
                const double xa = sd_a * std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
                const double xb = slope * xa + sd_b * normal(rng);
                const double ax = std::abs(xa), ay = std::abs(xb);
                const double delta = ay - ax;
                const bool accepted = delta >= lo_unit * ax && (open_top || delta <= hi_unit * ax);
                const double f = accepted ? 1.0 - error_rate(s, ax, ay) : 0.0;
                const double d = f - mean;
                mean += d / static_cast<double>(i + 1);
                m2 += d * (f - mean);
            }
            means[k] = mean;
            variances[k] = m2 / static_cast<double>(n - 1);
            counts[k] = n;
        },
        spec.workers);

    EfficiencyEstimate est;
    est.method = EfficiencyMethod::monte_carlo;
    est.attack = attack;
    est.samples = spec.samples;
    double var = 0.0;
    const double w = 1.0 / static_cast<double>(strata);
    for (std::uint64_t k = 0; k < strata; ++k) {
        est.value += w * means[k];
        var += w * w * variances[k] / static_cast<double>(counts[k]);
    }
    est.error_bound = std::sqrt(var);
    return est;
}

}  // namespace cvqkd
