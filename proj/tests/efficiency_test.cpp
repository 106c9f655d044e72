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

#include "cvqkd/efficiency.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace cvqkd;
namespace t = cvqkd::testing;

namespace {

// Fixed-rule integral of (1 - eps) m over the accepted region, all four
// quadrants, using the test's own quadrature.
double efficiency_oracle(const StdSymmetricState& s, double g) {
    const auto [lo, hi] = window_units(g);
    const double r = 7.0 * std::sqrt(0.5 * s.lambda());
    const auto rx = t::composite_rule(0.0, r, 40, 10);
    const auto gl = t::gauss_legendre(24);
    double sum = 0.0;
    for (std::size_t i = 0; i < rx.nodes.size(); ++i) {
        const double x = rx.nodes[i];
        const double y0 = (1.0 + lo) * x;
        const double y1 = std::isinf(hi) ? r : std::min(r, (1.0 + hi) * x);
        if (y1 <= y0) continue;
        double inner = 0.0;
        for (int k = 0; k < 24; ++k) {
            const double y = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * gl.nodes[k];
            const double m = xx_marginal(s, x, y) + xx_marginal(s, x, -y);
            inner += 0.5 * (y1 - y0) * gl.weights[k] * 2.0 * (1.0 - error_rate(s, x, y)) * m;
        }
        sum += rx.weights[i] * inner;
    }
    return sum;
}

}  // namespace

TEST(Efficiency, RejectsPptState) {
    const StdSymmetricState ppt(2.0, 0.5, 0.2);
    EXPECT_THROW(efficiency(ppt, Attack::individual), DomainError);
    EXPECT_THROW(efficiency_monte_carlo(ppt, Attack::individual), DomainError);
}

TEST(Efficiency, RejectsCoherentWhenNotSecurable) {
    EXPECT_THROW(efficiency(StdSymmetricState(2.0, 1.5, 0.6), Attack::coherent),
                 NotCoherentSecurable);
}

// With the window unbounded and the floor at |x_b| >= 0, E is the
// probability that both signs agree.
TEST(Efficiency, PureStateEqualsSignAgreementProbability) {
    for (double r : {0.2, 0.6, 1.0}) {
        const auto s = StdSymmetricState::two_mode_squeezed(r);
        const double expected = 0.5 + std::asin(s.cx() / s.lambda()) / M_PI;
        const auto est = efficiency(s, Attack::individual);
        EXPECT_NEAR(est.value, expected, 1e-5) << "r=" << r;
        EXPECT_LT(est.tail_bound, 1e-6);
    }
}

TEST(Efficiency, MatchesFixedRuleOracle) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const auto tr = t::random_mixed_nppt(rng);
        const StdSymmetricState s(tr.lambda, tr.cx, tr.cp);
        const double e = efficiency(s, Attack::individual).value;
        EXPECT_NEAR(e, efficiency_oracle(s, alpha(s)), 2e-5 + 1e-5 * e)
            << tr.lambda << " " << tr.cx << " " << tr.cp;
    }
}

TEST(Efficiency, ReportsErrorBelowTolerance) {
    const auto est = efficiency(StdSymmetricState(2.0, 1.5, 0.6), Attack::individual);
    EXPECT_LE(est.error_bound, 1e-6 * est.value);
    EXPECT_EQ(est.method, EfficiencyMethod::quadrature);
    EXPECT_GT(est.value, 0.0);
    EXPECT_LT(est.value, 1.0);
}

TEST(Efficiency, ConvergenceFailureIsReported) {
    QuadratureSpec spec;
    spec.rel_tol = 1e-15;
    spec.max_depth = 1;
    EXPECT_THROW(efficiency(StdSymmetricState(2.0, 1.5, 0.6), Attack::individual, spec),
                 ConvergenceError);
}

TEST(Efficiency, CoherentNeverExceedsIndividual) {
    std::mt19937_64 rng(42);
    int checked = 0;
    while (checked < 50) {
        const auto tr = t::random_mixed_nppt(rng);
        const StdSymmetricState s(tr.lambda, tr.cx, tr.cp);
        if (!s.coherent_securable()) continue;
        ++checked;
        EXPECT_LE(efficiency(s, Attack::coherent).value,
                  efficiency(s, Attack::individual).value + 1e-8);
    }
}

TEST(Efficiency, BoundedByUnity) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const auto tr = t::random_mixed_nppt(rng);
        const double e =
            efficiency(StdSymmetricState(tr.lambda, tr.cx, tr.cp), Attack::individual).value;
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 1.0);
    }
}

TEST(EfficiencyMonteCarlo, AgreesWithQuadrature) {
    MonteCarloSpec mc;
    mc.samples = 1'000'000;
    mc.seed = 7;
    for (const auto& s : {StdSymmetricState(2.0, 1.5, 0.6), StdSymmetricState(1.5, 1.0, 0.5)}) {
        const auto q = efficiency(s, Attack::individual);
        const auto m = efficiency_monte_carlo(s, Attack::individual, mc);
        EXPECT_LT(std::abs(q.value - m.value), std::max(0.01 * q.value, 3.0 * m.error_bound));
        EXPECT_GT(m.error_bound, 0.0);
        EXPECT_EQ(m.samples, mc.samples);
    }
}

TEST(EfficiencyMonteCarlo, DeterministicAndWorkerIndependent) {
    const StdSymmetricState s(2.0, 1.5, 0.6);
    MonteCarloSpec mc;
    mc.samples = 200'000;
    mc.seed = 11;
    mc.workers = 1;
    const auto a = efficiency_monte_carlo(s, Attack::individual, mc);
    mc.workers = 4;
    const auto b = efficiency_monte_carlo(s, Attack::individual, mc);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.error_bound, b.error_bound);
    mc.seed = 12;
    EXPECT_NE(efficiency_monte_carlo(s, Attack::individual, mc).value, a.value);
}

TEST(EfficiencyMonteCarlo, RejectsTooFewSamples) {
    MonteCarloSpec mc;
    mc.samples = 100;
    mc.strata = 1000;
    EXPECT_THROW(efficiency_monte_carlo(StdSymmetricState(2.0, 1.5, 0.6), Attack::individual, mc),
                 DomainError);
}
