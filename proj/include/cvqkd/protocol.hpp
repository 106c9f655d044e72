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

// Monte Carlo run of the measure / sift / advantage-distillation protocol.
//
// Operational sifting: Alice keeps outcomes with | |x_a| - x0 | <= w and
// announces |x_a|; Bob keeps his outcome if |x_b| - |x_a| lies in the secure
// window scaled by Alice's actual |x_a|. Bits are the outcome signs
// (0 for x >= 0, 1 for x < 0).

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "cvqkd/analysis.hpp"
#include "cvqkd/efficiency.hpp"
#include "cvqkd/parallel.hpp"

namespace cvqkd {

struct QuadraturePair {
    double xa;
    double xb;
};

inline constexpr std::size_t kSampleBlock = 1 << 16;

/// n iid draws of (x_a, x_b) ~ N(0, gamma_x / 2). Block b of kSampleBlock
/// draws uses substream (seed, b), so output is independent of worker count.
inline std::vector<QuadraturePair> sample_quadratures(const StdSymmetricState& s, std::size_t n,
                                                      std::uint64_t seed,
                                                      unsigned workers = default_workers()) {
    detail::require_finite_correlation(s, "sample_quadratures");
    const double l = s.lambda(), cx = s.cx();
    const double sd_a = std::sqrt(0.5 * l);
    const double slope = cx / l;
    const double sd_b = std::sqrt((l * l - cx * cx) / (2.0 * l));

    std::vector<QuadraturePair> out(n);
    const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
    parallel_for(
        blocks,
        [&](std::size_t b) {
            Rng rng = substream(seed, b);
            std::normal_distribution<double> normal(0.0, 1.0);
            const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
            for (std::size_t i = b * kSampleBlock; i < end; ++i) {
                const double xa = sd_a * normal(rng);
                const double xb = slope * xa + sd_b * normal(rng);
                out[i] = {xa, xb};
            }
        },
        workers);
    return out;
}

class SiftingWindow {
   public:
    /// lo_unit / hi_unit bound |x_b| - |x_a| in units of |x_a|; hi_unit may be +inf.
    SiftingWindow(double x0_target, double half_width, double lo_unit, double hi_unit)
        : x0_target_(x0_target), half_width_(half_width), lo_unit_(lo_unit), hi_unit_(hi_unit) {
        if (!(half_width > 0.0)) throw DomainError("sifting window: half_width must be positive");
        if (!(x0_target - half_width > 0.0))
            throw DomainError("sifting window: x0_target - half_width must be positive");
        if (!(lo_unit < hi_unit)) throw DomainError("sifting window: empty delta interval");
    }

    static SiftingWindow for_state(const StdSymmetricState& s, Attack attack, double x0_target,
                                   double half_width) {
        const auto [lo, hi] = window_units(window_parameter(s, attack));
        return SiftingWindow(x0_target, half_width, lo, hi);
    }

    double x0_target() const { return x0_target_; }
    double half_width() const { return half_width_; }
    double lo_unit() const { return lo_unit_; }
    double hi_unit() const { return hi_unit_; }

    bool accepts(double xa, double xb) const {
        const double ax = std::abs(xa), ay = std::abs(xb);
        if (std::abs(ax - x0_target_) > half_width_) return false;
        const double delta = ay - ax;
        return delta >= lo_unit_ * ax && (std::isinf(hi_unit_) || delta <= hi_unit_ * ax);
    }

   private:
    double x0_target_;
    double half_width_;
    double lo_unit_;
    double hi_unit_;
};

struct ProtocolRun {
    std::uint64_t n_emitted = 0;
    std::uint64_t n_sifted = 0;
    std::vector<std::uint8_t> bits_a;
    std::vector<std::uint8_t> bits_b;
    /// Fraction of sifted positions where the bits differ; 0 when nothing was sifted.
    double empirical_error = 0.0;
    std::uint64_t seed = 0;
};

inline std::uint8_t sign_bit(double x) { return x < 0.0 ? 1 : 0; }

inline ProtocolRun sift(const std::vector<QuadraturePair>& pairs, const SiftingWindow& w,
                        std::uint64_t seed = 0) {
    ProtocolRun run;
    run.seed = seed;
    run.n_emitted = pairs.size();
    std::uint64_t mismatches = 0;
    for (const auto& p : pairs) {
        if (!w.accepts(p.xa, p.xb)) continue;
        const std::uint8_t a = sign_bit(p.xa), b = sign_bit(p.xb);
        run.bits_a.push_back(a);
        run.bits_b.push_back(b);
        mismatches += a != b;
    }
    run.n_sifted = run.bits_a.size();
    if (run.n_sifted > 0)
        run.empirical_error = static_cast<double>(mismatches) / static_cast<double>(run.n_sifted);
    return run;
}

/// n sifted bit pairs with iid flips at rate epsilon.
inline ProtocolRun synthetic_run(std::size_t n, double epsilon, std::uint64_t seed) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw DomainError("synthetic_run: epsilon outside [0,1]");
    ProtocolRun run;
    run.seed = seed;
    run.n_emitted = run.n_sifted = n;
    run.bits_a.resize(n);
    run.bits_b.resize(n);
    Rng rng = substream(seed, 0);
    std::bernoulli_distribution flip(epsilon), coin(0.5);
    std::uint64_t mismatches = 0;
    for (std::size_t i = 0; i < n; ++i) {
        run.bits_a[i] = coin(rng) ? 1 : 0;
        const bool f = flip(rng);
        run.bits_b[i] = run.bits_a[i] ^ (f ? 1 : 0);
        mismatches += f;
    }
    if (n > 0) run.empirical_error = static_cast<double>(mismatches) / static_cast<double>(n);
    return run;
}

struct AdFormula {
    double exact;  // eps^N / ((1-eps)^N + eps^N)
    double bound;  // (eps / (1-eps))^N
};

inline AdFormula ad_error_formula(double epsilon, std::uint64_t n) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw DomainError("ad_error_formula: epsilon outside (0,1)");
    if (n == 0) throw DomainError("ad_error_formula: block size must be positive");
    const double e = std::pow(epsilon, static_cast<double>(n));
    const double c = std::pow(1.0 - epsilon, static_cast<double>(n));
    return {e / (c + e), std::pow(epsilon / (1.0 - epsilon), static_cast<double>(n))};
}

struct AdResult {
    std::uint64_t block_size = 0;
    std::uint64_t n_blocks = 0;
    std::uint64_t n_blocks_accepted = 0;
    /// Fraction of accepted blocks where Bob decodes b' != b; 0 when none accepted.
    double post_error = 0.0;
    /// (eps / (1 - eps))^N with the run's empirical eps; +inf for eps >= 1.
    double bound = 0.0;
    std::uint64_t seed = 0;
};

/// Alice draws b per block and publishes b_i = a_i xor b. Bob accepts the
/// block iff every b_Bi xor b_i equals the same b', which he keeps.
inline AdResult advantage_distillation(const ProtocolRun& run, std::uint64_t block_size,
                                       std::uint64_t seed) {
    if (block_size == 0) throw DomainError("advantage_distillation: block size must be positive");
    if (run.n_sifted < block_size)
        throw DomainError("advantage_distillation: fewer sifted bits than one block");
    AdResult r;
    r.block_size = block_size;
    r.seed = seed;
    r.n_blocks = run.n_sifted / block_size;
    std::uint64_t wrong = 0;
    for (std::uint64_t blk = 0; blk < r.n_blocks; ++blk) {
        const std::uint8_t b = static_cast<std::uint8_t>(substream_seed(seed, blk) & 1u);
        const std::size_t base = blk * block_size;
        const std::uint8_t first = run.bits_b[base] ^ (run.bits_a[base] ^ b);
        bool consistent = true;
        for (std::size_t i = base + 1; i < base + block_size && consistent; ++i)
            consistent = (run.bits_b[i] ^ (run.bits_a[i] ^ b)) == first;
        if (!consistent) continue;
        ++r.n_blocks_accepted;
        wrong += first != b;
    }
    if (r.n_blocks_accepted > 0)
        r.post_error = static_cast<double>(wrong) / static_cast<double>(r.n_blocks_accepted);
    const double eps = run.empirical_error;
    r.bound = eps >= 1.0 ? std::numeric_limits<double>::infinity()
                         : std::pow(eps / (1.0 - eps), static_cast<double>(block_size));
    return r;
}

/// Analytic expectations for a sifting window, from the xx marginal and the
/// sharp-measurement error rate, integrated over the acceptance region.
struct WindowPrediction {
    double acceptance = 0.0;  // P(pair sifted) per emitted pair
    double error = 0.0;       // P(bits differ | sifted)
    double correlated = 0.0;  // P(sifted and bits agree) per emitted pair
};

inline WindowPrediction window_prediction(const StdSymmetricState& s, const SiftingWindow& w,
                                          double rel_tol = 1e-8) {
    const double x_min = w.x0_target() - w.half_width();
    const double x_max = w.x0_target() + w.half_width();
    const double y_cap = std::isinf(w.hi_unit()) ? x_max + 12.0 * std::sqrt(0.5 * s.lambda())
                                                 : x_max * (1.0 + w.hi_unit());
    auto both_signs = [&](double x, double y) {
        return 2.0 * (xx_marginal(s, x, y) + xx_marginal(s, x, -y));
    };
    const auto acc = detail::integrate_strip(w.lo_unit(), w.hi_unit(), x_min, x_max, y_cap,
                                             both_signs, rel_tol, 20);
    const auto err = detail::integrate_strip(
        w.lo_unit(), w.hi_unit(), x_min, x_max, y_cap,
        [&](double x, double y) { return error_rate(s, x, y) * both_signs(x, y); }, rel_tol, 20);
    WindowPrediction p;
    p.acceptance = acc.value;
    p.error = acc.value > 0.0 ? err.value / acc.value : 0.0;
    p.correlated = acc.value - err.value;
    return p;
}

struct SimulationConfig {
    double lambda = 2.0, cx = 1.5, cp = 0.6;
    Attack attack = Attack::individual;
    double x0_target = 1.0;
    double half_width = 0.05;
    std::uint64_t n_emitted = 1'000'000;
    std::uint64_t block_size = 5;
    std::uint64_t seed = 1;
    unsigned workers = default_workers();
};

struct SimulationRecord {
    SimulationConfig config;
    double lo_unit = 0.0, hi_unit = 0.0;
    ProtocolRun run;
    WindowPrediction predicted;
    std::optional<AdResult> ad;
    std::optional<AdFormula> ad_formula;
};

/// Sample, sift and distill once. AD is skipped when fewer than one block was sifted.
inline SimulationRecord simulate(const SimulationConfig& cfg) {
    const StdSymmetricState s(cfg.lambda, cfg.cx, cfg.cp);
    const SiftingWindow w = SiftingWindow::for_state(s, cfg.attack, cfg.x0_target, cfg.half_width);
    if (cfg.block_size == 0) throw DomainError("simulate: block size must be positive");

    SimulationRecord rec;
    rec.config = cfg;
    rec.lo_unit = w.lo_unit();
    rec.hi_unit = w.hi_unit();
    rec.run = sift(sample_quadratures(s, cfg.n_emitted, cfg.seed, cfg.workers), w, cfg.seed);
    rec.predicted = window_prediction(s, w);
    if (rec.run.n_sifted >= cfg.block_size)
        rec.ad = advantage_distillation(rec.run, cfg.block_size, splitmix64(cfg.seed));
    const double eps = rec.run.empirical_error;
    if (eps > 0.0 && eps < 1.0) rec.ad_formula = ad_error_formula(eps, cfg.block_size);
    return rec;
}

}  // namespace cvqkd
