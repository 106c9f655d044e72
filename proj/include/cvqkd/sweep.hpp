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

#pragma once

#include <cstdio>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cvqkd/analysis.hpp"
#include "cvqkd/efficiency.hpp"
#include "cvqkd/parallel.hpp"

namespace cvqkd {

/// Inclusive linear grid; steps == 1 means just `min`.
struct Range {
    double min = 0.0;
    double max = 0.0;
    int steps = 1;

    double at(int i) const {
        return steps <= 1 ? min : min + (max - min) * static_cast<double>(i) / (steps - 1);
    }
};

struct GridSpec {
    Range lambda{1.05, 3.0, 20};
    Range cx{0.0, 3.0, 20};
    Range cp{0.0, 3.0, 20};
    QuadratureSpec quadrature{};
    bool coherent = true;
    unsigned workers = default_workers();
};

struct SweepRecord {
    double lambda = 0.0, cx = 0.0, cp = 0.0;
    std::optional<double> ln, purity, alpha, beta, eff_individual, eff_coherent;
    /// Empty for fully evaluated points; otherwise why the point (or its
    /// coherent columns) is missing.
    std::string skip_reason;
};

struct SweepResult {
    std::vector<SweepRecord> records;  // admissible points, grid order
    std::vector<SweepRecord> skipped;  // order / nonphysical / ppt, grid order
};

inline SweepRecord evaluate_point(double lambda, double cx, double cp, const GridSpec& grid,
                                  bool& admissible) {
    SweepRecord r;
    r.lambda = lambda;
    r.cx = cx;
    r.cp = cp;
    admissible = false;
    if (!(cx >= cp)) {
        r.skip_reason = "order";
        return r;
    }
    if (standard_form_violation(lambda, cx, cp)) {
        r.skip_reason = "nonphysical";
        return r;
    }
    const StdSymmetricState s(lambda, cx, cp);
    if (!s.nppt()) {
        r.skip_reason = "ppt";
        return r;
    }
    admissible = true;
    r.ln = s.log_negativity();
    r.purity = s.purity();
    r.alpha = alpha(s);
    try {
        r.eff_individual = efficiency(s, Attack::individual, grid.quadrature).value;
    } catch (const ConvergenceError&) {
        r.skip_reason = "no_convergence";
    }
    if (!grid.coherent) return r;
    if (!s.coherent_securable()) {
        if (r.skip_reason.empty()) r.skip_reason = "not_coherent_securable";
        return r;
    }
    r.beta = beta(s);
    try {
        r.eff_coherent = efficiency(s, Attack::coherent, grid.quadrature).value;
    } catch (const ConvergenceError&) {
        r.skip_reason = "no_convergence";
    }
    return r;
}

using SweepProgress = std::function<void(std::size_t done, std::size_t total)>;

/// Evaluates every (lambda, cx, cp) grid point, in parallel, keeping grid order.
/// `progress` is called serially after each point completes.
inline SweepResult sweep(const GridSpec& grid, const SweepProgress& progress = {}) {
    const int nl = std::max(grid.lambda.steps, 1), nx = std::max(grid.cx.steps, 1),
              np = std::max(grid.cp.steps, 1);
    const std::size_t total = static_cast<std::size_t>(nl) * nx * np;
    std::vector<SweepRecord> all(total);
    std::vector<char> ok(total, 0);
    std::size_t done = 0;
    std::mutex progress_mutex;
    parallel_for(
        total,
        [&](std::size_t idx) {
            const int i = static_cast<int>(idx / (static_cast<std::size_t>(nx) * np));
            const int j = static_cast<int>((idx / np) % nx);
            const int k = static_cast<int>(idx % np);
            bool admissible = false;
            all[idx] =
                evaluate_point(grid.lambda.at(i), grid.cx.at(j), grid.cp.at(k), grid, admissible);
            ok[idx] = admissible ? 1 : 0;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(++done, total);
            }
        },
        grid.workers);

    SweepResult out;
    for (std::size_t idx = 0; idx < total; ++idx)
        (ok[idx] ? out.records : out.skipped).push_back(std::move(all[idx]));
    return out;
}

inline constexpr const char* kSweepCsvHeader =
    "lambda,cx,cp,ln,purity,alpha,beta,eff_individual,eff_coherent,skip_reason";

/// 12 significant digits.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string format_real(const std::optional<double>& v) {
    return v ? format_real(*v) : std::string();
}

inline void write_sweep_row(std::ostream& os, const SweepRecord& r) {
    os << format_real(r.lambda) << ',' << format_real(r.cx) << ',' << format_real(r.cp) << ','
       << format_real(r.ln) << ',' << format_real(r.purity) << ',' << format_real(r.alpha) << ','
       << format_real(r.beta) << ',' << format_real(r.eff_individual) << ','
       << format_real(r.eff_coherent) << ',' << r.skip_reason << '\n';
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& result,
                            bool include_skipped = false) {
    os << kSweepCsvHeader << '\n';
    for (const auto& r : result.records) write_sweep_row(os, r);
    if (include_skipped)
        for (const auto& r : result.skipped) write_sweep_row(os, r);
}

}  // namespace cvqkd
