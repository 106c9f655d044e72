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

// Walks one mixed entangled state through the library: entanglement,
// acceptance window, efficiency, and a short protocol run.

#include <cstdio>

#include "cvqkd/cvqkd.hpp"

int main() {
    using namespace cvqkd;

    const StdSymmetricState s(2.0, 1.5, 0.6);
    std::printf("purity %.6f  LN %.6f  nppt %d  coherent-securable %d\n", s.purity(),
                s.log_negativity(), s.nppt(), s.coherent_securable());

    const SecurityReport r = accept_interval(s, 1.0, Attack::individual);
    std::printf("alpha %.6f  accept |x_b| - |x_a| in [%.4f, %.4f] at |x_a| = 1\n", *r.alpha, r.lo,
                r.hi);

    const EfficiencyEstimate e = efficiency(s, Attack::individual);
    std::printf("efficiency %.6f (error estimate %.1e)\n", e.value, e.error_bound);

    SimulationConfig cfg;
    cfg.n_emitted = 200'000;
    const SimulationRecord rec = simulate(cfg);
    std::printf("sifted %llu of %llu, bit error %.4f (predicted %.4f)\n",
                static_cast<unsigned long long>(rec.run.n_sifted),
                static_cast<unsigned long long>(rec.run.n_emitted), rec.run.empirical_error,
                rec.predicted.error);
    if (rec.ad)
        std::printf("after distillation with N = %llu: error %.2e, bound %.2e\n",
                    static_cast<unsigned long long>(rec.ad->block_size), rec.ad->post_error,
                    rec.ad->bound);
    return 0;
}
