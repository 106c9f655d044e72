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

// cvqkd: analyze states, compute acceptance intervals and efficiencies, run
// parameter sweeps and protocol simulations.
//
// Exit codes: 0 success, 2 invalid input or domain error, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <system_error>

#include "CLI11.hpp"
#include "cvqkd/cvqkd.hpp"

namespace {

using namespace cvqkd;
using OrderedJson = nlohmann::ordered_json;

constexpr int kExitDomain = 2;
constexpr int kExitIo = 3;

struct StateArgs {
    double lambda = 0.0, cx = 0.0, cp = 0.0;
};

void add_state_options(CLI::App* cmd, StateArgs& s) {
    cmd->add_option("--lambda", s.lambda, "Local variance (vacuum = 1)")->required();
    cmd->add_option("--cx", s.cx, "x-x correlation")->required();
    cmd->add_option("--cp", s.cp, "Magnitude of the p-p anticorrelation")->required();
}

void add_attack_option(CLI::App* cmd, std::string& attack) {
    cmd->add_option("--attack", attack, "individual or coherent")
        ->check(CLI::IsMember({"individual", "coherent"}))
        ->capture_default_str();
}

void add_quadrature_options(CLI::App* cmd, QuadratureSpec& q) {
    cmd->add_option("--rel-tol", q.rel_tol, "Quadrature relative tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--radius-sigmas", q.radius_sigmas, "Truncation radius in marginal std devs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-depth", q.max_depth, "Maximum adaptive bisection depth")
        ->check(CLI::Range(1u, 60u))
        ->capture_default_str();
}

// Human output prints the same values as the JSON, with `null_text` for nulls.
void print_report(const OrderedJson& j, bool as_json, const char* null_text) {
    if (as_json) {
        std::cout << j.dump() << '\n';
        return;
    }
    for (const auto& [key, value] : j.items()) {
        std::cout << key << ": ";
        if (value.is_null())
            std::cout << null_text;
        else if (value.is_string())
            std::cout << value.get<std::string>();
        else
            std::cout << value.dump();
        std::cout << '\n';
    }
}

OrderedJson real_or_null(double v) {
    return std::isfinite(v) ? OrderedJson(v) : OrderedJson(nullptr);
}

OrderedJson real_or_null(const std::optional<double>& v) {
    return v ? real_or_null(*v) : OrderedJson(nullptr);
}

int run_analyze(const StateArgs& a, bool as_json) {
    const StateSummary s = summarize(StdSymmetricState(a.lambda, a.cx, a.cp));
    OrderedJson j;
    j["lambda"] = s.lambda;
    j["cx"] = s.cx;
    j["cp"] = s.cp;
    j["physical"] = s.physical;
    j["nppt"] = s.nppt;
    j["coherent_ok"] = s.coherent_ok;
    j["purity"] = s.purity;
    j["log_negativity"] = s.log_negativity;
    j["alpha"] = real_or_null(s.alpha);
    j["beta"] = real_or_null(s.beta);
    print_report(j, as_json, "undefined");
    return 0;
}

int run_interval(const StateArgs& a, double x0a, Attack attack, bool as_json) {
    const SecurityReport r = accept_interval(StdSymmetricState(a.lambda, a.cx, a.cp), x0a, attack);
    OrderedJson j;
    j["attack"] = std::string(to_string(attack));
    j["x0a"] = r.x0a;
    j["window_parameter"] =
        attack == Attack::individual ? real_or_null(r.alpha) : real_or_null(r.beta);
    j["lo"] = real_or_null(r.lo);
    j["hi"] = real_or_null(r.hi);
    j["d_length"] = real_or_null(r.d_length);
    j["x0b_min"] = x0a + r.lo;
    j["x0b_max"] = real_or_null(x0a + r.hi);
    print_report(j, as_json, "inf");
    return 0;
}

int run_efficiency(const StateArgs& a, Attack attack, EfficiencyMethod method,
                   const QuadratureSpec& q, const MonteCarloSpec& mc, bool as_json) {
    const StdSymmetricState s(a.lambda, a.cx, a.cp);
    const EfficiencyEstimate e = method == EfficiencyMethod::quadrature
                                     ? efficiency(s, attack, q)
                                     : efficiency_monte_carlo(s, attack, mc);
    OrderedJson j;
    j["attack"] = std::string(to_string(attack));
    j["method"] = std::string(to_string(method));
    j["efficiency"] = e.value;
    j[method == EfficiencyMethod::quadrature ? "error_estimate" : "standard_error"] = e.error_bound;
    if (method == EfficiencyMethod::quadrature) {
        j["tail_bound"] = e.tail_bound;
    } else {
        j["samples"] = e.samples;
        j["seed"] = mc.seed;
    }
    print_report(j, as_json, "null");
    return 0;
}

int run_sweep(const GridSpec& grid, const std::string& output, bool include_skipped, bool quiet) {
    if (grid.lambda.steps < 1 || grid.cx.steps < 1 || grid.cp.steps < 1)
        throw DomainError("sweep: step counts must be >= 1");
    SweepProgress progress;
    int last_pct = -1;
    if (!quiet) {
        progress = [&](std::size_t done, std::size_t total) {
            const int pct = static_cast<int>(100 * done / total);
            if (pct == last_pct) return;
            last_pct = pct;
            std::fprintf(stderr, "\rsweep: %zu/%zu points (%d%%)", done, total, pct);
            if (done == total) std::fputc('\n', stderr);
        };
    }
    const SweepResult result = sweep(grid, progress);
    std::ostringstream csv;
    write_sweep_csv(csv, result, include_skipped);
    write_file_atomic(output, csv.str());
    if (result.records.empty())
        std::fprintf(stderr, "warning: no admissible grid points; wrote header only to %s\n",
                     output.c_str());
    else if (!quiet)
        std::fprintf(stderr, "sweep: %zu admissible, %zu skipped -> %s\n", result.records.size(),
                     result.skipped.size(), output.c_str());
    return 0;
}

int run_simulate(SimulationConfig cfg, unsigned runs, const std::string& output) {
    if (runs == 0) throw DomainError("simulate: --runs must be >= 1");
    std::ostringstream lines;
    const std::uint64_t base_seed = cfg.seed;
    for (unsigned k = 0; k < runs; ++k) {
        cfg.seed = base_seed + k;
        const SimulationRecord rec = simulate(cfg);
        lines << to_json(rec).dump() << '\n';
        std::fprintf(
            stderr,
            "seed %llu: sifted %llu/%llu, error %.6g (analytic %.6g), post-AD %s (bound %s)\n",
            static_cast<unsigned long long>(cfg.seed),
            static_cast<unsigned long long>(rec.run.n_sifted),
            static_cast<unsigned long long>(rec.run.n_emitted), rec.run.empirical_error,
            rec.predicted.error, rec.ad ? format_real(rec.ad->post_error).c_str() : "n/a",
            rec.ad ? format_real(rec.ad->bound).c_str() : "n/a");
    }
    if (output.empty() || output == "-")
        std::cout << lines.str();
    else
        write_file_atomic(output, lines.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement-based continuous-variable QKD analysis and simulation"};
    app.require_subcommand(1);

    StateArgs state;
    bool as_json = false;
    std::string attack_name = "individual";
    QuadratureSpec quad;

    auto* analyze =
        app.add_subcommand("analyze", "Physicality, entanglement and window parameters");
    add_state_options(analyze, state);
    analyze->add_flag("--json", as_json, "Emit JSON");

    double x0a = 1.0;
    auto* interval =
        app.add_subcommand("interval", "Accepted |x_b| - |x_a| interval for a given |x_a|");
    add_state_options(interval, state);
    interval->add_option("--x0a", x0a, "Alice's outcome magnitude")->required();
    add_attack_option(interval, attack_name);
    interval->add_flag("--json", as_json, "Emit JSON");

    std::string method_name = "quadrature";
    MonteCarloSpec mc;
    auto* eff = app.add_subcommand("efficiency", "Efficiency figure of merit");
    add_state_options(eff, state);
    add_attack_option(eff, attack_name);
    eff->add_option("--method", method_name, "quadrature or monte-carlo")
        ->check(CLI::IsMember({"quadrature", "monte-carlo"}))
        ->capture_default_str();
    add_quadrature_options(eff, quad);
    eff->add_option("--samples", mc.samples, "Monte Carlo samples")->capture_default_str();
    eff->add_option("--strata", mc.strata, "Monte Carlo strata")->capture_default_str();
    eff->add_option("--seed", mc.seed, "Monte Carlo seed")->capture_default_str();
    eff->add_option("--workers", mc.workers, "Worker threads")->check(CLI::PositiveNumber);
    eff->add_flag("--json", as_json, "Emit JSON");

    GridSpec grid;
    std::string output;
    bool include_skipped = false, no_coherent = false, quiet = false;
    auto* sw = app.add_subcommand("sweep", "Grid sweep over (lambda, cx, cp) to CSV");
    sw->add_option("--lambda-min", grid.lambda.min)->capture_default_str();
    sw->add_option("--lambda-max", grid.lambda.max)->capture_default_str();
    sw->add_option("--lambda-steps", grid.lambda.steps)->capture_default_str();
    sw->add_option("--cx-min", grid.cx.min)->capture_default_str();
    sw->add_option("--cx-max", grid.cx.max)->capture_default_str();
    sw->add_option("--cx-steps", grid.cx.steps)->capture_default_str();
    sw->add_option("--cp-min", grid.cp.min)->capture_default_str();
    sw->add_option("--cp-max", grid.cp.max)->capture_default_str();
    sw->add_option("--cp-steps", grid.cp.steps)->capture_default_str();
    add_quadrature_options(sw, quad);
    sw->add_option("-o,--output", output, "CSV output path")->required();
    sw->add_flag("--include-skipped", include_skipped, "Also write rows for skipped grid points");
    sw->add_flag("--no-coherent", no_coherent, "Skip the coherent-attack columns");
    sw->add_flag("-q,--quiet", quiet, "No progress output");
    sw->add_option("--workers", grid.workers, "Worker threads")->check(CLI::PositiveNumber);

    SimulationConfig sim;
    unsigned runs = 1;
    std::string sim_output;
    auto* simc = app.add_subcommand("simulate", "Sample, sift and distill; JSON lines transcript");
    simc->add_option("--lambda", sim.lambda)->capture_default_str();
    simc->add_option("--cx", sim.cx)->capture_default_str();
    simc->add_option("--cp", sim.cp)->capture_default_str();
    add_attack_option(simc, attack_name);
    simc->add_option("--x0-target", sim.x0_target, "Alice's bin centre")->capture_default_str();
    simc->add_option("--half-width", sim.half_width, "Alice's bin half width")
        ->capture_default_str();
    simc->add_option("-n,--n-emitted", sim.n_emitted, "Emitted pairs per run")
        ->capture_default_str();
    simc->add_option("--block-size", sim.block_size, "Advantage distillation block size")
        ->capture_default_str();
    simc->add_option("--seed", sim.seed, "Seed of the first run")->capture_default_str();
    simc->add_option("--runs", runs, "Runs with consecutive seeds")->capture_default_str();
    simc->add_option("-o,--output", sim_output, "Transcript path (default stdout)");
    simc->add_option("--workers", sim.workers, "Worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitDomain;
    }

    const Attack attack = attack_name == "coherent" ? Attack::coherent : Attack::individual;
    const EfficiencyMethod method =
        method_name == "monte-carlo" ? EfficiencyMethod::monte_carlo : EfficiencyMethod::quadrature;
    sim.attack = attack;

    try {
        if (*analyze) return run_analyze(state, as_json);
        if (*interval) return run_interval(state, x0a, attack, as_json);
        if (*eff) return run_efficiency(state, attack, method, quad, mc, as_json);
        if (*sw) {
            grid.quadrature = quad;
            grid.coherent = !no_coherent;
            return run_sweep(grid, output, include_skipped, quiet);
        }
        if (*simc) return run_simulate(sim, runs, sim_output);
    } catch (const std::system_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return 0;
}
