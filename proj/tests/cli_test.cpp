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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "cvqkd_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Result run(const std::string& args) {
    const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    const std::string cmd =
        std::string(CVQKD_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string value_of(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
    return {};
}

}  // namespace

TEST(CliAnalyze, ReferenceState) {
    const auto r = run("analyze --lambda 2 --cx 1.5 --cp 0.6");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(value_of(r.out, "physical"), "true");
    EXPECT_EQ(value_of(r.out, "nppt"), "true");
    EXPECT_EQ(value_of(r.out, "coherent_ok"), "false");
    EXPECT_EQ(value_of(r.out, "beta"), "undefined");
    EXPECT_NEAR(std::stod(value_of(r.out, "alpha")), 27.0 / 7.0, 1e-12);
}

TEST(CliAnalyze, VacuumIsSeparable) {
    const auto r = run("analyze --lambda 1 --cx 0 --cp 0 --json");
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_FALSE(j.at("nppt").get<bool>());
    EXPECT_EQ(j.at("log_negativity").get<double>(), 0.0);
    EXPECT_TRUE(j.at("alpha").is_null());
}

TEST(CliAnalyze, NonPhysicalNamesInequality) {
    const auto r = run("analyze --lambda 1 --cx 0.9 --cp 0.9");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("(lambda - cx)(lambda + cp) >= 1"), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
}

TEST(CliAnalyze, JsonAndTextCarrySameValues) {
    const auto text = run("analyze --lambda 2.3 --cx 1.9 --cp 1.2");
    const auto js = run("analyze --lambda 2.3 --cx 1.9 --cp 1.2 --json");
    ASSERT_EQ(text.code, 0);
    ASSERT_EQ(js.code, 0);
    const Json j = Json::parse(js.out);
    for (const char* key : {"purity", "log_negativity", "alpha", "beta"})
        EXPECT_EQ(value_of(text.out, key), j.at(key).dump()) << key;
}

TEST(CliInterval, PureStateIsUnbounded) {
    const auto r = run("interval --lambda 1.25 --cx 0.75 --cp 0.75 --x0a 1");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(value_of(r.out, "d_length"), "inf");
    EXPECT_EQ(value_of(r.out, "hi"), "inf");
}

TEST(CliInterval, DoublingX0aDoublesInterval) {
    const Json a = Json::parse(run("interval --lambda 2 --cx 1.5 --cp 0.6 --x0a 1 --json").out);
    const Json b = Json::parse(run("interval --lambda 2 --cx 1.5 --cp 0.6 --x0a 2 --json").out);
    for (const char* key : {"lo", "hi", "d_length"})
        EXPECT_NEAR(b.at(key).get<double>(), 2.0 * a.at(key).get<double>(), 1e-12) << key;
    EXPECT_LT(-a.at("lo").get<double>(), a.at("hi").get<double>());
}

TEST(CliInterval, RejectsPptAndUnsecurableCoherent) {
    EXPECT_EQ(run("interval --lambda 2 --cx 0.5 --cp 0.2 --x0a 1").code, 2);
    EXPECT_EQ(run("interval --lambda 2 --cx 1.5 --cp 0.6 --x0a 1 --attack coherent").code, 2);
    EXPECT_EQ(run("interval --lambda 2 --cx 1.5 --cp 0.6 --x0a 0").code, 2);
}

TEST(CliEfficiency, QuadratureAndMonteCarlo) {
    const auto q = run("efficiency --lambda 2 --cx 1.5 --cp 0.6 --json");
    ASSERT_EQ(q.code, 0) << q.err;
    const auto m =
        run("efficiency --lambda 2 --cx 1.5 --cp 0.6 --method monte-carlo --samples 200000 --json");
    ASSERT_EQ(m.code, 0) << m.err;
    const Json jq = Json::parse(q.out), jm = Json::parse(m.out);
    EXPECT_EQ(jq.at("method"), "quadrature");
    EXPECT_EQ(jm.at("method"), "monte-carlo");
    EXPECT_NEAR(jq.at("efficiency").get<double>(), jm.at("efficiency").get<double>(),
                4.0 * jm.at("standard_error").get<double>());
}

TEST(CliEfficiency, ToleranceFailureExitsWithDomainCode) {
    const auto r = run("efficiency --lambda 2 --cx 1.5 --cp 0.6 --rel-tol 1e-15 --max-depth 1");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("did not converge"), std::string::npos);
}

TEST(CliSweep, UnwritablePathExitsThree) {
    EXPECT_EQ(
        run("sweep -q --lambda-steps 2 --cx-steps 2 --cp-steps 2 -o /nonexistent-dir/x.csv").code,
        3);
}

TEST(CliSweep, EmptyGridWritesHeaderAndWarns) {
    const fs::path p = scratch() / "empty.csv";
    const auto r =
        run("sweep --lambda-min 1 --lambda-steps 1 --cx-max 0 --cx-steps 1 --cp-max 0 "
            "--cp-steps 1 -o " +
            p.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_EQ(slurp(p),
              "lambda,cx,cp,ln,purity,alpha,beta,eff_individual,eff_coherent,skip_reason\n");
}

TEST(CliSweep, DeterministicBytes) {
    const fs::path a = scratch() / "a.csv", b = scratch() / "b.csv";
    const std::string grid = "sweep -q --lambda-steps 8 --cx-steps 8 --cp-steps 8 ";
    ASSERT_EQ(run(grid + "--workers 1 -o " + a.string()).code, 0);
    ASSERT_EQ(run(grid + "--workers 2 -o " + b.string()).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_GT(slurp(a).size(), 200u);
}

TEST(CliSweep, PureStatesGiveUnitAlpha) {
    const fs::path p = scratch() / "pure.csv";
    // lambda = 1.25, cx = cp = 0.75 is a two-mode squeezed vacuum.
    ASSERT_EQ(run("sweep -q --lambda-min 1.25 --lambda-steps 1 --cx-min 0.75 --cx-steps 1 "
                  "--cp-min 0.75 --cp-steps 1 -o " +
                  p.string())
                  .code,
              0);
    const std::string csv = slurp(p);
    EXPECT_NE(csv.find("\n1.25,0.75,0.75,"), std::string::npos) << csv;
    EXPECT_NE(csv.find(",1,1,"), std::string::npos) << csv;
}

TEST(CliSimulate, DeterministicTranscript) {
    const fs::path a = scratch() / "a.jsonl", b = scratch() / "b.jsonl";
    ASSERT_EQ(run("simulate -n 200000 --seed 3 --runs 2 -o " + a.string()).code, 0);
    ASSERT_EQ(run("simulate -n 200000 --seed 3 --runs 2 --workers 2 -o " + b.string()).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    std::istringstream in(slurp(a));
    int n = 0;
    for (std::string line; std::getline(in, line); ++n) {
        const Json j = Json::parse(line);
        EXPECT_EQ(j.at("seed").get<int>(), 3 + n);
        EXPECT_TRUE(j.at("empirical_error").is_number());
        EXPECT_TRUE(j.at("analytic_error").is_number());
        EXPECT_TRUE(j.at("bound").is_number());
    }
    EXPECT_EQ(n, 2);
}

TEST(CliSimulate, BadWindowExitsTwo) {
    EXPECT_EQ(run("simulate -n 1000 --x0-target 0.1 --half-width 0.2").code, 2);
    EXPECT_EQ(run("simulate -n 1000 --block-size 0").code, 2);
}

TEST(Cli, ParseErrorsExitTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("analyze --lambda two --cx 1 --cp 0").code, 2);
    EXPECT_EQ(run("interval --lambda 2 --cx 1.5 --cp 0.6 --x0a 1 --attack bogus").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}
