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

#include "cvqkd/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"

using namespace cvqkd;
namespace t = cvqkd::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "cvqkd_io_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(StateJson, RoundTripPreservesValues) {
    std::mt19937_64 rng(51);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int n = 1; n <= 3; ++n) {
        Vector d(2 * n);
        for (int i = 0; i < 2 * n; ++i) d(i) = normal(rng);
        const GaussianState s(CovarianceMatrix(t::random_physical_cm(n, rng)),
                              DisplacementVector(d));
        const GaussianState back = gaussian_state_from_json(Json::parse(to_json(s).dump()));
        ASSERT_EQ(back.modes(), n);
        for (int i = 0; i < 2 * n; ++i) {
            for (int j = 0; j < 2 * n; ++j)
                EXPECT_NEAR(back.cm(i, j), s.cm(i, j), 1e-15 * std::abs(s.cm(i, j)));
            EXPECT_NEAR(back.dv.vector()(i), d(i), 1e-15 * std::abs(d(i)));
        }
    }
}

TEST(StateJson, Layout) {
    const Json j =
        to_json(GaussianState(CovarianceMatrix::identity(1), DisplacementVector::zero(1)));
    EXPECT_EQ(j.at("n"), 1);
    EXPECT_EQ(j.at("cm"), Json::parse("[1.0, 0.0, 0.0, 1.0]"));
    EXPECT_EQ(j.at("dv"), Json::parse("[0.0, 0.0]"));
}

TEST(StateJson, MalformedInputRaisesDomainError) {
    const char* bad[] = {
        R"({"cm": [1,0,0,1], "dv": [0,0]})",
        R"({"n": 0, "cm": [], "dv": []})",
        R"({"n": 1, "cm": [1,0,0], "dv": [0,0]})",
        R"({"n": 1, "cm": [1,0,0,1], "dv": [0]})",
        R"({"n": 1, "cm": [1,0,0,"x"], "dv": [0,0]})",
        R"({"n": 1, "cm": [1,0.5,0,1], "dv": [0,0]})",
        R"({"n": 1, "cm": [0.5,0,0,0.5], "dv": [0,0]})",
    };
    for (const char* text : bad)
        EXPECT_THROW(gaussian_state_from_json(Json::parse(text)), DomainError) << text;
}

TEST(JsonReal, NonFiniteBecomesNull) {
    EXPECT_TRUE(json_real(std::numeric_limits<double>::infinity()).is_null());
    EXPECT_TRUE(json_real(std::optional<double>{}).is_null());
    EXPECT_EQ(json_real(1.5), Json(1.5));
}

TEST(SimulationJson, CarriesRunAndDistillationFields) {
    SimulationConfig cfg;
    cfg.n_emitted = 100'000;
    cfg.seed = 5;
    const auto rec = simulate(cfg);
    const Json j = to_json(rec);
    for (const char* key : {"lambda",
                            "cx",
                            "cp",
                            "attack",
                            "x0_target",
                            "half_width",
                            "delta_lo_unit",
                            "delta_hi_unit",
                            "seed",
                            "n_emitted",
                            "n_sifted",
                            "empirical_error",
                            "analytic_error",
                            "analytic_acceptance",
                            "ad_block_size",
                            "ad_seed",
                            "ad_blocks",
                            "ad_blocks_accepted",
                            "post_error",
                            "bound",
                            "ad_exact"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j.at("attack"), "individual");
    EXPECT_EQ(j.at("seed"), 5u);
    EXPECT_EQ(j.at("n_sifted"), rec.run.n_sifted);
    EXPECT_EQ(j.at("post_error").get<double>(), rec.ad->post_error);
}

TEST(WriteFileAtomic, ReplacesContentAndLeavesNoTemp) {
    const fs::path p = scratch_dir() / "out.txt";
    write_file_atomic(p, "first\n");
    write_file_atomic(p, "second\n");
    EXPECT_EQ(slurp(p), "second\n");
    EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
}

TEST(WriteFileAtomic, UnwritableDirectoryThrows) {
    EXPECT_THROW(write_file_atomic("/nonexistent-dir/cvqkd/out.csv", "x"), std::system_error);
}
