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

// JSON encodings and atomic file output.

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <system_error>

#include "cvqkd/gaussian.hpp"
#include "cvqkd/protocol.hpp"
#include "json.hpp"

namespace cvqkd {

using Json = nlohmann::json;

/// {"n": n, "cm": row-major 4n^2 reals, "dv": 2n reals}
inline Json to_json(const GaussianState& s) {
    const int n = s.modes();
    Json cm = Json::array(), dv = Json::array();
    for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j < 2 * n; ++j) cm.push_back(s.cm(i, j));
    for (int i = 0; i < 2 * n; ++i) dv.push_back(s.dv.vector()(i));
    return Json{{"n", n}, {"cm", std::move(cm)}, {"dv", std::move(dv)}};
}

inline GaussianState gaussian_state_from_json(const Json& j) {
    try {
        const int n = j.at("n").get<int>();
        if (n < 1) throw DomainError("state JSON: n must be >= 1");
        const auto& cm = j.at("cm");
        const auto& dv = j.at("dv");
        if (cm.size() != static_cast<std::size_t>(4 * n * n))
            throw DomainError("state JSON: cm must have 4n^2 entries");
        if (dv.size() != static_cast<std::size_t>(2 * n))
            throw DomainError("state JSON: dv must have 2n entries");
        Matrix g(2 * n, 2 * n);
        for (int i = 0; i < 2 * n; ++i)
            for (int k = 0; k < 2 * n; ++k) g(i, k) = cm.at(2 * n * i + k).get<double>();
        Vector d(2 * n);
        for (int i = 0; i < 2 * n; ++i) d(i) = dv.at(i).get<double>();
        return GaussianState(CovarianceMatrix(std::move(g)), DisplacementVector(std::move(d)));
    } catch (const Json::exception& e) {
        throw DomainError(std::string("state JSON: ") + e.what());
    }
}

/// Non-finite values become null.
inline Json json_real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json json_real(const std::optional<double>& v) { return v ? json_real(*v) : Json(nullptr); }

/// One transcript line for a simulation run.
inline Json to_json(const SimulationRecord& r) {
    const auto& c = r.config;
    Json j{
        {"lambda", c.lambda},
        {"cx", c.cx},
        {"cp", c.cp},
        {"attack", std::string(to_string(c.attack))},
        {"x0_target", c.x0_target},
        {"half_width", c.half_width},
        {"delta_lo_unit", json_real(r.lo_unit)},
        {"delta_hi_unit", json_real(r.hi_unit)},
        {"seed", c.seed},
        {"n_emitted", r.run.n_emitted},
        {"n_sifted", r.run.n_sifted},
        {"empirical_error", r.run.empirical_error},
        {"analytic_error", r.predicted.error},
        {"analytic_acceptance", r.predicted.acceptance},
        {"ad_block_size", c.block_size},
    };
    if (r.ad) {
        j["ad_seed"] = r.ad->seed;
        j["ad_blocks"] = r.ad->n_blocks;
        j["ad_blocks_accepted"] = r.ad->n_blocks_accepted;
        j["post_error"] = r.ad->post_error;
        j["bound"] = json_real(r.ad->bound);
    } else {
        j["ad_seed"] = nullptr;
        j["ad_blocks"] = 0;
        j["ad_blocks_accepted"] = 0;
        j["post_error"] = nullptr;
        j["bound"] = nullptr;
    }
    j["ad_exact"] = r.ad_formula ? json_real(r.ad_formula->exact) : Json(nullptr);
    return j;
}

/// Writes `content` to a sibling temp file, then renames it over `path`.
/// Throws std::system_error on failure.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::system_error(std::make_error_code(std::errc::io_error),
                                    "cannot open " + tmp.string());
        out << content;
        out.flush();
        if (!out)
            throw std::system_error(std::make_error_code(std::errc::io_error),
                                    "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::system_error(std::make_error_code(std::errc::io_error),
                                "cannot rename onto " + path.string());
    }
}

}  // namespace cvqkd
