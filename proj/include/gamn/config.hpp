// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

// Experiment configuration: a flat "key = value" text format with dotted
// keys. "[section]" headers prefix the keys that follow them, '#' and ';'
// start comments.
//
//     [system]
//     N = 16          # same as system.N = 16
//     power_dbm = 10
//
// Powers are given in dBm and converted to watts here, once.

#pragma once

#include "gamn/channel.hpp"
#include "gamn/meta_learner.hpp"
#include "gamn/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gamn::config {

inline constexpr const char* kArtifactVersion = "1.0.0";

using KeyValues = std::map<std::string, std::string>;

// Raw parse; rejects malformed lines and duplicate keys but knows nothing
// about which keys exist.
KeyValues parse_text(const std::string& text);
KeyValues read_file(const std::filesystem::path& path);

double dbm_to_watts(double dbm) noexcept;

struct ExperimentConfig {
    // system
    std::size_t n = 0, m = 0, k = 0;
    double power_dbm = 0.0;
    double noise_dbm = -100.0;
    std::vector<double> weights; // empty: uniform

    channel::Geometry geometry;
    channel::RicianParams rician;
    meta::HyperParams hyper;

    // run
    std::vector<meta::Variant> variants{meta::Variant::Gamn};
    int n_realizations = 100;
    std::uint64_t master_seed = 1;

    // output
    std::string output_dir = ".";
    std::string output_prefix = "gamn";

    double power_watts() const noexcept { return dbm_to_watts(power_dbm); }
    double noise_watts() const noexcept { return dbm_to_watts(noise_dbm); }
    metrics::LinkParams link() const;

    // Module invariants for every block; throws ConfigError.
    void validate() const;
};

/// Builds and validates a config from parsed keys. Unknown keys and
/// missing required keys (system.N, system.M, system.K, system.power_dbm)
/// are errors naming the key.
ExperimentConfig resolve(const KeyValues& kv);

ExperimentConfig load(const std::filesystem::path& path);

/// Every key with its resolved value; doubles at 17 significant digits so
/// that resolve(parse_text(dump(c))) reproduces c exactly.
std::string dump(const ExperimentConfig& c);

// Same as dump() but as a key map.
KeyValues to_keys(const ExperimentConfig& c);

std::string format_double(double x);

} // namespace gamn::config
