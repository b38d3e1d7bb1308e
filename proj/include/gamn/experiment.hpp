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

// Monte-Carlo orchestration over channel realizations, and the CSV files
// written by the command-line verbs.

#pragma once

#include "gamn/config.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace gamn::experiment {

/// Seeds of realization i under a master seed. Every variant and sweep
/// point reuses them, so comparisons are paired.
struct RealizationSeeds {
    std::uint64_t channel = 0;
    std::uint64_t run = 0;
};

RealizationSeeds realization_seeds(std::uint64_t master, std::size_t index);

// Worker count used when jobs == 0.
unsigned default_jobs() noexcept;

/// Runs fn(0..count-1) on at most `jobs` threads. Exceptions are collected
/// and the one from the lowest index is rethrown after all tasks finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0; // sample std (n-1) / sqrt(n); 0 when n == 1
};

MeanStderr mean_stderr(const std::vector<double>& xs);

struct AveragedTrace {
    std::vector<double> mean;   // per epoch
    std::vector<double> stderr_;
    std::vector<double> finals; // per realization, in seed order
    std::vector<double> bests;
    std::vector<double> initials;

    MeanStderr final_stats() const { return mean_stderr(finals); }
    MeanStderr best_stats() const { return mean_stderr(bests); }
};

// Element-wise mean and standard error; all traces must share a length.
AveragedTrace average(const std::vector<meta::RunTrace>& traces);

meta::Problem make_problem(const config::ExperimentConfig& cfg, std::uint64_t channel_seed);

/// One run per seed pair. Any failure aborts the whole average with a
/// RunError naming the failing seed.
AveragedTrace average_runs(const config::ExperimentConfig& cfg, meta::Variant variant,
                           const std::vector<RealizationSeeds>& seeds, unsigned jobs = 0);

// Realizations 0..n-1 of cfg.master_seed.
AveragedTrace average_runs(const config::ExperimentConfig& cfg, meta::Variant variant,
                           int n_realizations, unsigned jobs = 0);

struct SweepRow {
    meta::Variant variant;
    double point = 0.0; // power in dBm or N
    MeanStderr final_wsr;
    MeanStderr best_wsr;
};

struct RunResult {
    std::vector<meta::Variant> variants;
    std::vector<AveragedTrace> traces;
};

RunResult run_experiment(const config::ExperimentConfig& cfg, unsigned jobs = 0);

// Rejects empty or duplicate lists with a ConfigError.
std::vector<SweepRow> sweep_power(const config::ExperimentConfig& cfg,
                                  const std::vector<double>& powers_dbm, unsigned jobs = 0);
std::vector<SweepRow> sweep_n(const config::ExperimentConfig& cfg,
                              const std::vector<std::size_t>& ns, unsigned jobs = 0);

std::string trace_csv(const RunResult& r);
std::string sweep_power_csv(const std::vector<SweepRow>& rows);
std::string sweep_n_csv(const std::vector<SweepRow>& rows);

// Resolved config followed by a comment line describing the command.
std::string meta_sidecar(const config::ExperimentConfig& cfg, const std::string& command);

void write_text(const std::filesystem::path& path, const std::string& text);

struct GradCheckEntry {
    std::string name;
    double max_rel_error = 0.0;
};

/// Central-difference check of the four gradients the method relies on:
/// d R / d theta, d R / d W, d L / d x_P and d L / d x_PR, at realization 0
/// of the configured instance. Network inputs are held at their recorded
/// values while perturbing, matching the detached-input gradient.
std::vector<GradCheckEntry> grad_check(const config::ExperimentConfig& cfg, double eps = 1e-6);

} // namespace gamn::experiment
