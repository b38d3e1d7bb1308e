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

#include "gamn/experiment.hpp"

#include "gamn/error.hpp"
#include "gamn/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

namespace gamn::experiment {

namespace {

enum StreamPurpose : std::uint64_t { kChannel = 7, kRun = 8 };

std::string row(std::initializer_list<std::string> fields)
{
    std::string out;
    for (const auto& f : fields) {
        if (!out.empty()) out += ",";
        out += f;
    }
    return out + "\n";
}

// Runs cfg over (variant x realization) for several configs at once so the
// worker pool sees every task; results[c][v] is the average for config c.
std::vector<std::vector<AveragedTrace>> run_grid(const std::vector<config::ExperimentConfig>& cfgs,
                                                 unsigned jobs)
{
    struct Task {
        std::size_t c, v, r;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cfgs.size(); ++c) {
        for (std::size_t v = 0; v < cfgs[c].variants.size(); ++v) {
            for (int r = 0; r < cfgs[c].n_realizations; ++r) {
                tasks.push_back({c, v, static_cast<std::size_t>(r)});
            }
        }
    }
    std::vector<meta::RunTrace> traces(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        const Task& t = tasks[i];
        const auto& cfg = cfgs[t.c];
        const RealizationSeeds s = realization_seeds(cfg.master_seed, t.r);
        traces[i] = meta::run(make_problem(cfg, s.channel), cfg.hyper, cfg.variants[t.v], s.run);
    });

    std::vector<std::vector<AveragedTrace>> out(cfgs.size());
    std::size_t i = 0;
    for (std::size_t c = 0; c < cfgs.size(); ++c) {
        for (std::size_t v = 0; v < cfgs[c].variants.size(); ++v) {
            const auto n = static_cast<std::size_t>(cfgs[c].n_realizations);
            std::vector<meta::RunTrace> group(std::make_move_iterator(traces.begin() + i),
                                              std::make_move_iterator(traces.begin() + i + n));
            out[c].push_back(average(group));
            i += n;
        }
    }
    return out;
}

} // namespace

RealizationSeeds realization_seeds(std::uint64_t master, std::size_t index)
{
    return {derive_seed(master, index, kChannel), derive_seed(master, index, kRun)};
}

unsigned default_jobs() noexcept
{
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn)
{
    if (jobs == 0) jobs = default_jobs();
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::min<std::size_t>(jobs, count);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

MeanStderr mean_stderr(const std::vector<double>& xs)
{
    MeanStderr r;
    if (xs.empty()) return r;
    const double n = static_cast<double>(xs.size());
    // shifted by the first sample; exact for constant data
    const double shift = xs.front();
    double sum = 0.0;
    for (double x : xs) sum += x - shift;
    const double d = sum / n;
    r.mean = shift + d;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - shift - d) * (x - shift - d);
        r.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return r;
}

AveragedTrace average(const std::vector<meta::RunTrace>& traces)
{
    if (traces.empty()) throw Error("average: no traces");
    const std::size_t len = traces.front().wsr_per_epoch.size();
    AveragedTrace out;
    out.mean.resize(len);
    out.stderr_.resize(len);
    std::vector<double> column(traces.size());
    for (const auto& t : traces) {
        if (t.wsr_per_epoch.size() != len) throw Error("average: traces differ in length");
        out.finals.push_back(t.final_wsr());
        out.bests.push_back(t.best_wsr());
        out.initials.push_back(t.initial_wsr);
    }
    for (std::size_t e = 0; e < len; ++e) {
        for (std::size_t i = 0; i < traces.size(); ++i) column[i] = traces[i].wsr_per_epoch[e];
        const MeanStderr s = mean_stderr(column);
        out.mean[e] = s.mean;
        out.stderr_[e] = s.stderr_;
    }
    return out;
}

meta::Problem make_problem(const config::ExperimentConfig& cfg, std::uint64_t channel_seed)
{
    meta::Problem p;
    p.channels = channel::generate(channel_seed, cfg.geometry, cfg.rician, cfg.n, cfg.m, cfg.k);
    p.link = cfg.link();
    p.power = cfg.power_watts();
    return p;
}

AveragedTrace average_runs(const config::ExperimentConfig& cfg, meta::Variant variant,
                           const std::vector<RealizationSeeds>& seeds, unsigned jobs)
{
    if (seeds.empty()) throw ConfigError("run.n_realizations", "must be >= 1");
    std::vector<meta::RunTrace> traces(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t i) {
        traces[i] = meta::run(make_problem(cfg, seeds[i].channel), cfg.hyper, variant, seeds[i].run);
    });
    return average(traces);
}

AveragedTrace average_runs(const config::ExperimentConfig& cfg, meta::Variant variant,
                           int n_realizations, unsigned jobs)
{
    if (n_realizations < 1) throw ConfigError("run.n_realizations", "must be >= 1");
    std::vector<RealizationSeeds> seeds;
    for (int i = 0; i < n_realizations; ++i) {
        seeds.push_back(realization_seeds(cfg.master_seed, static_cast<std::size_t>(i)));
    }
    return average_runs(cfg, variant, seeds, jobs);
}

RunResult run_experiment(const config::ExperimentConfig& cfg, unsigned jobs)
{
    cfg.validate();
    RunResult r;
    r.variants = cfg.variants;
    r.traces = std::move(run_grid({cfg}, jobs).front());
    return r;
}

std::vector<SweepRow> sweep_power(const config::ExperimentConfig& cfg,
                                  const std::vector<double>& powers_dbm, unsigned jobs)
{
    if (powers_dbm.empty()) throw ConfigError("powers", "empty power list");
    if (std::set<double>(powers_dbm.begin(), powers_dbm.end()).size() != powers_dbm.size()) {
        throw ConfigError("powers", "duplicate power values");
    }
    std::vector<config::ExperimentConfig> cfgs;
    for (double p : powers_dbm) {
        auto c = cfg;
        c.power_dbm = p;
        c.validate();
        cfgs.push_back(std::move(c));
    }
    const auto grid = run_grid(cfgs, jobs);
    std::vector<SweepRow> rows;
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
        for (std::size_t c = 0; c < cfgs.size(); ++c) {
            rows.push_back({cfg.variants[v], powers_dbm[c], grid[c][v].final_stats(),
                            grid[c][v].best_stats()});
        }
    }
    return rows;
}

std::vector<SweepRow> sweep_n(const config::ExperimentConfig& cfg,
                              const std::vector<std::size_t>& ns, unsigned jobs)
{
    if (ns.empty()) throw ConfigError("ns", "empty N list");
    for (std::size_t n : ns) {
        if (n == 0) throw ConfigError("ns", "N must be >= 1");
    }
    if (std::set<std::size_t>(ns.begin(), ns.end()).size() != ns.size()) {
        throw ConfigError("ns", "duplicate N values");
    }
    std::vector<config::ExperimentConfig> cfgs;
    for (std::size_t n : ns) {
        auto c = cfg;
        c.n = n;
        c.validate();
        cfgs.push_back(std::move(c));
    }
    const auto grid = run_grid(cfgs, jobs);
    std::vector<SweepRow> rows;
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
        for (std::size_t c = 0; c < cfgs.size(); ++c) {
            rows.push_back({cfg.variants[v], static_cast<double>(ns[c]), grid[c][v].final_stats(),
                            grid[c][v].best_stats()});
        }
    }
    return rows;
}

std::string trace_csv(const RunResult& r)
{
    std::string out = "variant,epoch,mean_wsr,stderr_wsr\n";
    for (std::size_t v = 0; v < r.variants.size(); ++v) {
        const auto& t = r.traces[v];
        for (std::size_t e = 0; e < t.mean.size(); ++e) {
            out += row({meta::variant_name(r.variants[v]), std::to_string(e),
                        config::format_double(t.mean[e]), config::format_double(t.stderr_[e])});
        }
    }
    return out;
}

std::string sweep_power_csv(const std::vector<SweepRow>& rows)
{
    std::string out = "variant,power_dBm,final_wsr,best_wsr,stderr\n";
    for (const auto& r : rows) {
        out += row({meta::variant_name(r.variant), config::format_double(r.point),
                    config::format_double(r.final_wsr.mean), config::format_double(r.best_wsr.mean),
                    config::format_double(r.final_wsr.stderr_)});
    }
    return out;
}

std::string sweep_n_csv(const std::vector<SweepRow>& rows)
{
    std::string out = "variant,N,final_wsr,best_wsr,stderr\n";
    for (const auto& r : rows) {
        out += row({meta::variant_name(r.variant),
                    std::to_string(static_cast<std::size_t>(r.point)),
                    config::format_double(r.final_wsr.mean), config::format_double(r.best_wsr.mean),
                    config::format_double(r.final_wsr.stderr_)});
    }
    return out;
}

std::string meta_sidecar(const config::ExperimentConfig& cfg, const std::string& command)
{
    return config::dump(cfg) + "\n# command: " + command + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create '" + path.parent_path().string() + "': " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<GradCheckEntry> grad_check(const config::ExperimentConfig& cfg, double eps)
{
    cfg.validate();
    using cdiff::Var;
    const RealizationSeeds s = realization_seeds(cfg.master_seed, 0);
    const meta::Problem p = make_problem(cfg, s.channel);
    const auto init = meta::initial_state(s.run, cfg.n, cfg.m, cfg.k, p.power);
    const auto variant = meta::Variant::Gamn;
    const nets::Mlp phase = meta::initial_phase_net(s.run, variant, cfg.n, cfg.hyper);
    const nets::Mlp precoder = meta::initial_precoder_net(s.run, cfg.m, cfg.k, cfg.hyper);

    std::vector<GradCheckEntry> report;

    report.push_back({"grad_theta_R", cdiff::grad_check(
                                          [&](cdiff::Tape& t, Var theta) {
                                              return metrics::graph::wsr(theta, t.constant(init.w),
                                                                         p.channels, p.link);
                                          },
                                          init.theta, eps)});
    report.push_back({"grad_W_R", cdiff::grad_check(
                                      [&](cdiff::Tape& t, Var w) {
                                          return metrics::graph::wsr(t.constant(init.theta), w,
                                                                     p.channels, p.link);
                                      },
                                      init.w, eps)});

    // Record the detached network inputs once at the nominal weights.
    meta::DetachedInputs detached;
    {
        cdiff::Tape t;
        meta::epoch_loss(t, p, cfg.hyper, variant, nets::bind(t, phase), nets::bind(t, precoder),
                         init.theta, init.w, nullptr, nullptr, &detached);
    }
    auto constants = [](cdiff::Tape& t, const nets::Mlp& net) {
        return nets::MlpVars{t.constant(net.w1), t.constant(net.b1), t.constant(net.w2),
                             t.constant(net.b2), net.activation};
    };
    auto leaves = [](const nets::Mlp& net) {
        return std::vector<cdiff::GradCheckInput>{
            {net.w1, net.domain}, {net.b1, net.domain}, {net.w2, net.domain}, {net.b2, net.domain}};
    };

    report.push_back({"grad_xP_L", cdiff::grad_check(
                                       [&](cdiff::Tape& t, const std::vector<Var>& v) {
                                           nets::MlpVars pv{v[0], v[1], v[2], v[3], phase.activation};
                                           meta::DetachedInputs d = detached;
                                           return meta::epoch_loss(t, p, cfg.hyper, variant, pv,
                                                                   constants(t, precoder), init.theta,
                                                                   init.w, nullptr, nullptr, &d);
                                       },
                                       leaves(phase), eps)});
    report.push_back({"grad_xPR_L", cdiff::grad_check(
                                        [&](cdiff::Tape& t, const std::vector<Var>& v) {
                                            nets::MlpVars pv{v[0], v[1], v[2], v[3],
                                                             precoder.activation};
                                            meta::DetachedInputs d = detached;
                                            return meta::epoch_loss(t, p, cfg.hyper, variant,
                                                                    constants(t, phase), pv, init.theta,
                                                                    init.w, nullptr, nullptr, &d);
                                        },
                                        leaves(precoder), eps)});
    return report;
}

} // namespace gamn::experiment
