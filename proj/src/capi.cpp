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

#include "gamn/gamn.h"

#include "gamn/config.hpp"
#include "gamn/error.hpp"
#include "gamn/experiment.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

struct gamn_config {
    gamn::config::KeyValues keys;
    gamn::config::ExperimentConfig resolved;
};

struct gamn_trace {
    gamn::meta::RunTrace trace;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_key;
thread_local std::string g_scratch;

gamn_status fail(gamn_status code, const std::string& msg, const std::string& key = {})
{
    g_error = msg;
    g_error_key = key;
    return code;
}

// Maps the library's exception types onto status codes.
template <class F>
gamn_status guarded(F&& f)
{
    g_error.clear();
    g_error_key.clear();
    try {
        return f();
    } catch (const gamn::ConfigError& e) {
        return fail(GAMN_ERR_CONFIG, e.what(), e.key());
    } catch (const gamn::RunError& e) {
        return fail(GAMN_ERR_RUNTIME, e.what());
    } catch (const gamn::IoError& e) {
        return fail(GAMN_ERR_IO, e.what());
    } catch (const gamn::Error& e) {
        return fail(GAMN_ERR_RUNTIME, e.what());
    } catch (const std::bad_alloc&) {
        return fail(GAMN_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(GAMN_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(GAMN_ERR_INTERNAL, "unknown exception");
    }
}

std::string output_dir(const gamn_config* cfg, const char* out_dir)
{
    return out_dir ? std::string(out_dir) : cfg->resolved.output_dir;
}

std::filesystem::path output_file(const gamn_config* cfg, const char* out_dir,
                                  const std::string& suffix)
{
    return std::filesystem::path(output_dir(cfg, out_dir)) / (cfg->resolved.output_prefix + suffix);
}

gamn_status copy_complex(const gamn::ComplexTensor& t, double* re_im, size_t* count)
{
    if (!count) return fail(GAMN_ERR_ARGUMENT, "count is NULL");
    const size_t n = t.size();
    if (re_im) {
        if (*count < n) return fail(GAMN_ERR_ARGUMENT, "buffer too small");
        for (size_t i = 0; i < n; ++i) {
            re_im[2 * i] = t[i].real();
            re_im[2 * i + 1] = t[i].imag();
        }
    }
    *count = n;
    return GAMN_OK;
}

} // namespace

extern "C" {

const char* gamn_version(void) { return gamn::config::kArtifactVersion; }

const char* gamn_last_error(void) { return g_error.c_str(); }

const char* gamn_last_error_key(void) { return g_error_key.c_str(); }

gamn_status gamn_config_parse(const char* text, gamn_config** out)
{
    if (!text || !out) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    *out = nullptr;
    return guarded([&] {
        auto cfg = std::make_unique<gamn_config>();
        cfg->keys = gamn::config::parse_text(text);
        cfg->resolved = gamn::config::resolve(cfg->keys);
        *out = cfg.release();
        return GAMN_OK;
    });
}

gamn_status gamn_config_load(const char* path, gamn_config** out)
{
    if (!path || !out) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    *out = nullptr;
    return guarded([&] {
        auto cfg = std::make_unique<gamn_config>();
        cfg->keys = gamn::config::read_file(path);
        cfg->resolved = gamn::config::resolve(cfg->keys);
        *out = cfg.release();
        return GAMN_OK;
    });
}

void gamn_config_free(gamn_config* cfg) { delete cfg; }

gamn_status gamn_config_set(gamn_config* cfg, const char* key, const char* value)
{
    if (!cfg || !key || !value) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    return guarded([&] {
        auto keys = cfg->keys;
        keys[key] = value;
        auto resolved = gamn::config::resolve(keys);
        cfg->keys = std::move(keys);
        cfg->resolved = std::move(resolved);
        return GAMN_OK;
    });
}

gamn_status gamn_config_get(const gamn_config* cfg, const char* key, const char** value)
{
    if (!cfg || !key || !value) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    return guarded([&] {
        const auto all = gamn::config::to_keys(cfg->resolved);
        const auto it = all.find(key);
        if (it == all.end()) throw gamn::ConfigError(key, "unknown key");
        g_scratch = it->second;
        *value = g_scratch.c_str();
        return GAMN_OK;
    });
}

gamn_status gamn_config_dump(const gamn_config* cfg, const char** text)
{
    if (!cfg || !text) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    return guarded([&] {
        g_scratch = gamn::config::dump(cfg->resolved);
        *text = g_scratch.c_str();
        return GAMN_OK;
    });
}

gamn_status gamn_cmd_run(const gamn_config* cfg, const char* out_dir, unsigned jobs)
{
    if (!cfg) return fail(GAMN_ERR_ARGUMENT, "NULL config");
    return guarded([&] {
        const auto result = gamn::experiment::run_experiment(cfg->resolved, jobs);
        gamn::experiment::write_text(output_file(cfg, out_dir, "_trace.csv"),
                                     gamn::experiment::trace_csv(result));
        gamn::experiment::write_text(output_file(cfg, out_dir, "_meta.txt"),
                                     gamn::experiment::meta_sidecar(cfg->resolved, "run"));
        return GAMN_OK;
    });
}

gamn_status gamn_cmd_sweep_power(const gamn_config* cfg, const double* powers_dbm, size_t count,
                                 const char* out_dir, unsigned jobs)
{
    if (!cfg || (count && !powers_dbm)) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    return guarded([&] {
        const std::vector<double> powers(powers_dbm, powers_dbm + count);
        const auto rows = gamn::experiment::sweep_power(cfg->resolved, powers, jobs);
        std::string cmd = "sweep-power";
        for (double p : powers) cmd += " " + gamn::config::format_double(p);
        gamn::experiment::write_text(output_file(cfg, out_dir, "_sweep_power.csv"),
                                     gamn::experiment::sweep_power_csv(rows));
        gamn::experiment::write_text(output_file(cfg, out_dir, "_sweep_power_meta.txt"),
                                     gamn::experiment::meta_sidecar(cfg->resolved, cmd));
        return GAMN_OK;
    });
}

gamn_status gamn_cmd_sweep_n(const gamn_config* cfg, const size_t* ns, size_t count,
                             const char* out_dir, unsigned jobs)
{
    if (!cfg || (count && !ns)) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    return guarded([&] {
        const std::vector<std::size_t> list(ns, ns + count);
        const auto rows = gamn::experiment::sweep_n(cfg->resolved, list, jobs);
        std::string cmd = "sweep-n";
        for (std::size_t n : list) cmd += " " + std::to_string(n);
        gamn::experiment::write_text(output_file(cfg, out_dir, "_sweep_n.csv"),
                                     gamn::experiment::sweep_n_csv(rows));
        gamn::experiment::write_text(output_file(cfg, out_dir, "_sweep_n_meta.txt"),
                                     gamn::experiment::meta_sidecar(cfg->resolved, cmd));
        return GAMN_OK;
    });
}

gamn_status gamn_cmd_grad_check(const gamn_config* cfg, double tolerance, const char** report)
{
    if (!cfg) return fail(GAMN_ERR_ARGUMENT, "NULL config");
    if (!(tolerance > 0.0)) return fail(GAMN_ERR_ARGUMENT, "tolerance must be > 0");
    return guarded([&] {
        const auto entries = gamn::experiment::grad_check(cfg->resolved);
        g_scratch.clear();
        bool ok = true;
        std::string worst;
        for (const auto& e : entries) {
            g_scratch += e.name + " " + gamn::config::format_double(e.max_rel_error) + "\n";
            if (!(e.max_rel_error < tolerance)) {
                ok = false;
                if (worst.empty()) worst = e.name;
            }
        }
        if (report) *report = g_scratch.c_str();
        if (!ok) {
            return fail(GAMN_ERR_TOLERANCE, worst + " exceeds tolerance "
                                                + gamn::config::format_double(tolerance));
        }
        return GAMN_OK;
    });
}

gamn_status gamn_run(const gamn_config* cfg, const char* variant, uint64_t index,
                     gamn_trace** out)
{
    if (!cfg || !variant || !out) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    *out = nullptr;
    return guarded([&] {
        const auto v = gamn::meta::parse_variant(variant);
        const auto s = gamn::experiment::realization_seeds(cfg->resolved.master_seed, index);
        auto t = std::make_unique<gamn_trace>();
        t->trace = gamn::meta::run(gamn::experiment::make_problem(cfg->resolved, s.channel),
                                   cfg->resolved.hyper, v, s.run);
        *out = t.release();
        return GAMN_OK;
    });
}

void gamn_trace_free(gamn_trace* trace) { delete trace; }

size_t gamn_trace_epochs(const gamn_trace* trace)
{
    return trace ? trace->trace.wsr_per_epoch.size() : 0;
}

gamn_status gamn_trace_wsr(const gamn_trace* trace, size_t epoch, double* wsr)
{
    if (!trace || !wsr) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    if (epoch >= trace->trace.wsr_per_epoch.size()) {
        return fail(GAMN_ERR_ARGUMENT, "epoch " + std::to_string(epoch) + " out of range");
    }
    *wsr = trace->trace.wsr_per_epoch[epoch];
    return GAMN_OK;
}

double gamn_trace_initial_wsr(const gamn_trace* trace)
{
    return trace ? trace->trace.initial_wsr : std::nan("");
}

uint64_t gamn_trace_seed(const gamn_trace* trace) { return trace ? trace->trace.seed : 0; }

gamn_status gamn_trace_theta(const gamn_trace* trace, double* re_im, size_t* count)
{
    if (!trace) return fail(GAMN_ERR_ARGUMENT, "NULL trace");
    return copy_complex(trace->trace.final_theta, re_im, count);
}

gamn_status gamn_trace_precoder(const gamn_trace* trace, double* re_im, size_t* count)
{
    if (!trace) return fail(GAMN_ERR_ARGUMENT, "NULL trace");
    return copy_complex(trace->trace.final_w, re_im, count);
}

gamn_status gamn_trace_save_checkpoint(const gamn_trace* trace, const char* path)
{
    if (!trace || !path) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    if (!trace->trace.networks) {
        return fail(GAMN_ERR_ARGUMENT, "trace has no networks (PGA run)");
    }
    return guarded([&] {
        gamn::nets::save_checkpoint(*trace->trace.networks, path);
        return GAMN_OK;
    });
}

gamn_status gamn_channel_dump(const gamn_config* cfg, uint64_t index, const char* path)
{
    if (!cfg || !path) return fail(GAMN_ERR_ARGUMENT, "NULL argument");
    return guarded([&] {
        const auto s = gamn::experiment::realization_seeds(cfg->resolved.master_seed, index);
        gamn::channel::write_dump(gamn::experiment::make_problem(cfg->resolved, s.channel).channels,
                                  path);
        return GAMN_OK;
    });
}

} // extern "C"
