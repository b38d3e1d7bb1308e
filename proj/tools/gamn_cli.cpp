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

// gamn: command-line front end over the C API.
//
// Exit codes: 0 ok, 1 configuration error, 2 runtime failure, 3 grad-check
// tolerance failure.

#include "gamn/gamn.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

struct ConfigDeleter {
    void operator()(gamn_config* c) const { gamn_config_free(c); }
};
using ConfigPtr = std::unique_ptr<gamn_config, ConfigDeleter>;

struct Common {
    std::string config;
    std::optional<std::string> out;
    unsigned jobs = 0;
    std::optional<std::string> variants;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets;
};

int report(gamn_status s)
{
    if (s == GAMN_OK) return 0;
    std::fprintf(stderr, "gamn: %s\n", gamn_last_error());
    switch (s) {
    case GAMN_ERR_CONFIG: return 1;
    case GAMN_ERR_TOLERANCE: return 3;
    case GAMN_ERR_ARGUMENT: return 1;
    default: return 2;
    }
}

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "configuration file")->required();
    cmd->add_option("--out", c.out, "output directory (default: $GAMN_OUT_DIR, then output.dir)");
    cmd->add_option("--jobs", c.jobs, "worker threads (0: all cores)");
    cmd->add_option("--variants", c.variants, "comma list: GAMN,GAMNreal,GAMN_no_euler,PGA");
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--set", c.sets, "override a key, e.g. --set run.n_realizations=20");
}

// Loads the config and applies the command-line overrides.
gamn_status load(const Common& c, ConfigPtr& cfg)
{
    gamn_config* raw = nullptr;
    gamn_status s = gamn_config_load(c.config.c_str(), &raw);
    cfg.reset(raw);
    if (s != GAMN_OK) return s;
    if (c.variants) {
        if ((s = gamn_config_set(raw, "run.variants", c.variants->c_str())) != GAMN_OK) return s;
    }
    if (c.seed) {
        const std::string v = std::to_string(*c.seed);
        if ((s = gamn_config_set(raw, "run.master_seed", v.c_str())) != GAMN_OK) return s;
    }
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "gamn: --set expects key=value, got '%s'\n", kv.c_str());
            return GAMN_ERR_CONFIG;
        }
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if ((s = gamn_config_set(raw, key.c_str(), value.c_str())) != GAMN_OK) return s;
    }
    return GAMN_OK;
}

std::optional<std::string> out_dir(const Common& c)
{
    if (c.out) return c.out;
    if (const char* env = std::getenv("GAMN_OUT_DIR"); env && *env) return std::string(env);
    return std::nullopt;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Meta-learned RIS phase and precoder optimization"};
    app.set_version_flag("--version", std::string(gamn_version()));
    app.require_subcommand(1);

    Common run_opts, power_opts, n_opts, grad_opts;
    std::vector<double> powers;
    std::vector<std::size_t> ns;
    double tolerance = 1e-5;

    auto* run = app.add_subcommand("run", "averaged convergence trace per variant");
    add_common(run, run_opts);
    auto* sweep_power = app.add_subcommand("sweep-power", "final/best rate against power");
    add_common(sweep_power, power_opts);
    sweep_power->add_option("--powers", powers, "powers in dBm, comma separated")
        ->required()
        ->delimiter(',');
    auto* sweep_n = app.add_subcommand("sweep-n", "final/best rate against RIS size");
    add_common(sweep_n, n_opts);
    sweep_n->add_option("--ns", ns, "RIS sizes, comma separated")->required()->delimiter(',');
    auto* grad = app.add_subcommand("grad-check", "finite-difference gradient report");
    add_common(grad, grad_opts);
    grad->add_option("--tolerance", tolerance, "maximum relative error (default 1e-5)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    ConfigPtr cfg;
    if (run->parsed()) {
        if (int rc = report(load(run_opts, cfg))) return rc;
        const auto dir = out_dir(run_opts);
        return report(gamn_cmd_run(cfg.get(), dir ? dir->c_str() : nullptr, run_opts.jobs));
    }
    if (sweep_power->parsed()) {
        if (int rc = report(load(power_opts, cfg))) return rc;
        const auto dir = out_dir(power_opts);
        return report(gamn_cmd_sweep_power(cfg.get(), powers.data(), powers.size(),
                                           dir ? dir->c_str() : nullptr, power_opts.jobs));
    }
    if (sweep_n->parsed()) {
        if (int rc = report(load(n_opts, cfg))) return rc;
        const auto dir = out_dir(n_opts);
        return report(gamn_cmd_sweep_n(cfg.get(), ns.data(), ns.size(),
                                       dir ? dir->c_str() : nullptr, n_opts.jobs));
    }
    if (int rc = report(load(grad_opts, cfg))) return rc;
    const char* text = nullptr;
    const gamn_status s = gamn_cmd_grad_check(cfg.get(), tolerance, &text);
    if (text) std::fputs(text, stdout);
    return report(s);
}
