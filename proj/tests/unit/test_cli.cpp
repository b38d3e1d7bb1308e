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

// Drives the installed command-line binary through a shell.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string output;
};

Result sh(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + " '" GAMN_CLI_PATH "' " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[512];
    while (std::fgets(buf, sizeof buf, p)) r.output += buf;
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path write_config(const char* name, const std::string& body)
{
    const auto p = fs::temp_directory_path() / name;
    std::ofstream(p) << body;
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::string kTiny = "[system]\nN = 6\nM = 2\nK = 2\npower_dbm = 10\n"
                          "[hyper]\nn_M = 10\n[run]\nn_realizations = 2\n[output]\nprefix = t\n";

} // namespace

TEST_CASE("missing key exits 1 and names it")
{
    const auto cfg = write_config("gamn_cli_missing.conf", "[system]\nM = 2\nK = 2\npower_dbm = 10\n");
    const auto r = sh("run --config " + cfg.string() + " --out /tmp/gamn_cli_x");
    CHECK(r.code == 1);
    CHECK(r.output.find("system.N") != std::string::npos);
}

TEST_CASE("run writes byte-identical output regardless of --jobs")
{
    const auto cfg = write_config("gamn_cli_tiny.conf", kTiny);
    const fs::path a = fs::temp_directory_path() / "gamn_cli_a", b = fs::temp_directory_path() / "gamn_cli_b";
    fs::remove_all(a);
    fs::remove_all(b);
    REQUIRE(sh("run --config " + cfg.string() + " --out " + a.string() + " --jobs 1 --variants GAMN,GAMNreal").code == 0);
    REQUIRE(sh("run --config " + cfg.string() + " --out " + b.string() + " --jobs 3 --variants GAMN,GAMNreal").code == 0);
    const auto csv = slurp(a / "t_trace.csv");
    CHECK(csv == slurp(b / "t_trace.csv"));
    int rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 1 + 2 * 10);

    // the sidecar reproduces the run
    const fs::path c = fs::temp_directory_path() / "gamn_cli_c";
    fs::remove_all(c);
    REQUIRE(sh("run --config " + (a / "t_meta.txt").string() + " --out " + c.string()).code == 0);
    CHECK(slurp(c / "t_trace.csv") == csv);
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}

TEST_CASE("seed flag changes the output, GAMN_OUT_DIR is the fallback directory")
{
    const auto cfg = write_config("gamn_cli_tiny2.conf", kTiny);
    const fs::path d = fs::temp_directory_path() / "gamn_cli_env";
    fs::remove_all(d);
    REQUIRE(sh("run --config " + cfg.string(), "GAMN_OUT_DIR=" + d.string()).code == 0);
    const auto first = slurp(d / "t_trace.csv");
    CHECK_FALSE(first.empty());
    REQUIRE(sh("run --config " + cfg.string() + " --seed 77", "GAMN_OUT_DIR=" + d.string()).code == 0);
    CHECK(slurp(d / "t_trace.csv") != first);
    fs::remove_all(d);
}

TEST_CASE("sweeps")
{
    const auto cfg = write_config("gamn_cli_tiny3.conf", kTiny);
    const fs::path d = fs::temp_directory_path() / "gamn_cli_sweep";
    fs::remove_all(d);
    REQUIRE(sh("sweep-power --config " + cfg.string() + " --out " + d.string() + " --powers 0,5,10,15").code == 0);
    const auto p = slurp(d / "t_sweep_power.csv");
    int rows = 0;
    for (char c : p) rows += c == '\n';
    CHECK(rows == 5);
    CHECK(sh("sweep-power --config " + cfg.string() + " --out " + d.string() + " --powers 0,0").code == 1);
    REQUIRE(sh("sweep-n --config " + cfg.string() + " --out " + d.string() + " --ns 4,8").code == 0);
    CHECK(slurp(d / "t_sweep_n.csv").rfind("variant,N,final_wsr,best_wsr,stderr\n", 0) == 0);
    CHECK(sh("sweep-n --config " + cfg.string() + " --out " + d.string() + " --ns 0").code == 1);
    fs::remove_all(d);
}

TEST_CASE("grad-check exit codes")
{
    const std::string conf = std::string(GAMN_SOURCE_DIR) + "/configs/grad_check.conf";
    const auto ok = sh("grad-check --config " + conf);
    CHECK(ok.code == 0);
    for (const char* name : {"grad_theta_R", "grad_W_R", "grad_xP_L", "grad_xPR_L"}) {
        CHECK(ok.output.find(name) != std::string::npos);
    }
    CHECK(sh("grad-check --config " + conf + " --tolerance 1e-12").code == 3);
}

TEST_CASE("unknown subcommand or flag is a usage error")
{
    CHECK(sh("frobnicate").code != 0);
    CHECK(sh("run").code == 1);
}
