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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const char* kSmall = "[system]\nN = 6\nM = 2\nK = 2\npower_dbm = 10\n"
                     "[hyper]\nn_M = 12\n[run]\nn_realizations = 2\n";

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const char* name)
{
    auto d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("version and clean error state")
{
    CHECK(std::string(gamn_version()).size() > 0);
    gamn_config* cfg = nullptr;
    REQUIRE(gamn_config_parse(kSmall, &cfg) == GAMN_OK);
    CHECK(std::string(gamn_last_error()).empty());
    gamn_config_free(cfg);
    gamn_config_free(nullptr);
    gamn_trace_free(nullptr);
}

TEST_CASE("config errors carry the key")
{
    gamn_config* cfg = nullptr;
    CHECK(gamn_config_parse("[system]\nM = 2\nK = 2\npower_dbm = 1\n", &cfg) == GAMN_ERR_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(std::string(gamn_last_error_key()) == "system.N");
    CHECK(std::string(gamn_last_error()).find("system.N") != std::string::npos);

    CHECK(gamn_config_load("/nonexistent/x.conf", &cfg) == GAMN_ERR_CONFIG);
    CHECK(gamn_config_parse(nullptr, &cfg) == GAMN_ERR_ARGUMENT);
}

TEST_CASE("set, get and dump")
{
    gamn_config* cfg = nullptr;
    REQUIRE(gamn_config_parse(kSmall, &cfg) == GAMN_OK);
    CHECK(gamn_config_set(cfg, "hyper.h", "2.5") == GAMN_OK);
    const char* v = nullptr;
    REQUIRE(gamn_config_get(cfg, "hyper.h", &v) == GAMN_OK);
    CHECK(std::string(v) == "2.5");
    CHECK(gamn_config_set(cfg, "hyper.h", "-1") == GAMN_ERR_CONFIG);
    REQUIRE(gamn_config_get(cfg, "hyper.h", &v) == GAMN_OK);
    CHECK(std::string(v) == "2.5"); // unchanged after a failed set
    CHECK(gamn_config_get(cfg, "nope.nope", &v) == GAMN_ERR_CONFIG);

    const char* text = nullptr;
    REQUIRE(gamn_config_dump(cfg, &text) == GAMN_OK);
    const std::string dumped = text;
    gamn_config* again = nullptr;
    REQUIRE(gamn_config_parse(dumped.c_str(), &again) == GAMN_OK);
    REQUIRE(gamn_config_dump(again, &text) == GAMN_OK);
    CHECK(dumped == text);
    gamn_config_free(again);
    gamn_config_free(cfg);
}

TEST_CASE("run command writes the trace and sidecar deterministically")
{
    gamn_config* cfg = nullptr;
    REQUIRE(gamn_config_parse(kSmall, &cfg) == GAMN_OK);
    REQUIRE(gamn_config_set(cfg, "run.variants", "GAMN,PGA") == GAMN_OK);
    const auto d1 = scratch("gamn_capi_run1"), d2 = scratch("gamn_capi_run2");
    REQUIRE(gamn_cmd_run(cfg, d1.c_str(), 1) == GAMN_OK);
    REQUIRE(gamn_cmd_run(cfg, d2.c_str(), 2) == GAMN_OK);
    const auto a = slurp(d1 / "gamn_trace.csv");
    CHECK(a.rfind("variant,epoch,mean_wsr,stderr_wsr\n", 0) == 0);
    CHECK(a == slurp(d2 / "gamn_trace.csv"));
    const auto meta = slurp(d1 / "gamn_meta.txt");
    CHECK(meta.find(gamn_version()) != std::string::npos);
    CHECK(meta.find("n_M = 12") != std::string::npos);
    gamn_config_free(cfg);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("sweeps validate their lists")
{
    gamn_config* cfg = nullptr;
    REQUIRE(gamn_config_parse(kSmall, &cfg) == GAMN_OK);
    const auto d = scratch("gamn_capi_sweep");
    const double dup[] = {0.0, 0.0};
    CHECK(gamn_cmd_sweep_power(cfg, dup, 2, d.c_str(), 1) == GAMN_ERR_CONFIG);
    const size_t zero[] = {0};
    CHECK(gamn_cmd_sweep_n(cfg, zero, 1, d.c_str(), 1) == GAMN_ERR_CONFIG);
    const double powers[] = {0.0, 10.0};
    REQUIRE(gamn_cmd_sweep_power(cfg, powers, 2, d.c_str(), 1) == GAMN_OK);
    CHECK(slurp(d / "gamn_sweep_power.csv").rfind("variant,power_dBm,final_wsr,best_wsr,stderr\n", 0)
          == 0);
    const size_t ns[] = {4, 6};
    REQUIRE(gamn_cmd_sweep_n(cfg, ns, 2, d.c_str(), 1) == GAMN_OK);
    CHECK(slurp(d / "gamn_sweep_n.csv").rfind("variant,N,final_wsr,best_wsr,stderr\n", 0) == 0);
    gamn_config_free(cfg);
    fs::remove_all(d);
}

TEST_CASE("single run accessors")
{
    gamn_config* cfg = nullptr;
    REQUIRE(gamn_config_parse(kSmall, &cfg) == GAMN_OK);
    gamn_trace* tr = nullptr;
    CHECK(gamn_run(cfg, "BOGUS", 0, &tr) == GAMN_ERR_CONFIG);
    REQUIRE(gamn_run(cfg, "GAMN", 0, &tr) == GAMN_OK);
    CHECK(gamn_trace_epochs(tr) == 12);
    double w = -1.0;
    CHECK(gamn_trace_wsr(tr, 11, &w) == GAMN_OK);
    CHECK(w >= 0.0);
    CHECK(gamn_trace_wsr(tr, 12, &w) == GAMN_ERR_ARGUMENT);
    CHECK(gamn_trace_initial_wsr(tr) > 0.0);

    size_t count = 0;
    REQUIRE(gamn_trace_theta(tr, nullptr, &count) == GAMN_OK);
    CHECK(count == 6);
    std::vector<double> buf(2 * count);
    REQUIRE(gamn_trace_theta(tr, buf.data(), &count) == GAMN_OK);
    for (size_t i = 0; i < count; ++i) CHECK(std::abs(std::hypot(buf[2 * i], buf[2 * i + 1]) - 1.0) < 1e-9);
    REQUIRE(gamn_trace_precoder(tr, nullptr, &count) == GAMN_OK);
    CHECK(count == 4);

    const auto ck = fs::temp_directory_path() / "gamn_capi_ckpt.bin";
    CHECK(gamn_trace_save_checkpoint(tr, ck.c_str()) == GAMN_OK);
    CHECK(fs::file_size(ck) > 16);
    fs::remove(ck);
    gamn_trace_free(tr);

    REQUIRE(gamn_run(cfg, "PGA", 0, &tr) == GAMN_OK);
    CHECK(gamn_trace_save_checkpoint(tr, ck.c_str()) == GAMN_ERR_ARGUMENT);
    gamn_trace_free(tr);

    const auto dump = fs::temp_directory_path() / "gamn_capi_channel.txt";
    REQUIRE(gamn_channel_dump(cfg, 0, dump.c_str()) == GAMN_OK);
    CHECK(slurp(dump).rfind("6 2 2 ", 0) == 0);
    fs::remove(dump);
    gamn_config_free(cfg);
}

TEST_CASE("grad-check through the C interface")
{
    gamn_config* cfg = nullptr;
    REQUIRE(gamn_config_parse("[system]\nN = 8\nM = 2\nK = 2\npower_dbm = 10\n", &cfg) == GAMN_OK);
    const char* report = nullptr;
    CHECK(gamn_cmd_grad_check(cfg, 1e-5, &report) == GAMN_OK);
    int rows = 0;
    for (const char* p = report; *p; ++p) rows += *p == '\n';
    CHECK(rows == 4);
    CHECK(gamn_cmd_grad_check(cfg, 1e-12, &report) == GAMN_ERR_TOLERANCE);
    gamn_config_free(cfg);
}
