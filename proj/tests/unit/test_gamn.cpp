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

#include "gamn/error.hpp"
#include "gamn/meta_learner.hpp"
#include "gamn/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gamn;
using namespace gamn::meta;

namespace {

meta::Problem make(std::uint64_t seed, std::size_t n, std::size_t m, std::size_t k,
                   double power_dbm = 10.0, double noise_dbm = -100.0)
{
    meta::Problem p;
    p.channels = channel::generate(seed, {}, {}, n, m, k);
    p.link = metrics::LinkParams{metrics::uniform_weights(k),
                                 std::pow(10.0, (noise_dbm - 30.0) / 10.0)};
    p.power = std::pow(10.0, (power_dbm - 30.0) / 10.0);
    return p;
}

HyperParams short_run(int epochs)
{
    HyperParams h;
    h.n_outer = epochs;
    return h;
}

// N = 2, M = 1, K = 1: with the matched-filter precoder the rate is
// log2(1 + P |g(theta)|^2 / sigma2), g = sum_n conj(h_ru[n]) theta_n h_br[n].
// Exhaustive over both phases on a 0.5 degree grid.
double grid_optimum(const meta::Problem& p)
{
    const double step = 0.5 * std::numbers::pi / 180.0;
    const cplx a0 = std::conj(p.channels.h_ru(0, 0)) * p.channels.h_br(0, 0);
    const cplx a1 = std::conj(p.channels.h_ru(0, 1)) * p.channels.h_br(1, 0);
    double best = 0.0;
    for (int i = 0; i < 720; ++i) {
        for (int j = 0; j < 720; ++j) {
            const cplx g = a0 * std::polar(1.0, i * step) + a1 * std::polar(1.0, j * step);
            best = std::max(best, std::log2(1.0 + p.power * std::norm(g) / p.link.sigma2));
        }
    }
    return best;
}

} // namespace

TEST_CASE("variant names")
{
    for (auto v : {Variant::Gamn, Variant::GamnReal, Variant::GamnNoEuler, Variant::Pga}) {
        CHECK(parse_variant(variant_name(v)) == v);
    }
    CHECK(parse_variant("PGA_baseline") == Variant::Pga);
    CHECK_THROWS_AS(parse_variant("GMML"), ConfigError);
}

TEST_CASE("hyperparameter validation names the key")
{
    HyperParams h;
    h.n_outer = 0;
    try {
        h.validate();
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "hyper.n_M");
    }
    h = HyperParams{};
    h.alpha_phase = 0.0;
    CHECK_THROWS_AS(h.validate(), ConfigError);
    h = HyperParams{};
    h.euler = -1.0;
    CHECK_THROWS_AS(h.validate(), ConfigError);
}

TEST_CASE("initial state is feasible and seeded")
{
    const auto s = initial_state(5, 10, 3, 2, 0.01);
    for (const auto& z : s.theta.data()) CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);
    CHECK(std::abs(squared_norm(s.w) - 0.01) < 1e-12 * 0.01);
    const auto t = initial_state(5, 10, 3, 2, 0.01);
    CHECK(s.theta == t.theta);
    CHECK(s.w == t.w);
}

TEST_CASE("zero last layers keep the first epoch at the initial point")
{
    const auto p = make(3, 8, 2, 2);
    HyperParams h = short_run(1);
    h.zero_last_layer = true;
    for (auto v : {Variant::Gamn, Variant::GamnReal, Variant::GamnNoEuler}) {
        const auto tr = run(p, h, v, 17);
        const auto init = initial_state(17, 8, 2, 2, p.power);
        REQUIRE(tr.wsr_per_epoch.size() == 1);
        CHECK(std::abs(tr.wsr_per_epoch[0] - tr.initial_wsr) <= 1e-12 * tr.initial_wsr);
        for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(tr.final_theta[i] - init.theta[i]) < 1e-15);
        for (std::size_t i = 0; i < init.w.size(); ++i) {
            CHECK(std::abs(tr.final_w[i] - init.w[i]) < 1e-15);
        }
    }
}

TEST_CASE("constraints hold at every epoch")
{
    const auto p = make(4, 12, 3, 2);
    for (auto v : {Variant::Gamn, Variant::GamnReal, Variant::GamnNoEuler, Variant::Pga}) {
        int seen = 0;
        double worst_theta = 0.0, worst_power = 0.0;
        run(p, short_run(60), v, 9, [&](int, const ComplexTensor& th, const ComplexTensor& w) {
            ++seen;
            for (const auto& z : th.data()) worst_theta = std::max(worst_theta, std::abs(std::abs(z) - 1.0));
            worst_power = std::max(worst_power, std::abs(squared_norm(w) - p.power) / p.power);
        });
        CHECK(seen == 60);
        CHECK(worst_theta <= 1e-9);
        CHECK(worst_power <= 1e-9);
    }
}

TEST_CASE("runs are deterministic")
{
    const auto p = make(5, 8, 2, 2);
    for (auto v : {Variant::Gamn, Variant::GamnReal, Variant::Pga}) {
        const auto a = run(p, short_run(40), v, 21);
        const auto b = run(p, short_run(40), v, 21);
        CHECK(a.wsr_per_epoch == b.wsr_per_epoch);
        CHECK(a.final_theta == b.final_theta);
        CHECK(a.final_w == b.final_w);
    }
}

TEST_CASE("no-Euler variant equals GAMN with h = 1 bit for bit")
{
    const auto p = make(6, 8, 2, 2);
    HyperParams h = short_run(50);
    h.euler = 1.0;
    const auto a = run(p, h, Variant::Gamn, 33);
    const auto b = run(p, h, Variant::GamnNoEuler, 33);
    CHECK(a.wsr_per_epoch == b.wsr_per_epoch);
    CHECK(a.final_theta == b.final_theta);
    CHECK(a.final_w == b.final_w);

    // with the default h the two differ
    const auto c = run(p, short_run(50), Variant::Gamn, 33);
    CHECK_FALSE(c.wsr_per_epoch == b.wsr_per_epoch);
}

TEST_CASE("phase net is frozen when the update period exceeds the run")
{
    const auto p = make(7, 8, 2, 2);
    HyperParams h = short_run(30);
    h.phase_period = h.n_outer + 1;
    const auto before = nets::parameter_hash(initial_phase_net(44, Variant::Gamn, 8, h));
    const auto tr = run(p, h, Variant::Gamn, 44);
    REQUIRE(tr.networks);
    CHECK(nets::parameter_hash(tr.networks->phase) == before);
    CHECK(nets::parameter_hash(tr.networks->precoder)
          != nets::parameter_hash(initial_precoder_net(44, 2, 2, h)));

    h.phase_period = 1;
    const auto moved = run(p, h, Variant::Gamn, 44);
    CHECK(nets::parameter_hash(moved.networks->phase) != before);
}

TEST_CASE("GAMNreal uses a real phase net on stacked parts")
{
    const auto p = make(8, 6, 2, 2);
    const auto tr = run(p, short_run(3), Variant::GamnReal, 1);
    REQUIRE(tr.networks);
    CHECK(tr.networks->phase.domain == cdiff::Domain::Real);
    CHECK(tr.networks->phase.inputs() == 12);
    for (const auto& z : tr.networks->phase.w1.data()) CHECK(z.imag() == 0.0);
}

TEST_CASE("tiny instance reaches the grid optimum")
{
    const auto p = make(11, 2, 1, 1);
    const double opt = grid_optimum(p);
    REQUIRE(opt > 0.0);
    const auto g = run(p, HyperParams{}, Variant::Gamn, 5);
    CHECK(g.final_wsr() >= 0.98 * opt);
    CHECK(g.final_wsr() <= opt * (1.0 + 1e-3));

    const auto b = run(p, HyperParams{}, Variant::Pga, 5);
    CHECK(b.final_wsr() >= 0.95 * opt);
}

TEST_CASE("gradient ascent with zero steps stays at the start")
{
    const auto p = make(12, 6, 2, 2);
    HyperParams h = short_run(20);
    h.pga_step_phase = 0.0;
    h.pga_step_precoder = 0.0;
    const auto tr = pga_baseline(p, h, 3);
    for (double r : tr.wsr_per_epoch) CHECK(r == tr.initial_wsr);
}

TEST_CASE("mean final rate beats the initial rate over 20 seeds")
{
    double init = 0.0, fin = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto p = make(100 + s, 8, 2, 2);
        const auto tr = run(p, short_run(100), Variant::Gamn, 200 + s);
        init += tr.initial_wsr;
        fin += tr.final_wsr();
    }
    CHECK(fin > init);
}

TEST_CASE("shape mismatch between weights and users is rejected")
{
    auto p = make(13, 4, 2, 2);
    p.link.weights = {1.0};
    CHECK_THROWS_AS(run(p, short_run(2), Variant::Gamn, 1), ConfigError);
}
