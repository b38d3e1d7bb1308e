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

#include "gamn/channel.hpp"
#include "gamn/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace gamn;
using namespace gamn::channel;

TEST_CASE("steering vector examples")
{
    const auto a = steering_vector(0.0, 4, 0.5);
    REQUIRE(a.size() == 4);
    for (const auto& z : a) CHECK(z == cplx{1.0, 0.0});

    const auto b = steering_vector(std::numbers::pi / 2, 2, 0.5);
    CHECK(std::abs(b[0] - cplx{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(b[1] - cplx{-1.0, 0.0}) < 1e-15);

    for (double angle : {-1.2, 0.3, 0.9}) {
        for (const auto& z : steering_vector(angle, 32, 0.5)) CHECK(std::abs(std::abs(z) - 1.0) < 1e-15);
    }
}

TEST_CASE("pathloss examples")
{
    CHECK(pathloss_db(1.0, true, 1e9) == doctest::Approx(28.0).epsilon(1e-15));
    // 28 + 22 log10(100) + 20 log10(28)
    const double expected = 28.0 + 44.0 + 20.0 * std::log10(28.0);
    CHECK(std::abs(pathloss_db(100.0, true, 28e9) - expected) < 1e-12);
    CHECK(std::abs(expected - 100.94) < 0.01);
    CHECK(std::abs(pathloss_db(10.0, false, 28e9)
                   - (32.4 + 23.1 + 20.0 * std::log10(28.0)))
          < 1e-12);

    double prev = pathloss_db(1.0, true, 28e9);
    for (double d = 1.5; d < 1000.0; d *= 1.5) {
        for (bool los : {true, false}) {
            const double cur = pathloss_db(d, los, 28e9);
            CHECK(cur > pathloss_db(d / 1.5, los, 28e9));
        }
        prev = pathloss_db(d, true, 28e9);
    }
    (void)prev;
    CHECK_THROWS_AS(pathloss_db(0.5, true, 28e9), DomainError);
}

TEST_CASE("shapes, finiteness and determinism")
{
    const Geometry g;
    const RicianParams r;
    const auto a = generate(42, g, r, 16, 4, 3);
    CHECK(a.h_br.shape() == Shape{16, 4});
    CHECK(a.h_ru.shape() == Shape{3, 16});
    CHECK(a.user_positions.size() == 3);
    CHECK(a.h_br.all_finite());
    CHECK(a.h_ru.all_finite());

    const auto b = generate(42, g, r, 16, 4, 3);
    CHECK(a.h_br == b.h_br);
    CHECK(a.h_ru == b.h_ru);
    CHECK(a.user_positions == b.user_positions);

    const auto c = generate(43, g, r, 16, 4, 3);
    CHECK_FALSE(a.h_br == c.h_br);
}

TEST_CASE("users are dropped inside the disc")
{
    const Geometry g;
    for (std::uint64_t s = 0; s < 50; ++s) {
        for (const auto& p : generate(s, g, {}, 2, 1, 4).user_positions) {
            CHECK(distance(p, g.user_center) <= g.user_radius);
        }
    }
}

TEST_CASE("pure line of sight has the LoS amplitude everywhere")
{
    const Geometry g;
    RicianParams r;
    r.kappa_br = 1e12;
    r.kappa_ru = 1e12;
    const auto ch = generate(7, g, r, 8, 4, 2);
    const double amp = db_to_amplitude(pathloss_db(distance(g.bs, g.ris), g.carrier_hz, r.los));
    for (const auto& z : ch.h_br.data()) CHECK(std::abs(std::abs(z) / amp - 1.0) < 1e-5);
}

TEST_CASE("kappa = 0 entries have the NLoS variance")
{
    const Geometry g;
    RicianParams r;
    r.kappa_br = 0.0;
    r.kappa_ru = 0.0;
    const double amp = db_to_amplitude(pathloss_db(distance(g.bs, g.ris), g.carrier_hz, r.nlos));

    // 10^6 normalized entries: 1250 draws of a 100 x 8 matrix.
    double sum_re = 0.0, sum_im = 0.0, sq_re = 0.0, sq_im = 0.0, sq_abs = 0.0;
    std::size_t count = 0;
    for (std::uint64_t s = 0; s < 1250; ++s) {
        const auto ch = generate(1000 + s, g, r, 100, 8, 1);
        for (const auto& z : ch.h_br.data()) {
            const cplx u = z / amp;
            sum_re += u.real();
            sum_im += u.imag();
            sq_re += u.real() * u.real();
            sq_im += u.imag() * u.imag();
            sq_abs += std::norm(z);
            ++count;
        }
    }
    const double n = static_cast<double>(count);
    CHECK(std::abs(sum_re / n) < 0.01);
    CHECK(std::abs(sum_im / n) < 0.01);
    CHECK(std::abs(sq_re / n / 0.5 - 1.0) < 0.03);
    CHECK(std::abs(sq_im / n / 0.5 - 1.0) < 0.03);
    // variance of the raw entries against (L_NLoS)^2
    CHECK(std::abs(sq_abs / n / (amp * amp) - 1.0) < 0.05);
}

TEST_CASE("invalid geometry is rejected")
{
    Geometry g;
    g.user_radius = 0.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = Geometry{};
    g.carrier_hz = -1.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    RicianParams r;
    r.kappa_br = -1.0;
    CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("dump round-trips bit for bit")
{
    const auto ch = generate(99, Geometry{}, RicianParams{}, 5, 3, 2);
    const auto path = std::filesystem::temp_directory_path() / "gamn_channel_dump_test.txt";
    write_dump(ch, path);
    const auto back = read_dump(path);
    CHECK(back.h_br == ch.h_br);
    CHECK(back.h_ru == ch.h_ru);
    CHECK(back.seed == ch.seed);
    std::filesystem::remove(path);
}
