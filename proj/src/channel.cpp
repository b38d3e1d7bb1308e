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
#include "gamn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace gamn::channel {

namespace {

// Angle off broadside seen from `from` towards `to` for an array whose
// axis is the given unit vector.
double array_angle(Point from, Point to, Point axis)
{
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    const double d = std::hypot(dx, dy);
    return std::asin(std::clamp((dx * axis.x + dy * axis.y) / d, -1.0, 1.0));
}

constexpr Point kBsAxis{0.0, 1.0};
constexpr Point kRisAxis{1.0, 0.0};

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

double distance(Point a, Point b) noexcept
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

void Geometry::validate() const
{
    if (!(user_radius > 0.0)) throw ConfigError("geometry.user_radius", "must be > 0");
    if (!(carrier_hz > 0.0)) throw ConfigError("geometry.carrier_hz", "must be > 0");
    if (!(antenna_spacing > 0.0)) throw ConfigError("geometry.antenna_spacing", "must be > 0");
}

void RicianParams::validate() const
{
    if (!(kappa_br >= 0.0)) throw ConfigError("rician.kappa_br", "must be >= 0");
    if (!(kappa_ru >= 0.0)) throw ConfigError("rician.kappa_ru", "must be >= 0");
}

std::vector<cplx> steering_vector(double angle, std::size_t count, double spacing)
{
    std::vector<cplx> v(count);
    const double phase = 2.0 * std::numbers::pi * spacing * std::sin(angle);
    for (std::size_t n = 0; n < count; ++n) {
        v[n] = std::polar(1.0, phase * static_cast<double>(n));
    }
    return v;
}

double pathloss_db(double distance_m, double freq_hz, const PathlossModel& model)
{
    if (!(distance_m >= 1.0)) {
        throw DomainError("pathloss_db: distance " + std::to_string(distance_m)
                          + " m is below the 1 m validity limit");
    }
    return model.intercept + model.distance_slope * std::log10(distance_m)
           + model.freq_slope * std::log10(freq_hz / 1e9);
}

double pathloss_db(double distance_m, bool los, double freq_hz, const RicianParams& params)
{
    return pathloss_db(distance_m, freq_hz, los ? params.los : params.nlos);
}

double db_to_amplitude(double loss_db) noexcept
{
    return std::sqrt(std::pow(10.0, -loss_db / 10.0));
}

ChannelSet generate(std::uint64_t seed, const Geometry& geometry, const RicianParams& rician,
                    std::size_t n, std::size_t m, std::size_t k)
{
    if (n == 0 || m == 0 || k == 0) {
        throw ConfigError("system", "N, M and K must all be >= 1");
    }
    geometry.validate();
    rician.validate();

    Rng rng(seed);
    ChannelSet out;
    out.seed = seed;

    // Users uniform in the disc: sqrt of a uniform radius fraction.
    out.user_positions.reserve(k);
    for (std::size_t u = 0; u < k; ++u) {
        const double r = geometry.user_radius * std::sqrt(rng.uniform());
        const double a = 2.0 * std::numbers::pi * rng.uniform();
        out.user_positions.push_back(
            {geometry.user_center.x + r * std::cos(a), geometry.user_center.y + r * std::sin(a)});
    }

    const double f = geometry.carrier_hz;
    const double dl = geometry.antenna_spacing;

    {
        const double d = distance(geometry.bs, geometry.ris);
        const double l_los = db_to_amplitude(pathloss_db(d, true, f, rician));
        const double l_nlos = db_to_amplitude(pathloss_db(d, false, f, rician));
        const double w_los = l_los * std::sqrt(rician.kappa_br / (1.0 + rician.kappa_br));
        const double w_nlos = l_nlos * std::sqrt(1.0 / (1.0 + rician.kappa_br));
        const auto a_ris = steering_vector(array_angle(geometry.ris, geometry.bs, kRisAxis), n, dl);
        const auto a_bs = steering_vector(array_angle(geometry.bs, geometry.ris, kBsAxis), m, dl);
        out.h_br = ComplexTensor::matrix(n, m);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const cplx los = a_ris[i] * std::conj(a_bs[j]);
                out.h_br(i, j) = w_los * los + w_nlos * rng.complex_normal();
            }
        }
    }

    out.h_ru = ComplexTensor::matrix(k, n);
    for (std::size_t u = 0; u < k; ++u) {
        const Point p = out.user_positions[u];
        const double d = distance(geometry.ris, p);
        const double l_los = db_to_amplitude(pathloss_db(d, true, f, rician));
        const double l_nlos = db_to_amplitude(pathloss_db(d, false, f, rician));
        const double w_los = l_los * std::sqrt(rician.kappa_ru / (1.0 + rician.kappa_ru));
        const double w_nlos = l_nlos * std::sqrt(1.0 / (1.0 + rician.kappa_ru));
        const auto a_ris = steering_vector(array_angle(geometry.ris, p, kRisAxis), n, dl);
        for (std::size_t i = 0; i < n; ++i) {
            out.h_ru(u, i) = w_los * a_ris[i] + w_nlos * rng.complex_normal();
        }
    }
    return out;
}

void write_dump(const ChannelSet& channels, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << channels.n() << ' ' << channels.m() << ' ' << channels.k() << ' ' << channels.seed
       << '\n';
    auto rows = [&os](const ComplexTensor& t) {
        for (std::size_t r = 0; r < t.rows(); ++r) {
            for (std::size_t c = 0; c < t.cols(); ++c) {
                if (c != 0) os << ' ';
                os << fmt17(t(r, c).real()) << ' ' << fmt17(t(r, c).imag());
            }
            os << '\n';
        }
    };
    rows(channels.h_br);
    rows(channels.h_ru);
    if (!os) throw IoError("write failed for " + path.string());
}

ChannelSet read_dump(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    std::size_t n = 0, m = 0, k = 0;
    ChannelSet out;
    if (!(is >> n >> m >> k >> out.seed) || n == 0 || m == 0 || k == 0) {
        throw IoError(path.string() + ": malformed header");
    }
    auto read = [&](std::size_t rows, std::size_t cols) {
        ComplexTensor t = ComplexTensor::matrix(rows, cols);
        for (auto& z : t.data()) {
            double re = 0.0, im = 0.0;
            if (!(is >> re >> im)) throw IoError(path.string() + ": truncated matrix data");
            z = cplx{re, im};
        }
        return t;
    };
    out.h_br = read(n, m);
    out.h_ru = read(k, n);
    return out;
}

} // namespace gamn::channel
