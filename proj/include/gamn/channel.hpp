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

// Seeded Rician channels for a BS -> RIS -> users downlink.

#pragma once

#include "gamn/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gamn::channel {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

double distance(Point a, Point b) noexcept;

/// Positions in meters. The BS array runs along the y axis and the RIS
/// array along the x axis, both uniform linear.
struct Geometry {
    Point bs{0.0, 10.0};
    Point ris{100.0, 0.0};
    Point user_center{100.0, 15.0};
    double user_radius = 5.0;
    double carrier_hz = 28e9;
    double antenna_spacing = 0.5; // wavelengths

    void validate() const;
};

// PL(d) = intercept + distance_slope * log10(d) + freq_slope * log10(f_GHz), dB.
struct PathlossModel {
    double intercept = 28.0;
    double distance_slope = 22.0;
    double freq_slope = 20.0;
};

struct RicianParams {
    double kappa_br = 10.0;
    double kappa_ru = 10.0;
    PathlossModel los{28.0, 22.0, 20.0};
    PathlossModel nlos{32.4, 23.1, 20.0};

    void validate() const;
};

struct ChannelSet {
    ComplexTensor h_br; // N x M, BS -> RIS
    ComplexTensor h_ru; // K x N, row k is the transpose of user k's RIS channel
    std::vector<Point> user_positions;
    std::uint64_t seed = 0;

    std::size_t n() const noexcept { return h_br.rows(); }
    std::size_t m() const noexcept { return h_br.cols(); }
    std::size_t k() const noexcept { return h_ru.rows(); }
};

/// exp(i 2 pi spacing n sin(angle)) for n = 0..count-1.
std::vector<cplx> steering_vector(double angle, std::size_t count, double spacing);

double pathloss_db(double distance_m, double freq_hz, const PathlossModel& model);
double pathloss_db(double distance_m, bool los, double freq_hz, const RicianParams& params = {});

// Linear amplitude sqrt(10^(-PL/10)).
double db_to_amplitude(double loss_db) noexcept;

ChannelSet generate(std::uint64_t seed, const Geometry& geometry, const RicianParams& rician,
                    std::size_t n, std::size_t m, std::size_t k);

// Plain-text dump: header "N M K seed", then H_BR rows followed by H_RU
// rows, each row a run of "re im" pairs at 17 significant digits.
void write_dump(const ChannelSet& channels, const std::filesystem::path& path);
ChannelSet read_dump(const std::filesystem::path& path);

} // namespace gamn::channel
