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

#pragma once

#include "gamn/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace testing {

// Test inputs come from std::mt19937_64 directly, not from the library's
// own Rng, so generator bugs cannot hide behind shared code.
inline gamn::ComplexTensor random_tensor(std::mt19937_64& gen, gamn::Shape shape,
                                         double scale = 1.0)
{
    std::normal_distribution<double> nd(0.0, scale);
    gamn::ComplexTensor t(std::move(shape));
    for (auto& z : t.data()) z = {nd(gen), nd(gen)};
    return t;
}

inline gamn::ComplexTensor random_real(std::mt19937_64& gen, gamn::Shape shape)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    gamn::ComplexTensor t(std::move(shape));
    for (auto& z : t.data()) z = {nd(gen), 0.0};
    return t;
}

inline gamn::ComplexTensor random_phases(std::mt19937_64& gen, std::size_t n)
{
    std::uniform_real_distribution<double> ud(0.0, 2.0 * 3.141592653589793);
    gamn::ComplexTensor t(gamn::Shape{n});
    for (auto& z : t.data()) z = std::polar(1.0, ud(gen));
    return t;
}

inline double max_abs_diff(const gamn::ComplexTensor& a, const gamn::ComplexTensor& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testing
