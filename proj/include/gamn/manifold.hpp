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

// Geometry of the phase-shift and precoder constraint sets, and Riemannian
// ADAM on top of it.
//
// CircleProduct: vectors whose entries all have unit modulus.
// PowerSphere:   matrices with squared Frobenius norm equal to P.
// Euclidean:     no constraint; RADAM reduces to plain ADAM.
//
// Tangent vectors and gradients use the real inner product
// Re(sum conj(a) b), i.e. complex arrays are read as real vectors of twice
// the length.

#pragma once

#include "gamn/tensor.hpp"

#include <cstdint>
#include <vector>

namespace gamn::manifold {

enum class Kind : std::uint8_t { CircleProduct, PowerSphere, Euclidean };

const char* kind_name(Kind kind) noexcept;

struct Manifold {
    Kind kind = Kind::Euclidean;
    double power = 1.0; // PowerSphere only: squared radius

    static Manifold circle_product() { return {Kind::CircleProduct, 1.0}; }
    static Manifold power_sphere(double p) { return {Kind::PowerSphere, p}; }
    static Manifold euclidean() { return {Kind::Euclidean, 1.0}; }

    bool contains(const ComplexTensor& x, double tol = 1e-9) const;
};

ComplexTensor tangent_project(const Manifold& mf, const ComplexTensor& x, const ComplexTensor& g);

// Same formula without the on-manifold check; for points that sit off the
// manifold between retractions the normal direction is taken along x.
ComplexTensor tangent_project_unchecked(const Manifold& mf, const ComplexTensor& x,
                                        const ComplexTensor& g);

ComplexTensor retract(const Manifold& mf, const ComplexTensor& x, const ComplexTensor& v);

// Projection back onto the manifold, i.e. retract(x, 0) for any x.
ComplexTensor normalize(const Manifold& mf, const ComplexTensor& x);

struct RadamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct RadamState {
    ComplexTensor m;       // first moment, tangent at the current point
    std::vector<double> v; // second moment; one entry per factor of the product
    std::uint64_t step = 0;
    RadamConfig config;

    static RadamState fresh(const Manifold& mf, const Shape& shape, RadamConfig config = {});
};

/// One Riemannian ADAM step on x minimizing the function whose ambient
/// gradient is g. The first moment is carried to the new tangent space by
/// projection.
void radam_step(const Manifold& mf, ComplexTensor& x, const ComplexTensor& g, RadamState& state,
                double lr);

} // namespace gamn::manifold
