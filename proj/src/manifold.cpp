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

#include "gamn/manifold.hpp"

#include "gamn/error.hpp"

#include <cmath>

namespace gamn::manifold {

namespace {

void check_same_shape(const char* what, const ComplexTensor& x, const ComplexTensor& g)
{
    if (x.shape() != g.shape()) {
        throw ShapeError(std::string(what) + ": point " + shape_string(x.shape())
                         + " vs vector " + shape_string(g.shape()));
    }
}

void check_on(const Manifold& mf, const ComplexTensor& x)
{
    if (!mf.contains(x)) {
        throw OffManifoldError(std::string("point is not on the ") + kind_name(mf.kind)
                               + " manifold");
    }
}

// Number of factors sharing one second-moment entry.
std::size_t moment_slots(const Manifold& mf, const Shape& shape)
{
    return mf.kind == Kind::PowerSphere ? 1 : shape_size(shape);
}

} // namespace

const char* kind_name(Kind kind) noexcept
{
    switch (kind) {
    case Kind::CircleProduct: return "circle-product";
    case Kind::PowerSphere: return "power-sphere";
    case Kind::Euclidean: return "euclidean";
    }
    return "?";
}

bool Manifold::contains(const ComplexTensor& x, double tol) const
{
    switch (kind) {
    case Kind::CircleProduct:
        for (const auto& z : x.data()) {
            if (std::abs(std::abs(z) - 1.0) > tol) return false;
        }
        return true;
    case Kind::PowerSphere:
        return std::abs(squared_norm(x) - power) <= tol * power;
    case Kind::Euclidean:
        return x.all_finite();
    }
    return false;
}

ComplexTensor tangent_project_unchecked(const Manifold& mf, const ComplexTensor& x,
                                        const ComplexTensor& g)
{
    check_same_shape("tangent_project", x, g);
    ComplexTensor v = g;
    switch (mf.kind) {
    case Kind::CircleProduct:
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r2 = std::norm(x[i]);
            if (r2 == 0.0) continue;
            const double radial = (std::conj(x[i]) * g[i]).real() / r2;
            v[i] = g[i] - radial * x[i];
        }
        break;
    case Kind::PowerSphere: {
        const double r2 = squared_norm(x);
        if (r2 == 0.0) break;
        const double radial = real_inner(x, g) / r2;
        for (std::size_t i = 0; i < x.size(); ++i) v[i] = g[i] - radial * x[i];
        break;
    }
    case Kind::Euclidean:
        break;
    }
    return v;
}

ComplexTensor tangent_project(const Manifold& mf, const ComplexTensor& x, const ComplexTensor& g)
{
    check_same_shape("tangent_project", x, g);
    check_on(mf, x);
    return tangent_project_unchecked(mf, x, g);
}

ComplexTensor retract(const Manifold& mf, const ComplexTensor& x, const ComplexTensor& v)
{
    check_same_shape("retract", x, v);
    ComplexTensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += v[i];
    switch (mf.kind) {
    case Kind::CircleProduct:
        for (auto& z : y.data()) {
            const double r = std::abs(z);
            if (r == 0.0) throw DegenerateRetractionError("retract: x + v vanished on the circle");
            z /= r;
        }
        break;
    case Kind::PowerSphere: {
        const double r = std::sqrt(squared_norm(y));
        if (r == 0.0) throw DegenerateRetractionError("retract: x + v vanished on the sphere");
        const double s = std::sqrt(mf.power) / r;
        for (auto& z : y.data()) z *= s;
        break;
    }
    case Kind::Euclidean:
        break;
    }
    return y;
}

ComplexTensor normalize(const Manifold& mf, const ComplexTensor& x)
{
    return retract(mf, x, ComplexTensor(x.shape()));
}

RadamState RadamState::fresh(const Manifold& mf, const Shape& shape, RadamConfig config)
{
    RadamState s;
    s.m = ComplexTensor(shape);
    s.v.assign(moment_slots(mf, shape), 0.0);
    s.config = config;
    return s;
}

void radam_step(const Manifold& mf, ComplexTensor& x, const ComplexTensor& g, RadamState& state,
                double lr)
{
    check_same_shape("radam_step", x, g);
    if (state.m.shape() != x.shape() || state.v.size() != moment_slots(mf, x.shape())) {
        throw ShapeError("radam_step: optimizer state does not match point "
                         + shape_string(x.shape()));
    }
    const auto& c = state.config;
    const ComplexTensor rg = tangent_project(mf, x, g);

    state.step += 1;
    const double t = static_cast<double>(state.step);
    for (std::size_t i = 0; i < rg.size(); ++i) {
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * rg[i];
    }
    if (mf.kind == Kind::PowerSphere) {
        state.v[0] = c.beta2 * state.v[0] + (1.0 - c.beta2) * squared_norm(rg);
    } else {
        for (std::size_t i = 0; i < rg.size(); ++i) {
            state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * std::norm(rg[i]);
        }
    }

    const double bc1 = 1.0 - std::pow(c.beta1, t);
    const double bc2 = 1.0 - std::pow(c.beta2, t);
    ComplexTensor step(x.shape());
    for (std::size_t i = 0; i < rg.size(); ++i) {
        const double vi = mf.kind == Kind::PowerSphere ? state.v[0] : state.v[i];
        const cplx m_hat = state.m[i] / bc1;
        const double v_hat = vi / bc2;
        step[i] = -lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }

    x = retract(mf, x, step);
    if (mf.kind != Kind::Euclidean) state.m = tangent_project_unchecked(mf, x, state.m);
}

} // namespace gamn::manifold
