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

#include "gamn/cdiff.hpp"
#include "gamn/error.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <functional>
#include <string>

using namespace gamn;
using namespace gamn::cdiff;
using testing::random_tensor;

namespace {

// Re(sum(c .* y)) with a fixed random c: a real scalar that sees every
// output entry along a random complex direction.
Var probe(Tape& t, Var y, std::uint64_t seed = 99)
{
    std::mt19937_64 gen(seed);
    return real(sum(y * t.constant(random_tensor(gen, y.shape()))));
}

struct OpCase {
    const char* name;
    std::vector<Shape> shapes;
    GraphBuilder build;
    Domain domain = Domain::Complex;
};

std::vector<OpCase> op_cases()
{
    const Shape v3{3}, m23{2, 3}, m34{3, 4}, m33{3, 3};
    return {
        {"add", {v3, v3}, [](Tape& t, const auto& x) { return probe(t, x[0] + x[1]); }},
        {"sub", {v3, v3}, [](Tape& t, const auto& x) { return probe(t, x[0] - x[1]); }},
        {"mul", {v3, v3}, [](Tape& t, const auto& x) { return probe(t, x[0] * x[1]); }},
        {"mul_broadcast", {Shape{1}, v3},
         [](Tape& t, const auto& x) { return probe(t, x[0] * x[1]); }},
        {"div", {v3, v3},
         [](Tape& t, const auto& x) { return probe(t, x[0] / add_const(x[1], 3.0)); }},
        {"neg", {v3}, [](Tape& t, const auto& x) { return probe(t, -x[0]); }},
        {"scale", {v3}, [](Tape& t, const auto& x) { return probe(t, scale(x[0], {0.3, -1.2})); }},
        {"add_const", {v3},
         [](Tape& t, const auto& x) { return probe(t, abs2(add_const(x[0], {1.0, 2.0}))); }},
        {"conj", {v3}, [](Tape& t, const auto& x) { return probe(t, conj(x[0])); }},
        {"real", {v3}, [](Tape& t, const auto& x) { return probe(t, real(x[0])); }},
        {"imag", {v3}, [](Tape& t, const auto& x) { return probe(t, imag(x[0])); }},
        {"abs2", {v3}, [](Tape& t, const auto& x) { return probe(t, abs2(x[0])); }},
        {"log2", {v3},
         [](Tape& t, const auto& x) { return probe(t, log2(add_const(abs2(x[0]), 0.5))); }},
        {"log2p1", {v3}, [](Tape& t, const auto& x) { return probe(t, log2p1(abs2(x[0]))); }},
        {"sqrt", {v3},
         [](Tape& t, const auto& x) { return probe(t, sqrt(add_const(abs2(x[0]), 0.5))); }},
        {"exp_i", {v3}, [](Tape& t, const auto& x) { return probe(t, exp_i(x[0])); }},
        {"unit_normalize", {v3},
         [](Tape& t, const auto& x) { return probe(t, unit_normalize(add_const(x[0], 2.0))); }},
        {"matmul", {m23, m34}, [](Tape& t, const auto& x) { return probe(t, matmul(x[0], x[1])); }},
        {"transpose", {m23}, [](Tape& t, const auto& x) { return probe(t, transpose(x[0])); }},
        {"adjoint", {m23}, [](Tape& t, const auto& x) { return probe(t, adjoint(x[0])); }},
        {"sum", {m23}, [](Tape& t, const auto& x) { return probe(t, sum(x[0])); }},
        {"sum_rows", {m23}, [](Tape& t, const auto& x) { return probe(t, sum_rows(x[0])); }},
        {"diag", {m33}, [](Tape& t, const auto& x) { return probe(t, diag(x[0])); }},
        {"diag_embed", {v3}, [](Tape& t, const auto& x) { return probe(t, diag_embed(x[0])); }},
        {"reshape", {m23},
         [](Tape& t, const auto& x) { return probe(t, reshape(x[0], Shape{3, 2})); }},
        {"slice", {Shape{6}}, [](Tape& t, const auto& x) { return probe(t, slice(x[0], 2, 3)); }},
        {"concat", {v3, Shape{2}},
         [](Tape& t, const auto& x) { return probe(t, concat(x[0], x[1])); }},
        {"crelu", {v3}, [](Tape& t, const auto& x) { return probe(t, crelu(x[0])); }},
        {"relu", {v3}, [](Tape& t, const auto& x) { return probe(t, relu(x[0])); }},
        {"split_tanh", {v3}, [](Tape& t, const auto& x) { return probe(t, split_tanh(x[0])); }},
        {"real_leaf_matmul", {m23, Shape{3, 1}},
         [](Tape& t, const auto& x) { return probe(t, matmul(x[0], x[1])); }, Domain::Real},
    };
}

} // namespace

TEST_CASE("every op passes grad_check at 10 random points")
{
    std::mt19937_64 gen(2024);
    for (const auto& c : op_cases()) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<GradCheckInput> inputs;
            for (const auto& s : c.shapes) {
                auto p = random_tensor(gen, s);
                if (c.domain == Domain::Real) {
                    for (auto& z : p.data()) z = z.real();
                }
                inputs.push_back({p, c.domain});
            }
            const double err = grad_check(c.build, inputs, 1e-5);
            INFO("op " << c.name << " trial " << trial);
            CHECK(err < 1e-5);
        }
    }
}

TEST_CASE("forward examples")
{
    Tape t;
    Var a = t.variable(ComplexTensor::matrix(2, 3));
    Var b = t.variable(ComplexTensor::matrix(3, 4));
    CHECK(matmul(a, b).shape() == Shape{2, 4});

    Var z = t.variable(ComplexTensor::scalar({3.0, 4.0}));
    CHECK(abs2(z).value().item() == cplx{25.0, 0.0});

    Var x = t.variable(ComplexTensor::scalar(0.0));
    CHECK(exp_i(x).value().item() == cplx{1.0, 0.0});
}

TEST_CASE("backward examples follow g = 2 df/dconj(z)")
{
    {
        Tape t;
        Var z = t.variable(ComplexTensor::scalar({1.0, 1.0}));
        auto g = t.backward(sum(abs2(z)));
        CHECK(g[z].item() == cplx{2.0, 2.0});
    }
    {
        Tape t;
        Var z = t.variable(ComplexTensor::scalar({-0.7, 2.5}));
        auto g = t.backward(real(z));
        CHECK(g[z].item() == cplx{1.0, 0.0});
    }
    {
        // |z|^4 at z = 1: gradient 4|z|^2 z = 4
        Tape t;
        Var z = t.variable(ComplexTensor::scalar(1.0));
        Var a = abs2(z);
        auto g = t.backward(a * a);
        CHECK(std::abs(g[z].item() - cplx{4.0, 0.0}) < 1e-14);
        CHECK(grad_check([](Tape&, Var v) { return abs2(v) * abs2(v); },
                         ComplexTensor::scalar(1.0), 1e-5)
              < 1e-6);
    }
}

TEST_CASE("grad_check of a linear function is exact to rounding")
{
    std::mt19937_64 gen(5);
    const auto p = random_tensor(gen, {7});
    CHECK(grad_check([](Tape&, Var v) { return real(sum(v)); }, p, 1e-5) <= 1e-10);
}

TEST_CASE("grad_check rejects eps outside [1e-8, 1e-3]")
{
    auto f = [](Tape&, Var v) { return real(sum(v)); };
    const auto p = ComplexTensor::scalar(1.0);
    CHECK_THROWS(grad_check(f, p, 1e-9));
    CHECK_THROWS(grad_check(f, p, 1e-2));
}

TEST_CASE("backward is linear in the loss")
{
    std::mt19937_64 gen(11);
    const auto p = random_tensor(gen, {4});
    const double alpha = 0.7, beta = -1.9;

    auto f = [](Var v) { return real(sum(abs2(v) * v)); };
    auto g = [](Var v) { return log2(add_const(sum(abs2(v)), 1.0)); };

    Tape t;
    Var x = t.variable(p);
    const auto gf = t.backward(f(x))[x];
    const auto gg = t.backward(g(x))[x];
    const auto gc = t.backward(scale(f(x), alpha) + scale(g(x), beta))[x];
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(std::abs(gc[i] - (alpha * gf[i] + beta * gg[i])) < 1e-10);
    }
}

TEST_CASE("replaying backward gives bit-identical gradients")
{
    std::mt19937_64 gen(3);
    Tape t;
    Var a = t.variable(random_tensor(gen, {3, 3}));
    Var b = t.variable(random_tensor(gen, {3, 1}));
    Var loss = log2p1(sum(abs2(matmul(a, b))));
    const std::size_t before = t.size();
    const auto g1 = t.backward(loss);
    const auto g2 = t.backward(loss);
    CHECK(t.size() == before);
    CHECK(g1[a] == g2[a]);
    CHECK(g1[b] == g2[b]);
}

TEST_CASE("unreachable leaves get zero gradient")
{
    Tape t;
    Var a = t.variable(ComplexTensor::scalar({1.0, 2.0}));
    Var b = t.variable(ComplexTensor::vector({{1.0, 0.0}, {2.0, 0.0}}));
    const auto g = t.backward(abs2(a));
    CHECK(g[b] == ComplexTensor(Shape{2}));
}

TEST_CASE("real leaves report real gradients")
{
    Tape t;
    Var r = t.variable(ComplexTensor::scalar(2.0), Domain::Real);
    Var c = t.constant(ComplexTensor::scalar({0.0, 1.0}));
    const auto g = t.backward(abs2(r * c + r));
    CHECK(g[r].item().imag() == 0.0);
    // |r(1 + i)|^2 = 2 r^2, derivative 4 r = 8
    CHECK(std::abs(g[r].item().real() - 8.0) < 1e-14);
}

TEST_CASE("errors")
{
    Tape t;
    Var a = t.variable(ComplexTensor::matrix(2, 3));
    Var b = t.variable(ComplexTensor::matrix(2, 3));
    try {
        (void)matmul(a, b);
        FAIL("expected a shape error");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("matmul") != std::string::npos);
        CHECK(msg.find("2x3") != std::string::npos);
    }
    CHECK_THROWS_AS(log2(t.variable(ComplexTensor::scalar(-1.0))), DomainError);
    CHECK_THROWS_AS(log2(t.variable(ComplexTensor::scalar(0.0))), DomainError);
    CHECK_THROWS_AS(log2(t.variable(ComplexTensor::scalar({1.0, 1.0}))), DomainError);
    CHECK_THROWS_AS(t.backward(a), NonRealLossError);
    CHECK_THROWS_AS(t.backward(t.variable(ComplexTensor::scalar({1.0, 0.5}))), NonRealLossError);
    CHECK_THROWS_AS(unit_normalize(t.variable(ComplexTensor::scalar(0.0))), DomainError);
}

TEST_CASE("the tape is a DAG in topological order")
{
    std::mt19937_64 gen(8);
    Tape t;
    Var a = t.variable(random_tensor(gen, {2, 2}));
    Var b = t.variable(random_tensor(gen, {2, 1}));
    (void)real(sum(abs2(matmul(a, b) + b)));
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& n = t.node(static_cast<int>(i));
        CHECK(n.lhs < static_cast<int>(i));
        CHECK(n.rhs < static_cast<int>(i));
    }
}
