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

// Reverse-mode differentiation of real-valued losses built from complex
// tensors.
//
// Gradients follow the convention g = 2 * dL/d(conj z). For a real loss
// this makes Re(g) = dL/dRe(z) and Im(g) = dL/dIm(z), so a gradient can be
// used directly as the Euclidean gradient of the real parameterization.
//
// The tape is define-by-run: every op appends a node holding its forward
// value. A tape belongs to one thread; finished GradientMaps are plain
// values.

#pragma once

#include "gamn/tensor.hpp"

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace gamn::cdiff {

enum class Op : std::uint8_t {
    Variable,
    Constant,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Scale,      // times a constant complex scalar
    AddConst,   // plus a constant complex scalar
    Conj,
    Real,
    Imag,
    Abs2,
    Log2,
    Log2p1,     // log2(1 + x), accurate for small x
    Sqrt,
    ExpI,       // exp(i * x)
    UnitNormalize,
    Matmul,
    Transpose,
    Adjoint,
    Sum,
    SumRows,
    Diag,
    DiagEmbed,
    Reshape,
    Slice,
    Concat,
    CRelu,
    Relu,
    SplitTanh,
};

const char* op_name(Op op) noexcept;

// Real leaves only ever move along the real axis: their gradient is
// reported with the imaginary part dropped.
enum class Domain : std::uint8_t { Complex, Real };

struct OpAttrs {
    cplx scalar{0.0, 0.0};
    Shape shape{};
    std::size_t start = 0;
    std::size_t length = 0;
};

class Tape;

struct Var {
    Tape* tape = nullptr;
    int id = -1;

    const ComplexTensor& value() const;
    const Shape& shape() const { return value().shape(); }
};

struct TapeNode {
    Op op;
    int lhs = -1;
    int rhs = -1;
    OpAttrs attrs;
    Domain domain = Domain::Complex;
    ComplexTensor value;
};

class GradientMap {
public:
    GradientMap() = default;
    explicit GradientMap(std::vector<ComplexTensor> grads) : grads_(std::move(grads)) {}

    const ComplexTensor& operator[](Var v) const { return grads_.at(v.id); }
    const ComplexTensor& at(int id) const { return grads_.at(id); }
    std::size_t size() const noexcept { return grads_.size(); }

private:
    std::vector<ComplexTensor> grads_;
};

class Tape {
public:
    Var variable(ComplexTensor value, Domain domain = Domain::Complex);
    Var constant(ComplexTensor value);

    // Appends op(inputs) after checking the op's shape and domain rules.
    Var apply(Op op, std::initializer_list<Var> inputs, OpAttrs attrs = {});

    const ComplexTensor& value(Var v) const { return nodes_.at(v.id).value; }
    const TapeNode& node(int id) const { return nodes_.at(id); }
    std::size_t size() const noexcept { return nodes_.size(); }

    // Gradient of a real scalar loss with respect to every node. Entries
    // for nodes the loss does not depend on are zero. The tape is left
    // untouched.
    GradientMap backward(Var loss) const;

private:
    std::vector<TapeNode> nodes_;
};

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);

Var scale(Var a, cplx s);
Var add_const(Var a, cplx s);
Var conj(Var a);
Var real(Var a);
Var imag(Var a);
Var abs2(Var a);
Var log2(Var a);
Var log2p1(Var a);
Var sqrt(Var a);
Var exp_i(Var a);
Var unit_normalize(Var a);
Var matmul(Var a, Var b);
Var transpose(Var a);
Var adjoint(Var a);
Var sum(Var a);
Var sum_rows(Var a);
Var diag(Var a);
Var diag_embed(Var a);
Var reshape(Var a, Shape shape);
Var slice(Var a, std::size_t start, std::size_t length);
Var concat(Var a, Var b);
Var crelu(Var a);
Var relu(Var a);
Var split_tanh(Var a);

/// Builds a real scalar loss on a fresh tape from one leaf per point.
using GraphBuilder = std::function<Var(Tape&, const std::vector<Var>&)>;

struct GradCheckInput {
    ComplexTensor point;
    Domain domain = Domain::Complex;
};

/// Maximum relative error between backward() and central differences.
///
/// Each real coordinate (real and imaginary part separately, real part
/// only for Domain::Real) is perturbed by eps * (1 + |entry|). The error of
/// one coordinate is |analytic - numeric| / max(|analytic|, |numeric|,
/// 1e-3 * largest magnitude seen over all coordinates), so coordinates whose
/// true derivative vanishes are judged against the overall gradient scale.
double grad_check(const GraphBuilder& f, const std::vector<GradCheckInput>& inputs,
                  double eps);

double grad_check(const std::function<Var(Tape&, Var)>& f, const ComplexTensor& point,
                  double eps);

} // namespace gamn::cdiff
