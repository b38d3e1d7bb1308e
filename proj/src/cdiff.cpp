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

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gamn::cdiff {

namespace {

constexpr cplx kI{0.0, 1.0};

bool is_binary(Op op)
{
    switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Matmul:
    case Op::Concat:
        return true;
    default:
        return false;
    }
}

[[noreturn]] void shape_fail(Op op, const Shape& a, const Shape& b)
{
    throw ShapeError(std::string(op_name(op)) + ": incompatible shapes " + shape_string(a)
                     + " and " + shape_string(b));
}

[[noreturn]] void shape_fail(Op op, const Shape& a, const std::string& why)
{
    throw ShapeError(std::string(op_name(op)) + ": shape " + shape_string(a) + " " + why);
}

bool is_positive_real(cplx z)
{
    return z.real() > 0.0 && std::abs(z.imag()) <= 1e-12 * (1.0 + std::abs(z.real()));
}

// Elementwise binary op with size-1 broadcasting on either side.
template <class F>
ComplexTensor broadcast_binary(Op op, const ComplexTensor& a, const ComplexTensor& b, F f)
{
    if (a.shape() == b.shape()) {
        ComplexTensor out(a.shape());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
        return out;
    }
    if (b.size() == 1) {
        ComplexTensor out(a.shape());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[0]);
        return out;
    }
    if (a.size() == 1) {
        ComplexTensor out(b.shape());
        for (std::size_t i = 0; i < b.size(); ++i) out[i] = f(a[0], b[i]);
        return out;
    }
    shape_fail(op, a.shape(), b.shape());
}

template <class F>
ComplexTensor map(const ComplexTensor& a, F f)
{
    ComplexTensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
    return out;
}

ComplexTensor matmul_values(const ComplexTensor& a, const ComplexTensor& b)
{
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    ComplexTensor out(Shape{m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const cplx aip = a[i * k + p];
            if (aip == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aip * b[p * n + j];
        }
    }
    return out;
}

// a^H b without materializing a^H.
ComplexTensor adjoint_matmul(const ComplexTensor& a, const ComplexTensor& b)
{
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    ComplexTensor out(Shape{m, n});
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t i = 0; i < m; ++i) {
            const cplx aip = std::conj(a[p * m + i]);
            if (aip == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aip * b[p * n + j];
        }
    }
    return out;
}

// a b^H without materializing b^H.
ComplexTensor matmul_adjoint(const ComplexTensor& a, const ComplexTensor& b)
{
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    ComplexTensor out(Shape{m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cplx s{};
            for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * std::conj(b[j * k + p]);
            out[i * n + j] = s;
        }
    }
    return out;
}

ComplexTensor transpose_values(const ComplexTensor& a, bool conjugate)
{
    const std::size_t r = a.rows(), c = a.cols();
    ComplexTensor out(Shape{c, r});
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            out[j * r + i] = conjugate ? std::conj(a[i * c + j]) : a[i * c + j];
        }
    }
    return out;
}

// Accumulate g into the adjoint of an operand that may have been broadcast.
void accumulate(ComplexTensor& adj, const ComplexTensor& g)
{
    if (adj.size() == g.size()) {
        for (std::size_t i = 0; i < g.size(); ++i) adj[i] += g[i];
        return;
    }
    cplx s{};
    for (const auto& z : g.data()) s += z;
    adj[0] += s;
}

double relu_d(double x) { return x > 0.0 ? 1.0 : 0.0; }

ComplexTensor forward_value(Op op, const ComplexTensor* a, const ComplexTensor* b,
                            const OpAttrs& attrs)
{
    switch (op) {
    case Op::Add:
        return broadcast_binary(op, *a, *b, [](cplx x, cplx y) { return x + y; });
    case Op::Sub:
        return broadcast_binary(op, *a, *b, [](cplx x, cplx y) { return x - y; });
    case Op::Mul:
        return broadcast_binary(op, *a, *b, [](cplx x, cplx y) { return x * y; });
    case Op::Div:
        for (const auto& z : b->data()) {
            if (z == cplx{}) throw DomainError("div: division by zero");
        }
        return broadcast_binary(op, *a, *b, [](cplx x, cplx y) { return x / y; });
    case Op::Neg:
        return map(*a, [](cplx x) { return -x; });
    case Op::Scale:
        return map(*a, [s = attrs.scalar](cplx x) { return x * s; });
    case Op::AddConst:
        return map(*a, [s = attrs.scalar](cplx x) { return x + s; });
    case Op::Conj:
        return map(*a, [](cplx x) { return std::conj(x); });
    case Op::Real:
        return map(*a, [](cplx x) { return cplx{x.real(), 0.0}; });
    case Op::Imag:
        return map(*a, [](cplx x) { return cplx{x.imag(), 0.0}; });
    case Op::Abs2:
        return map(*a, [](cplx x) { return cplx{std::norm(x), 0.0}; });
    case Op::Log2:
        for (const auto& z : a->data()) {
            if (!is_positive_real(z)) {
                throw DomainError("log2: input must be positive real, got ("
                                  + std::to_string(z.real()) + ", " + std::to_string(z.imag())
                                  + ")");
            }
        }
        return map(*a, [](cplx x) { return cplx{std::log2(x.real()), 0.0}; });
    case Op::Log2p1:
        for (const auto& z : a->data()) {
            if (!is_positive_real(z + 1.0)) {
                throw DomainError("log2p1: input must be real and > -1, got ("
                                  + std::to_string(z.real()) + ", " + std::to_string(z.imag())
                                  + ")");
            }
        }
        return map(*a, [](cplx x) { return cplx{std::log1p(x.real()) / std::numbers::ln2, 0.0}; });
    case Op::Sqrt:
        for (const auto& z : a->data()) {
            if (!is_positive_real(z)) throw DomainError("sqrt: input must be positive real");
        }
        return map(*a, [](cplx x) { return cplx{std::sqrt(x.real()), 0.0}; });
    case Op::ExpI:
        return map(*a, [](cplx x) { return std::exp(kI * x); });
    case Op::UnitNormalize:
        for (const auto& z : a->data()) {
            if (z == cplx{}) throw DomainError("unit_normalize: zero entry");
        }
        return map(*a, [](cplx x) { return x / std::abs(x); });
    case Op::Matmul:
        return matmul_values(*a, *b);
    case Op::Transpose:
        return transpose_values(*a, false);
    case Op::Adjoint:
        return transpose_values(*a, true);
    case Op::Sum: {
        cplx s{};
        for (const auto& z : a->data()) s += z;
        return ComplexTensor::scalar(s);
    }
    case Op::SumRows: {
        ComplexTensor out(Shape{a->rows()});
        for (std::size_t i = 0; i < a->rows(); ++i) {
            for (std::size_t j = 0; j < a->cols(); ++j) out[i] += (*a)(i, j);
        }
        return out;
    }
    case Op::Diag: {
        ComplexTensor out(Shape{a->rows()});
        for (std::size_t i = 0; i < a->rows(); ++i) out[i] = (*a)(i, i);
        return out;
    }
    case Op::DiagEmbed: {
        const std::size_t n = a->size();
        ComplexTensor out(Shape{n, n});
        for (std::size_t i = 0; i < n; ++i) out[i * n + i] = (*a)[i];
        return out;
    }
    case Op::Reshape: {
        auto d = a->data();
        return ComplexTensor(attrs.shape, std::vector<cplx>(d.begin(), d.end()));
    }
    case Op::Slice: {
        auto d = a->data().subspan(attrs.start, attrs.length);
        return ComplexTensor(Shape{attrs.length}, std::vector<cplx>(d.begin(), d.end()));
    }
    case Op::Concat: {
        std::vector<cplx> v(a->data().begin(), a->data().end());
        v.insert(v.end(), b->data().begin(), b->data().end());
        const std::size_t n = v.size();
        return ComplexTensor(Shape{n}, std::move(v));
    }
    case Op::CRelu:
        return map(*a, [](cplx x) {
            return cplx{std::max(x.real(), 0.0), std::max(x.imag(), 0.0)};
        });
    case Op::Relu:
        return map(*a, [](cplx x) { return cplx{std::max(x.real(), 0.0), 0.0}; });
    case Op::SplitTanh:
        return map(*a, [](cplx x) { return cplx{std::tanh(x.real()), std::tanh(x.imag())}; });
    case Op::Variable:
    case Op::Constant:
        break;
    }
    throw Error(std::string("apply: op ") + op_name(op) + " cannot be applied");
}

void check_shapes(Op op, const ComplexTensor* a, const ComplexTensor* b, const OpAttrs& attrs)
{
    switch (op) {
    case Op::Matmul:
        if (a->rank() != 2 || b->rank() != 2 || a->cols() != b->rows()) {
            shape_fail(op, a->shape(), b->shape());
        }
        break;
    case Op::Transpose:
    case Op::Adjoint:
        if (a->rank() != 2) shape_fail(op, a->shape(), "is not a matrix");
        break;
    case Op::SumRows:
        if (a->rank() != 2) shape_fail(op, a->shape(), "is not a matrix");
        break;
    case Op::Diag:
        if (a->rank() != 2 || a->rows() != a->cols()) shape_fail(op, a->shape(), "is not square");
        break;
    case Op::DiagEmbed:
        if (a->rank() > 2 || (a->rank() == 2 && a->cols() != 1 && a->rows() != 1)) {
            shape_fail(op, a->shape(), "is not a vector");
        }
        break;
    case Op::Reshape:
        if (shape_size(attrs.shape) != a->size()) shape_fail(op, a->shape(), attrs.shape);
        break;
    case Op::Slice:
        if (attrs.start + attrs.length > a->size() || attrs.length == 0) {
            shape_fail(op, a->shape(),
                       "cannot be sliced at [" + std::to_string(attrs.start) + ", "
                           + std::to_string(attrs.start + attrs.length) + ")");
        }
        break;
    default:
        break;
    }
}

} // namespace

const char* op_name(Op op) noexcept
{
    switch (op) {
    case Op::Variable: return "variable";
    case Op::Constant: return "constant";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Neg: return "neg";
    case Op::Scale: return "scale";
    case Op::AddConst: return "add_const";
    case Op::Conj: return "conj";
    case Op::Real: return "real";
    case Op::Imag: return "imag";
    case Op::Abs2: return "abs2";
    case Op::Log2: return "log2";
    case Op::Log2p1: return "log2p1";
    case Op::Sqrt: return "sqrt";
    case Op::ExpI: return "exp_i";
    case Op::UnitNormalize: return "unit_normalize";
    case Op::Matmul: return "matmul";
    case Op::Transpose: return "transpose";
    case Op::Adjoint: return "adjoint";
    case Op::Sum: return "sum";
    case Op::SumRows: return "sum_rows";
    case Op::Diag: return "diag";
    case Op::DiagEmbed: return "diag_embed";
    case Op::Reshape: return "reshape";
    case Op::Slice: return "slice";
    case Op::Concat: return "concat";
    case Op::CRelu: return "crelu";
    case Op::Relu: return "relu";
    case Op::SplitTanh: return "split_tanh";
    }
    return "?";
}

const ComplexTensor& Var::value() const
{
    return tape->value(*this);
}

Var Tape::variable(ComplexTensor value, Domain domain)
{
    if (domain == Domain::Real) {
        for (auto& z : value.data()) z = cplx{z.real(), 0.0};
    }
    nodes_.push_back(TapeNode{Op::Variable, -1, -1, {}, domain, std::move(value)});
    return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::constant(ComplexTensor value)
{
    nodes_.push_back(TapeNode{Op::Constant, -1, -1, {}, Domain::Complex, std::move(value)});
    return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::apply(Op op, std::initializer_list<Var> inputs, OpAttrs attrs)
{
    const std::size_t arity = is_binary(op) ? 2 : 1;
    if (op == Op::Variable || op == Op::Constant) {
        throw Error("apply: use variable() or constant() for leaves");
    }
    if (inputs.size() != arity) {
        throw Error(std::string(op_name(op)) + ": expected " + std::to_string(arity)
                    + " inputs, got " + std::to_string(inputs.size()));
    }
    for (const Var& v : inputs) {
        if (v.tape != this || v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
            throw Error(std::string(op_name(op)) + ": input does not belong to this tape");
        }
    }
    const int lhs = inputs.begin()->id;
    const int rhs = arity == 2 ? (inputs.begin() + 1)->id : -1;
    const ComplexTensor* a = &nodes_[lhs].value;
    const ComplexTensor* b = rhs >= 0 ? &nodes_[rhs].value : nullptr;

    check_shapes(op, a, b, attrs);
    ComplexTensor out = forward_value(op, a, b, attrs);
    nodes_.push_back(TapeNode{op, lhs, rhs, std::move(attrs), Domain::Complex, std::move(out)});
    return Var{this, static_cast<int>(nodes_.size() - 1)};
}

GradientMap Tape::backward(Var loss) const
{
    if (loss.tape != this) throw Error("backward: loss does not belong to this tape");
    const ComplexTensor& lv = nodes_.at(loss.id).value;
    if (lv.size() != 1) {
        throw NonRealLossError("backward: loss must be a scalar, shape is "
                               + shape_string(lv.shape()));
    }
    const cplx l = lv[0];
    if (std::abs(l.imag()) > 1e-9 * (1.0 + std::abs(l.real()))) {
        throw NonRealLossError("backward: loss has imaginary part " + std::to_string(l.imag()));
    }

    std::vector<ComplexTensor> adj;
    adj.reserve(nodes_.size());
    for (const auto& n : nodes_) adj.emplace_back(n.value.shape());
    adj[loss.id][0] = cplx{1.0, 0.0};

    for (int i = loss.id; i >= 0; --i) {
        const TapeNode& n = nodes_[i];
        const ComplexTensor& g = adj[i];
        if (n.op == Op::Variable || n.op == Op::Constant) continue;
        bool any = false;
        for (const auto& z : g.data()) {
            if (z != cplx{}) {
                any = true;
                break;
            }
        }
        if (!any) continue;

        const ComplexTensor& a = nodes_[n.lhs].value;
        ComplexTensor& ga = adj[n.lhs];
        const ComplexTensor& out = n.value;

        switch (n.op) {
        case Op::Add:
            accumulate(ga, g);
            accumulate(adj[n.rhs], g);
            break;
        case Op::Sub:
            accumulate(ga, g);
            accumulate(adj[n.rhs], map(g, [](cplx z) { return -z; }));
            break;
        case Op::Mul: {
            const ComplexTensor& b = nodes_[n.rhs].value;
            ComplexTensor da(g.shape()), db(g.shape());
            for (std::size_t k = 0; k < g.size(); ++k) {
                const cplx ak = a.size() == 1 ? a[0] : a[k];
                const cplx bk = b.size() == 1 ? b[0] : b[k];
                da[k] = g[k] * std::conj(bk);
                db[k] = g[k] * std::conj(ak);
            }
            accumulate(ga, da);
            accumulate(adj[n.rhs], db);
            break;
        }
        case Op::Div: {
            const ComplexTensor& b = nodes_[n.rhs].value;
            ComplexTensor da(g.shape()), db(g.shape());
            for (std::size_t k = 0; k < g.size(); ++k) {
                const cplx bk = b.size() == 1 ? b[0] : b[k];
                da[k] = g[k] * std::conj(1.0 / bk);
                db[k] = -g[k] * std::conj(out[k] / bk);
            }
            accumulate(ga, da);
            accumulate(adj[n.rhs], db);
            break;
        }
        case Op::Neg:
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] -= g[k];
            break;
        case Op::Scale:
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * std::conj(n.attrs.scalar);
            break;
        case Op::AddConst:
        case Op::Reshape:
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
            break;
        case Op::Conj:
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += std::conj(g[k]);
            break;
        case Op::Real:
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k].real();
            break;
        case Op::Imag:
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += kI * g[k].real();
            break;
        case Op::Abs2:
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += 2.0 * g[k].real() * a[k];
            break;
        case Op::Log2:
            for (std::size_t k = 0; k < g.size(); ++k) {
                ga[k] += g[k] * std::conj(1.0 / (a[k] * std::numbers::ln2));
            }
            break;
        case Op::Log2p1:
            for (std::size_t k = 0; k < g.size(); ++k) {
                ga[k] += g[k] * std::conj(1.0 / ((1.0 + a[k]) * std::numbers::ln2));
            }
            break;
        case Op::Sqrt:
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * std::conj(0.5 / out[k]);
            break;
        case Op::ExpI:
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * std::conj(kI * out[k]);
            break;
        case Op::UnitNormalize:
            // Only the component of g along i*z survives; the radial part is
            // annihilated by the normalization.
            for (std::size_t k = 0; k < g.size(); ++k) {
                const double t = (std::conj(out[k]) * g[k]).imag();
                ga[k] += kI * out[k] * (t / std::abs(a[k]));
            }
            break;
        case Op::Matmul: {
            const ComplexTensor& b = nodes_[n.rhs].value;
            accumulate(ga, matmul_adjoint(g, b));
            accumulate(adj[n.rhs], adjoint_matmul(a, g));
            break;
        }
        case Op::Transpose:
            accumulate(ga, transpose_values(g, false));
            break;
        case Op::Adjoint:
            accumulate(ga, transpose_values(g, true));
            break;
        case Op::Sum:
            for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += g[0];
            break;
        case Op::SumRows: {
            const std::size_t c = a.cols();
            for (std::size_t r = 0; r < a.rows(); ++r) {
                for (std::size_t j = 0; j < c; ++j) ga[r * c + j] += g[r];
            }
            break;
        }
        case Op::Diag: {
            const std::size_t c = a.cols();
            for (std::size_t r = 0; r < a.rows(); ++r) ga[r * c + r] += g[r];
            break;
        }
        case Op::DiagEmbed: {
            const std::size_t m = a.size();
            for (std::size_t r = 0; r < m; ++r) ga[r] += g[r * m + r];
            break;
        }
        case Op::Slice:
            for (std::size_t k = 0; k < g.size(); ++k) ga[n.attrs.start + k] += g[k];
            break;
        case Op::Concat: {
            ComplexTensor& gb = adj[n.rhs];
            const std::size_t na = a.size();
            for (std::size_t k = 0; k < na; ++k) ga[k] += g[k];
            for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += g[na + k];
            break;
        }
        case Op::CRelu:
            for (std::size_t k = 0; k < g.size(); ++k) {
                ga[k] += cplx{g[k].real() * relu_d(a[k].real()),
                              g[k].imag() * relu_d(a[k].imag())};
            }
            break;
        case Op::Relu:
            for (std::size_t k = 0; k < g.size(); ++k) {
                ga[k] += g[k].real() * relu_d(a[k].real());
            }
            break;
        case Op::SplitTanh:
            for (std::size_t k = 0; k < g.size(); ++k) {
                const double tr = out[k].real(), ti = out[k].imag();
                ga[k] += cplx{g[k].real() * (1.0 - tr * tr), g[k].imag() * (1.0 - ti * ti)};
            }
            break;
        case Op::Variable:
        case Op::Constant:
            break;
        }
    }

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].op == Op::Variable && nodes_[i].domain == Domain::Real) {
            for (auto& z : adj[i].data()) z = cplx{z.real(), 0.0};
        }
    }
    return GradientMap(std::move(adj));
}

Var operator+(Var a, Var b) { return a.tape->apply(Op::Add, {a, b}); }
Var operator-(Var a, Var b) { return a.tape->apply(Op::Sub, {a, b}); }
Var operator*(Var a, Var b) { return a.tape->apply(Op::Mul, {a, b}); }
Var operator/(Var a, Var b) { return a.tape->apply(Op::Div, {a, b}); }
Var operator-(Var a) { return a.tape->apply(Op::Neg, {a}); }

Var scale(Var a, cplx s) { return a.tape->apply(Op::Scale, {a}, OpAttrs{.scalar = s}); }
Var add_const(Var a, cplx s) { return a.tape->apply(Op::AddConst, {a}, OpAttrs{.scalar = s}); }
Var conj(Var a) { return a.tape->apply(Op::Conj, {a}); }
Var real(Var a) { return a.tape->apply(Op::Real, {a}); }
Var imag(Var a) { return a.tape->apply(Op::Imag, {a}); }
Var abs2(Var a) { return a.tape->apply(Op::Abs2, {a}); }
Var log2(Var a) { return a.tape->apply(Op::Log2, {a}); }
Var log2p1(Var a) { return a.tape->apply(Op::Log2p1, {a}); }
Var sqrt(Var a) { return a.tape->apply(Op::Sqrt, {a}); }
Var exp_i(Var a) { return a.tape->apply(Op::ExpI, {a}); }
Var unit_normalize(Var a) { return a.tape->apply(Op::UnitNormalize, {a}); }
Var matmul(Var a, Var b) { return a.tape->apply(Op::Matmul, {a, b}); }
Var transpose(Var a) { return a.tape->apply(Op::Transpose, {a}); }
Var adjoint(Var a) { return a.tape->apply(Op::Adjoint, {a}); }
Var sum(Var a) { return a.tape->apply(Op::Sum, {a}); }
Var sum_rows(Var a) { return a.tape->apply(Op::SumRows, {a}); }
Var diag(Var a) { return a.tape->apply(Op::Diag, {a}); }
Var diag_embed(Var a) { return a.tape->apply(Op::DiagEmbed, {a}); }
Var reshape(Var a, Shape shape)
{
    return a.tape->apply(Op::Reshape, {a}, OpAttrs{.shape = std::move(shape)});
}
Var slice(Var a, std::size_t start, std::size_t length)
{
    return a.tape->apply(Op::Slice, {a}, OpAttrs{.start = start, .length = length});
}
Var concat(Var a, Var b) { return a.tape->apply(Op::Concat, {a, b}); }
Var crelu(Var a) { return a.tape->apply(Op::CRelu, {a}); }
Var relu(Var a) { return a.tape->apply(Op::Relu, {a}); }
Var split_tanh(Var a) { return a.tape->apply(Op::SplitTanh, {a}); }

double grad_check(const GraphBuilder& f, const std::vector<GradCheckInput>& inputs, double eps)
{
    if (!(eps >= 1e-8 && eps <= 1e-3)) {
        throw Error("grad_check: eps must lie in [1e-8, 1e-3], got " + std::to_string(eps));
    }

    auto evaluate = [&](const std::vector<ComplexTensor>& points) {
        Tape tape;
        std::vector<Var> leaves;
        leaves.reserve(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            leaves.push_back(tape.variable(points[i], inputs[i].domain));
        }
        Var loss = f(tape, leaves);
        return tape.value(loss).item().real();
    };

    std::vector<ComplexTensor> points;
    for (const auto& in : inputs) points.push_back(in.point);

    std::vector<double> analytic;
    std::vector<double> numeric;
    {
        Tape tape;
        std::vector<Var> leaves;
        for (std::size_t i = 0; i < points.size(); ++i) {
            leaves.push_back(tape.variable(points[i], inputs[i].domain));
        }
        Var loss = f(tape, leaves);
        GradientMap grads = tape.backward(loss);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const ComplexTensor& g = grads[leaves[i]];
            for (std::size_t k = 0; k < g.size(); ++k) {
                analytic.push_back(g[k].real());
                if (inputs[i].domain == Domain::Complex) analytic.push_back(g[k].imag());
            }
        }
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        const bool complex = inputs[i].domain == Domain::Complex;
        for (std::size_t k = 0; k < points[i].size(); ++k) {
            for (int part = 0; part < (complex ? 2 : 1); ++part) {
                const cplx orig = points[i][k];
                const cplx dir = part == 0 ? cplx{1.0, 0.0} : kI;
                const double h = eps * (1.0 + std::abs(orig));
                points[i][k] = orig + h * dir;
                const double fp = evaluate(points);
                points[i][k] = orig - h * dir;
                const double fm = evaluate(points);
                points[i][k] = orig;
                numeric.push_back((fp - fm) / (2.0 * h));
            }
        }
    }

    double scale = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        scale = std::max({scale, std::abs(analytic[k]), std::abs(numeric[k])});
    }
    const double floor = std::max(1e-3 * scale, 1e-300);
    double worst = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        const double denom =
            std::max({std::abs(analytic[k]), std::abs(numeric[k]), floor});
        worst = std::max(worst, std::abs(analytic[k] - numeric[k]) / denom);
    }
    return worst;
}

double grad_check(const std::function<Var(Tape&, Var)>& f, const ComplexTensor& point, double eps)
{
    return grad_check(
        [&](Tape& t, const std::vector<Var>& v) { return f(t, v[0]); },
        {GradCheckInput{point, Domain::Complex}}, eps);
}

} // namespace gamn::cdiff
