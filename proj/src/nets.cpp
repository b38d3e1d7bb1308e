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

#include "gamn/nets.hpp"

#include "gamn/error.hpp"
#include "gamn/rng.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace gamn::nets {

using cdiff::Domain;
using cdiff::Var;

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr std::uint16_t kCheckpointVersion = 1;

void fill(Rng& rng, ComplexTensor& t, double bound, Domain domain)
{
    if (domain == Domain::Real) {
        for (auto& z : t.data()) z = cplx{rng.uniform(-bound, bound), 0.0};
        return;
    }
    const double b = bound;
    for (auto& z : t.data()) {
        const double re = rng.uniform(-b, b);
        const double im = rng.uniform(-b, b);
        z = cplx{re, im} / std::numbers::sqrt2;
    }
}

Mlp init(std::uint64_t seed, std::size_t in, std::size_t hidden, Domain domain,
         Activation activation)
{
    if (in == 0 || hidden == 0) throw ConfigError("nets", "layer widths must be >= 1");
    Rng rng(seed);
    Mlp net;
    net.domain = domain;
    net.activation = activation;
    net.w1 = ComplexTensor::matrix(hidden, in);
    net.b1 = ComplexTensor::matrix(hidden, 1);
    net.w2 = ComplexTensor::matrix(in, hidden);
    net.b2 = ComplexTensor::matrix(in, 1);
    const double bound = glorot_bound(in, hidden);
    fill(rng, net.w1, bound, domain);
    fill(rng, net.b1, bound, domain);
    fill(rng, net.w2, bound, domain);
    fill(rng, net.b2, bound, domain);
    return net;
}

Var activate(Var x, Activation a)
{
    switch (a) {
    case Activation::CRelu: return cdiff::crelu(x);
    case Activation::Relu: return cdiff::relu(x);
    case Activation::SplitTanh: return cdiff::split_tanh(x);
    }
    return x;
}

// Length-2n real column [re; im] -> complex n vector.
Var recombine(Var out, std::size_t n)
{
    Var re = cdiff::slice(out, 0, n);
    Var im = cdiff::slice(out, n, n);
    return re + cdiff::scale(im, kI);
}

ComplexTensor split_column(const ComplexTensor& z)
{
    const std::size_t n = z.size();
    ComplexTensor col = ComplexTensor::matrix(2 * n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        col[i] = z[i].real();
        col[n + i] = z[i].imag();
    }
    return col;
}

template <class T>
void put_le(std::ostream& os, T value)
{
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    U u = std::bit_cast<U>(value);
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((u >> (8 * i)) & 0xff);
    os.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& is)
{
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw IoError("checkpoint: truncated file");
    }
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(bytes[i]) << (8 * i);
    return std::bit_cast<T>(u);
}

void write_net(std::ostream& os, const Mlp& net)
{
    for (const ComplexTensor* t : {&net.w1, &net.b1, &net.w2, &net.b2}) {
        for (const auto& z : t->data()) {
            put_le(os, z.real());
            if (net.domain == Domain::Complex) put_le(os, z.imag());
        }
    }
}

void read_net(std::istream& is, Mlp& net)
{
    for (ComplexTensor* t : {&net.w1, &net.b1, &net.w2, &net.b2}) {
        for (auto& z : t->data()) {
            const double re = get_le<double>(is);
            const double im = net.domain == Domain::Complex ? get_le<double>(is) : 0.0;
            z = cplx{re, im};
        }
    }
}

Mlp shaped(std::size_t in, std::size_t hidden, Domain domain, Activation activation)
{
    Mlp net;
    net.domain = domain;
    net.activation = activation;
    net.w1 = ComplexTensor::matrix(hidden, in);
    net.b1 = ComplexTensor::matrix(hidden, 1);
    net.w2 = ComplexTensor::matrix(in, hidden);
    net.b2 = ComplexTensor::matrix(in, 1);
    return net;
}

} // namespace

Activation parse_activation(const std::string& name)
{
    if (name == "crelu") return Activation::CRelu;
    if (name == "relu") return Activation::Relu;
    if (name == "tanh" || name == "split_tanh") return Activation::SplitTanh;
    throw ConfigError("activation", "unknown activation '" + name + "'");
}

const char* activation_name(Activation a) noexcept
{
    switch (a) {
    case Activation::CRelu: return "crelu";
    case Activation::Relu: return "relu";
    case Activation::SplitTanh: return "tanh";
    }
    return "?";
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) noexcept
{
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Mlp init_complex(std::uint64_t seed, std::size_t n, std::size_t hidden, Activation activation)
{
    return init(seed, n, hidden, Domain::Complex, activation);
}

Mlp init_real(std::uint64_t seed, std::size_t dim, std::size_t hidden, Activation activation)
{
    return init(seed, dim, hidden, Domain::Real, activation);
}

void zero_last_layer(Mlp& net)
{
    for (auto& z : net.w2.data()) z = 0.0;
    for (auto& z : net.b2.data()) z = 0.0;
}

std::uint64_t parameter_hash(const Mlp& net) noexcept
{
    // FNV-1a over the raw bytes.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const ComplexTensor* t : {&net.w1, &net.b1, &net.w2, &net.b2}) {
        for (const auto& z : t->data()) {
            for (double part : {z.real(), z.imag()}) {
                auto bits = std::bit_cast<std::uint64_t>(part);
                for (int i = 0; i < 8; ++i) {
                    h ^= (bits >> (8 * i)) & 0xff;
                    h *= 0x100000001b3ULL;
                }
            }
        }
    }
    return h;
}

MlpVars bind(cdiff::Tape& tape, const Mlp& net)
{
    return MlpVars{tape.variable(net.w1, net.domain), tape.variable(net.b1, net.domain),
                   tape.variable(net.w2, net.domain), tape.variable(net.b2, net.domain),
                   net.activation};
}

Var forward(const MlpVars& net, Var input_column)
{
    Var hidden = activate(cdiff::matmul(net.w1, input_column) + net.b1, net.activation);
    return cdiff::matmul(net.w2, hidden) + net.b2;
}

Var pl_forward(const MlpVars& net, const ComplexTensor& grad_theta)
{
    const std::size_t n = grad_theta.size();
    if (net.w1.value().cols() != n) {
        throw ShapeError("pl_forward: net expects " + std::to_string(net.w1.value().cols())
                         + " inputs, gradient has " + std::to_string(n));
    }
    cdiff::Tape& t = *net.w1.tape;
    ComplexTensor col(Shape{n, 1}, std::vector<cplx>(grad_theta.data().begin(),
                                                     grad_theta.data().end()));
    return cdiff::reshape(forward(net, t.constant(std::move(col))), Shape{n});
}

Var pl_real_forward(const MlpVars& net, const ComplexTensor& grad_theta)
{
    const std::size_t n = grad_theta.size();
    if (net.w1.value().cols() != 2 * n) {
        throw ShapeError("pl_real_forward: net expects " + std::to_string(net.w1.value().cols())
                         + " inputs, gradient needs " + std::to_string(2 * n));
    }
    cdiff::Tape& t = *net.w1.tape;
    return recombine(forward(net, t.constant(split_column(grad_theta))), n);
}

Var prl_forward(const MlpVars& net, const ComplexTensor& grad_w)
{
    if (grad_w.rank() != 2) {
        throw ShapeError("prl_forward: gradient must be a matrix, got "
                         + shape_string(grad_w.shape()));
    }
    const std::size_t m = grad_w.rows(), k = grad_w.cols();
    if (net.w1.value().cols() != 2 * m * k) {
        throw ShapeError("prl_forward: net expects " + std::to_string(net.w1.value().cols())
                         + " inputs, precoder gradient " + shape_string(grad_w.shape()));
    }
    cdiff::Tape& t = *net.w1.tape;
    Var out = forward(net, t.constant(flatten_precoder(grad_w)));
    // recombine yields vec(W) column-major, i.e. W^T row-major.
    return cdiff::transpose(cdiff::reshape(recombine(out, m * k), Shape{k, m}));
}

ComplexTensor pl_forward(const Mlp& net, const ComplexTensor& grad_theta)
{
    cdiff::Tape tape;
    MlpVars vars = bind(tape, net);
    return net.domain == Domain::Complex ? pl_forward(vars, grad_theta).value()
                                         : pl_real_forward(vars, grad_theta).value();
}

ComplexTensor prl_forward(const Mlp& net, const ComplexTensor& grad_w)
{
    cdiff::Tape tape;
    MlpVars vars = bind(tape, net);
    return prl_forward(vars, grad_w).value();
}

ComplexTensor flatten_precoder(const ComplexTensor& w)
{
    const std::size_t m = w.rows(), k = w.cols();
    ComplexTensor col = ComplexTensor::matrix(2 * m * k, 1);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t r = 0; r < m; ++r) {
            col[c * m + r] = w(r, c).real();
            col[m * k + c * m + r] = w(r, c).imag();
        }
    }
    return col;
}

ComplexTensor unflatten_precoder(const ComplexTensor& flat, std::size_t m, std::size_t k)
{
    if (flat.size() != 2 * m * k) {
        throw ShapeError("unflatten_precoder: " + std::to_string(flat.size())
                         + " values cannot fill " + std::to_string(m) + "x" + std::to_string(k));
    }
    ComplexTensor w = ComplexTensor::matrix(m, k);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t r = 0; r < m; ++r) {
            w(r, c) = cplx{flat[c * m + r].real(), flat[m * k + c * m + r].real()};
        }
    }
    return w;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    const char* magic = ckpt.phase.domain == Domain::Complex ? "GMNC" : "GMNR";
    os.write(magic, 4);
    put_le<std::uint16_t>(os, kCheckpointVersion);
    put_le<std::uint16_t>(os, static_cast<std::uint16_t>(ckpt.n));
    put_le<std::uint16_t>(os, static_cast<std::uint16_t>(ckpt.m));
    put_le<std::uint16_t>(os, static_cast<std::uint16_t>(ckpt.k));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.phase.hidden()));
    write_net(os, ckpt.phase);
    write_net(os, ckpt.precoder);
    if (!os) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    char magic[4];
    if (!is.read(magic, 4)) throw IoError("checkpoint: truncated header");
    Domain phase_domain;
    if (std::memcmp(magic, "GMNC", 4) == 0) {
        phase_domain = Domain::Complex;
    } else if (std::memcmp(magic, "GMNR", 4) == 0) {
        phase_domain = Domain::Real;
    } else {
        throw IoError(path.string() + ": not a checkpoint (bad magic)");
    }
    if (get_le<std::uint16_t>(is) != kCheckpointVersion) {
        throw IoError(path.string() + ": unsupported checkpoint version");
    }
    Checkpoint ckpt;
    ckpt.n = get_le<std::uint16_t>(is);
    ckpt.m = get_le<std::uint16_t>(is);
    ckpt.k = get_le<std::uint16_t>(is);
    const std::size_t hidden = get_le<std::uint32_t>(is);
    const std::size_t phase_in = phase_domain == Domain::Complex ? ckpt.n : 2 * ckpt.n;
    ckpt.phase = shaped(phase_in, hidden, phase_domain,
                        phase_domain == Domain::Complex ? Activation::CRelu : Activation::Relu);
    ckpt.precoder = shaped(2 * ckpt.m * ckpt.k, hidden, Domain::Real, Activation::Relu);
    read_net(is, ckpt.phase);
    read_net(is, ckpt.precoder);
    if (is.peek() != std::char_traits<char>::eof()) {
        throw IoError(path.string() + ": trailing bytes after parameters");
    }
    return ckpt;
}

} // namespace gamn::nets
