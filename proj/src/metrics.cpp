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

#include "gamn/metrics.hpp"

#include "gamn/error.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace gamn::metrics {

namespace {

void check_dims(const ComplexTensor& theta, const ComplexTensor& w, const channel::ChannelSet& ch)
{
    if (theta.size() != ch.n()) {
        throw ShapeError("theta has " + std::to_string(theta.size()) + " entries, channel N is "
                         + std::to_string(ch.n()));
    }
    if (w.rank() != 2 || w.rows() != ch.m() || w.cols() != ch.k()) {
        throw ShapeError("precoder shape " + shape_string(w.shape()) + " does not match M="
                         + std::to_string(ch.m()) + ", K=" + std::to_string(ch.k()));
    }
}

// |g_k w_j|^2 for all k, j.
std::vector<double> gains(const ComplexTensor& theta, const ComplexTensor& w,
                          const channel::ChannelSet& ch)
{
    const ComplexTensor g = effective_channel(theta, ch);
    const std::size_t k = ch.k(), m = ch.m();
    std::vector<double> out(k * k);
    for (std::size_t u = 0; u < k; ++u) {
        for (std::size_t j = 0; j < k; ++j) {
            cplx s{};
            for (std::size_t a = 0; a < m; ++a) s += g(u, a) * w(a, j);
            out[u * k + j] = std::norm(s);
        }
    }
    return out;
}

} // namespace

std::vector<double> uniform_weights(std::size_t k)
{
    return std::vector<double>(k, 1.0 / static_cast<double>(k));
}

void validate_link(const LinkParams& link, std::size_t k)
{
    if (link.weights.size() != k) {
        throw ConfigError("system.weights", "expected " + std::to_string(k) + " weights, got "
                                                + std::to_string(link.weights.size()));
    }
    double total = 0.0;
    for (double c : link.weights) {
        if (!(c >= 0.0)) throw ConfigError("system.weights", "weights must be >= 0");
        total += c;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ConfigError("system.weights", "weights must sum to 1");
    }
    if (!(link.sigma2 > 0.0) || !std::isfinite(link.sigma2)) {
        throw ConfigError("system.noise_dbm", "noise power must be positive and finite");
    }
}

void SystemState::validate() const
{
    for (const auto& z : theta.data()) {
        if (std::abs(std::abs(z) - 1.0) > 1e-9) {
            throw OffManifoldError("theta entry with modulus " + std::to_string(std::abs(z)));
        }
    }
    if (squared_norm(w) > power * (1.0 + 1e-9)) {
        throw OffManifoldError("precoder exceeds the power budget");
    }
    validate_link(link, w.cols());
}

ComplexTensor effective_channel(const ComplexTensor& theta, const channel::ChannelSet& ch)
{
    if (theta.size() != ch.n()) {
        throw ShapeError("theta has " + std::to_string(theta.size()) + " entries, channel N is "
                         + std::to_string(ch.n()));
    }
    const std::size_t k = ch.k(), n = ch.n(), m = ch.m();
    ComplexTensor out = ComplexTensor::matrix(k, m);
    for (std::size_t u = 0; u < k; ++u) {
        for (std::size_t i = 0; i < n; ++i) {
            const cplx c = std::conj(ch.h_ru(u, i)) * theta[i];
            for (std::size_t a = 0; a < m; ++a) out(u, a) += c * ch.h_br(i, a);
        }
    }
    return out;
}

double sinr(const ComplexTensor& theta, const ComplexTensor& w, const channel::ChannelSet& ch,
            const LinkParams& link, std::size_t k)
{
    check_dims(theta, w, ch);
    if (k >= ch.k()) {
        throw ShapeError("sinr: user index " + std::to_string(k) + " out of range for K="
                         + std::to_string(ch.k()));
    }
    const auto a = gains(theta, w, ch);
    const std::size_t kk = ch.k();
    double interference = 0.0;
    for (std::size_t j = 0; j < kk; ++j) {
        if (j != k) interference += a[k * kk + j];
    }
    return a[k * kk + k] / (link.sigma2 + interference);
}

double wsr(const ComplexTensor& theta, const ComplexTensor& w, const channel::ChannelSet& ch,
           const LinkParams& link)
{
    check_dims(theta, w, ch);
    const auto a = gains(theta, w, ch);
    const std::size_t kk = ch.k();
    double total = 0.0;
    for (std::size_t u = 0; u < kk; ++u) {
        double interference = 0.0;
        for (std::size_t j = 0; j < kk; ++j) {
            if (j != u) interference += a[u * kk + j];
        }
        total += link.weights[u] * std::log1p(a[u * kk + u] / (link.sigma2 + interference)) / std::numbers::ln2;
    }
    return total;
}

double sinr(const SystemState& s, const channel::ChannelSet& ch, std::size_t k)
{
    return sinr(s.theta, s.w, ch, s.link, k);
}

double wsr(const SystemState& s, const channel::ChannelSet& ch)
{
    return wsr(s.theta, s.w, ch, s.link);
}

double loss(const SystemState& s, const channel::ChannelSet& ch)
{
    return -wsr(s, ch);
}

namespace graph {

using cdiff::Var;

Var effective_channel(Var theta, const channel::ChannelSet& ch)
{
    cdiff::Tape& t = *theta.tape;
    if (theta.value().size() != ch.n()) {
        throw ShapeError("effective_channel: theta " + shape_string(theta.shape())
                         + " vs channel N=" + std::to_string(ch.n()));
    }
    Var h_ru_conj = cdiff::conj(t.constant(ch.h_ru));
    Var h_br = t.constant(ch.h_br);
    return cdiff::matmul(cdiff::matmul(h_ru_conj, cdiff::diag_embed(theta)), h_br);
}

Var sinr(Var theta, Var w, const channel::ChannelSet& ch, const LinkParams& link)
{
    cdiff::Tape& t = *theta.tape;
    const std::size_t k = ch.k();
    Var gains = cdiff::abs2(cdiff::matmul(effective_channel(theta, ch), w));
    ComplexTensor mask = ComplexTensor::matrix(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) mask(i, j) = i == j ? 0.0 : 1.0;
    }
    Var interference = cdiff::sum_rows(gains * t.constant(std::move(mask)));
    return cdiff::diag(gains) / cdiff::add_const(interference, link.sigma2);
}

Var wsr(Var theta, Var w, const channel::ChannelSet& ch, const LinkParams& link)
{
    cdiff::Tape& t = *theta.tape;
    std::vector<cplx> c(link.weights.begin(), link.weights.end());
    Var rates = cdiff::log2p1(sinr(theta, w, ch, link));
    return cdiff::sum(rates * t.constant(ComplexTensor::vector(std::move(c))));
}

Var loss(Var theta, Var w, const channel::ChannelSet& ch, const LinkParams& link)
{
    return -wsr(theta, w, ch, link);
}

} // namespace graph

} // namespace gamn::metrics
