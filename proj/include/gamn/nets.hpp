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

// One-hidden-layer perceptrons that map a gradient to an update: the
// complex phase learner and the real precoder learner.

#pragma once

#include "gamn/cdiff.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace gamn::nets {

inline constexpr std::size_t kDefaultHidden = 200;

enum class Activation : std::uint8_t { CRelu, Relu, SplitTanh };

Activation parse_activation(const std::string& name);
const char* activation_name(Activation a) noexcept;

/// y = w2 * act(w1 * x + b1) + b2 with x a column vector.
///
/// Complex nets store genuinely complex parameters; real nets keep every
/// imaginary part at zero and their gradients are reported real.
struct Mlp {
    ComplexTensor w1; // hidden x in
    ComplexTensor b1; // hidden x 1
    ComplexTensor w2; // out x hidden
    ComplexTensor b2; // out x 1
    cdiff::Domain domain = cdiff::Domain::Complex;
    Activation activation = Activation::CRelu;

    std::size_t inputs() const noexcept { return w1.cols(); }
    std::size_t hidden() const noexcept { return w1.rows(); }
    std::size_t outputs() const noexcept { return w2.rows(); }

    bool operator==(const Mlp&) const = default;
};

// Glorot-uniform init; complex entries draw both parts from the real law
// scaled by 1/sqrt(2). Square nets (out == in) are the only ones used here.
Mlp init_complex(std::uint64_t seed, std::size_t n, std::size_t hidden = kDefaultHidden,
                 Activation activation = Activation::CRelu);
Mlp init_real(std::uint64_t seed, std::size_t dim, std::size_t hidden = kDefaultHidden,
              Activation activation = Activation::Relu);

double glorot_bound(std::size_t fan_in, std::size_t fan_out) noexcept;

// Zeroes w2 and b2 so the net outputs exactly zero.
void zero_last_layer(Mlp& net);

std::uint64_t parameter_hash(const Mlp& net) noexcept;

/// Leaves holding one net's parameters on a tape.
struct MlpVars {
    cdiff::Var w1, b1, w2, b2;
    Activation activation;
};

MlpVars bind(cdiff::Tape& tape, const Mlp& net);

cdiff::Var forward(const MlpVars& net, cdiff::Var input_column);

/// Phase update from the (detached) phase gradient; complex N -> complex N.
cdiff::Var pl_forward(const MlpVars& net, const ComplexTensor& grad_theta);

/// Phase update through a real net on [Re g; Im g]; output re/im halves
/// recombine into N complex entries.
cdiff::Var pl_real_forward(const MlpVars& net, const ComplexTensor& grad_theta);

/// Precoder update from the (detached) precoder gradient; M x K -> M x K.
cdiff::Var prl_forward(const MlpVars& net, const ComplexTensor& grad_w);

ComplexTensor pl_forward(const Mlp& net, const ComplexTensor& grad_theta);
ComplexTensor prl_forward(const Mlp& net, const ComplexTensor& grad_w);

// [Re vec(W); Im vec(W)] with column-major vec, as a 2MK x 1 real column.
ComplexTensor flatten_precoder(const ComplexTensor& w);
ComplexTensor unflatten_precoder(const ComplexTensor& flat, std::size_t m, std::size_t k);

/// Checkpoint: 16-byte little-endian header
///   magic[4]  "GMNC" (complex phase net) or "GMNR" (real phase net)
///   u16 version (1), u16 N, u16 M, u16 K, u32 hidden width
/// followed by IEEE-754 doubles: phase net w1, b1, w2, b2 (complex nets
/// store re, im per entry; real nets store re only), then precoder net
/// w1, b1, w2, b2 (re only). Matrices are row-major.
struct Checkpoint {
    Mlp phase;
    Mlp precoder;
    std::size_t n = 0, m = 0, k = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace gamn::nets
