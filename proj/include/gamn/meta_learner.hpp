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

// Joint phase/precoder optimization with learned update networks.
//
// Each outer epoch:
//   1. phase inner loop:    theta <- theta + PL(grad_theta R), n_phase times,
//                           then theta is retracted to unit modulus;
//   2. precoder inner loop: W <- W + h * PRL(grad_W R), n_precoder times,
//                           then W is retracted to the power sphere;
//   3. loss L = -R(W, theta) is back-propagated to the network weights;
//      the precoder net steps every epoch, the phase net every
//      phase_period epochs.
//
// The gradients fed to the networks are detached values, so the weight
// gradients are first order.

#pragma once

#include "gamn/channel.hpp"
#include "gamn/manifold.hpp"
#include "gamn/metrics.hpp"
#include "gamn/nets.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gamn::meta {

enum class Variant : std::uint8_t {
    Gamn,        // complex phase net, Euler factor h
    GamnReal,    // real phase net on [Re g; Im g]
    GamnNoEuler, // complex phase net, h forced to 1
    Pga,         // Riemannian gradient ascent, no networks
};

Variant parse_variant(const std::string& name);
const char* variant_name(Variant v) noexcept;

enum class InputGradient : std::uint8_t { Riemannian, Euclidean };

// Normalized: the precoder net reads and writes W / sqrt(P), a point on the
// unit sphere. Absolute: it acts on W directly.
enum class PrecoderUnits : std::uint8_t { Normalized, Absolute };

struct HyperParams {
    int n_outer = 500;
    int n_phase = 1;
    int n_precoder = 1;
    double alpha_phase = 1e-2;
    double alpha_precoder = 3.5e-2;
    double euler = 10.0;
    int phase_period = 10;
    std::size_t hidden = nets::kDefaultHidden;
    nets::Activation phase_activation = nets::Activation::CRelu;
    nets::Activation precoder_activation = nets::Activation::Relu;
    manifold::RadamConfig radam{};
    InputGradient input_gradient = InputGradient::Riemannian;
    PrecoderUnits precoder_units = PrecoderUnits::Normalized;
    bool zero_last_layer = false;

    // Gradient-ascent baseline: normalized steps with geometric decay.
    double pga_step_phase = 0.1;
    double pga_step_precoder = 0.1;
    double pga_decay = 0.99;

    void validate() const;
};

/// Everything a run needs about the physical system.
struct Problem {
    channel::ChannelSet channels;
    metrics::LinkParams link;
    double power = 1e-2; // W

    std::size_t n() const noexcept { return channels.n(); }
    std::size_t m() const noexcept { return channels.m(); }
    std::size_t k() const noexcept { return channels.k(); }
};

struct RunTrace {
    std::vector<double> wsr_per_epoch;
    double initial_wsr = 0.0; // at the (retracted) random initialization
    ComplexTensor final_theta;
    ComplexTensor final_w;
    std::uint64_t seed = 0;
    Variant variant = Variant::Gamn;
    HyperParams hyper;
    std::optional<nets::Checkpoint> networks;

    double final_wsr() const { return wsr_per_epoch.empty() ? initial_wsr : wsr_per_epoch.back(); }
    double best_wsr() const;
};

/// Called after every epoch with the retracted iterates.
using EpochObserver =
    std::function<void(int epoch, const ComplexTensor& theta, const ComplexTensor& w)>;

struct InitialState {
    ComplexTensor theta;
    ComplexTensor w;
};

// Uniform phases and a complex-Gaussian precoder scaled to power P.
InitialState initial_state(std::uint64_t seed, std::size_t n, std::size_t m, std::size_t k,
                           double power);

// Gradients of R at (theta, W); both are plain Euclidean gradients.
ComplexTensor wsr_grad_theta(const Problem& p, const ComplexTensor& theta, const ComplexTensor& w);
ComplexTensor wsr_grad_w(const Problem& p, const ComplexTensor& theta, const ComplexTensor& w);

/// Initial networks for a run; shared by the variants that use them so
/// that runs with equal seeds differ only by the variant.
nets::Mlp initial_phase_net(std::uint64_t seed, Variant v, std::size_t n, const HyperParams& h);
nets::Mlp initial_precoder_net(std::uint64_t seed, std::size_t m, std::size_t k,
                               const HyperParams& h);

RunTrace run(const Problem& problem, const HyperParams& hyper, Variant variant,
             std::uint64_t seed, const EpochObserver& observer = {});

// Same initialization as run(); hyper.n_outer iterations.
RunTrace pga_baseline(const Problem& problem, const HyperParams& hyper, std::uint64_t seed,
                      const EpochObserver& observer = {});

/// The gradients handed to the networks during one epoch. An empty record
/// is filled in; a filled one is replayed instead of recomputing them, which
/// lets a finite-difference check hold the detached inputs fixed.
struct DetachedInputs {
    std::vector<ComplexTensor> phase;
    std::vector<ComplexTensor> precoder;
};

/// Differentiable single epoch, exposed for gradient checking: returns L on
/// `tape` given bound network leaves and the incoming iterates.
cdiff::Var epoch_loss(cdiff::Tape& tape, const Problem& problem, const HyperParams& hyper,
                      Variant variant, const nets::MlpVars& phase, const nets::MlpVars& precoder,
                      const ComplexTensor& theta, const ComplexTensor& w,
                      ComplexTensor* theta_out = nullptr, ComplexTensor* w_out = nullptr,
                      DetachedInputs* detached = nullptr);

} // namespace gamn::meta
