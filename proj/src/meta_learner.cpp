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

#include "gamn/meta_learner.hpp"

#include "gamn/error.hpp"
#include "gamn/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace gamn::meta {

using cdiff::Var;
using manifold::Manifold;

namespace {

enum StreamPurpose : std::uint64_t { kInitState = 1, kPhaseNet = 2, kPrecoderNet = 3 };

double euler_factor(const HyperParams& h, Variant v)
{
    return v == Variant::GamnNoEuler ? 1.0 : h.euler;
}

ComplexTensor network_input(const ComplexTensor& g, const ComplexTensor& x, const Manifold& mf,
                            InputGradient mode)
{
    return mode == InputGradient::Riemannian ? manifold::tangent_project_unchecked(mf, x, g) : g;
}

struct NetOptimizer {
    std::array<manifold::RadamState, 4> states;

    explicit NetOptimizer(const nets::Mlp& net, manifold::RadamConfig config)
        : states{manifold::RadamState::fresh(Manifold::euclidean(), net.w1.shape(), config),
                 manifold::RadamState::fresh(Manifold::euclidean(), net.b1.shape(), config),
                 manifold::RadamState::fresh(Manifold::euclidean(), net.w2.shape(), config),
                 manifold::RadamState::fresh(Manifold::euclidean(), net.b2.shape(), config)}
    {
    }

    void step(nets::Mlp& net, const nets::MlpVars& vars, const cdiff::GradientMap& grads,
              double lr)
    {
        const auto mf = Manifold::euclidean();
        manifold::radam_step(mf, net.w1, grads[vars.w1], states[0], lr);
        manifold::radam_step(mf, net.b1, grads[vars.b1], states[1], lr);
        manifold::radam_step(mf, net.w2, grads[vars.w2], states[2], lr);
        manifold::radam_step(mf, net.b2, grads[vars.b2], states[3], lr);
    }
};

} // namespace

Variant parse_variant(const std::string& name)
{
    if (name == "GAMN") return Variant::Gamn;
    if (name == "GAMNreal") return Variant::GamnReal;
    if (name == "GAMN_no_euler") return Variant::GamnNoEuler;
    if (name == "PGA" || name == "PGA_baseline") return Variant::Pga;
    throw ConfigError("run.variants", "unknown variant '" + name + "'");
}

const char* variant_name(Variant v) noexcept
{
    switch (v) {
    case Variant::Gamn: return "GAMN";
    case Variant::GamnReal: return "GAMNreal";
    case Variant::GamnNoEuler: return "GAMN_no_euler";
    case Variant::Pga: return "PGA";
    }
    return "?";
}

void HyperParams::validate() const
{
    if (n_outer < 1) throw ConfigError("hyper.n_M", "must be >= 1");
    if (n_phase < 1) throw ConfigError("hyper.n_P", "must be >= 1");
    if (n_precoder < 1) throw ConfigError("hyper.n_PR", "must be >= 1");
    if (phase_period < 1) throw ConfigError("hyper.n_I", "must be >= 1");
    if (!(alpha_phase > 0.0)) throw ConfigError("hyper.alpha_P", "must be > 0");
    if (!(alpha_precoder > 0.0)) throw ConfigError("hyper.alpha_PR", "must be > 0");
    if (!(euler > 0.0)) throw ConfigError("hyper.h", "must be > 0");
    if (hidden < 1) throw ConfigError("hyper.hidden", "must be >= 1");
    if (!(radam.beta1 > 0.0 && radam.beta1 < 1.0)) throw ConfigError("hyper.beta1", "must lie in (0,1)");
    if (!(radam.beta2 > 0.0 && radam.beta2 < 1.0)) throw ConfigError("hyper.beta2", "must lie in (0,1)");
    if (!(radam.eps > 0.0)) throw ConfigError("hyper.eps", "must be > 0");
    if (!(pga_step_phase >= 0.0)) throw ConfigError("hyper.pga_step_phase", "must be >= 0");
    if (!(pga_step_precoder >= 0.0)) throw ConfigError("hyper.pga_step_precoder", "must be >= 0");
    if (!(pga_decay > 0.0 && pga_decay <= 1.0)) throw ConfigError("hyper.pga_decay", "must lie in (0,1]");
}

double RunTrace::best_wsr() const
{
    if (wsr_per_epoch.empty()) return initial_wsr;
    return *std::max_element(wsr_per_epoch.begin(), wsr_per_epoch.end());
}

InitialState initial_state(std::uint64_t seed, std::size_t n, std::size_t m, std::size_t k,
                           double power)
{
    Rng rng(derive_seed(seed, 0, kInitState));
    InitialState s;
    s.theta = ComplexTensor(Shape{n});
    for (auto& z : s.theta.data()) z = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    s.w = ComplexTensor::matrix(m, k);
    for (auto& z : s.w.data()) z = rng.complex_normal();
    s.w = manifold::normalize(Manifold::power_sphere(power), s.w);
    return s;
}

ComplexTensor wsr_grad_theta(const Problem& p, const ComplexTensor& theta, const ComplexTensor& w)
{
    cdiff::Tape tape;
    Var th = tape.variable(theta);
    Var r = metrics::graph::wsr(th, tape.constant(w), p.channels, p.link);
    return tape.backward(r)[th];
}

ComplexTensor wsr_grad_w(const Problem& p, const ComplexTensor& theta, const ComplexTensor& w)
{
    cdiff::Tape tape;
    Var wv = tape.variable(w);
    Var r = metrics::graph::wsr(tape.constant(theta), wv, p.channels, p.link);
    return tape.backward(r)[wv];
}

nets::Mlp initial_phase_net(std::uint64_t seed, Variant v, std::size_t n, const HyperParams& h)
{
    const std::uint64_t s = derive_seed(seed, 0, kPhaseNet);
    nets::Mlp net = v == Variant::GamnReal
                        ? nets::init_real(s, 2 * n, h.hidden, nets::Activation::Relu)
                        : nets::init_complex(s, n, h.hidden, h.phase_activation);
    if (v == Variant::GamnReal && h.phase_activation == nets::Activation::SplitTanh) {
        net.activation = nets::Activation::SplitTanh;
    }
    if (h.zero_last_layer) nets::zero_last_layer(net);
    return net;
}

nets::Mlp initial_precoder_net(std::uint64_t seed, std::size_t m, std::size_t k,
                               const HyperParams& h)
{
    nets::Mlp net =
        nets::init_real(derive_seed(seed, 0, kPrecoderNet), 2 * m * k, h.hidden,
                        h.precoder_activation);
    if (h.zero_last_layer) nets::zero_last_layer(net);
    return net;
}

Var epoch_loss(cdiff::Tape& tape, const Problem& problem, const HyperParams& hyper,
               Variant variant, const nets::MlpVars& phase, const nets::MlpVars& precoder,
               const ComplexTensor& theta, const ComplexTensor& w, ComplexTensor* theta_out,
               ComplexTensor* w_out, DetachedInputs* detached)
{
    const bool replay = detached && !detached->phase.empty();
    if (replay && (detached->phase.size() != static_cast<std::size_t>(hyper.n_phase)
                   || detached->precoder.size() != static_cast<std::size_t>(hyper.n_precoder))) {
        throw ShapeError("epoch_loss: detached-input record does not match n_P / n_PR");
    }

    const auto circle = Manifold::circle_product();
    const auto sphere = Manifold::power_sphere(problem.power);

    Var theta_k = tape.constant(theta);
    for (int k = 0; k < hyper.n_phase; ++k) {
        const ComplexTensor& at = theta_k.value();
        const ComplexTensor g =
            replay ? detached->phase[static_cast<std::size_t>(k)]
                   : network_input(wsr_grad_theta(problem, at, w), at, circle, hyper.input_gradient);
        if (detached && !replay) detached->phase.push_back(g);
        Var delta = variant == Variant::GamnReal ? nets::pl_real_forward(phase, g)
                                                 : nets::pl_forward(phase, g);
        theta_k = theta_k + delta;
    }
    for (const auto& z : theta_k.value().data()) {
        if (z == cplx{}) throw DegenerateRetractionError("phase retraction: theta + delta vanished");
    }
    Var theta_star = cdiff::unit_normalize(theta_k);

    const double h = euler_factor(hyper, variant);
    const double root_p = std::sqrt(problem.power);
    Var w_l = tape.constant(w);
    for (int l = 0; l < hyper.n_precoder; ++l) {
        const ComplexTensor& at = w_l.value();
        ComplexTensor g = replay ? detached->precoder[static_cast<std::size_t>(l)]
                                 : network_input(wsr_grad_w(problem, theta_star.value(), at), at,
                                                 sphere, hyper.input_gradient);
        if (detached && !replay) detached->precoder.push_back(g);
        double out_scale = h;
        if (hyper.precoder_units == PrecoderUnits::Normalized) {
            for (auto& z : g.data()) z *= root_p;
            out_scale *= root_p;
        }
        w_l = w_l + cdiff::scale(nets::prl_forward(precoder, g), out_scale);
    }
    if (squared_norm(w_l.value()) == 0.0) {
        throw DegenerateRetractionError("precoder retraction: W + h*delta vanished");
    }
    Var norm = cdiff::sqrt(cdiff::sum(cdiff::abs2(w_l)));
    Var w_star = cdiff::scale(w_l / norm, std::sqrt(problem.power));

    if (theta_out) *theta_out = theta_star.value();
    if (w_out) *w_out = w_star.value();
    return metrics::graph::loss(theta_star, w_star, problem.channels, problem.link);
}

RunTrace run(const Problem& problem, const HyperParams& hyper, Variant variant,
             std::uint64_t seed, const EpochObserver& observer)
{
    hyper.validate();
    if (variant == Variant::Pga) return pga_baseline(problem, hyper, seed, observer);
    metrics::validate_link(problem.link, problem.k());

    const std::size_t n = problem.n(), m = problem.m(), k = problem.k();
    InitialState init = initial_state(seed, n, m, k, problem.power);
    nets::Mlp phase = initial_phase_net(seed, variant, n, hyper);
    nets::Mlp precoder = initial_precoder_net(seed, m, k, hyper);
    NetOptimizer phase_opt(phase, hyper.radam);
    NetOptimizer precoder_opt(precoder, hyper.radam);

    RunTrace trace;
    trace.seed = seed;
    trace.variant = variant;
    trace.hyper = hyper;
    trace.initial_wsr = metrics::wsr(init.theta, init.w, problem.channels, problem.link);
    trace.wsr_per_epoch.reserve(static_cast<std::size_t>(hyper.n_outer));

    ComplexTensor theta = std::move(init.theta);
    ComplexTensor w = std::move(init.w);
    for (int t = 1; t <= hyper.n_outer; ++t) {
        cdiff::Tape tape;
        const nets::MlpVars phase_vars = nets::bind(tape, phase);
        const nets::MlpVars precoder_vars = nets::bind(tape, precoder);
        ComplexTensor theta_next, w_next;
        Var loss;
        try {
            loss = epoch_loss(tape, problem, hyper, variant, phase_vars, precoder_vars, theta, w,
                              &theta_next, &w_next);
        } catch (const RunError&) {
            throw;
        } catch (const Error& e) {
            throw RunError(std::string(variant_name(variant)) + ": " + e.what(), seed, t - 1);
        }
        const double l = tape.value(loss).item().real();
        if (!std::isfinite(l)) {
            throw RunError(std::string(variant_name(variant)) + ": non-finite loss", seed, t - 1);
        }
        trace.wsr_per_epoch.push_back(-l);
        theta = std::move(theta_next);
        w = std::move(w_next);
        if (observer) observer(t - 1, theta, w);

        const cdiff::GradientMap grads = tape.backward(loss);
        precoder_opt.step(precoder, precoder_vars, grads, hyper.alpha_precoder);
        if (t % hyper.phase_period == 0) {
            phase_opt.step(phase, phase_vars, grads, hyper.alpha_phase);
        }
    }

    trace.final_theta = std::move(theta);
    trace.final_w = std::move(w);
    trace.networks = nets::Checkpoint{std::move(phase), std::move(precoder), n, m, k};
    return trace;
}

RunTrace pga_baseline(const Problem& problem, const HyperParams& hyper, std::uint64_t seed,
                      const EpochObserver& observer)
{
    hyper.validate();
    metrics::validate_link(problem.link, problem.k());
    const auto circle = Manifold::circle_product();
    const auto sphere = Manifold::power_sphere(problem.power);

    InitialState init = initial_state(seed, problem.n(), problem.m(), problem.k(), problem.power);
    RunTrace trace;
    trace.seed = seed;
    trace.variant = Variant::Pga;
    trace.hyper = hyper;
    trace.initial_wsr = metrics::wsr(init.theta, init.w, problem.channels, problem.link);

    ComplexTensor theta = std::move(init.theta);
    ComplexTensor w = std::move(init.w);
    double step_phase = hyper.pga_step_phase;
    double step_precoder = hyper.pga_step_precoder;
    for (int t = 1; t <= hyper.n_outer; ++t) try {
        // Phase step: largest per-element move equals step_phase.
        ComplexTensor g = manifold::tangent_project(circle, theta, wsr_grad_theta(problem, theta, w));
        double gmax = 0.0;
        for (const auto& z : g.data()) gmax = std::max(gmax, std::abs(z));
        if (gmax > 0.0 && step_phase > 0.0) {
            for (auto& z : g.data()) z *= step_phase / gmax;
            theta = manifold::retract(circle, theta, g);
        }

        // Precoder step: move of length step_precoder * sqrt(P).
        ComplexTensor gw = manifold::tangent_project(sphere, w, wsr_grad_w(problem, theta, w));
        const double gnorm = std::sqrt(squared_norm(gw));
        if (gnorm > 0.0 && step_precoder > 0.0) {
            const double s = step_precoder * std::sqrt(problem.power) / gnorm;
            for (auto& z : gw.data()) z *= s;
            w = manifold::retract(sphere, w, gw);
        }

        const double r = metrics::wsr(theta, w, problem.channels, problem.link);
        if (!std::isfinite(r)) throw RunError("PGA: non-finite rate", seed, t - 1);
        trace.wsr_per_epoch.push_back(r);
        if (observer) observer(t - 1, theta, w);
        step_phase *= hyper.pga_decay;
        step_precoder *= hyper.pga_decay;
    } catch (const RunError&) {
        throw;
    } catch (const Error& e) {
        throw RunError(std::string("PGA: ") + e.what(), seed, t - 1);
    }
    trace.final_theta = std::move(theta);
    trace.final_w = std::move(w);
    return trace;
}

} // namespace gamn::meta
