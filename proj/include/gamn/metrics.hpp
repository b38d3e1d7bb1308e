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

// SINR, weighted sum rate and training loss. Each quantity has a plain
// evaluator and a differentiable one built on a cdiff tape.

#pragma once

#include "gamn/cdiff.hpp"
#include "gamn/channel.hpp"

#include <vector>

namespace gamn::metrics {

/// Link-budget constants shared by every evaluation of one system.
struct LinkParams {
    std::vector<double> weights; // c_k, non-negative, summing to 1
    double sigma2 = 1e-13;       // noise power, W
};

struct SystemState {
    ComplexTensor theta; // N, unit modulus
    ComplexTensor w;     // M x K precoder
    LinkParams link;
    double power = 1e-2; // total transmit power, W

    // Checks the unit-modulus, power-budget and weight invariants.
    void validate() const;
};

std::vector<double> uniform_weights(std::size_t k);
void validate_link(const LinkParams& link, std::size_t k);

// Row k is h_RU_k^H diag(theta) H_BR; shape K x M.
ComplexTensor effective_channel(const ComplexTensor& theta, const channel::ChannelSet& ch);

double sinr(const ComplexTensor& theta, const ComplexTensor& w, const channel::ChannelSet& ch,
            const LinkParams& link, std::size_t k);
double wsr(const ComplexTensor& theta, const ComplexTensor& w, const channel::ChannelSet& ch,
           const LinkParams& link);

double sinr(const SystemState& s, const channel::ChannelSet& ch, std::size_t k);
double wsr(const SystemState& s, const channel::ChannelSet& ch);
double loss(const SystemState& s, const channel::ChannelSet& ch);

namespace graph {

cdiff::Var effective_channel(cdiff::Var theta, const channel::ChannelSet& ch);
// Per-user SINR as a length-K real vector.
cdiff::Var sinr(cdiff::Var theta, cdiff::Var w, const channel::ChannelSet& ch,
                const LinkParams& link);
cdiff::Var wsr(cdiff::Var theta, cdiff::Var w, const channel::ChannelSet& ch,
               const LinkParams& link);
cdiff::Var loss(cdiff::Var theta, cdiff::Var w, const channel::ChannelSet& ch,
                const LinkParams& link);

} // namespace graph

} // namespace gamn::metrics
