#pragma once

#include "fadexp/constellations.hpp"
#include "fadexp/fading.hpp"

#include <vector>

namespace fadexp {

struct Subchannel {
    FadingModel fading;
    Constellation input;
};

struct ChannelBank {
    std::vector<Subchannel> subchannels;
    double total_power = 1.0;

    void validate() const;
};

enum class AllocMethod { ExactKKT, Asymptotic };
const char* to_string(AllocMethod m);

struct PowerAllocation {
    std::vector<double> p;
    double lambda = 0.0;
    double capacity = 0.0;
    AllocMethod method = AllocMethod::ExactKKT;
    // max over active channels of |snr avg_mmse_i(snr p_i) - lambda| / lambda
    double kkt_residual = 0.0;
};

// Water level lambda by bracketing on a per-channel log-log monotone
// interpolant, then refined with direct oracle calls.
PowerAllocation exact_allocation(const ChannelBank& bank, double snr);
// p_i proportional to sqrt(tau_i), tau_i = exp(-|mu_i|^2/2s_i^2) M[mmse_i;2] / 2s_i^2.
PowerAllocation asymptotic_allocation(const ChannelBank& bank, double snr);
double constrained_capacity(const ChannelBank& bank, double snr, const PowerAllocation& alloc);

}  // namespace fadexp
