#pragma once

#include "fadexp/constellations.hpp"

#include <functional>
#include <memory>

namespace fadexp {

struct DecayParams {
    double zeta;
    double r0;
    double r1;
};

struct Derivative {
    double value = 0.0;
    double est_error = 0.0;
    bool contracted = true;
};

// Canonical channel y = sqrt(snr) x + n, n ~ CN(0,1).
class CanonicalCurve {
public:
    explicit CanonicalCurve(Constellation input, int quadrature_order = 64);

    double mmse(double snr) const;
    double mutual_information(double snr) const;
    // H(X|Y) = H(X) - I for discrete inputs; accurate when I saturates.
    double equivocation(double snr) const;
    Derivative mmse_deriv_at_zero(int order) const;

    const Constellation& input() const { return input_; }
    int quadrature_order() const { return order_; }
    void set_cache_enabled(bool on) const;

private:
    double mmse_uncached(double snr) const;

    Constellation input_;
    int order_;
    std::vector<Axis> axes_;
    struct Cache;
    std::shared_ptr<Cache> cache_;
};

double mmse(const CanonicalCurve& c, double snr);
double mutual_information(const CanonicalCurve& c, double snr);
Derivative mmse_deriv_at_zero(const CanonicalCurve& c, int order);
DecayParams decay_params(const Constellation& input);

// Richardson-extrapolated one-sided derivative f^(order)(0+) from samples at
// k*h for the step ladder h0, h0/2, ...
Derivative one_sided_derivative(const std::function<double(double)>& f, int order,
                                double h0 = 1e-2, int levels = 5);

namespace detail {
// Real-axis channel used for separable inputs: y = sqrt(snr) a + N(0, 1/2).
double axis_mmse(const Axis& a, double snr);
double axis_equivocation(const Axis& a, double snr);
double gh_mmse(const Constellation& c, double snr, int order);
double gh_equivocation(const Constellation& c, double snr, int order);
double inf_pam_mmse(double snr);
double inf_psk_mmse(double snr);
}  // namespace detail

}  // namespace fadexp
