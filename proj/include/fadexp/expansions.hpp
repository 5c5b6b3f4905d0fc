#pragma once

#include "fadexp/constellations.hpp"
#include "fadexp/fading.hpp"

#include <limits>
#include <vector>

namespace fadexp {

enum class Regime { HighSnr, LowSnr };
const char* to_string(Regime r);

// coeff * snr^snr_pow * (log snr)^log_pow
struct ExpansionTerm {
    double coeff = 0.0;
    double snr_pow = 0.0;
    int log_pow = 0;
};

struct Expansion {
    double constant = 0.0;
    std::vector<ExpansionTerm> terms;
    Regime regime = Regime::HighSnr;
    // Remainder is O(snr^-error_order) at high snr, O(snr^error_order) at low
    // snr. For high-snr series this is the supremum of admissible orders.
    double error_order = std::numeric_limits<double>::infinity();

    // First n terms; the error order becomes that of the first dropped term.
    Expansion truncated(std::size_t n) const;
    bool empty() const { return terms.empty(); }
};

// Warns when evaluated outside the regime (high below 10, low above 0.1).
double evaluate(const Expansion& e, double snr);
double evaluate_term(const ExpansionTerm& t, double snr);

Expansion high_snr_avg_mmse_discrete(const FadingModel& model, const Constellation& input, int M = 4);
Expansion high_snr_avg_mi_discrete(const FadingModel& model, const Constellation& input, int M = 4);
Expansion high_snr_avg_mmse_continuous(const FadingModel& model, const Constellation& input, int M = 4);
Expansion low_snr_avg_mmse(const FadingModel& model, const Constellation& input, int M = 3);
Expansion low_snr_avg_mi(const FadingModel& model, const Constellation& input, int M = 3);

// Kernel coefficients with log powers, Mellin derivatives by log-weighted
// quadrature. A kernel with an exponential factor (q != 0) gives the empty
// expansion with infinite error order.
Expansion general_high_snr(const FadingModel& model, const Constellation& input, int M = 4);

// log m - int_snr^inf of a high-snr mmse expansion, term by term.
Expansion integrate_from_infinity(const Expansion& mmse, double constant);
// int_0^snr of a low-snr mmse expansion.
Expansion integrate_from_zero(const Expansion& mmse);

// Least-squares slope of -log(avg mmse) against log snr on 11 points.
double decay_rate(const FadingModel& model, const Constellation& input, double snr_lo_db, double snr_hi_db);
// Same for the gap log m - avg I of a discrete input.
double mi_gap_decay_rate(const FadingModel& model, const Constellation& input, double snr_lo_db,
                         double snr_hi_db);

}  // namespace fadexp
