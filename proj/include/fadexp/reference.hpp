#pragma once

#include "fadexp/canonical.hpp"
#include "fadexp/fading.hpp"

#include <cstdint>
#include <random>

namespace fadexp {

enum class OracleMethod { Quadrature, MonteCarlo };
const char* to_string(OracleMethod m);

struct OracleResult {
    double value = 0.0;
    double est_abs_error = 0.0;
    OracleMethod method = OracleMethod::Quadrature;
    long n_samples = 0;
    std::uint64_t seed = 0;
};

// int f(t) g(snr t) dt over the fading kernel, g = mmse, I or H(X|Y).
OracleResult avg_mmse_quad(const FadingModel& model, const CanonicalCurve& curve, double snr,
                           double rel_tol = 1e-9);
OracleResult avg_mmse_quad(const FadingModel& model, const Constellation& input, double snr,
                           double rel_tol = 1e-9);
OracleResult avg_mi_quad(const FadingModel& model, const CanonicalCurve& curve, double snr,
                         double rel_tol = 1e-9);
OracleResult avg_mi_quad(const FadingModel& model, const Constellation& input, double snr,
                         double rel_tol = 1e-9);
// log m - avg I without the cancellation; discrete inputs.
OracleResult avg_equivocation_quad(const FadingModel& model, const CanonicalCurve& curve, double snr,
                                   double rel_tol = 1e-9);

// Mean of |h|^2 mmse(snr |h|^2). Samples are split into fixed blocks, each
// seeded from (seed, block index), so the value does not depend on the
// number of worker threads (threads = 0 reads FADEXP_THREADS).
OracleResult avg_mmse_mc(const FadingModel& model, const Constellation& input, double snr, long n_samples,
                         std::uint64_t seed, int threads = 0);

// |central difference of avg I - avg mmse| / avg mmse
double immse_check(const FadingModel& model, const Constellation& input, double snr, double h_step);

// Draws of |h|^2; exposed for tests.
class GainSampler {
public:
    explicit GainSampler(const FadingModel& model);
    double operator()(std::mt19937_64& rng) const;

private:
    FadingModel model_;
};

int worker_threads();

}  // namespace fadexp
