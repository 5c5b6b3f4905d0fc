#pragma once

#include "fadexp/canonical.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fadexp {

enum class MellinMethod { AnalyticBPSK, AnalyticQPSK, AnalyticGaussian, Numeric };
const char* to_string(MellinMethod m);

// value = M[mmse; 1+z] = int t^z mmse(t) dt, except for mellin_mmse_gaussian
// which returns M[mmse; z].
struct MellinValue {
    double z = 0.0;
    double value = 0.0;
    MellinMethod method = MellinMethod::Numeric;
    double est_rel_error = 0.0;
};

MellinValue mellin_mmse_numeric(const CanonicalCurve& curve, double z);
MellinValue mellin_mmse_numeric(const Constellation& input, double z);
MellinValue mellin_mmse_bpsk(double z);
MellinValue mellin_mmse_qpsk(double z);
MellinValue mellin_mmse_gaussian(double z);

// Analytic route when the input is (a rotation-free copy of) unit BPSK or
// QPSK, numeric otherwise.
MellinValue mellin_mmse(const CanonicalCurve& curve, double z);

enum class QuadScheme { TanhSinh, GaussKronrod };

// int t^{z-1} (ln t)^n mmse(t) dt, the n-th z-derivative of M[mmse; z].
double mellin_mmse_log_weighted(const CanonicalCurve& curve, double z, int log_power,
                                QuadScheme scheme = QuadScheme::TanhSinh);

// Tail cutoff for discrete inputs and exponent shift s (1+z+s).
double mellin_tail_cutoff(double min_dist, double z);

struct Table1Row {
    std::string input;
    double z = 0.0;
    double value = 0.0;
    double est_rel_error = 0.0;
    std::optional<double> reference;
    std::optional<double> rel_deviation;
};

const std::vector<std::string>& table1_inputs();
std::vector<double> table1_z_grid();
std::optional<double> table1_reference(const std::string& input, double z);
std::vector<Table1Row> table1(const std::vector<std::string>& inputs, const std::vector<double>& z_grid);

// mmse integrated m+1 times from +infinity, evaluated at 0.
double repeated_integral_at_zero(const CanonicalCurve& curve, int m);

}  // namespace fadexp
