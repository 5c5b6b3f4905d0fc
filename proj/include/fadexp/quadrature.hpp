#pragma once

#include <functional>
#include <vector>

namespace fadexp::quad {

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    long evals = 0;
};

using Fn = std::function<double(double)>;

// Globally adaptive 7/15-point Gauss-Kronrod over the panels given by the
// sorted breakpoints. Stops when the summed error is below
// max(abs_tol, rel_tol*|value|). Throws NonConvergence past max_panels.
Result adaptive(const Fn& f, const std::vector<double>& breaks, double rel_tol,
                double abs_tol = 0.0, int max_panels = 4000);

// Boost tanh-sinh on a finite interval.
Result tanh_sinh(const Fn& f, double a, double b, double rel_tol);

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Weight exp(-x^2) on the real line; cached per order.
const Rule& gauss_hermite(int n);
// Unit weight on [-1, 1]; cached per order.
const Rule& gauss_legendre(int n);

}  // namespace fadexp::quad
