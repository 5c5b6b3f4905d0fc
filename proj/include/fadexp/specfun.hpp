#pragma once

namespace fadexp {

struct SpecFunResult {
    double value = 0.0;
    double est_abs_error = 0.0;
};

double gamma(double x);      // x > 0
double ln_gamma(double x);   // x > 0
double gamma_real(double x); // any real except non-positive integers
double rgamma(double x);     // 1/Gamma, zero at the poles

double erfc(double x);
double erfcx(double x); // exp(x^2) erfc(x)

double bessel_i(int nu, double x);
double bessel_i_scaled(int nu, double x); // exp(-x) I_nu(x), any x >= 0
SpecFunResult bessel_i_e(int nu, double x);

double hyp1f1(double a, double b, double x);
SpecFunResult hyp1f1_e(double a, double b, double x);

double hyp2f1(double a, double b, double c, double x);
SpecFunResult hyp2f1_e(double a, double b, double c, double x);

}  // namespace fadexp
