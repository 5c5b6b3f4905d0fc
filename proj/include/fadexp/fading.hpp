#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fadexp {

enum class FadingKind { Rayleigh, Ricean, Nakagami, VectorGaussian, Custom };

// One small-t term p * t^a * (log t)^log_pow of the kernel f.
struct FadingTerm {
    double a = 0.0;
    double p = 0.0;
    int log_pow = 0;
};

class FadingModel {
public:
    static FadingModel rayleigh(double sigma);
    static FadingModel ricean(double mu_abs, double sigma);
    static FadingModel nakagami(double shape_mu, double spread_w);
    static FadingModel vector(int k, double mu_abs, double sigma);
    // q_zero = false declares an exponential factor in the kernel expansion,
    // for which no high-snr terms are produced.
    static FadingModel custom(std::vector<FadingTerm> coeffs, std::function<double(double)> density,
                              bool q_zero = true);

    FadingKind kind() const { return kind_; }
    double sigma() const { return sigma_; }
    double mu_abs() const { return mu_abs_; }
    double shape_mu() const { return shape_mu_; }
    double spread_w() const { return spread_w_; }
    int k() const { return k_; }
    bool q_zero() const { return q_zero_; }
    bool closed_form() const { return kind_ != FadingKind::Custom; }
    const std::vector<FadingTerm>& custom_terms() const { return custom_terms_; }
    const std::function<double(double)>& custom_density() const { return density_; }

    // |mu|^2 / (2 sigma^2) for the Gaussian families, 0 otherwise.
    double los_ratio() const;
    double second_moment() const; // E|h|^2
    std::string describe() const;

private:
    FadingKind kind_ = FadingKind::Rayleigh;
    double sigma_ = 1.0 / 1.4142135623730951;
    double mu_abs_ = 0.0;
    double shape_mu_ = 1.0;
    double spread_w_ = 1.0;
    int k_ = 1;
    bool q_zero_ = true;
    std::vector<FadingTerm> custom_terms_;
    std::function<double(double)> density_;
};

// f(t) = sqrt(t) f_|h|(sqrt(t)) / 2
double kernel_density(const FadingModel& m, double t);

std::vector<FadingTerm> small_t_coefficients(const FadingModel& m, int M);

// M[f; z] = int t^{z-1} f(t) dt. Closed form for the named families,
// quadrature of the density for custom models.
double mellin_f(const FadingModel& m, double z);

// Closed form continued to any z away from the poles of Gamma.
double mellin_f_any(const FadingModel& m, double z);

// d^order/dz^order of z -> M[f; 1 - z], central differences with step 1e-5.
double mellin_f_continued(const FadingModel& m, double z, int deriv_order);

// d^deriv/dz^deriv of (z - z0)^order * pi * M[f; 1 - z] / sin(pi z) at z0,
// with the removable singularity sampled symmetrically at z0 +- step.
double pole_bracket(const FadingModel& m, double z0, int order, int deriv, double step = 1e-3);

}  // namespace fadexp
