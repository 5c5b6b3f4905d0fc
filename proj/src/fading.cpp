#include "fadexp/fading.hpp"

#include "fadexp/errors.hpp"
#include "fadexp/specfun.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace fadexp {

namespace {

void require(bool ok, const char* msg)
{
    if (!ok) throw DomainError(msg);
}

double ipow(double x, int n) { return std::pow(x, n); }

}  // namespace

FadingModel FadingModel::rayleigh(double sigma)
{
    require(sigma > 0.0 && std::isfinite(sigma), "rayleigh: sigma must be positive");
    FadingModel m;
    m.kind_ = FadingKind::Rayleigh;
    m.sigma_ = sigma;
    return m;
}

FadingModel FadingModel::ricean(double mu_abs, double sigma)
{
    require(sigma > 0.0 && std::isfinite(sigma), "ricean: sigma must be positive");
    require(mu_abs >= 0.0 && std::isfinite(mu_abs), "ricean: |mu| must be non-negative");
    FadingModel m;
    m.kind_ = FadingKind::Ricean;
    m.sigma_ = sigma;
    m.mu_abs_ = mu_abs;
    return m;
}

FadingModel FadingModel::nakagami(double shape_mu, double spread_w)
{
    require(shape_mu >= 0.5 && std::isfinite(shape_mu), "nakagami: mu must be at least 1/2");
    require(spread_w > 0.0 && std::isfinite(spread_w), "nakagami: w must be positive");
    FadingModel m;
    m.kind_ = FadingKind::Nakagami;
    m.shape_mu_ = shape_mu;
    m.spread_w_ = spread_w;
    return m;
}

FadingModel FadingModel::vector(int k, double mu_abs, double sigma)
{
    require(k >= 1 && k <= 64, "vector: k must lie in 1..64");
    require(sigma > 0.0 && std::isfinite(sigma), "vector: sigma must be positive");
    require(mu_abs >= 0.0 && std::isfinite(mu_abs), "vector: |mu| must be non-negative");
    FadingModel m;
    m.kind_ = FadingKind::VectorGaussian;
    m.k_ = k;
    m.sigma_ = sigma;
    m.mu_abs_ = mu_abs;
    return m;
}

FadingModel FadingModel::custom(std::vector<FadingTerm> coeffs, std::function<double(double)> density,
                                bool q_zero)
{
    require(!coeffs.empty(), "custom fading: coefficients required");
    require(static_cast<bool>(density), "custom fading: density callback required");
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        require(coeffs[i].log_pow >= 0, "custom fading: log power must be non-negative");
        require(coeffs[i].a > -1.0, "custom fading: exponents must exceed -1");
        if (i > 0)
            require(coeffs[i].a > coeffs[i - 1].a ||
                        (coeffs[i].a == coeffs[i - 1].a && coeffs[i].log_pow < coeffs[i - 1].log_pow),
                    "custom fading: terms must be sorted by exponent");
    }
    FadingModel m;
    m.kind_ = FadingKind::Custom;
    m.custom_terms_ = std::move(coeffs);
    m.density_ = std::move(density);
    m.q_zero_ = q_zero;
    return m;
}

double FadingModel::los_ratio() const
{
    if (kind_ == FadingKind::Ricean || kind_ == FadingKind::VectorGaussian)
        return mu_abs_ * mu_abs_ / (2.0 * sigma_ * sigma_);
    return 0.0;
}

double FadingModel::second_moment() const
{
    switch (kind_) {
    case FadingKind::Rayleigh: return 2.0 * sigma_ * sigma_;
    case FadingKind::Ricean: return 2.0 * sigma_ * sigma_ + mu_abs_ * mu_abs_;
    case FadingKind::Nakagami: return spread_w_;
    case FadingKind::VectorGaussian: return 2.0 * k_ * sigma_ * sigma_ + mu_abs_ * mu_abs_;
    case FadingKind::Custom: return mellin_f(*this, 1.0);
    }
    return 0.0;
}

std::string FadingModel::describe() const
{
    std::ostringstream os;
    os.precision(10);
    switch (kind_) {
    case FadingKind::Rayleigh: os << "rayleigh(sigma=" << sigma_ << ")"; break;
    case FadingKind::Ricean: os << "ricean(mu=" << mu_abs_ << ",sigma=" << sigma_ << ")"; break;
    case FadingKind::Nakagami: os << "nakagami(mu=" << shape_mu_ << ",w=" << spread_w_ << ")"; break;
    case FadingKind::VectorGaussian:
        os << "vector(k=" << k_ << ",mu=" << mu_abs_ << ",sigma=" << sigma_ << ")";
        break;
    case FadingKind::Custom: os << "custom(" << custom_terms_.size() << " terms)"; break;
    }
    return os.str();
}

double kernel_density(const FadingModel& m, double t)
{
    if (!(t > 0.0)) throw DomainError("kernel_density: t must be positive");
    const double s2 = 2.0 * m.sigma() * m.sigma();
    switch (m.kind()) {
    case FadingKind::Rayleigh: return t / s2 * std::exp(-t / s2);
    case FadingKind::Ricean: {
        const double x = std::sqrt(t) * m.mu_abs() / (m.sigma() * m.sigma());
        return t / s2 * std::exp(-m.los_ratio() - t / s2 + x) * bessel_i_scaled(0, x);
    }
    case FadingKind::Nakagami: {
        const double mu = m.shape_mu(), w = m.spread_w();
        return std::exp(mu * std::log(mu / w) - ln_gamma(mu) + mu * std::log(t) - mu * t / w);
    }
    case FadingKind::VectorGaussian: {
        const int k = m.k();
        if (m.mu_abs() == 0.0)
            return std::exp(k * std::log(t / s2) - t / s2 - ln_gamma(k));
        const double mu = m.mu_abs();
        const double x = std::sqrt(t) * mu / (m.sigma() * m.sigma());
        const double lead = std::exp(0.5 * (k + 1) * std::log(t) - std::log(s2) - (k - 1) * std::log(mu) -
                                     (mu * mu + t) / s2 + x);
        return lead * bessel_i_scaled(k - 1, x);
    }
    case FadingKind::Custom: return m.custom_density()(t);
    }
    return 0.0;
}

std::vector<FadingTerm> small_t_coefficients(const FadingModel& m, int M)
{
    if (M < 0 || M > 30) throw DomainError("small_t_coefficients: M must lie in 0..30");
    std::vector<FadingTerm> out;
    const double s2 = 2.0 * m.sigma() * m.sigma();
    for (int q = 0; q < M; ++q) {
        switch (m.kind()) {
        case FadingKind::Rayleigh:
            out.push_back({q + 1.0, ipow(-1.0, q) * std::exp(-ln_gamma(q + 1.0) - (q + 1) * std::log(s2)), 0});
            break;
        case FadingKind::Ricean: {
            const double mu2 = m.mu_abs() * m.mu_abs();
            double p = 0.0;
            for (int l = 0; l <= q; ++l) {
                const double mag = std::exp(-ln_gamma(q - l + 1.0) - (q + l + 1) * std::log(s2) -
                                            2.0 * ln_gamma(l + 1.0)) *
                                   ipow(mu2, l);
                p += ((q - l) % 2 ? -mag : mag);
            }
            out.push_back({q + 1.0, std::exp(-m.los_ratio()) * p, 0});
            break;
        }
        case FadingKind::Nakagami: {
            const double mu = m.shape_mu(), w = m.spread_w();
            const double mag = std::exp(mu * std::log(mu / w) - ln_gamma(mu) + q * std::log(mu / w) -
                                        ln_gamma(q + 1.0));
            out.push_back({q + mu, q % 2 ? -mag : mag, 0});
            break;
        }
        case FadingKind::VectorGaussian: {
            const int k = m.k();
            const double mu2 = m.mu_abs() * m.mu_abs();
            double p = 0.0;
            for (int b = 0; b <= q; ++b) {
                if (b > 0 && mu2 == 0.0) break;
                const double mag = std::exp(-ln_gamma(q - b + 1.0) - (q + b + k) * std::log(s2) -
                                            ln_gamma(b + 1.0) - ln_gamma(b + double(k))) *
                                   ipow(mu2, b);
                p += ((q - b) % 2 ? -mag : mag);
            }
            out.push_back({double(q + k), std::exp(-m.los_ratio()) * p, 0});
            break;
        }
        case FadingKind::Custom:
            if (q < static_cast<int>(m.custom_terms().size())) out.push_back(m.custom_terms()[q]);
            break;
        }
    }
    return out;
}

double mellin_f_any(const FadingModel& m, double z)
{
    const double s2 = 2.0 * m.sigma() * m.sigma();
    switch (m.kind()) {
    case FadingKind::Rayleigh: return std::pow(s2, z) * gamma_real(z + 1.0);
    case FadingKind::Ricean: {
        const double a = m.los_ratio();
        return std::exp(-a) * std::pow(s2, z) * gamma_real(z + 1.0) * hyp1f1(z + 1.0, 1.0, a);
    }
    case FadingKind::Nakagami: {
        const double mu = m.shape_mu(), w = m.spread_w();
        return std::pow(w / mu, z) * gamma_real(z + mu) / gamma(mu);
    }
    case FadingKind::VectorGaussian: {
        const int k = m.k();
        const double a = m.los_ratio();
        return std::exp(-a) * std::pow(s2, z) * gamma_real(z + k) / gamma(k) * hyp1f1(z + k, k, a);
    }
    case FadingKind::Custom: break;
    }
    throw DomainError("mellin_f: closed form unavailable for custom fading");
}

double mellin_f(const FadingModel& m, double z)
{
    switch (m.kind()) {
    case FadingKind::Rayleigh:
    case FadingKind::Ricean:
        if (!(z > -1.0)) throw DomainError("mellin_f: z must exceed -1");
        return mellin_f_any(m, z);
    case FadingKind::Nakagami:
        if (!(z > -m.shape_mu())) throw DomainError("mellin_f: z must exceed -mu");
        return mellin_f_any(m, z);
    case FadingKind::VectorGaussian:
        if (!(z > -m.k())) throw DomainError("mellin_f: z must exceed -k");
        return mellin_f_any(m, z);
    case FadingKind::Custom: break;
    }
    if (!(z > -m.custom_terms().front().a)) throw DomainError("mellin_f: z below the kernel strip");
    const auto& f = m.custom_density();
    boost::math::quadrature::exp_sinh<double> es;
    double err = 0.0;
    const double v = es.integrate([&](double t) { return t > 0.0 ? std::pow(t, z - 1.0) * f(t) : 0.0; },
                                  0.0, std::numeric_limits<double>::infinity(), 1e-10, &err);
    return v;
}

double mellin_f_continued(const FadingModel& m, double z, int deriv_order)
{
    if (!m.closed_form()) throw DomainError("mellin_f_continued: closed-form model required");
    auto F = [&](double x) { return mellin_f_any(m, 1.0 - x); };
    auto diff = [&](double h) {
        switch (deriv_order) {
        case 0: return F(z);
        case 1: return (F(z + h) - F(z - h)) / (2.0 * h);
        case 2: return (F(z + h) - 2.0 * F(z) + F(z - h)) / (h * h);
        default: throw DomainError("mellin_f_continued: derivative order must lie in 0..2");
        }
    };
    const double v = diff(1e-5);
    if (deriv_order > 0) {
        const double v2 = diff(2e-5);
        if (std::fabs(v - v2) > 1e-4 * std::max(1.0, std::fabs(v)))
            throw NonConvergence("mellin_f_continued: step contraction failed", v, std::fabs(v - v2));
    }
    return v;
}

double pole_bracket(const FadingModel& m, double z0, int order, int deriv, double step)
{
    auto G = [&](double z) {
        const double e = z - z0;
        return std::pow(e, order) * M_PI * mellin_f_any(m, 1.0 - z) / std::sin(M_PI * z);
    };
    const double gp1 = G(z0 + step), gm1 = G(z0 - step), gp2 = G(z0 + 2 * step), gm2 = G(z0 - 2 * step);
    if (deriv == 0) return (4.0 * (gp1 + gm1) / 2.0 - (gp2 + gm2) / 2.0) / 3.0;
    if (deriv == 1) return (8.0 * (gp1 - gm1) - (gp2 - gm2)) / (12.0 * step);
    throw DomainError("pole_bracket: derivative order must be 0 or 1");
}

}  // namespace fadexp
