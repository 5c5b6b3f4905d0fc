#include "fadexp/powalloc.hpp"

#include "fadexp/canonical.hpp"
#include "fadexp/errors.hpp"
#include "fadexp/mellin.hpp"
#include "fadexp/reference.hpp"

#include <cmath>
// pchip.hpp in Boost 1.74 calls isnan unqualified
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <map>
#include <memory>

namespace fadexp {

const char* to_string(AllocMethod m)
{
    return m == AllocMethod::ExactKKT ? "exact" : "asymptotic";
}

void ChannelBank::validate() const
{
    if (subchannels.empty()) throw ConfigError("bank: at least one subchannel required");
    if (!(total_power > 0.0) || !std::isfinite(total_power)) throw ConfigError("bank: total power must be positive");
    for (const auto& s : subchannels) {
        if (!s.input.is_discrete()) throw ConfigError("bank: subchannel inputs must be discrete");
        if (!std::isfinite(s.fading.second_moment())) throw ConfigError("bank: E|h|^2 must be finite");
    }
}

namespace {

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

// K(p) = snr avg_mmse(snr p), strictly decreasing in p.
class Channel {
public:
    Channel(const Subchannel& s, double snr) : sub_(s), curve_(s.input), snr_(snr)
    {
        k0_ = snr * s.fading.second_moment() * power(s.input);
    }

    double K(double p)
    {
        if (p <= 0.0) return k0_;
        auto it = memo_.find(p);
        if (it != memo_.end()) return it->second;
        const double v = snr_ * avg_mmse_quad(sub_.fading, curve_, snr_ * p, 1e-11).value;
        memo_[p] = v;
        return v;
    }

    double K0() const { return k0_; }

    void build_table(double P)
    {
        std::vector<double> x, y;
        // only brackets come from the table, so a loose oracle suffices
        for (double lx = std::log(P) - 20.0; lx <= std::log(P) + 1e-12; lx += 0.5) {
            x.push_back(lx);
            y.push_back(std::log(snr_ * avg_mmse_quad(sub_.fading, curve_, snr_ * std::exp(lx), 1e-6).value));
        }
        x_lo_ = x.front();
        x_hi_ = x.back();
        table_ = std::make_unique<Pchip>(std::move(x), std::move(y));
    }

    // Inverse from the interpolant, clamped to [0, P].
    double p_table(double lambda) const
    {
        if (lambda >= k0_) return 0.0;
        const double ly = std::log(lambda);
        if ((*table_)(x_hi_) >= ly) return std::exp(x_hi_);
        if ((*table_)(x_lo_) <= ly) return 0.0;
        double a = x_lo_, b = x_hi_;
        for (int i = 0; i < 80; ++i) {
            const double m = 0.5 * (a + b);
            ((*table_)(m) > ly ? a : b) = m;
        }
        return std::exp(0.5 * (a + b));
    }

    // Exact inverse, solved in x = ln p near the interpolant's guess.
    double p_exact(double lambda, double guess)
    {
        if (lambda >= k0_) return 0.0;
        const double ly = std::log(lambda);
        auto F = [&](double x) { return std::log(K(std::exp(x))) - ly; };
        double x0 = guess > 0.0 ? std::log(guess) : x_lo_;
        double a = x0 - 0.02, b = x0 + 0.02;
        double fa = F(a), fb = F(b);
        for (int i = 0; fa < 0.0 && i < 60; ++i) {
            a -= 0.5 * (i + 1);
            fa = F(a);
        }
        for (int i = 0; fb > 0.0 && i < 60; ++i) {
            b += 0.5 * (i + 1);
            fb = F(b);
        }
        if (fa < 0.0 || fb > 0.0) {
            if (fa < 0.0 && a < x_lo_ - 30.0) return 0.0; // K flat at K0 to double precision
            throw NonConvergence("exact_allocation: no bracket for the channel inverse", std::nan(""), std::nan(""));
        }
        boost::uintmax_t iters = 200;
        auto tol = [](double u, double v) { return std::fabs(u - v) <= 1e-12; };
        const auto r = boost::math::tools::toms748_solve(F, a, b, fa, fb, tol, iters);
        return std::exp(0.5 * (r.first + r.second));
    }

    const Subchannel& sub() const { return sub_; }
    const CanonicalCurve& curve() const { return curve_; }

private:
    const Subchannel& sub_;
    CanonicalCurve curve_;
    double snr_;
    double k0_ = 0.0;
    std::map<double, double> memo_;
    std::unique_ptr<Pchip> table_;
    double x_lo_ = 0.0, x_hi_ = 0.0;
};

double kkt_residual(std::vector<Channel>& ch, const std::vector<double>& p, double lambda)
{
    double r = 0.0;
    for (std::size_t i = 0; i < ch.size(); ++i) {
        if (p[i] > 0.0)
            r = std::max(r, std::fabs(ch[i].K(p[i]) - lambda) / lambda);
        else if (ch[i].K0() > lambda)
            r = std::max(r, (ch[i].K0() - lambda) / lambda);
    }
    return r;
}

}  // namespace

double constrained_capacity(const ChannelBank& bank, double snr, const PowerAllocation& alloc)
{
    if (alloc.p.size() != bank.subchannels.size()) throw DomainError("capacity: allocation size mismatch");
    double c = 0.0;
    for (std::size_t i = 0; i < alloc.p.size(); ++i) {
        if (alloc.p[i] < 0.0) throw DomainError("capacity: negative power");
        c += avg_mi_quad(bank.subchannels[i].fading, bank.subchannels[i].input, snr * alloc.p[i]).value;
    }
    return c;
}

PowerAllocation exact_allocation(const ChannelBank& bank, double snr)
{
    bank.validate();
    if (!(snr > 0.0)) throw DomainError("exact_allocation: snr must be positive");
    const double P = bank.total_power;
    std::vector<Channel> ch;
    ch.reserve(bank.subchannels.size());
    for (const auto& s : bank.subchannels) ch.emplace_back(s, snr);
    const std::size_t k = ch.size();

    PowerAllocation out;
    out.method = AllocMethod::ExactKKT;
    if (k == 1) {
        out.p = {P};
        out.lambda = ch[0].K(P);
        out.kkt_residual = 0.0;
        out.capacity = constrained_capacity(bank, snr, out);
        return out;
    }

    double lam_lo = ch[0].K(P), lam_hi = ch[0].K0();
    for (auto& c : ch) {
        c.build_table(P);
        lam_lo = std::min(lam_lo, c.K(P));
        lam_hi = std::max(lam_hi, c.K0());
    }

    // interpolant stage: bisection in ln lambda
    auto S_table = [&](double lam) {
        double s = 0.0;
        for (auto& c : ch) s += c.p_table(lam);
        return s - P;
    };
    double a = std::log(lam_lo), b = std::log(lam_hi);
    for (int i = 0; i < 100; ++i) {
        const double m = 0.5 * (a + b);
        (S_table(std::exp(m)) > 0.0 ? a : b) = m;
    }
    const double lam_t = std::exp(0.5 * (a + b));

    // exact stage
    std::vector<double> guess(k);
    for (std::size_t i = 0; i < k; ++i) guess[i] = ch[i].p_table(lam_t);
    std::vector<double> p(k);
    auto S_exact = [&](double llam) {
        const double lam = std::exp(llam);
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            p[i] = ch[i].p_exact(lam, guess[i]);
            s += p[i];
        }
        return s / P - 1.0;
    };
    double la = std::log(lam_t) - 1e-3, lb = std::log(lam_t) + 1e-3;
    double fa = S_exact(la), fb = S_exact(lb);
    for (int i = 0; fa < 0.0 && i < 40; ++i) fa = S_exact(la -= 0.05 * (i + 1));
    for (int i = 0; fb > 0.0 && i < 40; ++i) fb = S_exact(lb += 0.05 * (i + 1));
    if (fa < 0.0 || fb > 0.0)
        throw NonConvergence("exact_allocation: water level not bracketed (non-monotone oracle?)", lam_t, lam_t);
    boost::uintmax_t iters = 200;
    auto tol = [](double u, double v) { return std::fabs(u - v) <= 1e-10; };
    const auto r = boost::math::tools::toms748_solve(S_exact, la, lb, fa, fb, tol, iters);
    const double llam = 0.5 * (r.first + r.second);
    S_exact(llam);
    out.lambda = std::exp(llam);

    double sum = 0.0;
    for (double v : p) sum += v;
    for (double& v : p) v *= P / sum;
    out.p = p;
    out.kkt_residual = kkt_residual(ch, out.p, out.lambda);
    out.capacity = constrained_capacity(bank, snr, out);
    return out;
}

PowerAllocation asymptotic_allocation(const ChannelBank& bank, double snr)
{
    bank.validate();
    if (!(snr > 0.0)) throw DomainError("asymptotic_allocation: snr must be positive");
    const double P = bank.total_power;
    std::vector<double> root_tau;
    double sum = 0.0;
    for (const auto& s : bank.subchannels) {
        const auto kind = s.fading.kind();
        const bool ricean_like = kind == FadingKind::Rayleigh || kind == FadingKind::Ricean ||
                                 (kind == FadingKind::VectorGaussian && s.fading.k() == 1);
        if (!ricean_like) throw DomainError("asymptotic_allocation: Rayleigh or Ricean subchannels required");
        const double two_s2 = 2.0 * s.fading.sigma() * s.fading.sigma();
        const double m2 = mellin_mmse(CanonicalCurve(s.input), 1.0).value;
        const double tau = std::exp(-s.fading.los_ratio()) * m2 / two_s2;
        root_tau.push_back(std::sqrt(tau));
        sum += root_tau.back();
    }
    PowerAllocation out;
    out.method = AllocMethod::Asymptotic;
    for (double r : root_tau) out.p.push_back(P * r / sum);
    out.lambda = (sum / P) * (sum / P) / snr;
    double res = 0.0;
    for (std::size_t i = 0; i < out.p.size(); ++i) {
        const auto& s = bank.subchannels[i];
        const double K = snr * avg_mmse_quad(s.fading, s.input, snr * out.p[i]).value;
        res = std::max(res, std::fabs(K - out.lambda) / out.lambda);
    }
    out.kkt_residual = res;
    out.capacity = constrained_capacity(bank, snr, out);
    return out;
}

}  // namespace fadexp
