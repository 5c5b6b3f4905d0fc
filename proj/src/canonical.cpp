#include "fadexp/canonical.hpp"

#include "fadexp/errors.hpp"
#include "fadexp/quadrature.hpp"
#include "fadexp/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <string>
#include <unordered_map>

namespace fadexp {

namespace {

constexpr double kAxisTol = 1e-11;

std::vector<double> panel_breaks(double lo, double hi, std::vector<double> extra, double max_width)
{
    std::vector<double> b{lo, hi};
    for (double x : extra)
        if (x > lo && x < hi) b.push_back(x);
    std::sort(b.begin(), b.end());
    std::vector<double> out{b.front()};
    for (std::size_t i = 1; i < b.size(); ++i) {
        const double w = b[i] - out.back();
        if (w < 1e-9 * std::max(1.0, std::fabs(b[i]))) continue;
        const int n = static_cast<int>(std::ceil(w / max_width));
        const double a = out.back();
        for (int k = 1; k <= n; ++k) out.push_back(a + w * k / n);
    }
    return out;
}

// Index of the mirror image of point i (same probability), or -1.
std::vector<int> mirrors(const Axis& a)
{
    std::vector<int> m(a.points.size(), -1);
    for (std::size_t i = 0; i < a.points.size(); ++i)
        for (std::size_t j = 0; j < a.points.size(); ++j)
            if (std::fabs(a.points[i] + a.points[j]) < 1e-13 && std::fabs(a.probs[i] - a.probs[j]) < 1e-15)
                m[i] = static_cast<int>(j);
    return m;
}

enum class AxisQty { Mmse, Equivocation };

double axis_quantity(const Axis& a, double snr, AxisQty q)
{
    const std::size_t m = a.points.size();
    const double rs = std::sqrt(snr);
    const auto mir = mirrors(a);
    std::vector<double> done(m, -1.0);
    double total = 0.0;
    std::vector<double> lw(m), dl(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (mir[i] >= 0 && done[mir[i]] >= 0.0) {
            total += a.probs[i] * done[mir[i]];
            continue;
        }
        double dmin = std::numeric_limits<double>::infinity();
        std::vector<double> mids;
        for (std::size_t j = 0; j < m; ++j) {
            const double d = a.points[i] - a.points[j];
            dl[j] = d;
            lw[j] = std::log(a.probs[j] / a.probs[i]) - snr * d * d;
            if (j != i) {
                dmin = std::min(dmin, std::fabs(d));
                mids.push_back(-rs * d / 2.0);
                mids.push_back(-rs * d / 2.0 - 2.0);
                mids.push_back(-rs * d / 2.0 + 2.0);
            }
        }
        const double B = std::sqrt(snr * dmin * dmin / 4.0 + 60.0) + 3.0;
        auto f = [&](double u) {
            double emax = 0.0;
            std::size_t jmax = i;
            for (std::size_t j = 0; j < m; ++j) {
                const double l = lw[j] - 2.0 * rs * dl[j] * u;
                if (l > emax) {
                    emax = l;
                    jmax = j;
                }
            }
            double rest = 0.0, e = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double w = std::exp(lw[j] - 2.0 * rs * dl[j] * u - emax);
                if (j != jmax) rest += w;
                e += w * dl[j];
            }
            const double g = std::exp(-u * u) / std::sqrt(M_PI);
            if (q == AxisQty::Mmse) {
                e /= 1.0 + rest;
                return g * e * e;
            }
            return g * (emax + std::log1p(rest));
        };
        const auto r = quad::adaptive(f, panel_breaks(-B, B, mids, 4.0), kAxisTol, 1e-300);
        done[i] = r.value;
        total += a.probs[i] * r.value;
    }
    return total;
}

// Complex noise, tensor Gauss-Hermite.
double gh_quantity(const Constellation& c, double snr, int order, AxisQty q)
{
    const auto& rule = quad::gauss_hermite(order);
    const std::size_t m = c.size();
    const double rs = std::sqrt(snr);
    const auto& pts = c.points();
    const auto& pr = c.probs();
    double total = 0.0;
    std::vector<double> lw(m);
    std::vector<cplx> d(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            d[j] = pts[i] - pts[j];
            lw[j] = std::log(pr[j] / pr[i]) - snr * std::norm(d[j]);
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.x.size(); ++k) {
            // pairs below 1e-20 carry at most ~1e-14 of a bounded integrand
            if (rule.w[k] < 1e-20) continue;
            for (std::size_t l = 0; l < rule.x.size(); ++l) {
                if (rule.w[k] * rule.w[l] < 1e-20) continue;
                const cplx n(rule.x[k], rule.x[l]);
                double emax = 0.0;
                std::size_t jmax = i;
                for (std::size_t j = 0; j < m; ++j) {
                    const double l = lw[j] - 2.0 * rs * std::real(d[j] * std::conj(n));
                    if (l > emax) {
                        emax = l;
                        jmax = j;
                    }
                }
                double rest = 0.0;
                cplx e = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    const double w = std::exp(lw[j] - 2.0 * rs * std::real(d[j] * std::conj(n)) - emax);
                    if (j != jmax) rest += w;
                    e += w * d[j];
                }
                const double val = q == AxisQty::Mmse ? std::norm(e / (1.0 + rest)) : emax + std::log1p(rest);
                acc += rule.w[k] * rule.w[l] * val;
            }
        }
        total += pr[i] * acc / M_PI;
    }
    return total;
}

double checked_gh(const Constellation& c, double snr, int order, AxisQty q)
{
    // transition layers of width ~1/sqrt(snr) near mid-snr need more nodes
    double coarse = gh_quantity(c, snr, std::max(8, order / 2), q);
    double v = gh_quantity(c, snr, order, q);
    while (std::fabs(v - coarse) > 1e-9 && order < 512) {
        order *= 2;
        coarse = v;
        v = gh_quantity(c, snr, order, q);
    }
    if (std::fabs(v - coarse) > 1e-9)
        warn("Gauss-Hermite order " + std::to_string(order) + " not converged at snr " + std::to_string(snr));
    return v;
}

// Conditional variance times mass of a unit Gaussian restricted to [al, be].
// Returns {Z, v} with Z = P(al < N < be), v = Var(N | al < N < be).
std::pair<double, double> truncated_normal(double al, double be)
{
    auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
    if (be < 0.0) {
        std::swap(al, be);
        al = -al;
        be = -be;
    }
    if (al >= 0.0) {
        // Both limits on one side: Mills ratios avoid the cancellation.
        auto R = [](double x) { return std::sqrt(M_PI / 2.0) * erfcx(x / std::sqrt(2.0)); };
        const double r = std::exp(-0.5 * (be * be - al * al));
        const double D = R(al) - r * R(be);
        const double delta = (1.0 - r) / D;
        const double v = 1.0 + (al - be * r) / D - delta * delta;
        return {phi(al) * D, std::max(v, 0.0)};
    }
    const double Z = 1.0 - 0.5 * std::erfc(-al / std::sqrt(2.0)) - 0.5 * std::erfc(be / std::sqrt(2.0));
    const double pa = phi(al), pb = phi(be);
    const double delta = (pa - pb) / Z;
    const double v = 1.0 + (al * pa - be * pb) / Z - delta * delta;
    return {Z, std::max(v, 0.0)};
}

}  // namespace

namespace detail {

double axis_mmse(const Axis& a, double snr) { return axis_quantity(a, snr, AxisQty::Mmse); }
double axis_equivocation(const Axis& a, double snr)
{
    return axis_quantity(a, snr, AxisQty::Equivocation);
}
double gh_mmse(const Constellation& c, double snr, int order)
{
    return gh_quantity(c, snr, order, AxisQty::Mmse);
}
double gh_equivocation(const Constellation& c, double snr, int order)
{
    return gh_quantity(c, snr, order, AxisQty::Equivocation);
}

double inf_pam_mmse(double snr)
{
    if (snr == 0.0) return 1.0;
    const double c = std::sqrt(3.0);
    const double sig = 1.0 / std::sqrt(2.0 * snr);
    // Integrate over the posterior centre m = y / sqrt(snr):
    // mmse = (1/(2c)) int Z(m) Var(x | m) dm.
    std::function<double(double)> g;
    if (sig >= 0.3) {
        const auto& gl = quad::gauss_legendre(64);
        g = [&, sig, c](double m) {
            double emax = -std::numeric_limits<double>::infinity();
            std::vector<double> e(gl.x.size());
            for (std::size_t k = 0; k < e.size(); ++k) {
                const double x = c * gl.x[k];
                e[k] = -(x - m) * (x - m) / (2.0 * sig * sig);
                emax = std::max(emax, e[k]);
            }
            double W = 0.0, mean = 0.0;
            for (std::size_t k = 0; k < e.size(); ++k) {
                e[k] = gl.w[k] * std::exp(e[k] - emax);
                W += e[k];
                mean += e[k] * c * gl.x[k];
            }
            mean /= W;
            double var = 0.0;
            for (std::size_t k = 0; k < e.size(); ++k) {
                const double dx = c * gl.x[k] - mean;
                var += e[k] * dx * dx;
            }
            var /= W;
            const double Z = c * W * std::exp(emax) / (sig * std::sqrt(2.0 * M_PI));
            return Z * var;
        };
    } else {
        g = [sig, c](double m) {
            const auto [Z, v] = truncated_normal((-c - m) / sig, (c - m) / sig);
            return Z * sig * sig * v;
        };
    }
    const double L = c + 12.0 * sig;
    std::vector<double> ex{0.0, -c, c, -c - 3 * sig, -c + 3 * sig, c - 3 * sig, c + 3 * sig};
    const auto r = quad::adaptive(g, panel_breaks(-L, L, ex, std::max(0.5, 4.0 * sig)), 1e-11, 1e-300);
    return r.value / (2.0 * c);
}

double inf_psk_mmse(double snr)
{
    if (snr == 0.0) return 1.0;
    const double rs = std::sqrt(snr);
    // |y| given x = 1 is Rice(sqrt(snr), 1/2); posterior of the phase is von
    // Mises with concentration 2 sqrt(snr) |y|, so E[x|y] has modulus I1/I0.
    auto g = [rs](double r) {
        const double k = 2.0 * r * rs;
        const double i0 = bessel_i_scaled(0, k);
        double om;
        if (k > 2000.0) {
            // 1 - I1/I0 loses digits to cancellation here
            const double u = 1.0 / k;
            om = u * (0.5 + u * (0.125 + u * (0.125 + u * (25.0 / 128 + u * 13.0 / 32))));
        } else {
            om = (i0 - bessel_i_scaled(1, k)) / i0;
        }
        const double dens = 2.0 * r * std::exp(-(r - rs) * (r - rs)) * i0;
        return dens * om * (2.0 - om);
    };
    const double lo = std::max(0.0, rs - 10.0), hi = rs + 10.0;
    const auto r = quad::adaptive(g, panel_breaks(lo, hi, {rs, rs - 3, rs + 3}, 2.0), 1e-11, 1e-300);
    return r.value;
}

}  // namespace detail

struct CanonicalCurve::Cache {
    std::mutex mu;
    bool enabled = true;
    std::unordered_map<std::uint64_t, double> mmse;
};

CanonicalCurve::CanonicalCurve(Constellation input, int quadrature_order)
    : input_(std::move(input)), order_(quadrature_order), cache_(std::make_shared<Cache>())
{
    if (order_ < 8 || order_ > 256) throw DomainError("quadrature order must lie in 8..256");
    axes_ = separable_axes(input_);
}

void CanonicalCurve::set_cache_enabled(bool on) const
{
    std::lock_guard lk(cache_->mu);
    cache_->enabled = on;
    if (!on) cache_->mmse.clear();
}

double CanonicalCurve::mmse(double snr) const
{
    if (!(snr >= 0.0) || !std::isfinite(snr)) throw DomainError("mmse: snr must be finite and >= 0");
    std::uint64_t key;
    std::memcpy(&key, &snr, sizeof key);
    {
        std::lock_guard lk(cache_->mu);
        if (cache_->enabled) {
            auto it = cache_->mmse.find(key);
            if (it != cache_->mmse.end()) return it->second;
        }
    }
    const double v = mmse_uncached(snr);
    std::lock_guard lk(cache_->mu);
    if (cache_->enabled) {
        if (cache_->mmse.size() > 200000) cache_->mmse.clear();
        cache_->mmse.emplace(key, v);
    }
    return v;
}

double CanonicalCurve::mmse_uncached(double snr) const
{
    switch (input_.kind()) {
    case InputKind::Gaussian: return 1.0 / (1.0 + snr);
    case InputKind::InfPAM: return detail::inf_pam_mmse(snr);
    case InputKind::InfQAM: return detail::inf_pam_mmse(snr / 2.0);
    case InputKind::InfPSK: return detail::inf_psk_mmse(snr);
    case InputKind::Discrete: break;
    }
    if (snr == 0.0) return variance(input_);
    if (!axes_.empty()) {
        double s = 0.0;
        for (const auto& a : axes_) s += detail::axis_mmse(a, snr);
        return s;
    }
    return checked_gh(input_, snr, order_, AxisQty::Mmse);
}

double CanonicalCurve::equivocation(double snr) const
{
    if (!input_.is_discrete()) throw DomainError("equivocation: discrete input required");
    if (!(snr >= 0.0)) throw DomainError("equivocation: snr must be >= 0");
    if (snr == 0.0) return entropy(input_);
    if (!axes_.empty()) {
        double s = 0.0;
        for (const auto& a : axes_) s += detail::axis_equivocation(a, snr);
        return s;
    }
    return checked_gh(input_, snr, order_, AxisQty::Equivocation);
}

double CanonicalCurve::mutual_information(double snr) const
{
    if (!(snr >= 0.0)) throw DomainError("mutual_information: snr must be >= 0");
    if (input_.kind() == InputKind::Gaussian) return std::log1p(snr);
    if (!input_.is_discrete())
        throw DomainError("mutual_information: not available for " + input_.label());
    const double h = entropy(input_);
    return std::clamp(h - equivocation(snr), 0.0, h);
}

Derivative CanonicalCurve::mmse_deriv_at_zero(int order) const
{
    if (order < 0 || order > 6) throw DomainError("derivative order must lie in 0..6");
    if (input_.kind() == InputKind::Gaussian) {
        double f = 1.0;
        for (int k = 2; k <= order; ++k) f *= k;
        return {order % 2 ? -f : f, 0.0, true};
    }
    if (order == 0) return {mmse(0.0), 0.0, true};
    auto d = one_sided_derivative([this](double s) { return mmse(s); }, order);
    if (!d.contracted)
        warn("mmse derivative of order " + std::to_string(order) + " at 0+ is noisy for " +
             input_.label());
    return d;
}

double mmse(const CanonicalCurve& c, double snr) { return c.mmse(snr); }
double mutual_information(const CanonicalCurve& c, double snr) { return c.mutual_information(snr); }
Derivative mmse_deriv_at_zero(const CanonicalCurve& c, int order) { return c.mmse_deriv_at_zero(order); }

DecayParams decay_params(const Constellation& input)
{
    switch (input.kind()) {
    case InputKind::InfPSK: return {0.5, 1.0, 2.0};
    case InputKind::InfPAM: return {0.5, 1.0, 1.5};
    case InputKind::InfQAM: return {1.0, 1.0, 1.5};
    default: throw DomainError("decay_params: InfPSK, InfPAM or InfQAM required");
    }
}

namespace {

// Fornberg weights for the n-th derivative at 0 on nodes 0, 1, ..., N-1.
std::vector<double> forward_weights(int n, int N)
{
    std::vector<std::vector<double>> C(N, std::vector<double>(n + 1, 0.0));
    C[0][0] = 1.0;
    double c1 = 1.0, c4 = 0.0;
    for (int i = 1; i < N; ++i) {
        const int mn = std::min(i, n);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = i;
        for (int j = 0; j < i; ++j) {
            const double c3 = i - j;
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) C[i][k] = c1 * (k * C[i - 1][k - 1] - c5 * C[i - 1][k]) / c2;
                C[i][0] = -c1 * c5 * C[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) C[j][k] = (c4 * C[j][k] - k * C[j][k - 1]) / c3;
            C[j][0] = c4 * C[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(N);
    for (int i = 0; i < N; ++i) w[i] = C[i][n];
    return w;
}

}  // namespace

Derivative one_sided_derivative(const std::function<double(double)>& f, int order, double h0, int levels)
{
    if (order < 1) return {f(0.0), 0.0, true};
    constexpr int p = 4;
    const int N = order + p;
    const auto w = forward_weights(order, N);
    std::vector<std::vector<double>> T(levels);
    double best = 0.0, best_err = std::numeric_limits<double>::infinity();
    for (int k = 0; k < levels; ++k) {
        const double h = h0 / std::pow(2.0, k);
        double s = 0.0;
        for (int i = 0; i < N; ++i) s += w[i] * f(i * h);
        T[k].push_back(s / std::pow(h, order));
        for (int j = 1; j <= k; ++j) {
            const double fac = std::pow(2.0, p + j - 1) - 1.0;
            T[k].push_back(T[k][j - 1] + (T[k][j - 1] - T[k - 1][j - 1]) / fac);
        }
        if (k > 0) {
            const double err = std::fabs(T[k][k] - T[k - 1][k - 1]);
            if (err < best_err) {
                best_err = err;
                best = T[k][k];
            }
        }
    }
    const bool ok = best_err <= 1e-4 * std::max(1.0, std::fabs(best));
    return {best, best_err, ok};
}

}  // namespace fadexp
