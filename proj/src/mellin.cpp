#include "fadexp/mellin.hpp"

#include "fadexp/errors.hpp"
#include "fadexp/quadrature.hpp"
#include "fadexp/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fadexp {

const char* to_string(MellinMethod m)
{
    switch (m) {
    case MellinMethod::AnalyticBPSK: return "analytic_bpsk";
    case MellinMethod::AnalyticQPSK: return "analytic_qpsk";
    case MellinMethod::AnalyticGaussian: return "analytic_gaussian";
    case MellinMethod::Numeric: return "numeric";
    }
    return "?";
}

double mellin_tail_cutoff(double min_dist, double z)
{
    return std::max(50.0, 8.0 * (4.0 / (min_dist * min_dist)) * std::log(10.0) * (z + 2.0));
}

namespace {

// t^z mmse(t) on [0, T] with t = u^2, then grow T until the exponential
// envelope puts the remainder below 1e-12 of the value.
MellinValue numeric_discrete(const CanonicalCurve& c, double z, int log_power, QuadScheme scheme)
{
    const double d = min_distance(c.input());
    const double rate = d * d / 4.0;
    double T = mellin_tail_cutoff(d, z + log_power);
    for (int attempt = 0; attempt < 6; ++attempt) {
        quad::Result r;
        if (scheme == QuadScheme::TanhSinh) {
            auto g = [&](double u) {
                if (u <= 0.0) return 0.0;
                const double t = u * u;
                double w = 2.0 * std::pow(u, 2.0 * z + 1.0);
                if (log_power > 0) w *= std::pow(2.0 * std::log(u), log_power);
                return w * c.mmse(t);
            };
            r = quad::tanh_sinh(g, 0.0, std::sqrt(T), 1e-10);
        } else {
            // logarithmic variable w = ln t
            auto g = [&](double w) {
                const double t = std::exp(w);
                return std::exp((z + 1.0) * w) * std::pow(w, log_power) * c.mmse(t);
            };
            const double lo = -(40.0 + 8.0 * log_power) / std::max(z + 1.0, 0.05);
            std::vector<double> br;
            for (double w = lo; w < std::log(T); w += 1.0) br.push_back(w);
            br.push_back(std::log(T));
            r = quad::adaptive(g, br, 1e-10, 0.0);
        }
        const double mT = c.mmse(T);
        double tail = 0.0;
        if (rate > z / T) {
            tail = mT * std::pow(T, z) * std::pow(std::log(T), log_power) / (rate - z / T);
        } else {
            tail = std::numeric_limits<double>::infinity();
        }
        if (tail <= 1e-12 * std::fabs(r.value)) {
            const double rel = (r.abs_error + tail) / std::fabs(r.value);
            return {z, r.value, MellinValue{}.method, std::max(rel, 1e-15)};
        }
        T *= 1.5;
    }
    throw NonConvergence("mellin: tail bound not reached", std::nan(""), std::nan(""));
}

// Continuous inputs: mmse decays like zeta/t, so the transform converges for
// -1 < z < 0 and is continued to 0 < z < r1 - 1 by subtracting the leading
// term on [1, inf).
MellinValue numeric_continuous(const CanonicalCurve& c, double z)
{
    double zeta = 0.0, r1 = 2.0;
    if (c.input().kind() == InputKind::Gaussian) {
        zeta = 1.0;
        r1 = 1.0; // next term is -1/t^2 but continuation past 0 hits the pole at 1+z = 1
    } else {
        const auto dp = decay_params(c.input());
        zeta = dp.zeta;
        r1 = dp.r1;
    }
    const bool continued = z > 0.0;
    if (!(z > -1.0) || z == 0.0 || (continued && !(z < r1 - 1.0)))
        throw DomainError("mellin: z outside the convergence strip for " + c.input().label());

    // t = v^{1/(1+z)} removes the weight at the origin
    auto head = quad::tanh_sinh(
        [&](double v) { return v > 0.0 ? c.mmse(std::pow(v, 1.0 / (1.0 + z))) / (1.0 + z) : c.mmse(0.0) / (1.0 + z); },
        0.0, 1.0, 1e-12);
    quad::Result tail;
    double extra = 0.0;
    if (!continued) {
        // t = w^{1/z} on [1, inf): integrand tends to zeta/|z|; beyond Tb
        // t mmse(t) follows zeta + c t^{1-r1}
        const double Tb = 1e7;
        const double cb = (Tb * c.mmse(Tb) - zeta) * std::pow(Tb, r1 - 1.0);
        tail = quad::tanh_sinh(
            [&](double w) {
                const double t = std::pow(w, 1.0 / z);
                if (t > Tb) return (zeta + cb * std::pow(t, 1.0 - r1)) / -z;
                return t * c.mmse(t) / -z;
            },
            0.0, 1.0, 1e-12);
    } else {
        // subtract zeta/t up to a cutoff, model the rest as c t^{-r1}
        const double Tc = 1e6;
        auto g = [&](double w) {
            const double t = std::exp(w);
            return std::exp((z + 1.0) * w) * (c.mmse(t) - zeta / t);
        };
        std::vector<double> br;
        for (double w = 0.0; w < std::log(Tc); w += 0.5) br.push_back(w);
        br.push_back(std::log(Tc));
        tail = quad::adaptive(g, br, 1e-10, 0.0);
        const double resid = (c.mmse(Tc) - zeta / Tc) * std::pow(Tc, r1);
        extra = resid * std::pow(Tc, z + 1.0 - r1) / (r1 - z - 1.0) - zeta / z;
    }
    const double v = head.value + tail.value + extra;
    const double rel = (head.abs_error + tail.abs_error) / std::fabs(v) + (continued ? 1e-6 : 0.0);
    return {z, v, MellinMethod::Numeric, std::max(rel, 1e-15)};
}

bool same_set(const Constellation& a, const Constellation& b)
{
    if (!a.is_discrete() || a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        bool hit = false;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (std::abs(a.points()[i] - b.points()[j]) < 1e-12 && std::fabs(a.probs()[i] - b.probs()[j]) < 1e-12)
                hit = true;
        if (!hit) return false;
    }
    return true;
}

}  // namespace

MellinValue mellin_mmse_numeric(const CanonicalCurve& curve, double z)
{
    if (!curve.input().is_discrete()) return numeric_continuous(curve, z);
    if (!(z > -1.0)) throw DomainError("mellin: z must exceed -1 for discrete inputs");
    return numeric_discrete(curve, z, 0, QuadScheme::TanhSinh);
}

MellinValue mellin_mmse_numeric(const Constellation& input, double z)
{
    return mellin_mmse_numeric(CanonicalCurve(input), z);
}

MellinValue mellin_mmse_bpsk(double z)
{
    if (!(z > 0.0)) throw DomainError("mellin_mmse_bpsk: z must be positive");
    // Alternating tail sum_{l>=1} (-1)^l b_l with Cohen-Rodriguez Villegas-Zagier
    // acceleration; b_l is a moment sequence in l.
    auto b = [z](int l) {
        const double q = 1.0 + 2.0 * l;
        const auto f = hyp2f1_e(1.0, 0.5, 2.0 + z, 1.0 - 1.0 / (q * q));
        return std::pair{f.value / q, f.est_abs_error / q};
    };
    auto cvz = [&](int n, double& err) {
        double d = std::pow(3.0 + std::sqrt(8.0), n);
        d = 0.5 * (d + 1.0 / d);
        double bb = -1.0, c = -d, s = 0.0;
        err = 0.0;
        for (int k = 0; k < n; ++k) {
            c = bb - c;
            const auto [v, e] = b(k + 1);
            s += c * v;
            err += std::fabs(c) * e;
            bb = (k + n) * (k - double(n)) * bb / ((k + 0.5) * (k + 1.0));
        }
        err /= d;
        return s / d;
    };
    double e1 = 0.0, e2 = 0.0;
    const double s1 = cvz(30, e1), s2 = cvz(24, e2);
    const double S = -s1; // series starts at l = 1 with a minus sign
    const double pre = std::exp(-(1.0 + 2.0 * z) * std::log(2.0) + ln_gamma(2.0 + 2.0 * z) - ln_gamma(2.0 + z));
    const double lead = gamma(1.5 + z) / (std::sqrt(M_PI) * (1.0 + z));
    const double v = 2.0 * (lead + pre * S);
    const double abs_err = 2.0 * pre * (std::fabs(s1 - s2) + e1) + 4e-16 * std::fabs(v);
    if (std::fabs(s1 - s2) > 1e-8 * std::max(1.0, std::fabs(s1)))
        throw NonConvergence("mellin_mmse_bpsk: series stagnated", v, abs_err);
    return {z, v, MellinMethod::AnalyticBPSK, abs_err / std::fabs(v)};
}

MellinValue mellin_mmse_qpsk(double z)
{
    auto b = mellin_mmse_bpsk(z);
    return {z, std::pow(2.0, 1.0 + z) * b.value, MellinMethod::AnalyticQPSK, b.est_rel_error};
}

MellinValue mellin_mmse_gaussian(double z)
{
    if (!(z > 0.0 && z < 1.0)) throw DomainError("mellin_mmse_gaussian: z must lie in (0,1)");
    if (z < 1e-8 || 1.0 - z < 1e-8) throw DomainError("mellin_mmse_gaussian: too close to a pole");
    return {z, M_PI / std::sin(M_PI * z), MellinMethod::AnalyticGaussian, 1e-15};
}

MellinValue mellin_mmse(const CanonicalCurve& curve, double z)
{
    const auto& in = curve.input();
    if (z > 0.0 && same_set(in, make_psk(2))) return mellin_mmse_bpsk(z);
    if (z > 0.0 && same_set(in, make_psk(4))) return mellin_mmse_qpsk(z);
    return mellin_mmse_numeric(curve, z);
}

double mellin_mmse_log_weighted(const CanonicalCurve& curve, double z, int log_power, QuadScheme scheme)
{
    if (!curve.input().is_discrete()) throw DomainError("log-weighted Mellin: discrete input required");
    if (!(z > 0.0)) throw DomainError("log-weighted Mellin: z must be positive");
    if (log_power < 0 || log_power > 4) throw DomainError("log-weighted Mellin: log power must lie in 0..4");
    return numeric_discrete(curve, z - 1.0, log_power, scheme).value;
}

const std::vector<std::string>& table1_inputs()
{
    static const std::vector<std::string> v{"4pam", "16qam", "8pam", "64qam"};
    return v;
}

std::vector<double> table1_z_grid()
{
    std::vector<double> z;
    for (int w = 0; w <= 20; ++w) z.push_back(0.5 + w / 4.0);
    return z;
}

std::optional<double> table1_reference(const std::string& input, double z)
{
    static const std::map<std::string, std::vector<double>> ref{
        {"4pam", {2.04943, 2.88309, 4.34356, 6.91253, 11.5073, 19.8962, 35.5419, 65.3372, 123.221, 237.821,
                  468.794, 942.243, 1928.33, 4013.41, 8486.01, 18211.7, 39637.1, 87425, 195284, 441507,
                  1.00974e6}},
        {"16qam", {5.79667, 9.69751, 17.3742, 32.8817, 65.0951, 133.845, 284.336, 621.596, 1394.09, 3199.72,
                   7500.71, 17928.4, 43633.1, 107996, 271552, 693041, 1.79377e6, 4.70498e6, 1.24982e7,
                   3.36027e7, 9.13912e7}},
        {"8pam", {5.30675, 10.3121, 21.8091, 49.1577, 116.461, 287.314, 733.38, 1927.94, 5201.86, 14367.2,
                  40534.3, 116616, 341629, 1.01784e6, 3.08083e6}},
        {"64qam", {15.0097, 34.6857, 87.2366, 233.835, 658.8, 1932.81, 5867.04, 18341.8, 58852.3, 193302,
                   648549, 2.21889e6, 7.73017e6, 2.73886e7, 9.85865e7}},
    };
    auto it = ref.find(input);
    if (it == ref.end()) return std::nullopt;
    const double w = (z - 0.5) * 4.0;
    const long iw = std::lround(w);
    if (std::fabs(w - iw) > 1e-9 || iw < 0 || iw >= static_cast<long>(it->second.size())) return std::nullopt;
    return it->second[iw];
}

std::vector<Table1Row> table1(const std::vector<std::string>& inputs, const std::vector<double>& z_grid)
{
    std::vector<Table1Row> rows;
    for (const auto& name : inputs) {
        CanonicalCurve curve(constellation_by_name(name));
        for (double z : z_grid) {
            const auto mv = mellin_mmse_numeric(curve, z);
            Table1Row r{name, z, mv.value, mv.est_rel_error, table1_reference(name, z), std::nullopt};
            if (r.reference) r.rel_deviation = std::fabs(r.value - *r.reference) / *r.reference;
            rows.push_back(r);
        }
    }
    return rows;
}

namespace {

// Values at the n+1 Chebyshev-Lobatto nodes x_j = cos(pi j/n) of [-1,1] ->
// int_x^1 f at the same nodes.
std::vector<double> cheb_right_integral(const std::vector<double>& f)
{
    const int n = static_cast<int>(f.size()) - 1;
    std::vector<double> a(n + 3, 0.0);
    for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double w = (j == 0 || j == n) ? 0.5 : 1.0;
            s += w * f[j] * std::cos(M_PI * j * k / n);
        }
        a[k] = 2.0 * s / n;
    }
    a[0] *= 0.5;
    a[n] *= 0.5;
    std::vector<double> b(n + 2, 0.0);
    b[1] = a[0] - a[2] / 2.0;
    for (int k = 2; k <= n + 1; ++k) b[k] = (a[k - 1] - a[k + 1]) / (2.0 * k);
    auto F = [&](int j) {
        double s = 0.0;
        for (int k = 1; k <= n + 1; ++k) s += b[k] * std::cos(M_PI * j * k / n);
        return s;
    };
    const double F1 = F(0);
    std::vector<double> out(n + 1);
    for (int j = 0; j <= n; ++j) out[j] = F1 - F(j);
    return out;
}

}  // namespace

double repeated_integral_at_zero(const CanonicalCurve& curve, int m)
{
    if (m < 0 || m > 4) throw DomainError("repeated integral: m must lie in 0..4");
    if (!curve.input().is_discrete()) throw DomainError("repeated integral: discrete input required");
    const double T = mellin_tail_cutoff(min_distance(curve.input()), m + 1.0);
    const int n = 32;
    const int panels = static_cast<int>(std::ceil(T / 1.0));
    const double h = T / panels;
    // g[p][j] at t = left_p + (1 - x_j) h / 2 ... use t = c_p + x_j h/2
    std::vector<std::vector<double>> g(panels, std::vector<double>(n + 1));
    for (int p = 0; p < panels; ++p)
        for (int j = 0; j <= n; ++j) {
            const double t = (p + 0.5) * h + 0.5 * h * std::cos(M_PI * j / n);
            g[p][j] = curve.mmse(t);
        }
    for (int level = 0; level <= m; ++level) {
        double acc = 0.0; // int from right end of the panel to infinity
        for (int p = panels - 1; p >= 0; --p) {
            auto local = cheb_right_integral(g[p]);
            for (auto& v : local) v *= 0.5 * h;
            const double left_total = local[n];
            for (int j = 0; j <= n; ++j) g[p][j] = -(local[j] + acc);
            acc += left_total;
        }
    }
    return g[0][n];
}

}  // namespace fadexp
