// Runs the twelve acceptance checks and prints one PASS/FAIL line each.
#include "fadexp/errors.hpp"
#include "fadexp/expansions.hpp"
#include "fadexp/fading.hpp"
#include "fadexp/mellin.hpp"
#include "fadexp/powalloc.hpp"
#include "fadexp/reference.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace fadexp;

namespace {

double db(double x)
{
    return std::pow(10.0, x / 10);
}

double rel(double a, double b)
{
    return std::fabs(a - b) / std::fabs(b);
}

const double kS = 1 / std::sqrt(2.0);

// Accumulates sub-checks; the worst one is reported.
struct Ledger {
    bool ok = true;
    std::ostringstream notes;
    void check(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            notes << " [fail: " << what << "]";
        }
    }
    void note(const std::string& s) { notes << ' ' << s; }
};

std::string f(double v, const char* spec = "%.3g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// E1 by its power series
double e1(double x)
{
    double s = 0, term = 1;
    for (int k = 1; k < 80; ++k) {
        term *= -x / k;
        s += term / k;
    }
    return -0.57721566490153286 - std::log(x) - s;
}

void c1(Ledger& L)
{
    const auto t0 = std::chrono::steady_clock::now();
    const double z[] = {0.5, 1.0, 1.5, 2.0};
    const double ref[] = {2.04943, 4.34356, 11.5073, 35.5419};
    double worst = 0;
    const CanonicalCurve pam(make_pam(4));
    for (int i = 0; i < 4; ++i) worst = std::max(worst, rel(mellin_mmse(pam, z[i]).value, ref[i]));
    worst = std::max(worst, rel(mellin_mmse(CanonicalCurve(make_qam(16)), 1.0).value, 17.3742));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    L.check(worst <= 5e-3, "deviation");
    L.check(secs <= 120, "runtime");
    L.note("max rel dev " + f(worst) + ", " + f(secs) + " s");
}

void c2(Ledger& L)
{
    double worst = 0;
    const CanonicalCurve p4(make_pam(4)), q16(make_qam(16)), p8(make_pam(8)), q64(make_qam(64));
    for (double z : {0.5, 1.0, 2.0}) {
        const double s = std::pow(2.0, 1 + z);
        worst = std::max(worst, rel(s * mellin_mmse(p4, z).value, mellin_mmse(q16, z).value));
        worst = std::max(worst, rel(s * mellin_mmse(p8, z).value, mellin_mmse(q64, z).value));
    }
    L.check(worst <= 5e-3, "scaling");
    L.note("max rel dev " + f(worst));
}

void c3(Ledger& L)
{
    double wb = 0, wg = 0;
    const CanonicalCurve b(make_psk(2)), g(make_gaussian());
    for (double z : {0.5, 1.0, 2.0, 3.0}) wb = std::max(wb, rel(mellin_mmse_bpsk(z).value, mellin_mmse_numeric(b, z).value));
    for (double z : {0.25, 0.5, 0.75})
        wg = std::max(wg, std::fabs(mellin_mmse_gaussian(z).value - mellin_mmse_numeric(g, z - 1).value));
    L.check(wb <= 1e-6, "bpsk");
    L.check(wg <= 1e-8, "gaussian");
    L.note("bpsk rel " + f(wb) + ", gaussian " + f(wg));
}

void c4(Ledger& L)
{
    const auto q = make_psk(4);
    const CanonicalCurve qc(q);
    const auto r = FadingModel::rayleigh(kS);
    const auto er = high_snr_avg_mmse_discrete(r, q, 3);
    double w1 = 0;
    for (double x : {30.0, 35.0, 40.0, 45.0, 50.0})
        w1 = std::max(w1, rel(evaluate(er.truncated(1), db(x)), avg_mmse_quad(r, qc, db(x)).value));
    const double o35 = avg_mmse_quad(r, qc, db(35)).value;
    const double w3 = rel(evaluate(er, db(35)), o35);
    const auto n = FadingModel::nakagami(0.5, 1.0);
    const double wn = rel(evaluate(high_snr_avg_mmse_discrete(n, q, 1), db(35)), avg_mmse_quad(n, qc, db(35)).value);
    const auto ri = FadingModel::ricean(std::sqrt(0.9), 1 / (2 * std::sqrt(5.0)));
    const double ore = avg_mmse_quad(ri, qc, db(35)).value;
    const auto eri = high_snr_avg_mmse_discrete(ri, q, 3);
    double e[3];
    for (int m = 1; m <= 3; ++m) e[m - 1] = rel(evaluate(eri.truncated(m), db(35)), ore);
    L.check(w1 <= 0.05, "rayleigh one-term");
    L.check(w3 <= 0.01, "rayleigh three-term");
    L.check(wn <= 0.05, "nakagami one-term");
    L.check(e[0] > e[1] && e[1] > e[2], "ricean monotone");
    L.note("rayleigh 1-term " + f(w1) + ", 3-term " + f(w3) + ", nakagami " + f(wn) + ", ricean " + f(e[0]) + " > " +
           f(e[1]) + " > " + f(e[2]));
}

void c5(Ledger& L)
{
    const auto q = make_psk(4);
    const auto r = FadingModel::rayleigh(kS);
    const double a = decay_rate(r, q, 30, 40);
    const double b = decay_rate(FadingModel::nakagami(0.5, 1.0), q, 30, 40);
    const double c = decay_rate(r, make_gaussian(), 30, 40);
    const double d = mi_gap_decay_rate(r, q, 30, 40);
    L.check(std::fabs(a - 2) <= 0.1, "rayleigh");
    L.check(std::fabs(b - 1.5) <= 0.1, "nakagami");
    L.check(std::fabs(c - 1) <= 0.1, "gaussian");
    L.check(std::fabs(d - 1) <= 0.1, "mi gap");
    L.note("slopes " + f(a, "%.4f") + " " + f(b, "%.4f") + " " + f(c, "%.4f") + " mi gap " + f(d, "%.4f"));
}

void c6(Ledger& L)
{
    const auto r = FadingModel::rayleigh(kS);
    const double s = db(40);
    const std::vector<std::pair<Constellation, double>> cases{
        {make_inf_psk(), 0.5}, {make_inf_pam(), 0.5}, {make_inf_qam(), 1.0}, {make_gaussian(), 1.0}};
    for (const auto& [in, target] : cases) {
        const double v = s * avg_mmse_quad(r, in, s).value;
        L.check(rel(v, target) <= 0.03, in.label());
        L.note(in.label() + " " + f(v, "%.5f"));
    }
}

void c7(Ledger& L)
{
    const std::vector<std::pair<std::string, FadingModel>> models{
        {"rayleigh", FadingModel::rayleigh(kS)},
        {"ricean", FadingModel::ricean(std::sqrt(0.9), 1 / (2 * std::sqrt(5.0)))},
        {"nakagami", FadingModel::nakagami(0.5, 1.0)}};
    double worst = 0;
    for (const auto& [name, m] : models)
        for (const auto& in : {make_psk(2), make_psk(4), make_gaussian()}) {
            const auto e = low_snr_avg_mmse(m, in, 3);
            for (double x : {-20.0, -30.0, -40.0}) {
                const double d = rel(evaluate(e, db(x)), avg_mmse_quad(m, in, db(x)).value);
                worst = std::max(worst, d);
                L.check(d <= 0.01, name + "/" + in.label() + " at " + f(x) + " dB");
            }
        }
    double wc = 0;
    for (double s : {kS, 0.8, 1.3}) {
        const double two_s2 = 2 * s * s;
        const auto g = low_snr_avg_mmse(FadingModel::rayleigh(s), make_gaussian(), 6);
        for (int k = 0; k < 6; ++k)
            wc = std::max(wc, rel(g.terms[k].coeff, (k % 2 ? -1 : 1) * std::tgamma(k + 2.0) * std::pow(two_s2, k + 1)));
    }
    L.check(wc <= 1e-10, "gaussian coefficients");
    L.note("max rel err " + f(worst) + ", coefficient dev " + f(wc));
}

void c8(Ledger& L)
{
    const auto r = FadingModel::rayleigh(kS);
    double worst = 0;
    for (const auto& in : {make_psk(4), make_gaussian()})
        for (double s : {0.01, 0.1, 1.0, 10.0}) worst = std::max(worst, immse_check(r, in, s, 1e-3));
    L.check(worst <= 1e-4, "immse");
    L.note("max " + f(worst));
}

void c9(Ledger& L)
{
    const std::vector<std::pair<FadingModel, Constellation>> cases{
        {FadingModel::rayleigh(kS), make_psk(4)},
        {FadingModel::nakagami(0.5, 1.0), make_psk(2)},
        {FadingModel::ricean(std::sqrt(0.9), 1 / (2 * std::sqrt(5.0))), make_qam(16)}};
    double worst = 0;
    std::uint64_t seed = 20240601;
    for (const auto& [m, in] : cases)
        for (double x : {-10.0, 0.0, 10.0, 20.0}) {
            const auto q = avg_mmse_quad(m, in, db(x));
            const auto mc = avg_mmse_mc(m, in, db(x), 1000000, seed++);
            const double sigma = std::hypot(q.est_abs_error, mc.est_abs_error);
            const double k = std::fabs(q.value - mc.value) / sigma;
            worst = std::max(worst, k);
            L.check(k <= 3, in.label() + " at " + f(x) + " dB");
        }
    const double ref = 1 - std::exp(1.0) * e1(1.0);
    const double d = std::fabs(avg_mmse_quad(FadingModel::rayleigh(kS), make_gaussian(), 1.0).value - ref);
    L.check(d <= 1e-6, "E1 closed form");
    L.note("max deviation " + f(worst) + " sigma, closed form " + f(d));
}

void c10(Ledger& L)
{
    const auto v = FadingModel::vector(1, 0.9, 0.4);
    const auto r = FadingModel::ricean(0.9, 0.4);
    double worst = 0;
    for (double t : {1e-4, 0.1, 1.0, 3.0}) worst = std::max(worst, rel(kernel_density(v, t), kernel_density(r, t)));
    for (double z : {0.5, 1.0, 2.5}) worst = std::max(worst, rel(mellin_f(v, z), mellin_f(r, z)));
    for (const auto& in : {make_psk(4), make_qam(16)}) {
        const auto a = high_snr_avg_mmse_discrete(v, in, 4), b = high_snr_avg_mmse_discrete(r, in, 4);
        for (std::size_t i = 0; i < a.terms.size(); ++i) worst = std::max(worst, rel(a.terms[i].coeff, b.terms[i].coeff));
        const auto la = low_snr_avg_mmse(v, in, 3), lb = low_snr_avg_mmse(r, in, 3);
        for (std::size_t i = 0; i < la.terms.size(); ++i) worst = std::max(worst, rel(la.terms[i].coeff, lb.terms[i].coeff));
        for (double s : {0.1, 10.0, 1e3})
            worst = std::max(worst, rel(avg_mmse_quad(v, in, s).value, avg_mmse_quad(r, in, s).value));
    }
    L.check(worst <= 1e-10, "vector k=1");
    L.note("max rel dev " + f(worst));
}

void c11(Ledger& L)
{
    using F = FadingModel;
    ChannelBank sym{{{F::rayleigh(kS), make_psk(4)}, {F::rayleigh(kS), make_psk(4)}}, 1.0};
    const auto s = exact_allocation(sym, db(20));
    L.check(std::fabs(s.p[0] - 0.5) <= 1e-12 && std::fabs(s.p[1] - 0.5) <= 1e-12, "symmetric split");
    L.check(s.kkt_residual <= 1e-6, "symmetric residual");
    const std::vector<std::pair<std::string, ChannelBank>> banks{
        {"rayleigh pair", {{{F::rayleigh(std::sqrt(2.0)), make_qam(16)}, {F::rayleigh(std::sqrt(0.5)), make_psk(4)}}, 1.0}},
        {"ricean pair",
         {{{F::ricean(std::sqrt(2.0), std::sqrt(2.0)), make_qam(16)}, {F::ricean(std::sqrt(2.0), std::sqrt(0.5)), make_psk(4)}},
          1.0}}};
    double worst_res = s.kkt_residual;
    for (const auto& [name, b] : banks) {
        double prev = INFINITY, at30 = 0;
        std::string gaps;
        for (double x : {15.0, 20.0, 25.0, 30.0, 35.0}) {
            const auto e = exact_allocation(b, db(x));
            const auto a = asymptotic_allocation(b, db(x));
            worst_res = std::max(worst_res, e.kkt_residual);
            double gap = 0;
            for (std::size_t i = 0; i < e.p.size(); ++i) gap = std::max(gap, std::fabs(e.p[i] - a.p[i]));
            L.check(gap < prev, name + " gap not decreasing at " + f(x) + " dB");
            prev = gap;
            if (x == 30.0) at30 = gap;
            gaps += (gaps.empty() ? "" : ",") + f(gap, "%.2g");
        }
        L.check(at30 <= 0.05 * b.total_power, name + " gap at 30 dB");
        L.note(name + " gaps " + gaps + ";");
    }
    L.check(worst_res <= 1e-6, "kkt residual");
    L.note("max residual " + f(worst_res));
}

void c12(Ledger& L)
{
    const CanonicalCurve b(make_psk(2));
    double worst = 0;
    for (int m = 0; m <= 1; ++m) {
        const double target = (m % 2 ? 1 : -1) * mellin_mmse_numeric(b, m).value / std::tgamma(m + 1.0);
        worst = std::max(worst, rel(repeated_integral_at_zero(b, m), target));
    }
    L.check(worst <= 1e-4, "identity");
    L.note("max rel dev " + f(worst));
}

}  // namespace

int main()
{
    set_warning_handler([](std::string_view) {});
    const std::vector<std::pair<std::string, std::function<void(Ledger&)>>> criteria{
        {"Mellin table values", c1},          {"QAM/PAM Mellin scaling", c2},
        {"analytic vs numeric Mellin", c3},   {"high-snr expansion fidelity", c4},
        {"decay rates", c5},                  {"continuous-input leading terms", c6},
        {"low-snr fidelity", c7},             {"I-MMSE", c8},
        {"quadrature vs Monte Carlo", c9},    {"vector k=1 reduction", c10},
        {"power allocation", c11},            {"repeated-integral identity", c12}};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Ledger L;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(L);
        } catch (const std::exception& e) {
            L.ok = false;
            L.notes << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s:%s (%.1f s)\n", L.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    L.notes.str().c_str(), secs);
        std::fflush(stdout);
        failed += !L.ok;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
