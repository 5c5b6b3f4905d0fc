#include "fadexp/expansions.hpp"

#include "fadexp/canonical.hpp"
#include "fadexp/errors.hpp"
#include "fadexp/mellin.hpp"
#include "fadexp/reference.hpp"
#include "fadexp/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace fadexp {

const char* to_string(Regime r)
{
    return r == Regime::HighSnr ? "high" : "low";
}

namespace {

void sort_terms(Expansion& e)
{
    auto& t = e.terms;
    if (e.regime == Regime::HighSnr)
        std::stable_sort(t.begin(), t.end(), [](const ExpansionTerm& x, const ExpansionTerm& y) {
            return x.snr_pow != y.snr_pow ? x.snr_pow > y.snr_pow : x.log_pow > y.log_pow;
        });
    else
        std::stable_sort(t.begin(), t.end(), [](const ExpansionTerm& x, const ExpansionTerm& y) {
            return x.snr_pow != y.snr_pow ? x.snr_pow < y.snr_pow : x.log_pow > y.log_pow;
        });
}

// Sum coefficients of identical monomials. Exponents built from the same
// a_m are bit-identical, so exact comparison is intended.
void merge_terms(Expansion& e)
{
    std::vector<ExpansionTerm> out;
    for (const auto& t : e.terms) {
        auto it = std::find_if(out.begin(), out.end(), [&](const ExpansionTerm& o) {
            return o.snr_pow == t.snr_pow && o.log_pow == t.log_pow;
        });
        if (it == out.end())
            out.push_back(t);
        else
            it->coeff += t.coeff;
    }
    e.terms = std::move(out);
    sort_terms(e);
}

void require_discrete(const Constellation& c, const char* who)
{
    if (!c.is_discrete()) throw DomainError(std::string(who) + ": discrete input required");
}

void require_terms(int M, int hi, const char* who)
{
    if (M < 1 || M > hi) {
        std::ostringstream os;
        os << who << ": number of terms must lie in 1.." << hi;
        throw DomainError(os.str());
    }
}

}  // namespace

Expansion Expansion::truncated(std::size_t n) const
{
    Expansion e = *this;
    if (n < terms.size()) {
        const double p = terms[n].snr_pow;
        e.error_order = regime == Regime::HighSnr ? -p : p;
        e.terms.resize(n);
    }
    return e;
}

double evaluate_term(const ExpansionTerm& t, double snr)
{
    double v = t.coeff * std::pow(snr, t.snr_pow);
    if (t.log_pow > 0) v *= std::pow(std::log(snr), t.log_pow);
    return v;
}

double evaluate(const Expansion& e, double snr)
{
    if (!(snr > 0.0)) throw DomainError("evaluate: snr must be positive");
    if (e.regime == Regime::HighSnr && snr < 10.0) warn("high-snr expansion evaluated below snr = 10");
    if (e.regime == Regime::LowSnr && snr > 0.1) warn("low-snr expansion evaluated above snr = 0.1");
    double s = e.constant;
    for (const auto& t : e.terms) s += evaluate_term(t, snr);
    return s;
}

Expansion general_high_snr(const FadingModel& model, const Constellation& input, int M)
{
    require_discrete(input, "high-snr expansion");
    require_terms(M, 30, "high-snr expansion");
    Expansion e;
    e.regime = Regime::HighSnr;
    if (!model.q_zero()) return e; // o(snr^-R) for every R

    const auto coeffs = small_t_coefficients(model, M);
    const int used = std::min<int>(M, coeffs.size());
    const CanonicalCurve curve(input);
    std::map<std::pair<double, int>, double> mellin; // (a, derivative order) -> value
    auto mellin_at = [&](double a, int n) {
        auto key = std::pair{a, n};
        auto it = mellin.find(key);
        if (it != mellin.end()) return it->second;
        const double v = n == 0 ? mellin_mmse(curve, a).value : mellin_mmse_log_weighted(curve, 1.0 + a, n);
        mellin[key] = v;
        return v;
    };
    for (int m = 0; m < used; ++m) {
        const auto& c = coeffs[m];
        // p t^a (log t)^n, t = u/snr: binomial in (log u - log snr)
        for (int j = 0; j <= c.log_pow; ++j) {
            const double binom = std::tgamma(c.log_pow + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(c.log_pow - j + 1.0));
            const double sign = (j % 2) ? -1.0 : 1.0;
            e.terms.push_back({c.p * binom * sign * mellin_at(c.a, c.log_pow - j), -1.0 - c.a, j});
        }
    }
    merge_terms(e);
    if (model.closed_form() || static_cast<int>(coeffs.size()) > used) {
        const auto next = small_t_coefficients(model, used + 1);
        e.error_order = 1.0 + next.back().a;
    } else {
        e.error_order = 1.0 + coeffs.back().a; // o(.) of the last supplied term
    }
    return e;
}

Expansion high_snr_avg_mmse_discrete(const FadingModel& model, const Constellation& input, int M)
{
    if (!model.closed_form()) throw DomainError("high-snr expansion: closed-form fading model required");
    require_terms(M, 12, "high-snr expansion");
    return general_high_snr(model, input, M);
}

Expansion integrate_from_infinity(const Expansion& mmse, double constant)
{
    if (mmse.regime != Regime::HighSnr) throw DomainError("integrate_from_infinity: high-snr expansion required");
    Expansion e;
    e.regime = Regime::HighSnr;
    e.constant = constant;
    for (const auto& t : mmse.terms) {
        const double a = -1.0 - t.snr_pow;
        if (!(a > 0.0)) throw DomainError("integrate_from_infinity: term not integrable at infinity");
        // int_snr^inf e^{-1-a} (log e)^L de = snr^-a sum_i L!/i! (log snr)^i / a^{L-i+1}
        const int L = t.log_pow;
        for (int i = 0; i <= L; ++i) {
            const double c = std::tgamma(L + 1.0) / std::tgamma(i + 1.0) / std::pow(a, L - i + 1);
            e.terms.push_back({-t.coeff * c, -a, i});
        }
    }
    merge_terms(e);
    e.error_order = mmse.error_order - 1.0;
    return e;
}

Expansion integrate_from_zero(const Expansion& mmse)
{
    if (mmse.regime != Regime::LowSnr) throw DomainError("integrate_from_zero: low-snr expansion required");
    Expansion e;
    e.regime = Regime::LowSnr;
    e.constant = 0.0;
    if (mmse.constant != 0.0) e.terms.push_back({mmse.constant, 1.0, 0});
    for (const auto& t : mmse.terms) {
        if (t.log_pow != 0 || !(t.snr_pow > -1.0))
            throw DomainError("integrate_from_zero: unsupported term");
        e.terms.push_back({t.coeff / (t.snr_pow + 1.0), t.snr_pow + 1.0, 0});
    }
    merge_terms(e);
    e.error_order = mmse.error_order + 1.0;
    return e;
}

Expansion high_snr_avg_mi_discrete(const FadingModel& model, const Constellation& input, int M)
{
    return integrate_from_infinity(high_snr_avg_mmse_discrete(model, input, M), entropy(input));
}

namespace {

struct GaussianPoles {
    bool integer = true;
    int kappa = 1; // first double pole at m = kappa
};

GaussianPoles gaussian_poles(const FadingModel& model)
{
    switch (model.kind()) {
    case FadingKind::Rayleigh:
    case FadingKind::Ricean: return {true, 1};
    case FadingKind::VectorGaussian: return {true, model.k()};
    case FadingKind::Nakagami: {
        const double mu = model.shape_mu();
        const double r = std::round(mu);
        if (std::fabs(mu - r) < 1e-9) return {true, static_cast<int>(r)};
        return {false, 0};
    }
    case FadingKind::Custom: break;
    }
    throw DomainError("high-snr expansion: Gaussian input needs a closed-form fading model");
}

}  // namespace

Expansion high_snr_avg_mmse_continuous(const FadingModel& model, const Constellation& input, int M)
{
    require_terms(M, 12, "high-snr expansion");
    Expansion e;
    e.regime = Regime::HighSnr;
    const double a0 = small_t_coefficients(model, 1).front().a;

    if (input.kind() == InputKind::InfPSK || input.kind() == InputKind::InfPAM ||
        input.kind() == InputKind::InfQAM) {
        const auto dp = decay_params(input);
        e.terms.push_back({dp.zeta * mellin_f(model, 0.0), -1.0, 0});
        e.error_order = std::min(dp.r1, 1.0 + a0);
        return e;
    }
    if (input.kind() != InputKind::Gaussian)
        throw DomainError("high-snr expansion: continuous input required");

    const auto poles = gaussian_poles(model);
    if (poles.integer) {
        for (int m = 0; m < poles.kappa + M; ++m) {
            const double sp = -(m + 1.0);
            if (m < poles.kappa) {
                const double sign = (m % 2) ? -1.0 : 1.0;
                e.terms.push_back({sign * mellin_f_any(model, -m), sp, 0});
            } else {
                // double pole of pi M[f;1-z]/sin(pi z) at z = m+1
                const double G = pole_bracket(model, m + 1.0, 2, 0);
                const double dG = pole_bracket(model, m + 1.0, 2, 1);
                e.terms.push_back({G, sp, 1});
                e.terms.push_back({-dG, sp, 0});
            }
        }
    } else {
        const auto coeffs = small_t_coefficients(model, M + 1);
        for (int m = 0; m <= M; ++m) {
            const double sign = (m % 2) ? -1.0 : 1.0;
            e.terms.push_back({sign * mellin_f_any(model, -m), -(m + 1.0), 0});
        }
        for (const auto& c : coeffs)
            e.terms.push_back({c.p * M_PI / std::sin(M_PI * (1.0 + c.a)), -1.0 - c.a, 0});
    }
    sort_terms(e);
    return e.truncated(M);
}

Expansion low_snr_avg_mmse(const FadingModel& model, const Constellation& input, int M)
{
    require_terms(M, 6, "low-snr expansion");
    const CanonicalCurve curve(input);
    Expansion e;
    e.regime = Regime::LowSnr;
    for (int m = 0; m < M; ++m) {
        double d = 0.0;
        if (input.kind() == InputKind::Gaussian)
            d = ((m % 2) ? -1.0 : 1.0) * std::tgamma(m + 1.0);
        else
            d = curve.mmse_deriv_at_zero(m).value;
        const double moment = mellin_f(model, m + 1.0);
        e.terms.push_back({moment * d / std::tgamma(m + 1.0), static_cast<double>(m), 0});
    }
    e.error_order = M;
    return e;
}

Expansion low_snr_avg_mi(const FadingModel& model, const Constellation& input, int M)
{
    return integrate_from_zero(low_snr_avg_mmse(model, input, M));
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

template <class F> double fit_rate(double lo_db, double hi_db, F value)
{
    if (!(hi_db > lo_db)) throw DomainError("decay rate: empty snr range");
    std::vector<double> x, y;
    for (int i = 0; i <= 10; ++i) {
        const double snr = std::pow(10.0, (lo_db + (hi_db - lo_db) * i / 10.0) / 10.0);
        x.push_back(std::log(snr));
        y.push_back(-std::log(value(snr)));
    }
    return ls_slope(x, y);
}

}  // namespace

double decay_rate(const FadingModel& model, const Constellation& input, double snr_lo_db, double snr_hi_db)
{
    const CanonicalCurve curve(input);
    return fit_rate(snr_lo_db, snr_hi_db, [&](double s) { return avg_mmse_quad(model, curve, s).value; });
}

double mi_gap_decay_rate(const FadingModel& model, const Constellation& input, double snr_lo_db,
                         double snr_hi_db)
{
    require_discrete(input, "mi gap decay rate");
    const CanonicalCurve curve(input);
    return fit_rate(snr_lo_db, snr_hi_db,
                    [&](double s) { return avg_equivocation_quad(model, curve, s).value; });
}

}  // namespace fadexp
