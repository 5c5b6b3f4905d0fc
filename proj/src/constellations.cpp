#include "fadexp/constellations.hpp"

#include "fadexp/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace fadexp {

Constellation Constellation::discrete(std::vector<cplx> points, std::vector<double> probs,
                                      std::string label)
{
    if (points.size() < 2) throw DomainError("constellation needs at least two points");
    if (points.size() != probs.size()) throw DomainError("points and probabilities differ in length");
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(probs[i] > 0.0) || !std::isfinite(probs[i]))
            throw DomainError("probabilities must be positive");
        if (!std::isfinite(points[i].real()) || !std::isfinite(points[i].imag()))
            throw DomainError("points must be finite");
        s += probs[i];
    }
    if (std::fabs(s - 1.0) > 1e-9) throw DomainError("probabilities do not sum to one");
    for (auto& p : probs) p /= s;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (std::abs(points[i] - points[j]) < 1e-12) throw DomainError("duplicate points");
    Constellation c;
    c.kind_ = InputKind::Discrete;
    c.points_ = std::move(points);
    c.probs_ = std::move(probs);
    c.label_ = std::move(label);
    return c;
}

Constellation Constellation::continuous(InputKind kind)
{
    Constellation c;
    c.kind_ = kind;
    switch (kind) {
    case InputKind::InfPSK: c.label_ = "infpsk"; break;
    case InputKind::InfPAM: c.label_ = "infpam"; break;
    case InputKind::InfQAM: c.label_ = "infqam"; break;
    case InputKind::Gaussian: c.label_ = "gaussian"; break;
    case InputKind::Discrete: throw DomainError("use Constellation::discrete");
    }
    return c;
}

Constellation make_psk(int m)
{
    if (m < 2) throw DomainError("psk: m must be at least 2");
    std::vector<cplx> pts(m);
    for (int j = 0; j < m; ++j) {
        const double th = 2.0 * M_PI * j / m;
        pts[j] = {std::cos(th), std::sin(th)};
    }
    if (m == 2) pts = {{-1.0, 0.0}, {1.0, 0.0}};
    if (m == 4) {
        // quadrant-centred so that QPSK coincides with 4-QAM
        const double r = 1.0 / std::sqrt(2.0);
        pts = {{r, r}, {-r, r}, {-r, -r}, {r, -r}};
    }
    const std::string label = m == 2 ? "bpsk" : m == 4 ? "qpsk" : std::to_string(m) + "psk";
    return Constellation::discrete(std::move(pts), std::vector<double>(m, 1.0 / m), label);
}

namespace {
std::vector<double> pam_levels(int m)
{
    // (2j - m + 1) / sqrt((m^2 - 1)/3)
    const double scale = std::sqrt((m * double(m) - 1.0) / 3.0);
    std::vector<double> v(m);
    for (int j = 0; j < m; ++j) v[j] = (2.0 * j - m + 1.0) / scale;
    return v;
}
}  // namespace

Constellation make_pam(int m)
{
    if (m < 2) throw DomainError("pam: m must be at least 2");
    std::vector<cplx> pts;
    for (double a : pam_levels(m)) pts.emplace_back(a, 0.0);
    return Constellation::discrete(std::move(pts), std::vector<double>(m, 1.0 / m),
                                   std::to_string(m) + "pam");
}

Constellation make_qam(int m)
{
    const int r = static_cast<int>(std::lround(std::sqrt(double(m))));
    if (m < 4 || r * r != m) throw DomainError("qam: m must be a perfect square >= 4");
    const auto lv = pam_levels(r);
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<cplx> pts;
    for (double a : lv)
        for (double b : lv) pts.emplace_back(a * s, b * s);
    return Constellation::discrete(std::move(pts), std::vector<double>(m, 1.0 / m),
                                   std::to_string(m) + "qam");
}

Constellation make_gaussian() { return Constellation::continuous(InputKind::Gaussian); }
Constellation make_inf_psk() { return Constellation::continuous(InputKind::InfPSK); }
Constellation make_inf_pam() { return Constellation::continuous(InputKind::InfPAM); }
Constellation make_inf_qam() { return Constellation::continuous(InputKind::InfQAM); }

Constellation constellation_by_name(const std::string& raw)
{
    std::string n;
    for (char ch : raw)
        if (ch != '-' && ch != '_') n += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (n == "bpsk") return make_psk(2);
    if (n == "qpsk") return make_psk(4);
    if (n == "gaussian" || n == "gauss") return make_gaussian();
    if (n == "infpsk" || n == "∞psk") return make_inf_psk();
    if (n == "infpam") return make_inf_pam();
    if (n == "infqam") return make_inf_qam();
    std::size_t i = 0;
    while (i < n.size() && std::isdigit(static_cast<unsigned char>(n[i]))) ++i;
    if (i > 0 && i < n.size() && i <= 6) {
        const int m = std::stoi(n.substr(0, i));
        const std::string fam = n.substr(i);
        if (fam == "psk") return make_psk(m);
        if (fam == "pam") return make_pam(m);
        if (fam == "qam") return make_qam(m);
    }
    throw ConfigError("unknown input '" + raw + "'");
}

double min_distance(const Constellation& c)
{
    if (!c.is_discrete()) throw DomainError("min_distance: discrete input required");
    double d = std::numeric_limits<double>::infinity();
    const auto& p = c.points();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) d = std::min(d, std::abs(p[i] - p[j]));
    return d;
}

double power(const Constellation& c)
{
    if (!c.is_discrete()) return 1.0;
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c.probs()[i] * std::norm(c.points()[i]);
    return s;
}

double variance(const Constellation& c)
{
    if (!c.is_discrete()) return 1.0;
    cplx mean = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) mean += c.probs()[i] * c.points()[i];
    return power(c) - std::norm(mean);
}

double entropy(const Constellation& c)
{
    if (!c.is_discrete()) throw DomainError("entropy: discrete input required");
    double h = 0.0;
    for (double p : c.probs()) h -= p * std::log(p);
    return h;
}

namespace {

// Distinct values within 1e-12 and the marginal probability of each.
Axis marginal(const std::vector<double>& v, const std::vector<double>& p)
{
    Axis a;
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto it = std::find_if(a.points.begin(), a.points.end(),
                               [&](double x) { return std::fabs(x - v[i]) < 1e-12; });
        if (it == a.points.end()) {
            a.points.push_back(v[i]);
            a.probs.push_back(p[i]);
        } else {
            a.probs[it - a.points.begin()] += p[i];
        }
    }
    return a;
}

std::size_t index_of(const Axis& a, double x)
{
    for (std::size_t i = 0; i < a.points.size(); ++i)
        if (std::fabs(a.points[i] - x) < 1e-12) return i;
    return a.points.size();
}

}  // namespace

std::vector<Axis> separable_axes(const Constellation& c)
{
    if (!c.is_discrete()) return {};
    std::vector<double> re, im;
    for (const auto& x : c.points()) {
        re.push_back(x.real());
        im.push_back(x.imag());
    }
    const bool real_only =
        std::all_of(im.begin(), im.end(), [](double v) { return std::fabs(v) < 1e-15; });
    if (real_only) return {Axis{re, c.probs()}};

    Axis ar = marginal(re, c.probs()), ai = marginal(im, c.probs());
    if (ar.points.size() * ai.points.size() != c.size()) return {};
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double pr = ar.probs[index_of(ar, re[k])], pi = ai.probs[index_of(ai, im[k])];
        if (std::fabs(pr * pi - c.probs()[k]) > 1e-12) return {};
    }
    std::vector<Axis> out;
    if (ar.points.size() > 1) out.push_back(ar);
    if (ai.points.size() > 1) out.push_back(ai);
    return out;
}

}  // namespace fadexp
