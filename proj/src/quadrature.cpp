#include "fadexp/quadrature.hpp"

#include "fadexp/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>

namespace fadexp::quad {

namespace {

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gk15(const Fn& f, double a, double b)
{
    using K = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    static const auto& kx = K::abscissa();
    static const auto& kw = K::weights();
    static const auto& gw = G::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fk[15];
    const double f0 = f(c);
    double k = kw[0] * f0, g = gw[0] * f0;
    for (std::size_t i = 1; i < kx.size(); ++i) {
        const double y1 = f(c - h * kx[i]), y2 = f(c + h * kx[i]);
        fk[2 * i - 1] = y1;
        fk[2 * i] = y2;
        k += kw[i] * (y1 + y2);
        if (i % 2 == 0) g += gw[i / 2] * (y1 + y2);
    }
    // QUADPACK error heuristic
    const double mean = 0.5 * k;
    double asc = kw[0] * std::fabs(f0 - mean);
    for (std::size_t i = 1; i < kx.size(); ++i)
        asc += kw[i] * (std::fabs(fk[2 * i - 1] - mean) + std::fabs(fk[2 * i] - mean));
    asc *= std::fabs(h);
    double err = std::fabs((k - g) * h);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    if (!std::isfinite(k)) throw NonConvergence("quadrature: non-finite integrand", k, err);
    return {a, b, k * h, std::max(err, 1e-15 * std::fabs(k * h))};
}

}  // namespace

Result adaptive(const Fn& f, const std::vector<double>& breaks, double rel_tol, double abs_tol,
                int max_panels)
{
    std::priority_queue<Panel> heap;
    double total = 0.0, total_err = 0.0;
    long evals = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        Panel p = gk15(f, breaks[i], breaks[i + 1]);
        evals += 15;
        total += p.value;
        total_err += p.err;
        heap.push(p);
    }
    int panels = static_cast<int>(heap.size());
    while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
        if (panels >= max_panels || heap.empty())
            throw NonConvergence("quadrature: panel budget exhausted", total, total_err);
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            // cannot split further; accept
            total_err -= p.err;
            continue;
        }
        Panel l = gk15(f, p.a, m), r = gk15(f, m, p.b);
        evals += 30;
        total += l.value + r.value - p.value;
        total_err += l.err + r.err - p.err;
        heap.push(l);
        heap.push(r);
        ++panels;
    }
    // recompute the sum to shed accumulated cancellation
    double s = 0.0, e = 0.0;
    while (!heap.empty()) {
        s += heap.top().value;
        e += heap.top().err;
        heap.pop();
    }
    return {s, std::max(e, 0.0), evals};
}

Result tanh_sinh(const Fn& f, double a, double b, double rel_tol)
{
    static thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    long evals = 0;
    auto g = [&](double x) {
        ++evals;
        return f(x);
    };
    double v = 0.0;
    try {
        v = ts.integrate(g, a, b, rel_tol, &err, &l1, &levels);
    } catch (const std::exception& ex) {
        throw NonConvergence(std::string("tanh-sinh: ") + ex.what(), std::nan(""), std::nan(""));
    }
    if (!std::isfinite(v)) throw NonConvergence("tanh-sinh: non-finite result", v, err);
    return {v, err, evals};
}

namespace {

const Rule& cached_rule(const gsl_integration_fixed_type* type, int n, double a, double b,
                        std::map<int, std::unique_ptr<Rule>>& cache, std::mutex& mu)
{
    std::lock_guard lk(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;
    gsl_integration_fixed_workspace* ws = gsl_integration_fixed_alloc(type, n, a, b, 0.0, 0.0);
    if (!ws) throw DomainError("quadrature: cannot build fixed rule");
    auto r = std::make_unique<Rule>();
    const double* xs = gsl_integration_fixed_nodes(ws);
    const double* ws_ = gsl_integration_fixed_weights(ws);
    r->x.assign(xs, xs + n);
    r->w.assign(ws_, ws_ + n);
    gsl_integration_fixed_free(ws);
    return *cache.emplace(n, std::move(r)).first->second;
}

}  // namespace

const Rule& gauss_hermite(int n)
{
    static std::map<int, std::unique_ptr<Rule>> cache;
    static std::mutex mu;
    return cached_rule(gsl_integration_fixed_hermite, n, 0.0, 1.0, cache, mu);
}

const Rule& gauss_legendre(int n)
{
    static std::map<int, std::unique_ptr<Rule>> cache;
    static std::mutex mu;
    return cached_rule(gsl_integration_fixed_legendre, n, -1.0, 1.0, cache, mu);
}

}  // namespace fadexp::quad
