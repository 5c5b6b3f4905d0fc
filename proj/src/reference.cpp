#include "fadexp/reference.hpp"

#include "fadexp/errors.hpp"
#include "fadexp/quadrature.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>

namespace fadexp {

const char* to_string(OracleMethod m)
{
    return m == OracleMethod::Quadrature ? "quadrature" : "montecarlo";
}

int worker_threads()
{
    if (const char* env = std::getenv("FADEXP_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Upper end of the kernel support in w = ln t: first unit step past the peak
// where t f(t) has dropped below 1e-22 of its maximum.
double kernel_w_hi(const FadingModel& model)
{
    double peak = 0.0;
    for (double w = -10.0; w <= 60.0; w += 1.0) {
        const double t = std::exp(w);
        const double v = t * kernel_density(model, t);
        peak = std::max(peak, std::fabs(v));
        if (peak > 0.0 && std::fabs(v) < 1e-22 * peak && w > 0.0) return w;
    }
    return 60.0;
}

// |mass| of f(t) t^-shift below t, from the leading small-t term.
double lower_mass(const FadingModel& model, double t, int shift)
{
    const auto c = small_t_coefficients(model, 1).front();
    const double e = c.a + 1.0 - shift;
    double m = std::fabs(c.p) * std::pow(t, e) / e;
    if (c.log_pow > 0) m *= std::pow(std::fabs(std::log(t)) + 1.0, c.log_pow);
    return m;
}

template <class G>
OracleResult kernel_integral(const FadingModel& model, double snr, double rel_tol, G g, double g0, int shift = 0)
{
    if (!(snr >= 0.0) || !std::isfinite(snr)) throw DomainError("oracle: snr must be finite and non-negative");
    const double w_hi = kernel_w_hi(model);
    double t_lo = 1e-8 / std::max(1.0, snr);
    for (int attempt = 0;; ++attempt) {
        const double w_lo = std::log(t_lo);
        std::vector<double> br;
        for (double w = w_lo; w < w_hi; w += 1.0) br.push_back(w);
        br.push_back(w_hi);
        auto f = [&](double w) {
            const double t = std::exp(w);
            return t * kernel_density(model, t) * g(snr * t);
        };
        const auto r = quad::adaptive(f, br, rel_tol, 1e-300);
        const double low = lower_mass(model, t_lo, shift) * std::fabs(g0);
        if (low <= rel_tol * std::fabs(r.value) || attempt == 3) {
            OracleResult o;
            o.value = r.value;
            o.est_abs_error = r.abs_error + low;
            o.method = OracleMethod::Quadrature;
            return o;
        }
        t_lo *= 1e-4;
    }
}

}  // namespace

OracleResult avg_mmse_quad(const FadingModel& model, const CanonicalCurve& curve, double snr, double rel_tol)
{
    return kernel_integral(model, snr, rel_tol, [&](double s) { return curve.mmse(s); }, power(curve.input()));
}

OracleResult avg_mmse_quad(const FadingModel& model, const Constellation& input, double snr, double rel_tol)
{
    return avg_mmse_quad(model, CanonicalCurve(input), snr, rel_tol);
}

OracleResult avg_mi_quad(const FadingModel& model, const CanonicalCurve& curve, double snr, double rel_tol)
{
    const auto k = curve.input().kind();
    if (k != InputKind::Discrete && k != InputKind::Gaussian)
        throw DomainError("avg_mi_quad: mutual information needs a discrete or Gaussian input");
    // f(t)/t is the kernel of the mutual information
    auto r = kernel_integral(model, snr, rel_tol, [&](double s) { return s > 0.0 ? curve.mutual_information(s) / s * snr : 0.0; },
                             snr);
    if (curve.input().is_discrete()) {
        const double cap = entropy(curve.input());
        if (r.value > cap + 1e-9) warn("avg_mi_quad: value exceeds the input entropy");
    }
    return r;
}

OracleResult avg_mi_quad(const FadingModel& model, const Constellation& input, double snr, double rel_tol)
{
    return avg_mi_quad(model, CanonicalCurve(input), snr, rel_tol);
}

OracleResult avg_equivocation_quad(const FadingModel& model, const CanonicalCurve& curve, double snr,
                                   double rel_tol)
{
    if (!curve.input().is_discrete()) throw DomainError("avg_equivocation_quad: discrete input required");
    if (!(snr > 0.0)) throw DomainError("avg_equivocation_quad: snr must be positive");
    return kernel_integral(
        model, snr, rel_tol,
        [&](double s) { return curve.equivocation(s) / s * snr; }, entropy(curve.input()), 1);
}

GainSampler::GainSampler(const FadingModel& model) : model_(model)
{
    if (!model.closed_form()) throw DomainError("Monte Carlo: custom fading has no sampler");
}

double GainSampler::operator()(std::mt19937_64& rng) const
{
    std::normal_distribution<double> n01;
    switch (model_.kind()) {
    case FadingKind::Rayleigh: {
        const double a = n01(rng), b = n01(rng);
        return model_.sigma() * model_.sigma() * (a * a + b * b);
    }
    case FadingKind::Ricean:
    case FadingKind::VectorGaussian: {
        const double s = model_.sigma();
        const int k = model_.kind() == FadingKind::Ricean ? 1 : model_.k();
        // the whole mean sits on the first component
        double re = model_.mu_abs() + s * n01(rng), im = s * n01(rng);
        double acc = re * re + im * im;
        for (int i = 1; i < k; ++i) {
            re = s * n01(rng);
            im = s * n01(rng);
            acc += re * re + im * im;
        }
        return acc;
    }
    case FadingKind::Nakagami: {
        std::gamma_distribution<double> g(model_.shape_mu(), model_.spread_w() / model_.shape_mu());
        return g(rng);
    }
    case FadingKind::Custom: break;
    }
    throw DomainError("Monte Carlo: custom fading has no sampler");
}

namespace {

// ln mmse on a ln snr grid; direct evaluation outside.
class MmseTable {
public:
    MmseTable(const CanonicalCurve& c, double s_lo, double s_hi) : curve_(c)
    {
        if (c.input().kind() == InputKind::Gaussian) return;
        const double s_req = s_hi;
        // beyond exp(-d^2 s/4) ~ 1e-280 the logarithm is not representable
        if (c.input().is_discrete()) s_hi = std::min(s_hi, 2600.0 / std::pow(min_distance(c.input()), 2));
        if (!(s_hi > 4.0 * s_lo)) return;
        x0_ = std::log(s_lo);
        x1_ = std::log(s_hi);
        const double h = 1.0 / 32.0;
        const int n = static_cast<int>(std::ceil((x1_ - x0_) / h)) + 1;
        x1_ = x0_ + (n - 1) * h;
        std::vector<double> y;
        for (int i = 0; i < n; ++i) {
            const double v = std::log(c.mmse(std::exp(x0_ + i * h)));
            if (!std::isfinite(v)) {
                // mmse underflowed; it is decreasing, so above here it is
                // below exp(y.back())
                floor_ = true;
                break;
            }
            y.push_back(v);
        }
        if (y.size() < 8) return;
        x1_ = x0_ + (y.size() - 1) * h;
        if (floor_) max_sdev_ = s_req * std::exp(y.back());
        spline_.emplace(y.begin(), y.end(), x0_, h);
        const int nv = static_cast<int>(y.size());
        for (int i = 0; i + 1 < nv; i += std::max(1, nv / 16)) {
            const double s = std::exp(x0_ + (i + 0.5) * h);
            const double exact = c.mmse(s);
            // a sample contributes g mmse(snr g) = (s / snr) mmse(s)
            max_sdev_ = std::max(max_sdev_, s * std::fabs(std::exp((*spline_)(std::log(s))) - exact));
        }
    }

    double operator()(double s) const
    {
        if (!spline_) return curve_.mmse(s);
        const double x = std::log(s);
        if (floor_ && x > x1_) return 0.0;
        if (!(x >= x0_ && x <= x1_)) return curve_.mmse(s);
        return std::exp((*spline_)(x));
    }

    // max of s |interpolated - exact| over the validation points
    double max_scaled_error() const { return max_sdev_; }

private:
    const CanonicalCurve& curve_;
    double x0_ = 0.0, x1_ = 0.0, max_sdev_ = 0.0;
    bool floor_ = false;
    std::optional<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

}  // namespace

OracleResult avg_mmse_mc(const FadingModel& model, const Constellation& input, double snr, long n_samples,
                         std::uint64_t seed, int threads)
{
    if (n_samples < 2) throw DomainError("Monte Carlo: at least two samples required");
    if (!(snr >= 0.0)) throw DomainError("Monte Carlo: snr must be non-negative");
    const GainSampler sampler(model);
    const CanonicalCurve curve(input);
    curve.set_cache_enabled(false);
    const double t_hi = std::exp(kernel_w_hi(model));
    const double scale = std::max(snr, 1e-300);
    const MmseTable table(curve, std::max(scale * 1e-7, 1e-12), std::max(scale * t_hi, 1e-6));

    constexpr long block = 1L << 16;
    const long nblocks = (n_samples + block - 1) / block;
    std::vector<long double> sum(nblocks, 0.0L), sum2(nblocks, 0.0L);
    std::atomic<long> next{0};
    auto work = [&] {
        for (long b; (b = next.fetch_add(1)) < nblocks;) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
            std::mt19937_64 rng(seq);
            const long count = std::min(block, n_samples - b * block);
            long double s = 0.0L, s2 = 0.0L;
            for (long i = 0; i < count; ++i) {
                const double g = sampler(rng);
                const double y = g * table(snr * g);
                s += y;
                s2 += static_cast<long double>(y) * y;
            }
            sum[b] = s;
            sum2[b] = s2;
        }
    };
    const int nt = std::clamp<int>(threads > 0 ? threads : worker_threads(), 1, static_cast<int>(nblocks));
    std::vector<std::thread> pool;
    for (int i = 1; i < nt; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    long double s = 0.0L, s2 = 0.0L;
    for (long b = 0; b < nblocks; ++b) {
        s += sum[b];
        s2 += sum2[b];
    }
    const long double n = n_samples;
    const long double mean = s / n;
    const long double var = std::max<long double>(0.0L, (s2 - n * mean * mean) / (n - 1));
    OracleResult r;
    r.value = static_cast<double>(mean);
    r.est_abs_error = static_cast<double>(std::sqrt(var / n)) + table.max_scaled_error() / scale;
    r.method = OracleMethod::MonteCarlo;
    r.n_samples = n_samples;
    r.seed = seed;
    return r;
}

double immse_check(const FadingModel& model, const Constellation& input, double snr, double h_step)
{
    if (!(snr > 0.0) || !(h_step > 0.0)) throw DomainError("immse_check: snr and step must be positive");
    const double h = std::min(h_step, 0.5 * snr);
    const CanonicalCurve curve(input);
    const double ip = avg_mi_quad(model, curve, snr + h, 1e-12).value;
    const double im = avg_mi_quad(model, curve, snr - h, 1e-12).value;
    const double m = avg_mmse_quad(model, curve, snr, 1e-11).value;
    return std::fabs((ip - im) / (2.0 * h) - m) / m;
}

}  // namespace fadexp
