#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fadexp/errors.hpp"
#include "fadexp/fading.hpp"

#include <cmath>
#include <vector>

using namespace fadexp;

namespace {

double rel(double a, double b)
{
    return std::fabs(a - b) / std::fabs(b);
}

// Simpson of g over [0, T] after t = u^2, enough for smooth kernels.
template <class G> double integrate(G g, double T, int n = 40000)
{
    const double U = std::sqrt(T), h = U / n;
    double s = 0;
    for (int i = 0; i <= n; ++i) {
        const double u = i * h;
        // the kernel vanishes at t = 0
        if (i > 0) s += (i == n ? 1 : (i % 2 ? 4 : 2)) * 2 * u * g(u * u);
    }
    return s * h / 3;
}

// E|h|^2 from the amplitude law by Simpson: int r^2 f_|h|(r) dr
double ricean_second_moment_direct(double mu, double s)
{
    auto fr = [&](double r) { return r / (s * s) * std::exp(-(r * r + mu * mu) / (2 * s * s)) * std::cyl_bessel_i(0.0, r * mu / (s * s)); };
    const int n = 40000;
    const double R = mu + 12 * s, h = R / n;
    double acc = 0;
    for (int i = 0; i <= n; ++i) acc += (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2)) * (i * h) * (i * h) * fr(i * h);
    return acc * h / 3;
}

const double kS = 1 / std::sqrt(2.0);

}  // namespace

TEST_CASE("kernel densities")
{
    CHECK(rel(kernel_density(FadingModel::rayleigh(kS), 1.0), std::exp(-1.0)) < 1e-14);
    CHECK(rel(kernel_density(FadingModel::nakagami(1, 1), 1.0), std::exp(-1.0)) < 1e-14);
    CHECK_THROWS_AS(kernel_density(FadingModel::rayleigh(kS), 0.0), DomainError);
    const auto r = FadingModel::rayleigh(kS);
    CHECK(std::fabs(integrate([&](double t) { return kernel_density(r, t); }, 60) - 1.0) < 1e-8);
}

TEST_CASE("kernel mass equals the second moment and mellin_f(1)")
{
    const std::vector<FadingModel> models{FadingModel::rayleigh(0.8), FadingModel::ricean(1.0, kS),
                                          FadingModel::ricean(std::sqrt(0.9), 1 / (2 * std::sqrt(5.0))),
                                          FadingModel::nakagami(0.5, 1.0), FadingModel::nakagami(2.5, 1.7),
                                          FadingModel::vector(3, 0.7, 0.6)};
    const std::vector<double> closed{2 * 0.64, 2 * 0.5 + 1, 2 * 0.05 + 0.9, 1.0, 1.7, 2 * 3 * 0.36 + 0.49};
    for (std::size_t i = 0; i < models.size(); ++i) {
        CHECK(rel(models[i].second_moment(), closed[i]) < 1e-12);
        CHECK(rel(mellin_f(models[i], 1.0), closed[i]) < 1e-10);
        CHECK(rel(integrate([&](double t) { return kernel_density(models[i], t); }, 120, 200000), closed[i]) < 1e-6);
    }
    CHECK(rel(ricean_second_moment_direct(1.0, kS), 2.0) < 1e-8);
}

TEST_CASE("closed-form transforms")
{
    CHECK(rel(mellin_f(FadingModel::rayleigh(kS), 1.0), 1.0) < 1e-14);
    for (double mu : {0.5, 1.3, 4.0}) CHECK(rel(mellin_f(FadingModel::nakagami(mu, 2.2), 1.0), 2.2) < 1e-12);
    CHECK(rel(mellin_f(FadingModel::ricean(1.0, kS), 1.0), 2.0) < 1e-12);
    // Rayleigh: (2s^2)^z Gamma(z+1)
    const auto r = FadingModel::rayleigh(0.9);
    for (double z : {-0.5, 0.3, 2.5}) CHECK(rel(mellin_f(r, z), std::pow(2 * 0.81, z) * std::tgamma(z + 1)) < 1e-12);
    // against quadrature of t^{z-1} f
    const auto ric = FadingModel::ricean(1.2, 0.7);
    for (double z : {0.5, 2.0}) {
        const double q = integrate([&](double t) { return std::pow(t, z - 1) * kernel_density(ric, t); }, 200, 200000);
        CHECK(rel(mellin_f(ric, z), q) < 1e-7);
    }
    CHECK_THROWS_AS(mellin_f(r, -1.0), DomainError);
    CHECK_THROWS_AS(mellin_f(FadingModel::nakagami(0.5, 1), -0.6), DomainError);
    CHECK_THROWS_AS(mellin_f(FadingModel::vector(2, 0, 1), -2.0), DomainError);
}

TEST_CASE("small-t coefficients")
{
    const auto r = small_t_coefficients(FadingModel::rayleigh(kS), 3);
    CHECK(r[0].a == 1.0);
    CHECK(r[0].p == doctest::Approx(1.0));
    CHECK(r[1].p == doctest::Approx(-1.0));
    CHECK(r[2].p == doctest::Approx(0.5));
    const auto n = small_t_coefficients(FadingModel::nakagami(0.5, 1.0), 2);
    CHECK(n[0].a == 0.5);
    CHECK(rel(n[0].p, std::sqrt(0.5) / std::tgamma(0.5)) < 1e-14);
    CHECK(rel(n[0].p, 0.3989422804014327) < 1e-12);
    CHECK(rel(n[1].p, -std::sqrt(0.5) / std::tgamma(0.5) * 0.5) < 1e-14);

    // Ricean |mu| = 1, sigma = 1/sqrt 2: f(t) = t e^{-1} e^{-t} I0(2 sqrt t)
    // = e^{-1} sum_{j,l} (-1)^j t^{1+j+l} / (j! l!^2)
    const auto c = small_t_coefficients(FadingModel::ricean(1.0, kS), 4);
    for (int m = 0; m < 4; ++m) {
        double s = 0;
        for (int l = 0; l <= m; ++l) {
            const int j = m - l;
            s += (j % 2 ? -1.0 : 1.0) / (std::tgamma(j + 1.0) * std::pow(std::tgamma(l + 1.0), 2));
        }
        CHECK(c[m].a == m + 1.0);
        // the t^2 coefficient cancels exactly
        CHECK(std::fabs(c[m].p - std::exp(-1.0) * s) < 1e-14);
    }
    CHECK_THROWS(small_t_coefficients(FadingModel::rayleigh(kS), 31));
}

TEST_CASE("truncated small-t series dominates the remainder")
{
    const std::vector<FadingModel> models{FadingModel::rayleigh(0.6), FadingModel::ricean(0.9, 0.5),
                                          FadingModel::nakagami(0.7, 1.3), FadingModel::vector(2, 0.4, 0.8)};
    for (const auto& m : models) {
        const int M = 4;
        const auto c = small_t_coefficients(m, M + 1);
        for (double t : {1e-4, 1e-3, 1e-2}) {
            double s = 0;
            for (int i = 0; i < M; ++i) s += c[i].p * std::pow(t, c[i].a);
            const double f = kernel_density(m, t);
            CHECK(std::fabs(f - s) <= 2 * std::fabs(c[M].p) * std::pow(t, c[M].a) + 1e-14 * f);
        }
    }
}

TEST_CASE("vector k = 1 reduces to Ricean")
{
    const auto v = FadingModel::vector(1, 0.8, 0.6);
    const auto r = FadingModel::ricean(0.8, 0.6);
    for (double t : {0.01, 0.5, 3.0, 40.0}) CHECK(rel(kernel_density(v, t), kernel_density(r, t)) < 1e-12);
    for (double z : {-0.5, 0.5, 1.0, 3.0}) CHECK(rel(mellin_f(v, z), mellin_f(r, z)) < 1e-12);
    const auto cv = small_t_coefficients(v, 6), cr = small_t_coefficients(r, 6);
    for (int i = 0; i < 6; ++i) CHECK(rel(cv[i].p, cr[i].p) < 1e-12);
    // Rayleigh is Ricean without line of sight
    for (double t : {0.1, 2.0}) CHECK(rel(kernel_density(FadingModel::ricean(0, 0.6), t), kernel_density(FadingModel::rayleigh(0.6), t)) < 1e-14);
}

TEST_CASE("continued transform and pole brackets")
{
    const auto r = FadingModel::rayleigh(kS);
    CHECK(rel(mellin_f_continued(r, 0.4, 0), mellin_f(r, 0.6)) < 1e-14);
    // (z-2)^2 pi M[f;1-z]/sin(pi z) near z = 2, Rayleigh 2s^2 = 1: -1 and -gamma
    CHECK(std::fabs(pole_bracket(r, 2.0, 2, 0) + 1.0) < 1e-9);
    CHECK(std::fabs(pole_bracket(r, 2.0, 2, 1) + 0.57721566490153286) < 1e-8);
    CHECK(rel(pole_bracket(r, 2.0, 2, 1, 1e-3), pole_bracket(r, 2.0, 2, 1, 5e-4)) < 1e-6);
    // derivative by central differences against the digamma closed form
    // d/dz Gamma(2 - z) = -Gamma(2 - z) psi(2 - z)
    const double z = 0.3;
    const double dg = -std::tgamma(2 - z) * (std::lgamma(2 - z + 1e-6) - std::lgamma(2 - z - 1e-6)) / 2e-6;
    CHECK(rel(mellin_f_continued(r, z, 1), dg) < 1e-6);

}

TEST_CASE("custom models")
{
    auto dens = [](double t) { return t * std::exp(-t); };
    const auto c = FadingModel::custom({{1.0, 1.0, 0}, {2.0, -1.0, 0}}, dens);
    CHECK(rel(mellin_f(c, 1.0), 1.0) < 1e-9);
    CHECK(rel(mellin_f(c, 2.5), std::tgamma(3.5)) < 1e-9);
    CHECK(small_t_coefficients(c, 5).size() == 2);
    CHECK_THROWS(FadingModel::custom({}, dens));
    CHECK_THROWS(FadingModel::custom({{2.0, 1.0, 0}, {1.0, 1.0, 0}}, dens));
    CHECK_THROWS(FadingModel::nakagami(0.4, 1.0));
    CHECK_THROWS(FadingModel::rayleigh(0.0));
}
