#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fadexp/constellations.hpp"
#include "fadexp/errors.hpp"

#include <algorithm>
#include <cmath>

using namespace fadexp;

namespace {

double brute_min_distance(const std::vector<cplx>& p)
{
    double d = INFINITY;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) d = std::min(d, std::abs(p[i] - p[j]));
    return d;
}

bool contains(const std::vector<cplx>& set, cplx x, double tol)
{
    return std::any_of(set.begin(), set.end(), [&](cplx y) { return std::abs(x - y) < tol; });
}

double mean_abs(const Constellation& c)
{
    cplx m = 0;
    for (std::size_t i = 0; i < c.size(); ++i) m += c.probs()[i] * c.points()[i];
    return std::abs(m);
}

}  // namespace

TEST_CASE("psk")
{
    const auto b = make_psk(2);
    REQUIRE(b.size() == 2);
    CHECK(contains(b.points(), {1, 0}, 1e-15));
    CHECK(contains(b.points(), {-1, 0}, 1e-15));
    CHECK(b.probs()[0] == 0.5);
    const auto q = make_psk(4);
    const double r = 1 / std::sqrt(2.0);
    for (cplx x : {cplx(r, r), cplx(-r, r), cplx(r, -r), cplx(-r, -r)}) CHECK(contains(q.points(), x, 1e-15));
    CHECK(power(make_psk(8)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(min_distance(b) == doctest::Approx(2.0));
    CHECK(min_distance(q) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS(make_psk(1));
}

TEST_CASE("pam and qam")
{
    const auto p2 = make_pam(2);
    CHECK(contains(p2.points(), {1, 0}, 1e-15));
    CHECK(contains(p2.points(), {-1, 0}, 1e-15));
    CHECK(min_distance(make_pam(4)) == doctest::Approx(2 / std::sqrt(5.0)).epsilon(1e-14));
    CHECK(brute_min_distance(make_pam(4).points()) == doctest::Approx(2 / std::sqrt(5.0)).epsilon(1e-14));
    CHECK(min_distance(make_qam(16)) == doctest::Approx(2 / std::sqrt(10.0)).epsilon(1e-14));
    const auto q4 = make_qam(4), p4 = make_psk(4);
    for (auto x : q4.points()) CHECK(contains(p4.points(), x, 1e-15));
    CHECK_THROWS(make_qam(8));
    CHECK_THROWS(make_pam(1));

    for (int m : {2, 4, 8}) {
        const auto qam = make_qam(m * m);
        const auto pam = make_pam(m);
        CHECK(qam.size() == static_cast<std::size_t>(m * m));
        for (auto a : pam.points())
            for (auto b : pam.points()) {
                const cplx x((a.real()) / std::sqrt(2.0), b.real() / std::sqrt(2.0));
                bool hit = false;
                for (auto y : qam.points())
                    hit = hit || (std::fabs(x.real() - y.real()) < 1e-14 && std::fabs(x.imag() - y.imag()) < 1e-14);
                CHECK(hit);
            }
    }
}

TEST_CASE("library sets have unit power and zero mean")
{
    for (const char* n : {"bpsk", "qpsk", "8psk", "16psk", "4pam", "8pam", "16qam", "64qam", "256qam"}) {
        const auto c = constellation_by_name(n);
        CHECK(std::fabs(power(c) - 1.0) < 1e-12);
        CHECK(mean_abs(c) < 1e-12);
        double s = 0;
        for (double p : c.probs()) s += p;
        CHECK(std::fabs(s - 1.0) < 1e-12);
    }
    for (auto c : {make_inf_psk(), make_inf_pam(), make_inf_qam(), make_gaussian()}) CHECK(power(c) == 1.0);
}

TEST_CASE("custom sets")
{
    const auto c = Constellation::discrete({0.0, 2.0}, {0.5, 0.5}, "c");
    CHECK(power(c) == doctest::Approx(2.0));
    CHECK(variance(c) == doctest::Approx(1.0));
    CHECK(entropy(c) == doctest::Approx(std::log(2.0)));
    // small normalization defect is repaired, large one rejected
    const auto r = Constellation::discrete({-1.0, 1.0}, {0.5, 0.5 + 5e-10}, "r");
    CHECK(std::fabs(r.probs()[0] + r.probs()[1] - 1.0) < 1e-15);
    CHECK_THROWS(Constellation::discrete({-1.0, 1.0}, {0.5, 0.6}, "bad"));
    CHECK_THROWS(Constellation::discrete({1.0, 1.0 + 1e-13}, {0.5, 0.5}, "dup"));
    CHECK_THROWS(Constellation::discrete({1.0}, {1.0}, "one"));
    CHECK_THROWS(Constellation::discrete({-1.0, 1.0}, {1.0, 0.0}, "zero"));
    CHECK_THROWS(min_distance(make_gaussian()));
}

TEST_CASE("separable axes")
{
    CHECK(separable_axes(make_pam(4)).size() == 1);
    CHECK(separable_axes(make_qam(16)).size() == 2);
    CHECK(separable_axes(make_psk(8)).empty());
}
