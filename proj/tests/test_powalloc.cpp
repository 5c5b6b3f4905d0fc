#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fadexp/errors.hpp"
#include "fadexp/mellin.hpp"
#include "fadexp/powalloc.hpp"
#include "fadexp/reference.hpp"

#include <cmath>

using namespace fadexp;

namespace {

double db(double x)
{
    return std::pow(10.0, x / 10);
}

ChannelBank rayleigh_pair()
{
    return {{{FadingModel::rayleigh(std::sqrt(2.0)), make_qam(16)}, {FadingModel::rayleigh(std::sqrt(0.5)), make_psk(4)}},
            1.0};
}

}  // namespace

TEST_CASE("bank validation")
{
    ChannelBank b;
    CHECK_THROWS_AS(b.validate(), ConfigError);
    b.subchannels.push_back({FadingModel::rayleigh(1), make_gaussian()});
    CHECK_THROWS_AS(b.validate(), ConfigError);
    b.subchannels[0].input = make_psk(2);
    b.total_power = 0;
    CHECK_THROWS_AS(b.validate(), ConfigError);
    b.total_power = 2;
    const auto a = exact_allocation(b, 10);
    REQUIRE(a.p.size() == 1);
    CHECK(a.p[0] == 2.0);
}

TEST_CASE("symmetric bank splits evenly")
{
    ChannelBank b{{{FadingModel::rayleigh(0.7), make_psk(4)}, {FadingModel::rayleigh(0.7), make_psk(4)}}, 2.0};
    const auto a = exact_allocation(b, db(20));
    CHECK(std::fabs(a.p[0] - 1.0) < 1e-9);
    CHECK(std::fabs(a.p[1] - 1.0) < 1e-9);
    const auto s = asymptotic_allocation(b, db(20));
    CHECK(std::fabs(s.p[0] - 1.0) < 1e-12);
}

TEST_CASE("KKT conditions")
{
    const auto b = rayleigh_pair();
    for (double x : {15.0, 30.0}) {
        const double snr = db(x);
        const auto a = exact_allocation(b, snr);
        CHECK(a.kkt_residual <= 1e-6);
        CHECK(std::fabs(a.p[0] + a.p[1] - 1.0) < 1e-12);
        // independent check of the equalization
        for (std::size_t i = 0; i < 2; ++i) {
            const auto& sc = b.subchannels[i];
            const double k = snr * avg_mmse_quad(sc.fading, sc.input, snr * a.p[i], 1e-11).value;
            CHECK(std::fabs(k - a.lambda) <= 1e-6 * a.lambda);
        }
        const double c = constrained_capacity(b, snr, a);
        CHECK(c == doctest::Approx(a.capacity).epsilon(1e-12));
        // optimum beats a perturbed split
        PowerAllocation off = a;
        off.p = {a.p[0] * 1.05, 1 - a.p[0] * 1.05};
        CHECK(constrained_capacity(b, snr, off) < c);
    }
}

TEST_CASE("asymptotic policy")
{
    const auto b = rayleigh_pair();
    // tau_i = M[mmse_i;2]/(2 s_i^2), 16QAM value from the stored reference table
    const double r0 = std::sqrt(17.3742 / 4.0), r1 = std::sqrt(mellin_mmse_qpsk(1.0).value / 1.0);
    const auto a = asymptotic_allocation(b, db(30));
    CHECK(std::fabs(a.p[0] + a.p[1] - 1.0) < 1e-12);
    CHECK(std::fabs(a.p[0] - r0 / (r0 + r1)) < 1e-4);
    CHECK(a.lambda == doctest::Approx((r0 + r1) * (r0 + r1) / db(30)).epsilon(1e-4));
    ChannelBank n{{{FadingModel::nakagami(0.5, 1), make_psk(4)}, {FadingModel::rayleigh(1), make_psk(4)}}, 1.0};
    CHECK_THROWS(asymptotic_allocation(n, 100.0));
    double prev = 1;
    for (double x : {15.0, 25.0, 35.0}) {
        const auto e = exact_allocation(b, db(x));
        const auto s = asymptotic_allocation(b, db(x));
        CHECK(e.capacity >= s.capacity - 1e-9);
        const double gap = std::fabs(e.p[0] - s.p[0]);
        CHECK(gap < prev);
        prev = gap;
    }
}
