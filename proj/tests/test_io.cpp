#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fadexp/errors.hpp"
#include "fadexp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace fadexp;
using fadexp::io::json;

TEST_CASE("constellations")
{
    const auto a = io::parse_constellation(json("16qam"));
    CHECK(a.size() == 16);
    const auto b = io::parse_constellation(json::parse(
        R"({"label":"ook","points":[{"re":0,"prob":0.5},{"re":1.4142135623730951,"prob":0.5}]})"));
    CHECK(b.size() == 2);
    CHECK(std::fabs(power(b) - 1.0) < 1e-12);
    CHECK(io::constellation_from_arg("qpsk").size() == 4);
    CHECK(io::constellation_from_arg(R"({"points":[{"re":1,"prob":0.5},{"re":-1,"prob":0.5}]})").size() == 2);
    CHECK_THROWS_AS(io::parse_constellation(json::parse(R"({"points":[{"re":1,"prob":1}]})")), ConfigError);
    CHECK_THROWS_AS(io::constellation_from_arg("17qam"), ConfigError);
    CHECK_THROWS_AS(io::parse_constellation(json(3)), ConfigError);
}

TEST_CASE("fading")
{
    auto m = io::fading_from_arg("rayleigh:sigma=0.7071067811865476");
    CHECK(m.kind() == FadingKind::Rayleigh);
    CHECK(std::fabs(m.second_moment() - 1.0) < 1e-12);
    m = io::fading_from_arg("nakagami:mu=0.5,w=2");
    CHECK(m.kind() == FadingKind::Nakagami);
    CHECK(m.second_moment() == doctest::Approx(2.0));
    m = io::fading_from_arg(R"({"kind":"ricean","mu":[0.6,0.8],"two_sigma2":0.5})");
    CHECK(m.second_moment() == doctest::Approx(1.5));
    m = io::fading_from_arg("rician:mu_abs=1,sigma=0.5");
    CHECK(m.kind() == FadingKind::Ricean);
    m = io::fading_from_arg("vector:k=3,mu_abs=0.5,sigma=0.5");
    CHECK(m.kind() == FadingKind::VectorGaussian);
    CHECK(m.k() == 3);
    m = io::parse_fading(json::parse(R"({"kind":"custom","coeffs":[{"a":0,"p":1},{"a":1,"p":-1,"logpow":0}]})"));
    CHECK(m.kind() == FadingKind::Custom);
    CHECK_THROWS_AS(m.custom_density()(0.5), ConfigError);
    CHECK_THROWS_AS(io::fading_from_arg("weibull:k=2"), ConfigError);
    CHECK_THROWS_AS(io::fading_from_arg("rayleigh:sigma=-1"), ConfigError);
    CHECK_THROWS_AS(io::fading_from_arg("rayleigh:sigma"), ConfigError);
    CHECK_THROWS_AS(io::fading_from_arg("nakagami:mu=abc"), ConfigError);
}

TEST_CASE("banks")
{
    const char* path = "test_io_bank.json";
    {
        std::ofstream f(path);
        f << R"({"P": 2, "subchannels": [
            {"fading": {"kind": "rayleigh", "sigma": 1.4142135623730951}, "input": "16qam"},
            {"fading": "rayleigh:sigma=0.7071067811865476", "input": "qpsk"}]})";
    }
    const auto b = io::bank_from_file(path);
    std::remove(path);
    CHECK(b.total_power == 2.0);
    CHECK(b.subchannels.size() == 2);
    CHECK(b.subchannels[1].input.size() == 4);
    CHECK_THROWS_AS(io::bank_from_file("does_not_exist.json"), ConfigError);
    CHECK_THROWS_AS(io::parse_bank(json::parse(R"({"P": 1, "subchannels": []})")), ConfigError);
}

TEST_CASE("expansion round trip")
{
    Expansion e;
    e.constant = std::log(4.0);
    e.terms = {{-1.25, -1.0, 0}, {0.5, -2.0, 1}};
    e.error_order = 3.0;
    auto j = io::to_json(e);
    auto back = io::expansion_from_json(json::parse(j.dump()));
    CHECK(back.constant == e.constant);
    REQUIRE(back.terms.size() == 2);
    CHECK(back.terms[1].coeff == 0.5);
    CHECK(back.terms[1].log_pow == 1);
    CHECK(back.error_order == 3.0);
    CHECK(back.regime == Regime::HighSnr);

    e.error_order = INFINITY;
    e.regime = Regime::LowSnr;
    j = io::to_json(e);
    CHECK(j["error_order"] == "inf");
    back = io::expansion_from_json(json::parse(j.dump()));
    CHECK(std::isinf(back.error_order));
    CHECK(back.regime == Regime::LowSnr);
}

TEST_CASE("number format")
{
    CHECK(std::stod(io::fmt(0.1)) == 0.1);
    CHECK(std::stod(io::fmt(1.0 / 3.0)) == 1.0 / 3.0);
    const auto m = io::to_json(MellinValue{1.0, 2.5, MellinMethod::Numeric, 1e-9});
    CHECK(m["value"] == 2.5);
}
