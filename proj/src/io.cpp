#include "fadexp/io.hpp"

#include "fadexp/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace fadexp::io {

namespace {

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// Inline JSON if it looks like it, else an existing file, else nullopt.
std::optional<json> json_arg(const std::string& arg)
{
    if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
        try {
            return json::parse(arg);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad JSON argument: ") + e.what());
        }
    }
    if (std::ifstream(arg).good()) return read_json_file(arg);
    return std::nullopt;
}

double num(const json& j, const char* key)
{
    if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double dflt)
{
    return j.contains(key) ? num(j, key) : dflt;
}

double sigma_of(const json& j)
{
    if (j.contains("two_sigma2")) return std::sqrt(num(j, "two_sigma2") / 2.0);
    return num(j, "sigma");
}

double mu_abs_of(const json& j)
{
    if (j.contains("mu")) {
        const auto& m = j.at("mu");
        if (m.is_array() && m.size() == 2) return std::hypot(m[0].get<double>(), m[1].get<double>());
        if (m.is_number()) return std::fabs(m.get<double>());
        throw ConfigError("field 'mu' must be a number or [re, im]");
    }
    return num_or(j, "mu_abs", 0.0);
}

template <class F> auto wrap(F f) -> decltype(f())
{
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

Constellation parse_constellation(const json& j)
{
    return wrap([&] {
        if (j.is_string()) return constellation_by_name(j.get<std::string>());
        if (!j.is_object() || !j.contains("points")) throw ConfigError("constellation: expected a name or {points}");
        std::vector<cplx> pts;
        std::vector<double> probs;
        for (const auto& p : j.at("points")) {
            pts.emplace_back(num_or(p, "re", 0.0), num_or(p, "im", 0.0));
            probs.push_back(num(p, "prob"));
        }
        return Constellation::discrete(pts, probs, j.value("label", std::string("custom")));
    });
}

Constellation constellation_from_arg(const std::string& arg)
{
    if (auto j = json_arg(arg)) return parse_constellation(*j);
    return wrap([&] { return constellation_by_name(arg); });
}

FadingModel parse_fading(const json& j)
{
    return wrap([&] {
        if (!j.is_object() || !j.contains("kind")) throw ConfigError("fading: missing 'kind'");
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "rayleigh") return FadingModel::rayleigh(sigma_of(j));
        if (kind == "ricean" || kind == "rician") return FadingModel::ricean(mu_abs_of(j), sigma_of(j));
        if (kind == "nakagami") return FadingModel::nakagami(num(j, "mu"), num_or(j, "w", 1.0));
        if (kind == "vector")
            return FadingModel::vector(static_cast<int>(num(j, "k")), mu_abs_of(j), sigma_of(j));
        if (kind == "custom") {
            const auto& c = j.contains("custom") ? j.at("custom") : j;
            std::vector<FadingTerm> terms;
            for (const auto& t : c.at("coeffs"))
                terms.push_back({num(t, "a"), num(t, "p"), t.value("logpow", 0)});
            auto none = [](double) -> double {
                throw ConfigError("custom fading read from JSON has no density");
            };
            return FadingModel::custom(terms, none, c.value("q_zero", true));
        }
        throw ConfigError("fading: unknown kind '" + kind + "'");
    });
}

FadingModel fading_from_arg(const std::string& arg)
{
    if (auto j = json_arg(arg)) return parse_fading(*j);
    // kind:key=value,key=value
    json j;
    const auto colon = arg.find(':');
    j["kind"] = arg.substr(0, colon);
    if (colon != std::string::npos) {
        std::stringstream ss(arg.substr(colon + 1));
        for (std::string kv; std::getline(ss, kv, ',');) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("fading: expected key=value in '" + kv + "'");
            char* end = nullptr;
            const std::string val = kv.substr(eq + 1);
            const double v = std::strtod(val.c_str(), &end);
            if (end == val.c_str() || *end != '\0') throw ConfigError("fading: bad number '" + val + "'");
            j[kv.substr(0, eq)] = v;
        }
    }
    return parse_fading(j);
}

ChannelBank parse_bank(const json& j)
{
    return wrap([&] {
        ChannelBank b;
        b.total_power = num(j, "P");
        for (const auto& s : j.at("subchannels")) {
            const auto& f = s.at("fading");
            b.subchannels.push_back({f.is_string() ? fading_from_arg(f.get<std::string>()) : parse_fading(f),
                                     parse_constellation(s.at("input"))});
        }
        b.validate();
        return b;
    });
}

ChannelBank bank_from_file(const std::string& path)
{
    if (auto j = json_arg(path)) return parse_bank(*j);
    throw ConfigError("cannot open " + path);
}

json to_json(const Expansion& e)
{
    json j;
    j["constant"] = e.constant;
    j["terms"] = json::array();
    for (const auto& t : e.terms) j["terms"].push_back({{"coeff", t.coeff}, {"snr_pow", t.snr_pow}, {"log_pow", t.log_pow}});
    j["regime"] = to_string(e.regime);
    // JSON has no infinity
    if (std::isfinite(e.error_order))
        j["error_order"] = e.error_order;
    else
        j["error_order"] = "inf";
    return j;
}

Expansion expansion_from_json(const json& j)
{
    return wrap([&] {
        Expansion e;
        e.constant = num_or(j, "constant", 0.0);
        for (const auto& t : j.at("terms")) e.terms.push_back({num(t, "coeff"), num(t, "snr_pow"), t.value("log_pow", 0)});
        e.regime = j.value("regime", std::string("high")) == "low" ? Regime::LowSnr : Regime::HighSnr;
        if (j.contains("error_order") && j.at("error_order").is_number())
            e.error_order = j.at("error_order").get<double>();
        else
            e.error_order = std::numeric_limits<double>::infinity();
        return e;
    });
}

json to_json(const PowerAllocation& a)
{
    return {{"p", a.p},
            {"lambda", a.lambda},
            {"capacity", a.capacity},
            {"method", to_string(a.method)},
            {"kkt_residual", a.kkt_residual}};
}

json to_json(const MellinValue& v)
{
    return {{"z", v.z}, {"value", v.value}, {"method", to_string(v.method)}, {"est_rel_error", v.est_rel_error}};
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace fadexp::io
