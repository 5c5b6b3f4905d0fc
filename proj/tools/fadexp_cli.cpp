#include "fadexp/canonical.hpp"
#include "fadexp/errors.hpp"
#include "fadexp/expansions.hpp"
#include "fadexp/io.hpp"
#include "fadexp/mellin.hpp"
#include "fadexp/powalloc.hpp"
#include "fadexp/reference.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

using namespace fadexp;
using io::fmt;
using io::json;

namespace {

struct Config {
    std::string input = "qpsk";
    std::string fading = "rayleigh:sigma=0.70710678118654752";
    std::string bank;
    std::string snr_db = "0:40:1";
    std::string z = "0.5,1,1.5,2";
    std::string regime = "high";
    std::string quantity = "mmse";
    int terms = -1;
    std::uint64_t seed = 1;
    long mc_samples = 100000;
    double tol = 1e-9;
    std::string out = "-";
    std::string format = "csv";
};

std::vector<double> parse_range(const std::string& s)
{
    std::vector<double> parts;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ':');) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || *end != '\0') throw ConfigError("bad --snr-db '" + s + "'");
        parts.push_back(v);
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3) throw ConfigError("--snr-db expects lo:hi:step or a single value");
    const double lo = parts[0], hi = parts[1], step = parts[2];
    if (!(step > 0.0) || hi < lo) throw ConfigError("--snr-db range is empty or step is not positive");
    std::vector<double> v;
    const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) v.push_back(lo + i * step);
    return v;
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');) {
        char* end = nullptr;
        const double x = std::strtod(tok.c_str(), &end);
        if (tok.empty() || *end != '\0') throw ConfigError("bad number list '" + s + "'");
        v.push_back(x);
    }
    if (v.empty()) throw ConfigError("empty number list");
    return v;
}

double db_to_snr(double db)
{
    return std::pow(10.0, db / 10.0);
}

// Row i computed by some worker; output order is the index order.
std::vector<std::vector<std::string>> parallel_rows(std::size_t n,
                                                   const std::function<std::vector<std::string>(std::size_t)>& row)
{
    std::vector<std::vector<std::string>> rows(n);
    std::vector<std::exception_ptr> errs(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                rows[i] = row(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const int nt = std::max(1, std::min<int>(worker_threads(), static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int i = 1; i < nt; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return rows;
}

class Sink {
public:
    explicit Sink(const Config& c) : format_(c.format)
    {
        if (c.format != "csv" && c.format != "json") throw ConfigError("--format must be csv or json");
        if (c.out != "-") {
            file_.open(c.out);
            if (!file_) throw ConfigError("cannot write " + c.out);
        }
    }

    void table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
    {
        auto& os = stream();
        if (format_ == "csv") {
            for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
            os << "\n";
            for (const auto& r : rows) {
                for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
                os << "\n";
            }
            return;
        }
        json arr = json::array();
        for (const auto& r : rows) {
            json o;
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (r[i].empty()) {
                    o[header[i]] = nullptr;
                    continue;
                }
                char* end = nullptr;
                const double v = std::strtod(r[i].c_str(), &end);
                if (*end == '\0' && std::isfinite(v))
                    o[header[i]] = v;
                else
                    o[header[i]] = r[i];
            }
            arr.push_back(o);
        }
        os << arr.dump(2) << "\n";
    }

    void document(const json& j) { stream() << j.dump(2) << "\n"; }

private:
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    std::string format_;
    std::ofstream file_;
};

void cmd_curve(const Config& c, bool mi)
{
    const auto input = io::constellation_from_arg(c.input);
    const auto model = io::fading_from_arg(c.fading);
    const auto grid = parse_range(c.snr_db);
    const CanonicalCurve curve(input);
    const bool mi_ok = input.is_discrete() || input.kind() == InputKind::Gaussian;
    if (mi && !mi_ok) throw ConfigError("mi: input must be discrete or Gaussian");
    Sink sink(c);
    auto rows = parallel_rows(grid.size(), [&](std::size_t i) -> std::vector<std::string> {
        const double snr = db_to_snr(grid[i]);
        if (mi) {
            return {fmt(grid[i]), fmt(curve.mutual_information(snr)), fmt(avg_mi_quad(model, curve, snr, c.tol).value),
                    "", ""};
        }
        std::string mc, se;
        if (c.mc_samples > 0) {
            const auto r = avg_mmse_mc(model, input, snr, c.mc_samples, c.seed + i, 1);
            mc = fmt(r.value);
            se = fmt(r.est_abs_error);
        }
        return {fmt(grid[i]), fmt(curve.mmse(snr)), fmt(avg_mmse_quad(model, curve, snr, c.tol).value), mc, se};
    });
    sink.table({"snr_db", "canonical", "average_quad", "average_mc", "mc_stderr"}, rows);
}

void cmd_mellin(const Config& c)
{
    const auto input = io::constellation_from_arg(c.input);
    const auto zs = parse_list(c.z);
    const CanonicalCurve curve(input);
    Sink sink(c);
    auto rows = parallel_rows(zs.size(), [&](std::size_t i) -> std::vector<std::string> {
        const auto v = mellin_mmse(curve, zs[i]);
        return {input.label(), fmt(v.z), fmt(v.value), to_string(v.method), fmt(v.est_rel_error)};
    });
    sink.table({"input", "z", "value", "method", "est_rel_error"}, rows);
}

void cmd_table1(const Config& c)
{
    const auto& inputs = table1_inputs();
    const auto zs = table1_z_grid();
    std::vector<std::pair<std::string, double>> cells;
    for (const auto& in : inputs)
        for (double z : zs) cells.emplace_back(in, z);
    Sink sink(c);
    auto rows = parallel_rows(cells.size(), [&](std::size_t i) -> std::vector<std::string> {
        const auto r = table1({cells[i].first}, {cells[i].second}).front();
        return {r.input,
                fmt(r.z),
                fmt(r.value),
                "numeric",
                fmt(r.est_rel_error),
                r.reference ? fmt(*r.reference) : "",
                r.rel_deviation ? fmt(*r.rel_deviation) : ""};
    });
    sink.table({"input", "z", "value", "method", "est_rel_error", "reference", "rel_deviation"}, rows);
}

Expansion build_expansion(const Config& c, const FadingModel& model, const Constellation& input, bool low)
{
    const bool mi = c.quantity == "mi";
    if (c.quantity != "mmse" && c.quantity != "mi") throw ConfigError("--quantity must be mmse or mi");
    if (low) {
        const int M = c.terms > 0 ? c.terms : 3;
        return mi ? low_snr_avg_mi(model, input, M) : low_snr_avg_mmse(model, input, M);
    }
    const int M = c.terms > 0 ? c.terms : 4;
    if (!input.is_discrete()) {
        if (mi) throw ConfigError("high-snr mutual information needs a discrete input");
        return high_snr_avg_mmse_continuous(model, input, M);
    }
    if (!model.closed_form()) {
        const auto e = general_high_snr(model, input, M);
        return mi ? integrate_from_infinity(e, entropy(input)) : e;
    }
    return mi ? high_snr_avg_mi_discrete(model, input, M) : high_snr_avg_mmse_discrete(model, input, M);
}

bool regime_low(const std::string& r)
{
    if (r != "high" && r != "low") throw ConfigError("--regime must be high or low");
    return r == "low";
}

void cmd_expand(const Config& c)
{
    const auto input = io::constellation_from_arg(c.input);
    const auto model = io::fading_from_arg(c.fading);
    const auto e = build_expansion(c, model, input, regime_low(c.regime));
    Sink sink(c);
    if (c.format == "json") {
        sink.document(io::to_json(e));
        return;
    }
    std::vector<std::vector<std::string>> rows;
    if (e.constant != 0.0) rows.push_back({fmt(e.constant), "0", "0"});
    for (const auto& t : e.terms) rows.push_back({fmt(t.coeff), fmt(t.snr_pow), std::to_string(t.log_pow)});
    sink.table({"coeff", "snr_pow", "log_pow"}, rows);
}

void cmd_compare(const Config& c, bool low)
{
    const auto input = io::constellation_from_arg(c.input);
    const auto model = io::fading_from_arg(c.fading);
    const auto grid = parse_range(c.snr_db);
    const auto e = build_expansion(c, model, input, low);
    const bool mi = c.quantity == "mi";
    const CanonicalCurve curve(input);
    const std::size_t M = e.terms.size();
    std::vector<std::string> header{"snr_db", "oracle"};
    for (std::size_t m = 1; m <= M; ++m) header.push_back("expansion_" + std::to_string(m) + "term");
    for (std::size_t m = 1; m <= M; ++m) header.push_back("rel_err_" + std::to_string(m) + "term");
    Sink sink(c);
    auto rows = parallel_rows(grid.size(), [&](std::size_t i) {
        const double snr = db_to_snr(grid[i]);
        const double oracle = mi ? avg_mi_quad(model, curve, snr, c.tol).value : avg_mmse_quad(model, curve, snr, c.tol).value;
        std::vector<std::string> r{fmt(grid[i]), fmt(oracle)}, errs;
        double partial = e.constant;
        for (std::size_t m = 0; m < M; ++m) {
            partial += evaluate_term(e.terms[m], snr);
            r.push_back(fmt(partial));
            errs.push_back(fmt(std::fabs(partial - oracle) / std::fabs(oracle)));
        }
        r.insert(r.end(), errs.begin(), errs.end());
        return r;
    });
    sink.table(header, rows);
}

void cmd_powalloc(const Config& c)
{
    if (c.bank.empty()) throw ConfigError("powalloc: --bank is required");
    const auto bank = io::bank_from_file(c.bank);
    const auto grid = parse_range(c.snr_db);
    const std::size_t k = bank.subchannels.size();
    bool asym_ok = true;
    for (const auto& s : bank.subchannels) {
        const auto kind = s.fading.kind();
        asym_ok = asym_ok && (kind == FadingKind::Rayleigh || kind == FadingKind::Ricean);
    }
    std::vector<std::string> header{"snr_db"};
    for (std::size_t i = 1; i <= k; ++i) header.push_back("p_exact_" + std::to_string(i));
    for (std::size_t i = 1; i <= k; ++i) header.push_back("p_asym_" + std::to_string(i));
    for (const char* h : {"lambda", "kkt_residual", "capacity_exact", "capacity_asym"}) header.push_back(h);
    Sink sink(c);
    auto rows = parallel_rows(grid.size(), [&](std::size_t i) {
        const double snr = db_to_snr(grid[i]);
        const auto ex = exact_allocation(bank, snr);
        std::optional<PowerAllocation> as;
        if (asym_ok) as = asymptotic_allocation(bank, snr);
        std::vector<std::string> r{fmt(grid[i])};
        for (double p : ex.p) r.push_back(fmt(p));
        for (std::size_t j = 0; j < k; ++j) r.push_back(as ? fmt(as->p[j]) : "");
        r.push_back(fmt(ex.lambda));
        r.push_back(fmt(ex.kkt_residual));
        r.push_back(fmt(ex.capacity));
        r.push_back(as ? fmt(as->capacity) : "");
        return r;
    });
    sink.table(header, rows);
}

void cmd_rates(const Config& c)
{
    const auto input = io::constellation_from_arg(c.input);
    const auto model = io::fading_from_arg(c.fading);
    const auto grid = parse_range(c.snr_db);
    if (grid.size() < 2) throw ConfigError("rates: --snr-db needs a range");
    const double lo = grid.front(), hi = grid.back();
    Sink sink(c);
    std::vector<std::string> row{fmt(lo), fmt(hi), fmt(decay_rate(model, input, lo, hi))};
    row.push_back(input.is_discrete() ? fmt(mi_gap_decay_rate(model, input, lo, hi)) : "");
    sink.table({"snr_db_lo", "snr_db_hi", "mmse_rate", "mi_gap_rate"}, {row});
}

void diag(const char* level, const char* kind, std::string_view msg)
{
    json j{{"level", level}, {"message", std::string(msg)}};
    if (kind) j["kind"] = kind;
    std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv)
{
    set_warning_handler([](std::string_view m) { diag("warning", nullptr, m); });
    Config c;
    CLI::App app{"Average MMSE and mutual information of fading channels: canonical curves, Mellin transforms,\n"
                 "low/high-snr expansions, oracles and power allocation. snr in dB means snr = 10^(dB/10).\n"
                 "FADEXP_THREADS caps the number of worker threads."};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* s) {
        s->add_option("--input", c.input, "constellation name (bpsk, 16qam, gaussian, infpsk, ...) or JSON");
        s->add_option("--fading", c.fading, "e.g. rayleigh:sigma=0.7071, ricean:mu_abs=1,sigma=0.5, nakagami:mu=0.5,w=1, vector:k=2,sigma=0.5, or JSON");
        s->add_option("--snr-db", c.snr_db, "lo:hi:step or a single value, dB with snr = 10^(dB/10)");
        s->add_option("--terms", c.terms, "number of expansion terms");
        s->add_option("--seed", c.seed, "Monte Carlo seed");
        s->add_option("--tol", c.tol, "relative tolerance of the quadrature oracle");
        s->add_option("--out", c.out, "output path, - for stdout");
        s->add_option("--format", c.format, "csv or json");
    };
    auto* mmse = app.add_subcommand("mmse", "canonical and average MMSE over an snr grid");
    auto* mi = app.add_subcommand("mi", "canonical and average mutual information over an snr grid");
    auto* mellin = app.add_subcommand("mellin", "Mellin transform M[mmse;1+z] of the canonical MMSE");
    auto* t1 = app.add_subcommand("table1", "Mellin transforms of 4-PAM, 16-QAM, 8-PAM, 64-QAM with reference values");
    auto* expand = app.add_subcommand("expand", "asymptotic expansion terms");
    auto* compare = app.add_subcommand("compare", "expansion against the quadrature oracle");
    auto* lowsnr = app.add_subcommand("lowsnr", "low-snr expansion against the quadrature oracle");
    auto* pa = app.add_subcommand("powalloc", "exact and asymptotic power allocation for a bank");
    auto* rates = app.add_subcommand("rates", "fitted decay rates of the average MMSE and MI gap");
    for (auto* s : {mmse, mi, mellin, t1, expand, compare, lowsnr, pa, rates}) add_common(s);
    mmse->add_option("--mc-samples", c.mc_samples, "Monte Carlo samples per point, 0 disables");
    mellin->add_option("--z", c.z, "comma-separated z values");
    for (auto* s : {expand, compare}) s->add_option("--regime", c.regime, "high or low");
    for (auto* s : {expand, compare, lowsnr}) s->add_option("--quantity", c.quantity, "mmse or mi");
    pa->add_option("--bank", c.bank, "bank JSON file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        diag("error", "config", e.what());
        return 2;
    }

    try {
        if (*mmse) cmd_curve(c, false);
        if (*mi) cmd_curve(c, true);
        if (*mellin) cmd_mellin(c);
        if (*t1) cmd_table1(c);
        if (*expand) cmd_expand(c);
        if (*compare) cmd_compare(c, regime_low(c.regime));
        if (*lowsnr) cmd_compare(c, true);
        if (*pa) cmd_powalloc(c);
        if (*rates) cmd_rates(c);
    } catch (const ConfigError& e) {
        diag("error", "config", e.what());
        return 2;
    } catch (const DomainError& e) {
        diag("error", "config", e.what());
        return 2;
    } catch (const std::exception& e) {
        diag("error", "numeric", e.what());
        return 3;
    }
    return 0;
}
