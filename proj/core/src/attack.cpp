#include "ekb/attack.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "ekb/error.hpp"
#include "json.hpp"

namespace ekb::attack {

namespace {

constexpr long double kLn10 = 2.302585092994045684017991454684364208L;

long double ln_to_log10(long double ln_value) { return ln_value / kLn10; }

bool agrees(const Estimate& mc, double exact)
{
    return std::fabs(mc.estimate - exact) <= 3.0 * mc.std_error;
}

} // namespace

void ReorderParams::validate() const
{
    if (words_per_fp < 1 || dict_size < words_per_fp || num_keys < 1) {
        throw Error(Errc::InvalidParams, "need dict_size >= words_per_fp >= 1 and num_keys >= 1");
    }
}

void ReorderParams::validate_collect_all() const
{
    validate();
    if (num_keys > dict_size / words_per_fp) {
        throw Error(Errc::InvalidParams, "num_keys * words_per_fp must not exceed dict_size");
    }
}

long double log_p1_product(const ReorderParams& params)
{
    params.validate_collect_all();
    const long double d = static_cast<long double>(params.dict_size);
    const long double exponent = 2.0L * static_cast<long double>(params.words_per_fp);
    long double acc = 0.0L;
    for (std::uint64_t i = 0; i < params.num_keys; ++i) {
        const long double remaining = d - static_cast<long double>(i * params.words_per_fp);
        acc += exponent * (std::log(remaining) - std::log(d));
    }
    return acc;
}

double p1_product(const ReorderParams& params)
{
    return static_cast<double>(std::exp(log_p1_product(params)));
}

long double log_p1_closed_form(const ReorderParams& params)
{
    params.validate();
    if (params.dict_size % params.words_per_fp != 0) {
        throw Error(Errc::ParamsNotDivisible, "dict_size must be divisible by words_per_fp");
    }
    const long double n = static_cast<long double>(params.dict_size / params.words_per_fp);
    return std::lgamma(n) - n * std::log(n);
}

double p1_closed_form(const ReorderParams& params)
{
    return static_cast<double>(std::exp(log_p1_closed_form(params)));
}

double p1_exact_event(const ReorderParams& params)
{
    params.validate_collect_all();
    if (params.dict_size > kMaxExactDict) {
        throw Error(Errc::TooLargeForExact, "exact evaluation supports dict_size <= 12");
    }
    const std::uint64_t draws = params.num_keys * params.words_per_fp;
    // 12^12 < 2^64, so 64-bit integers hold the falling factorial exactly.
    std::uint64_t num = 1;
    std::uint64_t den = 1;
    for (std::uint64_t j = 0; j < draws; ++j) {
        num *= params.dict_size - j;
        den *= params.dict_size;
    }
    const std::uint64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
    // Two independent parities.
    const long double per_parity = static_cast<long double>(num) / static_cast<long double>(den);
    return static_cast<double>(per_parity * per_parity);
}

long double log_p2_reorder_success(const ReorderParams& params)
{
    params.validate();
    if (params.num_keys != 1) {
        throw Error(Errc::InvalidParams, "the reorder-match probability is defined for num_keys = 1");
    }
    const long double w = static_cast<long double>(params.words_per_fp);
    const long double d = static_cast<long double>(params.dict_size);
    return 2.0L * w * (std::log(w) - std::log(d));
}

double p2_reorder_success(const ReorderParams& params)
{
    return static_cast<double>(std::exp(log_p2_reorder_success(params)));
}

double p2_paper_value()
{
    return std::ldexp(1.0, -64);
}

Estimate monte_carlo(const ReorderParams& params, Event event, std::uint64_t trials, RandomSource& rng)
{
    if (trials < kMinTrials) {
        throw Error(Errc::InvalidArgument, "monte_carlo needs at least 1000 trials");
    }
    if (event == Event::CollectAll) {
        params.validate_collect_all();
    } else {
        log_p2_reorder_success(params);  // validates num_keys == 1
    }

    const std::uint64_t d = params.dict_size;
    const std::uint64_t w = params.words_per_fp;
    // stamp[word] == tag marks "seen in the current draw set"; avoids clearing.
    std::vector<std::uint64_t> stamp(d, 0);
    std::vector<std::uint64_t> pool(d);
    std::uint64_t tag = 0;
    std::uint64_t hits = 0;

    for (std::uint64_t t = 0; t < trials; ++t) {
        bool success = true;
        for (int parity = 0; parity < 2 && success; ++parity) {
            ++tag;
            if (event == Event::CollectAll) {
                const std::uint64_t draws = params.num_keys * w;
                for (std::uint64_t j = 0; j < draws; ++j) {
                    const auto word = rng.uniform(d);
                    if (stamp[word] == tag) {
                        success = false;
                        break;
                    }
                    stamp[word] = tag;
                }
            } else {
                // Victim's w distinct words: partial Fisher-Yates.
                std::iota(pool.begin(), pool.end(), std::uint64_t{0});
                for (std::uint64_t j = 0; j < w; ++j) {
                    std::swap(pool[j], pool[j + rng.uniform(d - j)]);
                    stamp[pool[j]] = tag;
                }
                for (std::uint64_t j = 0; j < w; ++j) {
                    if (stamp[rng.uniform(d)] != tag) {
                        success = false;
                        break;
                    }
                }
            }
        }
        hits += success ? 1 : 0;
    }

    Estimate est;
    est.trials = trials;
    est.hits = hits;
    est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
    return est;
}

double ReportLine::value() const
{
    return static_cast<double>(std::pow(10.0L, log10_value));
}

std::optional<double> ReportLine::relative_difference() const
{
    if (!log10_reference || !std::isfinite(*log10_reference)) {
        return std::nullopt;
    }
    if (!std::isfinite(log10_value)) {
        return 1.0;
    }
    // |10^(a-b) - 1|
    return static_cast<double>(std::fabs(std::expm1((log10_value - *log10_reference) * kLn10)));
}

DiscrepancyReport discrepancy_report(const ReorderParams& params, std::uint64_t trials, std::uint64_t seed)
{
    params.validate();
    DiscrepancyReport report;
    report.params = params;
    report.trials = trials;
    report.seed = seed;

    const bool published = params == ReorderParams::published_collect_all()
                           || params == ReorderParams::published_reorder();
    const bool collect_all_ok = params.num_keys <= params.dict_size / params.words_per_fp;
    const bool divisible = params.dict_size % params.words_per_fp == 0;
    const bool exact_ok = collect_all_ok && params.dict_size <= kMaxExactDict;
    const ReorderParams single{params.dict_size, params.words_per_fp, 1};

    std::optional<long double> closed;
    if (divisible) {
        closed = ln_to_log10(log_p1_closed_form(params));
    }
    std::optional<long double> exact;
    if (exact_ok) {
        exact = std::log10(static_cast<long double>(p1_exact_event(params)));
    }

    if (collect_all_ok) {
        report.lines.push_back({"P1 literal product", ln_to_log10(log_p1_product(params)),
                                closed ? std::optional<std::string>("P1 closed form") : std::nullopt, closed,
                                std::nullopt, "prod_i ((d - i*w)/d)^(2w)"});
    }
    if (closed) {
        const auto n = params.dict_size / params.words_per_fp;
        std::string note = "(n-1)!/n^n with n = " + std::to_string(n);
        if (published) {
            note += "; published value 7.09E-8";
        }
        report.lines.push_back({"P1 closed form", *closed, std::nullopt, std::nullopt, std::nullopt, note});
    }
    if (exact) {
        report.lines.push_back({"P1 exact event", *exact, std::nullopt, std::nullopt, std::nullopt,
                                "falling factorial over ordered uniform draws, squared for two parities"});
    }

    SeededRng rng(seed);
    if (trials > 0 && collect_all_ok) {
        const auto mc = monte_carlo(params, Event::CollectAll, trials, rng);
        const auto reference = exact ? exact : std::optional<long double>(ln_to_log10(log_p1_product(params)));
        report.lines.push_back({"P1 Monte Carlo", std::log10(static_cast<long double>(mc.estimate)),
                                std::string(exact ? "P1 exact event" : "P1 literal product"), reference,
                                mc.std_error, std::to_string(mc.hits) + " hits / " + std::to_string(trials)});
        if (exact) {
            report.collect_all_agrees = agrees(mc, p1_exact_event(params));
        }
    }

    // The published P2 only refers to the 256-word, 16-per-parity setting.
    const long double p2_power = ln_to_log10(log_p2_reorder_success(single));
    if (single == ReorderParams::published_reorder()) {
        const long double p2_published = std::log10(static_cast<long double>(p2_paper_value()));
        report.lines.push_back({"P2 literal power", p2_power, std::string("P2 published"), p2_published, std::nullopt,
                                "(w/d)^(2w) for a single observed fingerprint"});
        report.lines.push_back({"P2 published", p2_published, std::nullopt, std::nullopt, std::nullopt,
                                "1/16^16, published as 5.42E-20"});
    } else {
        report.lines.push_back({"P2 literal power", p2_power, std::nullopt, std::nullopt, std::nullopt,
                                "(w/d)^(2w) for a single observed fingerprint"});
    }
    if (trials > 0) {
        const auto mc = monte_carlo(single, Event::ReorderMatch, trials, rng);
        report.lines.push_back({"P2 Monte Carlo", std::log10(static_cast<long double>(mc.estimate)),
                                std::string("P2 literal power"), p2_power, mc.std_error,
                                std::to_string(mc.hits) + " hits / " + std::to_string(trials)});
        report.reorder_agrees = agrees(mc, p2_reorder_success(single));
    }
    return report;
}

std::string format_scientific(long double log10_value, int digits)
{
    if (!std::isfinite(log10_value)) {
        return log10_value < 0 ? "0" : "inf";
    }
    long double exponent = std::floor(log10_value);
    long double mantissa = std::pow(10.0L, log10_value - exponent);
    // Rounding can carry the mantissa to 10.
    const long double scale = std::pow(10.0L, digits - 1);
    mantissa = std::round(mantissa * scale) / scale;
    if (mantissa >= 10.0L) {
        mantissa /= 10.0L;
        exponent += 1.0L;
    }
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits - 1) << static_cast<double>(mantissa) << 'E'
        << (exponent < 0 ? '-' : '+') << std::setw(2) << std::setfill('0')
        << static_cast<long long>(std::fabs(exponent));
    return out.str();
}

std::string format_report(const DiscrepancyReport& report)
{
    std::ostringstream out;
    out << "Reordering attack analysis: dict=" << report.params.dict_size << " words=" << report.params.words_per_fp
        << " keys=" << report.params.num_keys << " trials=" << report.trials << " seed=" << report.seed << "\n";
    out << std::left << std::setw(20) << "quantity" << std::setw(12) << "value" << std::setw(12) << "std.err"
        << std::setw(20) << "compared with" << std::setw(14) << "rel. diff" << "note\n";
    for (const auto& line : report.lines) {
        std::string rel = "-";
        if (auto r = line.relative_difference()) {
            std::ostringstream s;
            s << std::scientific << std::setprecision(3) << *r;
            rel = s.str();
        }
        std::string se = "-";
        if (line.std_error) {
            std::ostringstream s;
            s << std::scientific << std::setprecision(2) << *line.std_error;
            se = s.str();
        }
        out << std::left << std::setw(20) << line.quantity << std::setw(12) << format_scientific(line.log10_value)
            << std::setw(12) << se << std::setw(20) << line.reference_name.value_or("-") << std::setw(14) << rel
            << line.note << "\n";
    }
    auto verdict = [](const std::optional<bool>& v) { return !v ? "n/a" : (*v ? "agree" : "DISAGREE"); };
    out << "Monte Carlo vs exact (3 sigma): collect-all " << verdict(report.collect_all_agrees) << ", reorder "
        << verdict(report.reorder_agrees) << "\n";
    return out.str();
}

std::string to_json(const DiscrepancyReport& report)
{
    nlohmann::ordered_json doc;
    doc["params"] = {{"dict_size", report.params.dict_size},
                     {"words_per_fp", report.params.words_per_fp},
                     {"num_keys", report.params.num_keys}};
    doc["trials"] = report.trials;
    doc["seed"] = report.seed;
    doc["lines"] = nlohmann::ordered_json::array();
    for (const auto& line : report.lines) {
        nlohmann::ordered_json j;
        j["quantity"] = line.quantity;
        j["value"] = line.value();
        j["log10_value"] = static_cast<double>(line.log10_value);
        j["reference"] = line.reference_name ? nlohmann::ordered_json(*line.reference_name) : nullptr;
        const auto rel = line.relative_difference();
        j["relative_difference"] = rel ? nlohmann::ordered_json(*rel) : nullptr;
        j["std_error"] = line.std_error ? nlohmann::ordered_json(*line.std_error) : nullptr;
        j["note"] = line.note;
        doc["lines"].push_back(std::move(j));
    }
    auto opt = [](const std::optional<bool>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
    doc["collect_all_agrees"] = opt(report.collect_all_agrees);
    doc["reorder_agrees"] = opt(report.reorder_agrees);
    return doc.dump(2) + "\n";
}

} // namespace ekb::attack
