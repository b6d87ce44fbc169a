#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ekb/random.hpp"

namespace ekb::attack {

// Reordering attack against spoken fingerprints: the attacker recombines
// recorded words of the victim into a fingerprint the victim never spoke.
struct ReorderParams {
    std::uint64_t dict_size = 256;    // words in each parity list
    std::uint64_t words_per_fp = 16;  // words per parity in one fingerprint
    std::uint64_t num_keys = 16;      // fingerprints the attacker has heard

    // dict_size >= words_per_fp >= 1, num_keys >= 1. Throws InvalidParams.
    void validate() const;
    // Additionally num_keys * words_per_fp <= dict_size.
    void validate_collect_all() const;

    static ReorderParams published_collect_all() { return {256, 16, 16}; }
    static ReorderParams published_reorder() { return {256, 16, 1}; }

    friend bool operator==(const ReorderParams&, const ReorderParams&) = default;
};

// prod_{i<num_keys} ((dict - i*words) / dict)^(2*words), evaluated in log
// space. Natural-log variant never underflows.
long double log_p1_product(const ReorderParams& params);
double p1_product(const ReorderParams& params);

// (n-1)! / n^n with n = dict / words. Throws ParamsNotDivisible.
long double log_p1_closed_form(const ReorderParams& params);
double p1_closed_form(const ReorderParams& params);

// Probability that num_keys fingerprints of ordered uniform draws repeat no
// word, per parity, squared for the two parities. Exact rational arithmetic;
// throws TooLargeForExact above dict_size 12.
double p1_exact_event(const ReorderParams& params);
inline constexpr std::uint64_t kMaxExactDict = 12;

// (words / dict)^(2*words); requires num_keys == 1.
long double log_p2_reorder_success(const ReorderParams& params);
double p2_reorder_success(const ReorderParams& params);

// 1 / 16^16, the published value.
double p2_paper_value();

enum class Event { CollectAll, ReorderMatch };

struct Estimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
};

inline constexpr std::uint64_t kMinTrials = 1000;

// Direct simulation. CollectAll: every word drawn across all fingerprints is
// distinct within each parity. ReorderMatch (num_keys == 1): the victim's
// fingerprint holds words_per_fp distinct words per parity, and a random
// attacker fingerprint uses only those words. Throws InvalidArgument when
// trials < 1000.
Estimate monte_carlo(const ReorderParams& params, Event event, std::uint64_t trials, RandomSource& rng);

struct ReportLine {
    std::string quantity;
    long double log10_value;
    std::optional<std::string> reference_name;
    std::optional<long double> log10_reference;
    std::optional<double> std_error;  // Monte Carlo lines
    std::string note;

    double value() const;
    // |value - reference| / reference; computed from logs so tiny values work.
    std::optional<double> relative_difference() const;
};

struct DiscrepancyReport {
    ReorderParams params;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<ReportLine> lines;
    // Monte Carlo vs exact oracle within 3 standard errors, when both exist.
    std::optional<bool> collect_all_agrees;
    std::optional<bool> reorder_agrees;
};

// trials == 0 skips the Monte Carlo lines.
DiscrepancyReport discrepancy_report(const ReorderParams& params, std::uint64_t trials, std::uint64_t seed);

std::string format_report(const DiscrepancyReport& report);
std::string to_json(const DiscrepancyReport& report);

// "7.09E-08" style rendering of 10^log10_value.
std::string format_scientific(long double log10_value, int digits = 3);

} // namespace ekb::attack
