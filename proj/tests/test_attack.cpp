#include "doctest.h"

#include <cmath>

#include "ekb/attack.hpp"
#include "ekb/error.hpp"
#include "json.hpp"
#include "oracle/enumeration.hpp"

using namespace ekb;
using namespace ekb::attack;

namespace {

Errc error_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ekb::Error");
    return Errc::Io;
}

} // namespace

TEST_CASE("p1_product")
{
    CHECK(p1_product({256, 16, 1}) == 1.0);
    CHECK(p1_product({4, 1, 2}) == doctest::Approx(0.5625));
    // (16!/16^16)^32, by independent log-gamma evaluation.
    const long double expected = 32.0L * (std::lgamma(17.0L) - 16.0L * std::log(16.0L));
    CHECK(static_cast<double>(log_p1_product(ReorderParams::published_collect_all()))
          == doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
    const double published = p1_product(ReorderParams::published_collect_all());
    CHECK(std::isfinite(published));
    CHECK(published > 0.0);
    CHECK(published == p1_product(ReorderParams::published_collect_all()));
    CHECK(error_of([] { p1_product({4, 2, 3}); }) == Errc::InvalidParams);
}

TEST_CASE("p1_product monotonicity over a small grid")
{
    for (std::uint64_t d = 2; d <= 12; ++d) {
        for (std::uint64_t w = 1; w <= d; ++w) {
            for (std::uint64_t k = 1; k * w <= d; ++k) {
                const double p = p1_product({d, w, k});
                REQUIRE(p >= 0.0);
                REQUIRE(p <= 1.0);
                if ((k + 1) * w <= d) {
                    REQUIRE(p1_product({d, w, k + 1}) <= p);
                }
                if (k * (w + 1) <= d) {
                    REQUIRE(p1_product({d, w + 1, k}) <= p);
                }
                REQUIRE(p1_product({d + 1, w, k}) >= p);
            }
        }
    }
}

TEST_CASE("p1_closed_form")
{
    // 15!/16^16 = 1307674368000 / 2^64
    const double exact = 1307674368000.0 / std::ldexp(1.0, 64);
    CHECK(std::fabs(p1_closed_form(ReorderParams::published_collect_all()) - exact) / exact < 1e-12);
    CHECK(p1_closed_form({32, 16, 2}) == doctest::Approx(0.25));
    CHECK(p1_closed_form({16, 16, 1}) == doctest::Approx(1.0));
    CHECK(error_of([] { p1_closed_form({10, 3, 1}); }) == Errc::ParamsNotDivisible);
}

TEST_CASE("p1_exact_event against brute-force enumeration")
{
    CHECK(p1_exact_event({2, 1, 2}) == 0.25);
    CHECK(p1_exact_event({4, 2, 2}) == 0.0087890625);
    CHECK(p1_exact_event({3, 1, 3}) == doctest::Approx(4.0 / 81.0).epsilon(1e-15));
    for (std::uint64_t d = 1; d <= 6; ++d) {
        for (std::uint64_t w = 1; w <= d; ++w) {
            for (std::uint64_t k = 1; k * w <= d; ++k) {
                REQUIRE(p1_exact_event({d, w, k})
                        == doctest::Approx(oracle::collect_all_by_enumeration(d, w, k)).epsilon(1e-14));
            }
        }
    }
    CHECK(error_of([] { p1_exact_event({16, 1, 1}); }) == Errc::TooLargeForExact);
}

TEST_CASE("p2 values")
{
    CHECK(p2_reorder_success({2, 1, 1}) == 0.25);
    CHECK(p2_reorder_success({7, 7, 1}) == 1.0);
    // (16/256)^32 = 2^-128
    CHECK(p2_reorder_success(ReorderParams::published_reorder())
          == doctest::Approx(std::ldexp(1.0, -128)).epsilon(1e-12));
    for (std::uint64_t d = 1; d <= 5; ++d) {
        for (std::uint64_t w = 1; w <= d; ++w) {
            REQUIRE(p2_reorder_success({d, w, 1})
                    == doctest::Approx(oracle::reorder_by_enumeration(d, w)).epsilon(1e-12));
        }
    }
    CHECK(error_of([] { p2_reorder_success({256, 16, 2}); }) == Errc::InvalidParams);

    const double published = p2_paper_value();
    CHECK(std::ldexp(published, 64) == 1.0);  // 16^16 * value == 1 exactly
    CHECK(published < p1_closed_form(ReorderParams::published_collect_all()));
}

TEST_CASE("monte carlo agrees with exact values")
{
    SeededRng rng(100);
    const auto ca = monte_carlo({4, 2, 2}, Event::CollectAll, 1000000, rng);
    CHECK(std::fabs(ca.estimate - 0.0087890625) <= 3 * ca.std_error);
    const auto rm = monte_carlo({2, 1, 1}, Event::ReorderMatch, 100000, rng);
    CHECK(std::fabs(rm.estimate - 0.25) <= 3 * rm.std_error);
    const auto rm2 = monte_carlo({5, 2, 1}, Event::ReorderMatch, 200000, rng);
    CHECK(std::fabs(rm2.estimate - p2_reorder_success({5, 2, 1})) <= 3 * rm2.std_error);
    CHECK(error_of([&] { monte_carlo({4, 2, 2}, Event::CollectAll, 0, rng); }) == Errc::InvalidArgument);

    SeededRng a(7);
    SeededRng b(7);
    CHECK(monte_carlo({6, 2, 2}, Event::CollectAll, 5000, a).hits
          == monte_carlo({6, 2, 2}, Event::CollectAll, 5000, b).hits);
}

TEST_CASE("discrepancy report")
{
    const auto small = discrepancy_report({4, 2, 2}, 200000, 1);
    REQUIRE(small.collect_all_agrees.has_value());
    CHECK(*small.collect_all_agrees);
    CHECK(small.reorder_agrees.value_or(false));

    const auto published = discrepancy_report(ReorderParams::published_collect_all(), 0, 1);
    const auto text = format_report(published);
    CHECK(text.find("7.09E-08") != std::string::npos);
    CHECK(text.find("5.42E-20") != std::string::npos);
    CHECK(text.find("P1 literal product") != std::string::npos);
    CHECK(text.find("2.94E-39") != std::string::npos);

    const auto again = discrepancy_report({4, 2, 2}, 200000, 1);
    CHECK(to_json(again) == to_json(small));
    const auto doc = nlohmann::json::parse(to_json(published));
    CHECK(doc["lines"].size() >= 4);
}

TEST_CASE("scientific formatting")
{
    CHECK(format_scientific(std::log10(7.0889e-8L)) == "7.09E-08");
    CHECK(format_scientific(std::log10(9.996L)) == "1.00E+01");
    CHECK(format_scientific(-std::numeric_limits<long double>::infinity()) == "0");
}
