// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "royalty/pricing.hpp"
#include "royalty/synthgen.hpp"

using namespace royalty;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Brute-force present value of 1 per year over n years: term-by-term
// summation, independent of the closed form under test.
double annuity_by_summation(double rate, int n) {
    double factor = 1.0;
    double total = 0.0;
    for (int i = 1; i <= n; ++i) {
        factor /= 1.0 + rate;
        total += factor;
    }
    return total;
}

const ModelParams kReferenceModel1 = ModelParams::model1(0.14);
const ModelParams kReferenceModel2 = ModelParams::model2(0.076, 0.69, 0.071);
const ModelParams kReferenceModel3 = ModelParams::model3(0.083, 0.61, 0.058, 0.0098);

PricingFeatures features(double ratio, double age, ContractTerm term) {
    return PricingFeatures::make(100'000.0, 100'000.0 / ratio, age, term);
}

}  // namespace

TEST_CASE("discount_rate") {
    CHECK(discount_rate(ModelParams::model2(0.08, 1.0, 0.05), 1.0) == 0.08);
    CHECK_THAT(discount_rate(kReferenceModel2, 1.5), WithinAbs(0.1115, 1e-12));
    CHECK(discount_rate(kReferenceModel1, 0.3) == 0.14);  // model 1 ignores the ratio
    CHECK(discount_rate(kReferenceModel1, 2.5) == 0.14);
    CHECK_THROWS_AS(discount_rate(kReferenceModel2, 0.0), ParseError);
}

TEST_CASE("expected_cashflow") {
    CHECK(expected_cashflow(kReferenceModel1, 100'000.0, 33.0) == 100'000.0);
    CHECK_THAT(expected_cashflow(kReferenceModel3, 100'000.0, 20.0), WithinAbs(80'600.0, 1e-6));
    CHECK_THAT(expected_cashflow(kReferenceModel2, 100'000.0, 20.0), WithinAbs(69'000.0, 1e-9));

    // raw (unvalidated) parameters with a non-positive cashflow are a
    // pricing error, not a crash
    const ModelParams bad{3, 0.08, -0.5, 0.0, 0.01};
    CHECK_THROWS_AS(expected_cashflow(bad, 100'000.0, 5.0), PricingError);
    CHECK(expected_cashflow(bad, 100'000.0, 60.0) > 0.0);  // a + b*age > 0 here
}

TEST_CASE("annuity_factor closed form") {
    CHECK(annuity_factor(0.0, 1.0) == 1.0);
    CHECK(annuity_factor(0.0, 10.0) == 10.0);
    CHECK_THAT(annuity_factor(0.14, 10.0), WithinAbs(5.2161, 5e-5));
    CHECK_THAT(annuity_factor(0.14, 10.0), WithinRel(annuity_by_summation(0.14, 10), 1e-14));

    SECTION("perpetuity") {
        CHECK_THAT(annuity_factor(0.14, kUnboundedHorizon), WithinAbs(7.142857, 1e-6));
        // 2000-term partial sum approaches 1/R from below
        const double partial = annuity_by_summation(0.14, 2000);
        CHECK_THAT(annuity_factor(0.14, kUnboundedHorizon), WithinRel(partial, 1e-10));
        CHECK_THROWS_AS(annuity_factor(0.0, kUnboundedHorizon), PricingError);
        CHECK_THROWS_AS(annuity_factor(-0.02, kUnboundedHorizon), PricingError);
    }
    SECTION("degenerate horizons") {
        CHECK(annuity_factor(0.10, 0.0) == 0.0);
        CHECK_THROWS_AS(annuity_factor(0.10, -1.0), PricingError);
        CHECK_THROWS_AS(annuity_factor(-1.0, 5.0), PricingError);
    }
    SECTION("matches summation over a rate grid") {
        double worst = 0.0;
        for (int ri = 1; ri <= 100; ++ri) {
            const double rate = ri * 0.01;
            for (int n = 1; n <= 30; ++n) {
                const double closed = annuity_factor(rate, static_cast<double>(n));
                const double brute = annuity_by_summation(rate, n);
                worst = std::max(worst, std::abs(closed - brute) / brute);
            }
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("multiplier") {
    SECTION("model 1 ignores features") {
        const double expected = annuity_by_summation(0.14, 10);
        CHECK_THAT(multiplier(kReferenceModel1, features(1.0, 0.0, ContractTerm::ten_year)),
                   WithinRel(expected, 1e-14));
        CHECK_THAT(multiplier(kReferenceModel1, features(2.4, 55.0, ContractTerm::ten_year)),
                   WithinRel(expected, 1e-14));
        CHECK_THAT(multiplier(kReferenceModel1, features(1.0, 0.0, ContractTerm::ten_year)),
                   WithinAbs(5.2161, 5e-5));
    }
    SECTION("model 3 life-of-rights at ratio 1, age 20") {
        CHECK_THAT(multiplier(kReferenceModel3, features(1.0, 20.0, ContractTerm::life_of_rights)),
                   WithinAbs(9.711, 1e-3));
    }
    SECTION("model 2 life-of-rights at ratio 1.5") {
        CHECK_THAT(multiplier(kReferenceModel2, features(1.5, 0.0, ContractTerm::life_of_rights)),
                   WithinAbs(6.188, 1e-3));
    }
    SECTION("divergent perpetuity propagates") {
        const ModelParams zero_rate{1, 0.0, 1.0, 0.0, 0.0};
        CHECK_THROWS_AS(multiplier(zero_rate, features(1.0, 0.0, ContractTerm::life_of_rights)),
                        PricingError);
        CHECK(multiplier(zero_rate, features(1.0, 0.0, ContractTerm::ten_year)) == 10.0);
    }
}

TEST_CASE("price populates a consistent valuation") {
    const auto f = features(1.0, 20.0, ContractTerm::life_of_rights);
    const Valuation v = price(kReferenceModel3, f);
    CHECK_THAT(v.price, WithinAbs(971'084.0, 50.0));
    CHECK(v.price == v.multiplier * f.ltm);  // exact by construction
    CHECK(v.discount_rate == 0.083);
    CHECK_THAT(v.expected_cashflow, WithinAbs(80'600.0, 1e-6));
    CHECK(std::isinf(v.horizon));

    SECTION("simple multiplier-price identity") {
        const auto f10 = PricingFeatures::make(100'000.0, 100'000.0, 0.0,
                                               ContractTerm::ten_year);
        const Valuation v10 = price(ModelParams::model1(0.14), f10);
        CHECK(v10.price == v10.multiplier * 100'000.0);
    }
    SECTION("non-positive ltm is a precondition violation") {
        CHECK_THROWS_AS(PricingFeatures::make(0.0, 1.0, 0.0, ContractTerm::ten_year),
                        ParseError);
    }
}

TEST_CASE("model nesting is exact") {
    SeededRng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = rng.uniform(0.01, 0.5);
        const double a = rng.uniform(0.1, 1.9);
        const double k = rng.uniform(0.0, 0.9);
        const double ratio = rng.uniform(0.2, 2.8);
        const double age = rng.uniform(0.0, 50.0);
        const ContractTerm term = trial % 3 == 0   ? ContractTerm::ten_year
                                  : trial % 3 == 1 ? ContractTerm::thirty_year
                                                   : ContractTerm::life_of_rights;
        const auto f = features(ratio, age, term);

        // model 2 with (a=1, k=0) is model 1; model 3 with b=0 is model 2
        CHECK(multiplier(ModelParams::model2(r, 1.0, 0.0), f) ==
              multiplier(ModelParams::model1(r), f));
        CHECK(multiplier(ModelParams::model3(r, a, k, 0.0), f) ==
              multiplier(ModelParams::model2(r, a, k), f));
    }
}

TEST_CASE("multiplier monotonicity") {
    SECTION("decreasing in r") {
        for (const auto term : {ContractTerm::ten_year, ContractTerm::life_of_rights}) {
            double prev = std::numeric_limits<double>::infinity();
            for (double r = 0.02; r < 0.5; r += 0.01) {
                const double m = multiplier(ModelParams::model1(r), features(1.0, 0.0, term));
                CHECK(m < prev);
                prev = m;
            }
        }
    }
    SECTION("decreasing in |ratio - 1| when k > 0") {
        const auto params = kReferenceModel2;
        const auto at_ratio = [&](double ratio) {
            return multiplier(params, features(ratio, 0.0, ContractTerm::life_of_rights));
        };
        double prev_above = at_ratio(1.0);
        double prev_below = at_ratio(1.0);
        for (double delta = 0.1; delta < 0.95; delta += 0.1) {
            CHECK(at_ratio(1.0 + delta) < prev_above);
            CHECK(at_ratio(1.0 - delta) < prev_below);
            prev_above = at_ratio(1.0 + delta);
            prev_below = at_ratio(1.0 - delta);
        }
    }
    SECTION("increasing in age when b > 0") {
        double prev = 0.0;
        for (double age = 0.0; age <= 60.0; age += 5.0) {
            const double m =
                multiplier(kReferenceModel3, features(1.0, age, ContractTerm::life_of_rights));
            CHECK(m > prev);
            prev = m;
        }
    }
    SECTION("increasing in horizon") {
        const auto f = features(1.0, 10.0, ContractTerm::ten_year);
        double prev = 0.0;
        for (double h = 1.0; h <= 40.0; h += 1.0) {
            const double m = multiplier(kReferenceModel3, f, h);
            CHECK(m > prev);
            prev = m;
        }
        CHECK(multiplier(kReferenceModel3, f, kUnboundedHorizon) > prev);
    }
}

TEST_CASE("curve sweeps") {
    SECTION("model 2 ratio sweep peaks at ratio 1") {
        SweepSpec spec;
        spec.axis = SweepAxis::ratio;
        spec.lo = 0.5;
        spec.hi = 1.5;
        spec.step = 0.01;
        const auto pts = curve(kReferenceModel2, ContractTerm::life_of_rights, spec);
        REQUIRE(pts.size() == 101);
        const auto peak = std::max_element(
            pts.begin(), pts.end(),
            [](const auto& lhs, const auto& rhs) { return lhs.second < rhs.second; });
        CHECK_THAT(peak->first, WithinAbs(1.0, 0.005));
    }
    SECTION("model 3 age sweep is strictly increasing") {
        SweepSpec spec;
        spec.axis = SweepAxis::age;
        spec.lo = 0.0;
        spec.hi = 40.0;
        spec.step = 1.0;
        spec.fixed_ratio = 1.0;
        const auto pts = curve(kReferenceModel3, ContractTerm::life_of_rights, spec);
        REQUIRE(pts.size() == 41);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].second > pts[i - 1].second);
        }
    }
    SECTION("model 1 sweep is constant") {
        SweepSpec spec;
        spec.axis = SweepAxis::ratio;
        spec.lo = 0.5;
        spec.hi = 2.0;
        spec.step = 0.25;
        const auto pts = curve(kReferenceModel1, ContractTerm::ten_year, spec);
        for (const auto& [x, m] : pts) CHECK(m == pts.front().second);
    }
    SECTION("inverted or non-positive ranges rejected") {
        SweepSpec spec;
        spec.lo = 1.5;
        spec.hi = 0.5;
        CHECK_THROWS_AS(curve(kReferenceModel1, ContractTerm::ten_year, spec), ParseError);
        spec.lo = 0.0;
        spec.hi = 1.0;
        CHECK_THROWS_AS(curve(kReferenceModel1, ContractTerm::ten_year, spec), ParseError);
    }
}

TEST_CASE("params JSON round-trip") {
    const auto j = kReferenceModel3.to_json();
    CHECK(j["model"] == 3);
    const ModelParams back = ModelParams::from_json(j);
    CHECK(back.model == 3);
    CHECK(back.r == kReferenceModel3.r);
    CHECK(back.a == kReferenceModel3.a);
    CHECK(back.k == kReferenceModel3.k);
    CHECK(back.b == kReferenceModel3.b);

    SECTION("model 1 serializes only r; absent fields take fixed values") {
        const auto j1 = kReferenceModel1.to_json();
        CHECK(!j1.contains("a"));
        const ModelParams p1 = ModelParams::from_json(j1);
        CHECK(p1.a == 1.0);
        CHECK(p1.k == 0.0);
        CHECK(p1.b == 0.0);
    }
    SECTION("structural errors rejected") {
        CHECK_THROWS_AS(ModelParams::from_json(nlohmann::json::parse(R"({"r":0.1})")),
                        ParseError);
        CHECK_THROWS_AS(
            ModelParams::from_json(nlohmann::json::parse(R"({"model":5,"r":0.1})")),
            ParseError);
        CHECK_THROWS_AS(
            ModelParams::from_json(nlohmann::json::parse(R"({"model":1,"r":0.1,"x":2})")),
            ParseError);
        CHECK_THROWS_AS(
            ModelParams::from_json(nlohmann::json::parse(R"({"model":2,"r":0.1,"k":-1})")),
            ParseError);
    }
    SECTION("validate enforces the full invariants") {
        CHECK_THROWS_AS(ModelParams::model1(0.0).validate(), ParseError);
        CHECK_THROWS_AS(ModelParams::model2(0.1, -0.5, 0.0).validate(), ParseError);
        CHECK_NOTHROW(kReferenceModel3.validate());
    }
}
