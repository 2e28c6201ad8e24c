// SPDX-License-Identifier: Apache-2.0
//
// Synthetic deal sets and revenue series generated from a known parameter
// vector. Because the generating theta is ground truth by construction,
// these sets serve as the recovery oracle for calibration and as demo data
// for the CLI.
//
// Randomness comes from std::mt19937_64 (whose output sequence is fixed by
// the standard) combined with explicit transforms: 53-bit uniforms via
// (x >> 11) * 2^-53 and gaussians via Box-Muller. No library distribution
// objects are used, so a seed produces the same stream on every platform.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "royalty/calendar.hpp"
#include "royalty/data_model.hpp"
#include "royalty/errors.hpp"
#include "royalty/pricing.hpp"

namespace royalty {

/// Deterministic random source with a documented algorithm identity.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double gaussian() {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Mean-one lognormal factor exp(sigma*z - sigma^2/2).
    double lognormal(double sigma) {
        return std::exp(sigma * gaussian() - 0.5 * sigma * sigma);
    }

private:
    std::mt19937_64 gen_;
};

struct FeatureRanges {
    std::pair<double, double> ltm{20'000.0, 500'000.0};
    std::pair<double, double> ratio{0.5, 2.0};
    std::pair<double, double> age{0.0, 40.0};
};

/// Sampling weights over {10Y, 30Y, LOR}; they need not be normalized.
struct TermMix {
    double ten_year = 1.0;
    double thirty_year = 1.0;
    double life_of_rights = 1.0;
};

struct SynthConfig {
    ModelParams theta;          // ground-truth parameters
    int deal_count = 1000;
    double noise_sigma = 0.0;   // additive noise on the traded multiplier
    FeatureRanges features;
    TermMix term_mix;
    std::uint64_t seed = 1;
    // Forward revenue path per asset (for backtests): annual growth drawn
    // uniformly from this range, applied over forward_quarters quarters.
    std::pair<double, double> growth_range{-0.15, 0.15};
    int forward_quarters = 32;

    void validate() const {
        theta.validate();
        if (deal_count < 1) throw ParseError("deal_count must be >= 1");
        if (!(noise_sigma >= 0.0)) throw ParseError("noise_sigma must be >= 0");
        auto range_ok = [](const std::pair<double, double>& r) {
            return std::isfinite(r.first) && std::isfinite(r.second) && r.first <= r.second;
        };
        if (!range_ok(features.ltm) || !(features.ltm.first > 0.0)) {
            throw ParseError("degenerate ltm range");
        }
        // ratio <= 3 keeps the implied 12-quarter backfill non-negative
        if (!range_ok(features.ratio) || !(features.ratio.first > 0.0) ||
            features.ratio.second > 3.0) {
            throw ParseError("degenerate ratio range (need 0 < lo <= hi <= 3)");
        }
        if (!range_ok(features.age) || !(features.age.first >= 0.0)) {
            throw ParseError("degenerate age range");
        }
        const double total =
            term_mix.ten_year + term_mix.thirty_year + term_mix.life_of_rights;
        if (term_mix.ten_year < 0.0 || term_mix.thirty_year < 0.0 ||
            term_mix.life_of_rights < 0.0 || !(total > 0.0)) {
            throw ParseError("term mix weights must be non-negative and not all zero");
        }
        if (!range_ok(growth_range) || !(growth_range.first > -1.0)) {
            throw ParseError("degenerate growth range");
        }
        if (forward_quarters < 0) throw ParseError("forward_quarters must be >= 0");
    }
};

namespace detail {

inline ContractTerm pick_term(const TermMix& mix, double u) {
    const double total = mix.ten_year + mix.thirty_year + mix.life_of_rights;
    const double x = u * total;
    if (x < mix.ten_year) return ContractTerm::ten_year;
    if (x < mix.ten_year + mix.thirty_year) return ContractTerm::thirty_year;
    return ContractTerm::life_of_rights;
}

inline std::string synth_asset_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "SYN-%06d", i + 1);
    return buf;
}

// Trade quarters cycle over 2017-Q1 .. 2018-Q4 so most assets support
// several backtest entry years.
inline Quarter synth_trade_quarter(int i) { return Quarter{2017, 1} + (i % 8); }

inline Date quarter_first_day(Quarter q) { return Date{q.year, (q.q - 1) * 3 + 1, 1}; }

struct DealDraw {
    DealRecord deal;
    double growth = 0.0;
};

/// One deal in multiplier space. The traded multiplier is the model
/// multiplier at the drawn features plus Gaussian noise, redrawn while
/// non-positive; the price is multiplier * ltm.
inline DealDraw draw_deal(const SynthConfig& config, SeededRng& rng, int i) {
    const double ltm = rng.uniform(config.features.ltm.first, config.features.ltm.second);
    const double ratio = rng.uniform(config.features.ratio.first, config.features.ratio.second);
    const double age = rng.uniform(config.features.age.first, config.features.age.second);
    const ContractTerm term = pick_term(config.term_mix, rng.uniform01());
    const double growth = rng.uniform(config.growth_range.first, config.growth_range.second);

    const double lty = ltm / ratio;
    const auto features = PricingFeatures::make(ltm, lty, age, term);
    const double model_multiplier = multiplier(config.theta, features);

    double traded = model_multiplier;
    if (config.noise_sigma > 0.0) {
        do {
            traded = model_multiplier + config.noise_sigma * rng.gaussian();
        } while (!(traded > 0.0));
    }

    const Quarter trade_q = synth_trade_quarter(i);
    DealDraw draw;
    draw.deal = DealRecord::from_multiplier(synth_asset_id(i), quarter_first_day(trade_q),
                                            traded, ltm, lty, age, term);
    draw.growth = growth;
    return draw;
}

}  // namespace detail

/// Deterministic synthetic deal set: features uniform over the configured
/// ranges, traded multipliers equal to the model multiplier plus noise.
/// With noise_sigma = 0 the generating theta prices every deal exactly.
inline std::vector<DealRecord> generate_deals(const SynthConfig& config) {
    config.validate();
    SeededRng rng(config.seed);
    std::vector<DealRecord> deals;
    deals.reserve(static_cast<std::size_t>(config.deal_count));
    for (int i = 0; i < config.deal_count; ++i) {
        deals.push_back(detail::draw_deal(config, rng, i).deal);
    }
    return deals;
}

struct RevenueConfig {
    std::string asset_id = "SYN-000001";
    Quarter start{2014, 2};
    int quarters = 16;
    double level = 25'000.0;        // first-quarter revenue
    double annual_growth = 0.0;     // may be negative, > -1
    double noise_sigma = 0.0;       // lognormal noise on each quarter
    std::uint64_t seed = 1;
};

/// Quarterly series level * (1+g)^(i/4) * lognormal noise. Deterministic
/// per seed; with zero growth and zero noise the series is constant.
inline RevenueSeries generate_revenue_series(const RevenueConfig& config) {
    if (!(config.level > 0.0)) throw ParseError("level must be > 0");
    if (config.quarters < 12) throw ParseError("quarters must be >= 12");
    if (!(config.annual_growth > -1.0)) throw ParseError("annual growth must be > -1");
    if (!(config.noise_sigma >= 0.0)) throw ParseError("noise_sigma must be >= 0");

    SeededRng rng(config.seed);
    RevenueSeries series;
    series.asset_id = config.asset_id;
    series.start = config.start;
    series.amounts.reserve(static_cast<std::size_t>(config.quarters));
    for (int i = 0; i < config.quarters; ++i) {
        double amount = config.level * std::pow(1.0 + config.annual_growth, i / 4.0);
        if (config.noise_sigma > 0.0) amount *= rng.lognormal(config.noise_sigma);
        series.amounts.push_back(amount);
    }
    return series;
}

struct SynthDataset {
    std::vector<DealRecord> deals;
    RevenueMap revenues;
};

/// Deals plus a consistent revenue series per asset: the 12 quarters ending
/// at the trade quarter reproduce the deal's LTM and LTY (two flat blocks),
/// then the series extends forward along the asset's drawn growth path so
/// backtests have realized cashflows to collect.
inline SynthDataset generate_dataset(const SynthConfig& config) {
    config.validate();
    SeededRng rng(config.seed);
    SynthDataset data;
    data.deals.reserve(static_cast<std::size_t>(config.deal_count));
    for (int i = 0; i < config.deal_count; ++i) {
        const detail::DealDraw draw = detail::draw_deal(config, rng, i);
        const DealRecord& deal = draw.deal;
        data.deals.push_back(deal);

        const Quarter trade_q = Quarter::of(deal.trade_date);
        RevenueSeries series;
        series.asset_id = deal.asset_id;
        series.start = trade_q - 11;
        series.amounts.reserve(static_cast<std::size_t>(12 + config.forward_quarters));
        // max() absorbs the 1-ulp negative possible at ratio == 3
        const double early = std::max(0.0, (3.0 * deal.lty - deal.ltm) / 8.0);
        const double recent = deal.ltm / 4.0;                    // last 4 quarters
        for (int j = 0; j < 8; ++j) series.amounts.push_back(early);
        for (int j = 0; j < 4; ++j) series.amounts.push_back(recent);
        for (int j = 1; j <= config.forward_quarters; ++j) {
            series.amounts.push_back(recent * std::pow(1.0 + draw.growth, j / 4.0));
        }
        data.revenues.emplace(deal.asset_id, std::move(series));
    }
    return data;
}

}  // namespace royalty
