// SPDX-License-Identifier: Apache-2.0
//
// Deal and revenue records, CSV ingestion, and the trailing-revenue features
// (LTM, LTY, ratio, age) everything downstream prices from.
//
// File schemas:
//   deals.csv    header: asset_id,trade_date,price,ltm,lty,age_years,term
//                trade_date = YYYY-MM-DD, term in {10Y,30Y,LOR}
//   revenues.csv header: asset_id,quarter,amount
//                quarter = YYYY-Qn, n in 1..4
//
// All parsing is pure and reentrant; errors carry the offending line number.

#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "royalty/calendar.hpp"
#include "royalty/csv.hpp"
#include "royalty/errors.hpp"

namespace royalty {

/// Contract term of a royalty deal. Finite terms are worth zero at expiry;
/// life-of-rights pays in perpetuity.
enum class ContractTerm { ten_year, thirty_year, life_of_rights };

constexpr double kUnboundedHorizon = std::numeric_limits<double>::infinity();

/// Remaining payout horizon of a fresh contract, in years.
inline double horizon_years(ContractTerm term) {
    switch (term) {
        case ContractTerm::ten_year: return 10.0;
        case ContractTerm::thirty_year: return 30.0;
        case ContractTerm::life_of_rights: return kUnboundedHorizon;
    }
    throw Error("unreachable contract term");
}

inline ContractTerm parse_term(const std::string& token) {
    if (token == "10Y") return ContractTerm::ten_year;
    if (token == "30Y") return ContractTerm::thirty_year;
    if (token == "LOR") return ContractTerm::life_of_rights;
    throw ParseError("unknown term token '" + token + "' (expected 10Y, 30Y or LOR)");
}

inline std::string term_token(ContractTerm term) {
    switch (term) {
        case ContractTerm::ten_year: return "10Y";
        case ContractTerm::thirty_year: return "30Y";
        case ContractTerm::life_of_rights: return "LOR";
    }
    throw Error("unreachable contract term");
}

/// Pricing inputs for one asset at one point in time. `ratio` is always
/// recomputed from ltm/lty on construction.
struct PricingFeatures {
    double ltm = 0.0;       // trailing 12 months of revenue, per year
    double lty = 0.0;       // trailing 3 years of revenue, annualized
    double ratio = 0.0;     // ltm / lty
    double age_years = 0.0; // catalog age
    ContractTerm term = ContractTerm::life_of_rights;

    static PricingFeatures make(double ltm, double lty, double age_years, ContractTerm term) {
        if (!(ltm > 0.0) || !std::isfinite(ltm)) throw ParseError("ltm must be > 0");
        if (!(lty > 0.0) || !std::isfinite(lty)) throw ParseError("lty must be > 0");
        if (!(age_years >= 0.0) || !std::isfinite(age_years)) {
            throw ParseError("age must be >= 0");
        }
        return PricingFeatures{ltm, lty, ltm / lty, age_years, term};
    }
};

/// One observed transaction. `multiplier` is always price / ltm, recomputed
/// on construction and never read from an input file.
struct DealRecord {
    std::string asset_id;
    Date trade_date;
    double price = 0.0;
    double ltm = 0.0;
    double lty = 0.0;
    double age_years = 0.0;
    ContractTerm term = ContractTerm::life_of_rights;
    double multiplier = 0.0;

    static DealRecord make(std::string asset_id, Date trade_date, double price, double ltm,
                           double lty, double age_years, ContractTerm term) {
        if (asset_id.empty()) throw ParseError("asset_id must be non-empty");
        if (!(price > 0.0) || !std::isfinite(price)) throw ParseError("price must be > 0");
        if (!(ltm > 0.0) || !std::isfinite(ltm)) throw ParseError("ltm must be > 0");
        if (!(lty > 0.0) || !std::isfinite(lty)) throw ParseError("lty must be > 0");
        if (!(age_years >= 0.0) || !std::isfinite(age_years)) {
            throw ParseError("age_years must be >= 0");
        }
        DealRecord rec{std::move(asset_id), trade_date, price, ltm, lty,
                       age_years,           term,       price / ltm};
        return rec;
    }

    /// Builds a record from a target multiplier; price is derived as
    /// multiplier * ltm. Used by the synthetic generator, which works in
    /// multiplier space.
    static DealRecord from_multiplier(std::string asset_id, Date trade_date, double multiplier,
                                      double ltm, double lty, double age_years,
                                      ContractTerm term) {
        if (!(multiplier > 0.0)) throw ParseError("multiplier must be > 0");
        DealRecord rec = make(std::move(asset_id), trade_date, multiplier * ltm, ltm, lty,
                              age_years, term);
        rec.multiplier = multiplier;
        return rec;
    }

    PricingFeatures features() const {
        return PricingFeatures::make(ltm, lty, age_years, term);
    }
};

/// Contiguous quarterly royalty cashflows for one asset: amounts[i] belongs
/// to quarter start + i.
struct RevenueSeries {
    std::string asset_id;
    Quarter start;
    std::vector<double> amounts;

    int size() const { return static_cast<int>(amounts.size()); }
    Quarter last() const { return start + (size() - 1); }
    bool covers(Quarter from, Quarter to) const {
        return size() > 0 && from >= start && to <= last() && from <= to;
    }

    /// Inclusive window sum, accumulated in chronological order.
    double sum_window(Quarter from, Quarter to) const {
        if (!covers(from, to)) {
            throw HistoryError("asset " + asset_id + ": revenue series does not cover " +
                               from.to_string() + ".." + to.to_string());
        }
        double total = 0.0;
        for (int i = from - start; i <= to - start; ++i) {
            total += amounts[static_cast<std::size_t>(i)];
        }
        return total;
    }
};

using RevenueMap = std::map<std::string, RevenueSeries>;

/// Last-twelve-months revenue: sum of the 4 quarters ending at `as_of`.
inline double compute_ltm(const RevenueSeries& series, Quarter as_of) {
    if (!series.covers(as_of - 3, as_of)) {
        throw HistoryError("asset " + series.asset_id +
                           ": insufficient history for LTM at " + as_of.to_string() +
                           " (need 4 quarters ending there)");
    }
    return series.sum_window(as_of - 3, as_of);
}

/// Last-three-years revenue, annualized: sum of the 12 quarters ending at
/// `as_of`, divided by 3.
inline double compute_lty(const RevenueSeries& series, Quarter as_of) {
    if (!series.covers(as_of - 11, as_of)) {
        throw HistoryError("asset " + series.asset_id +
                           ": insufficient history for LTY at " + as_of.to_string() +
                           " (need 12 quarters ending there)");
    }
    return series.sum_window(as_of - 11, as_of) / 3.0;
}

/// Trailing features observed at the end of quarter `as_of`.
inline PricingFeatures features_at(const RevenueSeries& series, Quarter as_of,
                                   double age_years, ContractTerm term) {
    return PricingFeatures::make(compute_ltm(series, as_of), compute_lty(series, as_of),
                                 age_years, term);
}

inline constexpr const char* kDealsHeader = "asset_id,trade_date,price,ltm,lty,age_years,term";
inline constexpr const char* kRevenuesHeader = "asset_id,quarter,amount";

/// Parses deals.csv. When `revenues` is supplied, empty ltm/lty fields are
/// derived from the asset's revenue series at the trade quarter, and
/// populated fields are cross-checked against the series: a relative
/// disagreement above 0.5% rejects the row.
inline std::vector<DealRecord> parse_deals(const std::string& csv_text,
                                           const RevenueMap* revenues = nullptr) {
    const auto lines = detail::split_lines(csv_text);
    if (lines.empty()) return {};
    if (lines[0] != kDealsHeader) {
        throw ParseError(std::string("deals.csv: bad header, expected '") + kDealsHeader + "'");
    }

    constexpr double kMaxRelDisagreement = 0.005;
    std::vector<DealRecord> records;
    std::set<std::pair<std::string, Date>> seen;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::string where = "deals.csv line " + std::to_string(li + 1);
        if (lines[li].empty()) throw ParseError(where + ": empty row");
        const auto fields = detail::split_fields(lines[li]);
        if (fields.size() != 7) {
            throw ParseError(where + ": expected 7 fields, got " +
                             std::to_string(fields.size()));
        }
        try {
            const std::string& asset_id = fields[0];
            const Date trade_date = Date::parse(fields[1]);
            const double price = detail::parse_number(fields[2], "price");
            const double age = detail::parse_number(fields[5], "age_years");
            const ContractTerm term = parse_term(fields[6]);

            // ltm/lty may be blank when a revenue series can stand in.
            std::optional<double> ltm, lty;
            if (!fields[3].empty()) ltm = detail::parse_number(fields[3], "ltm");
            if (!fields[4].empty()) lty = detail::parse_number(fields[4], "lty");

            const RevenueSeries* series = nullptr;
            if (revenues != nullptr) {
                auto it = revenues->find(asset_id);
                if (it != revenues->end()) series = &it->second;
            }
            const Quarter trade_q = Quarter::of(trade_date);

            auto resolve = [&](std::optional<double> field_value, const char* name,
                               double (*derive)(const RevenueSeries&, Quarter)) {
                std::optional<double> derived;
                if (series != nullptr) {
                    try {
                        derived = derive(*series, trade_q);
                    } catch (const HistoryError&) {
                        // series too short at the trade quarter: no second source
                    }
                }
                if (field_value && derived) {
                    if (std::abs(*field_value - *derived) > kMaxRelDisagreement * *derived) {
                        throw ParseError(std::string(name) + " disagrees with revenue series (" +
                                         detail::format_number(*field_value) + " vs derived " +
                                         detail::format_number(*derived) + ")");
                    }
                    return *field_value;
                }
                if (field_value) return *field_value;
                if (derived) return *derived;
                throw ParseError(std::string(name) +
                                 " missing and no revenue history to derive it from");
            };
            const double ltm_v = resolve(ltm, "ltm", &compute_ltm);
            const double lty_v = resolve(lty, "lty", &compute_lty);

            if (!seen.insert({asset_id, trade_date}).second) {
                throw ParseError("duplicate (asset_id, trade_date) pair");
            }
            records.push_back(
                DealRecord::make(asset_id, trade_date, price, ltm_v, lty_v, age, term));
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    return records;
}

inline std::string serialize_deals(const std::vector<DealRecord>& records) {
    std::string out = kDealsHeader;
    out += '\n';
    for (const auto& rec : records) {
        out += rec.asset_id;
        out += ',';
        out += rec.trade_date.to_string();
        out += ',';
        out += detail::format_number(rec.price);
        out += ',';
        out += detail::format_number(rec.ltm);
        out += ',';
        out += detail::format_number(rec.lty);
        out += ',';
        out += detail::format_number(rec.age_years);
        out += ',';
        out += term_token(rec.term);
        out += '\n';
    }
    return out;
}

/// Parses revenues.csv into one contiguous series per asset. Rows may appear
/// in any order; a missing interior quarter is an error naming the gap.
inline RevenueMap parse_revenues(const std::string& csv_text) {
    const auto lines = detail::split_lines(csv_text);
    if (lines.empty()) return {};
    if (lines[0] != kRevenuesHeader) {
        throw ParseError(std::string("revenues.csv: bad header, expected '") + kRevenuesHeader +
                         "'");
    }

    std::map<std::string, std::map<Quarter, double>> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::string where = "revenues.csv line " + std::to_string(li + 1);
        if (lines[li].empty()) throw ParseError(where + ": empty row");
        const auto fields = detail::split_fields(lines[li]);
        if (fields.size() != 3) {
            throw ParseError(where + ": expected 3 fields, got " +
                             std::to_string(fields.size()));
        }
        try {
            if (fields[0].empty()) throw ParseError("asset_id must be non-empty");
            const Quarter quarter = Quarter::parse(fields[1]);
            const double amount = detail::parse_number(fields[2], "amount");
            if (!(amount >= 0.0) || !std::isfinite(amount)) {
                throw ParseError("amount must be >= 0");
            }
            if (!rows[fields[0]].emplace(quarter, amount).second) {
                throw ParseError("duplicate quarter " + quarter.to_string() + " for asset " +
                                 fields[0]);
            }
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }

    RevenueMap result;
    for (auto& [asset_id, by_quarter] : rows) {
        RevenueSeries series;
        series.asset_id = asset_id;
        series.start = by_quarter.begin()->first;
        Quarter expected = series.start;
        for (const auto& [quarter, amount] : by_quarter) {
            if (quarter != expected) {
                throw ParseError("asset " + asset_id + ": missing quarter " +
                                 expected.to_string());
            }
            series.amounts.push_back(amount);
            expected = expected + 1;
        }
        result.emplace(asset_id, std::move(series));
    }
    return result;
}

inline std::string serialize_revenues(const RevenueMap& revenues) {
    std::string out = kRevenuesHeader;
    out += '\n';
    for (const auto& [asset_id, series] : revenues) {
        for (int i = 0; i < series.size(); ++i) {
            out += asset_id;
            out += ',';
            out += (series.start + i).to_string();
            out += ',';
            out += detail::format_number(series.amounts[static_cast<std::size_t>(i)]);
            out += '\n';
        }
    }
    return out;
}

}  // namespace royalty
