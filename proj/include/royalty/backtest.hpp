// SPDX-License-Identifier: Apache-2.0
//
// Buy-and-hold backtesting at model-implied prices.
//
// A holding buys at the model price computed from features observable at the
// entry quarter, collects the realized quarterly cashflows over the holding
// period, and sells at the model price recomputed from realized revenues at
// exit, with age advanced and any finite term horizon reduced by the holding
// period (a contract at expiry sells for zero). Costs are one round trip: a
// fixed buyer fee at entry plus a commission on the sale price at exit.
//
// Returns decompose as r = d + e - f with
//   d = cash / p_buy     (dividend yield)
//   e = (p_sell - p_buy) / p_buy   (capital gain)
//   f = cost / p_buy     (cost drag)

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "royalty/calendar.hpp"
#include "royalty/data_model.hpp"
#include "royalty/errors.hpp"
#include "royalty/pricing.hpp"

namespace royalty {

/// Platform transaction costs: fixed buyer fee plus a commission on the sale.
struct CostSchedule {
    double buyer_fee = 500.0;
    double seller_commission = 0.08;

    void validate() const {
        if (!(buyer_fee >= 0.0)) throw ParseError("buyer_fee must be >= 0");
        if (!(seller_commission >= 0.0) || !(seller_commission < 1.0)) {
            throw ParseError("seller_commission must be in [0, 1)");
        }
    }
};

inline double transaction_cost(const CostSchedule& schedule, double sell_price) {
    if (!(sell_price >= 0.0)) throw ParseError("sell_price must be >= 0");
    return schedule.buyer_fee + schedule.seller_commission * sell_price;
}

struct ReturnDecomposition {
    double d = 0.0;  // dividend yield
    double e = 0.0;  // capital gain
    double f = 0.0;  // cost drag
    double r = 0.0;  // total return, (p_sell + cash - p_buy - cost) / p_buy

    static ReturnDecomposition compute(double p_buy, double p_sell, double cash, double cost) {
        if (!(p_buy > 0.0)) throw PricingError("buy price must be > 0");
        ReturnDecomposition out;
        out.d = cash / p_buy;
        out.e = (p_sell - p_buy) / p_buy;
        out.f = cost / p_buy;
        out.r = (p_sell + cash - p_buy - cost) / p_buy;
        return out;
    }
};

struct HoldingResult {
    std::string asset_id;
    ContractTerm term = ContractTerm::life_of_rights;
    Quarter entry;
    Quarter exit;
    double p_buy = 0.0;
    double p_sell = 0.0;
    double cash_collected = 0.0;
    double cost = 0.0;
    ReturnDecomposition decomposition;
};

/// Simulates one holding of `quarters_held` quarters entered at the end of
/// quarter `entry`. Entry features come from the trailing windows at entry;
/// exit features from the windows at entry + quarters_held, which consist of
/// realized revenues. The deal supplies the asset's age (as of its trade
/// date) and term; age is shifted to the entry quarter and floored at zero.
inline HoldingResult hold(const DealRecord& deal, const RevenueSeries& series,
                          const ModelParams& params, Quarter entry, int quarters_held,
                          const CostSchedule& schedule) {
    if (quarters_held < 1) throw ParseError("quarters_held must be >= 1");
    schedule.validate();

    const Quarter exit = entry + quarters_held;
    const double held_years = quarters_held / 4.0;
    const Quarter trade_q = Quarter::of(deal.trade_date);
    const double age_entry = std::max(0.0, deal.age_years + (entry - trade_q) / 4.0);

    const PricingFeatures entry_features = features_at(series, entry, age_entry, deal.term);
    const double h_entry = horizon_years(deal.term);
    const double p_buy = multiplier(params, entry_features, h_entry) * entry_features.ltm;

    const double cash = series.sum_window(entry + 1, exit);

    const double h_exit = std::isinf(h_entry) ? h_entry : std::max(0.0, h_entry - held_years);
    const PricingFeatures exit_features =
        features_at(series, exit, age_entry + held_years, deal.term);
    const double p_sell = multiplier(params, exit_features, h_exit) * exit_features.ltm;

    const double cost = transaction_cost(schedule, p_sell);

    HoldingResult result;
    result.asset_id = deal.asset_id;
    result.term = deal.term;
    result.entry = entry;
    result.exit = exit;
    result.p_buy = p_buy;
    result.p_sell = p_sell;
    result.cash_collected = cash;
    result.cost = cost;
    result.decomposition = ReturnDecomposition::compute(p_buy, p_sell, cash, cost);
    return result;
}

struct SkippedAsset {
    std::string asset_id;
    std::string reason;
};

struct BacktestRun {
    std::vector<HoldingResult> results;  // sorted by asset_id
    std::vector<SkippedAsset> skipped;   // assets without enough data, with reasons
};

/// Runs the buy-and-hold strategy for every asset over the `entry_year`
/// cohort. An asset enters at the first quarter of the year whose trailing
/// 12-quarter window and forward holding window are both covered by its
/// revenue series; assets with no such quarter land in the skip report.
/// Assets with several deals use the earliest one for age/term metadata.
inline BacktestRun run_backtest(const std::vector<DealRecord>& deals, const RevenueMap& revenues,
                                const ModelParams& params, int entry_year, int quarters_held,
                                const CostSchedule& schedule) {
    if (quarters_held < 1) throw ParseError("quarters_held must be >= 1");
    schedule.validate();

    std::map<std::string, const DealRecord*> by_asset;
    for (const auto& deal : deals) {
        auto [it, inserted] = by_asset.emplace(deal.asset_id, &deal);
        if (!inserted && deal.trade_date < it->second->trade_date) it->second = &deal;
    }

    BacktestRun run;
    for (const auto& [asset_id, deal] : by_asset) {
        const auto series_it = revenues.find(asset_id);
        if (series_it == revenues.end()) {
            run.skipped.push_back({asset_id, "no revenue series"});
            continue;
        }
        const RevenueSeries& series = series_it->second;

        std::optional<Quarter> entry;
        for (int q = 1; q <= 4; ++q) {
            const Quarter candidate{entry_year, q};
            if (series.covers(candidate - 11, candidate) &&
                series.covers(candidate + 1, candidate + quarters_held)) {
                entry = candidate;
                break;
            }
        }
        if (!entry) {
            run.skipped.push_back(
                {asset_id, "insufficient revenue history for entry in " +
                               std::to_string(entry_year) + " (need 12 trailing and " +
                               std::to_string(quarters_held) + " forward quarters)"});
            continue;
        }
        run.results.push_back(hold(*deal, series, params, *entry, quarters_held, schedule));
    }

    if (run.results.empty()) {
        throw EmptyCohortError("no eligible assets for entry year " +
                               std::to_string(entry_year));
    }
    return run;  // by_asset is ordered, so results are sorted by asset_id
}

/// Geometric annualization of a multi-year total return.
inline double annualize(double total_return, double years) {
    if (!(total_return > -1.0)) throw Error("annualize: total return must be > -1");
    if (!(years > 0.0)) throw Error("annualize: years must be > 0");
    return std::pow(1.0 + total_return, 1.0 / years) - 1.0;
}

namespace detail {

/// Quantile by linear interpolation between closest ranks: h = (n-1)p on the
/// sorted sample (0-indexed).
inline double quantile(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 0) throw EmptyCohortError("quantile of empty sample");
    const double h = static_cast<double>(n - 1) * p;
    const std::size_t lower = static_cast<std::size_t>(h);
    if (lower + 1 >= n) return sorted.back();
    const double frac = h - static_cast<double>(lower);
    return sorted[lower] + frac * (sorted[lower + 1] - sorted[lower]);
}

}  // namespace detail

/// Percentile summary of one cohort. `period` holds quantiles of the
/// holding-period totals per metric; `annualized` is filled for the total
/// return when the holding period exceeds a year (cells where annualization
/// is undefined, total <= -1, are NaN).
struct SummaryTable {
    std::vector<double> probs;  // ascending, e.g. {0.10, 0.50, 0.90}
    int entry_year = 0;
    int quarters_held = 0;
    std::size_t count = 0;
    std::map<std::string, std::vector<double>> period;      // "d","e","f","r" -> per-prob
    std::map<std::string, std::vector<double>> annualized;  // "r" -> per-prob
};

inline SummaryTable summarize(const std::vector<HoldingResult>& results,
                              std::vector<double> probs = {0.10, 0.50, 0.90}) {
    if (results.empty()) throw EmptyCohortError("summarize: no holdings");
    std::sort(probs.begin(), probs.end());
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw ParseError("percentile out of [0, 1]");
    }

    SummaryTable table;
    table.probs = probs;
    table.entry_year = results.front().entry.year;
    table.quarters_held = results.front().exit - results.front().entry;
    table.count = results.size();

    const auto metric_values = [&](auto&& get) {
        std::vector<double> values;
        values.reserve(results.size());
        for (const auto& res : results) values.push_back(get(res.decomposition));
        std::sort(values.begin(), values.end());
        std::vector<double> out;
        out.reserve(probs.size());
        for (double p : probs) out.push_back(detail::quantile(values, p));
        return out;
    };

    table.period["d"] = metric_values([](const ReturnDecomposition& x) { return x.d; });
    table.period["e"] = metric_values([](const ReturnDecomposition& x) { return x.e; });
    table.period["f"] = metric_values([](const ReturnDecomposition& x) { return x.f; });
    table.period["r"] = metric_values([](const ReturnDecomposition& x) { return x.r; });

    const double years = table.quarters_held / 4.0;
    if (table.quarters_held > 4) {
        std::vector<double> ann;
        for (double total : table.period["r"]) {
            ann.push_back(total > -1.0 ? annualize(total, years)
                                       : std::numeric_limits<double>::quiet_NaN());
        }
        table.annualized["r"] = std::move(ann);
    }
    return table;
}

namespace detail {

inline std::string prob_label(double p) {
    if (p == 0.5) return "median";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%02d", static_cast<int>(std::lround(p * 100)));
    return buf;
}

}  // namespace detail

inline std::string summary_csv(const SummaryTable& table) {
    std::string out = "metric,total,annualized\n";
    for (const char* metric : {"d", "e", "f", "r"}) {
        const auto period_it = table.period.find(metric);
        const auto ann_it = table.annualized.find(metric);
        for (std::size_t i = 0; i < table.probs.size(); ++i) {
            out += metric;
            out += '_';
            out += detail::prob_label(table.probs[i]);
            out += ',';
            out += detail::format_number(period_it->second[i]);
            out += ',';
            if (ann_it != table.annualized.end() && !std::isnan(ann_it->second[i])) {
                out += detail::format_number(ann_it->second[i]);
            }
            out += '\n';
        }
    }
    return out;
}

/// Aligned-text rendering of a cohort summary, one row per metric with the
/// requested percentiles as columns.
inline std::string summary_text(const SummaryTable& table, const std::string& title) {
    auto pct = [](double v) {
        char buf[32];
        if (std::isnan(v)) return std::string("-");
        std::snprintf(buf, sizeof(buf), "%.2f%%", v * 100.0);
        return std::string(buf);
    };
    char line[160];
    std::string out = title + " (entry " + std::to_string(table.entry_year) + ", " +
                      std::to_string(table.quarters_held) + " quarters, " +
                      std::to_string(table.count) + " assets)\n";
    std::string header = "  metric";
    for (double p : table.probs) {
        std::snprintf(line, sizeof(line), "%12s", detail::prob_label(p).c_str());
        header += line;
    }
    out += header + "\n";
    const std::map<std::string, std::string> names{{"d", "d dividends"},
                                                   {"e", "e capital gains"},
                                                   {"f", "f costs"},
                                                   {"r", "r total"}};
    for (const char* metric : {"d", "e", "f", "r"}) {
        std::snprintf(line, sizeof(line), "  %-18s", names.at(metric).c_str());
        out += line;
        for (double v : table.period.at(metric)) {
            std::snprintf(line, sizeof(line), "%12s", pct(v).c_str());
            out += line;
        }
        out += '\n';
        const auto ann_it = table.annualized.find(metric);
        if (ann_it != table.annualized.end()) {
            std::snprintf(line, sizeof(line), "  %-18s", "r annualized");
            out += line;
            for (double v : ann_it->second) {
                std::snprintf(line, sizeof(line), "%12s", pct(v).c_str());
                out += line;
            }
            out += '\n';
        }
    }
    return out;
}

/// Metric-by-column grid of total returns, the exchange format for
/// benchmark comparison. Columns are year labels plus "total_5yr" /
/// "annualized_5yr"; rows are "median", "p10", "p90".
struct BenchmarkTable {
    std::vector<std::string> columns;
    std::map<std::string, std::map<std::string, double>> rows;  // metric -> column -> value

    static BenchmarkTable parse_csv(const std::string& csv_text) {
        const auto lines = detail::split_lines(csv_text);
        if (lines.empty()) throw ParseError("benchmark CSV is empty");
        const auto header = detail::split_fields(lines[0]);
        if (header.size() < 2 || header[0] != "metric") {
            throw ParseError("benchmark CSV: header must start with 'metric'");
        }
        BenchmarkTable table;
        table.columns.assign(header.begin() + 1, header.end());
        for (std::size_t li = 1; li < lines.size(); ++li) {
            const auto fields = detail::split_fields(lines[li]);
            if (fields.size() != header.size()) {
                throw ParseError("benchmark CSV line " + std::to_string(li + 1) +
                                 ": expected " + std::to_string(header.size()) + " fields");
            }
            for (std::size_t c = 1; c < fields.size(); ++c) {
                if (fields[c].empty()) continue;
                table.rows[fields[0]][header[c]] =
                    detail::parse_number(fields[c], "benchmark cell");
            }
        }
        return table;
    }

    std::string to_csv() const {
        std::string out = "metric";
        for (const auto& col : columns) {
            out += ',';
            out += col;
        }
        out += '\n';
        for (const auto& [metric, cells] : rows) {
            out += metric;
            for (const auto& col : columns) {
                out += ',';
                const auto it = cells.find(col);
                if (it != cells.end()) out += detail::format_number(it->second);
            }
            out += '\n';
        }
        return out;
    }
};

/// Projects the total-return rows of a cohort summary onto the benchmark
/// grid. One-year cohorts contribute a single year column; five-year
/// cohorts contribute the total and annualized columns.
inline BenchmarkTable to_benchmark(const SummaryTable& summary) {
    BenchmarkTable table;
    auto metric_name = [&](double p) { return detail::prob_label(p); };
    if (summary.quarters_held == 4) {
        const std::string col = std::to_string(summary.entry_year);
        table.columns = {col};
        for (std::size_t i = 0; i < summary.probs.size(); ++i) {
            table.rows[metric_name(summary.probs[i])][col] = summary.period.at("r")[i];
        }
    } else {
        const std::string suffix =
            summary.quarters_held == 20 ? "5yr" : std::to_string(summary.quarters_held) + "q";
        table.columns = {"total_" + suffix, "annualized_" + suffix};
        for (std::size_t i = 0; i < summary.probs.size(); ++i) {
            const std::string metric = metric_name(summary.probs[i]);
            table.rows[metric][table.columns[0]] = summary.period.at("r")[i];
            const auto ann_it = summary.annualized.find("r");
            if (ann_it != summary.annualized.end() && !std::isnan(ann_it->second[i])) {
                table.rows[metric][table.columns[1]] = ann_it->second[i];
            }
        }
    }
    return table;
}

struct CellComparison {
    std::string metric;
    std::string column;
    double asset_value = 0.0;
    double benchmark_value = 0.0;
    double difference = 0.0;  // asset minus benchmark
};

struct BenchmarkComparison {
    std::vector<CellComparison> cells;
    std::vector<std::string> missing;  // cells absent from the benchmark, as "metric/column"
};

/// Side-by-side comparison of an asset summary grid against a benchmark
/// table. Every cell of the summary grid is compared; cells the benchmark
/// lacks are reported in `missing` rather than failing the whole run.
inline BenchmarkComparison benchmark_compare(const BenchmarkTable& summary,
                                             const std::string& benchmark_csv) {
    const BenchmarkTable bench = BenchmarkTable::parse_csv(benchmark_csv);
    BenchmarkComparison cmp;
    for (const auto& [metric, cells] : summary.rows) {
        const auto bench_row = bench.rows.find(metric);
        for (const auto& col : summary.columns) {
            const auto cell = cells.find(col);
            if (cell == cells.end()) continue;
            if (bench_row == bench.rows.end() ||
                bench_row->second.find(col) == bench_row->second.end()) {
                cmp.missing.push_back(metric + "/" + col);
                continue;
            }
            const double bv = bench_row->second.at(col);
            cmp.cells.push_back({metric, col, cell->second, bv, cell->second - bv});
        }
    }
    return cmp;
}

inline std::string comparison_csv(const BenchmarkComparison& cmp) {
    std::string out = "metric,column,assets,benchmark,difference\n";
    for (const auto& cell : cmp.cells) {
        out += cell.metric + ',' + cell.column + ',' + detail::format_number(cell.asset_value) +
               ',' + detail::format_number(cell.benchmark_value) + ',' +
               detail::format_number(cell.difference) + '\n';
    }
    for (const auto& missing : cmp.missing) {
        out += missing + ",,,,missing\n";
    }
    return out;
}

inline std::string skip_report_csv(const std::vector<SkippedAsset>& skipped) {
    std::string out = "asset_id,reason\n";
    for (const auto& skip : skipped) {
        out += skip.asset_id + ',' + skip.reason + '\n';
    }
    return out;
}

}  // namespace royalty
