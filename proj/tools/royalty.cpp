// SPDX-License-Identifier: Apache-2.0
//
// royalty: command-line front end for the royaltydcf library.
//
// Subcommands follow the workflow calibrate -> price / curves -> backtest:
//   synth      generate a synthetic deal + revenue dataset from known theta
//   calibrate  fit model parameters to a deals CSV
//   price      value one asset from a params file and feature flags
//   curves     emit a multiplier curve over a ratio or age sweep
//   backtest   buy-and-hold simulation with per-term summary tables
//
// Every file-writing command drops a JSON run manifest next to its outputs.
// All randomness is seed-flagged; re-running a command with the same inputs
// reproduces its outputs byte for byte.
//
// Exit codes: 0 success, 1 input error, 2 calibration did not converge,
// 3 pricing infeasibility, 4 empty backtest cohort, 64 usage.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "royalty/royalty.hpp"

namespace {

constexpr const char* kToolName = "royalty";
constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitPricing = 3;
constexpr int kExitEmptyCohort = 4;
constexpr int kExitUsage = 64;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw royalty::ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw royalty::ParseError("cannot write file: " + path);
    out << content;
}

nlohmann::json load_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw royalty::ParseError(path + ": " + e.what());
    }
}

royalty::ModelParams load_params(const std::string& path) {
    return royalty::ModelParams::from_json(load_json(path));
}

royalty::CostSchedule load_costs(const std::string& path) {
    const nlohmann::json j = load_json(path);
    if (!j.is_object() || !j.contains("buyer_fee") || !j.contains("seller_commission")) {
        throw royalty::ParseError(path + ": expected {\"buyer_fee\": .., \"seller_commission\": ..}");
    }
    royalty::CostSchedule costs{j["buyer_fee"].get<double>(),
                                j["seller_commission"].get<double>()};
    costs.validate();
    return costs;
}

/// Records what a command ran with, next to its outputs.
void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::json& arguments, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    const nlohmann::json manifest{{"tool", kToolName},        {"version", kToolVersion},
                                  {"command", command},       {"arguments", arguments},
                                  {"inputs", inputs},         {"outputs", outputs}};
    write_file(path, manifest.dump(2) + "\n");
}

struct SweepRange {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
};

SweepRange parse_range(const std::string& text) {
    SweepRange range;
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos) {
        throw CLI::ValidationError("--range", "expected LO:HI:STEP");
    }
    try {
        range.lo = royalty::detail::parse_number(text.substr(0, first), "range lo");
        range.hi = royalty::detail::parse_number(text.substr(first + 1, second - first - 1),
                                                 "range hi");
        range.step = royalty::detail::parse_number(text.substr(second + 1), "range step");
    } catch (const royalty::ParseError& e) {
        throw CLI::ValidationError("--range", e.what());
    }
    if (!(range.step > 0.0) || !(range.hi >= range.lo)) {
        throw CLI::ValidationError("--range", "need LO <= HI and STEP > 0");
    }
    return range;
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

struct CalibrateArgs {
    int model = 3;
    std::string deals_path;
    std::string bounds_path;
    std::string out_path;
    std::string report_path;
    int max_iterations = 10000;
    double tolerance = 1e-10;
};

royalty::ParamBounds load_bounds(const std::string& path) {
    const nlohmann::json j = load_json(path);
    if (!j.is_object()) throw royalty::ParseError(path + ": expected a JSON object");
    royalty::ParamBounds bounds;
    auto read = [&](const char* name, std::pair<double, double>& into) {
        if (!j.contains(name)) return;
        const auto& v = j[name];
        if (!v.is_array() || v.size() != 2) {
            throw royalty::ParseError(path + ": '" + name + "' must be [lo, hi]");
        }
        into = {v[0].get<double>(), v[1].get<double>()};
    };
    read("r", bounds.r);
    read("a", bounds.a);
    read("k", bounds.k);
    read("b", bounds.b);
    return bounds;
}

int run_calibrate(const CalibrateArgs& args) {
    const auto deals = royalty::parse_deals(read_file(args.deals_path));

    royalty::CalibrationConfig config;
    config.model = args.model;
    config.max_iterations = args.max_iterations;
    config.objective_tolerance = args.tolerance;
    if (!args.bounds_path.empty()) config.bounds = load_bounds(args.bounds_path);

    const royalty::CalibrationResult result = royalty::calibrate(deals, config);

    const std::string out =
        args.out_path.empty() ? "model" + std::to_string(args.model) + "_params.json"
                              : args.out_path;
    const std::string report =
        args.report_path.empty() ? "model" + std::to_string(args.model) + "_report.csv"
                                 : args.report_path;
    write_file(out, result.params.to_json().dump(2) + "\n");
    write_file(report, royalty::calibration_report_csv({result}));
    write_manifest(out + ".manifest.json", "calibrate",
                   {{"model", args.model},
                    {"deals", args.deals_path},
                    {"bounds", args.bounds_path}},
                   {args.deals_path}, {out, report});

    std::cout << "model " << args.model << ": mse " << result.mse << ", "
              << result.iterations << " iterations, "
              << (result.converged ? "converged" : "did not converge") << "\n"
              << "params written to " << out << ", report to " << report << "\n";
    return result.converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------------------
// price
// ---------------------------------------------------------------------------

struct PriceArgs {
    std::string params_path;
    double ltm = 0.0;
    double lty = 0.0;
    double age = 0.0;
    std::string term = "LOR";
};

int run_price(const PriceArgs& args) {
    const auto params = load_params(args.params_path);
    const auto features = royalty::PricingFeatures::make(args.ltm, args.lty, args.age,
                                                         royalty::parse_term(args.term));
    const royalty::Valuation valuation = royalty::price(params, features);
    std::cout << valuation.to_json().dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// curves
// ---------------------------------------------------------------------------

struct CurvesArgs {
    std::string params_path;
    std::string term = "LOR";
    std::string sweep = "ratio";
    std::string range = "0.5:1.5:0.01";
    double fixed_ratio = 1.0;
    double fixed_age = 10.0;
    std::string out_path;
};

int run_curves(const CurvesArgs& args) {
    const auto params = load_params(args.params_path);
    const SweepRange range = parse_range(args.range);

    royalty::SweepSpec spec;
    spec.axis = args.sweep == "ratio" ? royalty::SweepAxis::ratio : royalty::SweepAxis::age;
    spec.lo = range.lo;
    spec.hi = range.hi;
    spec.step = range.step;
    spec.fixed_ratio = args.fixed_ratio;
    spec.fixed_age = args.fixed_age;

    const auto points = royalty::curve(params, royalty::parse_term(args.term), spec);
    const std::string csv = royalty::curve_csv(points);
    if (args.out_path.empty()) {
        std::cout << csv;
    } else {
        write_file(args.out_path, csv);
        write_manifest(args.out_path + ".manifest.json", "curves",
                       {{"params", args.params_path},
                        {"term", args.term},
                        {"sweep", args.sweep},
                        {"range", args.range},
                        {"fixed_ratio", args.fixed_ratio},
                        {"fixed_age", args.fixed_age}},
                       {args.params_path}, {args.out_path});
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// backtest
// ---------------------------------------------------------------------------

struct BacktestArgs {
    std::string params_path;
    std::string deals_path;
    std::string revenues_path;
    int entry_year = 2017;
    std::string horizon = "1y";
    std::string costs_path;
    std::string benchmark_path;
    std::string out_prefix = "backtest";
};

int run_backtest_cmd(const BacktestArgs& args) {
    const auto params = load_params(args.params_path);
    const auto revenues = royalty::parse_revenues(read_file(args.revenues_path));
    const auto deals = royalty::parse_deals(read_file(args.deals_path), &revenues);
    const royalty::CostSchedule costs =
        args.costs_path.empty() ? royalty::CostSchedule{} : load_costs(args.costs_path);
    const int quarters_held = args.horizon == "1y" ? 4 : 20;

    const royalty::BacktestRun run = royalty::run_backtest(deals, revenues, params,
                                                           args.entry_year, quarters_held, costs);

    std::vector<std::string> outputs;
    for (const auto term : {royalty::ContractTerm::life_of_rights,
                            royalty::ContractTerm::ten_year,
                            royalty::ContractTerm::thirty_year}) {
        std::vector<royalty::HoldingResult> class_results;
        for (const auto& res : run.results) {
            if (res.term == term) class_results.push_back(res);
        }
        if (class_results.empty()) continue;
        const royalty::SummaryTable summary = royalty::summarize(class_results);
        const std::string stem = args.out_prefix + "_" + royalty::term_token(term);
        write_file(stem + ".csv", royalty::summary_csv(summary));
        write_file(stem + ".txt",
                   royalty::summary_text(summary, royalty::term_token(term) + " assets"));
        outputs.push_back(stem + ".csv");
        outputs.push_back(stem + ".txt");
        std::cout << royalty::summary_text(summary, royalty::term_token(term) + " assets")
                  << "\n";

        if (!args.benchmark_path.empty()) {
            const auto comparison = royalty::benchmark_compare(
                royalty::to_benchmark(summary), read_file(args.benchmark_path));
            const std::string cmp_path = stem + "_benchmark.csv";
            write_file(cmp_path, royalty::comparison_csv(comparison));
            outputs.push_back(cmp_path);
        }
    }

    const std::string skip_path = args.out_prefix + "_skipped.csv";
    write_file(skip_path, royalty::skip_report_csv(run.skipped));
    outputs.push_back(skip_path);
    std::cout << run.results.size() << " holdings, " << run.skipped.size()
              << " assets skipped (see " << skip_path << ")\n";

    std::vector<std::string> inputs{args.params_path, args.deals_path, args.revenues_path};
    if (!args.costs_path.empty()) inputs.push_back(args.costs_path);
    if (!args.benchmark_path.empty()) inputs.push_back(args.benchmark_path);
    write_manifest(args.out_prefix + ".manifest.json", "backtest",
                   {{"params", args.params_path},
                    {"deals", args.deals_path},
                    {"revenues", args.revenues_path},
                    {"entry_year", args.entry_year},
                    {"horizon", args.horizon},
                    {"costs", args.costs_path},
                    {"benchmark", args.benchmark_path},
                    {"out_prefix", args.out_prefix}},
                   inputs, outputs);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string theta_path;
    int count = 1000;
    double noise = 0.0;
    std::uint64_t seed = 1;
    int forward_quarters = 32;
    std::string out_deals = "deals.csv";
    std::string out_revenues = "revenues.csv";
};

int run_synth(const SynthArgs& args) {
    royalty::SynthConfig config;
    config.theta = load_params(args.theta_path);
    config.deal_count = args.count;
    config.noise_sigma = args.noise;
    config.seed = args.seed;
    config.forward_quarters = args.forward_quarters;

    const royalty::SynthDataset data = royalty::generate_dataset(config);
    write_file(args.out_deals, royalty::serialize_deals(data.deals));
    write_file(args.out_revenues, royalty::serialize_revenues(data.revenues));
    write_manifest(args.out_deals + ".manifest.json", "synth",
                   {{"theta", args.theta_path},
                    {"n", args.count},
                    {"noise", args.noise},
                    {"seed", args.seed},
                    {"forward_quarters", args.forward_quarters}},
                   {args.theta_path}, {args.out_deals, args.out_revenues});
    std::cout << data.deals.size() << " deals -> " << args.out_deals << ", revenues -> "
              << args.out_revenues << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discounted-cashflow pricing, calibration and backtesting "
                 "for music royalty assets"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CalibrateArgs cal;
    auto* cmd_calibrate = app.add_subcommand("calibrate", "Fit model parameters to deals");
    cmd_calibrate->add_option("--model", cal.model, "Model id (1, 2 or 3)")
        ->required()
        ->check(CLI::Range(1, 3));
    cmd_calibrate->add_option("--deals", cal.deals_path, "Deals CSV")->required();
    cmd_calibrate->add_option("--bounds", cal.bounds_path, "JSON bounds file");
    cmd_calibrate->add_option("--out", cal.out_path, "Params JSON output path");
    cmd_calibrate->add_option("--report", cal.report_path, "Report CSV output path");
    cmd_calibrate->add_option("--max-iterations", cal.max_iterations,
                              "Solver iteration budget per start point")
        ->check(CLI::PositiveNumber);
    cmd_calibrate->add_option("--tolerance", cal.tolerance,
                              "Objective improvement threshold for convergence")
        ->check(CLI::PositiveNumber);

    PriceArgs pr;
    auto* cmd_price = app.add_subcommand("price", "Value one asset");
    cmd_price->add_option("--params", pr.params_path, "Params JSON")->required();
    cmd_price->add_option("--ltm", pr.ltm, "Trailing 12-month revenue")->required();
    cmd_price->add_option("--lty", pr.lty, "Trailing 3-year revenue, annualized")->required();
    cmd_price->add_option("--age", pr.age, "Catalog age in years")->required();
    cmd_price->add_option("--term", pr.term, "Contract term: 10Y, 30Y or LOR")->required();

    CurvesArgs cv;
    auto* cmd_curves = app.add_subcommand("curves", "Emit a multiplier curve");
    cmd_curves->add_option("--params", cv.params_path, "Params JSON")->required();
    cmd_curves->add_option("--term", cv.term, "Contract term: 10Y, 30Y or LOR")->required();
    cmd_curves->add_option("--sweep", cv.sweep, "Swept feature")
        ->required()
        ->check(CLI::IsMember({"ratio", "age"}));
    cmd_curves->add_option("--range", cv.range, "Sweep grid as LO:HI:STEP")->required();
    cmd_curves->add_option("--fixed-ratio", cv.fixed_ratio, "Ratio held fixed for age sweeps");
    cmd_curves->add_option("--fixed-age", cv.fixed_age, "Age held fixed for ratio sweeps");
    cmd_curves->add_option("--out", cv.out_path, "Output CSV (default: stdout)");

    BacktestArgs bt;
    auto* cmd_backtest = app.add_subcommand("backtest", "Buy-and-hold simulation");
    cmd_backtest->add_option("--params", bt.params_path, "Params JSON")->required();
    cmd_backtest->add_option("--deals", bt.deals_path, "Deals CSV")->required();
    cmd_backtest->add_option("--revenues", bt.revenues_path, "Revenues CSV")->required();
    cmd_backtest->add_option("--entry-year", bt.entry_year, "Cohort entry year")->required();
    cmd_backtest->add_option("--horizon", bt.horizon, "Holding period")
        ->required()
        ->check(CLI::IsMember({"1y", "5y"}));
    cmd_backtest->add_option("--costs", bt.costs_path,
                             "JSON cost schedule (default: 500 fee, 8% commission)");
    cmd_backtest->add_option("--benchmark", bt.benchmark_path,
                             "Benchmark CSV to compare total returns against");
    cmd_backtest->add_option("--out", bt.out_prefix, "Output path prefix");

    SynthArgs sy;
    auto* cmd_synth = app.add_subcommand("synth", "Generate synthetic data");
    cmd_synth->add_option("--theta", sy.theta_path, "Generating params JSON")->required();
    cmd_synth->add_option("--n", sy.count, "Number of deals")
        ->required()
        ->check(CLI::Range(1, 100000000));
    cmd_synth->add_option("--noise", sy.noise, "Multiplier noise sigma")
        ->check(CLI::NonNegativeNumber);
    cmd_synth->add_option("--seed", sy.seed, "RNG seed");
    cmd_synth->add_option("--forward-quarters", sy.forward_quarters,
                          "Forward revenue quarters per asset")
        ->check(CLI::Range(0, 400));
    cmd_synth->add_option("--out-deals", sy.out_deals, "Deals CSV output path");
    cmd_synth->add_option("--out-revenues", sy.out_revenues, "Revenues CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (cmd_calibrate->parsed()) return run_calibrate(cal);
        if (cmd_price->parsed()) return run_price(pr);
        if (cmd_curves->parsed()) return run_curves(cv);
        if (cmd_backtest->parsed()) return run_backtest_cmd(bt);
        if (cmd_synth->parsed()) return run_synth(sy);
    } catch (const CLI::ParseError& e) {  // post-parse flag validation (e.g. --range)
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const royalty::PricingError& e) {
        std::cerr << "pricing error: " << e.what() << "\n";
        return kExitPricing;
    } catch (const royalty::EmptyCohortError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEmptyCohort;
    } catch (const royalty::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
