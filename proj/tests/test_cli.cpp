// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests driving the installed CLI binary. The binary path comes
// from the build system via ROYALTY_CLI_PATH; each test works in a scratch
// directory under the current working directory.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "royalty/royalty.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

std::string cli_path() { return ROYALTY_CLI_PATH; }

CommandResult run_cli(const fs::path& workdir, const std::string& args) {
    const fs::path out_file = workdir / "cmd_output.txt";
    const std::string cmd = "cd '" + workdir.string() + "' && '" + cli_path() + "' " + args +
                            " > cmd_output.txt 2>&1";
    const int status = std::system(cmd.c_str());
    CommandResult result;
    result.exit_code = WEXITSTATUS(status);
    std::ifstream in(out_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    result.output = buf.str();
    return result;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

const char* kTheta3 = R"({"model":3,"r":0.083,"a":0.61,"k":0.058,"b":0.0098})";

}  // namespace

TEST_CASE("cli synth is deterministic and round-trips") {
    const auto dir = scratch_dir("synth");
    write(dir / "theta.json", kTheta3);

    const std::string args =
        "synth --theta theta.json --n 50 --noise 0.3 --seed 9 "
        "--out-deals deals.csv --out-revenues revenues.csv";
    const auto first = run_cli(dir, args);
    REQUIRE(first.exit_code == 0);
    const std::string deals_once = slurp(dir / "deals.csv");
    const std::string revenues_once = slurp(dir / "revenues.csv");

    // byte-identical on re-run
    const auto second = run_cli(dir, args);
    REQUIRE(second.exit_code == 0);
    CHECK(slurp(dir / "deals.csv") == deals_once);
    CHECK(slurp(dir / "revenues.csv") == revenues_once);

    // outputs parse under the strict cross-checking reader
    const auto revenues = royalty::parse_revenues(revenues_once);
    const auto deals = royalty::parse_deals(deals_once, &revenues);
    CHECK(deals.size() == 50);

    // manifest written next to the outputs
    const auto manifest = nlohmann::json::parse(slurp(dir / "deals.csv.manifest.json"));
    CHECK(manifest["command"] == "synth");
    CHECK(manifest["arguments"]["seed"] == 9);

    SECTION("usage errors") {
        CHECK(run_cli(dir, "synth --theta theta.json --n 0").exit_code == 64);
        CHECK(run_cli(dir, "bogus").exit_code == 64);
    }
}

TEST_CASE("cli calibrate fits nested models with non-increasing mse") {
    const auto dir = scratch_dir("calibrate");
    write(dir / "theta.json", kTheta3);
    REQUIRE(run_cli(dir, "synth --theta theta.json --n 300 --noise 0.4 --seed 4 "
                         "--out-deals deals.csv --out-revenues revenues.csv")
                .exit_code == 0);

    double prev_mse = 1e18;
    for (int model = 1; model <= 3; ++model) {
        const auto result = run_cli(dir, "calibrate --model " + std::to_string(model) +
                                             " --deals deals.csv");
        REQUIRE(result.exit_code == 0);  // converged
        const std::string report =
            slurp(dir / ("model" + std::to_string(model) + "_report.csv"));
        // model,mse,... on the data row
        const auto line_start = report.find('\n') + 1;
        const auto fields_str = report.substr(line_start);
        const auto first_comma = fields_str.find(',');
        const auto second_comma = fields_str.find(',', first_comma + 1);
        const double mse_value = std::stod(
            fields_str.substr(first_comma + 1, second_comma - first_comma - 1));
        CHECK(mse_value <= prev_mse + 1e-9);
        prev_mse = mse_value;
    }

    SECTION("noiseless data reaches the oracle floor") {
        REQUIRE(run_cli(dir, "synth --theta theta.json --n 200 --noise 0 --seed 5 "
                             "--out-deals clean.csv --out-revenues clean_rev.csv")
                    .exit_code == 0);
        const auto result =
            run_cli(dir, "calibrate --model 3 --deals clean.csv --out fit.json");
        REQUIRE(result.exit_code == 0);
        const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
        CHECK_THAT(fit["r"].get<double>(), WithinAbs(0.083, 1e-3));
        CHECK_THAT(fit["a"].get<double>(), WithinAbs(0.61, 1e-3));
        CHECK_THAT(fit["k"].get<double>(), WithinAbs(0.058, 1e-3));
        CHECK_THAT(fit["b"].get<double>(), WithinAbs(0.0098, 1e-3));

        const std::string report = slurp(dir / "model3_report.csv");
        const auto row = royalty::detail::split_fields(
            royalty::detail::split_lines(report).at(1));
        CHECK(std::stod(row.at(1)) <= 1e-10);  // mse column at the oracle floor
        CHECK(row.at(7) == "true");            // converged
    }
    SECTION("model out of range is a usage error") {
        CHECK(run_cli(dir, "calibrate --model 4 --deals deals.csv").exit_code == 64);
    }
    SECTION("starved iteration budget exits 2 with best-so-far params") {
        const auto result = run_cli(
            dir, "calibrate --model 2 --deals deals.csv --max-iterations 1 --out starved.json");
        CHECK(result.exit_code == 2);
        CHECK(fs::exists(dir / "starved.json"));  // best-so-far theta still written
    }
    SECTION("re-running calibrate reproduces outputs byte for byte") {
        const std::string args = "calibrate --model 3 --deals deals.csv --out rerun.json "
                                 "--report rerun.csv";
        REQUIRE(run_cli(dir, args).exit_code == 0);
        const std::string params_once = slurp(dir / "rerun.json");
        const std::string report_once = slurp(dir / "rerun.csv");
        REQUIRE(run_cli(dir, args).exit_code == 0);
        CHECK(slurp(dir / "rerun.json") == params_once);
        CHECK(slurp(dir / "rerun.csv") == report_once);
    }
    SECTION("unparseable deals file is an input error") {
        write(dir / "bad.csv", "asset_id,trade_date,price,ltm,lty,age_years,term\nX,nope\n");
        const auto result = run_cli(dir, "calibrate --model 1 --deals bad.csv");
        CHECK(result.exit_code == 1);
        CHECK_THAT(result.output, ContainsSubstring("line 2"));
    }
}

TEST_CASE("cli price") {
    const auto dir = scratch_dir("price");
    write(dir / "theta.json", kTheta3);

    const auto result = run_cli(
        dir, "price --params theta.json --ltm 100000 --lty 100000 --age 20 --term LOR");
    REQUIRE(result.exit_code == 0);
    const auto valuation = nlohmann::json::parse(result.output);
    CHECK_THAT(valuation["multiplier"].get<double>(), WithinAbs(9.711, 1e-3));
    CHECK_THAT(valuation["price"].get<double>(), WithinAbs(971'084.0, 50.0));
    CHECK(valuation["horizon_years"].is_null());  // life of rights

    SECTION("model 2 at ratio 1 prints the base rate") {
        write(dir / "theta2.json", R"({"model":2,"r":0.076,"a":0.69,"k":0.071})");
        const auto r2 = run_cli(
            dir, "price --params theta2.json --ltm 50000 --lty 50000 --age 3 --term 10Y");
        REQUIRE(r2.exit_code == 0);
        const auto v2 = nlohmann::json::parse(r2.output);
        CHECK(v2["discount_rate"].get<double>() == 0.076);
    }
    SECTION("zero rate on a 10Y term multiplies cashflows by the horizon") {
        write(dir / "theta0.json", R"({"model":1,"r":0.0})");
        const auto r0 = run_cli(
            dir, "price --params theta0.json --ltm 100000 --lty 80000 --age 1 --term 10Y");
        REQUIRE(r0.exit_code == 0);
        CHECK(nlohmann::json::parse(r0.output)["multiplier"].get<double>() == 10.0);
    }
    SECTION("divergent perpetuity exits 3") {
        write(dir / "theta0.json", R"({"model":1,"r":0.0})");
        const auto bad = run_cli(
            dir, "price --params theta0.json --ltm 100000 --lty 80000 --age 1 --term LOR");
        CHECK(bad.exit_code == 3);
        CHECK_THAT(bad.output, ContainsSubstring("perpetuity"));
    }
}

TEST_CASE("cli curves") {
    const auto dir = scratch_dir("curves");
    write(dir / "theta.json", kTheta3);

    SECTION("ratio sweep to stdout peaks at 1") {
        const auto result = run_cli(
            dir, "curves --params theta.json --term LOR --sweep ratio --range 0.5:1.5:0.01");
        REQUIRE(result.exit_code == 0);
        CHECK_THAT(result.output, ContainsSubstring("x,multiplier"));
    }
    SECTION("age sweep to a file is strictly increasing") {
        const auto result = run_cli(dir, "curves --params theta.json --term LOR --sweep age "
                                         "--range 0:40:1 --out ages.csv");
        REQUIRE(result.exit_code == 0);
        const auto lines = royalty::detail::split_lines(slurp(dir / "ages.csv"));
        REQUIRE(lines.size() == 42);  // header + 41 grid points
        double prev = 0.0;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto fields = royalty::detail::split_fields(lines[i]);
            const double m = std::stod(fields[1]);
            CHECK(m > prev);
            prev = m;
        }
    }
    SECTION("inverted range is a usage error") {
        CHECK(run_cli(dir, "curves --params theta.json --term LOR --sweep ratio "
                           "--range 1.5:0.5:0.01")
                  .exit_code == 64);
    }
}

TEST_CASE("cli backtest") {
    const auto dir = scratch_dir("backtest");
    write(dir / "theta.json", kTheta3);
    REQUIRE(run_cli(dir, "synth --theta theta.json --n 120 --noise 0.2 --seed 12 "
                         "--out-deals deals.csv --out-revenues revenues.csv")
                .exit_code == 0);

    SECTION("one-year run writes per-term summaries and a skip report") {
        const auto result =
            run_cli(dir, "backtest --params theta.json --deals deals.csv "
                         "--revenues revenues.csv --entry-year 2019 --horizon 1y --out bt");
        REQUIRE(result.exit_code == 0);
        CHECK(fs::exists(dir / "bt_LOR.csv"));
        CHECK(fs::exists(dir / "bt_10Y.csv"));
        CHECK(fs::exists(dir / "bt_30Y.csv"));
        CHECK(fs::exists(dir / "bt_skipped.csv"));
        CHECK(fs::exists(dir / "bt.manifest.json"));
        CHECK_THAT(slurp(dir / "bt_LOR.csv"), ContainsSubstring("r_median"));
    }
    SECTION("zero costs zero out the f column") {
        write(dir / "nocosts.json", R"({"buyer_fee":0,"seller_commission":0})");
        const auto result = run_cli(
            dir, "backtest --params theta.json --deals deals.csv --revenues revenues.csv "
                 "--entry-year 2019 --horizon 1y --costs nocosts.json --out nb");
        REQUIRE(result.exit_code == 0);
        const auto lines = royalty::detail::split_lines(slurp(dir / "nb_LOR.csv"));
        for (const auto& line : lines) {
            if (line.starts_with("f_")) {
                const auto fields = royalty::detail::split_fields(line);
                CHECK(std::stod(fields[1]) == 0.0);
            }
        }
    }
    SECTION("five-year run against the bundled benchmark") {
        const auto result = run_cli(
            dir, "backtest --params theta.json --deals deals.csv --revenues revenues.csv "
                 "--entry-year 2018 --horizon 5y --benchmark " ROYALTY_DATA_DIR
                 "/sp500_benchmark.csv --out b5");
        REQUIRE(result.exit_code == 0);
        const std::string cmp = slurp(dir / "b5_LOR_benchmark.csv");
        CHECK_THAT(cmp, ContainsSubstring("median,total_5yr"));
        CHECK_THAT(cmp, ContainsSubstring("median,annualized_5yr"));
    }
    SECTION("empty cohort exits 4") {
        const auto result =
            run_cli(dir, "backtest --params theta.json --deals deals.csv "
                         "--revenues revenues.csv --entry-year 1999 --horizon 1y --out no");
        CHECK(result.exit_code == 4);
    }
}
