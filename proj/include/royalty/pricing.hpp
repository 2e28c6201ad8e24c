// SPDX-License-Identifier: Apache-2.0
//
// Discounted-cashflow pricing of royalty assets. Three nested models map
// trailing revenue features to a price-to-LTM multiplier:
//
//   model 1: C = LTM,                R = r
//   model 2: C = LTM*a,              R = r + k*|LTM/LTY - 1|
//   model 3: C = LTM*(a + b*age),    R = r + k*|LTM/LTY - 1|
//
// with price = sum_{i=1..n} C / (1+R)^i over the contract horizon n, so
// multiplier = (C/LTM) * annuity_factor(R, n). Life-of-rights contracts are
// priced as the n -> infinity limit (perpetuity C/R), which requires R > 0.
// Discounting is annual with end-of-year cashflows.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "royalty/data_model.hpp"
#include "royalty/errors.hpp"

namespace royalty {

/// Parameter set for one of the three pricing models. Lower models keep the
/// unused parameters at their fixed embeddings (a=1, k=0, b=0), so model 2
/// with (a=1, k=0) reproduces model 1 and model 3 with b=0 reproduces
/// model 2 exactly.
struct ModelParams {
    int model = 1;   // 1 | 2 | 3
    double r = 0.0;  // base discount rate, per year
    double a = 1.0;  // stabilized cashflow level (models 2-3)
    double k = 0.0;  // discount-rate penalty per unit |ratio - 1| (models 2-3)
    double b = 0.0;  // cashflow premium per year of catalog age (model 3)

    static ModelParams model1(double r) { return ModelParams{1, r, 1.0, 0.0, 0.0}; }
    static ModelParams model2(double r, double a, double k) {
        return ModelParams{2, r, a, k, 0.0};
    }
    static ModelParams model3(double r, double a, double k, double b) {
        return ModelParams{3, r, a, k, b};
    }

    /// Number of free parameters.
    int dimension() const { return model == 1 ? 1 : model == 2 ? 3 : 4; }

    /// Full invariant check, used wherever parameters act as a trusted
    /// calibration target. Pricing itself only guards the expressions it
    /// evaluates, so out-of-range files fail at the point of use.
    void validate() const {
        if (model < 1 || model > 3) throw ParseError("model must be 1, 2 or 3");
        if (!(r > 0.0) || !std::isfinite(r)) throw ParseError("r must be > 0");
        if (!(a > 0.0) || !std::isfinite(a)) throw ParseError("a must be > 0");
        if (!(k >= 0.0) || !std::isfinite(k)) throw ParseError("k must be >= 0");
        if (!(b >= 0.0) || !std::isfinite(b)) throw ParseError("b must be >= 0");
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"model", model}, {"r", r}};
        if (model >= 2) {
            j["a"] = a;
            j["k"] = k;
        }
        if (model >= 3) j["b"] = b;
        return j;
    }

    /// Absent fields take the fixed embedding values. Structural problems
    /// (wrong types, unknown keys, negative k/b) are rejected here; r and a
    /// ranges are enforced by the pricing guards instead so that infeasible
    /// parameter files surface as pricing errors.
    static ModelParams from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw ParseError("params: expected a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (key != "model" && key != "r" && key != "a" && key != "k" && key != "b") {
                throw ParseError("params: unknown key '" + key + "'");
            }
            if (key == "model" ? !value.is_number_integer() : !value.is_number()) {
                throw ParseError("params: bad value for '" + key + "'");
            }
        }
        if (!j.contains("model") || !j.contains("r")) {
            throw ParseError("params: 'model' and 'r' are required");
        }
        ModelParams p;
        p.model = j["model"].get<int>();
        if (p.model < 1 || p.model > 3) throw ParseError("params: model must be 1, 2 or 3");
        p.r = j["r"].get<double>();
        p.a = j.value("a", 1.0);
        p.k = j.value("k", 0.0);
        p.b = j.value("b", 0.0);
        if (!std::isfinite(p.r) || !std::isfinite(p.a) || !std::isfinite(p.k) ||
            !std::isfinite(p.b)) {
            throw ParseError("params: values must be finite");
        }
        if (p.k < 0.0) throw ParseError("params: k must be >= 0");
        if (p.b < 0.0) throw ParseError("params: b must be >= 0");
        return p;
    }
};

/// Risk-adjusted discount rate: r for model 1, r + k*|ratio - 1| otherwise.
inline double discount_rate(const ModelParams& params, double ratio) {
    if (!(ratio > 0.0)) throw ParseError("ratio must be > 0");
    if (params.model == 1) return params.r;
    return params.r + params.k * std::abs(ratio - 1.0);
}

/// Expected yearly cashflow per unit of LTM: 1, a, or a + b*age.
inline double cashflow_ratio(const ModelParams& params, double age_years) {
    const double ratio = params.model == 1   ? 1.0
                         : params.model == 2 ? params.a
                                             : params.a + params.b * age_years;
    if (!(ratio > 0.0)) {
        throw PricingError("invalid parameters: expected cashflow a + b*age = " +
                           std::to_string(ratio) + " is not positive");
    }
    return ratio;
}

/// Expected yearly cashflow C for the model.
inline double expected_cashflow(const ModelParams& params, double ltm, double age_years) {
    if (!(ltm > 0.0)) throw ParseError("ltm must be > 0");
    return ltm * cashflow_ratio(params, age_years);
}

/// Present value of 1 per year for `horizon` years at rate R:
///   finite n:  sum_{i=1..n} (1+R)^-i = (1 - (1+R)^-n) / R   (= n when R = 0)
///   unbounded: 1 / R, defined only for R > 0.
///
/// Fractional horizons use the same closed form with a real exponent, which
/// is how partially elapsed contracts are valued.
inline double annuity_factor(double rate, double horizon) {
    if (!(rate > -1.0)) throw PricingError("discount rate must be > -1");
    if (std::isinf(horizon)) {
        if (!(rate > 0.0)) {
            throw PricingError("divergent perpetuity: unbounded horizon needs rate > 0, got " +
                               std::to_string(rate));
        }
        return 1.0 / rate;
    }
    if (!(horizon >= 0.0)) throw PricingError("horizon must be >= 0");
    if (rate == 0.0) return horizon;
    // -expm1(-n*log1p(R)) == 1 - (1+R)^-n, accurate for small R.
    return -std::expm1(-horizon * std::log1p(rate)) / rate;
}

/// Model-implied price-to-LTM multiplier at an explicit horizon.
inline double multiplier(const ModelParams& params, const PricingFeatures& features,
                         double horizon) {
    const double cashflow = cashflow_ratio(params, features.age_years);
    const double rate = discount_rate(params, features.ratio);
    return cashflow * annuity_factor(rate, horizon);
}

/// Model-implied multiplier at the contract's full horizon.
inline double multiplier(const ModelParams& params, const PricingFeatures& features) {
    return multiplier(params, features, horizon_years(features.term));
}

/// A fully populated pricing result. price = multiplier * ltm by construction.
struct Valuation {
    double price = 0.0;
    double multiplier = 0.0;
    double discount_rate = 0.0;
    double expected_cashflow = 0.0;
    double horizon = 0.0;  // years; infinity for life-of-rights

    nlohmann::json to_json() const {
        nlohmann::json j{{"price", price},
                         {"multiplier", multiplier},
                         {"discount_rate", discount_rate},
                         {"expected_cashflow", expected_cashflow}};
        j["horizon_years"] = std::isinf(horizon) ? nlohmann::json() : nlohmann::json(horizon);
        return j;
    }
};

inline Valuation price(const ModelParams& params, const PricingFeatures& features,
                       double horizon) {
    Valuation v;
    v.multiplier = multiplier(params, features, horizon);
    v.price = v.multiplier * features.ltm;
    v.discount_rate = discount_rate(params, features.ratio);
    v.expected_cashflow = expected_cashflow(params, features.ltm, features.age_years);
    v.horizon = horizon;
    return v;
}

inline Valuation price(const ModelParams& params, const PricingFeatures& features) {
    return price(params, features, horizon_years(features.term));
}

enum class SweepAxis { ratio, age };

/// Evenly spaced sweep over one feature, holding the other fixed.
struct SweepSpec {
    SweepAxis axis = SweepAxis::ratio;
    double lo = 0.5;
    double hi = 1.5;
    double step = 0.01;
    double fixed_ratio = 1.0;  // used when sweeping age
    double fixed_age = 10.0;   // used when sweeping ratio
};

/// Multiplier curve over the sweep grid: (x, multiplier) pairs. This is the
/// model-implied analogue of the market multiplier-vs-ratio and
/// multiplier-vs-age scatter plots.
inline std::vector<std::pair<double, double>> curve(const ModelParams& params,
                                                    ContractTerm term, const SweepSpec& spec) {
    const bool ratio_axis = spec.axis == SweepAxis::ratio;
    const double min_lo = ratio_axis ? 0.0 : -1e-12;
    if (!(spec.lo > min_lo) || !(spec.hi >= spec.lo) || !(spec.step > 0.0)) {
        throw ParseError("sweep range must be positive and ordered with step > 0");
    }
    const int points = static_cast<int>((spec.hi - spec.lo) / spec.step + 1e-9) + 1;
    std::vector<std::pair<double, double>> result;
    result.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double x = spec.lo + i * spec.step;
        const double ratio = ratio_axis ? x : spec.fixed_ratio;
        const double age = ratio_axis ? spec.fixed_age : x;
        const auto features = PricingFeatures::make(1.0, 1.0 / ratio, age, term);
        result.emplace_back(x, multiplier(params, features));
    }
    return result;
}

inline std::string curve_csv(const std::vector<std::pair<double, double>>& points) {
    std::string out = "x,multiplier\n";
    for (const auto& [x, m] : points) {
        out += detail::format_number(x);
        out += ',';
        out += detail::format_number(m);
        out += '\n';
    }
    return out;
}

}  // namespace royalty
