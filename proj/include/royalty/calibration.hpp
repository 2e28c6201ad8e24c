// SPDX-License-Identifier: Apache-2.0
//
// Least-squares calibration of ModelParams to observed deal multipliers:
//
//   minimize over theta   mean_i ( multiplier_traded_i - multiplier_i(theta) )^2
//
// Each deal is priced at its own term horizon, so mixed 10Y/30Y/LOR sets
// calibrate jointly to a single theta.
//
// The solver is a deterministic Nelder-Mead simplex with box constraints
// applied by coordinate clamping, restarted until the objective stops
// improving. Richer models are additionally seeded with the embedding of the
// simpler model's solution (a=1, k=0 / b=0), which makes the fitted MSE
// non-increasing in the model index.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "royalty/data_model.hpp"
#include "royalty/errors.hpp"
#include "royalty/pricing.hpp"

namespace royalty {

/// Closed per-parameter search intervals. Defaults bracket plausible fits
/// with wide margins while keeping every candidate priceable (r > 0 rules
/// out divergent perpetuities).
struct ParamBounds {
    std::pair<double, double> r{0.005, 0.60};
    std::pair<double, double> a{0.05, 2.0};
    std::pair<double, double> k{0.0, 1.0};
    std::pair<double, double> b{0.0, 0.10};

    void validate(int model) const {
        auto check = [](const std::pair<double, double>& iv, double min_lo, const char* name) {
            if (!(iv.first >= min_lo) || !(iv.second > iv.first)) {
                throw ParseError(std::string("infeasible bounds for ") + name);
            }
        };
        check(r, std::nextafter(0.0, 1.0), "r");
        if (model >= 2) {
            check(a, std::nextafter(0.0, 1.0), "a");
            check(k, 0.0, "k");
        }
        if (model >= 3) check(b, 0.0, "b");
    }
};

struct CalibrationConfig {
    int model = 3;
    ParamBounds bounds;
    std::optional<ModelParams> initial_guess;
    double objective_tolerance = 1e-10;
    int max_iterations = 10000;  // simplex iterations per start point

    void validate() const {
        if (model < 1 || model > 3) throw ParseError("model must be 1, 2 or 3");
        bounds.validate(model);
        if (!(objective_tolerance > 0.0)) throw ParseError("objective_tolerance must be > 0");
        if (max_iterations < 1) throw ParseError("max_iterations must be >= 1");
        if (initial_guess && initial_guess->model != model) {
            throw ParseError("initial_guess model does not match config model");
        }
    }
};

struct CalibrationResult {
    ModelParams params;
    double mse = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residuals;
};

/// Per-deal multiplier errors: traded multiplier minus model multiplier at
/// the deal's own features and term horizon. Propagates PricingError for
/// infeasible parameters; calibrate() treats those candidates as infeasible
/// rather than failing.
inline std::vector<double> residuals(const ModelParams& params,
                                     const std::vector<DealRecord>& deals) {
    std::vector<double> out;
    out.reserve(deals.size());
    for (const auto& deal : deals) {
        out.push_back(deal.multiplier - multiplier(params, deal.features()));
    }
    return out;
}

/// Mean of squared residuals, accumulated in input order.
inline double mse(const ModelParams& params, const std::vector<DealRecord>& deals) {
    if (deals.empty()) throw ParseError("mse: empty deal list");
    double sum = 0.0;
    for (const auto& deal : deals) {
        const double res = deal.multiplier - multiplier(params, deal.features());
        sum += res * res;
    }
    return sum / static_cast<double>(deals.size());
}

namespace detail {

using Objective = std::function<double(const std::vector<double>&)>;

inline void clamp_into(std::vector<double>& x, const std::vector<double>& lo,
                       const std::vector<double>& hi) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

struct SimplexOutcome {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

/// One Nelder-Mead run from `x0`. Every candidate is clamped into the box
/// before evaluation. Stops when the simplex objective spread falls below
/// `ftol`, the simplex collapses, or the iteration budget runs out.
inline SimplexOutcome nelder_mead(const Objective& fn, std::vector<double> x0,
                                  const std::vector<double>& lo, const std::vector<double>& hi,
                                  int max_iter, double ftol) {
    const std::size_t n = x0.size();
    clamp_into(x0, lo, hi);

    std::vector<std::vector<double>> pts;
    std::vector<double> fv;
    pts.push_back(x0);
    fv.push_back(fn(x0));
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> p = x0;
        double h = 0.05 * (hi[j] - lo[j]);
        if (p[j] + h > hi[j]) h = -h;
        p[j] += h;
        clamp_into(p, lo, hi);
        pts.push_back(p);
        fv.push_back(fn(p));
    }

    auto order = [&] {
        std::vector<std::size_t> idx(pts.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> np;
        std::vector<double> nf;
        for (std::size_t i : idx) {
            np.push_back(pts[i]);
            nf.push_back(fv[i]);
        }
        pts = std::move(np);
        fv = std::move(nf);
    };
    order();

    SimplexOutcome out;
    int iter = 0;
    while (iter < max_iter) {
        ++iter;
        const std::size_t worst = n;
        if (fv[worst] - fv[0] <= ftol) break;

        // Centroid of all points but the worst.
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coeff) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = centroid[j] + coeff * (pts[worst][j] - centroid[j]);
            }
            clamp_into(p, lo, hi);
            return p;
        };

        const auto reflected = blend(-1.0);
        const double fr = fn(reflected);
        if (fr < fv[0]) {
            const auto expanded = blend(-2.0);
            const double fe = fn(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                fv[worst] = fe;
            } else {
                pts[worst] = reflected;
                fv[worst] = fr;
            }
        } else if (fr < fv[n - 1]) {  // better than second-worst: accept reflection
            pts[worst] = reflected;
            fv[worst] = fr;
        } else {
            const auto contracted = blend(fr < fv[worst] ? -0.5 : 0.5);
            const double fc = fn(contracted);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = contracted;
                fv[worst] = fc;
            } else {
                // Shrink toward the best point.
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    }
                    clamp_into(pts[i], lo, hi);
                    fv[i] = fn(pts[i]);
                }
            }
        }
        order();

        // Degenerate simplex: no direction left to probe.
        double diameter = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                diameter = std::max(diameter, std::abs(pts[i][j] - pts[0][j]));
            }
        }
        if (diameter < 1e-14) break;
    }

    out.x = pts[0];
    out.f = fv[0];
    out.iterations = iter;
    return out;
}

/// Restarted descent from one start point. An outer iteration is a full
/// simplex run; convergence is declared when the improvement between outer
/// iterations drops below `ftol`.
inline SimplexOutcome restarted_descent(const Objective& fn, std::vector<double> start,
                                        const std::vector<double>& lo,
                                        const std::vector<double>& hi, int max_iter,
                                        double ftol, bool& converged) {
    clamp_into(start, lo, hi);
    SimplexOutcome best;
    best.x = start;
    best.f = fn(start);
    converged = false;

    int budget = max_iter;
    while (budget > 0) {
        SimplexOutcome run = nelder_mead(fn, best.x, lo, hi, budget, ftol);
        budget -= run.iterations;
        best.iterations += run.iterations;
        const double improvement = best.f - run.f;
        if (run.f < best.f) {
            best.x = run.x;
            best.f = run.f;
        }
        if (improvement <= ftol) {
            converged = true;
            break;
        }
    }
    return best;
}

inline std::vector<double> pack(const ModelParams& p) {
    if (p.model == 1) return {p.r};
    if (p.model == 2) return {p.r, p.a, p.k};
    return {p.r, p.a, p.k, p.b};
}

inline ModelParams unpack(int model, const std::vector<double>& x) {
    if (model == 1) return ModelParams::model1(x[0]);
    if (model == 2) return ModelParams::model2(x[0], x[1], x[2]);
    return ModelParams::model3(x[0], x[1], x[2], x[3]);
}

inline void bounds_vectors(const ParamBounds& b, int model, std::vector<double>& lo,
                           std::vector<double>& hi) {
    lo = {b.r.first};
    hi = {b.r.second};
    if (model >= 2) {
        lo.insert(lo.end(), {b.a.first, b.k.first});
        hi.insert(hi.end(), {b.a.second, b.k.second});
    }
    if (model >= 3) {
        lo.push_back(b.b.first);
        hi.push_back(b.b.second);
    }
}

}  // namespace detail

/// Fits the configured model to the deals. Deterministic: identical inputs
/// and config produce bit-identical results. Non-convergence within the
/// iteration budget is reported via `converged = false`, not an exception.
inline CalibrationResult calibrate(const std::vector<DealRecord>& deals,
                                   const CalibrationConfig& config) {
    config.validate();
    if (static_cast<int>(deals.size()) < ModelParams{config.model}.dimension()) {
        throw ParseError("calibrate: need at least one deal per free parameter");
    }

    std::vector<double> lo, hi;
    detail::bounds_vectors(config.bounds, config.model, lo, hi);

    const detail::Objective objective = [&](const std::vector<double>& x) {
        try {
            return mse(detail::unpack(config.model, x), deals);
        } catch (const PricingError&) {
            return std::numeric_limits<double>::infinity();  // infeasible candidate
        }
    };

    // Start points: caller's guess, the bounds midpoint, and the embedded
    // solution of the next-simpler model.
    std::vector<std::vector<double>> starts;
    if (config.initial_guess) starts.push_back(detail::pack(*config.initial_guess));
    std::vector<double> midpoint(lo.size());
    for (std::size_t j = 0; j < lo.size(); ++j) midpoint[j] = 0.5 * (lo[j] + hi[j]);
    starts.push_back(std::move(midpoint));

    int embedded_iterations = 0;
    if (config.model > 1) {
        CalibrationConfig simpler = config;
        simpler.model = config.model - 1;
        simpler.initial_guess.reset();
        const CalibrationResult inner = calibrate(deals, simpler);
        embedded_iterations = inner.iterations;
        ModelParams seed = inner.params;
        seed.model = config.model;  // a/k/b already carry the fixed embeddings
        starts.push_back(detail::pack(seed));
    }

    CalibrationResult result;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    bool best_converged = false;
    int total_iterations = embedded_iterations;
    for (const auto& start : starts) {
        bool converged = false;
        const detail::SimplexOutcome run = detail::restarted_descent(
            objective, start, lo, hi, config.max_iterations, config.objective_tolerance,
            converged);
        total_iterations += run.iterations;
        if (best_x.empty() || run.f < best_f) {
            best_f = run.f;
            best_x = run.x;
            best_converged = converged;
        }
    }

    result.params = detail::unpack(config.model, best_x);
    result.mse = best_f;
    result.iterations = total_iterations;
    result.converged = best_converged;
    result.residuals = residuals(result.params, deals);
    return result;
}

/// One row of the calibration report CSV. Parameters a lower model does not
/// fit are left blank, matching the usual presentation of nested fits.
inline std::string calibration_report_csv(const std::vector<CalibrationResult>& results) {
    std::string out = "model,mse,r,a,k,b,iterations,converged\n";
    for (const auto& res : results) {
        const auto& p = res.params;
        out += std::to_string(p.model);
        out += ',';
        out += detail::format_number(res.mse);
        out += ',';
        out += detail::format_number(p.r);
        out += ',';
        out += p.model >= 2 ? detail::format_number(p.a) : "";
        out += ',';
        out += p.model >= 2 ? detail::format_number(p.k) : "";
        out += ',';
        out += p.model >= 3 ? detail::format_number(p.b) : "";
        out += ',';
        out += std::to_string(res.iterations);
        out += ',';
        out += res.converged ? "true" : "false";
        out += '\n';
    }
    return out;
}

}  // namespace royalty
