#include "mixdyn/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mixdyn/analytic.hpp"
#include "mixdyn/math/optim.hpp"
#include "mixdyn/math/rng.hpp"

namespace mixdyn {

namespace {

constexpr double kRhoBox = 0.998;   // scan box, inside the 0.999 spec cap
constexpr double kRhoCap = 0.999;

struct VolCurve {
    std::vector<double> vols;
    std::vector<double> price_se;  // zero for the semi-analytic engine
};

// Model implied vols at the quote strikes, inverted against the quote set's
// own forward and discount factor so model and market vols are comparable.
class CurveEngine {
public:
    CurveEngine(const ShiftedMixtureParams& a1, const ShiftedMixtureParams& a2,
                const QuoteSet& quotes, CorrelationEngine engine,
                const CorrelationCalibrationConfig& cfg)
        : a1_(a1), a2_(a2), quotes_(quotes), engine_(engine), cfg_(cfg) {}

    VolCurve evaluate(const CorrelationSpec& spec) const {
        CrossModel model =
            quanto_adjust(make_cross_model(a1_, a2_, spec, cfg_.rates));
        VolCurve curve;
        curve.vols.reserve(quotes_.quotes.size());
        curve.price_se.assign(quotes_.quotes.size(), 0.0);

        if (engine_ == CorrelationEngine::mvmd_semianalytic) {
            for (const VolQuote& q : quotes_.quotes) {
                const OptionType side = otm_side(q.strike);
                CrossPricingRequest req;
                req.model = model;
                req.strikes = {q.strike};
                req.maturity = quotes_.maturity;
                req.discount_factor = quotes_.discount_factor;
                req.type = side;
                req.quad_nodes = cfg_.quad_nodes;
                const double price = price_cross_option(req)[0];
                curve.vols.push_back(implied_vol(price, quotes_.forward,
                                                 q.strike, quotes_.maturity,
                                                 quotes_.discount_factor, side));
            }
            return curve;
        }

        // Common random numbers: the same seed for every rho trial keeps the
        // Monte Carlo objective smooth in rho.
        SimulationConfig sim = cfg_.sim;
        sim.scheme = Scheme::scmd_euler;
        const SimulationResult res =
            simulate_scmd(model, quotes_.maturity, sim);
        for (std::size_t i = 0; i < quotes_.quotes.size(); ++i) {
            const VolQuote& q = quotes_.quotes[i];
            const OptionType side = otm_side(q.strike);
            const McEstimate est =
                mc_price_cross(res, {q.strike}, quotes_.discount_factor,
                               side)[0];
            curve.vols.push_back(implied_vol(est.value, quotes_.forward,
                                             q.strike, quotes_.maturity,
                                             quotes_.discount_factor, side));
            curve.price_se[i] = est.std_error;
        }
        return curve;
    }

    OptionType otm_side(double strike) const {
        return (strike >= quotes_.forward) ? OptionType::call : OptionType::put;
    }

private:
    const ShiftedMixtureParams& a1_;
    const ShiftedMixtureParams& a2_;
    const QuoteSet& quotes_;
    CorrelationEngine engine_;
    const CorrelationCalibrationConfig& cfg_;
};

struct ObjectiveValue {
    double value = 0.0;
    double noise = 0.0;  // first-order objective uncertainty from price SEs
};

ObjectiveValue objective_from_curve(const QuoteSet& quotes,
                                    const VolCurve& curve) {
    ObjectiveValue out;
    const double sqrt_t = std::sqrt(quotes.maturity);
    for (std::size_t i = 0; i < quotes.quotes.size(); ++i) {
        const VolQuote& q = quotes.quotes[i];
        const double rel = (curve.vols[i] - q.implied_vol) / q.implied_vol;
        out.value += q.weight * rel * rel;
        if (curve.price_se[i] > 0.0) {
            const double vega = quotes.discount_factor *
                                bs_vega_term(quotes.forward, q.strike,
                                             q.implied_vol * sqrt_t) *
                                sqrt_t;
            const double dvol =
                curve.price_se[i] / std::max(vega, 1e-12);
            out.noise += q.weight *
                         (2.0 * std::abs(rel) * dvol / q.implied_vol +
                          (dvol / q.implied_vol) * (dvol / q.implied_vol));
        }
    }
    return out;
}

std::vector<CorrelationFitRow> fit_rows(const QuoteSet& quotes,
                                        const VolCurve& curve) {
    std::vector<CorrelationFitRow> rows;
    const double sqrt_t = std::sqrt(quotes.maturity);
    for (std::size_t i = 0; i < quotes.quotes.size(); ++i) {
        const VolQuote& q = quotes.quotes[i];
        CorrelationFitRow row;
        row.strike = q.strike;
        row.market_vol = q.implied_vol;
        row.model_vol = curve.vols[i];
        row.abs_vol_diff = std::abs(row.model_vol - row.market_vol);
        const OptionType side =
            (q.strike >= quotes.forward) ? OptionType::call : OptionType::put;
        const double market_price =
            bs_price(quotes.forward, q.strike, q.implied_vol * sqrt_t,
                     quotes.discount_factor, side);
        const double model_price =
            bs_price(quotes.forward, q.strike, curve.vols[i] * sqrt_t,
                     quotes.discount_factor, side);
        row.abs_price_diff = std::abs(model_price - market_price);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

void QuoteSet::validate() const {
    if (quotes.empty()) throw invalid_input_error("quote set: no quotes");
    if (!(forward > 0.0))
        throw invalid_input_error("quote set: forward must be > 0");
    if (!(discount_factor > 0.0) || discount_factor > 1.0)
        throw invalid_input_error("quote set: discount factor not in (0,1]");
    if (!(maturity > 0.0))
        throw invalid_input_error("quote set: maturity must be > 0");
    for (const VolQuote& q : quotes)
        if (!(q.strike > 0.0) || !(q.implied_vol > 0.0) || q.weight < 0.0)
            throw invalid_input_error("quote set: invalid quote");
}

std::string to_string(CorrelationEngine engine) {
    return engine == CorrelationEngine::mvmd_semianalytic ? "mvmd-semianalytic"
                                                          : "scmd-montecarlo";
}

CorrelationEngine correlation_engine_from_string(const std::string& name) {
    if (name == "mvmd-semianalytic") return CorrelationEngine::mvmd_semianalytic;
    if (name == "scmd-montecarlo") return CorrelationEngine::scmd_montecarlo;
    throw invalid_input_error("unknown correlation engine: " + name);
}

CorrelationFitReport calibrate_implied_correlation(
    const ShiftedMixtureParams& asset1, const ShiftedMixtureParams& asset2,
    const QuoteSet& cross_quotes, CorrelationEngine engine,
    const CorrelationCalibrationConfig& config) {
    cross_quotes.validate();
    const CurveEngine curves(asset1, asset2, cross_quotes, engine, config);

    std::map<double, ObjectiveValue> cache;
    int evaluations = 0;
    auto objective = [&](double rho) {
        auto it = cache.find(rho);
        if (it == cache.end()) {
            ++evaluations;
            it = cache
                     .emplace(rho, objective_from_curve(
                                       cross_quotes,
                                       curves.evaluate(
                                           CorrelationSpec::constant(rho))))
                     .first;
        }
        return it->second.value;
    };

    const int n_scan = std::max(config.scan_points, 3);
    std::vector<double> grid(n_scan);
    int best = 0;
    for (int i = 0; i < n_scan; ++i) {
        grid[i] = -kRhoBox + 2.0 * kRhoBox * i / (n_scan - 1);
        if (objective(grid[i]) < objective(grid[best])) best = i;
    }

    if (engine == CorrelationEngine::scmd_montecarlo) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo,
               noise = 0.0;
        for (double rho : grid) {
            const ObjectiveValue& v = cache.at(rho);
            lo = std::min(lo, v.value);
            hi = std::max(hi, v.value);
            noise = std::max(noise, v.noise);
        }
        if (hi - lo < 3.0 * noise)
            throw noisy_objective_error(
                "calibrate_implied_correlation: Monte Carlo noise dominates "
                "the objective variation; increase paths or fix vols");
    }

    CorrelationFitReport report;
    double fitted_rho;
    if (best == 0 || best == n_scan - 1) {
        report.boundary_solution = true;
        fitted_rho = grid[best];
        report.converged = true;
    } else {
        const ScalarMinimum min =
            brent_minimize(objective, grid[best - 1], grid[best + 1],
                           config.rho_tolerance);
        fitted_rho = min.x;
        report.converged = min.converged;
        report.iterations = min.iterations;
    }
    report.iterations += evaluations;

    report.fitted = CorrelationSpec::constant(fitted_rho);
    const VolCurve final_curve = curves.evaluate(report.fitted);
    report.objective_value =
        objective_from_curve(cross_quotes, final_curve).value;
    report.per_strike = fit_rows(cross_quotes, final_curve);
    report.stats = scenario_correlation_stats(report.fitted, asset1.weights,
                                              asset2.weights);
    return report;
}

CorrelationFitReport calibrate_random_correlation(
    const ShiftedMixtureParams& asset1, const ShiftedMixtureParams& asset2,
    const QuoteSet& cross_quotes,
    const CorrelationCalibrationConfig& config) {
    cross_quotes.validate();
    const int n1 = asset1.n_components();
    const int n2 = asset2.n_components();
    const int dim = n1 * n2;
    const CurveEngine curves(asset1, asset2, cross_quotes,
                             CorrelationEngine::mvmd_semianalytic, config);

    auto decode = [&](const Eigen::VectorXd& u) {
        Eigen::MatrixXd rho(n1, n2);
        for (int h = 0; h < n1; ++h)
            for (int k = 0; k < n2; ++k)
                rho(h, k) = kRhoCap * std::tanh(u[h * n2 + k]);
        return CorrelationSpec::scenario(rho);
    };

    int evaluations = 0;
    auto objective = [&](const Eigen::VectorXd& u) {
        ++evaluations;
        return objective_from_curve(cross_quotes,
                                    curves.evaluate(decode(u)))
            .value;
    };

    // Seed the search at the scalar fit.
    CorrelationCalibrationConfig scalar_cfg = config;
    const CorrelationFitReport scalar_fit = calibrate_implied_correlation(
        asset1, asset2, cross_quotes, CorrelationEngine::mvmd_semianalytic,
        scalar_cfg);
    const double rho0 =
        std::clamp(scalar_fit.fitted.constant_rho, -0.99, 0.99);
    const double u0 = std::atanh(rho0 / kRhoCap);

    Eigen::VectorXd best_u;
    double best_value = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    const Eigen::VectorXd step = Eigen::VectorXd::Constant(dim, 0.35);

    for (int s = 0; s < std::max(config.matrix_starts, 1); ++s) {
        Eigen::VectorXd u = Eigen::VectorXd::Constant(dim, u0);
        if (s > 0) {
            PathRng rng(mix_seed(config.seed, 7), static_cast<std::uint64_t>(s));
            for (int i = 0; i < dim; ++i) u[i] = u0 + 0.8 * rng.normal();
        }
        SimplexResult result = nelder_mead(objective, u, step,
                                           config.matrix_tolerance,
                                           config.matrix_max_iterations);
        const SimplexResult polished =
            nelder_mead(objective, result.x, 0.1 * step,
                        config.matrix_tolerance, config.matrix_max_iterations);
        if (polished.value < result.value) result = polished;
        any_converged = any_converged || result.converged;
        if (result.value < best_value) {
            best_value = result.value;
            best_u = result.x;
        }
    }

    CorrelationFitReport report;
    report.fitted = decode(best_u);
    report.objective_value = best_value;
    report.iterations = evaluations;
    report.converged = any_converged;
    report.identifiability_warning =
        static_cast<int>(cross_quotes.quotes.size()) < dim;
    const VolCurve final_curve = curves.evaluate(report.fitted);
    report.per_strike = fit_rows(cross_quotes, final_curve);
    report.stats = scenario_correlation_stats(report.fitted, asset1.weights,
                                              asset2.weights);
    return report;
}

ExtrapolatedSmile extrapolate_cross_smile(
    const ShiftedMixtureParams& asset1, const ShiftedMixtureParams& asset2,
    const CorrelationSpec& corr, const std::vector<double>& strikes,
    double maturity, double discount_factor, const CrossRates& rates,
    int quad_nodes) {
    const CrossModel model =
        quanto_adjust(make_cross_model(asset1, asset2, corr, rates));
    CrossPricingRequest req;
    req.model = model;
    req.strikes = strikes;
    req.maturity = maturity;
    req.discount_factor = discount_factor;
    req.quad_nodes = quad_nodes;

    ExtrapolatedSmile out;
    out.strikes = strikes;
    out.forward = cross_forward(model, maturity);
    out.prices = price_cross_option(req);
    out.implied_vols = cross_implied_vol_curve(req);
    return out;
}

}  // namespace mixdyn
