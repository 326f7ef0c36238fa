#include "mixdyn/smile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixdyn/math/normal.hpp"
#include "mixdyn/math/optim.hpp"
#include "mixdyn/math/rng.hpp"

namespace mixdyn {

namespace {

constexpr double kPenalty = 1e8;

// log of the k-th lognormal density in the shifted coordinate y > 0.
double log_component_density(const ShiftedMixtureParams& p, int k, double t,
                             double y) {
    const double total_stdev = p.term_vols[k] * std::sqrt(t);
    const double z =
        (std::log(y / p.effective_spot()) - p.drift_mu * t +
         0.5 * total_stdev * total_stdev) /
        total_stdev;
    static const double log_sqrt_2pi = 0.9189385332046727417803297;
    return -std::log(y * total_stdev) - log_sqrt_2pi - 0.5 * z * z;
}

}  // namespace

double ShiftedMixtureParams::shift_at(double t) const {
    return shift_beta * std::exp(drift_mu * t);
}

double ShiftedMixtureParams::sigma0() const {
    return std::sqrt(weights.dot(term_vols.cwiseAbs2()));
}

void ShiftedMixtureParams::validate() const {
    const int n = n_components();
    if (n < 1 || term_vols.size() != n)
        throw invalid_input_error("mixture params: weights/vols size mismatch");
    if ((weights.array() < 0.0).any())
        throw invalid_input_error("mixture params: negative weight");
    if (std::abs(weights.sum() - 1.0) > 1e-10)
        throw invalid_input_error("mixture params: weights must sum to 1");
    if ((term_vols.array() <= 0.0).any())
        throw invalid_input_error("mixture params: term vols must be > 0");
    if (!(spot > 0.0)) throw invalid_input_error("mixture params: spot must be > 0");
    if (effective_spot() <= 0.0)
        throw shift_domain_error("mixture params: spot - beta must be > 0");
    if (!(reference_maturity > 0.0))
        throw invalid_input_error("mixture params: reference maturity must be > 0");
    if (!(epsilon_floor > 0.0) || epsilon_floor >= reference_maturity)
        throw invalid_input_error(
            "mixture params: epsilon floor must lie in (0, reference maturity)");
    const double s0sq_eps = sigma0() * sigma0() * epsilon_floor;
    for (int k = 0; k < n; ++k)
        if (term_vols[k] * term_vols[k] * reference_maturity <= s0sq_eps)
            throw invalid_input_error(
                "mixture params: component variance too small for the epsilon "
                "floor regularization");
}

double component_density(const ShiftedMixtureParams& p, int k, double t,
                         double x) {
    if (k < 0 || k >= p.n_components())
        throw invalid_input_error("component_density: index out of range");
    if (t <= 0.0) throw domain_error("component_density: t must be > 0");
    const double y = x - p.shift_at(t);
    if (y <= 0.0) return 0.0;
    return std::exp(log_component_density(p, k, t, y));
}

double mixture_density(const ShiftedMixtureParams& p, double t, double x) {
    if (t <= 0.0) throw domain_error("mixture_density: t must be > 0");
    const double y = x - p.shift_at(t);
    if (y <= 0.0) return 0.0;
    double acc = 0.0;
    for (int k = 0; k < p.n_components(); ++k)
        acc += p.weights[k] * std::exp(log_component_density(p, k, t, y));
    return acc;
}

double local_vol(const ShiftedMixtureParams& p, double t, double x) {
    if (t <= 0.0) throw domain_error("local_vol: t must be > 0");
    const double y = x - p.shift_at(t);
    if (y <= 0.0) throw domain_error("local_vol: state below the shifted support");

    const int n = p.n_components();
    // log-sum-exp so deep wings stay well conditioned.
    Eigen::VectorXd logw(n);
    for (int k = 0; k < n; ++k)
        logw[k] = std::log(p.weights[k] + 1e-300) +
                  log_component_density(p, k, t, y);
    const double top = logw.maxCoeff();
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
        const double w = std::exp(logw[k] - top);
        num += w * p.term_vols[k] * p.term_vols[k];
        den += w;
    }
    return std::sqrt(num / den);
}

double mixture_option_price(const ShiftedMixtureParams& p, double strike,
                            double maturity, double discount_factor,
                            OptionType type) {
    p.validate();
    const double sqrt_t = std::sqrt(maturity);
    double acc = 0.0;
    for (int k = 0; k < p.n_components(); ++k)
        acc += p.weights[k] *
               shifted_bs_price(p.spot, strike, p.term_vols[k] * sqrt_t,
                                maturity, p.drift_mu, p.shift_beta,
                                discount_factor, type);
    return acc;
}

double model_implied_vol(const ShiftedMixtureParams& p, double strike,
                         double maturity, double discount_factor) {
    const double forward = p.spot * std::exp(p.drift_mu * maturity);
    const OptionType side =
        (strike >= forward) ? OptionType::call : OptionType::put;
    const double price =
        mixture_option_price(p, strike, maturity, discount_factor, side);
    return implied_vol(price, forward, strike, maturity, discount_factor, side);
}

double sim_component_vol(const ShiftedMixtureParams& p, int k, double t) {
    const double s0 = p.sigma0();
    if (t <= p.epsilon_floor) return s0;
    const double eta = p.term_vols[k];
    const double T = p.reference_maturity;
    return std::sqrt((eta * eta * T - s0 * s0 * p.epsilon_floor) /
                     (T - p.epsilon_floor));
}

double sim_component_variance(const ShiftedMixtureParams& p, int k, double t) {
    const double s0 = p.sigma0();
    if (t <= p.epsilon_floor) return s0 * s0 * t;
    const double late = sim_component_vol(p, k, t);
    return s0 * s0 * p.epsilon_floor + late * late * (t - p.epsilon_floor);
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

namespace {

struct ParamCodec {
    int n = 0;
    bool fit_beta = true;
    double fixed_beta = 0.0;

    int dim() const { return n + (n - 1) + (fit_beta ? 1 : 0); }

    ShiftedMixtureParams decode(const Eigen::VectorXd& theta, double spot,
                                double mu, double maturity) const {
        ShiftedMixtureParams p;
        p.term_vols.resize(n);
        for (int k = 0; k < n; ++k)
            p.term_vols[k] = std::exp(std::clamp(theta[k], -9.5, 3.0));
        Eigen::VectorXd logits = Eigen::VectorXd::Zero(n);
        for (int k = 1; k < n; ++k) logits[k] = std::clamp(theta[n + k - 1], -30.0, 30.0);
        const double top = logits.maxCoeff();
        Eigen::VectorXd w = (logits.array() - top).exp();
        p.weights = w / w.sum();
        p.shift_beta = fit_beta ? theta[2 * n - 1] : fixed_beta;
        p.spot = spot;
        p.drift_mu = mu;
        p.reference_maturity = maturity;
        return p;
    }

    Eigen::VectorXd encode(const Eigen::VectorXd& vols,
                           const Eigen::VectorXd& weights, double beta) const {
        Eigen::VectorXd theta(dim());
        for (int k = 0; k < n; ++k) theta[k] = std::log(vols[k]);
        for (int k = 1; k < n; ++k)
            theta[n + k - 1] =
                std::log(weights[k] + 1e-12) - std::log(weights[0] + 1e-12);
        if (fit_beta) theta[2 * n - 1] = beta;
        return theta;
    }
};

void sort_components(ShiftedMixtureParams& p) {
    std::vector<int> order(p.n_components());
    for (int i = 0; i < p.n_components(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return p.term_vols[a] > p.term_vols[b];
    });
    Eigen::VectorXd vols(p.n_components()), weights(p.n_components());
    for (int i = 0; i < p.n_components(); ++i) {
        vols[i] = p.term_vols[order[i]];
        weights[i] = p.weights[order[i]];
    }
    p.term_vols = vols;
    p.weights = weights;
}

}  // namespace

SmileFitReport calibrate_smile(const std::vector<VolQuote>& quotes,
                               int n_components, const MarketInputs& market,
                               const SmileCalibrationConfig& config) {
    if (quotes.empty())
        throw invalid_input_error("calibrate_smile: no quotes supplied");
    if (n_components < 1)
        throw invalid_input_error("calibrate_smile: need at least one component");
    if (!(market.spot > 0.0))
        throw invalid_input_error("calibrate_smile: spot must be > 0");

    const double maturity = quotes.front().maturity;
    for (const VolQuote& q : quotes) {
        if (!(q.strike > 0.0) || !(q.implied_vol > 0.0) || q.weight < 0.0)
            throw invalid_input_error("calibrate_smile: invalid quote");
        if (std::abs(q.maturity - maturity) > 1e-12)
            throw invalid_input_error(
                "calibrate_smile: all quotes must share one maturity");
    }

    const double forward = market.spot * std::exp(market.drift_mu * maturity);
    const double sqrt_t = std::sqrt(maturity);
    const double df = market.discount_factor;

    // Fit weights, with the quote nearest the forward optionally up-weighted.
    std::vector<double> fit_weight(quotes.size());
    std::size_t atm_index = 0;
    for (std::size_t q = 0; q < quotes.size(); ++q) {
        fit_weight[q] = quotes[q].weight;
        if (std::abs(quotes[q].strike - forward) <
            std::abs(quotes[atm_index].strike - forward))
            atm_index = q;
    }
    fit_weight[atm_index] *= config.atm_weight;

    double atm_vol = quotes[atm_index].implied_vol;

    auto finish = [&](ShiftedMixtureParams params, double objective,
                      int iterations, bool converged) {
        params.epsilon_floor =
            std::min(kDefaultEpsilonFloor, 0.5 * maturity);
        sort_components(params);
        SmileFitReport report;
        report.params = params;
        report.objective = objective;
        report.iterations = iterations;
        report.converged = converged;
        report.sufficient_quotes =
            static_cast<int>(quotes.size()) >= 2 * n_components + 1;
        double sq = 0.0;
        for (const VolQuote& q : quotes) {
            SmileQuoteFit row;
            row.strike = q.strike;
            row.market_vol = q.implied_vol;
            try {
                row.model_vol = model_implied_vol(params, q.strike, maturity, df);
                row.feasible = true;
            } catch (const error&) {
                row.model_vol = std::numeric_limits<double>::quiet_NaN();
                row.feasible = false;
            }
            row.abs_vol_diff = std::abs(row.model_vol - q.implied_vol);
            const OptionType side =
                (q.strike >= forward) ? OptionType::call : OptionType::put;
            const double market_price =
                bs_price(forward, q.strike, q.implied_vol * sqrt_t, df, side);
            double model_price = std::numeric_limits<double>::quiet_NaN();
            if (row.feasible)
                model_price =
                    mixture_option_price(params, q.strike, maturity, df, side);
            row.abs_price_diff = std::abs(model_price - market_price);
            sq += row.abs_vol_diff * row.abs_vol_diff;
            report.per_quote.push_back(row);
        }
        report.vol_rmse = std::sqrt(sq / static_cast<double>(quotes.size()));
        return report;
    };

    // N = 1 with a pinned zero shift is a weighted least-squares problem with
    // an explicit solution (the model vol is the single term vol everywhere).
    if (n_components == 1 && config.fix_beta && *config.fix_beta == 0.0) {
        double num = 0.0, den = 0.0;
        for (std::size_t q = 0; q < quotes.size(); ++q) {
            const double s = quotes[q].implied_vol;
            num += fit_weight[q] / s;
            den += fit_weight[q] / (s * s);
        }
        ShiftedMixtureParams params;
        params.weights = Eigen::VectorXd::Ones(1);
        params.term_vols = Eigen::VectorXd::Constant(1, num / den);
        params.shift_beta = 0.0;
        params.drift_mu = market.drift_mu;
        params.spot = market.spot;
        params.reference_maturity = maturity;
        double objective = 0.0;
        for (std::size_t q = 0; q < quotes.size(); ++q) {
            const double rel =
                (params.term_vols[0] - quotes[q].implied_vol) / quotes[q].implied_vol;
            objective += fit_weight[q] * rel * rel;
        }
        return finish(params, objective, 0, true);
    }

    ParamCodec codec;
    codec.n = n_components;
    codec.fit_beta = !config.fix_beta.has_value();
    codec.fixed_beta = config.fix_beta.value_or(0.0);

    double min_strike = quotes.front().strike;
    for (const VolQuote& q : quotes) min_strike = std::min(min_strike, q.strike);
    const double growth = std::exp(market.drift_mu * maturity);

    auto objective_fn = [&](const Eigen::VectorXd& theta) {
        const ShiftedMixtureParams p =
            codec.decode(theta, market.spot, market.drift_mu, maturity);
        const double spot_slack = p.effective_spot() / market.spot;
        const double strike_slack =
            (min_strike - p.shift_beta * growth) / min_strike;
        if (spot_slack <= 1e-6 || strike_slack <= 1e-6) {
            const double violation =
                std::max(1e-6 - spot_slack, 1e-6 - strike_slack);
            return kPenalty * (1.0 + violation * violation);
        }
        double acc = 0.0;
        for (std::size_t q = 0; q < quotes.size(); ++q) {
            double model_vol;
            try {
                model_vol = model_implied_vol(p, quotes[q].strike, maturity, df);
            } catch (const error&) {
                return kPenalty;
            }
            const double rel =
                (model_vol - quotes[q].implied_vol) / quotes[q].implied_vol;
            acc += fit_weight[q] * rel * rel;
        }
        return acc;
    };

    Eigen::VectorXd best_theta;
    double best_value = std::numeric_limits<double>::infinity();
    int total_iterations = 0;
    bool any_converged = false;

    Eigen::VectorXd step(codec.dim());
    for (int k = 0; k < n_components; ++k) step[k] = 0.3;
    for (int k = 1; k < n_components; ++k) step[n_components + k - 1] = 0.6;
    if (codec.fit_beta) step[codec.dim() - 1] = 0.05 * market.spot;

    for (int s = 0; s < std::max(config.n_starts, 1); ++s) {
        Eigen::VectorXd theta(codec.dim());
        if (s == 0) {
            // Deterministic start: vols fanned around the ATM level,
            // uniform weights, zero shift.
            Eigen::VectorXd vols(n_components), weights(n_components);
            for (int k = 0; k < n_components; ++k) {
                const double fan =
                    (n_components == 1)
                        ? 1.0
                        : 0.6 + 0.8 * k / static_cast<double>(n_components - 1);
                vols[k] = atm_vol * fan;
                weights[k] = 1.0 / n_components;
            }
            theta = codec.encode(vols, weights, 0.0);
        } else {
            PathRng rng(mix_seed(config.seed, 101), static_cast<std::uint64_t>(s));
            for (int k = 0; k < n_components; ++k)
                theta[k] = std::log(atm_vol) + 0.6 * rng.normal();
            for (int k = 1; k < n_components; ++k)
                theta[n_components + k - 1] = rng.normal();
            if (codec.fit_beta) {
                const double cap =
                    0.9 * std::min(market.spot, min_strike / growth);
                theta[codec.dim() - 1] =
                    std::clamp(0.05 * market.spot * rng.normal(), -cap, cap);
            }
        }

        SimplexResult result = nelder_mead(objective_fn, theta, step,
                                           config.tolerance,
                                           config.max_iterations);
        for (int r = 0; r < config.restarts; ++r) {
            SimplexResult again =
                nelder_mead(objective_fn, result.x, 0.1 * step,
                            config.tolerance, config.max_iterations);
            total_iterations += again.iterations;
            if (again.value < result.value) result = again;
        }
        total_iterations += result.iterations;
        any_converged = any_converged || result.converged;
        if (result.value < best_value) {
            best_value = result.value;
            best_theta = result.x;
        }
    }

    ShiftedMixtureParams params =
        codec.decode(best_theta, market.spot, market.drift_mu, maturity);
    const bool converged = any_converged && best_value < kPenalty;
    return finish(params, best_value, total_iterations, converged);
}

}  // namespace mixdyn
