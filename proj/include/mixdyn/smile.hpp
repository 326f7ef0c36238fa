#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mixdyn/analytic.hpp"
#include "mixdyn/errors.hpp"

namespace mixdyn {

inline constexpr double kDefaultEpsilonFloor = 1.0 / 365.0;

// One asset calibrated to a shifted lognormal-mixture model. term_vols are
// the annualized T-term volatilities eta_k = sqrt(int_0^T sigma_k^2 dt / T);
// analytic densities and prices treat sigma_k(t) as the constant eta_k.
// The simulation schemes replace sigma_k(t) on [0, epsilon_floor] by the
// common value sigma0() and rescale the tail so the T-term variance is
// preserved exactly; epsilon_floor is a simulation-only regularization.
struct ShiftedMixtureParams {
    Eigen::VectorXd weights;     // mixture probabilities, sum to 1
    Eigen::VectorXd term_vols;   // eta_k > 0
    double shift_beta = 0.0;     // asset units
    double drift_mu = 0.0;       // per year
    double spot = 0.0;
    double reference_maturity = 0.0;
    double epsilon_floor = kDefaultEpsilonFloor;

    int n_components() const { return static_cast<int>(weights.size()); }
    double effective_spot() const { return spot - shift_beta; }
    double shift_at(double t) const;
    double sigma0() const;  // weight-quadratic mean of the term vols
    void validate() const;
};

struct VolQuote {
    double strike = 0.0;
    double maturity = 0.0;
    double implied_vol = 0.0;
    double weight = 1.0;
};

// Density of the k-th shifted component at time t (zero below the shift).
double component_density(const ShiftedMixtureParams& p, int k, double t,
                         double x);

// Convex combination of the component densities.
double mixture_density(const ShiftedMixtureParams& p, double t, double x);

// Mixture local volatility in the shifted (lognormal) coordinate
// y = x - beta e^{mu t}; the asset-coordinate diffusion coefficient is
// local_vol * y / x.
double local_vol(const ShiftedMixtureParams& p, double t, double x);

// European option price: weight-combination of shifted Black-Scholes prices.
double mixture_option_price(const ShiftedMixtureParams& p, double strike,
                            double maturity, double discount_factor,
                            OptionType type = OptionType::call);

// Black-Scholes implied vol of the model price against the full forward
// S0 e^{mu T} (inverted on the out-of-the-money side for stability).
double model_implied_vol(const ShiftedMixtureParams& p, double strike,
                         double maturity, double discount_factor);

// Two-regime volatility used by the Euler simulation schemes: sigma0 on
// [0, epsilon_floor], then a level chosen so the integrated variance at the
// reference maturity equals eta_k^2 T exactly.
double sim_component_vol(const ShiftedMixtureParams& p, int k, double t);
double sim_component_variance(const ShiftedMixtureParams& p, int k, double t);

// ---------------------------------------------------------------------------
// Smile calibration
// ---------------------------------------------------------------------------

struct MarketInputs {
    double spot = 0.0;
    double drift_mu = 0.0;
    double discount_factor = 1.0;
};

struct SmileCalibrationConfig {
    int n_starts = 8;
    int max_iterations = 4000;
    int restarts = 2;          // simplex restarts from the incumbent
    double tolerance = 1e-12;  // simplex spread tolerance
    std::uint64_t seed = 0x736d696c65ULL;
    std::optional<double> fix_beta;  // pin the shift instead of fitting it
    double atm_weight = 1.0;   // extra weight on the quote nearest the forward
};

struct SmileQuoteFit {
    double strike = 0.0;
    double market_vol = 0.0;
    double model_vol = 0.0;
    double abs_vol_diff = 0.0;
    double abs_price_diff = 0.0;
    bool feasible = true;
};

struct SmileFitReport {
    ShiftedMixtureParams params;
    double objective = 0.0;
    double vol_rmse = 0.0;
    std::vector<SmileQuoteFit> per_quote;
    int iterations = 0;
    bool converged = false;
    bool sufficient_quotes = true;  // at least 2N+1 quotes supplied
};

// Fits weights, term vols and shift to same-maturity quotes by minimizing
// the weighted squared percentage implied-vol error. Non-convergence is
// reported through the flags, not thrown.
SmileFitReport calibrate_smile(const std::vector<VolQuote>& quotes,
                               int n_components, const MarketInputs& market,
                               const SmileCalibrationConfig& config = {});

}  // namespace mixdyn
