#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixdyn/cross_pricing.hpp"
#include "mixdyn/montecarlo.hpp"

namespace mixdyn {

// Market implied-vol quotes for one asset or a cross, together with the
// quoting conventions (forward and discount factor) used to move between
// prices and vols.
struct QuoteSet {
    std::vector<VolQuote> quotes;
    double forward = 0.0;
    double discount_factor = 1.0;
    double maturity = 0.0;

    void validate() const;
};

enum class CorrelationEngine { mvmd_semianalytic, scmd_montecarlo };

std::string to_string(CorrelationEngine engine);
CorrelationEngine correlation_engine_from_string(const std::string& name);

struct CorrelationCalibrationConfig {
    CrossRates rates;                 // defaults to zero rates
    double rho_tolerance = 1e-6;      // scalar search tolerance
    int scan_points = 9;              // initial bracket scan on (-0.998, 0.998)
    int quad_nodes = 64;
    SimulationConfig sim;             // used by the Monte Carlo engine
    int matrix_starts = 8;
    int matrix_max_iterations = 3000;
    double matrix_tolerance = 1e-14;
    std::uint64_t seed = 0x636f7272ULL;
};

struct CorrelationFitRow {
    double strike = 0.0;
    double market_vol = 0.0;
    double model_vol = 0.0;
    double abs_vol_diff = 0.0;
    double abs_price_diff = 0.0;
};

struct CorrelationFitReport {
    CorrelationSpec fitted;
    double objective_value = 0.0;
    std::vector<CorrelationFitRow> per_strike;
    int iterations = 0;
    bool converged = false;
    bool boundary_solution = false;       // objective monotone on the box
    bool identifiability_warning = false; // fewer quotes than free entries
    ScenarioStats stats;                  // of the fitted spec
};

// Scalar implied correlation: the rho in (-0.999, 0.999) minimizing the
// squared percentage difference between model and market implied vols.
// The semi-analytic engine prices through the cross pricer; the Monte
// Carlo engine drives the simply-correlated Euler scheme with common
// random numbers across rho trials.
CorrelationFitReport calibrate_implied_correlation(
    const ShiftedMixtureParams& asset1, const ShiftedMixtureParams& asset2,
    const QuoteSet& cross_quotes, CorrelationEngine engine,
    const CorrelationCalibrationConfig& config = {});

// Entrywise scenario-correlation fit (semi-analytic pricing), seeded from
// the scalar fit plus randomized multi-starts on tanh-mapped entries.
CorrelationFitReport calibrate_random_correlation(
    const ShiftedMixtureParams& asset1, const ShiftedMixtureParams& asset2,
    const QuoteSet& cross_quotes,
    const CorrelationCalibrationConfig& config = {});

struct ExtrapolatedSmile {
    std::vector<double> strikes;
    std::vector<double> prices;
    std::vector<double> implied_vols;
    double forward = 0.0;  // moment forward used for quoting
};

// Full cross smile implied by the calibrated assets and a correlation spec;
// arbitrage-free by construction since prices are true expectations.
ExtrapolatedSmile extrapolate_cross_smile(
    const ShiftedMixtureParams& asset1, const ShiftedMixtureParams& asset2,
    const CorrelationSpec& corr, const std::vector<double>& strikes,
    double maturity, double discount_factor, const CrossRates& rates = {},
    int quad_nodes = 64);

}  // namespace mixdyn
