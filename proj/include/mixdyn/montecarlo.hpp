#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mixdyn/cross_pricing.hpp"
#include "mixdyn/multivariate.hpp"

namespace mixdyn {

enum class Scheme { muvm_exact, scmd_euler, mvmd_euler };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SimulationConfig {
    std::int64_t n_paths = 10'000;
    int n_steps = 125;  // ignored by the exact terminal sampler
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::muvm_exact;
    bool antithetic = false;

    void validate() const;
};

struct SimulationResult {
    Eigen::VectorXd terminal_s1;
    Eigen::VectorXd terminal_s2;
    // Per-path component indices, exact-sampler only (empty otherwise).
    Eigen::Matrix<std::int32_t, Eigen::Dynamic, 2> scenario_draws;
    SimulationConfig config;
    double maturity = 0.0;
    double elapsed_seconds = 0.0;
    std::int64_t absorbed_paths = 0;
};

// Exact terminal sampling of the uncertain-volatility pair: per path draw
// the component indices with probabilities lambda1 (x) lambda2, then sample
// the bivariate shifted lognormal with the scenario correlation. Each path
// owns a counter-based substream, so results are bit-reproducible for a
// given (seed, config) regardless of scheduling.
SimulationResult simulate_muvm(const CrossModel& model, double maturity,
                               const SimulationConfig& cfg);

// Log-Euler in the shifted coordinates with the marginal mixture local vols
// and a single Brownian correlation. Scenario specs are rejected. When the
// model is quanto-adjusted, asset 1 carries the state-dependent drift
// mu1 - rho * nu1 * nu2. States that underflow are floored at machine
// epsilon times the spot, with the affected paths counted.
SimulationResult simulate_scmd(const CrossModel& model, double maturity,
                               const SimulationConfig& cfg);

// Log-Euler with the full state-dependent diffusion matrix (Cholesky per
// step) and the component-weighted drift; works for constant and scenario
// correlations.
SimulationResult simulate_mvmd(const CrossModel& model, double maturity,
                               const SimulationConfig& cfg);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Discounted (S1 S2 - K)^+ estimator per strike; antithetic pairs are
// averaged before the variance is formed.
std::vector<McEstimate> mc_price_cross(const SimulationResult& res,
                                       const std::vector<double>& strikes,
                                       double discount_factor,
                                       OptionType type = OptionType::call);

// Same estimator for one marginal: asset_index is 1 or 2.
std::vector<McEstimate> mc_price_vanilla(const SimulationResult& res,
                                         int asset_index,
                                         const std::vector<double>& strikes,
                                         double discount_factor,
                                         OptionType type = OptionType::call);

// Pearson correlation of the terminal samples with a jackknife standard
// error; throws undefined_correlation_error on degenerate samples.
McEstimate estimate_terminal_correlation(const SimulationResult& res);

// Binary dump of terminal samples (little-endian doubles) with an
// 8-byte magic, a version word, the path count and the seed.
void write_sample_dump(const std::string& path, const SimulationResult& res);
SimulationResult read_sample_dump(const std::string& path);

// Fixed-tree pairwise sum; deterministic independent of chunking.
double pairwise_sum(const double* data, std::int64_t n);

}  // namespace mixdyn
