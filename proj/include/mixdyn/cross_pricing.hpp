#pragma once

#include <vector>

#include "mixdyn/multivariate.hpp"

namespace mixdyn {

struct CrossPricingRequest {
    CrossModel model;
    std::vector<double> strikes;
    double maturity = 0.0;
    double discount_factor = 1.0;
    OptionType type = OptionType::call;
    int quad_nodes = 64;

    void validate() const;
};

// Moves asset 1 into the domestic measure of asset 2: scenario (h,k) gets
// the drift mu1 - rho(h,k) * sigma1_h * sigma2_k. The deterministic shift
// keeps asset 1's own-measure drift. Asset 2 is unchanged.
CrossModel quanto_adjust(const CrossModel& model);

// Scenario-weighted closed-form moments of (S1(T), S2(T)).
struct CrossMoments {
    double mean1 = 0.0;
    double mean2 = 0.0;
    double var1 = 0.0;
    double var2 = 0.0;
    double covariance = 0.0;
    double mean_product = 0.0;  // E[S1 S2], the cross forward
};

CrossMoments cross_moments(const CrossModel& m, double maturity);

inline double cross_forward(const CrossModel& m, double maturity) {
    return cross_moments(m, maturity).mean_product;
}

// Density of the product B = S1(T) S2(T): per scenario a single Gaussian
// integral against the conditional lognormal density of the second leg.
double cross_density(const CrossModel& m, double maturity, double b,
                     int quad_nodes = 64);

// Prices of (S1 S2 - K)^+ (or the put) per strike. Each scenario expectation
// is evaluated by Gauss-Hermite quadrature over the conditioning leg with
// the remaining leg integrated in closed form.
std::vector<double> price_cross_option(const CrossPricingRequest& req);

// Black-Scholes implied vols of the cross prices, quoted against the exact
// moment forward E[S1 S2] (never the F1*F2 approximation).
std::vector<double> cross_implied_vol_curve(const CrossPricingRequest& req);

// Pearson correlation of S1(T) and S2(T) from the closed-form moments.
double terminal_correlation(const CrossModel& m, double maturity);

struct ScenarioStats {
    double mean = 0.0;
    double stdev = 0.0;
};

// Mean and standard deviation of the scenario correlation under the
// component probabilities lambda1 (x) lambda2. A constant spec yields
// (rho, 0).
ScenarioStats scenario_correlation_stats(const CorrelationSpec& corr,
                                         const Eigen::VectorXd& lambda1,
                                         const Eigen::VectorXd& lambda2);

}  // namespace mixdyn
