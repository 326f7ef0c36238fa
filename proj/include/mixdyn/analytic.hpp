#pragma once

#include "mixdyn/errors.hpp"

namespace mixdyn {

enum class OptionType { call, put };

// Forward-measure Black-Scholes inputs. term_stdev is the total volatility
// over the option's life, sqrt(integral of sigma^2 dt), dimensionless.
struct OptionQuoteInputs {
    double forward = 0.0;
    double strike = 0.0;
    double term_stdev = 0.0;
    double discount_factor = 1.0;
    OptionType type = OptionType::call;

    void validate() const;
};

// Undiscounted-forward Black price times the discount factor:
// df * E[(F e^{G - s^2/2} - K)^+] for G ~ N(0, s^2) (call; put analogous).
double bs_price(const OptionQuoteInputs& q);

double bs_price(double forward, double strike, double term_stdev,
                double discount_factor, OptionType type = OptionType::call);

// d price / d term_stdev at discount factor 1 (used to polish inversions).
double bs_vega_term(double forward, double strike, double term_stdev);

// Shifted-lognormal call/put: the asset is S_t = beta e^{mu t} + X_t with X
// lognormal, so the price is a Black-Scholes price with forward
// (S0 - beta) e^{mu T} and strike K - beta e^{mu T}. Requires both the
// effective spot and the effective strike to be positive.
double shifted_bs_price(double spot, double strike, double component_term_stdev,
                        double maturity, double drift_mu, double shift_beta,
                        double discount_factor,
                        OptionType type = OptionType::call);

// Annualized Black-Scholes implied volatility. Bracketed bisection on
// vol in [1e-6, 5] to 1e-12 followed by Newton polish; throws
// no_solution_error when the price sits outside the no-arbitrage band.
double implied_vol(double price, double forward, double strike, double maturity,
                   double discount_factor, OptionType type = OptionType::call);

}  // namespace mixdyn
