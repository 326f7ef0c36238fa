#include "mixdyn/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "mixdyn/math/normal.hpp"

namespace mixdyn {

void OptionQuoteInputs::validate() const {
    if (!std::isfinite(forward) || !std::isfinite(strike) ||
        !std::isfinite(term_stdev) || !std::isfinite(discount_factor))
        throw invalid_input_error("bs_price: non-finite input");
    if (forward <= 0.0) throw invalid_input_error("bs_price: forward must be > 0");
    if (strike <= 0.0) throw invalid_input_error("bs_price: strike must be > 0");
    if (term_stdev < 0.0)
        throw invalid_input_error("bs_price: term_stdev must be >= 0");
    if (discount_factor <= 0.0 || discount_factor > 1.0)
        throw invalid_input_error("bs_price: discount factor must be in (0,1]");
}

double bs_price(const OptionQuoteInputs& q) {
    q.validate();
    const double intrinsic = (q.type == OptionType::call)
                                 ? std::max(q.forward - q.strike, 0.0)
                                 : std::max(q.strike - q.forward, 0.0);
    if (q.term_stdev == 0.0) return q.discount_factor * intrinsic;

    const double s = q.term_stdev;
    const double d1 = std::log(q.forward / q.strike) / s + 0.5 * s;
    const double d2 = d1 - s;
    double value;
    if (q.type == OptionType::call)
        value = q.forward * norm_cdf(d1) - q.strike * norm_cdf(d2);
    else
        value = q.strike * norm_cdf(-d2) - q.forward * norm_cdf(-d1);
    return q.discount_factor * std::max(value, 0.0);
}

double bs_price(double forward, double strike, double term_stdev,
                double discount_factor, OptionType type) {
    return bs_price(OptionQuoteInputs{forward, strike, term_stdev,
                                      discount_factor, type});
}

double bs_vega_term(double forward, double strike, double term_stdev) {
    if (term_stdev <= 0.0) return 0.0;
    const double d1 =
        std::log(forward / strike) / term_stdev + 0.5 * term_stdev;
    return forward * norm_pdf(d1);
}

double shifted_bs_price(double spot, double strike, double component_term_stdev,
                        double maturity, double drift_mu, double shift_beta,
                        double discount_factor, OptionType type) {
    if (!std::isfinite(spot) || !std::isfinite(strike) ||
        !std::isfinite(component_term_stdev) || !std::isfinite(maturity) ||
        !std::isfinite(drift_mu) || !std::isfinite(shift_beta))
        throw invalid_input_error("shifted_bs_price: non-finite input");

    const double effective_spot = spot - shift_beta;
    if (effective_spot <= 0.0)
        throw shift_domain_error("shifted_bs_price: effective spot S0 - beta <= 0");
    const double growth = std::exp(drift_mu * maturity);
    const double effective_strike = strike - shift_beta * growth;
    if (effective_strike <= 0.0)
        throw shift_domain_error(
            "shifted_bs_price: effective strike K - beta*exp(mu*T) <= 0");

    return bs_price(effective_spot * growth, effective_strike,
                    component_term_stdev, discount_factor, type);
}

double implied_vol(double price, double forward, double strike, double maturity,
                   double discount_factor, OptionType type) {
    if (!std::isfinite(price) || price <= 0.0)
        throw invalid_input_error("implied_vol: price must be positive and finite");
    if (maturity <= 0.0)
        throw invalid_input_error("implied_vol: maturity must be > 0");

    const double intrinsic =
        discount_factor * ((type == OptionType::call)
                               ? std::max(forward - strike, 0.0)
                               : std::max(strike - forward, 0.0));
    const double upper = discount_factor *
                         ((type == OptionType::call) ? forward : strike);
    if (price <= intrinsic)
        throw no_solution_error("implied_vol: price at or below intrinsic value",
                                no_solution_error::Bound::below_intrinsic);
    if (price >= upper)
        throw no_solution_error("implied_vol: price at or above upper bound",
                                no_solution_error::Bound::above_bound);

    const double sqrt_t = std::sqrt(maturity);
    auto price_at = [&](double vol) {
        return bs_price(forward, strike, vol * sqrt_t, discount_factor, type);
    };

    double lo = 1e-6, hi = 5.0;
    // The no-arbitrage band admits vols beyond the default bracket only for
    // extreme inputs; widen rather than fail so the inversion contract holds.
    while (price_at(hi) < price && hi < 40.0) hi *= 2.0;
    if (price_at(lo) > price) return lo;

    for (int i = 0; i < 200 && (hi - lo) > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (price_at(mid) < price) lo = mid; else hi = mid;
    }

    double vol = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double diff = price_at(vol) - price;
        const double vega =
            discount_factor * bs_vega_term(forward, strike, vol * sqrt_t) * sqrt_t;
        if (vega <= 0.0) break;
        const double next = vol - diff / vega;
        if (!(next > 0.0) || !std::isfinite(next)) break;
        vol = next;
    }
    return vol;
}

}  // namespace mixdyn
