#include "mixdyn/cross_pricing.hpp"

#include <algorithm>
#include <cmath>

#include "mixdyn/analytic.hpp"
#include "mixdyn/math/normal.hpp"
#include "mixdyn/math/quadrature.hpp"

namespace mixdyn {

namespace {

struct ScenarioTerms {
    double weight = 0.0;
    double sigma1 = 0.0, sigma2 = 0.0;
    double rho = 0.0;
    double forward1 = 0.0, forward2 = 0.0;  // unshifted component forwards
    double alpha1 = 0.0, alpha2 = 0.0;      // shifts at maturity
};

ScenarioTerms scenario_terms(const CrossModel& m, double maturity, int k1,
                             int k2) {
    ScenarioTerms t;
    t.weight = m.asset1.weights[k1] * m.asset2.weights[k2];
    t.sigma1 = m.asset1.term_vols[k1];
    t.sigma2 = m.asset2.term_vols[k2];
    t.rho = m.corr.rho(k1, k2);
    t.forward1 =
        m.asset1.effective_spot() * std::exp(m.drift1(k1, k2) * maturity);
    t.forward2 = m.asset2.effective_spot() * std::exp(m.drift2() * maturity);
    t.alpha1 = m.asset1.shift_at(maturity);
    t.alpha2 = m.asset2.shift_at(maturity);
    return t;
}

// Black-style positive-part expectation that tolerates non-positive strikes:
// E[(L - K)^+] and E[(K - L)^+] for L lognormal with mean fwd and total
// log stdev s.
double positive_part_call(double fwd, double strike, double s) {
    if (strike <= 0.0) return fwd - strike;
    return bs_price(fwd, strike, s, 1.0, OptionType::call);
}

double positive_part_put(double fwd, double strike, double s) {
    if (strike <= 0.0) return 0.0;
    return bs_price(fwd, strike, s, 1.0, OptionType::put);
}

// E[(a L + b)^+] for L lognormal(fwd, s); covers every sign combination the
// shifted legs can produce.
double affine_positive_part(double a, double b, double fwd, double s) {
    if (a > 0.0) {
        if (b >= 0.0) return a * fwd + b;
        return a * positive_part_call(fwd, -b / a, s);
    }
    if (a < 0.0) {
        if (b <= 0.0) return 0.0;
        return -a * positive_part_put(fwd, -b / a, s);
    }
    return std::max(b, 0.0);
}

// Conditioning setup shared by the pricer and the density: integrate the
// "a" leg by quadrature, keep the "b" leg analytic.
struct ConditionalLeg {
    double fa = 0.0, fb = 0.0;
    double alpha_a = 0.0, alpha_b = 0.0;
    double vol_a = 0.0, vol_b = 0.0;  // total stdevs over [0,T]
    double rho = 0.0;
};

ConditionalLeg choose_conditioner(const ScenarioTerms& t, double maturity,
                                  bool prefer_small_vol) {
    const double sqrt_t = std::sqrt(maturity);
    const double v1 = t.sigma1 * sqrt_t;
    const double v2 = t.sigma2 * sqrt_t;

    bool condition_on_first;
    const bool ok1 = t.alpha1 >= 0.0;
    const bool ok2 = t.alpha2 >= 0.0;
    if (ok1 != ok2) {
        condition_on_first = ok1;
    } else {
        // Both (or neither) shift-positive: pick by vol so the analytic leg
        // keeps the randomness when one asset is nearly deterministic.
        condition_on_first = prefer_small_vol ? (v1 <= v2) : (v1 >= v2);
    }

    ConditionalLeg leg;
    if (condition_on_first) {
        leg.fa = t.forward1; leg.fb = t.forward2;
        leg.alpha_a = t.alpha1; leg.alpha_b = t.alpha2;
        leg.vol_a = v1; leg.vol_b = v2;
    } else {
        leg.fa = t.forward2; leg.fb = t.forward1;
        leg.alpha_a = t.alpha2; leg.alpha_b = t.alpha1;
        leg.vol_a = v2; leg.vol_b = v1;
    }
    // A deterministic conditioning leg carries no information about the
    // other one.
    leg.rho = (leg.vol_a < 1e-14) ? 0.0 : t.rho;
    return leg;
}

double scenario_price(const ScenarioTerms& t, double maturity, double strike,
                      OptionType type, const QuadratureRule& rule) {
    const ConditionalLeg leg = choose_conditioner(t, maturity, false);
    const double resid_var = (1.0 - leg.rho * leg.rho) * leg.vol_b * leg.vol_b;
    const double resid_stdev = std::sqrt(std::max(resid_var, 0.0));

    double acc = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i) {
        const double u = rule.nodes[i];
        const double sa =
            leg.fa * std::exp(leg.vol_a * u - 0.5 * leg.vol_a * leg.vol_a) +
            leg.alpha_a;
        const double fbc =
            leg.fb * std::exp(leg.rho * leg.vol_b * u -
                              0.5 * leg.rho * leg.rho * leg.vol_b * leg.vol_b);
        double value;
        if (type == OptionType::call)
            value = affine_positive_part(sa, sa * leg.alpha_b - strike, fbc,
                                         resid_stdev);
        else
            value = affine_positive_part(-sa, strike - sa * leg.alpha_b, fbc,
                                         resid_stdev);
        acc += rule.weights[i] * value;
    }
    return acc;
}

double lognormal_pdf(double y, double fwd, double total_var) {
    if (y <= 0.0) return 0.0;
    const double z = std::log(y / fwd) + 0.5 * total_var;
    static const double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi / (y * std::sqrt(total_var)) *
           std::exp(-0.5 * z * z / total_var);
}

}  // namespace

void CrossPricingRequest::validate() const {
    model.validate();
    if (strikes.empty())
        throw invalid_input_error("cross pricing: no strikes supplied");
    for (double k : strikes)
        if (!(k > 0.0) || !std::isfinite(k))
            throw invalid_input_error("cross pricing: strikes must be > 0");
    if (!(maturity > 0.0))
        throw invalid_input_error("cross pricing: maturity must be > 0");
    if (maturity > std::min(model.asset1.reference_maturity,
                            model.asset2.reference_maturity) + 1e-9)
        throw invalid_input_error(
            "cross pricing: maturity beyond the assets' reference maturity");
    if (!(discount_factor > 0.0) || discount_factor > 1.0)
        throw invalid_input_error("cross pricing: discount factor not in (0,1]");
    if (quad_nodes < 2)
        throw invalid_input_error("cross pricing: need at least 2 nodes");
}

CrossModel quanto_adjust(const CrossModel& model) {
    model.validate();
    if (!model.rates.has_value())
        throw configuration_error(
            "quanto_adjust: rates must be populated to fix the measure");
    CrossModel adjusted = model;
    const int n1 = model.asset1.n_components();
    const int n2 = model.asset2.n_components();
    for (int h = 0; h < n1; ++h)
        for (int k = 0; k < n2; ++k)
            adjusted.scenario_drift1(h, k) =
                model.asset1.drift_mu - model.corr.rho(h, k) *
                                            model.asset1.term_vols[h] *
                                            model.asset2.term_vols[k];
    adjusted.quanto_applied = true;
    return adjusted;
}

CrossMoments cross_moments(const CrossModel& m, double maturity) {
    if (!(maturity > 0.0))
        throw invalid_input_error("cross_moments: maturity must be > 0");
    CrossMoments out;
    double mean1_sq = 0.0, mean2_sq = 0.0;
    for (int k1 = 0; k1 < m.asset1.n_components(); ++k1)
        for (int k2 = 0; k2 < m.asset2.n_components(); ++k2) {
            const ScenarioTerms t = scenario_terms(m, maturity, k1, k2);
            const double e1 = t.forward1 + t.alpha1;
            const double e2 = t.forward2 + t.alpha2;
            const double e1sq =
                t.forward1 * t.forward1 *
                    std::exp(t.sigma1 * t.sigma1 * maturity) +
                2.0 * t.alpha1 * t.forward1 + t.alpha1 * t.alpha1;
            const double e2sq =
                t.forward2 * t.forward2 *
                    std::exp(t.sigma2 * t.sigma2 * maturity) +
                2.0 * t.alpha2 * t.forward2 + t.alpha2 * t.alpha2;
            const double e12 =
                t.forward1 * t.forward2 *
                    std::exp(t.rho * t.sigma1 * t.sigma2 * maturity) +
                t.alpha1 * t.forward2 + t.alpha2 * t.forward1 +
                t.alpha1 * t.alpha2;
            out.mean1 += t.weight * e1;
            out.mean2 += t.weight * e2;
            mean1_sq += t.weight * e1sq;
            mean2_sq += t.weight * e2sq;
            out.mean_product += t.weight * e12;
        }
    out.var1 = mean1_sq - out.mean1 * out.mean1;
    out.var2 = mean2_sq - out.mean2 * out.mean2;
    out.covariance = out.mean_product - out.mean1 * out.mean2;
    return out;
}

double cross_density(const CrossModel& m, double maturity, double b,
                     int quad_nodes) {
    if (!(maturity > 0.0))
        throw invalid_input_error("cross_density: maturity must be > 0");
    const QuadratureRule& rule = gauss_hermite_rule(quad_nodes);

    double acc = 0.0;
    for (int k1 = 0; k1 < m.asset1.n_components(); ++k1)
        for (int k2 = 0; k2 < m.asset2.n_components(); ++k2) {
            const ScenarioTerms t = scenario_terms(m, maturity, k1, k2);
            const ConditionalLeg leg = choose_conditioner(t, maturity, true);
            const double resid_var =
                (1.0 - leg.rho * leg.rho) * leg.vol_b * leg.vol_b;
            if (resid_var < 1e-28)
                throw integration_error(
                    "cross_density: degenerate conditional leg, the product "
                    "has no continuous density");
            double scenario_pdf = 0.0;
            for (int i = 0; i < rule.nodes.size(); ++i) {
                const double u = rule.nodes[i];
                const double sa =
                    leg.fa *
                        std::exp(leg.vol_a * u - 0.5 * leg.vol_a * leg.vol_a) +
                    leg.alpha_a;
                if (std::abs(sa) < 1e-300) continue;
                const double y = b / sa - leg.alpha_b;
                if (y <= 0.0) continue;
                const double fbc =
                    leg.fb *
                    std::exp(leg.rho * leg.vol_b * u -
                             0.5 * leg.rho * leg.rho * leg.vol_b * leg.vol_b);
                scenario_pdf += rule.weights[i] *
                                lognormal_pdf(y, fbc, resid_var) / std::abs(sa);
            }
            acc += t.weight * scenario_pdf;
        }
    return acc;
}

namespace {

double price_one(const CrossModel& m, double strike, double maturity,
                 double discount_factor, OptionType type, int quad_nodes) {
    const QuadratureRule& rule = gauss_hermite_rule(quad_nodes);
    double acc = 0.0;
    for (int k1 = 0; k1 < m.asset1.n_components(); ++k1)
        for (int k2 = 0; k2 < m.asset2.n_components(); ++k2) {
            const ScenarioTerms t = scenario_terms(m, maturity, k1, k2);
            acc += t.weight * scenario_price(t, maturity, strike, type, rule);
        }
    return discount_factor * acc;
}

}  // namespace

std::vector<double> price_cross_option(const CrossPricingRequest& req) {
    req.validate();
    if (!req.model.quanto_applied)
        throw configuration_error(
            "price_cross_option: apply quanto_adjust to the model first");
    std::vector<double> prices;
    prices.reserve(req.strikes.size());
    for (double strike : req.strikes)
        prices.push_back(price_one(req.model, strike, req.maturity,
                                   req.discount_factor, req.type,
                                   req.quad_nodes));
    return prices;
}

std::vector<double> cross_implied_vol_curve(const CrossPricingRequest& req) {
    req.validate();
    if (!req.model.quanto_applied)
        throw configuration_error(
            "cross_implied_vol_curve: apply quanto_adjust to the model first");
    const double forward = cross_forward(req.model, req.maturity);
    std::vector<double> vols;
    vols.reserve(req.strikes.size());
    for (double strike : req.strikes) {
        const OptionType side =
            (strike >= forward) ? OptionType::call : OptionType::put;
        const double price = price_one(req.model, strike, req.maturity,
                                       req.discount_factor, side,
                                       req.quad_nodes);
        vols.push_back(implied_vol(price, forward, strike, req.maturity,
                                   req.discount_factor, side));
    }
    return vols;
}

double terminal_correlation(const CrossModel& m, double maturity) {
    const CrossMoments mom = cross_moments(m, maturity);
    if (mom.var1 <= 0.0 || mom.var2 <= 0.0)
        throw undefined_correlation_error(
            "terminal_correlation: a marginal has zero variance");
    return mom.covariance / std::sqrt(mom.var1 * mom.var2);
}

ScenarioStats scenario_correlation_stats(const CorrelationSpec& corr,
                                         const Eigen::VectorXd& lambda1,
                                         const Eigen::VectorXd& lambda2) {
    ScenarioStats out;
    if (!corr.is_scenario()) {
        out.mean = corr.constant_rho;
        out.stdev = 0.0;
        return out;
    }
    if (lambda1.size() != corr.scenario_rho.rows() ||
        lambda2.size() != corr.scenario_rho.cols())
        throw invalid_input_error(
            "scenario_correlation_stats: weight lengths must match the "
            "scenario matrix");
    double mean = 0.0, second = 0.0;
    for (int h = 0; h < lambda1.size(); ++h)
        for (int k = 0; k < lambda2.size(); ++k) {
            const double w = lambda1[h] * lambda2[k];
            const double r = corr.scenario_rho(h, k);
            mean += w * r;
            second += w * r * r;
        }
    out.mean = mean;
    out.stdev = std::sqrt(std::max(second - mean * mean, 0.0));
    return out;
}

}  // namespace mixdyn
