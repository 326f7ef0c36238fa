#pragma once

#include <optional>

#include <Eigen/Core>

#include "mixdyn/smile.hpp"

namespace mixdyn {

// Either one correlation for all component pairs or an N1 x N2 matrix of
// scenario correlations; entry (h,k) pairs component h of asset 1 with
// component k of asset 2 and carries probability lambda1[h] * lambda2[k].
struct CorrelationSpec {
    enum class Kind { constant, scenario };

    Kind kind = Kind::constant;
    double constant_rho = 0.0;
    Eigen::MatrixXd scenario_rho;

    static CorrelationSpec constant(double rho);
    static CorrelationSpec scenario(const Eigen::MatrixXd& rho);

    bool is_scenario() const { return kind == Kind::scenario; }
    double rho(int h, int k) const {
        return is_scenario() ? scenario_rho(h, k) : constant_rho;
    }
    double max_abs_rho() const;
    void validate() const;
};

struct CrossRates {
    double r_domestic = 0.0;  // domestic currency of asset 2 (pricing measure)
    double r_foreign1 = 0.0;  // foreign currency of asset 1
    double r_foreign2 = 0.0;  // foreign of asset 2 == domestic of asset 1
};

// A calibrated asset pair under the domestic measure of asset 2. The
// scenario drift table starts at asset 1's own-measure drift and is filled
// per scenario by quanto_adjust; asset 2 keeps its natural drift.
struct CrossModel {
    ShiftedMixtureParams asset1;
    ShiftedMixtureParams asset2;
    CorrelationSpec corr;
    std::optional<CrossRates> rates;
    bool quanto_applied = false;
    Eigen::MatrixXd scenario_drift1;  // N1 x N2

    double drift1(int k1, int k2) const { return scenario_drift1(k1, k2); }
    double drift2() const { return asset2.drift_mu; }
    void validate() const;
};

CrossModel make_cross_model(const ShiftedMixtureParams& asset1,
                            const ShiftedMixtureParams& asset2,
                            const CorrelationSpec& corr,
                            std::optional<CrossRates> rates = std::nullopt);

// Joint density of (S1(t), S2(t)): mixture over all component pairs of
// bivariate shifted-lognormal densities. Zero outside the shifted support.
double joint_mixture_density(const CrossModel& m, double t, double x1,
                             double x2);

// State-dependent diffusion matrix of the shifted model, in relative
// coordinates: entry (i,j) is the instantaneous covariance rate of
// dS_i/S_i and dS_j/S_j.
Eigen::Matrix2d mvmd_diffusion_matrix(const CrossModel& m, double t, double x1,
                                      double x2);

// Same convention for the simply-correlated dynamics: marginal local vols
// of each asset coupled only through the Brownian correlation. Scenario
// correlation specs are rejected.
Eigen::Matrix2d scmd_diffusion_matrix(const CrossModel& m, double t, double x1,
                                      double x2);

// a_12 / sqrt(a_11 a_22) of the state-dependent matrix.
double local_correlation(const CrossModel& m, double t, double x1, double x2);

}  // namespace mixdyn
