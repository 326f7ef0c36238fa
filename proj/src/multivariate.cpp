#include "mixdyn/multivariate.hpp"

#include <cmath>

namespace mixdyn {

namespace {

constexpr double kMaxAbsRho = 0.999;
const double kLog2Pi = std::log(2.0 * 3.14159265358979323846);

// log of the bivariate shifted-lognormal density of scenario (k1,k2),
// evaluated at shifted coordinates y1, y2 > 0.
double log_scenario_density(const CrossModel& m, int k1, int k2, double t,
                            double y1, double y2) {
    const double s1 = m.asset1.term_vols[k1];
    const double s2 = m.asset2.term_vols[k2];
    const double rho = m.corr.rho(k1, k2);
    const double v1 = s1 * s1 * t;
    const double v2 = s2 * s2 * t;

    const double z1 = (std::log(y1 / m.asset1.effective_spot()) -
                       m.drift1(k1, k2) * t + 0.5 * v1) /
                      std::sqrt(v1);
    const double z2 = (std::log(y2 / m.asset2.effective_spot()) -
                       m.drift2() * t + 0.5 * v2) /
                      std::sqrt(v2);
    const double one_minus_r2 = 1.0 - rho * rho;
    const double quad = (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / one_minus_r2;
    return -kLog2Pi - 0.5 * std::log(v1 * v2 * one_minus_r2) -
           std::log(y1 * y2) - 0.5 * quad;
}

struct ShiftedState {
    double y1 = 0.0;
    double y2 = 0.0;
    bool in_support = false;
};

ShiftedState shifted_state(const CrossModel& m, double t, double x1, double x2) {
    ShiftedState s;
    s.y1 = x1 - m.asset1.shift_at(t);
    s.y2 = x2 - m.asset2.shift_at(t);
    s.in_support = (s.y1 > 0.0 && s.y2 > 0.0);
    return s;
}

}  // namespace

CorrelationSpec CorrelationSpec::constant(double rho) {
    CorrelationSpec spec;
    spec.kind = Kind::constant;
    spec.constant_rho = rho;
    spec.validate();
    return spec;
}

CorrelationSpec CorrelationSpec::scenario(const Eigen::MatrixXd& rho) {
    CorrelationSpec spec;
    spec.kind = Kind::scenario;
    spec.scenario_rho = rho;
    spec.validate();
    return spec;
}

double CorrelationSpec::max_abs_rho() const {
    return is_scenario() ? scenario_rho.cwiseAbs().maxCoeff()
                         : std::abs(constant_rho);
}

void CorrelationSpec::validate() const {
    if (is_scenario() && (scenario_rho.rows() < 1 || scenario_rho.cols() < 1))
        throw invalid_input_error("correlation spec: empty scenario matrix");
    const double cap = max_abs_rho();
    if (!std::isfinite(cap))
        throw invalid_input_error("correlation spec: non-finite entry");
    if (cap >= kMaxAbsRho)
        throw conditioning_error(
            "correlation spec: |rho| >= 0.999 makes the integrated covariance "
            "near singular");
}

void CrossModel::validate() const {
    asset1.validate();
    asset2.validate();
    corr.validate();
    if (corr.is_scenario() &&
        (corr.scenario_rho.rows() != asset1.n_components() ||
         corr.scenario_rho.cols() != asset2.n_components()))
        throw invalid_input_error(
            "cross model: scenario correlation dimensions must match the "
            "component counts");
    if (std::abs(asset1.reference_maturity - asset2.reference_maturity) > 1e-9)
        throw invalid_input_error(
            "cross model: assets must share the reference maturity");
    if (scenario_drift1.rows() != asset1.n_components() ||
        scenario_drift1.cols() != asset2.n_components())
        throw invalid_input_error("cross model: drift table has wrong shape");
}

CrossModel make_cross_model(const ShiftedMixtureParams& asset1,
                            const ShiftedMixtureParams& asset2,
                            const CorrelationSpec& corr,
                            std::optional<CrossRates> rates) {
    CrossModel m;
    m.asset1 = asset1;
    m.asset2 = asset2;
    m.corr = corr;
    m.rates = rates;
    m.scenario_drift1 = Eigen::MatrixXd::Constant(
        asset1.n_components(), asset2.n_components(), asset1.drift_mu);
    m.validate();
    return m;
}

double joint_mixture_density(const CrossModel& m, double t, double x1,
                             double x2) {
    if (t <= 0.0) throw domain_error("joint_mixture_density: t must be > 0");
    const ShiftedState s = shifted_state(m, t, x1, x2);
    if (!s.in_support) return 0.0;

    double acc = 0.0;
    for (int k1 = 0; k1 < m.asset1.n_components(); ++k1)
        for (int k2 = 0; k2 < m.asset2.n_components(); ++k2)
            acc += m.asset1.weights[k1] * m.asset2.weights[k2] *
                   std::exp(log_scenario_density(m, k1, k2, t, s.y1, s.y2));
    return acc;
}

Eigen::Matrix2d mvmd_diffusion_matrix(const CrossModel& m, double t, double x1,
                                      double x2) {
    if (t <= 0.0) throw domain_error("mvmd_diffusion_matrix: t must be > 0");
    const ShiftedState s = shifted_state(m, t, x1, x2);
    if (!s.in_support)
        throw domain_error(
            "mvmd_diffusion_matrix: state below the shifted support");

    const int n1 = m.asset1.n_components();
    const int n2 = m.asset2.n_components();
    Eigen::MatrixXd logw(n1, n2);
    for (int k1 = 0; k1 < n1; ++k1)
        for (int k2 = 0; k2 < n2; ++k2)
            logw(k1, k2) = std::log(m.asset1.weights[k1] + 1e-300) +
                           std::log(m.asset2.weights[k2] + 1e-300) +
                           log_scenario_density(m, k1, k2, t, s.y1, s.y2);
    const double top = logw.maxCoeff();

    double den = 0.0, n11 = 0.0, n22 = 0.0, n12 = 0.0;
    for (int k1 = 0; k1 < n1; ++k1)
        for (int k2 = 0; k2 < n2; ++k2) {
            const double w = std::exp(logw(k1, k2) - top);
            const double s1 = m.asset1.term_vols[k1];
            const double s2 = m.asset2.term_vols[k2];
            den += w;
            n11 += w * s1 * s1;
            n22 += w * s2 * s2;
            n12 += w * m.corr.rho(k1, k2) * s1 * s2;
        }

    const double w1 = s.y1 / x1;
    const double w2 = s.y2 / x2;
    Eigen::Matrix2d a;
    a(0, 0) = (n11 / den) * w1 * w1;
    a(1, 1) = (n22 / den) * w2 * w2;
    a(0, 1) = a(1, 0) = (n12 / den) * w1 * w2;
    return a;
}

Eigen::Matrix2d scmd_diffusion_matrix(const CrossModel& m, double t, double x1,
                                      double x2) {
    if (m.corr.is_scenario())
        throw unsupported_spec_error(
            "scmd_diffusion_matrix: the simply-correlated dynamics carry a "
            "single Brownian correlation, not scenario correlations");
    if (t <= 0.0) throw domain_error("scmd_diffusion_matrix: t must be > 0");
    const ShiftedState s = shifted_state(m, t, x1, x2);
    if (!s.in_support)
        throw domain_error(
            "scmd_diffusion_matrix: state below the shifted support");

    const double nu1 = local_vol(m.asset1, t, x1);
    const double nu2 = local_vol(m.asset2, t, x2);
    const double w1 = s.y1 / x1;
    const double w2 = s.y2 / x2;
    Eigen::Matrix2d a;
    a(0, 0) = nu1 * nu1 * w1 * w1;
    a(1, 1) = nu2 * nu2 * w2 * w2;
    a(0, 1) = a(1, 0) = m.corr.constant_rho * nu1 * nu2 * w1 * w2;
    return a;
}

double local_correlation(const CrossModel& m, double t, double x1, double x2) {
    const Eigen::Matrix2d a = mvmd_diffusion_matrix(m, t, x1, x2);
    return a(0, 1) / std::sqrt(a(0, 0) * a(1, 1));
}

}  // namespace mixdyn
