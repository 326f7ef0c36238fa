#include "mixdyn/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <utility>

#include "mixdyn/math/rng.hpp"

namespace mixdyn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int draw_component(const Eigen::VectorXd& weights, double u) {
    double acc = 0.0;
    for (int k = 0; k < weights.size(); ++k) {
        acc += weights[k];
        if (u <= acc) return k;
    }
    return static_cast<int>(weights.size()) - 1;
}

// Instantaneous vols and integrated (co)variances of the regularized
// two-regime profile used by the Euler schemes.
struct SimProfile {
    const ShiftedMixtureParams* params = nullptr;
    double sigma0 = 0.0;
    Eigen::VectorXd late_vol;

    explicit SimProfile(const ShiftedMixtureParams& p) : params(&p) {
        sigma0 = p.sigma0();
        late_vol.resize(p.n_components());
        for (int k = 0; k < p.n_components(); ++k)
            late_vol[k] = sim_component_vol(p, k, p.reference_maturity);
    }

    double vol(int k, double t) const {
        return (t <= params->epsilon_floor) ? sigma0 : late_vol[k];
    }

    double variance(int k, double t) const {
        return sim_component_variance(*params, k, t);
    }

    // log density of component k at shifted coordinate y > 0 and time t.
    double log_density(int k, double t, double y) const {
        const double var = variance(k, t);
        const double z =
            (std::log(y / params->effective_spot()) - params->drift_mu * t +
             0.5 * var) /
            std::sqrt(var);
        static const double log_sqrt_2pi = 0.9189385332046727417803297;
        return -std::log(y) - 0.5 * std::log(var) - log_sqrt_2pi - 0.5 * z * z;
    }
};

// Marginal mixture local vol under the simulation profile.
double sim_local_vol(const SimProfile& prof, double t, double y) {
    const ShiftedMixtureParams& p = *prof.params;
    if (t <= p.epsilon_floor) return prof.sigma0;
    const int n = p.n_components();
    double top = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd logw(n);
    for (int k = 0; k < n; ++k) {
        logw[k] = std::log(p.weights[k] + 1e-300) + prof.log_density(k, t, y);
        top = std::max(top, logw[k]);
    }
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
        const double w = std::exp(logw[k] - top);
        num += w * prof.late_vol[k] * prof.late_vol[k];
        den += w;
    }
    return std::sqrt(num / den);
}

struct EulerSetup {
    double x10 = 0.0, x20 = 0.0;
    double alpha1_T = 0.0, alpha2_T = 0.0;
    double floor1 = 0.0, floor2 = 0.0;
    double dt = 0.0, sqrt_dt = 0.0;
};

EulerSetup make_euler_setup(const CrossModel& model, double maturity,
                            const SimulationConfig& cfg) {
    EulerSetup s;
    s.x10 = model.asset1.effective_spot();
    s.x20 = model.asset2.effective_spot();
    s.alpha1_T = model.asset1.shift_at(maturity);
    s.alpha2_T = model.asset2.shift_at(maturity);
    const double eps = std::numeric_limits<double>::epsilon();
    s.floor1 = eps * model.asset1.spot;
    s.floor2 = eps * model.asset2.spot;
    s.dt = maturity / cfg.n_steps;
    s.sqrt_dt = std::sqrt(s.dt);
    return s;
}

void common_checks(const CrossModel& model, double maturity,
                   const SimulationConfig& cfg) {
    model.validate();
    cfg.validate();
    if (!(maturity > 0.0))
        throw invalid_input_error("simulate: maturity must be > 0");
    if (maturity > std::min(model.asset1.reference_maturity,
                            model.asset2.reference_maturity) + 1e-9)
        throw invalid_input_error(
            "simulate: maturity beyond the assets' reference maturity");
}

}  // namespace

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::muvm_exact: return "muvm-exact";
        case Scheme::scmd_euler: return "scmd-euler";
        case Scheme::mvmd_euler: return "mvmd-euler";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "muvm-exact") return Scheme::muvm_exact;
    if (name == "scmd-euler") return Scheme::scmd_euler;
    if (name == "mvmd-euler") return Scheme::mvmd_euler;
    throw invalid_input_error("unknown scheme: " + name);
}

void SimulationConfig::validate() const {
    if (n_paths < 2)
        throw invalid_input_error("simulation config: need at least 2 paths");
    if (n_steps < 1)
        throw invalid_input_error("simulation config: need at least 1 step");
    if (antithetic && (n_paths % 2) != 0)
        throw invalid_input_error(
            "simulation config: antithetic sampling needs an even path count");
}

SimulationResult simulate_muvm(const CrossModel& model, double maturity,
                               const SimulationConfig& cfg) {
    common_checks(model, maturity, cfg);
    const auto start = Clock::now();

    SimulationResult res;
    res.config = cfg;
    res.config.scheme = Scheme::muvm_exact;
    res.maturity = maturity;
    res.terminal_s1.resize(cfg.n_paths);
    res.terminal_s2.resize(cfg.n_paths);
    res.scenario_draws.resize(cfg.n_paths, 2);

    const double x10 = model.asset1.effective_spot();
    const double x20 = model.asset2.effective_spot();
    const double alpha1 = model.asset1.shift_at(maturity);
    const double alpha2 = model.asset2.shift_at(maturity);
    const double sqrt_t = std::sqrt(maturity);

    const std::int64_t n_draws = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    for (std::int64_t d = 0; d < n_draws; ++d) {
        PathRng rng(cfg.seed, static_cast<std::uint64_t>(d));
        const int i1 = draw_component(model.asset1.weights, rng.uniform());
        const int i2 = draw_component(model.asset2.weights, rng.uniform());
        const double z1 = rng.normal();
        const double z2 = rng.normal();

        const double s1 = model.asset1.term_vols[i1];
        const double s2 = model.asset2.term_vols[i2];
        const double rho = model.corr.rho(i1, i2);
        const double mu1 = model.drift1(i1, i2);
        const double mu2 = model.drift2();

        auto terminal = [&](double g1, double g2) {
            const double zc = rho * g1 + std::sqrt(1.0 - rho * rho) * g2;
            const double x1 = x10 * std::exp((mu1 - 0.5 * s1 * s1) * maturity +
                                             s1 * sqrt_t * g1);
            const double x2 = x20 * std::exp((mu2 - 0.5 * s2 * s2) * maturity +
                                             s2 * sqrt_t * zc);
            return std::pair<double, double>{x1 + alpha1, x2 + alpha2};
        };

        const std::int64_t p = cfg.antithetic ? 2 * d : d;
        auto [a1, a2] = terminal(z1, z2);
        res.terminal_s1[p] = a1;
        res.terminal_s2[p] = a2;
        res.scenario_draws(p, 0) = i1;
        res.scenario_draws(p, 1) = i2;
        if (cfg.antithetic) {
            auto [b1, b2] = terminal(-z1, -z2);
            res.terminal_s1[p + 1] = b1;
            res.terminal_s2[p + 1] = b2;
            res.scenario_draws(p + 1, 0) = i1;
            res.scenario_draws(p + 1, 1) = i2;
        }
    }
    res.elapsed_seconds = seconds_since(start);
    return res;
}

SimulationResult simulate_scmd(const CrossModel& model, double maturity,
                               const SimulationConfig& cfg) {
    common_checks(model, maturity, cfg);
    if (model.corr.is_scenario())
        throw unsupported_spec_error(
            "simulate_scmd: scenario correlations are not representable; use "
            "the mvmd scheme");
    const auto start = Clock::now();

    SimulationResult res;
    res.config = cfg;
    res.config.scheme = Scheme::scmd_euler;
    res.maturity = maturity;
    res.terminal_s1.resize(cfg.n_paths);
    res.terminal_s2.resize(cfg.n_paths);

    const EulerSetup setup = make_euler_setup(model, maturity, cfg);
    const SimProfile prof1(model.asset1);
    const SimProfile prof2(model.asset2);
    const double rho = model.corr.constant_rho;
    const double rho_residual = std::sqrt(1.0 - rho * rho);
    const double mu1 = model.asset1.drift_mu;
    const double mu2 = model.asset2.drift_mu;

    const std::int64_t n_draws = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    for (std::int64_t d = 0; d < n_draws; ++d) {
        PathRng rng(cfg.seed, static_cast<std::uint64_t>(d));
        const int n_tracks = cfg.antithetic ? 2 : 1;
        double y1[2] = {setup.x10, setup.x10};
        double y2[2] = {setup.x20, setup.x20};
        bool absorbed[2] = {false, false};

        for (int j = 0; j < cfg.n_steps; ++j) {
            const double t = j * setup.dt;
            const double z1 = rng.normal();
            const double z2 = rng.normal();
            for (int a = 0; a < n_tracks; ++a) {
                const double g1 = (a == 0) ? z1 : -z1;
                const double g2 = (a == 0) ? z2 : -z2;
                const double nu1 =
                    (t <= 0.0) ? prof1.sigma0 : sim_local_vol(prof1, t, y1[a]);
                const double nu2 =
                    (t <= 0.0) ? prof2.sigma0 : sim_local_vol(prof2, t, y2[a]);
                const double drift1 =
                    model.quanto_applied ? mu1 - rho * nu1 * nu2 : mu1;
                const double gc = rho * g1 + rho_residual * g2;
                y1[a] *= std::exp((drift1 - 0.5 * nu1 * nu1) * setup.dt +
                                  nu1 * setup.sqrt_dt * g1);
                y2[a] *= std::exp((mu2 - 0.5 * nu2 * nu2) * setup.dt +
                                  nu2 * setup.sqrt_dt * gc);
                if (y1[a] < setup.floor1) { y1[a] = setup.floor1; absorbed[a] = true; }
                if (y2[a] < setup.floor2) { y2[a] = setup.floor2; absorbed[a] = true; }
            }
        }
        for (int a = 0; a < n_tracks; ++a) {
            const std::int64_t p = cfg.antithetic ? 2 * d + a : d;
            res.terminal_s1[p] = y1[a] + setup.alpha1_T;
            res.terminal_s2[p] = y2[a] + setup.alpha2_T;
            if (absorbed[a]) ++res.absorbed_paths;
        }
    }
    res.elapsed_seconds = seconds_since(start);
    return res;
}

SimulationResult simulate_mvmd(const CrossModel& model, double maturity,
                               const SimulationConfig& cfg) {
    common_checks(model, maturity, cfg);
    const auto start = Clock::now();

    SimulationResult res;
    res.config = cfg;
    res.config.scheme = Scheme::mvmd_euler;
    res.maturity = maturity;
    res.terminal_s1.resize(cfg.n_paths);
    res.terminal_s2.resize(cfg.n_paths);

    const EulerSetup setup = make_euler_setup(model, maturity, cfg);
    const SimProfile prof1(model.asset1);
    const SimProfile prof2(model.asset2);
    const int n1 = model.asset1.n_components();
    const int n2 = model.asset2.n_components();
    const double mu2 = model.asset2.drift_mu;

    // Component (co)variance tables are refreshed once per step: the vol
    // profiles are piecewise constant in time, so cost is O(N^2) per step.
    Eigen::VectorXd var1(n1), var2(n2);
    Eigen::MatrixXd cov12(n1, n2), logw(n1, n2);

    // Local diffusion matrix, drift adjustment and Cholesky at state (y1,y2).
    auto local_step_terms = [&](double t, double y1, double y2, double& m11,
                                double& m22, double& m12, double& drift1) {
        if (t <= model.asset1.epsilon_floor) {
            // Common-volatility window: all component densities coincide.
            double rho_bar = 0.0, mu_bar = 0.0;
            for (int a = 0; a < n1; ++a)
                for (int b = 0; b < n2; ++b) {
                    const double w =
                        model.asset1.weights[a] * model.asset2.weights[b];
                    rho_bar += w * model.corr.rho(a, b);
                    mu_bar += w * model.scenario_drift1(a, b);
                }
            m11 = prof1.sigma0 * prof1.sigma0;
            m22 = prof2.sigma0 * prof2.sigma0;
            m12 = rho_bar * prof1.sigma0 * prof2.sigma0;
            drift1 = mu_bar;
            return;
        }
        double top = -std::numeric_limits<double>::infinity();
        const double log_y1 = std::log(y1 / setup.x10);
        const double log_y2 = std::log(y2 / setup.x20);
        for (int a = 0; a < n1; ++a) {
            for (int b = 0; b < n2; ++b) {
                const double va = var1[a];
                const double vb = var2[b];
                // Bivariate log density with the scenario correlation; the
                // state-only terms are common to all components and cancel
                // in the normalization.
                const double za =
                    (log_y1 - model.asset1.drift_mu * t + 0.5 * va) /
                    std::sqrt(va);
                const double zb =
                    (log_y2 - model.asset2.drift_mu * t + 0.5 * vb) /
                    std::sqrt(vb);
                const double r = cov12(a, b) / std::sqrt(va * vb);
                const double one_minus = 1.0 - r * r;
                const double quad =
                    (za * za - 2.0 * r * za * zb + zb * zb) / one_minus;
                logw(a, b) = std::log(model.asset1.weights[a] + 1e-300) +
                             std::log(model.asset2.weights[b] + 1e-300) -
                             0.5 * std::log(va * vb * one_minus) - 0.5 * quad;
                top = std::max(top, logw(a, b));
            }
        }
        double den = 0.0, s11 = 0.0, s22 = 0.0, s12 = 0.0, sd = 0.0;
        for (int a = 0; a < n1; ++a)
            for (int b = 0; b < n2; ++b) {
                const double w = std::exp(logw(a, b) - top);
                den += w;
                s11 += w * prof1.late_vol[a] * prof1.late_vol[a];
                s22 += w * prof2.late_vol[b] * prof2.late_vol[b];
                s12 += w * model.corr.rho(a, b) * prof1.late_vol[a] *
                       prof2.late_vol[b];
                sd += w * model.scenario_drift1(a, b);
            }
        m11 = s11 / den;
        m22 = s22 / den;
        m12 = s12 / den;
        drift1 = sd / den;
    };

    const std::int64_t n_draws = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    for (std::int64_t d = 0; d < n_draws; ++d) {
        PathRng rng(cfg.seed, static_cast<std::uint64_t>(d));
        const int n_tracks = cfg.antithetic ? 2 : 1;
        double y1[2] = {setup.x10, setup.x10};
        double y2[2] = {setup.x20, setup.x20};
        bool absorbed[2] = {false, false};

        for (int j = 0; j < cfg.n_steps; ++j) {
            const double t = j * setup.dt;
            if (t > model.asset1.epsilon_floor) {
                for (int a = 0; a < n1; ++a) var1[a] = prof1.variance(a, t);
                for (int b = 0; b < n2; ++b) var2[b] = prof2.variance(b, t);
                const double eps = model.asset1.epsilon_floor;
                for (int a = 0; a < n1; ++a)
                    for (int b = 0; b < n2; ++b)
                        cov12(a, b) =
                            model.corr.rho(a, b) *
                            (prof1.sigma0 * prof2.sigma0 * eps +
                             prof1.late_vol[a] * prof2.late_vol[b] * (t - eps));
            }
            const double z1 = rng.normal();
            const double z2 = rng.normal();
            for (int a = 0; a < n_tracks; ++a) {
                const double g1 = (a == 0) ? z1 : -z1;
                const double g2 = (a == 0) ? z2 : -z2;
                double m11, m22, m12, drift1_state;
                local_step_terms(t, y1[a], y2[a], m11, m22, m12, drift1_state);
                const double drift1 =
                    model.quanto_applied ? drift1_state : model.asset1.drift_mu;
                const double l11 = std::sqrt(m11);
                const double l21 = m12 / l11;
                const double resid = m22 - l21 * l21;
                if (!(resid > 0.0)) {
                    char msg[160];
                    std::snprintf(msg, sizeof(msg),
                                  "simulate_mvmd: diffusion matrix lost "
                                  "positive definiteness at t=%.6g, y1=%.6g, "
                                  "y2=%.6g",
                                  t, y1[a], y2[a]);
                    throw diffusion_degeneracy_error(msg);
                }
                const double l22 = std::sqrt(resid);
                y1[a] *= std::exp((drift1 - 0.5 * m11) * setup.dt +
                                  setup.sqrt_dt * l11 * g1);
                y2[a] *= std::exp((mu2 - 0.5 * m22) * setup.dt +
                                  setup.sqrt_dt * (l21 * g1 + l22 * g2));
                if (y1[a] < setup.floor1) { y1[a] = setup.floor1; absorbed[a] = true; }
                if (y2[a] < setup.floor2) { y2[a] = setup.floor2; absorbed[a] = true; }
            }
        }
        for (int a = 0; a < n_tracks; ++a) {
            const std::int64_t p = cfg.antithetic ? 2 * d + a : d;
            res.terminal_s1[p] = y1[a] + setup.alpha1_T;
            res.terminal_s2[p] = y2[a] + setup.alpha2_T;
            if (absorbed[a]) ++res.absorbed_paths;
        }
    }
    res.elapsed_seconds = seconds_since(start);
    return res;
}

double pairwise_sum(const double* data, std::int64_t n) {
    if (n <= 8) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < n; ++i) acc += data[i];
        return acc;
    }
    const std::int64_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

namespace {

McEstimate mc_stats(const std::vector<double>& values, bool antithetic) {
    std::vector<double> samples;
    if (antithetic) {
        samples.resize(values.size() / 2);
        for (std::size_t i = 0; i < samples.size(); ++i)
            samples[i] = 0.5 * (values[2 * i] + values[2 * i + 1]);
    } else {
        samples = values;
    }
    const std::int64_t n = static_cast<std::int64_t>(samples.size());
    const double mean = pairwise_sum(samples.data(), n) / n;
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double d = samples[i] - mean;
        sq[i] = d * d;
    }
    McEstimate e;
    e.value = mean;
    e.std_error = (n > 1)
                      ? std::sqrt(pairwise_sum(sq.data(), n) / (n - 1) / n)
                      : std::numeric_limits<double>::infinity();
    return e;
}

template <class Underlying>
std::vector<McEstimate> payoff_estimates(const SimulationResult& res,
                                         const std::vector<double>& strikes,
                                         double discount_factor,
                                         OptionType type,
                                         Underlying&& underlying) {
    if (res.terminal_s1.size() == 0)
        throw invalid_input_error("mc pricing: empty sample set");
    if (strikes.empty())
        throw invalid_input_error("mc pricing: no strikes supplied");
    const std::int64_t n = res.terminal_s1.size();
    std::vector<McEstimate> out;
    out.reserve(strikes.size());
    std::vector<double> values(n);
    for (double strike : strikes) {
        for (std::int64_t p = 0; p < n; ++p) {
            const double payoff = (type == OptionType::call)
                                      ? std::max(underlying(p) - strike, 0.0)
                                      : std::max(strike - underlying(p), 0.0);
            values[p] = discount_factor * payoff;
        }
        out.push_back(mc_stats(values, res.config.antithetic));
    }
    return out;
}

}  // namespace

std::vector<McEstimate> mc_price_cross(const SimulationResult& res,
                                       const std::vector<double>& strikes,
                                       double discount_factor,
                                       OptionType type) {
    return payoff_estimates(res, strikes, discount_factor, type,
                            [&](std::int64_t p) {
                                return res.terminal_s1[p] * res.terminal_s2[p];
                            });
}

std::vector<McEstimate> mc_price_vanilla(const SimulationResult& res,
                                         int asset_index,
                                         const std::vector<double>& strikes,
                                         double discount_factor,
                                         OptionType type) {
    if (asset_index != 1 && asset_index != 2)
        throw invalid_input_error("mc_price_vanilla: asset index must be 1 or 2");
    const Eigen::VectorXd& s =
        (asset_index == 1) ? res.terminal_s1 : res.terminal_s2;
    return payoff_estimates(res, strikes, discount_factor, type,
                            [&](std::int64_t p) { return s[p]; });
}

McEstimate estimate_terminal_correlation(const SimulationResult& res) {
    const std::int64_t n = res.terminal_s1.size();
    if (n < 3)
        throw invalid_input_error(
            "estimate_terminal_correlation: need at least 3 samples");

    const double mean1 = res.terminal_s1.mean();
    const double mean2 = res.terminal_s2.mean();
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double dx = res.terminal_s1[i] - mean1;
        const double dy = res.terminal_s2[i] - mean2;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw undefined_correlation_error(
            "estimate_terminal_correlation: degenerate sample variance");
    const double r = sxy / std::sqrt(sxx * syy);

    // Leave-one-out correlations from the centered sums, O(n):
    // dropping point i shifts the means by -d/(n-1) in centered coordinates.
    const double m = static_cast<double>(n - 1);
    std::vector<double> loo(n);
    double loo_mean = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double dx = res.terminal_s1[i] - mean1;
        const double dy = res.terminal_s2[i] - mean2;
        const double dxx = sxx - dx * dx - dx * dx / m;
        const double dyy = syy - dy * dy - dy * dy / m;
        const double dxy = sxy - dx * dy - dx * dy / m;
        loo[i] = (dxx > 0.0 && dyy > 0.0) ? dxy / std::sqrt(dxx * dyy) : r;
        loo_mean += loo[i];
    }
    loo_mean /= n;
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = loo[i] - loo_mean;
        acc += d * d;
    }
    McEstimate e;
    e.value = r;
    e.std_error = std::sqrt(acc * (n - 1) / static_cast<double>(n));
    return e;
}

namespace {
constexpr char kDumpMagic[8] = {'M', 'X', 'D', 'S', 'M', 'P', '0', '1'};
}

void write_sample_dump(const std::string& path, const SimulationResult& res) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input_error("sample dump: cannot open " + path);
    const std::uint32_t version = 1;
    const std::uint64_t n = static_cast<std::uint64_t>(res.terminal_s1.size());
    const std::uint64_t seed = res.config.seed;
    out.write(kDumpMagic, sizeof(kDumpMagic));
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
    out.write(reinterpret_cast<const char*>(res.terminal_s1.data()),
              static_cast<std::streamsize>(n * sizeof(double)));
    out.write(reinterpret_cast<const char*>(res.terminal_s2.data()),
              static_cast<std::streamsize>(n * sizeof(double)));
    if (!out) throw invalid_input_error("sample dump: write failed for " + path);
}

SimulationResult read_sample_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input_error("sample dump: cannot open " + path);
    char magic[8];
    std::uint32_t version = 0;
    std::uint64_t n = 0, seed = 0;
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kDumpMagic, sizeof(magic)) != 0)
        throw invalid_input_error("sample dump: bad magic in " + path);
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != 1)
        throw invalid_input_error("sample dump: unsupported version");
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&seed), sizeof(seed));
    SimulationResult res;
    res.config.seed = seed;
    res.config.n_paths = static_cast<std::int64_t>(n);
    res.terminal_s1.resize(static_cast<Eigen::Index>(n));
    res.terminal_s2.resize(static_cast<Eigen::Index>(n));
    in.read(reinterpret_cast<char*>(res.terminal_s1.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    in.read(reinterpret_cast<char*>(res.terminal_s2.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw invalid_input_error("sample dump: truncated file " + path);
    return res;
}

}  // namespace mixdyn
