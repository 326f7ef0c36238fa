// Command-line front end: smile calibration, implied-correlation fits,
// cross pricing, smile extrapolation and Monte Carlo runs over the JSON /
// CSV formats documented in the README.
//
// Exit codes: 0 success, 1 calibration non-convergence (or boundary
// solution), 2 input error, 3 numerical error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixdyn/calibration.hpp"
#include "mixdyn/market_io.hpp"
#include "mixdyn/montecarlo.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCalibration = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_strike_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        out.push_back(std::stod(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (out.empty())
        throw mixdyn::invalid_input_error("empty strike list");
    return out;
}

std::vector<double> parse_strike_grid(const std::string& text) {
    // "lo:hi:n" inclusive grid.
    const std::size_t c1 = text.find(':');
    const std::size_t c2 = text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw mixdyn::invalid_input_error(
            "strike grid must be formatted lo:hi:n");
    const double lo = std::stod(text.substr(0, c1));
    const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const int n = std::stoi(text.substr(c2 + 1));
    if (n < 2 || !(hi > lo))
        throw mixdyn::invalid_input_error("strike grid needs hi > lo and n >= 2");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

mixdyn::CorrelationSpec parse_rho_matrix(const std::string& text) {
    // "r11,r12;r21,r22" rows separated by ';'.
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t next = text.find(';', pos);
        if (next == std::string::npos) next = text.size();
        rows.push_back(parse_strike_list(text.substr(pos, next - pos)));
        pos = next + 1;
        if (next == text.size()) break;
    }
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size())
            throw mixdyn::invalid_input_error("ragged rho matrix");
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return mixdyn::CorrelationSpec::scenario(m);
}

void warn_default_rates(bool rates_present, const std::string& what) {
    if (!rates_present)
        std::cerr << "WARNING: " << what
                  << " carries no rates; defaulting all rates to 0. Forwards "
                     "and discount factors will assume zero carry.\n";
}

struct CorrSource {
    std::optional<double> rho;
    std::string rho_matrix;
    std::string corr_file;

    mixdyn::CorrelationSpec resolve() const {
        const int n = (rho ? 1 : 0) + (rho_matrix.empty() ? 0 : 1) +
                      (corr_file.empty() ? 0 : 1);
        if (n != 1)
            throw mixdyn::invalid_input_error(
                "exactly one of --rho, --rho-matrix, --corr-file is required");
        if (rho) return mixdyn::CorrelationSpec::constant(*rho);
        if (!rho_matrix.empty()) return parse_rho_matrix(rho_matrix);
        return mixdyn::load_correlation_file(corr_file);
    }
};

int run_calibrate_smile(const std::string& input, int components,
                        double maturity, const std::string& out,
                        const std::string& fit_table, double atm_weight,
                        std::optional<double> fix_beta, std::uint64_t seed) {
    const mixdyn::MarketFile mf = mixdyn::load_market_file(input);
    warn_default_rates(mf.rates_present, input);

    mixdyn::MarketInputs market;
    market.spot = mf.spot;
    market.drift_mu = mf.drift();
    market.discount_factor = std::exp(-mf.domestic_rate * maturity);

    mixdyn::SmileCalibrationConfig config;
    config.atm_weight = atm_weight;
    config.fix_beta = fix_beta;
    config.seed = seed;

    const auto quotes = mixdyn::quotes_at_maturity(mf, maturity);
    const mixdyn::SmileFitReport report =
        mixdyn::calibrate_smile(quotes, components, market, config);

    mixdyn::save_params_file(out, report.params);
    if (!fit_table.empty()) mixdyn::write_smile_fit_csv(fit_table, report);

    if (!report.sufficient_quotes)
        std::cerr << "WARNING: fewer than 2N+1 quotes; the fit may be "
                     "under-determined.\n";
    std::cout << "calibrated " << mf.asset_id << ": components=" << components
              << " objective=" << mixdyn::format_sig(report.objective)
              << " vol_rmse=" << mixdyn::format_sig(report.vol_rmse)
              << " converged=" << (report.converged ? "yes" : "no") << "\n";
    for (const mixdyn::SmileQuoteFit& row : report.per_quote)
        std::cout << "  K=" << mixdyn::format_sig(row.strike)
                  << " mkt=" << mixdyn::format_sig(row.market_vol)
                  << " model=" << mixdyn::format_sig(row.model_vol)
                  << " |dvol|=" << mixdyn::format_sig(row.abs_vol_diff)
                  << " |dprice|=" << mixdyn::format_sig(row.abs_price_diff)
                  << "\n";
    return report.converged ? kExitOk : kExitCalibration;
}

int run_implied_corr(const std::string& asset1_path,
                     const std::string& asset2_path,
                     const std::string& cross_path, double maturity,
                     const std::string& engine_name, bool random_corr,
                     std::uint64_t seed, std::int64_t paths, int steps,
                     const std::string& out, const std::string& csv) {
    const mixdyn::ShiftedMixtureParams a1 = mixdyn::load_params_file(asset1_path);
    const mixdyn::ShiftedMixtureParams a2 = mixdyn::load_params_file(asset2_path);
    const mixdyn::MarketFile cross = mixdyn::load_market_file(cross_path);
    warn_default_rates(cross.rates_present, cross_path);

    const mixdyn::QuoteSet quotes =
        mixdyn::quote_set_from_market(cross, maturity);

    mixdyn::CorrelationCalibrationConfig config;
    config.rates.r_domestic = cross.domestic_rate;
    config.rates.r_foreign1 = cross.foreign_rate;
    config.rates.r_foreign2 = cross.domestic_rate - a2.drift_mu;
    config.seed = seed;
    config.sim.seed = seed;
    config.sim.n_paths = paths;
    config.sim.n_steps = steps;

    mixdyn::CorrelationFitReport report;
    if (random_corr) {
        report = mixdyn::calibrate_random_correlation(a1, a2, quotes, config);
    } else {
        report = mixdyn::calibrate_implied_correlation(
            a1, a2, quotes, mixdyn::correlation_engine_from_string(engine_name),
            config);
    }

    mixdyn::save_correlation_report_json(out, report);
    if (!csv.empty()) mixdyn::write_correlation_report_csv(csv, report);

    if (report.identifiability_warning)
        std::cerr << "WARNING: fewer quotes than free correlation entries.\n";
    if (report.fitted.is_scenario()) {
        std::cout << "fitted scenario correlations:";
        for (Eigen::Index r = 0; r < report.fitted.scenario_rho.rows(); ++r)
            for (Eigen::Index c = 0; c < report.fitted.scenario_rho.cols(); ++c)
                std::cout << ' '
                          << mixdyn::format_sig(report.fitted.scenario_rho(r, c));
        std::cout << "\n  E[rho]=" << mixdyn::format_sig(report.stats.mean)
                  << " Std[rho]=" << mixdyn::format_sig(report.stats.stdev)
                  << "\n";
    } else {
        std::cout << "fitted rho="
                  << mixdyn::format_sig(report.fitted.constant_rho) << "\n";
    }
    std::cout << "objective=" << mixdyn::format_sig(report.objective_value)
              << " converged=" << (report.converged ? "yes" : "no")
              << " boundary=" << (report.boundary_solution ? "yes" : "no")
              << "\n";

    if (report.boundary_solution) {
        std::cerr << "WARNING: no interior optimum; the fit sits on the "
                     "correlation boundary.\n";
        return kExitCalibration;
    }
    return report.converged ? kExitOk : kExitCalibration;
}

int run_price_cross(const std::string& asset1_path,
                    const std::string& asset2_path, const CorrSource& corr,
                    const std::string& strikes_text, double maturity,
                    double discount_factor, const std::string& out,
                    double r_dom, double r_for1, double r_for2) {
    const mixdyn::ShiftedMixtureParams a1 = mixdyn::load_params_file(asset1_path);
    const mixdyn::ShiftedMixtureParams a2 = mixdyn::load_params_file(asset2_path);
    const mixdyn::ExtrapolatedSmile smile = mixdyn::extrapolate_cross_smile(
        a1, a2, corr.resolve(), parse_strike_list(strikes_text), maturity,
        discount_factor, mixdyn::CrossRates{r_dom, r_for1, r_for2});
    mixdyn::write_smile_curve_csv(out, smile);
    std::cout << "cross forward=" << mixdyn::format_sig(smile.forward) << "\n";
    for (std::size_t i = 0; i < smile.strikes.size(); ++i)
        std::cout << "K=" << mixdyn::format_sig(smile.strikes[i])
                  << " price=" << mixdyn::format_sig(smile.prices[i])
                  << " vol=" << mixdyn::format_sig(smile.implied_vols[i]) << "\n";
    return kExitOk;
}

int run_extrapolate(const std::string& asset1_path,
                    const std::string& asset2_path,
                    const std::string& cross_path, double maturity,
                    const std::string& corr_source,
                    const std::string& corr_file,
                    const std::string& strike_grid,
                    const std::string& strikes_text, const std::string& out,
                    std::uint64_t seed) {
    const mixdyn::ShiftedMixtureParams a1 = mixdyn::load_params_file(asset1_path);
    const mixdyn::ShiftedMixtureParams a2 = mixdyn::load_params_file(asset2_path);
    const mixdyn::MarketFile cross = mixdyn::load_market_file(cross_path);
    warn_default_rates(cross.rates_present, cross_path);

    mixdyn::CorrelationCalibrationConfig config;
    config.rates.r_domestic = cross.domestic_rate;
    config.rates.r_foreign1 = cross.foreign_rate;
    config.rates.r_foreign2 = cross.domestic_rate - a2.drift_mu;
    config.seed = seed;

    mixdyn::CorrelationSpec corr = mixdyn::CorrelationSpec::constant(0.0);
    if (corr_source == "atm") {
        // Fit the single correlation to the at-the-money quote only.
        mixdyn::QuoteSet quotes = mixdyn::quote_set_from_market(cross, maturity);
        std::size_t atm = 0;
        for (std::size_t i = 0; i < quotes.quotes.size(); ++i)
            if (std::abs(quotes.quotes[i].strike - quotes.forward) <
                std::abs(quotes.quotes[atm].strike - quotes.forward))
                atm = i;
        for (std::size_t i = 0; i < quotes.quotes.size(); ++i)
            quotes.quotes[i].weight = (i == atm) ? 1.0 : 0.0;
        const mixdyn::CorrelationFitReport fit =
            mixdyn::calibrate_implied_correlation(
                a1, a2, quotes, mixdyn::CorrelationEngine::mvmd_semianalytic,
                config);
        corr = fit.fitted;
        std::cout << "atm-fitted rho="
                  << mixdyn::format_sig(corr.constant_rho) << "\n";
    } else if (corr_source == "file") {
        if (corr_file.empty())
            throw mixdyn::invalid_input_error(
                "--corr-source file requires --corr-file");
        corr = mixdyn::load_correlation_file(corr_file);
    } else {
        throw mixdyn::invalid_input_error("--corr-source must be atm or file");
    }

    std::vector<double> strikes;
    if (!strike_grid.empty())
        strikes = parse_strike_grid(strike_grid);
    else if (!strikes_text.empty())
        strikes = parse_strike_list(strikes_text);
    else
        throw mixdyn::invalid_input_error(
            "one of --strike-grid or --strikes is required");

    const double df = std::exp(-cross.domestic_rate * maturity);
    const mixdyn::ExtrapolatedSmile smile = mixdyn::extrapolate_cross_smile(
        a1, a2, corr, strikes, maturity, df, config.rates);
    mixdyn::write_smile_curve_csv(out, smile);
    std::cout << "wrote " << smile.strikes.size() << " strikes to " << out
              << " (forward=" << mixdyn::format_sig(smile.forward) << ")\n";
    return kExitOk;
}

int run_simulate(const std::string& asset1_path, const std::string& asset2_path,
                 const CorrSource& corr, const std::string& scheme_name,
                 std::int64_t paths, int steps, std::uint64_t seed,
                 double maturity, bool antithetic, bool quanto,
                 const std::string& strikes_text, double discount_factor,
                 const std::string& dump, const std::string& out) {
    const mixdyn::ShiftedMixtureParams a1 = mixdyn::load_params_file(asset1_path);
    const mixdyn::ShiftedMixtureParams a2 = mixdyn::load_params_file(asset2_path);
    mixdyn::CrossModel model =
        mixdyn::make_cross_model(a1, a2, corr.resolve(), mixdyn::CrossRates{});
    if (quanto) model = mixdyn::quanto_adjust(model);

    mixdyn::SimulationConfig cfg;
    cfg.n_paths = paths;
    cfg.n_steps = steps;
    cfg.seed = seed;
    cfg.antithetic = antithetic;
    cfg.scheme = mixdyn::scheme_from_string(scheme_name);

    mixdyn::SimulationResult res;
    switch (cfg.scheme) {
        case mixdyn::Scheme::muvm_exact:
            res = mixdyn::simulate_muvm(model, maturity, cfg);
            break;
        case mixdyn::Scheme::scmd_euler:
            res = mixdyn::simulate_scmd(model, maturity, cfg);
            break;
        case mixdyn::Scheme::mvmd_euler:
            res = mixdyn::simulate_mvmd(model, maturity, cfg);
            break;
    }

    json summary;
    summary["schema_version"] = 1;
    summary["scheme"] = mixdyn::to_string(cfg.scheme);
    summary["n_paths"] = cfg.n_paths;
    summary["n_steps"] = cfg.n_steps;
    summary["seed"] = cfg.seed;
    summary["antithetic"] = cfg.antithetic;
    summary["maturity"] = maturity;
    summary["elapsed_seconds"] = res.elapsed_seconds;
    summary["absorbed_paths"] = res.absorbed_paths;
    summary["mean_s1"] = res.terminal_s1.mean();
    summary["mean_s2"] = res.terminal_s2.mean();
    const mixdyn::McEstimate corr_est =
        mixdyn::estimate_terminal_correlation(res);
    summary["terminal_correlation"] = corr_est.value;
    summary["terminal_correlation_se"] = corr_est.std_error;

    if (!strikes_text.empty()) {
        const std::vector<double> strikes = parse_strike_list(strikes_text);
        const auto prices =
            mixdyn::mc_price_cross(res, strikes, discount_factor);
        summary["cross_prices"] = json::array();
        for (std::size_t i = 0; i < strikes.size(); ++i)
            summary["cross_prices"].push_back({{"strike", strikes[i]},
                                               {"price", prices[i].value},
                                               {"std_error",
                                                prices[i].std_error}});
    }

    if (!dump.empty()) mixdyn::write_sample_dump(dump, res);

    std::ofstream out_stream(out);
    if (!out_stream)
        throw mixdyn::invalid_input_error("cannot open " + out + " for writing");
    out_stream << summary.dump(2) << "\n";
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shifted lognormal-mixture pricing and calibration toolkit"};
    app.require_subcommand(1);

    // calibrate-smile ---------------------------------------------------
    auto* cal = app.add_subcommand("calibrate-smile",
                                   "Fit a shifted mixture to one maturity's "
                                   "vol quotes");
    std::string cal_input, cal_out = "params.json", cal_fit_table;
    int cal_components = 2;
    double cal_maturity = 0.5, cal_atm_weight = 1.0;
    double cal_fix_beta_value = 0.0;
    std::uint64_t cal_seed = 20150219ULL;
    cal->add_option("input", cal_input, "market data JSON")->required();
    cal->add_option("--components", cal_components, "mixture components");
    cal->add_option("--maturity", cal_maturity, "quote maturity (years)")
        ->required();
    cal->add_option("--out", cal_out, "output params JSON");
    cal->add_option("--fit-table", cal_fit_table, "fit table CSV path");
    cal->add_option("--atm-weight", cal_atm_weight,
                    "extra weight on the ATM quote");
    auto* fix_beta_opt =
        cal->add_option("--fix-beta", cal_fix_beta_value, "pin the shift");
    cal->add_option("--seed", cal_seed, "multi-start seed");

    // implied-corr ------------------------------------------------------
    auto* ic = app.add_subcommand("implied-corr",
                                  "Calibrate the cross correlation to quotes");
    std::string ic_a1, ic_a2, ic_cross, ic_engine = "mvmd-semianalytic";
    std::string ic_out = "corr_report.json", ic_csv;
    double ic_maturity = 0.5;
    bool ic_random = false;
    std::uint64_t ic_seed = 1ULL;
    std::int64_t ic_paths = 100'000;
    int ic_steps = 125;
    ic->add_option("--asset1", ic_a1, "asset 1 params JSON")->required();
    ic->add_option("--asset2", ic_a2, "asset 2 params JSON")->required();
    ic->add_option("--cross", ic_cross, "cross market JSON")->required();
    ic->add_option("--maturity", ic_maturity, "quote maturity")->required();
    ic->add_option("--engine", ic_engine,
                   "mvmd-semianalytic or scmd-montecarlo");
    ic->add_flag("--random-corr", ic_random, "fit a scenario matrix");
    ic->add_option("--seed", ic_seed, "seed (MC engine / multi-starts)");
    ic->add_option("--paths", ic_paths, "MC paths (scmd engine)");
    ic->add_option("--steps", ic_steps, "MC steps (scmd engine)");
    ic->add_option("--out", ic_out, "report JSON path");
    ic->add_option("--csv", ic_csv, "report CSV path");

    // price-cross -------------------------------------------------------
    auto* pc = app.add_subcommand("price-cross",
                                  "Price cross options semi-analytically");
    std::string pc_a1, pc_a2, pc_strikes, pc_out = "cross_prices.csv";
    CorrSource pc_corr;
    double pc_maturity = 0.5, pc_df = 1.0;
    double pc_rdom = 0.0, pc_rfor1 = 0.0, pc_rfor2 = 0.0;
    pc->add_option("--asset1", pc_a1)->required();
    pc->add_option("--asset2", pc_a2)->required();
    auto* pc_rho_opt = pc->add_option("--rho", "constant correlation");
    pc->add_option("--rho-matrix", pc_corr.rho_matrix,
                   "scenario matrix r11,r12;r21,r22");
    pc->add_option("--corr-file", pc_corr.corr_file, "correlation JSON");
    pc->add_option("--strikes", pc_strikes, "comma-separated strikes")
        ->required();
    pc->add_option("-T,--maturity", pc_maturity)->required();
    pc->add_option("--df", pc_df, "discount factor");
    pc->add_option("--r-dom", pc_rdom, "domestic rate of asset 2");
    pc->add_option("--r-for1", pc_rfor1, "foreign rate of asset 1");
    pc->add_option("--r-for2", pc_rfor2, "foreign rate of asset 2");
    pc->add_option("--out", pc_out, "output CSV");

    // extrapolate ---------------------------------------------------------
    auto* ex = app.add_subcommand("extrapolate",
                                  "Extrapolate a cross smile from the legs");
    std::string ex_a1, ex_a2, ex_cross, ex_source = "atm", ex_corr_file;
    std::string ex_grid, ex_strikes, ex_out = "cross_smile.csv";
    double ex_maturity = 0.5;
    std::uint64_t ex_seed = 1ULL;
    ex->add_option("--asset1", ex_a1)->required();
    ex->add_option("--asset2", ex_a2)->required();
    ex->add_option("--cross", ex_cross, "cross market JSON")->required();
    ex->add_option("--corr-source", ex_source, "atm or file");
    ex->add_option("--corr-file", ex_corr_file, "correlation JSON");
    ex->add_option("--strike-grid", ex_grid, "lo:hi:n");
    ex->add_option("--strikes", ex_strikes, "comma-separated strikes");
    ex->add_option("-T,--maturity", ex_maturity)->required();
    ex->add_option("--seed", ex_seed);
    ex->add_option("--out", ex_out, "output CSV");

    // simulate ------------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "Run the Monte Carlo engine");
    std::string sim_a1, sim_a2, sim_scheme = "muvm-exact", sim_strikes;
    std::string sim_dump, sim_out = "simulation.json";
    CorrSource sim_corr;
    std::int64_t sim_paths = 100'000;
    int sim_steps = 125;
    std::uint64_t sim_seed = 1ULL;
    double sim_maturity = 0.5, sim_df = 1.0;
    bool sim_antithetic = false, sim_no_quanto = false;
    sim->add_option("--asset1", sim_a1)->required();
    sim->add_option("--asset2", sim_a2)->required();
    auto* sim_rho_opt = sim->add_option("--rho", "constant correlation");
    sim->add_option("--rho-matrix", sim_corr.rho_matrix);
    sim->add_option("--corr-file", sim_corr.corr_file);
    sim->add_option("--scheme", sim_scheme,
                    "muvm-exact | scmd-euler | mvmd-euler");
    sim->add_option("--paths", sim_paths);
    sim->add_option("--steps", sim_steps);
    sim->add_option("--seed", sim_seed);
    sim->add_option("-T,--maturity", sim_maturity)->required();
    sim->add_option("--df", sim_df, "discount factor for MC prices");
    sim->add_flag("--antithetic", sim_antithetic);
    sim->add_flag("--no-quanto", sim_no_quanto,
                  "skip the quanto drift adjustment");
    sim->add_option("--strikes", sim_strikes, "price these cross strikes");
    sim->add_option("--dump", sim_dump, "binary terminal-sample dump path");
    sim->add_option("--out", sim_out, "summary JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitInput;
    }

    try {
        if (cal->parsed()) {
            std::optional<double> fix_beta;
            if (fix_beta_opt->count() > 0) fix_beta = cal_fix_beta_value;
            return run_calibrate_smile(cal_input, cal_components, cal_maturity,
                                       cal_out, cal_fit_table, cal_atm_weight,
                                       fix_beta, cal_seed);
        }
        if (ic->parsed())
            return run_implied_corr(ic_a1, ic_a2, ic_cross, ic_maturity,
                                    ic_engine, ic_random, ic_seed, ic_paths,
                                    ic_steps, ic_out, ic_csv);
        if (pc->parsed()) {
            if (pc_rho_opt->count() > 0)
                pc_corr.rho = pc_rho_opt->as<double>();
            return run_price_cross(pc_a1, pc_a2, pc_corr, pc_strikes,
                                   pc_maturity, pc_df, pc_out, pc_rdom,
                                   pc_rfor1, pc_rfor2);
        }
        if (ex->parsed())
            return run_extrapolate(ex_a1, ex_a2, ex_cross, ex_maturity,
                                   ex_source, ex_corr_file, ex_grid, ex_strikes,
                                   ex_out, ex_seed);
        if (sim->parsed()) {
            if (sim_rho_opt->count() > 0)
                sim_corr.rho = sim_rho_opt->as<double>();
            return run_simulate(sim_a1, sim_a2, sim_corr, sim_scheme, sim_paths,
                                sim_steps, sim_seed, sim_maturity,
                                sim_antithetic, !sim_no_quanto, sim_strikes,
                                sim_df, sim_dump, sim_out);
        }
    } catch (const mixdyn::invalid_input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const mixdyn::error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
