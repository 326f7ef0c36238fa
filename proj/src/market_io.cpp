#include "mixdyn/market_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace mixdyn {

using nlohmann::json;

namespace {

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw invalid_input_error(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw invalid_input_error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

int require_schema(const json& j, const std::string& path) {
    if (!j.contains("schema_version"))
        throw invalid_input_error(path + ": missing schema_version tag");
    return j.at("schema_version").get<int>();
}

template <class T>
T get_required(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key))
        throw invalid_input_error(path + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw invalid_input_error(path + ": field '" + key + "': " + e.what());
    }
}

}  // namespace

std::string format_sig(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void MarketFile::validate() const {
    if (quotes.empty())
        throw invalid_input_error("market file: quote list is empty");
    if (!(spot > 0.0))
        throw invalid_input_error("market file: spot must be > 0");
    for (const MarketQuoteRow& q : quotes)
        if (!(q.strike > 0.0) || !(q.maturity > 0.0) || !(q.implied_vol > 0.0))
            throw invalid_input_error(
                "market file: quotes need positive strike, maturity and vol");
}

MarketFile load_market_file(const std::string& path) {
    const json j = parse_file(path);
    MarketFile mf;
    mf.schema_version = require_schema(j, path);
    if (mf.schema_version != 1)
        throw invalid_input_error(path + ": unsupported market schema version");
    mf.asset_id = get_required<std::string>(j, "asset_id", path);
    mf.spot = get_required<double>(j, "spot", path);
    mf.rates_present = j.contains("domestic_rate") && j.contains("foreign_rate");
    mf.domestic_rate = j.value("domestic_rate", 0.0);
    mf.foreign_rate = j.value("foreign_rate", 0.0);
    if (!j.contains("quotes") || !j.at("quotes").is_array())
        throw invalid_input_error(path + ": missing quotes array");
    for (const json& row : j.at("quotes")) {
        MarketQuoteRow q;
        q.strike = get_required<double>(row, "strike", path);
        q.maturity = get_required<double>(row, "maturity", path);
        q.implied_vol = get_required<double>(row, "implied_vol", path);
        mf.quotes.push_back(q);
    }
    mf.validate();
    return mf;
}

void save_market_file(const std::string& path, const MarketFile& mf) {
    json j;
    j["schema_version"] = 1;
    j["asset_id"] = mf.asset_id;
    j["spot"] = mf.spot;
    j["domestic_rate"] = mf.domestic_rate;
    j["foreign_rate"] = mf.foreign_rate;
    j["quotes"] = json::array();
    for (const MarketQuoteRow& q : mf.quotes)
        j["quotes"].push_back({{"strike", q.strike},
                               {"maturity", q.maturity},
                               {"implied_vol", q.implied_vol}});
    write_file(path, j);
}

ShiftedMixtureParams load_params_file(const std::string& path) {
    const json j = parse_file(path);
    if (require_schema(j, path) != 1)
        throw invalid_input_error(path + ": unsupported params schema version");
    ShiftedMixtureParams p;
    const auto weights = get_required<std::vector<double>>(j, "weights", path);
    const auto vols = get_required<std::vector<double>>(j, "term_vols", path);
    p.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                  static_cast<Eigen::Index>(weights.size()));
    p.term_vols = Eigen::Map<const Eigen::VectorXd>(vols.data(),
                                                    static_cast<Eigen::Index>(vols.size()));
    p.shift_beta = get_required<double>(j, "shift_beta", path);
    p.drift_mu = get_required<double>(j, "drift_mu", path);
    p.spot = get_required<double>(j, "spot", path);
    p.reference_maturity = get_required<double>(j, "reference_maturity", path);
    p.epsilon_floor = j.value("epsilon_floor", kDefaultEpsilonFloor);
    p.validate();
    return p;
}

void save_params_file(const std::string& path, const ShiftedMixtureParams& p) {
    json j;
    j["schema_version"] = 1;
    j["type"] = "shifted_mixture_params";
    j["weights"] = std::vector<double>(p.weights.data(),
                                       p.weights.data() + p.weights.size());
    j["term_vols"] = std::vector<double>(p.term_vols.data(),
                                         p.term_vols.data() + p.term_vols.size());
    j["shift_beta"] = p.shift_beta;
    j["drift_mu"] = p.drift_mu;
    j["spot"] = p.spot;
    j["reference_maturity"] = p.reference_maturity;
    j["epsilon_floor"] = p.epsilon_floor;
    write_file(path, j);
}

CorrelationSpec load_correlation_file(const std::string& path) {
    const json j = parse_file(path);
    if (require_schema(j, path) != 1)
        throw invalid_input_error(path + ": unsupported correlation schema");
    const std::string kind = get_required<std::string>(j, "kind", path);
    if (kind == "constant")
        return CorrelationSpec::constant(get_required<double>(j, "rho", path));
    if (kind != "scenario")
        throw invalid_input_error(path + ": kind must be constant or scenario");
    const auto rows =
        get_required<std::vector<std::vector<double>>>(j, "rho_matrix", path);
    if (rows.empty() || rows.front().empty())
        throw invalid_input_error(path + ": empty rho_matrix");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size())
            throw invalid_input_error(path + ": ragged rho_matrix");
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return CorrelationSpec::scenario(m);
}

namespace {

json correlation_to_json(const CorrelationSpec& c) {
    json j;
    j["schema_version"] = 1;
    if (c.is_scenario()) {
        j["kind"] = "scenario";
        std::vector<std::vector<double>> rows;
        for (Eigen::Index r = 0; r < c.scenario_rho.rows(); ++r) {
            std::vector<double> row;
            for (Eigen::Index col = 0; col < c.scenario_rho.cols(); ++col)
                row.push_back(c.scenario_rho(r, col));
            rows.push_back(row);
        }
        j["rho_matrix"] = rows;
    } else {
        j["kind"] = "constant";
        j["rho"] = c.constant_rho;
    }
    return j;
}

}  // namespace

void save_correlation_file(const std::string& path, const CorrelationSpec& c) {
    write_file(path, correlation_to_json(c));
}

std::vector<VolQuote> quotes_at_maturity(const MarketFile& mf, double maturity,
                                         double maturity_tol) {
    std::vector<VolQuote> out;
    for (const MarketQuoteRow& q : mf.quotes)
        if (std::abs(q.maturity - maturity) <= maturity_tol)
            out.push_back(VolQuote{q.strike, maturity, q.implied_vol, 1.0});
    if (out.empty())
        throw invalid_input_error(
            "market file: no quotes at the requested maturity");
    return out;
}

QuoteSet quote_set_from_market(const MarketFile& mf, double maturity,
                               double maturity_tol) {
    QuoteSet qs;
    qs.quotes = quotes_at_maturity(mf, maturity, maturity_tol);
    qs.maturity = maturity;
    qs.forward = mf.spot * std::exp(mf.drift() * maturity);
    qs.discount_factor = std::exp(-mf.domestic_rate * maturity);
    qs.validate();
    return qs;
}

void write_smile_fit_csv(const std::string& path,
                         const SmileFitReport& report) {
    std::ofstream out(path);
    if (!out) throw invalid_input_error("cannot open " + path + " for writing");
    out << "# mixdyn csv schema: smile_fit v1\n";
    out << "strike,market_vol,model_vol,abs_vol_diff,abs_price_diff\n";
    for (const SmileQuoteFit& row : report.per_quote)
        out << format_sig(row.strike) << ',' << format_sig(row.market_vol)
            << ',' << format_sig(row.model_vol) << ','
            << format_sig(row.abs_vol_diff) << ','
            << format_sig(row.abs_price_diff) << '\n';
}

void write_correlation_report_csv(const std::string& path,
                                  const CorrelationFitReport& report) {
    std::ofstream out(path);
    if (!out) throw invalid_input_error("cannot open " + path + " for writing");
    out << "# mixdyn csv schema: correlation_fit v1\n";
    out << "strike,market_vol,model_vol,abs_vol_diff,abs_price_diff\n";
    for (const CorrelationFitRow& row : report.per_strike)
        out << format_sig(row.strike) << ',' << format_sig(row.market_vol)
            << ',' << format_sig(row.model_vol) << ','
            << format_sig(row.abs_vol_diff) << ','
            << format_sig(row.abs_price_diff) << '\n';
}

void write_smile_curve_csv(const std::string& path,
                           const ExtrapolatedSmile& smile) {
    std::ofstream out(path);
    if (!out) throw invalid_input_error("cannot open " + path + " for writing");
    out << "# mixdyn csv schema: smile_curve v1\n";
    out << "strike,price,implied_vol\n";
    for (std::size_t i = 0; i < smile.strikes.size(); ++i)
        out << format_sig(smile.strikes[i]) << ','
            << format_sig(smile.prices[i]) << ','
            << format_sig(smile.implied_vols[i]) << '\n';
}

void save_correlation_report_json(const std::string& path,
                                  const CorrelationFitReport& report) {
    json j;
    j["schema_version"] = 1;
    j["fitted"] = correlation_to_json(report.fitted);
    j["objective_value"] = report.objective_value;
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["boundary_solution"] = report.boundary_solution;
    j["identifiability_warning"] = report.identifiability_warning;
    j["stats"] = {{"mean", report.stats.mean}, {"stdev", report.stats.stdev}};
    j["per_strike"] = json::array();
    for (const CorrelationFitRow& row : report.per_strike)
        j["per_strike"].push_back({{"strike", row.strike},
                                   {"market_vol", row.market_vol},
                                   {"model_vol", row.model_vol},
                                   {"abs_vol_diff", row.abs_vol_diff},
                                   {"abs_price_diff", row.abs_price_diff}});
    write_file(path, j);
}

}  // namespace mixdyn
