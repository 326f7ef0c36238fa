#pragma once

#include <string>
#include <vector>

#include "mixdyn/calibration.hpp"
#include "mixdyn/multivariate.hpp"
#include "mixdyn/smile.hpp"

namespace mixdyn {

// On-disk market data: one asset's spot, rates and vol quotes. All file
// schemas carry an explicit version tag. Maturities are year fractions;
// day-count conversion is left to the producer of the file.
struct MarketQuoteRow {
    double strike = 0.0;
    double maturity = 0.0;
    double implied_vol = 0.0;
};

struct MarketFile {
    int schema_version = 1;
    std::string asset_id;
    double spot = 0.0;
    double domestic_rate = 0.0;
    double foreign_rate = 0.0;
    bool rates_present = false;  // false: rates defaulted to 0 on load
    std::vector<MarketQuoteRow> quotes;

    double drift() const { return domestic_rate - foreign_rate; }
    void validate() const;
};

MarketFile load_market_file(const std::string& path);
void save_market_file(const std::string& path, const MarketFile& mf);

ShiftedMixtureParams load_params_file(const std::string& path);
void save_params_file(const std::string& path, const ShiftedMixtureParams& p);

CorrelationSpec load_correlation_file(const std::string& path);
void save_correlation_file(const std::string& path, const CorrelationSpec& c);

// Quotes of one maturity lifted into the calibration carrier; the forward
// and discount factor come from the file's spot and rates.
QuoteSet quote_set_from_market(const MarketFile& mf, double maturity,
                               double maturity_tol = 1e-9);
std::vector<VolQuote> quotes_at_maturity(const MarketFile& mf, double maturity,
                                         double maturity_tol = 1e-9);

// Plot-ready CSV emission, 12 significant digits, schema-tagged first line.
void write_smile_fit_csv(const std::string& path, const SmileFitReport& report);
void write_correlation_report_csv(const std::string& path,
                                  const CorrelationFitReport& report);
void write_smile_curve_csv(const std::string& path,
                           const ExtrapolatedSmile& smile);

void save_correlation_report_json(const std::string& path,
                                  const CorrelationFitReport& report);

std::string format_sig(double value);  // 12 significant digits

}  // namespace mixdyn
