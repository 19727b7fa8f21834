#pragma once

// Daily bidding loop: data ingestion, realized-day simulation, accounting
// and reports.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "robustbid/core_types.hpp"
#include "robustbid/experiment_config.hpp"
#include "robustbid/solver_bridge.hpp"

namespace robustbid {

inline constexpr double kNominalHz = 50.0;
inline constexpr double kFullActivationHz = 0.2;
inline constexpr double kFrequencyPeriodHours = 10.0 / 3600.0;

struct FrequencyArchive {
  double period_hours = kFrequencyPeriodHours;
  std::vector<double> hz;
  std::vector<bool> gap;  // sample was missing and has been filled

  std::size_t gap_count() const;
  std::size_t longest_gap() const;
};

// Clipped ramp: +1 at or below 49.8 Hz, -1 at or above 50.2 Hz.
double frequency_to_signal(double hz);
RegulationSignal frequency_to_signal(const FrequencyArchive& f);

// Integral of |xi| over [from, to) divided by gamma. Defaults to the whole
// signal.
double budget_usage(const RegulationSignal& signal, double gamma, double from = 0.0,
                    double to = -1.0);
// Largest usage over all windows [t, t + Gamma') with t on the sample grid;
// windows running past the end are truncated.
double max_window_usage(const RegulationSignal& signal, double gamma_prime, double Gamma_prime);

// Intraday trade at the start of interval j (0-based) that compensates the
// energy exchanged for regulation during the preceding window.
double intraday_adjustment(const std::vector<double>& xr, const RegulationSignal& signal,
                           const TimeGrid& grid, int j, double Gamma_prime);
std::vector<double> intraday_adjustments(const std::vector<double>& xr,
                                         const RegulationSignal& signal, const TimeGrid& grid,
                                         double Gamma_prime);

struct DayData {
  std::string date;
  PriceSeries prices;
  // Day-ahead prices used to value realized regulation energy.
  std::vector<double> settlement_prices;
  RegulationSignal signal;
  std::size_t frequency_gaps = 0;
};

struct BacktestRecord {
  std::string date;
  std::string country;
  bool skipped = false;
  std::string skip_reason;

  double profit_total = 0.0;
  double profit_fcr = 0.0;
  double profit_dayahead = 0.0;
  double profit_intraday = 0.0;
  // Realized regulation energy at day-ahead prices; not part of the total.
  double fcr_energy_settlement = 0.0;
  double throughput = 0.0;
  double soc_initial = 0.0;
  double soc_min = 0.0;
  double soc_max = 0.0;
  double soc_midnight = 0.0;
  double power_min = 0.0;
  double power_max = 0.0;
  double budget_usage = 0.0;
  double window_usage_max = 0.0;
  double soc_violation = 0.0;  // kWh beyond [y_min, y_max]
  double planned_y0_lo = 0.0;
  double planned_y0_hi = 0.0;

  std::string solve_status;
  double objective = 0.0;
  double gap = 0.0;
  std::size_t binaries = 0;
  double solve_time = 0.0;  // wall clock, excluded from reports

  BidSchedule bids;
  SocTrajectory trajectory;
};

struct DayContext {
  InitialSoc planning_y0;
  double realized_y0;
};

// Builds, solves and simulates one day.
BacktestRecord run_day(const ExperimentConfig& cfg, const DayData& day, const DayContext& ctx);

// Accounting for a fixed schedule against realized data.
BacktestRecord settle_day(const ExperimentConfig& cfg, const DayData& day, const BidSchedule& bids,
                          double realized_y0);

// SOC interval at midnight when bids are placed at 8am: worst-case drift of
// the committed schedule from the measured 8am SOC.
InitialSoc soc_interval_at_midnight(const ExperimentConfig& cfg, const BidSchedule& committed,
                                    double soc_at_8am);

struct BacktestSummary {
  std::string country;
  std::size_t days = 0;
  std::size_t skipped = 0;
  double mean_profit_total = 0.0;
  double mean_profit_fcr = 0.0;
  double mean_profit_dayahead = 0.0;
  double mean_profit_intraday = 0.0;
  double mean_throughput = 0.0;
  double soc_min = 0.0;
  double soc_max = 0.0;
  double mean_budget_usage = 0.0;
  std::size_t violation_days = 0;
};

struct BacktestReport {
  std::vector<BacktestRecord> records;
  std::vector<BacktestSummary> summaries;
};

std::vector<std::string> date_range(const std::string& first, const std::string& last);
bool is_dst_transition(const std::string& date);
std::string next_date(const std::string& date);

// CSV readers. File layout under a data directory:
//   <country>/dayahead/<date>.csv   hour,price_eur_mwh
//   <country>/fcr/<date>.csv        block_start_hour,price_eur_mw_4h
//   frequency/<date>.csv            seconds,hz
std::vector<double> read_dayahead_csv(const std::filesystem::path& p);
std::vector<double> read_fcr_csv(const std::filesystem::path& p);
FrequencyArchive read_frequency_csv(const std::filesystem::path& p);
DayData load_day(const std::filesystem::path& data_dir, const std::string& country,
                 const std::string& settlement_country, const std::string& date);

BacktestReport run_backtest(const ExperimentConfig& cfg, const std::filesystem::path& data_dir);
BacktestSummary summarize(const std::vector<BacktestRecord>& records, const std::string& country);

std::string record_to_json(const BacktestRecord& r);
// Writes report.jsonl, summary.txt and series.csv (one set per country).
void write_report(const BacktestReport& report, const std::filesystem::path& out_dir);

}  // namespace robustbid
