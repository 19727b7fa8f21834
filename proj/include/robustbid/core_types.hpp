#pragma once

// Shared value types for the bidding model. Units are fixed throughout:
// hours, kW, kWh and EUR. Interval indices are zero-based; interval k covers
// [k*dt, (k+1)*dt).

#include <cstdint>
#include <vector>

#include "robustbid/errors.hpp"

namespace robustbid {

inline constexpr double kTolerance = 1e-9;
inline constexpr double kEurPerMwhToEurPerKwh = 1e-3;

std::int64_t round_to_seconds(double hours);

// True when `hours` is a positive integer multiple of `unit_hours` once both
// are rounded to whole seconds.
bool is_multiple_of(double hours, double unit_hours);

class TimeGrid {
 public:
  TimeGrid(double dt_hours, int K);

  double dt() const { return dt_; }
  int K() const { return K_; }
  double T() const { return dt_ * K_; }
  double start(int k) const { return dt_ * k; }
  double end(int k) const { return dt_ * (k + 1); }

  // Interval containing t; t = T belongs to the last interval.
  int interval_at(double t) const;

 private:
  double dt_;
  int K_;
};

// Elapsed time of interval l at time t: clamp(t - l*dt, 0, dt).
double sigma(const TimeGrid& grid, double t, int l);

struct StorageParams {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double eta_c = 1.0;
  double eta_d = 1.0;

  double specific_loss() const { return 1.0 / eta_d - eta_c; }
  double roundtrip() const { return eta_c * eta_d; }
  bool lossless() const { return eta_c == 1.0 && eta_d == 1.0; }
  // Upper end of the budget multiplier range, (x_max - x_min) / eta_d.
  double lambda_cap() const { return (x_max - x_min) / eta_d; }
  // Initial SOC leaving symmetric headroom after a full-budget excursion.
  double default_initial_soc() const;
  void validate() const;

  // 100 kWh / 50 kW battery with 92% one-way efficiencies and a 10-90 kWh window.
  static StorageParams reference_battery();
};

enum class BudgetKind { total, rolling_window };

struct UncertaintyBudget {
  BudgetKind kind = BudgetKind::total;
  double gamma = 0.0;
  double gamma_prime = 0.0;
  double Gamma_prime = 0.0;

  static UncertaintyBudget total(double gamma);
  static UncertaintyBudget rolling(double gamma_prime, double Gamma_prime);
  // Window length fixed at gamma_prime + 2h.
  static UncertaintyBudget from_eu_rules(double gamma_prime);

  // Total deviation time available over a horizon of length T.
  double effective(double T) const;
  void validate(const TimeGrid& grid) const;
};

double effective_budget(double gamma_prime, double Gamma_prime, double T);

struct BidSchedule {
  std::vector<double> x0;
  std::vector<double> x_up;
  std::vector<double> x_dn;
  bool symmetric = false;
  int fcr_block_len = 0;
  int da_block_len = 0;

  static BidSchedule zeros(int K);
  int size() const { return static_cast<int>(x0.size()); }
  void validate(double tol = kTolerance) const;
};

// Piecewise-constant signal starting at t = 0 with a fixed sample period.
class RegulationSignal {
 public:
  RegulationSignal() = default;
  RegulationSignal(double period_hours, std::vector<double> values);

  static RegulationSignal constant(double period_hours, double duration_hours, double value);

  double period() const { return period_; }
  std::size_t size() const { return values_.size(); }
  double duration() const { return period_ * static_cast<double>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  double value_at(double t) const;

  double integral(double a, double b) const;
  double abs_integral(double a, double b) const;

  // Throws AlignmentError unless the period divides dt and the signal covers T.
  void check_alignment(const TimeGrid& grid) const;

 private:
  template <typename F>
  double integrate(double a, double b, F&& f) const;

  double period_ = 0.0;
  std::vector<double> values_;
};

struct PriceSeries {
  std::vector<double> day_ahead;         // EUR/MWh per day-ahead period
  double da_period_hours = 1.0;
  std::vector<double> fcr_availability;  // EUR/MW per FCR block
  double fcr_block_hours = 4.0;

  static PriceSeries zeros(double horizon_hours);
  // Day-ahead price (EUR/MWh) of the period containing t.
  double day_ahead_at(double t) const;
  // Availability rate of the block containing t, in EUR/MW per hour.
  double fcr_rate_at(double t) const;
  // Throws DataError unless every interval of the grid is priced and lies
  // inside a single day-ahead period and FCR block.
  void check_alignment(const TimeGrid& grid, bool need_fcr) const;
  bool nonnegative() const;
};

}  // namespace robustbid
