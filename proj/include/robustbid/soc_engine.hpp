#pragma once

// Power and state-of-charge evaluation for fixed bids: exact simulation under a
// sampled signal, exact worst-case SOC under a deviation-time budget, and
// brute-force oracles used to cross-check the latter.

#include <span>
#include <string>
#include <vector>

#include "robustbid/core_types.hpp"

namespace robustbid {

// x0 + [xi]^+ x_up - [xi]^- x_dn.
double power_output(double x0, double x_up, double x_dn, double xi);

// dy/dt for power output x (positive x discharges).
inline double soc_rate(double x, const StorageParams& p) {
  const double charge = -p.eta_c * x;
  const double discharge = -x / p.eta_d;
  return charge < discharge ? charge : discharge;
}

struct SocTrajectory {
  double y0 = 0.0;
  std::vector<double> times;
  std::vector<double> soc;

  double at(double t) const;
  double minimum() const;
  double maximum() const;
  double terminal() const { return soc.back(); }
};

// Exact integration of the SOC for a sampled signal. `adjustments`, when
// given, adds a per-interval power offset (intraday trades) to x0.
SocTrajectory simulate_soc(const BidSchedule& bids, const RegulationSignal& signal,
                           const StorageParams& params, const TimeGrid& grid, double y0,
                           std::span<const double> adjustments = {});

// Worst-case rate of SOC increase in one interval as a function of the budget
// multiplier lambda.
double phi(double x0, double x_dn, double lambda, const StorageParams& params);

struct WorstCaseResult {
  enum class Direction { down, up };

  double value = 0.0;
  double lambda_star = 0.0;
  Direction direction = Direction::down;
  // Deviation magnitudes per interval (0..k); the physical signal is -xi for
  // the maximum SOC and +xi for the minimum SOC. Zero after exhaustion_time.
  std::vector<double> witness;
  double exhaustion_time = 0.0;

  // Signed, piecewise-constant signal reproducing the witness. The exhaustion
  // time must be a multiple of the sample period.
  RegulationSignal to_signal(const TimeGrid& grid, double sample_period_hours) const;
};

// Exact SOC at the exhaustion time when the witness is applied.
double evaluate_witness(const BidSchedule& bids, const StorageParams& params,
                        const TimeGrid& grid, double y0, const WorstCaseResult& w);

WorstCaseResult max_soc_over_interval(const BidSchedule& bids, const StorageParams& params,
                                      const TimeGrid& grid, double gamma, double y0, int k);

WorstCaseResult max_soc_at_time(const BidSchedule& bids, const StorageParams& params,
                                const TimeGrid& grid, double gamma, double y0, double t);

// Minimum SOC at boundary time k*dt (k = 0..K). Interval minima occur at the
// adjacent boundaries.
WorstCaseResult min_soc_at_boundaries(const BidSchedule& bids, const StorageParams& params,
                                      const TimeGrid& grid, double gamma, double y0, int k);

struct InitialSoc {
  double lo;
  double hi;
};

struct FeasibilityEntry {
  enum class Kind { power_upper, power_lower, soc_lower, soc_upper };
  Kind kind;
  int index;     // interval for power and upper-SOC rows, boundary for lower-SOC rows
  double slack;  // negative when violated
};

struct FeasibilityReport {
  bool feasible = true;
  double worst_violation = 0.0;
  std::vector<FeasibilityEntry> entries;
  // Witnesses for violated SOC rows, keyed by the entry position.
  std::vector<std::pair<std::size_t, WorstCaseResult>> witnesses;

  std::size_t violation_count() const;
};

std::string to_string(FeasibilityEntry::Kind kind);

// Checks power bounds, the minimum SOC at every boundary against y_min (with
// the initial lower estimate) and the maximum SOC over every interval against
// y_max (with the initial upper estimate).
FeasibilityReport check_feasibility(const BidSchedule& bids, const StorageParams& params,
                                    const TimeGrid& grid, double gamma, InitialSoc y0,
                                    double tol = 1e-6);
FeasibilityReport check_feasibility(const BidSchedule& bids, const StorageParams& params,
                                    const TimeGrid& grid, const UncertaintyBudget& budget,
                                    double y0, double tol = 1e-6);

// Grid search over xi in {0, 1/m, .., 1}^(k+1) and exhaustion times
// k*dt + j*dt/m, j = 0..m. A lower bound on max_soc_over_interval.
double brute_force_max_soc(const BidSchedule& bids, const StorageParams& params,
                           const TimeGrid& grid, double gamma, double y0, int k, int m);

// Grid search over signed xi in {-1, .., 1}^k (step 1/m) at boundary k*dt.
double brute_force_min_soc(const BidSchedule& bids, const StorageParams& params,
                           const TimeGrid& grid, double gamma, double y0, int k, int m);

}  // namespace robustbid
