#include "robustbid/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace robustbid {

std::int64_t round_to_seconds(double hours) {
  return static_cast<std::int64_t>(std::llround(hours * 3600.0));
}

bool is_multiple_of(double hours, double unit_hours) {
  const std::int64_t a = round_to_seconds(hours);
  const std::int64_t u = round_to_seconds(unit_hours);
  return u > 0 && a > 0 && a % u == 0;
}

TimeGrid::TimeGrid(double dt_hours, int K) : dt_(dt_hours), K_(K) {
  if (!(dt_hours > 0.0) || !std::isfinite(dt_hours)) {
    throw DomainError("time grid: dt must be positive");
  }
  if (K < 1) throw DomainError("time grid: K must be at least 1");
}

int TimeGrid::interval_at(double t) const {
  if (t < -kTolerance || t > T() + kTolerance) {
    throw DomainError("time " + std::to_string(t) + " outside horizon");
  }
  const int k = static_cast<int>(std::floor(t / dt_ + 1e-12));
  return std::clamp(k, 0, K_ - 1);
}

double sigma(const TimeGrid& grid, double t, int l) {
  if (t < -kTolerance || t > grid.T() + kTolerance) {
    throw DomainError("sigma: t outside [0, T]");
  }
  if (l < 0 || l >= grid.K()) throw DomainError("sigma: interval index out of range");
  return std::clamp(t - grid.start(l), 0.0, grid.dt());
}

double StorageParams::default_initial_soc() const {
  const double r = roundtrip();
  return (y_max + r * y_min) / (1.0 + r);
}

void StorageParams::validate() const {
  if (!(x_min <= 0.0 && x_max >= 0.0)) throw DomainError("storage: need x_min <= 0 <= x_max");
  if (!(y_min >= 0.0 && y_max >= y_min)) throw DomainError("storage: need 0 <= y_min <= y_max");
  if (!(eta_c > 0.0 && eta_c <= 1.0 && eta_d > 0.0 && eta_d <= 1.0)) {
    throw DomainError("storage: efficiencies must lie in (0, 1]");
  }
}

StorageParams StorageParams::reference_battery() {
  StorageParams p;
  p.x_min = -50.0;
  p.x_max = 50.0;
  p.y_min = 10.0;
  p.y_max = 90.0;
  p.eta_c = 0.92;
  p.eta_d = 0.92;
  return p;
}

UncertaintyBudget UncertaintyBudget::total(double gamma) {
  UncertaintyBudget b;
  b.kind = BudgetKind::total;
  b.gamma = gamma;
  return b;
}

UncertaintyBudget UncertaintyBudget::rolling(double gamma_prime, double Gamma_prime) {
  UncertaintyBudget b;
  b.kind = BudgetKind::rolling_window;
  b.gamma_prime = gamma_prime;
  b.Gamma_prime = Gamma_prime;
  return b;
}

UncertaintyBudget UncertaintyBudget::from_eu_rules(double gamma_prime) {
  return rolling(gamma_prime, gamma_prime + 2.0);
}

double UncertaintyBudget::effective(double T) const {
  if (kind == BudgetKind::total) return std::min(gamma, T);
  return effective_budget(gamma_prime, Gamma_prime, T);
}

void UncertaintyBudget::validate(const TimeGrid& grid) const {
  if (kind == BudgetKind::total) {
    if (!(gamma > 0.0)) throw DomainError("budget: gamma must be positive");
    if (gamma > grid.T() + kTolerance) throw DomainError("budget: gamma exceeds horizon");
    if (!is_multiple_of(gamma, grid.dt())) {
      throw AlignmentError("budget: gamma must be a positive multiple of dt");
    }
    return;
  }
  if (!(gamma_prime > 0.0) || gamma_prime > Gamma_prime + kTolerance) {
    throw DomainError("budget: need 0 < gamma' <= Gamma'");
  }
  if (!is_multiple_of(gamma_prime, grid.dt()) || !is_multiple_of(Gamma_prime, grid.dt())) {
    throw AlignmentError("budget: window parameters must be multiples of dt");
  }
}

double effective_budget(double gamma_prime, double Gamma_prime, double T) {
  if (!(gamma_prime > 0.0) || !(Gamma_prime > 0.0) || !(T > 0.0)) {
    throw DomainError("effective_budget: inputs must be positive");
  }
  if (gamma_prime > Gamma_prime + kTolerance) {
    throw DomainError("effective_budget: gamma' exceeds Gamma'");
  }
  const double windows = std::floor(T / Gamma_prime + 1e-12);
  const double remainder = std::max(0.0, T - Gamma_prime * windows);
  return gamma_prime * windows + std::min(gamma_prime, remainder);
}

BidSchedule BidSchedule::zeros(int K) {
  BidSchedule b;
  b.x0.assign(K, 0.0);
  b.x_up.assign(K, 0.0);
  b.x_dn.assign(K, 0.0);
  return b;
}

void BidSchedule::validate(double tol) const {
  const std::size_t K = x0.size();
  if (x_up.size() != K || x_dn.size() != K) throw DomainError("bids: vector lengths differ");
  for (std::size_t k = 0; k < K; ++k) {
    if (x_up[k] < -tol || x_dn[k] < -tol) throw DomainError("bids: regulation bids must be >= 0");
    if (symmetric && std::abs(x_up[k] - x_dn[k]) > tol) {
      throw DomainError("bids: symmetric schedule with x_up != x_dn");
    }
  }
  auto constant_on_blocks = [&](const std::vector<double>& v, int len) {
    if (len <= 0) return true;
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t head = k - k % static_cast<std::size_t>(len);
      if (std::abs(v[k] - v[head]) > tol) return false;
    }
    return true;
  };
  if (!constant_on_blocks(x_up, fcr_block_len) || !constant_on_blocks(x_dn, fcr_block_len)) {
    throw DomainError("bids: regulation bids vary inside an FCR block");
  }
  if (!constant_on_blocks(x0, da_block_len)) {
    throw DomainError("bids: arbitrage bids vary inside a day-ahead block");
  }
}

RegulationSignal::RegulationSignal(double period_hours, std::vector<double> values)
    : period_(period_hours), values_(std::move(values)) {
  if (!(period_hours > 0.0)) throw DomainError("signal: sample period must be positive");
  for (double v : values_) {
    if (!(v >= -1.0 - kTolerance && v <= 1.0 + kTolerance)) {
      throw DomainError("signal: values must lie in [-1, 1]");
    }
  }
}

RegulationSignal RegulationSignal::constant(double period_hours, double duration_hours,
                                            double value) {
  const auto n = static_cast<std::size_t>(std::llround(duration_hours / period_hours));
  return RegulationSignal(period_hours, std::vector<double>(n, value));
}

double RegulationSignal::value_at(double t) const {
  if (values_.empty()) return 0.0;
  const auto i = static_cast<std::size_t>(std::max(0.0, std::floor(t / period_ + 1e-12)));
  return i < values_.size() ? values_[i] : 0.0;
}

template <typename F>
double RegulationSignal::integrate(double a, double b, F&& f) const {
  if (b <= a || values_.empty()) return 0.0;
  const double n = static_cast<double>(values_.size());
  const double first = std::clamp(std::floor(a / period_), 0.0, n);
  const double last = std::clamp(std::ceil(b / period_), 0.0, n);
  double acc = 0.0;
  for (auto i = static_cast<std::size_t>(first); i < static_cast<std::size_t>(last); ++i) {
    const double lo = std::max(a, period_ * static_cast<double>(i));
    const double hi = std::min(b, period_ * static_cast<double>(i + 1));
    if (hi > lo) acc += f(values_[i]) * (hi - lo);
  }
  return acc;
}

double RegulationSignal::integral(double a, double b) const {
  return integrate(a, b, [](double v) { return v; });
}

double RegulationSignal::abs_integral(double a, double b) const {
  return integrate(a, b, [](double v) { return std::abs(v); });
}

void RegulationSignal::check_alignment(const TimeGrid& grid) const {
  const std::int64_t p = round_to_seconds(period_);
  const std::int64_t dt = round_to_seconds(grid.dt());
  if (p <= 0 || dt % p != 0 || std::abs(period_ * 3600.0 - static_cast<double>(p)) > 1e-6) {
    throw AlignmentError("signal: sample period must divide dt in whole seconds");
  }
  if (duration() < grid.T() - 1e-9) throw AlignmentError("signal: shorter than the horizon");
}

PriceSeries PriceSeries::zeros(double horizon_hours) {
  PriceSeries p;
  p.day_ahead.assign(static_cast<std::size_t>(std::ceil(horizon_hours - 1e-9)), 0.0);
  p.fcr_availability.assign(static_cast<std::size_t>(std::ceil(horizon_hours / 4.0 - 1e-9)), 0.0);
  return p;
}

namespace {
std::size_t period_index(double t, double period, std::size_t n, const char* what) {
  const auto i = static_cast<std::size_t>(std::max(0.0, std::floor(t / period + 1e-9)));
  if (i >= n) throw DataError(std::string("prices: missing ") + what + " price");
  return i;
}
}  // namespace

double PriceSeries::day_ahead_at(double t) const {
  return day_ahead[period_index(t, da_period_hours, day_ahead.size(), "day-ahead")];
}

double PriceSeries::fcr_rate_at(double t) const {
  return fcr_availability[period_index(t, fcr_block_hours, fcr_availability.size(), "FCR")] /
         fcr_block_hours;
}

void PriceSeries::check_alignment(const TimeGrid& grid, bool need_fcr) const {
  const std::int64_t dt = round_to_seconds(grid.dt());
  const std::int64_t da = round_to_seconds(da_period_hours);
  const std::int64_t fb = round_to_seconds(fcr_block_hours);
  if (da <= 0 || da % dt != 0) throw DataError("prices: day-ahead period not a multiple of dt");
  if (need_fcr && (fb <= 0 || fb % dt != 0)) {
    throw DataError("prices: FCR block not a multiple of dt");
  }
  const double T = grid.T();
  if (static_cast<double>(day_ahead.size()) * da_period_hours < T - 1e-9) {
    throw DataError("prices: day-ahead series shorter than the horizon");
  }
  if (need_fcr && static_cast<double>(fcr_availability.size()) * fcr_block_hours < T - 1e-9) {
    throw DataError("prices: FCR series shorter than the horizon");
  }
  for (double v : day_ahead) {
    if (!std::isfinite(v)) throw DataError("prices: non-finite day-ahead price");
  }
  for (double v : fcr_availability) {
    if (!std::isfinite(v)) throw DataError("prices: non-finite FCR price");
  }
}

bool PriceSeries::nonnegative() const {
  return std::all_of(day_ahead.begin(), day_ahead.end(), [](double v) { return v >= 0.0; }) &&
         std::all_of(fcr_availability.begin(), fcr_availability.end(),
                     [](double v) { return v >= 0.0; });
}

}  // namespace robustbid
