#include "robustbid/soc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace robustbid {

double power_output(double x0, double x_up, double x_dn, double xi) {
  if (!(xi >= -1.0 - kTolerance && xi <= 1.0 + kTolerance)) {
    throw DomainError("power_output: xi outside [-1, 1]");
  }
  return x0 + std::max(xi, 0.0) * x_up - std::max(-xi, 0.0) * x_dn;
}

double SocTrajectory::at(double t) const {
  if (times.empty()) return y0;
  if (t <= times.front()) return soc.front();
  if (t >= times.back()) return soc.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return soc[i - 1] + w * (soc[i] - soc[i - 1]);
}

double SocTrajectory::minimum() const { return *std::min_element(soc.begin(), soc.end()); }
double SocTrajectory::maximum() const { return *std::max_element(soc.begin(), soc.end()); }

namespace {

void check_sizes(const BidSchedule& bids, const TimeGrid& grid) {
  if (bids.size() != grid.K() || static_cast<int>(bids.x_up.size()) != grid.K() ||
      static_cast<int>(bids.x_dn.size()) != grid.K()) {
    throw DomainError("bid vectors do not match the number of intervals");
  }
}

void check_power_bounds(const BidSchedule& bids, const StorageParams& p, int upto) {
  constexpr double tol = 1e-6;
  for (int l = 0; l <= upto; ++l) {
    if (bids.x_dn[l] < -tol || bids.x_up[l] < -tol) {
      throw PreconditionError("regulation bids must be nonnegative");
    }
    if (bids.x0[l] + bids.x_up[l] > p.x_max + tol || bids.x0[l] - bids.x_dn[l] < p.x_min - tol) {
      throw PreconditionError("bids exceed the power bounds in interval " + std::to_string(l));
    }
  }
}

// Candidate multipliers at which some phi_l (l < n) has a kink, plus the zero
// crossings of the pieces of phi_{n-1} when `hinge` is set.
std::vector<double> lambda_candidates(const BidSchedule& bids, const StorageParams& p, int n,
                                      bool hinge) {
  const double cap = p.lambda_cap();
  std::vector<double> c{0.0, cap};
  for (int l = 0; l < n; ++l) {
    const double xd = std::max(0.0, bids.x_dn[l]);
    c.push_back(p.eta_c * xd);
    c.push_back(xd / p.eta_d);
  }
  if (hinge && n > 0) {
    const double d = bids.x_dn[n - 1] - bids.x0[n - 1];
    c.push_back(p.eta_c * d);
    c.push_back(d / p.eta_d);
  }
  for (double& v : c) v = std::clamp(v, 0.0, cap);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

struct LambdaMin {
  double value;
  double lambda;
};

template <typename F>
LambdaMin minimize_over(const std::vector<double>& candidates, F&& f) {
  LambdaMin best{std::numeric_limits<double>::infinity(), 0.0};
  for (double lam : candidates) {
    const double v = f(lam);
    if (std::isinf(best.value) || v < best.value - 1e-12 * (1.0 + std::abs(best.value))) {
      best = {v, lam};
    }
  }
  return best;
}

struct Segment {
  int l;
  int order;
  double length;
  double slope;
};

// Greedy fractional knapsack: maximizes the SOC at time t over downward
// deviations with the given budget. Returns magnitudes per interval.
std::vector<double> greedy_down_witness(const BidSchedule& bids, const StorageParams& p,
                                        const TimeGrid& grid, double gamma, double t, int n) {
  std::vector<Segment> segs;
  std::vector<double> weight(n);
  for (int l = 0; l < n; ++l) {
    const double s = sigma(grid, t, l);
    weight[l] = s;
    const double xd = bids.x_dn[l];
    if (s <= 0.0 || xd <= 0.0) continue;
    const double x0 = bids.x0[l];
    if (x0 > 0.0) {
      const double first = std::min(1.0, x0 / xd);
      segs.push_back({l, 0, s * first, xd / p.eta_d});
      if (first < 1.0) segs.push_back({l, 1, s * (1.0 - first), p.eta_c * xd});
    } else {
      segs.push_back({l, 1, s, p.eta_c * xd});
    }
  }
  std::stable_sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) {
    if (a.slope != b.slope) return a.slope > b.slope;
    if (a.l != b.l) return a.l < b.l;
    return a.order < b.order;
  });
  std::vector<double> used(n, 0.0);
  double left = gamma;
  for (const auto& s : segs) {
    if (left <= 0.0) break;
    const double take = std::min(left, s.length);
    used[s.l] += take;
    left -= take;
  }
  std::vector<double> xi(n, 0.0);
  for (int l = 0; l < n; ++l) {
    if (weight[l] > 0.0) xi[l] = std::clamp(used[l] / weight[l], 0.0, 1.0);
  }
  return xi;
}

// Smallest maximizer over s in [0, width] of min_j (a_j + s * b_j). Walks the
// concave envelope left to right, switching to ever flatter lines.
double argmax_lower_envelope(const std::vector<double>& a, const std::vector<double>& b,
                             double width) {
  const std::size_t n = a.size();
  std::size_t cur = 0;
  for (std::size_t j = 1; j < n; ++j) {
    const double tol = 1e-12 * (1.0 + std::abs(a[cur]));
    if (a[j] < a[cur] - tol || (std::abs(a[j] - a[cur]) <= tol && b[j] < b[cur])) cur = j;
  }
  double s = 0.0;
  for (std::size_t iter = 0; iter <= n; ++iter) {
    if (b[cur] <= 0.0) return s;
    double next = width;
    std::size_t nxt = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (b[j] >= b[cur]) continue;
      const double x = std::max(s, (a[j] - a[cur]) / (b[cur] - b[j]));
      if (x < next || (nxt < n && x == next && b[j] < b[nxt])) {
        next = x;
        nxt = j;
      }
    }
    if (nxt == n || next >= width) return width;
    s = next;
    cur = nxt;
  }
  return s;
}

double interval_weighted_sum(const BidSchedule& bids, const StorageParams& p,
                             const std::vector<double>& w, double lam) {
  double acc = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) {
    if (w[l] > 0.0) acc += w[l] * phi(bids.x0[l], std::max(0.0, bids.x_dn[l]), lam, p);
  }
  return acc;
}

WorstCaseResult max_soc_over_interval_impl(const BidSchedule& bids, const StorageParams& p,
                                           const TimeGrid& grid, double gamma, double y0,
                                           int k) {
  const double dt = grid.dt();
  std::vector<double> w(k, dt);
  const auto cand = lambda_candidates(bids, p, k + 1, true);
  const double xk = bids.x0[k];
  const double xdk = std::max(0.0, bids.x_dn[k]);
  const auto best = minimize_over(cand, [&](double lam) {
    return gamma * lam + interval_weighted_sum(bids, p, w, lam) +
           dt * std::max(0.0, phi(xk, xdk, lam, p));
  });

  // Exhaustion time: maximize the lower envelope over the candidate lines.
  std::vector<double> a, b;
  a.reserve(cand.size());
  b.reserve(cand.size());
  for (double lam : cand) {
    a.push_back(y0 + gamma * lam + interval_weighted_sum(bids, p, w, lam));
    b.push_back(phi(xk, xdk, lam, p));
  }
  const double s = argmax_lower_envelope(a, b, dt);

  WorstCaseResult r;
  r.value = y0 + best.value;
  r.lambda_star = best.lambda;
  r.direction = WorstCaseResult::Direction::down;
  r.exhaustion_time = grid.start(k) + s;
  r.witness = greedy_down_witness(bids, p, grid, gamma, r.exhaustion_time, k + 1);
  return r;
}

WorstCaseResult min_soc_impl(const BidSchedule& bids, const StorageParams& p,
                             const TimeGrid& grid, double gamma, double y0, int k) {
  const double dt = grid.dt();
  std::vector<double> alpha(k), spread(k);
  for (int l = 0; l < k; ++l) {
    const double x = bids.x0[l];
    const double xu = x + std::max(0.0, bids.x_up[l]);
    alpha[l] = std::max(p.eta_c * x, x / p.eta_d);
    spread[l] = std::max(p.eta_c * xu, xu / p.eta_d) - alpha[l];
  }
  const double base = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  std::vector<double> cand{0.0};
  for (double d : spread) cand.push_back(std::max(0.0, d));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  const auto best = minimize_over(cand, [&](double lam) {
    double hinge = 0.0;
    for (double d : spread) hinge += std::max(0.0, d - lam);
    return gamma * lam + dt * (base + hinge);
  });

  WorstCaseResult r;
  r.value = y0 - best.value;
  r.lambda_star = best.lambda;
  r.direction = WorstCaseResult::Direction::up;
  r.exhaustion_time = grid.dt() * k;
  r.witness.assign(k, 0.0);
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return spread[i] > spread[j]; });
  double left = gamma;
  for (int l : order) {
    if (left <= 0.0 || spread[l] <= 0.0) break;
    const double take = std::min(left, dt);
    r.witness[l] = take / dt;
    left -= take;
  }
  return r;
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("budget must be finite and >= 0");
}

}  // namespace

SocTrajectory simulate_soc(const BidSchedule& bids, const RegulationSignal& signal,
                           const StorageParams& params, const TimeGrid& grid, double y0,
                           std::span<const double> adjustments) {
  check_sizes(bids, grid);
  signal.check_alignment(grid);
  if (!std::isfinite(y0)) throw DomainError("simulate_soc: y0 must be finite");
  if (!adjustments.empty() && static_cast<int>(adjustments.size()) != grid.K()) {
    throw DomainError("simulate_soc: adjustment vector length mismatch");
  }
  const std::int64_t per =
      round_to_seconds(grid.dt()) / round_to_seconds(signal.period());
  const double h = signal.period();
  SocTrajectory traj;
  traj.y0 = y0;
  traj.times.reserve(static_cast<std::size_t>(grid.K() * per + 1));
  traj.soc.reserve(traj.times.capacity());
  traj.times.push_back(0.0);
  traj.soc.push_back(y0);
  double y = y0;
  const auto& xi = signal.values();
  for (int k = 0; k < grid.K(); ++k) {
    const double x0 = bids.x0[k] + (adjustments.empty() ? 0.0 : adjustments[k]);
    for (std::int64_t j = 0; j < per; ++j) {
      const auto i = static_cast<std::size_t>(k * per + j);
      y += h * soc_rate(power_output(x0, bids.x_up[k], bids.x_dn[k], xi[i]), params);
      traj.times.push_back(h * static_cast<double>(i + 1));
      traj.soc.push_back(y);
    }
  }
  return traj;
}

double phi(double x0, double x_dn, double lambda, const StorageParams& p) {
  if (x_dn < 0.0 || lambda < 0.0) throw DomainError("phi: x_dn and lambda must be >= 0");
  const double ec = p.eta_c;
  const double ed = p.eta_d;
  if (x_dn <= x0) return std::max((x_dn - x0) / ed - lambda, -x0 / ed);
  if (x0 <= 0.0) return std::max(ec * (x_dn - x0) - lambda, -ec * x0);
  return std::max({ec * (x_dn - x0) - lambda, -lambda * x0 / x_dn, -x0 / ed});
}

RegulationSignal WorstCaseResult::to_signal(const TimeGrid& grid,
                                            double sample_period_hours) const {
  const std::int64_t p = round_to_seconds(sample_period_hours);
  const std::int64_t dt = round_to_seconds(grid.dt());
  const std::int64_t te = round_to_seconds(exhaustion_time);
  if (p <= 0 || dt % p != 0 || te % p != 0 ||
      std::abs(exhaustion_time * 3600.0 - static_cast<double>(te)) > 1e-6) {
    throw AlignmentError("witness: exhaustion time not on the sample grid");
  }
  const double sign = direction == Direction::down ? -1.0 : 1.0;
  const std::int64_t n = dt * grid.K() / p;
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t i = 0; i < te / p; ++i) {
    const auto l = static_cast<std::size_t>(i * p / dt);
    if (l < witness.size()) v[static_cast<std::size_t>(i)] = sign * witness[l];
  }
  return RegulationSignal(sample_period_hours, std::move(v));
}

double evaluate_witness(const BidSchedule& bids, const StorageParams& params,
                        const TimeGrid& grid, double y0, const WorstCaseResult& w) {
  const double sign = w.direction == WorstCaseResult::Direction::down ? -1.0 : 1.0;
  double y = y0;
  for (std::size_t l = 0; l < w.witness.size(); ++l) {
    const int li = static_cast<int>(l);
    const double s = sigma(grid, w.exhaustion_time, li);
    const double x = power_output(bids.x0[l], bids.x_up[l], bids.x_dn[l], sign * w.witness[l]);
    y += s * soc_rate(x, params);
  }
  return y;
}

WorstCaseResult max_soc_over_interval(const BidSchedule& bids, const StorageParams& params,
                                      const TimeGrid& grid, double gamma, double y0, int k) {
  check_sizes(bids, grid);
  check_gamma(gamma);
  if (k < 0 || k >= grid.K()) throw DomainError("max_soc_over_interval: interval out of range");
  check_power_bounds(bids, params, k);
  return max_soc_over_interval_impl(bids, params, grid, gamma, y0, k);
}

WorstCaseResult max_soc_at_time(const BidSchedule& bids, const StorageParams& params,
                                const TimeGrid& grid, double gamma, double y0, double t) {
  check_sizes(bids, grid);
  check_gamma(gamma);
  if (t < -kTolerance || t > grid.T() + kTolerance) {
    throw DomainError("max_soc_at_time: t outside [0, T]");
  }
  t = std::clamp(t, 0.0, grid.T());
  const int k = grid.interval_at(t);
  check_power_bounds(bids, params, k);
  std::vector<double> w(k + 1);
  for (int l = 0; l <= k; ++l) w[l] = sigma(grid, t, l);
  const auto cand = lambda_candidates(bids, params, k + 1, false);
  const auto best = minimize_over(cand, [&](double lam) {
    return gamma * lam + interval_weighted_sum(bids, params, w, lam);
  });
  WorstCaseResult r;
  r.value = y0 + best.value;
  r.lambda_star = best.lambda;
  r.direction = WorstCaseResult::Direction::down;
  r.exhaustion_time = t;
  r.witness = greedy_down_witness(bids, params, grid, gamma, t, k + 1);
  return r;
}

WorstCaseResult min_soc_at_boundaries(const BidSchedule& bids, const StorageParams& params,
                                      const TimeGrid& grid, double gamma, double y0, int k) {
  check_sizes(bids, grid);
  check_gamma(gamma);
  if (k < 0 || k > grid.K()) throw DomainError("min_soc_at_boundaries: boundary out of range");
  if (k > 0) check_power_bounds(bids, params, k - 1);
  return min_soc_impl(bids, params, grid, gamma, y0, k);
}

std::size_t FeasibilityReport::violation_count() const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [](const FeasibilityEntry& e) { return e.slack < 0.0; }));
}

std::string to_string(FeasibilityEntry::Kind kind) {
  switch (kind) {
    case FeasibilityEntry::Kind::power_upper: return "power_upper";
    case FeasibilityEntry::Kind::power_lower: return "power_lower";
    case FeasibilityEntry::Kind::soc_lower: return "soc_lower";
    case FeasibilityEntry::Kind::soc_upper: return "soc_upper";
  }
  return "unknown";
}

FeasibilityReport check_feasibility(const BidSchedule& bids, const StorageParams& params,
                                    const TimeGrid& grid, double gamma, InitialSoc y0,
                                    double tol) {
  check_sizes(bids, grid);
  check_gamma(gamma);
  using Kind = FeasibilityEntry::Kind;
  FeasibilityReport rep;
  const int K = grid.K();
  for (int k = 0; k < K; ++k) {
    rep.entries.push_back({Kind::power_upper, k, params.x_max - bids.x0[k] - bids.x_up[k]});
    rep.entries.push_back({Kind::power_lower, k, bids.x0[k] - bids.x_dn[k] - params.x_min});
  }
  for (int k = 0; k <= K; ++k) {
    auto w = min_soc_impl(bids, params, grid, gamma, y0.lo, k);
    rep.entries.push_back({Kind::soc_lower, k, w.value - params.y_min});
    if (rep.entries.back().slack < -tol) rep.witnesses.emplace_back(rep.entries.size() - 1, w);
  }
  for (int k = 0; k < K; ++k) {
    auto w = max_soc_over_interval_impl(bids, params, grid, gamma, y0.hi, k);
    rep.entries.push_back({Kind::soc_upper, k, params.y_max - w.value});
    if (rep.entries.back().slack < -tol) rep.witnesses.emplace_back(rep.entries.size() - 1, w);
  }
  double worst = 0.0;
  for (const auto& e : rep.entries) worst = std::max(worst, -e.slack);
  rep.worst_violation = worst;
  rep.feasible = worst <= tol;
  return rep;
}

FeasibilityReport check_feasibility(const BidSchedule& bids, const StorageParams& params,
                                    const TimeGrid& grid, const UncertaintyBudget& budget,
                                    double y0, double tol) {
  return check_feasibility(bids, params, grid, budget.effective(grid.T()), InitialSoc{y0, y0},
                           tol);
}

namespace {

constexpr double kBruteForceLimit = 6e6;

void guard_brute_force(const TimeGrid& grid, int m, double combos) {
  if (grid.K() > 4) throw RefusalError("brute force: horizon limited to K <= 4");
  if (m < 1) throw DomainError("brute force: m must be >= 1");
  if (combos > kBruteForceLimit) throw RefusalError("brute force: enumeration too large");
}

}  // namespace

double brute_force_max_soc(const BidSchedule& bids, const StorageParams& params,
                           const TimeGrid& grid, double gamma, double y0, int k, int m) {
  check_sizes(bids, grid);
  if (k < 0 || k >= grid.K()) throw DomainError("brute force: interval out of range");
  guard_brute_force(grid, m, std::pow(m + 1.0, k + 2.0));
  const double dt = grid.dt();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> w(k + 1, dt);
  // Depth-first over interval deviations with running SOC and budget use.
  auto recurse = [&](auto&& self, int l, double y, double used) -> void {
    if (l > k) {
      best = std::max(best, y);
      return;
    }
    for (int i = 0; i <= m; ++i) {
      const double xi = static_cast<double>(i) / m;
      const double u = used + w[l] * xi;
      if (u > gamma + 1e-9) break;
      const double x = power_output(bids.x0[l], bids.x_up[l], bids.x_dn[l], -xi);
      self(self, l + 1, y + w[l] * soc_rate(x, params), u);
    }
  };
  for (int j = 0; j <= m; ++j) {
    w[k] = dt * j / m;
    recurse(recurse, 0, y0, 0.0);
  }
  return best;
}

double brute_force_min_soc(const BidSchedule& bids, const StorageParams& params,
                           const TimeGrid& grid, double gamma, double y0, int k, int m) {
  check_sizes(bids, grid);
  if (k < 0 || k > grid.K()) throw DomainError("brute force: boundary out of range");
  guard_brute_force(grid, m, std::pow(2.0 * m + 1.0, k));
  const double dt = grid.dt();
  double best = std::numeric_limits<double>::infinity();
  auto recurse = [&](auto&& self, int l, double y, double used) -> void {
    if (l == k) {
      best = std::min(best, y);
      return;
    }
    for (int i = -m; i <= m; ++i) {
      const double xi = static_cast<double>(i) / m;
      const double u = used + dt * std::abs(xi);
      if (u > gamma + 1e-9) continue;
      const double x = power_output(bids.x0[l], bids.x_up[l], bids.x_dn[l], xi);
      self(self, l + 1, y + dt * soc_rate(x, params), u);
    }
  };
  recurse(recurse, 0, y0, 0.0);
  return best;
}

}  // namespace robustbid
