#include "robustbid/backtester.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "robustbid/errors.hpp"
#include "robustbid/model_builder.hpp"

namespace robustbid {

namespace fs = std::filesystem;

std::size_t FrequencyArchive::gap_count() const {
  return static_cast<std::size_t>(std::count(gap.begin(), gap.end(), true));
}

std::size_t FrequencyArchive::longest_gap() const {
  std::size_t best = 0, run = 0;
  for (bool g : gap) {
    run = g ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

double frequency_to_signal(double hz) {
  if (!std::isfinite(hz)) throw DataError("frequency sample is not finite");
  // Rounded to 1 nHz so that decimal inputs such as 50.1 map exactly.
  const double dev = std::round((kNominalHz - hz) * 1e9) / 1e9;
  if (dev >= kFullActivationHz) return 1.0;
  if (dev <= -kFullActivationHz) return -1.0;
  return dev / kFullActivationHz;
}

RegulationSignal frequency_to_signal(const FrequencyArchive& f) {
  std::vector<double> xi(f.hz.size());
  std::transform(f.hz.begin(), f.hz.end(), xi.begin(),
                 [](double hz) { return frequency_to_signal(hz); });
  return RegulationSignal(f.period_hours, std::move(xi));
}

double budget_usage(const RegulationSignal& signal, double gamma, double from, double to) {
  if (!(gamma > 0.0)) throw DomainError("budget_usage: gamma must be positive");
  if (to < 0.0) to = signal.duration();
  return signal.abs_integral(from, to) / gamma;
}

double max_window_usage(const RegulationSignal& signal, double gamma_prime, double Gamma_prime) {
  if (!(gamma_prime > 0.0)) throw DomainError("max_window_usage: gamma' must be positive");
  const auto& v = signal.values();
  const auto w = static_cast<std::size_t>(std::llround(Gamma_prime / signal.period()));
  if (v.empty() || w == 0) return 0.0;
  double sum = 0.0, best = 0.0;
  // Windows are anchored at their start; scanning from the end lets truncated
  // tail windows fall out naturally.
  for (std::size_t i = v.size(); i-- > 0;) {
    sum += std::abs(v[i]);
    if (i + w < v.size()) sum -= std::abs(v[i + w]);
    best = std::max(best, sum);
  }
  return best * signal.period() / gamma_prime;
}

double intraday_adjustment(const std::vector<double>& xr, const RegulationSignal& signal,
                           const TimeGrid& grid, int j, double Gamma_prime) {
  if (j < 0 || j >= grid.K()) throw DomainError("intraday_adjustment: interval out of range");
  if (static_cast<int>(xr.size()) != grid.K()) {
    throw DomainError("intraday_adjustment: bid vector length mismatch");
  }
  const double dt = grid.dt();
  if (!(Gamma_prime > dt)) throw DomainError("intraday_adjustment: window must exceed dt");
  const auto G = static_cast<int>(round_to_seconds(Gamma_prime) / round_to_seconds(dt));
  double acc = 0.0;
  for (int i = std::max(0, j + 1 - G); i < j; ++i) {
    acc += xr[static_cast<std::size_t>(i)] * signal.integral(grid.start(i), grid.end(i));
  }
  return -acc / (Gamma_prime - dt);
}

std::vector<double> intraday_adjustments(const std::vector<double>& xr,
                                         const RegulationSignal& signal, const TimeGrid& grid,
                                         double Gamma_prime) {
  std::vector<double> out(static_cast<std::size_t>(grid.K()));
  for (int j = 0; j < grid.K(); ++j) {
    out[static_cast<std::size_t>(j)] = intraday_adjustment(xr, signal, grid, j, Gamma_prime);
  }
  return out;
}

namespace {

double hourly(const std::vector<double>& prices, double t) {
  const auto i = static_cast<std::size_t>(std::max(0.0, std::floor(t + 1e-9)));
  if (i >= prices.size()) throw DataError("day-ahead price missing for hour " + std::to_string(i));
  return prices[i];
}

double clamp_soc(double y, const StorageParams& p) { return std::clamp(y, p.y_min, p.y_max); }

// The arbitrage-only plan with zero regulation bids, completed to a point of
// `ir`. Used as incumbent so that a joint solve never ends below it.
std::optional<std::vector<double>> arbitrage_start(const ModelInputs& in, const ModelOptions& opt,
                                                   const ModelIR& ir, const SolveOptions& so) {
  ModelOptions a = opt;
  a.variant = Variant::arbitrage_only;
  a.intraday = false;
  a.limited_arbitrage = false;
  const ModelIR arb = build_model(in, a);
  const SolveResult ra = solve_with(HighsBackend(), arb, so);
  if (!ra.has_point()) return std::nullopt;
  const BidSchedule plan = extract_bids(arb, ra.point, in.grid, a);
  ModelIR fixed = ir;
  for (int k = 0; k < in.grid.K(); ++k) {
    fixed.set_bounds(fixed.index(var_name("x0", k)), plan.x0[k], plan.x0[k]);
    fixed.set_bounds(fixed.index(var_name("xup", k)), 0.0, 0.0);
    fixed.set_bounds(fixed.index(var_name("xdn", k)), 0.0, 0.0);
  }
  const SolveResult rf = solve_with(HighsBackend(), fixed, so);
  if (!rf.has_point()) return std::nullopt;
  return rf.point;
}

}  // namespace

BacktestRecord settle_day(const ExperimentConfig& cfg, const DayData& day, const BidSchedule& bids,
                          double realized_y0) {
  const TimeGrid grid = cfg.grid();
  const StorageParams& p = cfg.storage;
  const double dt = grid.dt();
  BacktestRecord r;
  r.date = day.date;
  r.bids = bids;
  r.soc_initial = realized_y0;

  std::vector<double> adj;
  if (cfg.model.intraday) {
    adj = intraday_adjustments(bids.x_dn, day.signal, grid, cfg.budget.Gamma_prime);
  }
  r.trajectory = simulate_soc(bids, day.signal, p, grid, realized_y0, adj);

  const bool fcr = cfg.model.fcr_enabled && cfg.model.variant != Variant::arbitrage_only;
  for (int k = 0; k < grid.K(); ++k) {
    const double t = grid.start(k);
    const double p0 = day.prices.day_ahead_at(t) * kEurPerMwhToEurPerKwh;
    r.profit_dayahead += p0 * dt * bids.x0[k];
    if (!adj.empty()) r.profit_intraday += p0 * dt * adj[k];
    if (fcr) {
      const double rate = day.prices.fcr_rate_at(t) * kEurPerMwhToEurPerKwh;
      r.profit_fcr += rate * dt * (bids.symmetric ? bids.x_dn[k] : bids.x_up[k] + bids.x_dn[k]);
    }
  }
  r.profit_total = r.profit_fcr + r.profit_dayahead + r.profit_intraday;

  const auto& xi = day.signal.values();
  const double h = day.signal.period();
  const std::int64_t per = round_to_seconds(dt) / round_to_seconds(h);
  const auto& settle = day.settlement_prices.empty() ? day.prices.day_ahead : day.settlement_prices;
  double charged = 0.0;
  r.power_min = kInf;
  r.power_max = -kInf;
  for (int k = 0; k < grid.K(); ++k) {
    const double x0 = bids.x0[k] + (adj.empty() ? 0.0 : adj[k]);
    for (std::int64_t j = 0; j < per; ++j) {
      const auto i = static_cast<std::size_t>(k * per + j);
      const double reg = power_output(0.0, bids.x_up[k], bids.x_dn[k], xi[i]);
      const double x = x0 + reg;
      charged += std::max(0.0, -x) * h;
      r.power_min = std::min(r.power_min, x);
      r.power_max = std::max(r.power_max, x);
      r.fcr_energy_settlement +=
          hourly(settle, h * static_cast<double>(i)) * kEurPerMwhToEurPerKwh * reg * h;
    }
  }
  r.throughput = p.eta_c * charged;
  r.soc_min = r.trajectory.minimum();
  r.soc_max = r.trajectory.maximum();
  r.soc_midnight = r.trajectory.terminal();
  r.soc_violation = std::max({0.0, p.y_min - r.soc_min, r.soc_max - p.y_max});
  const double gamma = cfg.budget.effective(grid.T());
  r.budget_usage = budget_usage(day.signal, gamma, 0.0, grid.T());
  if (cfg.budget.kind == BudgetKind::rolling_window) {
    r.window_usage_max =
        max_window_usage(day.signal, cfg.budget.gamma_prime, cfg.budget.Gamma_prime);
  }
  return r;
}

BacktestRecord run_day(const ExperimentConfig& cfg, const DayData& day, const DayContext& ctx) {
  const TimeGrid grid = cfg.grid();
  const StorageParams& p = cfg.storage;
  ModelInputs in;
  in.params = p;
  in.grid = grid;
  in.budget = cfg.budget;
  in.y0 = {clamp_soc(ctx.planning_y0.lo, p), clamp_soc(ctx.planning_y0.hi, p)};
  in.prices = day.prices;

  ModelOptions opt = cfg.model;
  switch (cfg.terminal) {
    case TerminalRule::none: opt.terminal_soc_floor.reset(); break;
    case TerminalRule::initial: opt.terminal_soc_floor = in.y0.lo; break;
    case TerminalRule::value: opt.terminal_soc_floor = cfg.terminal_value; break;
  }

  const ModelIR ir = build_model(in, opt);
  SolveOptions so;
  so.time_limit = cfg.time_limit;
  so.gap_target = cfg.gap;
  so.seed = cfg.seed;
  so.node_limit = cfg.node_limit;
  if (cfg.warm_start && opt.variant != Variant::arbitrage_only && ir.num_binaries() > 0 &&
      ir.num_bilinear_rows() == 0) {
    so.mip_start = arbitrage_start(in, opt, ir, so);
  }
  const auto backend = make_backend(cfg.backend, &ir);
  const SolveResult res = solve_with(*backend, ir, so);

  BidSchedule bids = BidSchedule::zeros(grid.K());
  if (res.has_point()) bids = extract_bids(ir, res.point, grid, opt);
  BacktestRecord r = settle_day(cfg, day, bids, ctx.realized_y0);
  r.planned_y0_lo = in.y0.lo;
  r.planned_y0_hi = in.y0.hi;
  r.solve_status = to_string(res.status);
  if (!res.has_point()) r.skip_reason = "no bids placed: " + res.message;
  r.objective = res.has_point() ? res.objective : 0.0;
  r.gap = res.has_point() && std::isfinite(res.gap) ? res.gap : 0.0;
  r.binaries = ir.num_binaries();
  r.solve_time = res.solve_time;
  return r;
}

InitialSoc soc_interval_at_midnight(const ExperimentConfig& cfg, const BidSchedule& committed,
                                    double soc_at_8am) {
  const TimeGrid full = cfg.grid();
  const double offset = 8.0;
  if (!is_multiple_of(offset, full.dt()) || full.T() <= offset) {
    throw ConfigError("8am bidding needs a horizon longer than 8h on a compatible grid");
  }
  const auto skip = static_cast<int>(round_to_seconds(offset) / round_to_seconds(full.dt()));
  const TimeGrid rest(full.dt(), full.K() - skip);
  BidSchedule tail = BidSchedule::zeros(rest.K());
  tail.symmetric = committed.symmetric;
  for (int k = 0; k < rest.K(); ++k) {
    tail.x0[k] = committed.x0[k + skip];
    tail.x_up[k] = committed.x_up[k + skip];
    tail.x_dn[k] = committed.x_dn[k + skip];
  }
  const double gamma = cfg.budget.effective(rest.T());
  const double lo = min_soc_at_boundaries(tail, cfg.storage, rest, gamma, soc_at_8am, rest.K()).value;
  const double hi = max_soc_at_time(tail, cfg.storage, rest, gamma, soc_at_8am, rest.T()).value;
  return {clamp_soc(lo, cfg.storage), clamp_soc(hi, cfg.storage)};
}

// Dates are handled as days since 1970-01-01 (proleptic Gregorian).
namespace {

long days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<int>(static_cast<long>(yoe) + era * 400) + (m <= 2);
}

long parse_date(const std::string& s) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3 || m < 1 ||
      m > 12 || d < 1 || d > 31) {
    throw ConfigError("invalid date '" + s + "' (expected YYYY-MM-DD)");
  }
  const long z = days_from_civil(y, m, d);
  int y2;
  unsigned m2, d2;
  civil_from_days(z, y2, m2, d2);
  if (m2 != m || d2 != d) throw ConfigError("invalid date '" + s + "'");
  return z;
}

std::string format_date(long z) {
  int y;
  unsigned m, d;
  civil_from_days(z, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
  return buf;
}

// 0 = Sunday.
unsigned weekday(long z) { return static_cast<unsigned>(((z % 7) + 11) % 7); }

}  // namespace

std::string next_date(const std::string& date) { return format_date(parse_date(date) + 1); }

std::vector<std::string> date_range(const std::string& first, const std::string& last) {
  const long a = parse_date(first);
  const long b = parse_date(last);
  if (b < a) throw ConfigError("date range ends before it starts");
  std::vector<std::string> out;
  for (long z = a; z <= b; ++z) out.push_back(format_date(z));
  return out;
}

bool is_dst_transition(const std::string& date) {
  const long z = parse_date(date);
  int y;
  unsigned m, d;
  civil_from_days(z, y, m, d);
  if (m != 3 && m != 10) return false;
  // Last Sunday of March or October.
  return weekday(z) == 0 && d + 7 > 31;
}

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& p, std::size_t columns) {
  std::ifstream in(p);
  if (!in) throw DataError("missing data file " + p.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty data file " + p.string());
  std::vector<std::vector<std::string>> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != columns) {
      throw DataError(p.string() + ":" + std::to_string(n) + ": expected " +
                      std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(f));
  }
  return rows;
}

double cell_number(const std::string& s, const fs::path& p) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw DataError(p.string() + ": bad number '" + s + "'");
  return v;
}

std::vector<double> read_indexed(const fs::path& p, double step, std::size_t expected,
                                 const char* what) {
  const auto rows = read_csv(p, 2);
  if (rows.size() != expected) {
    throw DataError(p.string() + ": expected " + std::to_string(expected) + " " + what +
                    " rows, found " + std::to_string(rows.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double key = cell_number(rows[i][0], p);
    if (std::abs(key - step * static_cast<double>(i)) > 1e-9) {
      throw DataError(p.string() + ": rows out of order at " + rows[i][0]);
    }
    const double v = cell_number(rows[i][1], p);
    if (!std::isfinite(v)) throw DataError(p.string() + ": non-finite price");
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<double> read_dayahead_csv(const fs::path& p) { return read_indexed(p, 1.0, 24, "hourly"); }

std::vector<double> read_fcr_csv(const fs::path& p) { return read_indexed(p, 4.0, 6, "4h block"); }

FrequencyArchive read_frequency_csv(const fs::path& p) {
  const auto rows = read_csv(p, 2);
  FrequencyArchive f;
  const std::size_t n = 8640;
  f.hz.assign(n, kNominalHz);
  f.gap.assign(n, true);
  long prev = -1;
  for (const auto& r : rows) {
    const double sec = cell_number(r[0], p);
    const long idx = std::lround(sec / 10.0);
    if (std::abs(sec - 10.0 * static_cast<double>(idx)) > 1e-6 || idx < 0 ||
        idx >= static_cast<long>(n)) {
      throw DataError(p.string() + ": timestamp " + r[0] + " off the 10 s grid");
    }
    if (idx <= prev) throw DataError(p.string() + ": timestamps not increasing at " + r[0]);
    prev = idx;
    const double hz = std::strtod(r[1].c_str(), nullptr);
    if (!std::isfinite(hz) || hz <= 0.0) continue;
    f.hz[static_cast<std::size_t>(idx)] = hz;
    f.gap[static_cast<std::size_t>(idx)] = false;
  }
  // Hold the last valid value across gaps (nominal frequency before the first).
  double last = kNominalHz;
  for (std::size_t i = 0; i < n; ++i) {
    if (f.gap[i]) {
      f.hz[i] = last;
    } else {
      last = f.hz[i];
    }
  }
  return f;
}

DayData load_day(const fs::path& data_dir, const std::string& country,
                 const std::string& settlement_country, const std::string& date) {
  DayData d;
  d.date = date;
  d.prices.day_ahead = read_dayahead_csv(data_dir / country / "dayahead" / (date + ".csv"));
  d.prices.fcr_availability = read_fcr_csv(data_dir / country / "fcr" / (date + ".csv"));
  if (!settlement_country.empty() && settlement_country != country) {
    d.settlement_prices =
        read_dayahead_csv(data_dir / settlement_country / "dayahead" / (date + ".csv"));
  }
  const FrequencyArchive f = read_frequency_csv(data_dir / "frequency" / (date + ".csv"));
  d.frequency_gaps = f.longest_gap();
  d.signal = frequency_to_signal(f);
  return d;
}

BacktestSummary summarize(const std::vector<BacktestRecord>& records, const std::string& country) {
  BacktestSummary s;
  s.country = country;
  s.soc_min = kInf;
  s.soc_max = -kInf;
  for (const auto& r : records) {
    if (r.country != country) continue;
    if (r.skipped) {
      ++s.skipped;
      continue;
    }
    ++s.days;
    s.mean_profit_total += r.profit_total;
    s.mean_profit_fcr += r.profit_fcr;
    s.mean_profit_dayahead += r.profit_dayahead;
    s.mean_profit_intraday += r.profit_intraday;
    s.mean_throughput += r.throughput;
    s.mean_budget_usage += r.budget_usage;
    s.soc_min = std::min(s.soc_min, r.soc_min);
    s.soc_max = std::max(s.soc_max, r.soc_max);
    if (r.soc_violation > 1e-6) ++s.violation_days;
  }
  if (s.days > 0) {
    const auto n = static_cast<double>(s.days);
    s.mean_profit_total /= n;
    s.mean_profit_fcr /= n;
    s.mean_profit_dayahead /= n;
    s.mean_profit_intraday /= n;
    s.mean_throughput /= n;
    s.mean_budget_usage /= n;
  } else {
    s.soc_min = s.soc_max = 0.0;
  }
  return s;
}

BacktestReport run_backtest(const ExperimentConfig& cfg, const fs::path& data_dir) {
  cfg.validate();
  if (cfg.start_date.empty() || cfg.end_date.empty()) {
    throw ConfigError("backtest needs start_date and end_date");
  }
  const auto dates = date_range(cfg.start_date, cfg.end_date);
  BacktestReport report;
  for (const auto& country : cfg.countries) {
    double y_real = cfg.default_y0();
    const BacktestRecord* prev = nullptr;
    std::vector<BacktestRecord> recs;
    recs.reserve(dates.size());
    for (const auto& date : dates) {
      BacktestRecord skip;
      skip.date = date;
      skip.country = country;
      skip.skipped = true;
      if (cfg.exclude_dst && is_dst_transition(date)) {
        skip.skip_reason = "daylight saving transition";
        recs.push_back(skip);
        prev = nullptr;
        continue;
      }
      DayData day;
      try {
        day = load_day(data_dir, country, cfg.settlement_country, date);
      } catch (const DataError& e) {
        skip.skip_reason = e.what();
        recs.push_back(skip);
        prev = nullptr;
        continue;
      }
      if (day.frequency_gaps > static_cast<std::size_t>(cfg.max_gap_samples)) {
        skip.skip_reason = "frequency gap of " + std::to_string(day.frequency_gaps) + " samples";
        recs.push_back(skip);
        prev = nullptr;
        continue;
      }
      const double y0 = cfg.day_coupling ? y_real : cfg.default_y0();
      DayContext ctx{{y0, y0}, y0};
      if (cfg.bidding_time == BiddingTime::eight_am && prev && !prev->bids.x0.empty()) {
        ctx.planning_y0 = soc_interval_at_midnight(cfg, prev->bids, prev->trajectory.at(8.0));
      }
      BacktestRecord r = run_day(cfg, day, ctx);
      r.country = country;
      if (cfg.day_coupling) y_real = r.soc_midnight;
      recs.push_back(std::move(r));
      prev = &recs.back();
    }
    report.summaries.push_back(summarize(recs, country));
    for (auto& r : recs) report.records.push_back(std::move(r));
  }
  return report;
}

std::string record_to_json(const BacktestRecord& r) {
  nlohmann::ordered_json j;
  j["date"] = r.date;
  j["country"] = r.country;
  j["skipped"] = r.skipped;
  if (!r.skip_reason.empty()) j["reason"] = r.skip_reason;
  if (!r.skipped) {
    j["profit_total"] = r.profit_total;
    j["profit_fcr"] = r.profit_fcr;
    j["profit_dayahead"] = r.profit_dayahead;
    j["profit_intraday"] = r.profit_intraday;
    j["fcr_energy_settlement"] = r.fcr_energy_settlement;
    j["throughput"] = r.throughput;
    j["soc_initial"] = r.soc_initial;
    j["soc_min"] = r.soc_min;
    j["soc_max"] = r.soc_max;
    j["soc_midnight"] = r.soc_midnight;
    j["power_min"] = r.power_min;
    j["power_max"] = r.power_max;
    j["budget_usage"] = r.budget_usage;
    j["window_usage_max"] = r.window_usage_max;
    j["soc_violation"] = r.soc_violation;
    j["planned_y0"] = {r.planned_y0_lo, r.planned_y0_hi};
    j["solve_status"] = r.solve_status;
    j["objective"] = r.objective;
    j["gap"] = r.gap;
    j["binaries"] = r.binaries;
    j["x0"] = r.bids.x0;
    j["x_up"] = r.bids.x_up;
    j["x_dn"] = r.bids.x_dn;
  }
  return j.dump();
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_report(const BacktestReport& report, const fs::path& out_dir) {
  const bool per_country = report.summaries.size() > 1;
  for (const auto& s : report.summaries) {
    const fs::path dir = per_country ? out_dir / s.country : out_dir;
    fs::create_directories(dir);
    std::ofstream jl(dir / "report.jsonl", std::ios::binary);
    std::ofstream series(dir / "series.csv", std::ios::binary);
    series << "date,profit,cumulative_profit,cumulative_throughput\n";
    double cp = 0.0, ct = 0.0;
    for (const auto& r : report.records) {
      if (r.country != s.country) continue;
      jl << record_to_json(r) << '\n';
      const double p = r.skipped ? 0.0 : r.profit_total;
      cp += p;
      ct += r.skipped ? 0.0 : r.throughput;
      series << r.date << ',' << fixed(p, 6) << ',' << fixed(cp, 6) << ',' << fixed(ct, 6) << '\n';
    }
    std::ofstream sum(dir / "summary.txt", std::ios::binary);
    sum << "country                 " << s.country << '\n'
        << "days                    " << s.days << '\n'
        << "skipped                 " << s.skipped << '\n'
        << "mean profit total (EUR) " << fixed(s.mean_profit_total, 4) << '\n'
        << "mean profit FCR (EUR)   " << fixed(s.mean_profit_fcr, 4) << '\n'
        << "mean profit DA (EUR)    " << fixed(s.mean_profit_dayahead, 4) << '\n'
        << "mean profit ID (EUR)    " << fixed(s.mean_profit_intraday, 4) << '\n'
        << "mean throughput (kWh)   " << fixed(s.mean_throughput, 4) << '\n'
        << "SOC range (kWh)         " << fixed(s.soc_min, 3) << " .. " << fixed(s.soc_max, 3)
        << '\n'
        << "mean budget usage       " << fixed(s.mean_budget_usage, 4) << '\n'
        << "days with SOC violation " << s.violation_days << '\n';
  }
}

}  // namespace robustbid
