// Command-line entry point: build, solve-day, backtest, verify, example1, synth.
// Exit codes: 0 success, 1 data error, 2 config error, 3 solver error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "robustbid/backtester.hpp"
#include "robustbid/errors.hpp"
#include "robustbid/model_builder.hpp"
#include "robustbid/soc_engine.hpp"
#include "robustbid/solver_bridge.hpp"
#include "robustbid/synthetic.hpp"

namespace fs = std::filesystem;
using namespace robustbid;

namespace {

struct Common {
  std::string config;
  std::string data_dir;
  std::string out;
  std::optional<double> time_limit;
  std::optional<double> gap;
  std::string variant;
  std::optional<int> seed;
};

ExperimentConfig load_config(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : ExperimentConfig::from_file(c.config);
  if (c.time_limit) cfg.time_limit = *c.time_limit;
  if (c.gap) cfg.gap = *c.gap;
  if (!c.variant.empty()) cfg.model.variant = parse_variant(c.variant);
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& p, const std::string& bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << bytes;
}

ModelFormat format_for(const std::string& explicit_format, const fs::path& out) {
  if (!explicit_format.empty()) return parse_format(explicit_format);
  return out.extension() == ".lp" ? ModelFormat::lp : ModelFormat::mps_free;
}

int cmd_build(const Common& c, const std::string& format, const std::string& date) {
  const ExperimentConfig cfg = load_config(c);
  if (c.out.empty()) throw ConfigError("build: --out is required");
  ModelInputs in;
  in.params = cfg.storage;
  in.grid = cfg.grid();
  in.budget = cfg.budget;
  const double y0 = cfg.default_y0();
  in.y0 = {y0, y0};
  if (!c.data_dir.empty() && !date.empty()) {
    in.prices = load_day(c.data_dir, cfg.countries.front(), "", date).prices;
  } else {
    in.prices = PriceSeries::zeros(in.grid.T());
  }
  ModelOptions opt = cfg.model;
  if (cfg.terminal == TerminalRule::initial) opt.terminal_soc_floor = y0;
  if (cfg.terminal == TerminalRule::value) opt.terminal_soc_floor = cfg.terminal_value;
  const ModelIR ir = build_model(in, opt);
  const ModelFormat fmt = format_for(format, c.out);
  const std::string bytes = emit_model(ir, fmt);
  write_file(c.out, bytes);

  nlohmann::ordered_json m;
  m["variant"] = ir.variant;
  m["horizon"] = ir.horizon;
  m["format"] = fmt == ModelFormat::lp ? "lp" : fmt == ModelFormat::mps_fixed ? "mps_fixed" : "mps_free";
  m["variables"] = ir.num_variables();
  m["linear_rows"] = ir.num_rows();
  m["binaries"] = ir.num_binaries();
  m["bilinear_rows"] = ir.num_bilinear_rows();
  m["bilinear_rows_inactive"] = ir.bilinear_rows().size() - ir.num_bilinear_rows();
  m["bytes"] = bytes.size();
  m["checksum_fnv1a64"] = checksum_hex(bytes);
  m["config_checksum_fnv1a64"] = checksum_hex(cfg.to_text());
  write_file(c.out + ".manifest.json", m.dump(2) + "\n");
  std::cout << "wrote " << c.out << " (" << ir.variant << ", " << ir.num_binaries() << " binaries, "
            << ir.num_bilinear_rows() << " bilinear rows)\n";
  return 0;
}

int cmd_solve_day(const Common& c, const std::string& date, std::optional<double> y0_flag) {
  const ExperimentConfig cfg = load_config(c);
  if (c.data_dir.empty() || date.empty()) throw ConfigError("solve-day: --data-dir and --date are required");
  const DayData day = load_day(c.data_dir, cfg.countries.front(), cfg.settlement_country, date);
  if (day.frequency_gaps > static_cast<std::size_t>(cfg.max_gap_samples)) {
    throw DataError("skipped: frequency gap of " + std::to_string(day.frequency_gaps) + " samples");
  }
  const double y0 = y0_flag.value_or(cfg.default_y0());
  BacktestRecord r = run_day(cfg, day, {{y0, y0}, y0});
  r.country = cfg.countries.front();
  if (!c.out.empty()) write_file(c.out, record_to_json(r) + "\n");
  if (r.solve_status != "optimal" && r.solve_status != "feasible_limit") {
    throw SolverError("solve failed (" + r.solve_status + "): " + r.skip_reason);
  }
  std::printf("date %s  status %s  objective %.6f EUR\n", r.date.c_str(), r.solve_status.c_str(),
              r.objective);
  std::printf("profit total %.6f = FCR %.6f + day-ahead %.6f + intraday %.6f EUR\n", r.profit_total,
              r.profit_fcr, r.profit_dayahead, r.profit_intraday);
  std::printf("SOC %.3f .. %.3f kWh, midnight %.3f kWh, throughput %.3f kWh\n", r.soc_min,
              r.soc_max, r.soc_midnight, r.throughput);
  const FeasibilityReport fr =
      check_feasibility(r.bids, cfg.storage, cfg.grid(), planning_budget(cfg.budget, cfg.grid(), cfg.model.intraday),
                        InitialSoc{r.planned_y0_lo, r.planned_y0_hi});
  std::printf("worst-case check: %s (worst violation %.3g kWh)\n",
              fr.feasible ? "feasible" : "VIOLATED", fr.worst_violation);
  std::printf("realized budget usage %.3f, realized SOC violation %.3g kWh\n", r.budget_usage,
              r.soc_violation);
  return 0;
}

int cmd_backtest(const Common& c) {
  const ExperimentConfig cfg = load_config(c);
  if (c.data_dir.empty() || c.out.empty()) throw ConfigError("backtest: --data-dir and --out are required");
  const BacktestReport rep = run_backtest(cfg, c.data_dir);
  write_report(rep, c.out);
  double seconds = 0.0;
  for (const auto& r : rep.records) seconds += r.solve_time;
  for (const auto& s : rep.summaries) {
    std::printf("%s: %zu days (%zu skipped), mean profit %.4f EUR, mean throughput %.3f kWh\n",
                s.country.c_str(), s.days, s.skipped, s.mean_profit_total, s.mean_throughput);
  }
  std::printf("total solve time %.2f s\n", seconds);
  return 0;
}

BidSchedule read_bids_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot read bids file " + p.string());
  std::string line;
  std::getline(in, line);
  BidSchedule b;
  b.symmetric = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> f;
    while (std::getline(ss, cell, ',')) f.push_back(std::strtod(cell.c_str(), nullptr));
    if (f.size() != 4) throw DataError("bids file: expected interval,x0,x_up,x_dn");
    b.x0.push_back(f[1]);
    b.x_up.push_back(f[2]);
    b.x_dn.push_back(f[3]);
  }
  return b;
}

void print_witness(const WorstCaseResult& w) {
  std::printf("    witness xi:");
  for (double v : w.witness) std::printf(" %.4f", v);
  std::printf("  (%s, exhausted at t = %.4f h, lambda = %.4f)\n",
              w.direction == WorstCaseResult::Direction::down ? "downward signal" : "upward signal",
              w.exhaustion_time, w.lambda_star);
}

int cmd_verify(const Common& c, const std::string& bids_path, std::optional<double> y0_flag) {
  const ExperimentConfig cfg = load_config(c);
  if (bids_path.empty()) throw ConfigError("verify: --bids is required");
  const BidSchedule bids = read_bids_csv(bids_path);
  const TimeGrid grid = cfg.grid();
  if (static_cast<int>(bids.x0.size()) != grid.K()) {
    throw DataError("bids file has " + std::to_string(bids.x0.size()) + " rows, horizon has " +
                    std::to_string(grid.K()));
  }
  const double y0 = y0_flag.value_or(cfg.default_y0());
  const double gamma = planning_budget(cfg.budget, grid, cfg.model.intraday);
  const FeasibilityReport rep = check_feasibility(bids, cfg.storage, grid, gamma, {y0, y0});
  std::printf("feasible: %s  (%zu violations, worst %.6g)\n", rep.feasible ? "yes" : "no",
              rep.violation_count(), rep.worst_violation);
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const auto& e = rep.entries[i];
    if (e.slack >= -1e-6) continue;
    std::printf("  %-12s index %3d  slack %.6f\n", to_string(e.kind).c_str(), e.index + 1, e.slack);
    for (const auto& [pos, w] : rep.witnesses) {
      if (pos == i) print_witness(w);
    }
  }
  return 0;
}

int cmd_example1(double step) {
  StorageParams p;
  p.x_min = -5.0;
  p.x_max = 5.0;
  p.y_min = 0.0;
  p.y_max = 10.0;
  p.eta_c = 0.85;
  p.eta_d = 0.85;
  const TimeGrid grid(1.0, 2);
  BidSchedule b = BidSchedule::zeros(2);
  b.symmetric = false;
  b.x0 = {1.0, 0.5};
  b.x_dn = {2.5, 3.5};
  const double gamma = 1.0;
  std::printf("%8s %12s %10s   witness\n", "t/dt", "max SOC", "lambda");
  double peak_t = 0.0, peak = -kInf;
  const int n = static_cast<int>(std::llround(2.0 / step));
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(2.0, i * step);
    const WorstCaseResult w = max_soc_at_time(b, p, grid, gamma, 0.0, t);
    std::printf("%8.3f %12.6f %10.4f  ", t, w.value, w.lambda_star);
    for (double v : w.witness) std::printf(" %.4f", v);
    std::printf("\n");
    if (w.value > peak + 1e-12) {
      peak = w.value;
      peak_t = t;
    }
  }
  for (int k = 0; k < 2; ++k) {
    const WorstCaseResult w = max_soc_over_interval(b, p, grid, gamma, 0.0, k);
    std::printf("interval %d: max SOC %.6f kWh at t = %.4f\n", k + 1, w.value, w.exhaustion_time);
  }
  std::printf("peak %.6f kWh at t = %.3f dt\n", peak, peak_t);
  return 0;
}

int cmd_synth(const Common& c, SynthOptions o, const std::string& countries) {
  if (c.out.empty()) throw ConfigError("synth: --out is required");
  if (c.seed) o.seed = static_cast<std::uint64_t>(*c.seed);
  if (!countries.empty()) {
    o.countries.clear();
    std::stringstream ss(countries);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) o.countries.push_back(item);
    }
  }
  const auto dates = write_synthetic_dataset(o, c.out);
  std::printf("wrote %zu days (%s .. %s) to %s\n", dates.size(), dates.front().c_str(),
              dates.back().c_str(), c.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust day-ahead bidding for battery storage"};
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* s) {
    s->add_option("--config", c.config, "Key=value experiment configuration");
    s->add_option("--data-dir", c.data_dir, "Data directory");
    s->add_option("--out", c.out, "Output file or directory");
    s->add_option("--time-limit", c.time_limit, "Solver time limit (s)");
    s->add_option("--gap", c.gap, "Relative MIP gap target");
    s->add_option("--variant", c.variant, "Model variant override");
    s->add_option("--seed", c.seed, "Seed for solver or generator");
  };

  std::string format, date, bids;
  std::optional<double> y0;
  double step = 0.1;
  SynthOptions so;
  std::string countries;

  auto* build = app.add_subcommand("build", "Emit a model file and manifest");
  common(build);
  build->add_option("--format", format, "mps, fixed-mps or lp (default from extension)");
  build->add_option("--date", date, "Use prices of this date from --data-dir");

  auto* day = app.add_subcommand("solve-day", "Bid and settle one day");
  common(day);
  day->add_option("--date", date, "Date (YYYY-MM-DD)");
  day->add_option("--y0", y0, "Initial SOC (kWh)");

  auto* bt = app.add_subcommand("backtest", "Run the daily loop over a date range");
  common(bt);

  auto* ver = app.add_subcommand("verify", "Worst-case feasibility of a bid file");
  common(ver);
  ver->add_option("--bids", bids, "CSV with interval,x0,x_up,x_dn");
  ver->add_option("--y0", y0, "Initial SOC (kWh)");

  auto* ex = app.add_subcommand("example1", "Maximum SOC over time for a two-interval example");
  ex->add_option("--step", step, "Time step as a fraction of dt")->check(CLI::PositiveNumber);

  auto* syn = app.add_subcommand("synth", "Generate a synthetic dataset");
  common(syn);
  syn->add_option("--days", so.days, "Number of days");
  syn->add_option("--start-date", so.start_date, "First date");
  syn->add_option("--spread", so.price_spread, "Day-ahead peak-to-trough spread (EUR/MWh)");
  syn->add_option("--price-mean", so.price_mean, "Mean day-ahead price (EUR/MWh)");
  syn->add_option("--price-noise", so.price_noise, "Day-ahead noise (EUR/MWh)");
  syn->add_option("--fcr-mean", so.fcr_mean, "Mean FCR price (EUR/MW per 4h)");
  syn->add_option("--budget-target", so.budget_target, "Share of the budget used per day");
  syn->add_option("--gamma", so.gamma_hours, "Budget used for calibration (h)");
  syn->add_option("--countries", countries, "Comma-separated country ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*build) return cmd_build(c, format, date);
    if (*day) return cmd_solve_day(c, date, y0);
    if (*bt) return cmd_backtest(c);
    if (*ver) return cmd_verify(c, bids, y0);
    if (*ex) return cmd_example1(step);
    if (*syn) return cmd_synth(c, so, countries);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const VerificationError& e) {
    std::cerr << "verification error: " << e.what() << '\n';
    return 3;
  } catch (const RefusalError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
