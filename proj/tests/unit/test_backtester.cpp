#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "robustbid/backtester.hpp"
#include "robustbid/experiment_config.hpp"
#include "robustbid/synthetic.hpp"
#include "test_support.hpp"

using namespace robustbid;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("robustbid_unit_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig hourly_config() {
  return ExperimentConfig::from_text(
      "dt_hours = 1\nhorizon_intervals = 24\ngamma_prime = 1\nGamma_prime = 3\n"
      "fcr_block = 4\nda_block = 1\n");
}

DayData flat_day(const TimeGrid& grid, double price, double fcr_price, double xi) {
  DayData d;
  d.date = "2021-01-04";
  d.prices.day_ahead.assign(24, price);
  d.prices.fcr_availability.assign(6, fcr_price);
  d.signal = RegulationSignal::constant(kFrequencyPeriodHours, grid.T(), xi);
  return d;
}

}  // namespace

TEST_CASE("frequency maps to a clipped ramp") {
  CHECK(frequency_to_signal(49.7) == 1.0);
  CHECK(frequency_to_signal(49.8) == 1.0);
  CHECK(frequency_to_signal(50.0) == 0.0);
  CHECK(frequency_to_signal(50.1) == -0.5);
  CHECK(frequency_to_signal(50.2) == -1.0);
  CHECK(frequency_to_signal(50.3) == -1.0);
  CHECK(frequency_to_signal(49.95) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(frequency_to_signal(std::nan("")), DataError);
}

TEST_CASE("budget usage integrates the absolute signal") {
  const RegulationSignal s(0.5, {1.0, -1.0, 0.5, 0.0});
  CHECK(budget_usage(s, 1.0) == doctest::Approx(1.25));
  CHECK(budget_usage(s, 2.5) == doctest::Approx(0.5));
  CHECK(budget_usage(s, 1.0, 0.5, 1.5) == doctest::Approx(0.75));
  CHECK_THROWS_AS(budget_usage(s, 0.0), DomainError);
}

TEST_CASE("max window usage matches a direct scan") {
  testing::Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v(48);
    for (auto& x : v) x = testing::uniform(rng, -1.0, 1.0);
    const RegulationSignal s(0.25, v);
    const double gp = 0.5, Gp = 2.0;
    double best = 0.0;
    for (double t = 0.0; t < s.duration() - 1e-12; t += 0.25) {
      best = std::max(best, s.abs_integral(t, std::min(t + Gp, s.duration())) / gp);
    }
    CHECK(max_window_usage(s, gp, Gp) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("intraday adjustment for a single active interval") {
  const TimeGrid grid(0.25, 96);
  std::vector<double> xi(static_cast<std::size_t>(grid.T() / kFrequencyPeriodHours + 0.5), 0.0);
  const int per = static_cast<int>(round_to_seconds(0.25) / round_to_seconds(kFrequencyPeriodHours));
  const int i = 10;
  for (int j = 0; j < per; ++j) xi[static_cast<std::size_t>(i * per + j)] = 1.0;
  const RegulationSignal s(kFrequencyPeriodHours, xi);
  const std::vector<double> xr(96, 8.0);
  // The window has 9 intervals; interval i is compensated over the next 8.
  for (int j = 0; j < 96; ++j) {
    const double a = intraday_adjustment(xr, s, grid, j, 2.25);
    if (j > i && j <= i + 8) {
      CHECK(a == doctest::Approx(-1.0).epsilon(1e-12));
    } else {
      CHECK(a == 0.0);
    }
  }
  CHECK_THROWS_AS(intraday_adjustment(xr, s, grid, 96, 2.25), DomainError);
  CHECK_THROWS_AS(intraday_adjustment(xr, s, grid, 0, 0.25), DomainError);
}

TEST_CASE("intraday adjustments sum the window contributions") {
  testing::Rng rng(5);
  const TimeGrid grid(0.25, 96);
  const double Gp = 2.25;
  const int G = 9;
  std::vector<double> v(96 * 4);
  for (auto& x : v) x = testing::uniform(rng, -1.0, 1.0);
  const RegulationSignal s(0.0625, v);
  std::vector<double> xr(96);
  for (auto& x : xr) x = testing::uniform(rng, 0.0, 20.0);
  const auto adj = intraday_adjustments(xr, s, grid, Gp);
  // Interval i contributes -xr_i * int(xi) / (Gp - dt) to intervals i+1..i+G-1.
  for (int j = 0; j < 96; ++j) {
    double expect = 0.0;
    for (int i = std::max(0, j + 1 - G); i < j; ++i) {
      expect -= xr[static_cast<std::size_t>(i)] * s.integral(grid.start(i), grid.end(i)) / (Gp - 0.25);
    }
    CHECK(adj[static_cast<std::size_t>(j)] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("constant regulation bid needs at most an eighth of it within the window budget") {
  const TimeGrid grid(0.25, 96);
  const std::vector<double> xr(96, 40.0);
  // Full activation for gamma' = 15 min at the start of every 2.25h window.
  std::vector<double> v(96, 0.0);
  for (int k = 0; k < 96; k += 9) v[static_cast<std::size_t>(k)] = (k / 9) % 2 ? 1.0 : -1.0;
  const RegulationSignal s(0.25, v);
  CHECK(max_window_usage(s, 0.25, 2.25) <= 1.0 + 1e-12);
  for (double a : intraday_adjustments(xr, s, grid, 2.25)) CHECK(std::abs(a) <= 40.0 / 8 + 1e-12);
}

TEST_CASE("calendar helpers") {
  CHECK(next_date("2021-02-28") == "2021-03-01");
  CHECK(next_date("2020-02-28") == "2020-02-29");
  CHECK(next_date("2021-12-31") == "2022-01-01");
  const auto r = date_range("2021-01-30", "2021-02-02");
  REQUIRE(r.size() == 4);
  CHECK(r.back() == "2021-02-02");
  CHECK(is_dst_transition("2021-03-28"));
  CHECK(is_dst_transition("2021-10-31"));
  CHECK(is_dst_transition("2020-03-29"));
  CHECK_FALSE(is_dst_transition("2021-03-21"));
  CHECK_FALSE(is_dst_transition("2021-10-24"));
  CHECK_THROWS(next_date("2021-13-01"));
}

TEST_CASE("CSV readers reject malformed files") {
  const fs::path d = scratch_dir("csv");
  std::string da = "hour,price_eur_mwh\n";
  for (int h = 0; h < 24; ++h) da += std::to_string(h) + "," + std::to_string(10 + h) + "\n";
  write_file(d / "ok.csv", da);
  const auto prices = read_dayahead_csv(d / "ok.csv");
  REQUIRE(prices.size() == 24);
  CHECK(prices[5] == 15.0);

  write_file(d / "short.csv", "hour,price_eur_mwh\n0,1\n1,2\n");
  CHECK_THROWS_AS(read_dayahead_csv(d / "short.csv"), DataError);
  write_file(d / "bad.csv", "hour,price_eur_mwh\n0,abc\n");
  CHECK_THROWS_AS(read_dayahead_csv(d / "bad.csv"), DataError);
  CHECK_THROWS_AS(read_dayahead_csv(d / "missing.csv"), DataError);
  write_file(d / "fcr.csv", "block_start_hour,price_eur_mw_4h\n0,1\n4,2\n8,3\n12,4\n16,5\n");
  CHECK_THROWS_AS(read_fcr_csv(d / "fcr.csv"), DataError);
}

TEST_CASE("frequency reader fills gaps") {
  const fs::path d = scratch_dir("freq");
  std::string text = "seconds,hz\n";
  for (int i = 0; i < 8640; ++i) {
    if (i >= 100 && i < 103) continue;
    text += std::to_string(i * 10) + ",50.05\n";
  }
  write_file(d / "f.csv", text);
  const FrequencyArchive f = read_frequency_csv(d / "f.csv");
  REQUIRE(f.hz.size() == 8640);
  CHECK(f.gap_count() == 3);
  CHECK(f.longest_gap() == 3);
  CHECK(frequency_to_signal(f).values()[0] == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("settlement of a flat day") {
  ExperimentConfig cfg = hourly_config();
  const TimeGrid grid = cfg.grid();
  const DayData day = flat_day(grid, 50.0, 20.0, 0.0);
  BidSchedule b = BidSchedule::zeros(24);
  b.symmetric = true;
  for (int k = 0; k < 24; ++k) {
    b.x0[k] = k < 12 ? -5.0 : 5.0;
    b.x_up[k] = b.x_dn[k] = 10.0;
  }
  const BacktestRecord r = settle_day(cfg, day, b, 50.0);
  CHECK(r.profit_dayahead == doctest::Approx(0.0).epsilon(1e-12));
  // 20 EUR/MW per 4h block is 5 EUR/MWh; 10 kW for 24h.
  CHECK(r.profit_fcr == doctest::Approx(5e-3 * 10.0 * 24.0));
  CHECK(r.profit_total == r.profit_fcr + r.profit_dayahead + r.profit_intraday);
  CHECK(r.throughput == doctest::Approx(cfg.storage.eta_c * 5.0 * 12.0));
  CHECK(r.soc_max == doctest::Approx(50.0 + cfg.storage.eta_c * 60.0));
  CHECK(r.soc_midnight == doctest::Approx(r.soc_max - 60.0 / cfg.storage.eta_d));
  CHECK(r.power_min == -5.0);
  CHECK(r.power_max == 5.0);
  CHECK(r.budget_usage == 0.0);
}

TEST_CASE("settlement accounting identity with intraday trades") {
  ExperimentConfig cfg = hourly_config();
  cfg.model.intraday = true;
  const TimeGrid grid = cfg.grid();
  testing::Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    DayData day = flat_day(grid, 0.0, 0.0, 0.0);
    for (auto& p : day.prices.day_ahead) p = testing::uniform(rng, -20.0, 120.0);
    for (auto& p : day.prices.fcr_availability) p = testing::uniform(rng, 0.0, 60.0);
    std::vector<double> v(day.signal.size());
    for (auto& x : v) x = testing::uniform(rng, -0.3, 0.3);
    day.signal = RegulationSignal(kFrequencyPeriodHours, v);
    BidSchedule b = testing::random_bids(rng, cfg.storage, 24, true);
    const BacktestRecord r = settle_day(cfg, day, b, cfg.default_y0());
    CHECK(std::abs(r.profit_total - (r.profit_fcr + r.profit_dayahead + r.profit_intraday)) <= 1e-9);
    CHECK(r.profit_intraday != 0.0);
  }
}

TEST_CASE("SOC interval at midnight for 8am bidding") {
  ExperimentConfig cfg = hourly_config();
  BidSchedule idle = BidSchedule::zeros(24);
  const InitialSoc same = soc_interval_at_midnight(cfg, idle, 40.0);
  CHECK(same.lo == 40.0);
  CHECK(same.hi == 40.0);

  BidSchedule b = BidSchedule::zeros(24);
  b.symmetric = true;
  for (int k = 0; k < 24; ++k) b.x_up[k] = b.x_dn[k] = 1.0;
  const InitialSoc band = soc_interval_at_midnight(cfg, b, 50.0);
  const double gamma = cfg.budget.effective(16.0);
  CHECK(band.hi == doctest::Approx(50.0 + cfg.storage.eta_c * gamma));
  CHECK(band.lo == doctest::Approx(50.0 - gamma / cfg.storage.eta_d));
}

TEST_CASE("synthetic data is reproducible and hits the budget target") {
  SynthOptions o;
  o.days = 2;
  o.seed = 9;
  const fs::path a = scratch_dir("synth_a"), b = scratch_dir("synth_b");
  const auto dates = write_synthetic_dataset(o, a);
  write_synthetic_dataset(o, b);
  REQUIRE(dates.size() == 2);
  for (const auto& date : dates) {
    for (const auto& rel : {"FR/dayahead/" + date + ".csv", "FR/fcr/" + date + ".csv",
                            "frequency/" + date + ".csv"}) {
      CHECK(slurp(a / rel) == slurp(b / rel));
    }
    const DayData day = load_day(a, "FR", "", date);
    CHECK(day.prices.day_ahead.size() == 24);
    CHECK(day.frequency_gaps == 0);
    CHECK(budget_usage(day.signal, o.gamma_hours) == doctest::Approx(o.budget_target).epsilon(0.01));
  }
  o.seed = 10;
  const fs::path c = scratch_dir("synth_c");
  write_synthetic_dataset(o, c);
  CHECK(slurp(a / ("frequency/" + dates[0] + ".csv")) != slurp(c / ("frequency/" + dates[0] + ".csv")));
}

TEST_CASE("config text round trip") {
  ExperimentConfig c = ExperimentConfig::from_text(
      "# joint bidding\nvariant = relaxation\nintraday = true\ngamma_prime = 0.25\n"
      "Gamma_prime = 2.25\ncountries = FR, DE\nstart_date = 2021-01-04\nend_date = 2021-01-10\n");
  CHECK(c.model.variant == Variant::relaxation);
  CHECK(c.model.intraday);
  REQUIRE(c.countries.size() == 2);
  CHECK(c.countries[1] == "DE");
  const ExperimentConfig d = ExperimentConfig::from_text(c.to_text());
  CHECK(d.to_text() == c.to_text());
  CHECK(d.budget.Gamma_prime == 2.25);
  CHECK_THROWS_AS(ExperimentConfig::from_text("no_such_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_text("dt_hours = fast\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_text("variant = bogus\n"), ConfigError);
}

TEST_CASE("backtest skips unusable days") {
  const fs::path d = scratch_dir("bt_skip");
  SynthOptions o;
  o.days = 1;
  o.start_date = "2021-03-27";
  write_synthetic_dataset(o, d);
  ExperimentConfig cfg = hourly_config();
  cfg.start_date = "2021-03-27";
  cfg.end_date = "2021-03-29";
  cfg.time_limit = 30;
  cfg.gap = 0.01;
  const BacktestReport rep = run_backtest(cfg, d);
  REQUIRE(rep.records.size() == 3);
  CHECK_FALSE(rep.records[0].skipped);
  CHECK(rep.records[1].skipped);
  CHECK(rep.records[1].skip_reason == "daylight saving transition");
  CHECK(rep.records[2].skipped);
  CHECK(rep.summaries.at(0).skipped == 2);
  CHECK(rep.records[0].solve_status == "optimal");
}
