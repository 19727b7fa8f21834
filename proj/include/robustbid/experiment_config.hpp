#pragma once

// Experiment configuration and its flat key=value file format.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robustbid/core_types.hpp"
#include "robustbid/model_builder.hpp"

namespace robustbid {

enum class BiddingTime { midnight, eight_am };

// How the day-ahead-only terminal SOC floor is set each day.
enum class TerminalRule { none, initial, value };

struct ExperimentConfig {
  std::string name = "custom";
  ModelOptions model;
  StorageParams storage = StorageParams::reference_battery();
  double dt_hours = 0.25;
  int horizon_intervals = 96;
  UncertaintyBudget budget = UncertaintyBudget::from_eu_rules(0.25);
  BiddingTime bidding_time = BiddingTime::midnight;
  bool day_coupling = false;
  std::optional<double> initial_soc;  // default: symmetric-headroom SOC
  TerminalRule terminal = TerminalRule::initial;
  double terminal_value = 0.0;

  double time_limit = 120.0;
  double gap = 1e-6;
  std::optional<long> node_limit;
  // Seed joint solves with the arbitrage-only plan completed to a full point.
  bool warm_start = true;
  int seed = 0;
  std::string backend = "auto";

  std::vector<std::string> countries = {"FR"};
  // Country whose day-ahead prices value the realized regulation energy;
  // empty means each country's own prices.
  std::string settlement_country;
  std::string start_date;
  std::string end_date;
  bool exclude_dst = true;
  // Days with frequency gaps longer than this many samples are skipped.
  int max_gap_samples = 0;

  TimeGrid grid() const { return TimeGrid(dt_hours, horizon_intervals); }
  double default_y0() const { return initial_soc.value_or(storage.default_initial_soc()); }
  void validate() const;

  // Unknown keys and malformed values throw ConfigError.
  static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);
  static ExperimentConfig from_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  std::map<std::string, std::string> to_map() const;
  std::string to_text() const;
};

std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace robustbid
