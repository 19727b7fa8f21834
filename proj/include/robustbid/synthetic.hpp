#pragma once

// Offline data generator: sinusoidal day-ahead prices and mean-reverting
// frequency noise scaled so that each day uses a target share of the budget.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "robustbid/backtester.hpp"

namespace robustbid {

struct SynthOptions {
  std::uint64_t seed = 1;
  int days = 30;
  std::string start_date = "2021-01-04";
  std::vector<std::string> countries = {"FR"};
  double price_mean = 60.0;    // EUR/MWh
  double price_spread = 40.0;  // peak-to-trough, EUR/MWh
  double price_noise = 5.0;
  double fcr_mean = 40.0;      // EUR/MW per 4h block
  double fcr_noise = 8.0;
  // Target share of the deviation budget used per day; 0 gives a flat
  // 50 Hz signal.
  double budget_target = 0.7;
  double gamma_hours = 2.75;
  double reversion_per_hour = 30.0;
};

std::vector<double> synth_dayahead(std::uint64_t seed, const SynthOptions& o);
std::vector<double> synth_fcr(std::uint64_t seed, const SynthOptions& o);
FrequencyArchive synth_frequency(std::uint64_t seed, const SynthOptions& o);

// Writes the CSV layout read by load_day and returns the generated dates.
std::vector<std::string> write_synthetic_dataset(const SynthOptions& o,
                                                 const std::filesystem::path& out_dir);

}  // namespace robustbid
