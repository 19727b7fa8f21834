#include "robustbid/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "robustbid/errors.hpp"

namespace robustbid {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t day, std::uint64_t stream) {
  return splitmix(splitmix(splitmix(seed) ^ day) ^ stream);
}

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

double usage_for_scale(const std::vector<double>& path, double scale, double h, double gamma) {
  double acc = 0.0;
  for (double x : path) acc += std::min(1.0, std::abs(scale * x) / kFullActivationHz);
  return acc * h / gamma;
}

}  // namespace

std::vector<double> synth_dayahead(std::uint64_t seed, const SynthOptions& o) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> p(24);
  for (int h = 0; h < 24; ++h) {
    // Trough in the early morning, peak at 18:00.
    const double shape = std::cos(2.0 * kPi * (h - 18) / 24.0);
    p[static_cast<std::size_t>(h)] = o.price_mean + 0.5 * o.price_spread * shape + o.price_noise * noise(rng);
  }
  return p;
}

std::vector<double> synth_fcr(std::uint64_t seed, const SynthOptions& o) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> p(6);
  for (auto& v : p) v = std::max(0.0, o.fcr_mean + o.fcr_noise * noise(rng));
  return p;
}

FrequencyArchive synth_frequency(std::uint64_t seed, const SynthOptions& o) {
  FrequencyArchive f;
  const std::size_t n = 8640;
  const double h = f.period_hours;
  f.hz.assign(n, kNominalHz);
  f.gap.assign(n, false);
  if (o.budget_target <= 0.0) return f;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double decay = std::exp(-o.reversion_per_hour * h);
  const double step = std::sqrt((1.0 - decay * decay) / (2.0 * o.reversion_per_hour));
  std::vector<double> path(n);
  double x = step * noise(rng) / std::sqrt(1.0 - decay * decay);
  for (auto& v : path) {
    x = decay * x + step * noise(rng);
    v = x;
  }
  const double target = std::min(o.budget_target, 24.0 / o.gamma_hours);
  double lo = 0.0, hi = 1.0;
  while (usage_for_scale(path, hi, h, o.gamma_hours) < target && hi < 1e9) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (usage_for_scale(path, mid, h, o.gamma_hours) < target ? lo : hi) = mid;
  }
  for (std::size_t i = 0; i < n; ++i) {
    // Stored at 0.1 mHz resolution, as written to the CSV files.
    f.hz[i] = std::round((kNominalHz + hi * path[i]) * 1e4) / 1e4;
  }
  return f;
}

std::vector<std::string> write_synthetic_dataset(const SynthOptions& o, const fs::path& out_dir) {
  if (o.days < 1) throw ConfigError("synth: days must be positive");
  if (o.countries.empty()) throw ConfigError("synth: no country given");
  std::vector<std::string> dates;
  std::string d = o.start_date;
  for (int i = 0; i < o.days; ++i) {
    dates.push_back(d);
    d = next_date(d);
  }
  auto open = [](const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    return out;
  };
  char buf[64];
  for (std::size_t i = 0; i < dates.size(); ++i) {
    const auto day = static_cast<std::uint64_t>(i);
    for (const auto& c : o.countries) {
      auto da = open(out_dir / c / "dayahead" / (dates[i] + ".csv"));
      da << "hour,price_eur_mwh\n";
      const auto prices = synth_dayahead(stream_seed(o.seed, day, name_hash(c) ^ 1), o);
      for (std::size_t h = 0; h < prices.size(); ++h) {
        std::snprintf(buf, sizeof buf, "%zu,%.2f\n", h, prices[h]);
        da << buf;
      }
      auto fcr = open(out_dir / c / "fcr" / (dates[i] + ".csv"));
      fcr << "block_start_hour,price_eur_mw_4h\n";
      const auto blocks = synth_fcr(stream_seed(o.seed, day, name_hash(c) ^ 2), o);
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        std::snprintf(buf, sizeof buf, "%zu,%.2f\n", 4 * b, blocks[b]);
        fcr << buf;
      }
    }
    auto fq = open(out_dir / "frequency" / (dates[i] + ".csv"));
    fq << "seconds,hz\n";
    const auto f = synth_frequency(stream_seed(o.seed, day, 3), o);
    for (std::size_t s = 0; s < f.hz.size(); ++s) {
      std::snprintf(buf, sizeof buf, "%zu,%.4f\n", 10 * s, f.hz[s]);
      fq << buf;
    }
  }
  return dates;
}

}  // namespace robustbid
