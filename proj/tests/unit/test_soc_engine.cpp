#include <cmath>

#include "doctest.h"
#include "robustbid/soc_engine.hpp"
#include "test_support.hpp"

using namespace robustbid;
using namespace robustbid::testing;

namespace {

// max over xi in [0, 1] of rate(x0 - xi*x_dn) - lambda*xi on a fine grid plus
// the kink where the power output changes sign.
double phi_oracle(double x0, double xdn, double lam, const StorageParams& p) {
  auto f = [&](double xi) { return soc_rate(x0 - xi * xdn, p) - lam * xi; };
  double best = std::max(f(0.0), f(1.0));
  for (int i = 1; i < 2000; ++i) best = std::max(best, f(i / 2000.0));
  if (xdn > 0.0 && x0 > 0.0 && x0 < xdn) best = std::max(best, f(x0 / xdn));
  return best;
}

BidSchedule example1_bids() {
  BidSchedule b = BidSchedule::zeros(2);
  b.x0 = {1.0, 0.5};
  b.x_dn = {2.5, 3.5};
  return b;
}

StorageParams example1_storage() {
  StorageParams p;
  p.x_min = -5.0;
  p.x_max = 5.0;
  p.y_min = 0.0;
  p.y_max = 10.0;
  p.eta_c = 0.85;
  p.eta_d = 0.85;
  return p;
}

}  // namespace

TEST_CASE("power output and SOC rate") {
  CHECK(power_output(1.0, 2.0, 3.0, 0.5) == doctest::Approx(2.0));
  CHECK(power_output(1.0, 2.0, 3.0, -0.5) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(power_output(0.0, 0.0, 0.0, 1.5), DomainError);
  StorageParams p = example1_storage();
  CHECK(soc_rate(2.0, p) == doctest::Approx(-2.0 / 0.85));
  CHECK(soc_rate(-2.0, p) == doctest::Approx(2.0 * 0.85));
  CHECK(soc_rate(0.0, p) == 0.0);
}

TEST_CASE("phi matches a direct maximization over the deviation") {
  Rng rng(11);
  for (int it = 0; it < 500; ++it) {
    const StorageParams p = random_storage(rng);
    const double x0 = uniform(rng, p.x_min, p.x_max);
    const double xdn = uniform_int(rng, 0, 4) == 0 ? 0.0 : uniform(rng, 0.0, x0 - p.x_min);
    const double lam = uniform_int(rng, 0, 4) == 0 ? 0.0 : uniform(rng, 0.0, p.lambda_cap());
    const double got = phi(x0, xdn, lam, p);
    const double want = phi_oracle(x0, xdn, lam, p);
    CHECK(got == doctest::Approx(want).epsilon(1e-9).scale(1.0));
  }
  CHECK_THROWS_AS(phi(0.0, -1.0, 0.0, example1_storage()), DomainError);
  CHECK_THROWS_AS(phi(0.0, 1.0, -1.0, example1_storage()), DomainError);
}

TEST_CASE("phi is convex and nonincreasing in lambda") {
  Rng rng(12);
  for (int it = 0; it < 200; ++it) {
    const StorageParams p = random_storage(rng);
    const double x0 = uniform(rng, p.x_min, p.x_max);
    const double xdn = uniform(rng, 0.0, x0 - p.x_min);
    const double a = uniform(rng, 0.0, p.lambda_cap());
    const double b = uniform(rng, 0.0, p.lambda_cap());
    const double fa = phi(x0, xdn, a, p), fb = phi(x0, xdn, b, p);
    CHECK(phi(x0, xdn, 0.5 * (a + b), p) <= 0.5 * (fa + fb) + 1e-12);
    CHECK((a <= b ? fa >= fb - 1e-12 : fb >= fa - 1e-12));
  }
}

TEST_CASE("two-interval example: maximum SOC over time") {
  const BidSchedule b = example1_bids();
  const StorageParams p = example1_storage();
  const TimeGrid g(1.0, 2);
  CHECK(max_soc_at_time(b, p, g, 1.0, 0.0, 1.0).value == doctest::Approx(1.275).epsilon(1e-12));
  CHECK(max_soc_at_time(b, p, g, 1.0, 0.0, 1.6).value == doctest::Approx(1.53).epsilon(1e-12));
  CHECK(max_soc_at_time(b, p, g, 1.0, 0.0, 2.0).value ==
        doctest::Approx(3.0 * 0.85 - 1.0 / 0.85).epsilon(1e-12));
  const auto w = max_soc_over_interval(b, p, g, 1.0, 0.0, 1);
  CHECK(w.value == doctest::Approx(1.53));
  CHECK(w.exhaustion_time == doctest::Approx(1.6));
  CHECK(evaluate_witness(b, p, g, 0.0, w) == doctest::Approx(1.53));
  CHECK(max_soc_over_interval(b, p, g, 1.0, 0.0, 0).value == doctest::Approx(1.275));
}

TEST_CASE("worst-case witnesses attain the analytic maximum") {
  Rng rng(13);
  for (int it = 0; it < 200; ++it) {
    const StorageParams p = random_storage(rng);
    const int K = uniform_int(rng, 1, 8);
    const TimeGrid g(0.25, K);
    const BidSchedule b = random_bids(rng, p, K);
    const double gamma = 0.25 * uniform_int(rng, 1, K);
    const double y0 = uniform(rng, p.y_min, p.y_max);
    for (int k = 0; k < K; ++k) {
      const auto w = max_soc_over_interval(b, p, g, gamma, y0, k);
      double used = 0.0;
      for (std::size_t l = 0; l < w.witness.size(); ++l) {
        CHECK(w.witness[l] >= -1e-12);
        CHECK(w.witness[l] <= 1.0 + 1e-12);
        used += w.witness[l] * sigma(g, w.exhaustion_time, static_cast<int>(l));
      }
      CHECK(used <= gamma + 1e-9);
      CHECK(evaluate_witness(b, p, g, y0, w) == doctest::Approx(w.value).epsilon(1e-9).scale(1.0));
    }
    for (int k = 0; k <= K; ++k) {
      const auto w = min_soc_at_boundaries(b, p, g, gamma, y0, k);
      CHECK(evaluate_witness(b, p, g, y0, w) == doctest::Approx(w.value).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("maximum SOC over an interval dominates pointwise maxima") {
  Rng rng(14);
  for (int it = 0; it < 100; ++it) {
    const StorageParams p = random_storage(rng);
    const int K = uniform_int(rng, 1, 5);
    const TimeGrid g(1.0, K);
    const BidSchedule b = random_bids(rng, p, K);
    const double gamma = uniform_int(rng, 1, K);
    const int k = uniform_int(rng, 0, K - 1);
    const double best = max_soc_over_interval(b, p, g, gamma, 0.0, k).value;
    for (int j = 0; j <= 10; ++j) {
      const double t = k + j / 10.0;
      CHECK(max_soc_at_time(b, p, g, gamma, 0.0, t).value <= best + 1e-9);
    }
  }
}

TEST_CASE("worst case bounds every sampled signal inside the budget") {
  Rng rng(15);
  const double h = 1.0 / 60.0;
  for (int it = 0; it < 50; ++it) {
    const StorageParams p = random_storage(rng);
    const int K = uniform_int(rng, 1, 6);
    const TimeGrid g(0.5, K);
    const BidSchedule b = random_bids(rng, p, K);
    const double gamma = 0.5 * uniform_int(rng, 1, K);
    std::vector<double> xi(static_cast<std::size_t>(K * 30));
    double used = 0.0;
    for (auto& v : xi) {
      v = uniform(rng, -1.0, 1.0);
      if (used + std::abs(v) * h > gamma) v = 0.0;
      used += std::abs(v) * h;
    }
    const auto tr = simulate_soc(b, RegulationSignal(h, xi), p, g, 0.0);
    for (int k = 0; k < K; ++k) {
      const double hi = max_soc_over_interval(b, p, g, gamma, 0.0, k).value;
      for (int j = 0; j <= 30; ++j) CHECK(tr.soc[static_cast<std::size_t>(k * 30 + j)] <= hi + 1e-9);
    }
    for (int k = 0; k <= K; ++k) {
      CHECK(tr.soc[static_cast<std::size_t>(k * 30)] >=
            min_soc_at_boundaries(b, p, g, gamma, 0.0, k).value - 1e-9);
    }
  }
}

TEST_CASE("simulation integrates piecewise-constant signals exactly") {
  StorageParams p = example1_storage();
  const TimeGrid g(1.0, 2);
  BidSchedule b = example1_bids();
  const auto tr = simulate_soc(b, RegulationSignal(0.5, {-1.0, 0.0, 0.0, 0.0}), p, g, 1.0);
  // First half hour: output 1 - 2.5 = -1.5 kW charges at eta_c.
  CHECK(tr.at(0.5) == doctest::Approx(1.0 + 0.5 * 1.5 * 0.85));
  CHECK(tr.terminal() == doctest::Approx(1.0 + 0.5 * 1.5 * 0.85 - 0.5 / 0.85 - 0.5 / 0.85));
  const std::vector<double> adj = {0.0, -0.5};
  const auto shifted = simulate_soc(b, RegulationSignal(0.5, {0, 0, 0, 0}), p, g, 1.0, adj);
  CHECK(shifted.terminal() == doctest::Approx(1.0 - 1.0 / 0.85));
  CHECK_THROWS_AS(simulate_soc(b, RegulationSignal(0.5, {0, 0}), p, g, 1.0), AlignmentError);
}

TEST_CASE("brute force is a lower bound that converges") {
  const BidSchedule b = example1_bids();
  const StorageParams p = example1_storage();
  const TimeGrid g(1.0, 2);
  const double bf = brute_force_max_soc(b, p, g, 1.0, 0.0, 1, 50);
  CHECK(bf <= 1.53 + 1e-12);
  CHECK(bf == doctest::Approx(1.53).epsilon(0.01));
  CHECK_THROWS_AS(brute_force_max_soc(BidSchedule::zeros(5), p, TimeGrid(1.0, 5), 1.0, 0.0, 4, 2),
                  RefusalError);
  CHECK_THROWS_AS(brute_force_max_soc(b, p, g, 1.0, 0.0, 1, 400), RefusalError);
}

TEST_CASE("feasibility report on the two-interval example") {
  StorageParams p = example1_storage();
  p.y_max = 1.4;
  const TimeGrid g(1.0, 2);
  BidSchedule b = example1_bids();
  const auto rep = check_feasibility(b, p, g, 1.0, InitialSoc{2.0, 0.0});
  CHECK_FALSE(rep.feasible);
  bool upper_violation = false;
  for (const auto& [pos, w] : rep.witnesses) {
    if (rep.entries[pos].kind == FeasibilityEntry::Kind::soc_upper) {
      upper_violation = true;
      CHECK(rep.entries[pos].index == 1);
      CHECK(w.value == doctest::Approx(1.53));
    }
  }
  CHECK(upper_violation);
  p.y_max = 10.0;
  CHECK(check_feasibility(b, p, g, 1.0, InitialSoc{2.0, 0.0}).feasible);
}

TEST_CASE("no bids leave the SOC unchanged") {
  const StorageParams p = StorageParams::reference_battery();
  const TimeGrid g(0.25, 96);
  const BidSchedule b = BidSchedule::zeros(96);
  CHECK(max_soc_over_interval(b, p, g, 2.75, 50.0, 40).value == doctest::Approx(50.0));
  CHECK(min_soc_at_boundaries(b, p, g, 2.75, 50.0, 96).value == doctest::Approx(50.0));
}

TEST_CASE("oracle preconditions") {
  const StorageParams p = example1_storage();
  const TimeGrid g(1.0, 2);
  BidSchedule b = example1_bids();
  CHECK_THROWS_AS(max_soc_at_time(b, p, g, -1.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(max_soc_at_time(b, p, g, 1.0, 0.0, 3.0), DomainError);
  b.x0[0] = 4.0;
  b.x_up[0] = 2.0;
  CHECK_THROWS_AS(max_soc_over_interval(b, p, g, 1.0, 0.0, 0), PreconditionError);
}
