#include "doctest.h"
#include "robustbid/core_types.hpp"

using namespace robustbid;

TEST_CASE("time grid arithmetic") {
  const TimeGrid g(0.25, 96);
  CHECK(g.T() == doctest::Approx(24.0));
  CHECK(g.start(4) == doctest::Approx(1.0));
  CHECK(g.end(4) == doctest::Approx(1.25));
  CHECK(g.interval_at(0.0) == 0);
  CHECK(g.interval_at(0.25) == 1);
  CHECK(g.interval_at(24.0) == 95);
  CHECK_THROWS_AS(g.interval_at(24.5), DomainError);
  CHECK_THROWS_AS(TimeGrid(0.0, 4), DomainError);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), DomainError);
}

TEST_CASE("sigma is the clamped elapsed time of an interval") {
  const TimeGrid g(1.0, 3);
  CHECK(sigma(g, 0.0, 0) == 0.0);
  CHECK(sigma(g, 0.4, 0) == doctest::Approx(0.4));
  CHECK(sigma(g, 1.0, 0) == 1.0);
  CHECK(sigma(g, 1.0, 1) == 0.0);
  CHECK(sigma(g, 1.6, 1) == doctest::Approx(0.6));
  CHECK(sigma(g, 3.0, 2) == 1.0);
  CHECK(sigma(g, 0.5, 2) == 0.0);
  CHECK_THROWS_AS(sigma(g, 3.5, 0), DomainError);
  CHECK_THROWS_AS(sigma(g, 1.0, 3), DomainError);
}

TEST_CASE("sigma sums to the elapsed time") {
  const TimeGrid g(0.25, 8);
  for (double t = 0.0; t <= 2.0; t += 0.05) {
    double s = 0.0;
    for (int l = 0; l < g.K(); ++l) s += sigma(g, t, l);
    CHECK(s == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("multiples are decided on whole seconds") {
  CHECK(is_multiple_of(2.75, 0.25));
  CHECK(is_multiple_of(0.25, 0.25));
  CHECK_FALSE(is_multiple_of(0.3, 0.25));
  CHECK_FALSE(is_multiple_of(0.0, 0.25));
  CHECK(is_multiple_of(1.0 / 3.0, 1.0 / 360.0));
}

TEST_CASE("effective budget of the rolling window rule") {
  CHECK(effective_budget(0.25, 2.25, 24.0) == 2.75);
  CHECK(UncertaintyBudget::from_eu_rules(0.25).effective(24.0) == 2.75);
  // A partial trailing window contributes at most gamma'.
  CHECK(effective_budget(1.0, 3.0, 7.0) == doctest::Approx(3.0));
  CHECK(effective_budget(1.0, 3.0, 6.5) == doctest::Approx(2.5));
  CHECK(effective_budget(1.0, 3.0, 2.0) == doctest::Approx(1.0));
  CHECK(UncertaintyBudget::total(30.0).effective(24.0) == 24.0);
  CHECK_THROWS_AS(effective_budget(0.0, 2.0, 24.0), DomainError);
  CHECK_THROWS_AS(effective_budget(3.0, 2.0, 24.0), DomainError);
}

TEST_CASE("budget validation") {
  const TimeGrid g(0.25, 96);
  CHECK_NOTHROW(UncertaintyBudget::total(2.75).validate(g));
  CHECK_THROWS_AS(UncertaintyBudget::total(0.0).validate(g), DomainError);
  CHECK_THROWS_AS(UncertaintyBudget::total(-1.0).validate(g), DomainError);
  CHECK_THROWS_AS(UncertaintyBudget::total(0.3).validate(g), AlignmentError);
  CHECK_THROWS_AS(UncertaintyBudget::total(25.0).validate(g), DomainError);
  CHECK_NOTHROW(UncertaintyBudget::from_eu_rules(0.25).validate(g));
  CHECK_THROWS_AS(UncertaintyBudget::rolling(0.3, 2.3).validate(g), AlignmentError);
}

TEST_CASE("reference battery") {
  const StorageParams p = StorageParams::reference_battery();
  CHECK_NOTHROW(p.validate());
  CHECK(std::abs(p.default_initial_soc() - 53.328) < 1e-3);
  CHECK(p.specific_loss() == doctest::Approx(1.0 / 0.92 - 0.92));
  CHECK_FALSE(p.lossless());
  StorageParams bad = p;
  bad.eta_c = 1.2;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.x_min = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("default initial SOC: the energy that fills the battery also empties it") {
  const StorageParams p = StorageParams::reference_battery();
  const double y0 = p.default_initial_soc();
  const double e = (p.y_max - y0) / p.eta_c;
  CHECK(y0 - e / p.eta_d == doctest::Approx(p.y_min));
}

TEST_CASE("bid schedule validation") {
  BidSchedule b = BidSchedule::zeros(8);
  CHECK_NOTHROW(b.validate());
  b.x_dn[3] = -1.0;
  CHECK_THROWS_AS(b.validate(), DomainError);
  b = BidSchedule::zeros(8);
  b.symmetric = true;
  b.x_up[0] = 1.0;
  CHECK_THROWS_AS(b.validate(), DomainError);
  b = BidSchedule::zeros(8);
  b.fcr_block_len = 4;
  b.x_up.assign(8, 0.0);
  b.x_up[1] = 2.0;
  CHECK_THROWS_AS(b.validate(), DomainError);
  b.x_up = {2, 2, 2, 2, 1, 1, 1, 1};
  CHECK_NOTHROW(b.validate());
}

TEST_CASE("regulation signal integrals") {
  const RegulationSignal s(0.5, {1.0, -0.5, 0.25, 0.0});
  CHECK(s.duration() == 2.0);
  CHECK(s.integral(0.0, 2.0) == doctest::Approx(0.375));
  CHECK(s.abs_integral(0.0, 2.0) == doctest::Approx(0.875));
  CHECK(s.integral(0.25, 0.75) == doctest::Approx(0.25 - 0.125));
  CHECK(s.value_at(0.6) == -0.5);
  CHECK(s.value_at(5.0) == 0.0);
  CHECK_THROWS_AS(RegulationSignal(0.5, {1.5}), DomainError);
}

TEST_CASE("signal alignment with the grid") {
  const TimeGrid g(0.25, 4);
  CHECK_NOTHROW(RegulationSignal::constant(10.0 / 3600.0, 1.0, 0.0).check_alignment(g));
  CHECK_THROWS_AS(RegulationSignal::constant(7.0 / 3600.0, 1.0, 0.0).check_alignment(g),
                  AlignmentError);
  CHECK_THROWS_AS(RegulationSignal::constant(10.0 / 3600.0, 0.5, 0.0).check_alignment(g),
                  AlignmentError);
}

TEST_CASE("price series lookups") {
  PriceSeries p = PriceSeries::zeros(24.0);
  CHECK(p.day_ahead.size() == 24);
  CHECK(p.fcr_availability.size() == 6);
  p.day_ahead[3] = 80.0;
  p.fcr_availability[1] = 20.0;
  CHECK(p.day_ahead_at(3.5) == 80.0);
  CHECK(p.fcr_rate_at(4.0) == doctest::Approx(5.0));
  CHECK(p.nonnegative());
  p.day_ahead[0] = -1.0;
  CHECK_FALSE(p.nonnegative());
  CHECK_NOTHROW(p.check_alignment(TimeGrid(0.25, 96), true));
  CHECK_THROWS_AS(p.check_alignment(TimeGrid(0.25, 100), true), DataError);
  CHECK_THROWS_AS(p.check_alignment(TimeGrid(1.5, 16), false), DataError);
}
