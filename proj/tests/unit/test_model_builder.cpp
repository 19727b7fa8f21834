#include <cmath>

#include "doctest.h"
#include "robustbid/model_builder.hpp"
#include "test_support.hpp"

using namespace robustbid;
using namespace robustbid::testing;

namespace {

ModelInputs day_inputs() {
  ModelInputs in;
  in.params = StorageParams::reference_battery();
  in.grid = TimeGrid(0.25, 96);
  in.budget = UncertaintyBudget::from_eu_rules(0.25);
  const double y0 = in.params.default_initial_soc();
  in.y0 = {y0, y0};
  in.prices = PriceSeries::zeros(24.0);
  for (int h = 0; h < 24; ++h) in.prices.day_ahead[h] = 50.0 + 30.0 * std::sin(h / 3.0);
  in.prices.fcr_availability.assign(6, 40.0);
  return in;
}

ModelOptions with_variant(Variant v) {
  ModelOptions o;
  o.variant = v;
  return o;
}

}  // namespace

TEST_CASE("variable names are one-based") {
  CHECK(var_name("x0", 0) == "x0_1");
  CHECK(var_name("Lhi", 3, 1) == "Lhi_4_2");
  const ModelIR ir = build_model(day_inputs(), ModelOptions{});
  CHECK(ir.has("x0_1"));
  CHECK(ir.has("x0_96"));
  CHECK_FALSE(ir.has("x0_0"));
  CHECK_FALSE(ir.has("x0_97"));
}

TEST_CASE("variant names round-trip") {
  for (Variant v : {Variant::exact, Variant::relaxation, Variant::restriction,
                    Variant::arbitrage_only, Variant::lossless_lp, Variant::no_sell_lp}) {
    CHECK(parse_variant(to_string(v)) == v);
  }
  CHECK_THROWS_AS(parse_variant("bogus"), ConfigError);
  CHECK(parse_limited_rule(to_string(LimitedArbitrageRule::per_interval)) ==
        LimitedArbitrageRule::per_interval);
}

TEST_CASE("structural counts for a day of quarter hours") {
  const ModelInputs in = day_inputs();
  const int K = 96;
  const ModelIR exact = build_model(in, with_variant(Variant::exact));
  CHECK(exact.num_bilinear_rows() == 4560);
  CHECK(exact.num_binaries() == 190);
  const ModelIR restr = build_model(in, with_variant(Variant::restriction));
  CHECK(restr.num_binaries() == 285);
  CHECK(restr.num_bilinear_rows() == 0);
  CHECK(restr.bilinear_rows().size() == 4560);
  const ModelIR relax = build_model(in, with_variant(Variant::relaxation));
  CHECK(relax.num_binaries() == 190);
  CHECK(relax.num_bilinear_rows() == 0);
  std::size_t lower = 0;
  for (const char* prefix : {"soclo_", "dLlo_", "alc_", "ald_", "bec_", "bed_"}) {
    lower += exact.count_rows_with_prefix(prefix);
  }
  CHECK(lower == static_cast<std::size_t>(K * (K + 1) / 2 + 5 * K));
  CHECK(exact.count_rows_with_prefix("sochi_") == 96);
}

TEST_CASE("tractable variants carry no binaries and no active bilinear rows") {
  ModelInputs in = day_inputs();
  const ModelIR ns = build_model(in, with_variant(Variant::no_sell_lp));
  CHECK(ns.num_binaries() == 0);
  CHECK(ns.num_bilinear_rows() == 0);
  for (int k = 0; k < 96; ++k) CHECK(ns.variables()[ns.index(var_name("x0", k))].upper == 0.0);
  CHECK_THROWS_AS(build_model(in, with_variant(Variant::lossless_lp)), ConfigError);
  in.params.eta_c = in.params.eta_d = 1.0;
  const ModelIR ll = build_model(in, with_variant(Variant::lossless_lp));
  CHECK(ll.num_binaries() == 0);
  CHECK(ll.num_bilinear_rows() == 0);
}

TEST_CASE("arbitrage-only model") {
  ModelInputs in = day_inputs();
  ModelOptions o = with_variant(Variant::arbitrage_only);
  o.relaxation_shortcut = false;
  CHECK(build_model(in, o).num_binaries() == 95);
  o.relaxation_shortcut = true;
  CHECK(build_model(in, o).num_binaries() == 0);
  in.prices.day_ahead[5] = -10.0;
  CHECK(build_model(in, o).num_binaries() == 95);
  o.intraday = true;
  CHECK_THROWS_AS(build_model(in, o), ConfigError);
}

TEST_CASE("objective coefficients") {
  const ModelInputs in = day_inputs();
  ModelOptions o;
  o.symmetric = true;
  const ModelIR ir = build_model(in, o);
  std::map<std::string, double> c;
  for (const auto& t : ir.objective()) c[ir.variables()[t.var].name] += t.coeff;
  CHECK(c["x0_1"] == doctest::Approx(-in.prices.day_ahead[0] * 1e-3 * 0.25));
  CHECK(c["x0_9"] == doctest::Approx(-in.prices.day_ahead[2] * 1e-3 * 0.25));
  CHECK(c["xdn_1"] == doctest::Approx(-40.0 / 4.0 * 1e-3 * 0.25));
  CHECK(c.count("xup_1") == 0);
  o.symmetric = false;
  const ModelIR asym = build_model(in, o);
  std::map<std::string, double> d;
  for (const auto& t : asym.objective()) d[asym.variables()[t.var].name] += t.coeff;
  CHECK(d["xup_1"] == doctest::Approx(d["xdn_1"]));
}

TEST_CASE("market coupling rows") {
  const ModelInputs in = day_inputs();
  ModelOptions o;
  const ModelIR ir = build_model(in, o);
  CHECK(ir.count_rows_with_prefix("sym_") == 96);
  CHECK(ir.count_rows_with_prefix("fcrblk_") == 96 - 6);
  CHECK(ir.count_rows_with_prefix("fcrblkup_") == 0);
  CHECK(ir.count_rows_with_prefix("dablk_") == 96 - 24);
  o.fcr_block = 7;
  CHECK_THROWS_AS(build_model(in, o), BuildError);
  o.fcr_block = 16;
  o.coupling = false;
  const ModelIR free_ir = build_model(in, o);
  CHECK(free_ir.count_rows_with_prefix("dablk_") == 0);
  CHECK(free_ir.count_rows_with_prefix("sym_") == 96);
}

TEST_CASE("budget must align with the grid") {
  ModelInputs in = day_inputs();
  in.budget = UncertaintyBudget::total(0.3);
  CHECK_THROWS_AS(build_model(in, ModelOptions{}), BuildError);
  in.budget = UncertaintyBudget::total(0.0);
  CHECK_THROWS_AS(build_model(in, ModelOptions{}), BuildError);
}

TEST_CASE("terminal, intraday and limited-arbitrage rows") {
  ModelInputs in = day_inputs();
  ModelOptions o;
  o.terminal_soc_floor = 50.0;
  CHECK(build_model(in, o).find_row("terminal").has_value());
  o.terminal_soc_floor.reset();
  o.intraday = true;
  const ModelIR id = build_model(in, o);
  CHECK(id.count_rows_with_prefix("deid_") > 0);
  const auto& pmax2 = id.rows()[static_cast<std::size_t>(*id.find_row("pmax_2"))];
  bool has_lam = false;
  for (const auto& t : pmax2.terms) has_lam = has_lam || id.variables()[t.var].name == "lamid_2";
  CHECK(has_lam);
  in.budget = UncertaintyBudget::total(2.75);
  CHECK_THROWS_AS(build_model(in, o), ConfigError);
  in.budget = UncertaintyBudget::from_eu_rules(0.25);
  o.intraday = false;
  o.limited_arbitrage = true;
  const ModelIR lb = build_model(in, o);
  CHECK(lb.count_rows_with_prefix("limsell_") == 6);
  CHECK(lb.count_rows_with_prefix("limbuy_") == 6);
  o.limited_rule = LimitedArbitrageRule::per_interval;
  const ModelIR li = build_model(in, o);
  CHECK(li.count_rows_with_prefix("limhi_") == 96);
  o.fcr_enabled = false;
  CHECK_THROWS_AS(build_model(in, o), ConfigError);
}

TEST_CASE("intraday headroom with gamma' = dt equals the largest scaled bid in the window") {
  Rng rng(21);
  ModelInputs in = day_inputs();
  in.grid = TimeGrid(0.25, 16);
  in.prices = PriceSeries::zeros(4.0);
  in.budget = UncertaintyBudget::rolling(0.25, 1.25);
  ModelOptions o;
  o.coupling = false;
  o.intraday = true;
  const double c = 0.25 / (1.25 - 0.25);
  for (int it = 0; it < 10; ++it) {
    BidSchedule b = random_bids(rng, in.params, 16, true);
    for (int k = 1; k < 16; ++k) {
      ModelIR ir = build_model(in, o);
      fix_bids(ir, b);
      ir.relax_integrality();
      // Minimize the reserved headroom of interval k.
      const auto& row = ir.rows()[static_cast<std::size_t>(*ir.find_row(var_name("pmax", k)))];
      ir.objective().clear();
      for (const auto& t : row.terms) {
        const std::string& n = ir.variables()[t.var].name;
        if (n.rfind("lamid", 0) == 0 || n.rfind("eid", 0) == 0) ir.objective().push_back(t);
      }
      ir.remove_rows([](const LinearRow& r) {
        return r.name.rfind("pmax", 0) == 0 || r.name.rfind("pmin", 0) == 0 ||
               r.name.rfind("soc", 0) == 0;
      });
      const SolveResult r = solve_with(HighsBackend(), ir, tight_options());
      REQUIRE(r.status == SolveStatus::optimal);
      double want = 0.0;
      for (int i = std::max(0, k + 1 - 5); i <= k - 1; ++i) want = std::max(want, c * b.x_dn[i]);
      CHECK(r.objective == doctest::Approx(want).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("model SOC estimates bracket the exact worst case") {
  Rng rng(22);
  for (int it = 0; it < 30; ++it) {
    const Instance inst = random_instance(rng, 5);
    const auto& in = inst.inputs;
    const BidSchedule b = random_bids(rng, in.params, in.grid.K());
    const double gamma = in.budget.effective(in.grid.T());
    for (int k = 0; k < in.grid.K(); ++k) {
      const double exact = max_soc_over_interval(b, in.params, in.grid, gamma, in.y0.hi, k).value;
      ModelOptions o = inst.options;
      o.variant = Variant::relaxation;
      const double lo = max_soc_estimate(in, o, b, k);
      o.variant = Variant::restriction;
      const double hi = max_soc_estimate(in, o, b, k);
      CHECK(lo <= exact + 1e-7);
      CHECK(exact <= hi + 1e-7);
    }
  }
}

TEST_CASE("lower SOC rows reproduce the exact minimum") {
  Rng rng(23);
  for (int it = 0; it < 20; ++it) {
    const Instance inst = random_instance(rng, 5);
    const auto& in = inst.inputs;
    const BidSchedule b = random_bids(rng, in.params, in.grid.K());
    const double gamma = in.budget.effective(in.grid.T());
    const int k = uniform_int(rng, 0, in.grid.K() - 1);
    ModelIR ir = build_model(in, inst.options);
    fix_bids(ir, b);
    const auto& row = ir.rows()[static_cast<std::size_t>(*ir.find_row(var_name("soclo", k)))];
    // soclo_k reads -(gamma*lam + dt*sum(alpha + L)) >= y_min - y0.
    ir.objective().clear();
    for (const auto& t : row.terms) ir.objective().push_back({t.var, -t.coeff});
    ir.remove_rows([](const LinearRow& r) {
      return r.name.rfind("soclo_", 0) == 0 || r.name.rfind("sochi_", 0) == 0;
    });
    const SolveResult r = solve_with(HighsBackend(), ir, tight_options());
    REQUIRE(r.status == SolveStatus::optimal);
    const double want = min_soc_at_boundaries(b, in.params, in.grid, gamma, in.y0.lo, k + 1).value;
    CHECK(in.y0.lo - r.objective == doctest::Approx(want).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("bid extraction snaps blocks and mirrors symmetric bids") {
  const ModelInputs in = day_inputs();
  ModelOptions o;
  const ModelIR ir = build_model(in, o);
  BidSchedule b = BidSchedule::zeros(96);
  for (int k = 0; k < 96; ++k) {
    b.x0[k] = (k / 4) + 1e-12 * k;
    b.x_dn[k] = 3.0;
    b.x_up[k] = 3.0;
  }
  std::vector<double> x = bid_point(ir, b);
  x[static_cast<std::size_t>(ir.index("xup_5"))] = 0.0;
  const BidSchedule got = extract_bids(ir, x, in.grid, o);
  CHECK(got.symmetric);
  CHECK(got.x_up[4] == 3.0);
  CHECK(got.x0[5] == got.x0[4]);
  CHECK_NOTHROW(got.validate());
}
