#pragma once

// Shared helpers for unit and acceptance tests: seeded random instances,
// fixed-bid SOC estimates and the exact-solver hookup.

#include <cstdlib>
#include <limits>
#include <random>
#include <string>

#include "robustbid/model_builder.hpp"
#include "robustbid/soc_engine.hpp"
#include "robustbid/solver_bridge.hpp"

#ifndef ROBUSTBID_SOURCE_DIR
#define ROBUSTBID_SOURCE_DIR "."
#endif

namespace robustbid::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline int uniform_int(Rng& rng, int a, int b) {
  return std::uniform_int_distribution<int>(a, b)(rng);
}

inline StorageParams random_storage(Rng& rng, bool lossless = false) {
  StorageParams p;
  p.x_max = uniform(rng, 1.0, 5.0);
  p.x_min = -uniform(rng, 1.0, 5.0);
  p.y_min = uniform(rng, 0.0, 1.0);
  p.y_max = p.y_min + uniform(rng, 2.0, 10.0);
  p.eta_c = lossless ? 1.0 : uniform(rng, 0.8, 1.0);
  p.eta_d = lossless ? 1.0 : uniform(rng, 0.8, 1.0);
  return p;
}

// Bids inside the power bounds; about a quarter of the regulation bids are zero.
inline BidSchedule random_bids(Rng& rng, const StorageParams& p, int K, bool symmetric = false) {
  BidSchedule b = BidSchedule::zeros(K);
  b.symmetric = symmetric;
  for (int k = 0; k < K; ++k) {
    b.x0[k] = uniform(rng, p.x_min, p.x_max);
    const double room_dn = b.x0[k] - p.x_min;
    const double room_up = p.x_max - b.x0[k];
    b.x_dn[k] = uniform_int(rng, 0, 3) == 0 ? 0.0 : uniform(rng, 0.0, room_dn);
    b.x_up[k] = uniform_int(rng, 0, 3) == 0 ? 0.0 : uniform(rng, 0.0, room_up);
    if (symmetric) {
      const double r = std::min(b.x_dn[k], room_up);
      b.x_dn[k] = b.x_up[k] = r;
    }
  }
  return b;
}

// Hourly prices; FCR availability priced per interval.
inline PriceSeries random_prices(Rng& rng, const TimeGrid& grid, bool nonnegative) {
  PriceSeries s;
  s.da_period_hours = grid.dt();
  s.fcr_block_hours = grid.dt();
  for (int k = 0; k < grid.K(); ++k) {
    s.day_ahead.push_back(nonnegative ? uniform(rng, 0.0, 100.0) : uniform(rng, -40.0, 100.0));
    s.fcr_availability.push_back(uniform(rng, 0.0, 30.0) * grid.dt());
  }
  return s;
}

struct Instance {
  ModelInputs inputs;
  ModelOptions options;
};

// Small model instance: K in [2, max_K], dt = 1h, total budget of one or two
// intervals, independent up and down bids, no block coupling.
inline Instance random_instance(Rng& rng, int max_K, bool lossless = false,
                                bool nonnegative_prices = false) {
  Instance in;
  const int K = uniform_int(rng, 2, max_K);
  in.inputs.grid = TimeGrid(1.0, K);
  in.inputs.params = random_storage(rng, lossless);
  const auto& p = in.inputs.params;
  in.inputs.budget = UncertaintyBudget::total(uniform_int(rng, 1, 2) * 1.0);
  const double y0 = uniform(rng, p.y_min, p.y_max);
  in.inputs.y0 = {y0, y0};
  in.inputs.prices = random_prices(rng, in.inputs.grid, nonnegative_prices);
  in.options.coupling = false;
  in.options.symmetric = false;
  in.options.relaxation_shortcut = false;
  return in;
}

inline SolveOptions tight_options() {
  SolveOptions o;
  o.time_limit = 120.0;
  o.gap_target = 0.0;
  return o;
}

inline std::string scip_shim() { return std::string(ROBUSTBID_SOURCE_DIR) + "/tools/scip_solve.py"; }

// Points ROBUSTBID_SOLVER at the bundled SCIP shim unless already set.
inline void use_exact_solver() {
  setenv(kSolverEnv, scip_shim().c_str(), 0);
}

inline bool scip_available() {
  return std::system("python3 -c 'import pyscipopt' > /dev/null 2>&1") == 0;
}

// Fixes the bid variables of `ir` to `bids`.
inline void fix_bids(ModelIR& ir, const BidSchedule& bids) {
  for (int k = 0; k < bids.size(); ++k) {
    ir.set_bounds(ir.index(var_name("x0", k)), bids.x0[k], bids.x0[k]);
    ir.set_bounds(ir.index(var_name("xup", k)), bids.x_up[k], bids.x_up[k]);
    ir.set_bounds(ir.index(var_name("xdn", k)), bids.x_dn[k], bids.x_dn[k]);
  }
}

// Smallest upper SOC estimate of interval k that the model's rows admit for
// fixed bids: y0 + min (gamma*lamhi_k + dt*sum_l Lhi_k_l) over the remaining
// variables. NaN if the solve fails.
inline double max_soc_estimate(const ModelInputs& in, ModelOptions opt, const BidSchedule& bids,
                               int k) {
  opt.terminal_soc_floor.reset();
  ModelIR ir = build_model(in, opt);
  fix_bids(ir, bids);
  const auto soc_row = ir.find_row(var_name("sochi", k));
  ir.objective() = ir.rows()[static_cast<std::size_t>(*soc_row)].terms;
  ir.objective_constant = 0.0;
  // SOC limits would cut the estimate off; only the rows defining it stay.
  ir.remove_rows([](const LinearRow& r) {
    return r.name.rfind("sochi_", 0) == 0 || r.name.rfind("soclo_", 0) == 0 || r.name == "terminal";
  });
  const SolveResult r = solve_with(HighsBackend(), ir, tight_options());
  if (r.status != SolveStatus::optimal) return std::numeric_limits<double>::quiet_NaN();
  return in.y0.hi + r.objective;
}

}  // namespace robustbid::testing
