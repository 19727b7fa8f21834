#pragma once

// Builders for the day-ahead bidding models. Interval indices are 0-based in
// code; variable names use 1-based suffixes (x0_1 .. x0_K) so that emitted
// files read naturally.

#include <optional>
#include <string>
#include <vector>

#include "robustbid/core_types.hpp"
#include "robustbid/model_ir.hpp"
#include "robustbid/soc_engine.hpp"

namespace robustbid {

enum class Variant { exact, relaxation, restriction, arbitrage_only, lossless_lp, no_sell_lp };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

enum class LimitedArbitrageRule { per_block, per_interval };

std::string to_string(LimitedArbitrageRule r);
LimitedArbitrageRule parse_limited_rule(const std::string& s);

struct ModelOptions {
  Variant variant = Variant::restriction;
  bool fcr_enabled = true;
  bool intraday = false;
  std::optional<double> terminal_soc_floor;
  bool limited_arbitrage = false;
  LimitedArbitrageRule limited_rule = LimitedArbitrageRule::per_block;
  bool coupling = true;
  int fcr_block = 16;
  int da_block = 4;
  bool symmetric = true;
  // Solve the continuous relaxation of the arbitrage-only model when every
  // price is nonnegative (the relaxation is then optimal).
  bool relaxation_shortcut = true;
  bool relax_integrality = false;
};

struct ModelInputs {
  StorageParams params;
  TimeGrid grid{0.25, 96};
  UncertaintyBudget budget = UncertaintyBudget::total(1.0);
  InitialSoc y0{50.0, 50.0};
  PriceSeries prices;
};

struct BidVariables {
  std::vector<int> x0;
  std::vector<int> x_up;
  std::vector<int> x_dn;
};

// Variable-name helpers (0-based arguments, 1-based names).
std::string var_name(const std::string& stem, int k);
std::string var_name(const std::string& stem, int k, int l);

BidVariables add_bid_variables(ModelIR& ir, const StorageParams& params, const TimeGrid& grid,
                               bool fcr_enabled, bool no_sell);

// x0 + x_up <= x_max and x0 - x_dn >= x_min per interval. Returns rows added.
int build_power_bounds(ModelIR& ir, const BidVariables& bids, const StorageParams& params,
                       const TimeGrid& grid);

// Lower SOC bound at every interval end under budget gamma.
int build_soc_lower(ModelIR& ir, const BidVariables& bids, const StorageParams& params,
                    const TimeGrid& grid, double gamma, double y0);

// Upper SOC bound over every interval, including the bilinear rows. The
// bilinear rows are added with `bilinear_active` as their flag.
int build_soc_upper_exact(ModelIR& ir, const BidVariables& bids, const StorageParams& params,
                          const TimeGrid& grid, double gamma, double y0,
                          bool bilinear_active = true);

// Linear rows that replace the bilinear rows with a sufficient condition.
int build_restriction_rows(ModelIR& ir, const BidVariables& bids, const StorageParams& params,
                           const TimeGrid& grid);

void build_objective(ModelIR& ir, const BidVariables& bids, const PriceSeries& prices,
                     const TimeGrid& grid, bool fcr_enabled, bool symmetric);

int add_market_coupling(ModelIR& ir, const BidVariables& bids, const TimeGrid& grid,
                        int fcr_block, int da_block, bool symmetric);

void add_terminal_condition(ModelIR& ir, const TimeGrid& grid, double y0, double y_star);

// Replaces the power rows of intervals 1..K-1 with rows that reserve headroom
// for intraday trades compensating past deviations.
int build_intraday_power_bounds(ModelIR& ir, const BidVariables& bids, const TimeGrid& grid,
                                double gamma_prime, double Gamma_prime);

int limited_arbitrage_rows(ModelIR& ir, const BidVariables& bids, const TimeGrid& grid,
                           const UncertaintyBudget& budget, LimitedArbitrageRule rule,
                           double block_hours);

// Complementarity model without regulation bids.
ModelIR build_arbitrage_model(const ModelInputs& in, const ModelOptions& opt);

// Validates the option combination and builds the requested model.
ModelIR dispatch_variant(const ModelInputs& in, const ModelOptions& opt);
inline ModelIR build_model(const ModelInputs& in, const ModelOptions& opt) {
  return dispatch_variant(in, opt);
}

// Budget used by the SOC blocks for these options.
double planning_budget(const UncertaintyBudget& budget, const TimeGrid& grid, bool intraday);

BidSchedule extract_bids(const ModelIR& ir, const std::vector<double>& x, const TimeGrid& grid,
                         const ModelOptions& opt);

// Point for `ir` with the bid variables fixed to `bids`, other entries zero.
std::vector<double> bid_point(const ModelIR& ir, const BidSchedule& bids);

}  // namespace robustbid
