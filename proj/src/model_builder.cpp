#include "robustbid/model_builder.hpp"

#include <algorithm>
#include <cmath>

#include "robustbid/errors.hpp"

namespace robustbid {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::exact: return "exact";
    case Variant::relaxation: return "relaxation";
    case Variant::restriction: return "restriction";
    case Variant::arbitrage_only: return "arbitrage_only";
    case Variant::lossless_lp: return "lossless_lp";
    case Variant::no_sell_lp: return "no_sell_lp";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::exact, Variant::relaxation, Variant::restriction,
                    Variant::arbitrage_only, Variant::lossless_lp, Variant::no_sell_lp}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("unknown model variant '" + s + "'");
}

std::string to_string(LimitedArbitrageRule r) {
  return r == LimitedArbitrageRule::per_block ? "per_block" : "per_interval";
}

LimitedArbitrageRule parse_limited_rule(const std::string& s) {
  if (s == "per_block") return LimitedArbitrageRule::per_block;
  if (s == "per_interval") return LimitedArbitrageRule::per_interval;
  throw ConfigError("unknown limited-arbitrage rule '" + s + "'");
}

std::string var_name(const std::string& stem, int k) { return stem + "_" + std::to_string(k + 1); }

std::string var_name(const std::string& stem, int k, int l) {
  return stem + "_" + std::to_string(k + 1) + "_" + std::to_string(l + 1);
}

namespace {

// Collects terms, dropping exact zeros so that collapsed big-M offsets do not
// show up in emitted files.
class Row {
 public:
  Row& add(int var, double c) {
    if (c != 0.0) terms_.push_back({var, c});
    return *this;
  }
  std::vector<Term> take() { return std::move(terms_); }

 private:
  std::vector<Term> terms_;
};

int add(ModelIR& ir, const std::string& name, Row& r, Sense s, double rhs) {
  return ir.add_row(name, r.take(), s, rhs);
}

void require_budget_multiple(double gamma, const TimeGrid& grid) {
  if (!(gamma > 0.0) || !is_multiple_of(gamma, grid.dt())) {
    throw BuildError("budget " + std::to_string(gamma) + " h is not a positive multiple of dt");
  }
}

}  // namespace

BidVariables add_bid_variables(ModelIR& ir, const StorageParams& p, const TimeGrid& grid,
                               bool fcr_enabled, bool no_sell) {
  BidVariables b;
  const double reg_cap = fcr_enabled ? p.x_max - p.x_min : 0.0;
  for (int k = 0; k < grid.K(); ++k) {
    b.x0.push_back(ir.add_variable(var_name("x0", k), VarKind::continuous, p.x_min,
                                   no_sell ? 0.0 : p.x_max));
  }
  for (int k = 0; k < grid.K(); ++k) {
    b.x_up.push_back(ir.add_variable(var_name("xup", k), VarKind::continuous, 0.0, reg_cap));
  }
  for (int k = 0; k < grid.K(); ++k) {
    b.x_dn.push_back(ir.add_variable(var_name("xdn", k), VarKind::continuous, 0.0, reg_cap));
  }
  return b;
}

int build_power_bounds(ModelIR& ir, const BidVariables& b, const StorageParams& p,
                       const TimeGrid& grid) {
  for (int k = 0; k < grid.K(); ++k) {
    Row hi;
    hi.add(b.x0[k], 1.0).add(b.x_up[k], 1.0);
    add(ir, var_name("pmax", k), hi, Sense::le, p.x_max);
    Row lo;
    lo.add(b.x0[k], 1.0).add(b.x_dn[k], -1.0);
    add(ir, var_name("pmin", k), lo, Sense::ge, p.x_min);
  }
  return 2 * grid.K();
}

int build_soc_lower(ModelIR& ir, const BidVariables& b, const StorageParams& p,
                    const TimeGrid& grid, double gamma, double y0) {
  require_budget_multiple(gamma, grid);
  const int K = grid.K();
  const double dt = grid.dt();
  const double ec = p.eta_c;
  const double ed = p.eta_d;
  const std::size_t before = ir.num_rows();

  std::vector<int> alpha(K), beta(K), lam(K);
  for (int k = 0; k < K; ++k) {
    alpha[k] = ir.add_variable(var_name("alpha", k), VarKind::continuous, -kInf, kInf);
    beta[k] = ir.add_variable(var_name("beta", k), VarKind::continuous, -kInf, kInf);
  }
  // alpha >= max(ec x0, x0/ed), beta >= max(ec (x0 + x_up), (x0 + x_up)/ed)
  for (int k = 0; k < K; ++k) {
    Row r1, r2, r3, r4;
    r1.add(alpha[k], 1.0).add(b.x0[k], -ec);
    add(ir, var_name("alc", k), r1, Sense::ge, 0.0);
    r2.add(alpha[k], 1.0).add(b.x0[k], -1.0 / ed);
    add(ir, var_name("ald", k), r2, Sense::ge, 0.0);
    r3.add(beta[k], 1.0).add(b.x0[k], -ec).add(b.x_up[k], -ec);
    add(ir, var_name("bec", k), r3, Sense::ge, 0.0);
    r4.add(beta[k], 1.0).add(b.x0[k], -1.0 / ed).add(b.x_up[k], -1.0 / ed);
    add(ir, var_name("bed", k), r4, Sense::ge, 0.0);
  }
  for (int k = 0; k < K; ++k) {
    lam[k] = ir.add_variable(var_name("lamlo", k), VarKind::continuous, 0.0, kInf);
  }
  for (int k = 0; k < K; ++k) {
    std::vector<int> L(k + 1);
    for (int l = 0; l <= k; ++l) {
      L[l] = ir.add_variable(var_name("Llo", k, l), VarKind::continuous, 0.0, kInf);
    }
    Row soc;
    soc.add(lam[k], -gamma);
    for (int l = 0; l <= k; ++l) soc.add(alpha[l], -dt).add(L[l], -dt);
    add(ir, var_name("soclo", k), soc, Sense::ge, p.y_min - y0);
    for (int l = 0; l <= k; ++l) {
      Row d;
      d.add(L[l], 1.0).add(lam[k], 1.0).add(alpha[l], 1.0).add(beta[l], -1.0);
      add(ir, var_name("dLlo", k, l), d, Sense::ge, 0.0);
    }
  }
  return static_cast<int>(ir.num_rows() - before);
}

int build_soc_upper_exact(ModelIR& ir, const BidVariables& b, const StorageParams& p,
                          const TimeGrid& grid, double gamma, double y0, bool bilinear_active) {
  require_budget_multiple(gamma, grid);
  const int K = grid.K();
  const double dt = grid.dt();
  const double ec = p.eta_c;
  const double ed = p.eta_d;
  const double de = p.specific_loss();
  const double xl = p.x_min;
  const double xh = p.x_max;
  const std::size_t before = ir.num_rows();

  std::vector<int> lam(K), u1(std::max(K - 1, 0)), u2(std::max(K - 1, 0));
  for (int k = 0; k < K; ++k) {
    lam[k] = ir.add_variable(var_name("lamhi", k), VarKind::continuous, 0.0, p.lambda_cap());
  }
  for (int l = 0; l + 1 < K; ++l) {
    u1[l] = ir.add_variable(var_name("u1", l), VarKind::binary, 0.0, 1.0);
    u2[l] = ir.add_variable(var_name("u2", l), VarKind::binary, 0.0, 1.0);
  }
  // u1 = 1 iff x0 >= x_dn, u2 = 1 iff x0 <= 0 (ties either way).
  for (int l = 0; l + 1 < K; ++l) {
    Row a, c, d, e;
    a.add(b.x0[l], 1.0).add(b.x_dn[l], -1.0).add(u1[l], xl);
    add(ir, var_name("u1lo", l), a, Sense::ge, xl);
    c.add(b.x0[l], 1.0).add(b.x_dn[l], -1.0).add(u1[l], -xh);
    add(ir, var_name("u1hi", l), c, Sense::le, 0.0);
    d.add(b.x0[l], 1.0).add(u2[l], -xl);
    add(ir, var_name("u2lo", l), d, Sense::ge, 0.0);
    e.add(b.x0[l], 1.0).add(u2[l], xh);
    add(ir, var_name("u2hi", l), e, Sense::le, xh);
  }

  // Implied by the epigraph rows below; makes the bound explicit for solvers.
  const double epi_floor = -xh / ed + de * xl;
  const double c_sell = xl * (xh - xl) / ed;
  const double c_mid = xh * xh / (4.0 * ed);
  for (int k = 0; k < K; ++k) {
    std::vector<int> L(k + 1);
    for (int l = 0; l < k; ++l) {
      L[l] = ir.add_variable(var_name("Lhi", k, l), VarKind::continuous, epi_floor, kInf);
    }
    L[k] = ir.add_variable(var_name("Lhi", k, k), VarKind::continuous, -kInf, kInf);

    Row soc;
    soc.add(lam[k], gamma);
    for (int l = 0; l <= k; ++l) soc.add(L[l], dt);
    add(ir, var_name("sochi", k), soc, Sense::le, p.y_max - y0);

    // Current interval: only the positive part of the worst-case rate counts.
    Row a, c, d;
    a.add(L[k], 1.0).add(b.x0[k], ec);
    add(ir, var_name("Lhikk", k) + "_1", a, Sense::ge, 0.0);
    c.add(L[k], 1.0).add(b.x_dn[k], -ec).add(b.x0[k], ec).add(lam[k], 1.0);
    add(ir, var_name("Lhikk", k) + "_2", c, Sense::ge, 0.0);
    d.add(L[k], 1.0);
    add(ir, var_name("Lhikk", k) + "_3", d, Sense::ge, 0.0);

    for (int l = 0; l < k; ++l) {
      const std::string base = var_name("Lhi", k, l);
      Row r1, r2, r3, r4;
      r1.add(L[l], 1.0).add(b.x_dn[l], -1.0 / ed).add(b.x0[l], 1.0 / ed).add(lam[k], 1.0)
          .add(u1[l], de * xl);
      add(ir, base + "_1", r1, Sense::ge, de * xl);
      r2.add(L[l], 1.0).add(b.x0[l], 1.0 / ed).add(u2[l], -de * xl);
      add(ir, base + "_2", r2, Sense::ge, 0.0);
      r3.add(L[l], 1.0).add(b.x_dn[l], -ec).add(b.x0[l], ec).add(lam[k], 1.0)
          .add(u1[l], de * xh);
      add(ir, base + "_3", r3, Sense::ge, 0.0);
      r4.add(L[l], 1.0).add(b.x0[l], ec).add(u2[l], -de * xh);
      add(ir, base + "_4", r4, Sense::ge, -de * xh);

      BilinearRow bil;
      bil.name = var_name("bil", k, l);
      bil.quad = {{L[l], b.x_dn[l], 1.0}, {lam[k], b.x0[l], 1.0}};
      bil.linear = {{u2[l], -c_sell}, {u1[l], c_mid}};
      bil.sense = Sense::ge;
      bil.rhs = 0.0;
      bil.active = bilinear_active;
      bil.ratio = RatioForm{L[l], lam[k], b.x0[l], b.x_dn[l], {u1[l], u2[l]}};
      ir.add_bilinear_row(std::move(bil));
    }
  }
  return static_cast<int>(ir.num_rows() - before);
}

int build_restriction_rows(ModelIR& ir, const BidVariables& b, const StorageParams& p,
                           const TimeGrid& grid) {
  const int K = grid.K();
  const double ec = p.eta_c;
  const double ed = p.eta_d;
  const double r = p.roundtrip();
  const double de = p.specific_loss();
  const double xl = p.x_min;
  const double xh = p.x_max;
  const std::size_t before = ir.num_rows();

  std::vector<int> u3(std::max(K - 1, 0));
  for (int l = 0; l + 1 < K; ++l) {
    u3[l] = ir.add_variable(var_name("u3", l), VarKind::binary, 0.0, 1.0);
  }
  // u3 = 1 when x_dn - (1 - r) x0 - ed * lamhi >= 0 for the interval itself.
  const double m_lo = (2.0 - r) * xh - xl;
  const double m_hi = r * xh - xl;
  for (int l = 0; l + 1 < K; ++l) {
    const int lam = ir.index(var_name("lamhi", l));
    Row a, c;
    a.add(b.x_dn[l], 1.0).add(b.x0[l], -(1.0 - r)).add(lam, -ed).add(u3[l], -m_lo);
    add(ir, var_name("u3lo", l), a, Sense::ge, -m_lo);
    c.add(b.x_dn[l], 1.0).add(b.x0[l], -(1.0 - r)).add(lam, -ed).add(u3[l], -m_hi);
    add(ir, var_name("u3hi", l), c, Sense::le, 0.0);
  }
  for (int k = 1; k < K; ++k) {
    const int lam = ir.index(var_name("lamhi", k));
    for (int l = 0; l < k; ++l) {
      const int L = ir.index(var_name("Lhi", k, l));
      const int u1 = ir.index(var_name("u1", l));
      const int u2 = ir.index(var_name("u2", l));
      const std::string base = var_name("Lhi", k, l);
      Row r5, r6;
      r5.add(L, 1.0).add(b.x0[l], ec).add(u1, de * xh).add(u3[l], -de * xh);
      add(ir, base + "_5", r5, Sense::ge, -de * xh);
      r6.add(L, 1.0).add(b.x_dn[l], -1.0 / ed).add(b.x0[l], 1.0 / ed).add(lam, 1.0)
          .add(u2, -de * xl).add(u3[l], -de * xl);
      add(ir, base + "_6", r6, Sense::ge, 0.0);
    }
  }
  return static_cast<int>(ir.num_rows() - before);
}

void build_objective(ModelIR& ir, const BidVariables& b, const PriceSeries& prices,
                     const TimeGrid& grid, bool fcr_enabled, bool symmetric) {
  prices.check_alignment(grid, fcr_enabled);
  auto& obj = ir.objective();
  obj.clear();
  const double dt = grid.dt();
  for (int k = 0; k < grid.K(); ++k) {
    const double t = grid.start(k);
    const double c0 = -prices.day_ahead_at(t) * kEurPerMwhToEurPerKwh * dt;
    if (c0 != 0.0) obj.push_back({b.x0[k], c0});
    if (!fcr_enabled) continue;
    const double ca = -prices.fcr_rate_at(t) * kEurPerMwhToEurPerKwh * dt;
    if (ca == 0.0) continue;
    obj.push_back({b.x_dn[k], ca});
    if (!symmetric) obj.push_back({b.x_up[k], ca});
  }
}

int add_market_coupling(ModelIR& ir, const BidVariables& b, const TimeGrid& grid, int fcr_block,
                        int da_block, bool symmetric) {
  const int K = grid.K();
  auto check = [&](int len, const char* what) {
    if (len < 0 || (len > 0 && K % len != 0)) {
      throw BuildError(std::string(what) + " block length " + std::to_string(len) +
                       " does not divide K = " + std::to_string(K));
    }
  };
  check(fcr_block, "FCR");
  check(da_block, "day-ahead");
  int rows = 0;
  for (int k = 0; k < K; ++k) {
    if (symmetric) {
      Row s;
      s.add(b.x_up[k], 1.0).add(b.x_dn[k], -1.0);
      add(ir, var_name("sym", k), s, Sense::eq, 0.0);
      ++rows;
    }
    if (fcr_block > 0 && k % fcr_block != 0) {
      const int head = k - k % fcr_block;
      Row f;
      f.add(b.x_dn[k], 1.0).add(b.x_dn[head], -1.0);
      add(ir, var_name("fcrblk", k), f, Sense::eq, 0.0);
      ++rows;
      if (!symmetric) {
        Row g;
        g.add(b.x_up[k], 1.0).add(b.x_up[head], -1.0);
        add(ir, var_name("fcrblkup", k), g, Sense::eq, 0.0);
        ++rows;
      }
    }
    if (da_block > 0 && k % da_block != 0) {
      Row d;
      d.add(b.x0[k], 1.0).add(b.x0[k - k % da_block], -1.0);
      add(ir, var_name("dablk", k), d, Sense::eq, 0.0);
      ++rows;
    }
  }
  return rows;
}

void add_terminal_condition(ModelIR& ir, const TimeGrid& grid, double y0, double y_star) {
  Row r;
  for (int k = 0; k < grid.K(); ++k) {
    auto a = ir.find(var_name("alpha", k));
    if (!a) throw BuildError("terminal condition needs the lower SOC block");
    r.add(*a, -grid.dt());
  }
  add(ir, "terminal", r, Sense::ge, y_star - y0);
}

int build_intraday_power_bounds(ModelIR& ir, const BidVariables& b, const TimeGrid& grid,
                                double gamma_prime, double Gamma_prime) {
  if (!is_multiple_of(gamma_prime, grid.dt()) || !is_multiple_of(Gamma_prime, grid.dt())) {
    throw BuildError("intraday bounds: window parameters must be multiples of dt");
  }
  if (!(Gamma_prime > grid.dt() + kTolerance)) {
    throw BuildError("intraday bounds: window must be longer than one interval");
  }
  const double dt = grid.dt();
  const auto G = static_cast<int>(round_to_seconds(Gamma_prime) / round_to_seconds(dt));
  const double share = dt / (Gamma_prime - dt);
  int added = 0;
  for (int k = 1; k < grid.K(); ++k) {
    const int lam = ir.add_variable(var_name("lamid", k), VarKind::continuous, 0.0, kInf);
    Row tighten;
    tighten.add(lam, gamma_prime / dt);
    for (int i = std::max(0, k + 1 - G); i < k; ++i) {
      const int e = ir.add_variable(var_name("eid", k, i), VarKind::continuous, 0.0, kInf);
      Row r;
      r.add(e, 1.0).add(lam, 1.0).add(b.x_dn[i], -share);
      add(ir, var_name("deid", k, i), r, Sense::ge, 0.0);
      ++added;
      tighten.add(e, 1.0);
    }
    const std::vector<Term> extra = tighten.take();
    auto patch = [&](const std::string& name, double sign) {
      auto idx = ir.find_row(name);
      if (!idx) throw BuildError("intraday bounds: power row " + name + " missing");
      for (const auto& t : extra) ir.row(*idx).terms.push_back({t.var, sign * t.coeff});
    };
    patch(var_name("pmax", k), 1.0);
    patch(var_name("pmin", k), -1.0);
  }
  return added;
}

int limited_arbitrage_rows(ModelIR& ir, const BidVariables& b, const TimeGrid& grid,
                           const UncertaintyBudget& budget, LimitedArbitrageRule rule,
                           double block_hours) {
  const int K = grid.K();
  const double dt = grid.dt();
  int added = 0;
  if (rule == LimitedArbitrageRule::per_interval) {
    // Net day-ahead power per interval may not exceed the average
    // compensation rate the regulation bid can require.
    const double rate = budget.kind == BudgetKind::rolling_window
                            ? budget.gamma_prime / (budget.Gamma_prime - dt)
                            : std::min(budget.gamma, grid.T()) / grid.T();
    for (int k = 0; k < K; ++k) {
      Row hi, lo;
      hi.add(b.x0[k], 1.0).add(b.x_dn[k], -rate);
      add(ir, var_name("limhi", k), hi, Sense::le, 0.0);
      lo.add(b.x0[k], -1.0).add(b.x_dn[k], -rate);
      add(ir, var_name("limlo", k), lo, Sense::le, 0.0);
      added += 2;
    }
    return added;
  }
  if (!is_multiple_of(block_hours, dt)) {
    throw BuildError("limited arbitrage: block length must be a multiple of dt");
  }
  const auto len = static_cast<int>(round_to_seconds(block_hours) / round_to_seconds(dt));
  const double cover = budget.kind == BudgetKind::rolling_window
                           ? effective_budget(budget.gamma_prime, budget.Gamma_prime, block_hours)
                           : std::min(budget.gamma, block_hours);
  std::vector<int> sell(K), buy(K);
  for (int k = 0; k < K; ++k) {
    sell[k] = ir.add_variable(var_name("asell", k), VarKind::continuous, 0.0, kInf);
    buy[k] = ir.add_variable(var_name("abuy", k), VarKind::continuous, 0.0, kInf);
    Row s, p;
    s.add(sell[k], 1.0).add(b.x0[k], -1.0);
    add(ir, var_name("dasell", k), s, Sense::ge, 0.0);
    p.add(buy[k], 1.0).add(b.x0[k], 1.0);
    add(ir, var_name("dabuy", k), p, Sense::ge, 0.0);
    added += 2;
  }
  for (int start = 0, blk = 0; start < K; start += len, ++blk) {
    const int stop = std::min(K, start + len);
    const double per = cover / static_cast<double>(stop - start);
    Row s, p;
    for (int k = start; k < stop; ++k) {
      s.add(sell[k], dt).add(b.x_dn[k], -per);
      p.add(buy[k], dt).add(b.x_dn[k], -per);
    }
    add(ir, var_name("limsell", blk), s, Sense::le, 0.0);
    add(ir, var_name("limbuy", blk), p, Sense::le, 0.0);
    added += 2;
  }
  return added;
}

double planning_budget(const UncertaintyBudget& budget, const TimeGrid& grid, bool intraday) {
  if (intraday) {
    if (budget.kind != BudgetKind::rolling_window) {
      throw ConfigError("intraday trading needs a rolling-window budget");
    }
    return budget.gamma_prime;
  }
  return budget.effective(grid.T());
}

ModelIR build_arbitrage_model(const ModelInputs& in, const ModelOptions& opt) {
  const StorageParams& p = in.params;
  const TimeGrid& grid = in.grid;
  const int K = grid.K();
  const double dt = grid.dt();
  const double ec = p.eta_c;
  const double ed = p.eta_d;

  ModelIR ir;
  ir.variant = to_string(Variant::arbitrage_only);
  ir.horizon = K;
  BidVariables b = add_bid_variables(ir, p, grid, false, false);
  build_power_bounds(ir, b, p, grid);

  // Intervals before the last split x0 into charge and discharge parts.
  std::vector<int> ch(std::max(K - 1, 0)), dis(std::max(K - 1, 0));
  for (int l = 0; l + 1 < K; ++l) {
    ch[l] = ir.add_variable(var_name("ch", l), VarKind::continuous, 0.0, -p.x_min);
    dis[l] = ir.add_variable(var_name("dis", l), VarKind::continuous, 0.0, p.x_max);
    const int z = ir.add_variable(var_name("z", l), VarKind::binary, 0.0, 1.0);
    Row s, c, d;
    s.add(b.x0[l], 1.0).add(dis[l], -1.0).add(ch[l], 1.0);
    add(ir, var_name("split", l), s, Sense::eq, 0.0);
    c.add(ch[l], 1.0).add(z, p.x_min);
    add(ir, var_name("zch", l), c, Sense::le, 0.0);
    d.add(dis[l], 1.0).add(z, p.x_max);
    add(ir, var_name("zdis", l), d, Sense::le, p.x_max);
  }
  auto energy = [&](Row& r, int upto) {
    for (int l = 0; l < upto; ++l) r.add(ch[l], ec * dt).add(dis[l], -dt / ed);
  };
  for (int k = 0; k + 1 < K; ++k) {
    Row lo, hi;
    energy(lo, k + 1);
    add(ir, var_name("soclo", k), lo, Sense::ge, p.y_min - in.y0.lo);
    energy(hi, k + 1);
    add(ir, var_name("sochi", k), hi, Sense::le, p.y_max - in.y0.hi);
  }
  // Last interval: exact convex epigraphs, no binary needed.
  const int last = K - 1;
  const int alpha = ir.add_variable(var_name("alpha", last), VarKind::continuous, -kInf, kInf);
  const int hinge = ir.add_variable(var_name("hinge", last), VarKind::continuous, 0.0, kInf);
  {
    Row a, d, h;
    a.add(alpha, 1.0).add(b.x0[last], -ec);
    add(ir, var_name("alc", last), a, Sense::ge, 0.0);
    d.add(alpha, 1.0).add(b.x0[last], -1.0 / ed);
    add(ir, var_name("ald", last), d, Sense::ge, 0.0);
    h.add(hinge, 1.0).add(b.x0[last], ec);
    add(ir, var_name("dhinge", last), h, Sense::ge, 0.0);
    Row lo, hi;
    energy(lo, last);
    lo.add(alpha, -dt);
    add(ir, var_name("soclo", last), lo, Sense::ge, p.y_min - in.y0.lo);
    energy(hi, last);
    hi.add(hinge, dt);
    add(ir, var_name("sochi", last), hi, Sense::le, p.y_max - in.y0.hi);
  }
  if (opt.terminal_soc_floor) {
    Row t;
    energy(t, last);
    t.add(alpha, -dt);
    add(ir, "terminal", t, Sense::ge, *opt.terminal_soc_floor - in.y0.lo);
  }
  if (opt.coupling) add_market_coupling(ir, b, grid, 0, opt.da_block, false);
  build_objective(ir, b, in.prices, grid, false, false);
  if (opt.relax_integrality || (opt.relaxation_shortcut && in.prices.nonnegative())) {
    ir.relax_integrality();
  }
  ir.validate();
  return ir;
}

ModelIR dispatch_variant(const ModelInputs& in, const ModelOptions& opt) {
  const StorageParams& p = in.params;
  const TimeGrid& grid = in.grid;
  p.validate();
  if (in.y0.lo > in.y0.hi + kTolerance) throw ConfigError("initial SOC interval is empty");
  if (opt.variant == Variant::arbitrage_only) {
    if (opt.intraday || opt.limited_arbitrage) {
      throw ConfigError("arbitrage-only models take no intraday or limited-arbitrage rows");
    }
    return build_arbitrage_model(in, opt);
  }
  if (opt.variant == Variant::lossless_lp && !p.lossless()) {
    throw ConfigError("lossless_lp requires eta_c = eta_d = 1");
  }
  if (opt.intraday && !opt.fcr_enabled) throw ConfigError("intraday rows need FCR bids");
  if (opt.intraday && !opt.symmetric) throw ConfigError("intraday rows need symmetric bids");
  if (opt.limited_arbitrage && !opt.fcr_enabled) {
    throw ConfigError("limited arbitrage needs FCR bids");
  }
  try {
    in.budget.validate(grid);
  } catch (const std::invalid_argument& e) {
    throw BuildError(e.what());
  }
  const double gamma = planning_budget(in.budget, grid, opt.intraday);

  ModelIR ir;
  ir.variant = to_string(opt.variant);
  ir.horizon = grid.K();
  const bool no_sell = opt.variant == Variant::no_sell_lp;
  BidVariables b = add_bid_variables(ir, p, grid, opt.fcr_enabled, no_sell);
  build_power_bounds(ir, b, p, grid);
  if (opt.intraday) {
    build_intraday_power_bounds(ir, b, grid, in.budget.gamma_prime, in.budget.Gamma_prime);
  }
  build_soc_lower(ir, b, p, grid, gamma, in.y0.lo);
  build_soc_upper_exact(ir, b, p, grid, gamma, in.y0.hi, opt.variant == Variant::exact);
  if (opt.variant == Variant::restriction) build_restriction_rows(ir, b, p, grid);

  // Tractable cases keep every row and collapse the switch variables instead.
  for (int l = 0; l + 1 < grid.K(); ++l) {
    const int u1 = ir.index(var_name("u1", l));
    const int u2 = ir.index(var_name("u2", l));
    if (no_sell) {
      ir.set_kind(u1, VarKind::continuous);
      ir.set_bounds(u1, 0.0, 0.0);
      ir.set_kind(u2, VarKind::continuous);
      ir.set_bounds(u2, 1.0, 1.0);
    } else if (opt.variant == Variant::lossless_lp) {
      // Without losses the switches only enter the (redundant) bilinear rows
      // and the sign indicators, which any fractional value satisfies.
      ir.set_kind(u1, VarKind::continuous);
      ir.set_kind(u2, VarKind::continuous);
    }
  }

  if (opt.coupling) {
    add_market_coupling(ir, b, grid, opt.fcr_enabled ? opt.fcr_block : 0, opt.da_block,
                        opt.symmetric);
  } else if (opt.symmetric) {
    add_market_coupling(ir, b, grid, 0, 0, true);
  }
  if (opt.terminal_soc_floor) add_terminal_condition(ir, grid, in.y0.lo, *opt.terminal_soc_floor);
  if (opt.limited_arbitrage) {
    limited_arbitrage_rows(ir, b, grid, in.budget, opt.limited_rule,
                           opt.coupling && opt.fcr_block > 0 ? opt.fcr_block * grid.dt()
                                                             : in.prices.fcr_block_hours);
  }
  build_objective(ir, b, in.prices, grid, opt.fcr_enabled, opt.symmetric);
  if (opt.relax_integrality) ir.relax_integrality();
  ir.validate();
  return ir;
}

BidSchedule extract_bids(const ModelIR& ir, const std::vector<double>& x, const TimeGrid& grid,
                         const ModelOptions& opt) {
  if (x.size() != ir.num_variables()) throw BuildError("point size does not match the model");
  const int K = grid.K();
  BidSchedule s = BidSchedule::zeros(K);
  s.symmetric = opt.symmetric && opt.variant != Variant::arbitrage_only;
  const bool arb = opt.variant == Variant::arbitrage_only;
  s.fcr_block_len = opt.coupling && opt.fcr_enabled && !arb ? opt.fcr_block : 0;
  s.da_block_len = opt.coupling ? opt.da_block : 0;
  auto get = [&](const char* stem, int k) {
    return x[static_cast<std::size_t>(ir.index(var_name(stem, k)))];
  };
  for (int k = 0; k < K; ++k) {
    s.x0[k] = get("x0", k);
    s.x_up[k] = std::max(0.0, get("xup", k));
    s.x_dn[k] = std::max(0.0, get("xdn", k));
    if (s.symmetric) s.x_up[k] = s.x_dn[k];
  }
  // Snap solver noise on coupled blocks to the block's first value.
  auto snap = [&](std::vector<double>& v, int len) {
    if (len <= 0) return;
    for (int k = 0; k < K; ++k) v[k] = v[k - k % len];
  };
  snap(s.x0, s.da_block_len);
  snap(s.x_up, s.fcr_block_len);
  snap(s.x_dn, s.fcr_block_len);
  return s;
}

std::vector<double> bid_point(const ModelIR& ir, const BidSchedule& bids) {
  std::vector<double> x(ir.num_variables(), 0.0);
  for (std::size_t k = 0; k < bids.x0.size(); ++k) {
    const int kk = static_cast<int>(k);
    x[static_cast<std::size_t>(ir.index(var_name("x0", kk)))] = bids.x0[k];
    x[static_cast<std::size_t>(ir.index(var_name("xup", kk)))] = bids.x_up[k];
    x[static_cast<std::size_t>(ir.index(var_name("xdn", kk)))] = bids.x_dn[k];
  }
  return x;
}

}  // namespace robustbid
