#include "robustbid/solver_bridge.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "Highs.h"
#include "robustbid/errors.hpp"

namespace robustbid {

namespace fs = std::filesystem;

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible_limit: return "feasible_limit";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::error: return "error";
  }
  return "error";
}

double relative_gap(double objective, double bound) {
  if (!std::isfinite(objective) || !std::isfinite(bound)) return kInf;
  return std::abs(objective - bound) / std::max(1e-10, std::abs(objective));
}

double SolveResult::value(const ModelIR& ir, const std::string& name) const {
  if (!has_point()) throw SolverError("no solution point available");
  return point.at(static_cast<std::size_t>(ir.index(name)));
}

std::map<std::string, double> SolveResult::point_map(const ModelIR& ir) const {
  std::map<std::string, double> m;
  for (std::size_t j = 0; j < point.size() && j < ir.num_variables(); ++j) {
    m[ir.variables()[j].name] = point[j];
  }
  return m;
}

namespace {

void finish(SolveResult& r, const ModelIR& ir) {
  r.gap = relative_gap(r.objective, r.bound);
  if (r.has_point()) {
    if (r.point.size() != ir.num_variables()) {
      r.status = SolveStatus::error;
      r.message = "solution does not cover every variable";
      return;
    }
    r.bilinear_violations = verify_point(ir, r.point).bilinear_violations;
  }
}

HighsModel to_highs(const ModelIR& ir) {
  HighsModel model;
  HighsLp& lp = model.lp_;
  const auto n = static_cast<HighsInt>(ir.num_variables());
  lp.num_col_ = n;
  lp.num_row_ = static_cast<HighsInt>(ir.num_rows());
  lp.sense_ = ObjSense::kMinimize;
  lp.offset_ = ir.objective_constant;
  lp.col_cost_.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& t : ir.objective()) lp.col_cost_[static_cast<std::size_t>(t.var)] += t.coeff;
  bool any_int = false;
  for (const auto& v : ir.variables()) {
    lp.col_lower_.push_back(std::isinf(v.lower) ? -kHighsInf : v.lower);
    lp.col_upper_.push_back(std::isinf(v.upper) ? kHighsInf : v.upper);
    any_int = any_int || v.kind == VarKind::binary;
  }
  if (any_int) {
    for (const auto& v : ir.variables()) {
      lp.integrality_.push_back(v.kind == VarKind::binary ? HighsVarType::kInteger
                                                          : HighsVarType::kContinuous);
    }
  }
  std::vector<std::vector<std::pair<HighsInt, double>>> cols(static_cast<std::size_t>(n));
  HighsInt i = 0;
  for (const auto& r : ir.rows()) {
    std::map<int, double> merged;
    for (const auto& t : r.terms) merged[t.var] += t.coeff;
    for (const auto& [v, c] : merged) {
      if (c != 0.0) cols[static_cast<std::size_t>(v)].push_back({i, c});
    }
    lp.row_lower_.push_back(r.sense == Sense::le ? -kHighsInf : r.rhs);
    lp.row_upper_.push_back(r.sense == Sense::ge ? kHighsInf : r.rhs);
    ++i;
  }
  lp.a_matrix_.format_ = MatrixFormat::kColwise;
  lp.a_matrix_.num_col_ = n;
  lp.a_matrix_.num_row_ = lp.num_row_;
  lp.a_matrix_.start_.assign(1, 0);
  for (const auto& col : cols) {
    for (const auto& [row, c] : col) {
      lp.a_matrix_.index_.push_back(row);
      lp.a_matrix_.value_.push_back(c);
    }
    lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
  }
  return model;
}

}  // namespace

SolveResult HighsBackend::solve(const ModelIR& ir, const SolveOptions& opt) const {
  SolveResult r;
  r.backend = name();
  if (ir.num_bilinear_rows() > 0) {
    throw SolverError("the HiGHS backend cannot handle bilinear rows; set " +
                      std::string(kSolverEnv) + " to a solver that accepts quadratic constraints");
  }
  const auto t0 = std::chrono::steady_clock::now();
  Highs h;
  h.setOptionValue("output_flag", std::getenv("ROBUSTBID_SOLVER_LOG") != nullptr);
  h.setOptionValue("threads", std::max(1, opt.threads));
  h.setOptionValue("random_seed", opt.seed);
  h.setOptionValue("time_limit", opt.time_limit);
  h.setOptionValue("mip_rel_gap", opt.gap_target);
  h.setOptionValue("mip_abs_gap", 1e-9);
  h.setOptionValue("mip_feasibility_tolerance", 1e-7);
  if (opt.node_limit) h.setOptionValue("mip_max_nodes", static_cast<HighsInt>(*opt.node_limit));

  const bool mip = ir.num_binaries() > 0;
  if (h.passModel(to_highs(ir)) == HighsStatus::kError) {
    r.message = "HiGHS rejected the model";
    return r;
  }
  if (opt.mip_start && opt.mip_start->size() == ir.num_variables()) {
    HighsSolution start;
    start.col_value = *opt.mip_start;
    start.value_valid = true;
    h.setSolution(start);
  }
  const HighsStatus run = h.run();
  r.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (run == HighsStatus::kError) {
    r.message = "HiGHS run failed";
    return r;
  }
  HighsModelStatus ms = h.getModelStatus();
  if (ms == HighsModelStatus::kUnboundedOrInfeasible) {
    // Presolve could not tell the two apart; the simplex without it can.
    h.setOptionValue("presolve", "off");
    h.run();
    ms = h.getModelStatus();
  }
  const HighsInfo& info = h.getInfo();
  const bool has_primal = info.primal_solution_status == kSolutionStatusFeasible;
  switch (ms) {
    case HighsModelStatus::kOptimal: r.status = SolveStatus::optimal; break;
    case HighsModelStatus::kInfeasible: r.status = SolveStatus::infeasible; break;
    case HighsModelStatus::kUnbounded:
    case HighsModelStatus::kUnboundedOrInfeasible: r.status = SolveStatus::unbounded; break;
    case HighsModelStatus::kTimeLimit:
    case HighsModelStatus::kIterationLimit:
    case HighsModelStatus::kSolutionLimit:
    case HighsModelStatus::kInterrupt:
      r.status = has_primal ? SolveStatus::feasible_limit : SolveStatus::error;
      r.message = "limit reached: " + h.modelStatusToString(ms);
      break;
    default:
      r.status = SolveStatus::error;
      r.message = "HiGHS status " + h.modelStatusToString(ms);
  }
  if (r.has_point()) {
    r.point = h.getSolution().col_value;
    r.objective = info.objective_function_value;
    r.bound = mip ? info.mip_dual_bound : r.objective;
    if (r.status == SolveStatus::optimal && mip && !std::isfinite(r.bound)) r.bound = r.objective;
  }
  finish(r, ir);
  return r;
}

ExternalBackend::ExternalBackend(std::string executable, bool quadratic, std::string scratch_root)
    : executable_(std::move(executable)), quadratic_(quadratic), scratch_root_(std::move(scratch_root)) {
  if (executable_.empty()) throw ConfigError("external backend: no executable given");
}

namespace {

std::string tail(const fs::path& p, std::size_t n) {
  std::ifstream in(p);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s.size() > n ? s.substr(s.size() - n) : s;
}

std::string format_double(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

}  // namespace

SolveResult parse_solution_file(const ModelIR& ir, const std::string& text) {
  SolveResult r;
  r.status = SolveStatus::optimal;
  std::vector<double> x(ir.num_variables(), std::nan(""));
  std::istringstream in(text);
  std::string line;
  bool any_value = false;
  bool explicit_objective = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string a, b, c;
    if (!(ls >> a)) continue;
    if (a == "#") {
      if (!(ls >> b >> c)) continue;
      if (b == "status") {
        if (c == "optimal") r.status = SolveStatus::optimal;
        else if (c == "feasible_limit") r.status = SolveStatus::feasible_limit;
        else if (c == "infeasible") r.status = SolveStatus::infeasible;
        else if (c == "unbounded") r.status = SolveStatus::unbounded;
        else r.status = SolveStatus::error;
      } else if (b == "objective") {
        r.objective = std::strtod(c.c_str(), nullptr);
        explicit_objective = true;
      } else if (b == "bound") {
        r.bound = std::strtod(c.c_str(), nullptr);
      }
      continue;
    }
    if (!(ls >> b)) throw SolverError("solution file: no value for " + a);
    auto id = ir.find(a);
    if (!id) throw SolverError("solution file: unknown variable " + a);
    x[static_cast<std::size_t>(*id)] = std::strtod(b.c_str(), nullptr);
    any_value = true;
  }
  if (r.has_point()) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (std::isnan(x[j])) {
        if (!any_value) throw SolverError("solution file holds no values");
        throw SolverError("solution file misses variable " + ir.variables()[j].name);
      }
    }
    r.point = std::move(x);
    if (!explicit_objective) {
      r.objective = row_activity(ir.objective(), r.point) + ir.objective_constant;
    }
    if (!std::isfinite(r.bound) && r.status == SolveStatus::optimal) r.bound = r.objective;
  }
  return r;
}

SolveResult ExternalBackend::solve(const ModelIR& ir, const SolveOptions& opt) const {
  if (!quadratic_ && ir.num_bilinear_rows() > 0) {
    throw SolverError("external backend configured without quadratic support");
  }
  SolveResult r;
  r.backend = name();
  const fs::path root = scratch_root_.empty() ? fs::temp_directory_path() : fs::path(scratch_root_);
  std::string templ = (root / "robustbid-XXXXXX").string();
  if (!mkdtemp(templ.data())) throw SolverError("cannot create scratch directory under " + root.string());
  const fs::path dir(templ);
  const fs::path model = dir / "model.mps";
  const fs::path sol = dir / "solution.txt";
  const fs::path log = dir / "solver.log";
  {
    std::ofstream out(model, std::ios::binary);
    out << emit_model(ir, ModelFormat::mps_free);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> args = {executable_,          model.string(),
                                         sol.string(),         format_double(opt.time_limit),
                                         format_double(opt.gap_target), std::to_string(opt.seed)};
  const pid_t pid = fork();
  if (pid < 0) throw SolverError("fork failed");
  if (pid == 0) {
    std::FILE* f = std::fopen(log.c_str(), "w");
    if (f) {
      dup2(fileno(f), STDOUT_FILENO);
      dup2(fileno(f), STDERR_FILENO);
    }
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  // Grace period on top of the solver's own limit before the process is killed.
  const double deadline = opt.time_limit + 30.0;
  int wstatus = 0;
  bool killed = false;
  while (true) {
    const pid_t w = waitpid(pid, &wstatus, WNOHANG);
    if (w == pid) break;
    const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (el > deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &wstatus, 0);
      killed = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  r.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = !killed && WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 0;
  if (!ok) {
    r.status = SolveStatus::error;
    r.message = killed ? "external solver killed after deadline"
                       : "external solver exited with status " +
                             std::to_string(WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : -1) +
                             ": " + tail(log, 400);
  } else {
    std::ifstream in(sol);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
      SolveResult parsed = parse_solution_file(ir, text);
      parsed.backend = r.backend;
      parsed.solve_time = r.solve_time;
      r = std::move(parsed);
    } catch (const SolverError& e) {
      r.status = SolveStatus::error;
      r.message = e.what();
    }
  }
  if (!std::getenv("ROBUSTBID_KEEP_SCRATCH")) {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  finish(r, ir);
  return r;
}

std::unique_ptr<Backend> make_backend(const std::string& name, const ModelIR* ir) {
  std::string choice = name;
  if (choice == "auto") {
    const char* env = std::getenv(kBackendEnv);
    if (env && *env) {
      choice = env;
    } else {
      choice = ir && ir->num_bilinear_rows() > 0 ? "external" : "highs";
    }
  }
  if (choice == "highs") return std::make_unique<HighsBackend>();
  if (choice == "external") {
    const char* exe = std::getenv(kSolverEnv);
    if (!exe || !*exe) {
      throw ConfigError(std::string("external backend requested but ") + kSolverEnv + " is not set");
    }
    return std::make_unique<ExternalBackend>(exe);
  }
  throw ConfigError("unknown backend '" + name + "'");
}

SolveResult solve_with(const Backend& backend, const ModelIR& ir, const SolveOptions& opt) {
  ir.validate();
  if (ir.num_bilinear_rows() > 0 && !backend.supports_bilinear()) {
    throw SolverError("backend " + backend.name() + " cannot solve models with bilinear rows");
  }
  return backend.solve(ir, opt);
}

SolveResult solve(const ModelIR& ir, const SolveOptions& opt) {
  const auto backend = make_backend("auto", &ir);
  return solve_with(*backend, ir, opt);
}

SolveResult solve(const ModelIR& ir, double time_limit, double gap_target) {
  SolveOptions opt;
  opt.time_limit = time_limit;
  opt.gap_target = gap_target;
  return solve(ir, opt);
}

}  // namespace robustbid
