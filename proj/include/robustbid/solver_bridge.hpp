#pragma once

// Solve contract, model-file emission and point verification.
//
// Two backends implement the contract: HiGHS linked in-process (LP/MILP) and
// an external executable driven through files (any solver that reads MPS and
// writes "name value" lines). Models with active bilinear rows need a backend
// that accepts quadratic constraints.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "robustbid/model_ir.hpp"

namespace robustbid {

enum class SolveStatus { optimal, feasible_limit, infeasible, unbounded, error };
std::string to_string(SolveStatus s);

struct SolveOptions {
  double time_limit = 60.0;
  double gap_target = 1e-6;
  int threads = 1;
  int seed = 0;
  // Node budget for branch-and-bound; deterministic unlike wall-clock limits.
  std::optional<long> node_limit;
  std::optional<std::vector<double>> mip_start;
};

struct SolveResult {
  SolveStatus status = SolveStatus::error;
  double objective = kInf;
  double bound = -kInf;
  double gap = kInf;
  std::vector<double> point;  // aligned with the IR variables
  double solve_time = 0.0;
  std::size_t bilinear_violations = 0;
  std::string backend;
  std::string message;

  bool has_point() const {
    return status == SolveStatus::optimal || status == SolveStatus::feasible_limit;
  }
  double value(const ModelIR& ir, const std::string& name) const;
  std::map<std::string, double> point_map(const ModelIR& ir) const;
};

double relative_gap(double objective, double bound);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual bool supports_bilinear() const = 0;
  virtual SolveResult solve(const ModelIR& ir, const SolveOptions& opt) const = 0;
};

class HighsBackend final : public Backend {
 public:
  std::string name() const override { return "highs"; }
  bool supports_bilinear() const override { return false; }
  SolveResult solve(const ModelIR& ir, const SolveOptions& opt) const override;
};

// Runs `<executable> <model.mps> <solution.txt> <time_limit> <gap> <seed>` in a
// private scratch directory. The solution file holds "name value" lines plus
// optional "# status <s>", "# objective <v>" and "# bound <v>" lines.
class ExternalBackend final : public Backend {
 public:
  explicit ExternalBackend(std::string executable, bool quadratic = true,
                           std::string scratch_root = {});
  std::string name() const override { return "external:" + executable_; }
  bool supports_bilinear() const override { return quadratic_; }
  SolveResult solve(const ModelIR& ir, const SolveOptions& opt) const override;

 private:
  std::string executable_;
  bool quadratic_;
  std::string scratch_root_;
};

// Environment variables: ROBUSTBID_SOLVER names the external executable,
// ROBUSTBID_BACKEND=external routes linear models there as well.
inline constexpr const char* kSolverEnv = "ROBUSTBID_SOLVER";
inline constexpr const char* kBackendEnv = "ROBUSTBID_BACKEND";

// "highs", "external" or "auto" (bilinear models go external, others HiGHS).
std::unique_ptr<Backend> make_backend(const std::string& name, const ModelIR* ir = nullptr);

SolveResult solve(const ModelIR& ir, const SolveOptions& opt = {});
SolveResult solve(const ModelIR& ir, double time_limit, double gap_target);
SolveResult solve_with(const Backend& backend, const ModelIR& ir, const SolveOptions& opt);

// Parses a solution file into per-variable values; unknown names are an error.
SolveResult parse_solution_file(const ModelIR& ir, const std::string& text);

enum class ModelFormat { mps_free, mps_fixed, lp };
ModelFormat parse_format(const std::string& s);

std::string emit_model(const ModelIR& ir, ModelFormat format);
// Accepts free and fixed MPS, including QCMATRIX sections.
ModelIR parse_mps(const std::string& text, bool fixed = false);
std::uint64_t fnv1a64(const std::string& bytes);
std::string checksum_hex(const std::string& bytes);

struct Residual {
  std::string name;
  double violation;
};

struct VerificationReport {
  bool feasible = true;  // active rows, bounds and integrality
  double max_violation = 0.0;
  std::size_t violations = 0;
  // Counted over every bilinear row, active or not.
  std::size_t bilinear_violations = 0;
  std::vector<Residual> linear;
  std::vector<Residual> bilinear;
  std::vector<Residual> bounds;
};

// Bilinear rows are compared against tol_abs scaled by the magnitude of their
// product terms.
VerificationReport verify_point(const ModelIR& ir, const std::vector<double>& point,
                                double tol_abs = 1e-6);
VerificationReport verify_point(const ModelIR& ir, const std::map<std::string, double>& point,
                                double tol_abs = 1e-6);

}  // namespace robustbid
