#pragma once

// Solver-agnostic optimization model: variables, linear rows, optional
// bilinear rows and a linear objective (always minimized).

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace robustbid {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class Sense { le, ge, eq };

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInf;
};

struct Term {
  int var;
  double coeff;
};

struct QuadTerm {
  int var1;
  int var2;
  double coeff;
};

struct LinearRow {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::ge;
  double rhs = 0.0;
};

// Structure of a row epi*den + mult*num >= rhs(switches) that enforces
// epi >= -mult*num/den whenever every switch variable is zero and is slack
// otherwise. Exact solvers branch on the ratio num/den in [0, 1].
struct RatioForm {
  int epigraph;
  int multiplier;
  int numerator;
  int denominator;
  std::vector<int> switches;
};

struct BilinearRow {
  std::string name;
  std::vector<QuadTerm> quad;
  std::vector<Term> linear;
  Sense sense = Sense::ge;
  double rhs = 0.0;
  // Inactive rows are not constraints of the model; they are kept so that
  // points of a relaxation can be audited against them.
  bool active = true;
  std::optional<RatioForm> ratio;
};

class ModelIR {
 public:
  int add_variable(std::string name, VarKind kind, double lower, double upper);
  int add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs);
  int add_bilinear_row(BilinearRow row);

  int index(const std::string& name) const;
  std::optional<int> find(const std::string& name) const;
  bool has(const std::string& name) const { return by_name_.count(name) != 0; }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<LinearRow>& rows() const { return rows_; }
  const std::vector<BilinearRow>& bilinear_rows() const { return bilinear_; }
  std::vector<BilinearRow>& bilinear_rows() { return bilinear_; }
  LinearRow& row(int i) { return rows_.at(static_cast<std::size_t>(i)); }
  std::optional<int> find_row(const std::string& name) const;

  // Drops linear rows matching `drop`; returns how many were removed.
  std::size_t remove_rows(const std::function<bool(const LinearRow&)>& drop);

  void set_bounds(int var, double lower, double upper);
  void set_kind(int var, VarKind kind);
  // Turns every binary into a continuous variable on its current bounds.
  void relax_integrality();

  std::vector<Term>& objective() { return objective_; }
  const std::vector<Term>& objective() const { return objective_; }
  double objective_constant = 0.0;

  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_binaries() const;
  // Active bilinear rows only.
  std::size_t num_bilinear_rows() const;
  std::size_t count_rows_with_prefix(const std::string& prefix) const;

  // Throws BuildError on dangling references, duplicate names or NaNs.
  void validate() const;

  std::string variant;
  int horizon = 0;

 private:
  void check_var(int v, const std::string& where) const;

  std::vector<Variable> vars_;
  std::vector<LinearRow> rows_;
  std::vector<BilinearRow> bilinear_;
  std::vector<Term> objective_;
  std::unordered_map<std::string, int> by_name_;
};

double row_activity(const std::vector<Term>& terms, const std::vector<double>& x);
double bilinear_activity(const BilinearRow& row, const std::vector<double>& x);
// Signed violation of `activity (sense) rhs`; zero when satisfied.
double row_violation(Sense sense, double activity, double rhs);

}  // namespace robustbid
