#include "robustbid/model_ir.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "robustbid/errors.hpp"

namespace robustbid {

int ModelIR::add_variable(std::string name, VarKind kind, double lower, double upper) {
  if (by_name_.count(name)) throw BuildError("duplicate variable " + name);
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw BuildError("invalid bounds for variable " + name);
  }
  const int id = static_cast<int>(vars_.size());
  by_name_.emplace(name, id);
  vars_.push_back({std::move(name), kind, lower, upper});
  return id;
}

int ModelIR::add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  for (const auto& t : terms) check_var(t.var, name);
  rows_.push_back({std::move(name), std::move(terms), sense, rhs});
  return static_cast<int>(rows_.size()) - 1;
}

int ModelIR::add_bilinear_row(BilinearRow row) {
  for (const auto& q : row.quad) {
    check_var(q.var1, row.name);
    check_var(q.var2, row.name);
  }
  for (const auto& t : row.linear) check_var(t.var, row.name);
  bilinear_.push_back(std::move(row));
  return static_cast<int>(bilinear_.size()) - 1;
}

int ModelIR::index(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw BuildError("unknown variable " + name);
  return it->second;
}

std::optional<int> ModelIR::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t ModelIR::remove_rows(const std::function<bool(const LinearRow&)>& drop) {
  const auto it = std::remove_if(rows_.begin(), rows_.end(), drop);
  const auto n = static_cast<std::size_t>(rows_.end() - it);
  rows_.erase(it, rows_.end());
  return n;
}

std::optional<int> ModelIR::find_row(const std::string& name) const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

void ModelIR::set_bounds(int var, double lower, double upper) {
  check_var(var, "set_bounds");
  if (lower > upper) throw BuildError("empty bounds for " + vars_[var].name);
  vars_[var].lower = lower;
  vars_[var].upper = upper;
}

void ModelIR::set_kind(int var, VarKind kind) {
  check_var(var, "set_kind");
  vars_[var].kind = kind;
}

void ModelIR::relax_integrality() {
  for (auto& v : vars_) v.kind = VarKind::continuous;
}

std::size_t ModelIR::num_binaries() const {
  return static_cast<std::size_t>(std::count_if(
      vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::binary; }));
}

std::size_t ModelIR::num_bilinear_rows() const {
  return static_cast<std::size_t>(std::count_if(
      bilinear_.begin(), bilinear_.end(), [](const BilinearRow& r) { return r.active; }));
}

std::size_t ModelIR::count_rows_with_prefix(const std::string& prefix) const {
  return static_cast<std::size_t>(std::count_if(rows_.begin(), rows_.end(), [&](const LinearRow& r) {
    return r.name.compare(0, prefix.size(), prefix) == 0;
  }));
}

void ModelIR::validate() const {
  std::unordered_set<std::string> names;
  auto finite = [](double v) { return !std::isnan(v); };
  for (const auto& r : rows_) {
    if (!names.insert(r.name).second) throw BuildError("duplicate row " + r.name);
    if (!finite(r.rhs) || std::isinf(r.rhs)) throw BuildError("non-finite rhs in " + r.name);
    for (const auto& t : r.terms) {
      check_var(t.var, r.name);
      if (!std::isfinite(t.coeff)) throw BuildError("non-finite coefficient in " + r.name);
    }
  }
  for (const auto& r : bilinear_) {
    if (!names.insert(r.name).second) throw BuildError("duplicate row " + r.name);
    for (const auto& q : r.quad) {
      check_var(q.var1, r.name);
      check_var(q.var2, r.name);
    }
    for (const auto& t : r.linear) check_var(t.var, r.name);
  }
  for (const auto& t : objective_) {
    check_var(t.var, "objective");
    if (!std::isfinite(t.coeff)) throw BuildError("non-finite objective coefficient");
  }
}

void ModelIR::check_var(int v, const std::string& where) const {
  if (v < 0 || static_cast<std::size_t>(v) >= vars_.size()) {
    throw BuildError("row " + where + " references an unregistered variable");
  }
}

double row_activity(const std::vector<Term>& terms, const std::vector<double>& x) {
  double a = 0.0;
  for (const auto& t : terms) a += t.coeff * x[static_cast<std::size_t>(t.var)];
  return a;
}

double bilinear_activity(const BilinearRow& row, const std::vector<double>& x) {
  double a = row_activity(row.linear, x);
  for (const auto& q : row.quad) {
    a += q.coeff * x[static_cast<std::size_t>(q.var1)] * x[static_cast<std::size_t>(q.var2)];
  }
  return a;
}

double row_violation(Sense sense, double activity, double rhs) {
  switch (sense) {
    case Sense::le: return std::max(0.0, activity - rhs);
    case Sense::ge: return std::max(0.0, rhs - activity);
    case Sense::eq: return std::abs(activity - rhs);
  }
  return 0.0;
}

}  // namespace robustbid
