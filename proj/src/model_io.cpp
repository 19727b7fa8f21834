// Model-file emission (MPS, LP text), MPS parse-back and point verification.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "robustbid/errors.hpp"
#include "robustbid/solver_bridge.hpp"

namespace robustbid {

namespace {

std::string num(double v) {
  if (v == 0.0) return "0";
  // Shortest representation that round-trips.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct ColumnEntries {
  std::vector<std::pair<std::string, double>> entries;
};

// Row-major terms regrouped by column, in row order.
std::vector<ColumnEntries> by_column(const ModelIR& ir) {
  std::vector<ColumnEntries> cols(ir.num_variables());
  std::vector<double> obj(ir.num_variables(), 0.0);
  for (const auto& t : ir.objective()) obj[static_cast<std::size_t>(t.var)] += t.coeff;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (obj[j] != 0.0) cols[j].entries.push_back({"obj", obj[j]});
  }
  auto push_row = [&](const std::string& name, const std::vector<Term>& terms) {
    std::map<int, double> merged;
    for (const auto& t : terms) merged[t.var] += t.coeff;
    for (const auto& [v, c] : merged) {
      if (c != 0.0) cols[static_cast<std::size_t>(v)].entries.push_back({name, c});
    }
  };
  for (const auto& r : ir.rows()) push_row(r.name, r.terms);
  for (const auto& r : ir.bilinear_rows()) {
    if (r.active) push_row(r.name, r.linear);
  }
  return cols;
}

char sense_letter(Sense s) { return s == Sense::le ? 'L' : s == Sense::ge ? 'G' : 'E'; }

void check_names(const ModelIR& ir, std::size_t max_len) {
  auto bad = [&](const std::string& n) {
    return n.empty() || n.size() > max_len || n.find_first_of(" \t\n:[]*+-<>=^/") != std::string::npos ||
           n == "obj";
  };
  for (const auto& v : ir.variables()) {
    if (bad(v.name)) throw EmissionError("variable name '" + v.name + "' cannot be emitted");
  }
  for (const auto& r : ir.rows()) {
    if (bad(r.name)) throw EmissionError("row name '" + r.name + "' cannot be emitted");
  }
  for (const auto& r : ir.bilinear_rows()) {
    if (bad(r.name)) throw EmissionError("row name '" + r.name + "' cannot be emitted");
  }
}

// Free MPS: whitespace-separated fields. Fixed MPS: fields at columns 2, 5,
// 15, 25, 40, 50 (names up to 8 characters).
class MpsWriter {
 public:
  explicit MpsWriter(bool fixed) : fixed_(fixed) {}

  void section(const std::string& s) { out_ << s << '\n'; }

  void fields(const std::vector<std::string>& f) {
    if (!fixed_) {
      out_ << ' ';
      for (std::size_t i = 0; i < f.size(); ++i) out_ << (i ? " " : "") << f[i];
      out_ << '\n';
      return;
    }
    static const int starts[] = {1, 4, 14, 24, 39, 49};
    std::string line;
    for (std::size_t i = 0; i < f.size() && i < 6; ++i) {
      const auto pos = static_cast<std::size_t>(starts[i]);
      if (line.size() < pos) line.append(pos - line.size(), ' ');
      line += f[i];
    }
    out_ << line << '\n';
  }

  // Data lines skip the code field.
  void data(const std::string& a, const std::string& b, const std::string& c) {
    fields({"", a, b, c});
  }

  std::string str() const { return out_.str(); }

 private:
  bool fixed_;
  std::ostringstream out_;
};

std::string emit_mps(const ModelIR& ir, bool fixed) {
  check_names(ir, fixed ? 8 : 255);
  std::vector<std::string> colnames;
  MpsWriter w(fixed);
  w.section("NAME robustbid");
  w.section("ROWS");
  w.fields({"N", "obj"});
  for (const auto& r : ir.rows()) w.fields({std::string(1, sense_letter(r.sense)), r.name});
  for (const auto& r : ir.bilinear_rows()) {
    if (r.active) w.fields({std::string(1, sense_letter(r.sense)), r.name});
  }
  w.section("COLUMNS");
  const auto cols = by_column(ir);
  bool in_int = false;
  int marker = 0;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const Variable& v = ir.variables()[j];
    const bool is_int = v.kind == VarKind::binary;
    if (is_int != in_int) {
      const std::string m = "M" + std::to_string(marker++);
      w.data(m, "'MARKER'", is_int ? "'INTORG'" : "'INTEND'");
      in_int = is_int;
    }
    if (cols[j].entries.empty()) {
      w.data(v.name, "obj", "0");
      continue;
    }
    for (const auto& [row, c] : cols[j].entries) w.data(v.name, row, num(c));
  }
  if (in_int) w.data("M" + std::to_string(marker++), "'MARKER'", "'INTEND'");

  w.section("RHS");
  if (ir.objective_constant != 0.0) w.data("RHS", "obj", num(-ir.objective_constant));
  for (const auto& r : ir.rows()) {
    if (r.rhs != 0.0) w.data("RHS", r.name, num(r.rhs));
  }
  for (const auto& r : ir.bilinear_rows()) {
    if (r.active && r.rhs != 0.0) w.data("RHS", r.name, num(r.rhs));
  }

  w.section("BOUNDS");
  for (const auto& v : ir.variables()) {
    const bool lo_inf = std::isinf(v.lower);
    const bool hi_inf = std::isinf(v.upper);
    if (v.kind == VarKind::binary && v.lower == 0.0 && v.upper == 1.0) {
      w.fields({"BV", "BND", v.name});
    } else if (!lo_inf && !hi_inf && v.lower == v.upper) {
      w.fields({"FX", "BND", v.name, num(v.lower)});
    } else if (lo_inf && hi_inf) {
      w.fields({"FR", "BND", v.name});
    } else {
      if (lo_inf) {
        w.fields({"MI", "BND", v.name});
      } else if (v.lower != 0.0) {
        w.fields({"LO", "BND", v.name, num(v.lower)});
      }
      if (!hi_inf) w.fields({"UP", "BND", v.name, num(v.upper)});
    }
  }

  // Off-diagonal products are written as symmetric halves (x'Qx convention).
  for (const auto& r : ir.bilinear_rows()) {
    if (!r.active || r.quad.empty()) continue;
    w.section("QCMATRIX " + r.name);
    std::map<std::pair<int, int>, double> q;
    for (const auto& t : r.quad) q[{std::min(t.var1, t.var2), std::max(t.var1, t.var2)}] += t.coeff;
    for (const auto& [ij, c] : q) {
      const auto& a = ir.variables()[static_cast<std::size_t>(ij.first)].name;
      const auto& b = ir.variables()[static_cast<std::size_t>(ij.second)].name;
      if (ij.first == ij.second) {
        w.data(a, b, num(c));
      } else {
        w.data(a, b, num(c / 2.0));
        w.data(b, a, num(c / 2.0));
      }
    }
  }
  w.section("ENDATA");
  return w.str();
}

class LpWriter {
 public:
  void begin(const std::string& head) {
    flush();
    line_ = head;
  }
  void token(const std::string& t) {
    if (line_.size() + t.size() + 1 > 200) flush_continue();
    line_ += ' ';
    line_ += t;
  }
  void term(double c, const std::string& name, bool first) {
    if (c < 0.0) {
      token("-");
    } else if (!first) {
      token("+");
    }
    token(num(std::abs(c)));
    token(name);
  }
  void raw(const std::string& s) {
    flush();
    out_ << s << '\n';
  }
  std::string str() {
    flush();
    return out_.str();
  }

 private:
  void flush() {
    if (!line_.empty()) out_ << line_ << '\n';
    line_.clear();
  }
  void flush_continue() {
    out_ << line_ << '\n';
    line_ = "  ";
  }
  std::ostringstream out_;
  std::string line_;
};

std::string lp_sense(Sense s) { return s == Sense::le ? "<=" : s == Sense::ge ? ">=" : "="; }

std::string emit_lp(const ModelIR& ir) {
  check_names(ir, 255);
  const auto& vars = ir.variables();
  LpWriter w;
  w.raw("\\ robustbid model");
  w.raw("Minimize");
  w.begin(" obj:");
  bool first = true;
  std::map<int, double> obj;
  for (const auto& t : ir.objective()) obj[t.var] += t.coeff;
  for (const auto& [v, c] : obj) {
    if (c == 0.0) continue;
    w.term(c, vars[static_cast<std::size_t>(v)].name, first);
    first = false;
  }
  if (ir.objective_constant != 0.0) {
    w.token(ir.objective_constant < 0 ? "-" : "+");
    w.token(num(std::abs(ir.objective_constant)));
  } else if (first) {
    w.token("0");
  }
  w.raw("Subject To");
  auto linear_part = [&](const std::vector<Term>& terms, bool& any) {
    std::map<int, double> merged;
    for (const auto& t : terms) merged[t.var] += t.coeff;
    for (const auto& [v, c] : merged) {
      if (c == 0.0) continue;
      w.term(c, vars[static_cast<std::size_t>(v)].name, !any);
      any = true;
    }
  };
  for (const auto& r : ir.rows()) {
    w.begin(" " + r.name + ":");
    bool any = false;
    linear_part(r.terms, any);
    if (!any) w.token("0 " + vars.front().name);
    w.token(lp_sense(r.sense));
    w.token(num(r.rhs));
  }
  for (const auto& r : ir.bilinear_rows()) {
    if (!r.active) continue;
    w.begin(" " + r.name + ":");
    bool any = false;
    linear_part(r.linear, any);
    if (!r.quad.empty()) {
      if (any) w.token("+");
      w.token("[");
      bool qfirst = true;
      for (const auto& q : r.quad) {
        if (q.coeff < 0.0) {
          w.token("-");
        } else if (!qfirst) {
          w.token("+");
        }
        w.token(num(std::abs(q.coeff)));
        w.token(vars[static_cast<std::size_t>(q.var1)].name);
        w.token("*");
        w.token(vars[static_cast<std::size_t>(q.var2)].name);
        qfirst = false;
      }
      w.token("]");
    }
    w.token(lp_sense(r.sense));
    w.token(num(r.rhs));
  }
  w.raw("Bounds");
  for (const auto& v : vars) {
    const bool lo_inf = std::isinf(v.lower);
    const bool hi_inf = std::isinf(v.upper);
    if (lo_inf && hi_inf) {
      w.raw(" " + v.name + " free");
    } else if (!lo_inf && !hi_inf && v.lower == v.upper) {
      w.raw(" " + v.name + " = " + num(v.lower));
    } else {
      const std::string lo = lo_inf ? "-inf" : num(v.lower);
      const std::string hi = hi_inf ? "+inf" : num(v.upper);
      w.raw(" " + lo + " <= " + v.name + " <= " + hi);
    }
  }
  std::vector<std::string> bins;
  for (const auto& v : vars) {
    if (v.kind == VarKind::binary) bins.push_back(v.name);
  }
  if (!bins.empty()) {
    w.raw("Binaries");
    w.begin("");
    for (const auto& b : bins) w.token(b);
  }
  w.raw("End");
  return w.str();
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_fixed(const std::string& line) {
  static const std::pair<std::size_t, std::size_t> spans[] = {{1, 2},   {4, 8},  {14, 8},
                                                              {24, 12}, {39, 8}, {49, 12}};
  std::vector<std::string> out;
  for (const auto& [pos, len] : spans) {
    if (pos >= line.size()) {
      out.emplace_back();
      continue;
    }
    std::string f = line.substr(pos, len);
    f.erase(0, f.find_first_not_of(' '));
    f.erase(f.find_last_not_of(' ') + 1);
    out.push_back(f);
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

double parse_number(const std::string& s, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw EmissionError("MPS line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

ModelFormat parse_format(const std::string& s) {
  if (s == "mps" || s == "mps_free" || s == "free-mps") return ModelFormat::mps_free;
  if (s == "mps_fixed" || s == "fixed-mps") return ModelFormat::mps_fixed;
  if (s == "lp") return ModelFormat::lp;
  throw ConfigError("unknown model format '" + s + "'");
}

std::string emit_model(const ModelIR& ir, ModelFormat format) {
  ir.validate();
  switch (format) {
    case ModelFormat::mps_free: return emit_mps(ir, false);
    case ModelFormat::mps_fixed: return emit_mps(ir, true);
    case ModelFormat::lp: return emit_lp(ir);
  }
  throw EmissionError("unsupported format");
}

ModelIR parse_mps(const std::string& text, bool fixed) {
  struct PendingRow {
    std::string name;
    Sense sense;
    std::map<int, double> terms;
    double rhs = 0.0;
    std::map<std::pair<int, int>, double> quad;
    bool nonempty_quad = false;
  };
  std::vector<PendingRow> rows;
  std::map<std::string, std::size_t> row_index;
  std::string obj_name;
  std::map<int, double> objective;
  double obj_constant = 0.0;

  struct Col {
    std::string name;
    bool integer;
    double lo = 0.0;
    double hi = kInf;
    bool hi_set = false;
  };
  std::vector<Col> cols;
  std::map<std::string, int> col_index;

  auto col_id = [&](const std::string& name, bool integer) {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    const int id = static_cast<int>(cols.size());
    cols.push_back({name, integer});
    col_index.emplace(name, id);
    return id;
  };
  auto existing_col = [&](const std::string& name, int line_no) {
    auto it = col_index.find(name);
    if (it == col_index.end()) {
      throw EmissionError("MPS line " + std::to_string(line_no) + ": unknown column " + name);
    }
    return it->second;
  };

  std::string section;
  std::size_t q_row = 0;
  bool in_int = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    if (line[0] != ' ' && line[0] != '\t') {
      const auto head = split_ws(line);
      section = head[0];
      if (section == "QCMATRIX" || section == "QSECTION") {
        if (head.size() < 2 || !row_index.count(head[1])) {
          throw EmissionError("MPS line " + std::to_string(line_no) + ": QCMATRIX without row");
        }
        q_row = row_index[head[1]];
      }
      if (section == "ENDATA") break;
      continue;
    }
    auto f = fixed ? split_fixed(line) : split_ws(line);
    // Fixed-format data lines carry an empty code field.
    if (fixed && !f.empty() && f[0].empty()) f.erase(f.begin());
    if (f.empty()) continue;

    if (section == "ROWS") {
      if (f.size() < 2) throw EmissionError("MPS line " + std::to_string(line_no) + ": short row");
      if (f[0] == "N") {
        if (obj_name.empty()) obj_name = f[1];
        continue;
      }
      const Sense s = f[0] == "L" ? Sense::le : f[0] == "G" ? Sense::ge : Sense::eq;
      if (f[0] != "L" && f[0] != "G" && f[0] != "E") {
        throw EmissionError("MPS line " + std::to_string(line_no) + ": bad row type " + f[0]);
      }
      row_index[f[1]] = rows.size();
      rows.push_back({f[1], s, {}, 0.0, {}, false});
    } else if (section == "COLUMNS") {
      if (f.size() >= 3 && f[1] == "'MARKER'") {
        in_int = f[2] == "'INTORG'";
        continue;
      }
      const int c = col_id(f[0], in_int);
      for (std::size_t i = 1; i + 1 < f.size(); i += 2) {
        const double v = parse_number(f[i + 1], line_no);
        if (f[i] == obj_name) {
          objective[c] += v;
        } else {
          auto it = row_index.find(f[i]);
          if (it == row_index.end()) {
            throw EmissionError("MPS line " + std::to_string(line_no) + ": unknown row " + f[i]);
          }
          rows[it->second].terms[c] += v;
        }
      }
    } else if (section == "RHS") {
      const std::size_t start = f.size() % 2 == 1 ? 1 : 0;
      for (std::size_t i = start; i + 1 < f.size(); i += 2) {
        const double v = parse_number(f[i + 1], line_no);
        if (f[i] == obj_name) {
          obj_constant = -v;
        } else {
          auto it = row_index.find(f[i]);
          if (it == row_index.end()) {
            throw EmissionError("MPS line " + std::to_string(line_no) + ": unknown row " + f[i]);
          }
          rows[it->second].rhs = v;
        }
      }
    } else if (section == "BOUNDS") {
      if (f.size() < 3) throw EmissionError("MPS line " + std::to_string(line_no) + ": short bound");
      Col& c = cols[static_cast<std::size_t>(existing_col(f[2], line_no))];
      const std::string& t = f[0];
      const double v = f.size() > 3 ? parse_number(f[3], line_no) : 0.0;
      if (t == "UP") {
        c.hi = v;
        c.hi_set = true;
        if (v < 0.0 && c.lo == 0.0) c.lo = -kInf;
      } else if (t == "LO") {
        c.lo = v;
      } else if (t == "FX") {
        c.lo = c.hi = v;
        c.hi_set = true;
      } else if (t == "FR") {
        c.lo = -kInf;
        c.hi = kInf;
        c.hi_set = true;
      } else if (t == "MI") {
        c.lo = -kInf;
      } else if (t == "PL") {
        c.hi = kInf;
        c.hi_set = true;
      } else if (t == "BV") {
        c.integer = true;
        c.lo = 0.0;
        c.hi = 1.0;
        c.hi_set = true;
      } else {
        throw EmissionError("MPS line " + std::to_string(line_no) + ": unsupported bound " + t);
      }
    } else if (section == "QCMATRIX" || section == "QSECTION") {
      if (f.size() < 3) {
        throw EmissionError("MPS line " + std::to_string(line_no) + ": short QCMATRIX entry");
      }
      const int a = existing_col(f[0], line_no);
      const int b = existing_col(f[1], line_no);
      rows[q_row].quad[{std::min(a, b), std::max(a, b)}] += parse_number(f[2], line_no);
      rows[q_row].nonempty_quad = true;
    } else if (section == "RANGES") {
      throw EmissionError("MPS: RANGES section is not supported");
    }
  }
  if (section != "ENDATA") throw EmissionError("MPS: missing ENDATA");

  ModelIR ir;
  for (const Col& c : cols) {
    double hi = c.hi;
    if (c.integer && !c.hi_set) hi = kInf;
    ir.add_variable(c.name, c.integer ? VarKind::binary : VarKind::continuous, c.lo, hi);
  }
  for (auto& r : rows) {
    std::vector<Term> terms;
    for (const auto& [v, cf] : r.terms) terms.push_back({v, cf});
    if (!r.nonempty_quad) {
      ir.add_row(r.name, std::move(terms), r.sense, r.rhs);
      continue;
    }
    BilinearRow b;
    b.name = r.name;
    b.linear = std::move(terms);
    b.sense = r.sense;
    b.rhs = r.rhs;
    for (const auto& [ij, cf] : r.quad) {
      // Symmetric halves recombine into one product coefficient.
      if (cf != 0.0) b.quad.push_back({ij.first, ij.second, cf});
    }
    ir.add_bilinear_row(std::move(b));
  }
  for (const auto& [v, cf] : objective) ir.objective().push_back({v, cf});
  ir.objective_constant = obj_constant;
  return ir;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string checksum_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

VerificationReport verify_point(const ModelIR& ir, const std::vector<double>& x, double tol) {
  if (x.size() != ir.num_variables()) {
    throw VerificationError("point has " + std::to_string(x.size()) + " values for " +
                            std::to_string(ir.num_variables()) + " variables");
  }
  VerificationReport rep;
  auto note = [&](std::vector<Residual>& into, const std::string& name, double viol, double scale,
                  bool counts) {
    into.push_back({name, viol});
    if (viol > tol * scale) {
      if (counts) {
        rep.feasible = false;
        ++rep.violations;
        rep.max_violation = std::max(rep.max_violation, viol);
      }
      return true;
    }
    return false;
  };
  for (std::size_t j = 0; j < x.size(); ++j) {
    const Variable& v = ir.variables()[j];
    if (std::isnan(x[j])) throw VerificationError("point value for " + v.name + " is NaN");
    double viol = std::max({0.0, v.lower - x[j], x[j] - v.upper});
    if (v.kind == VarKind::binary) viol = std::max(viol, std::abs(x[j] - std::round(x[j])));
    note(rep.bounds, v.name, viol, 1.0, true);
  }
  for (const auto& r : ir.rows()) {
    note(rep.linear, r.name, row_violation(r.sense, row_activity(r.terms, x), r.rhs), 1.0, true);
  }
  for (const auto& r : ir.bilinear_rows()) {
    double scale = 1.0;
    for (const auto& q : r.quad) {
      scale = std::max(scale, std::abs(q.coeff * x[static_cast<std::size_t>(q.var1)] *
                                       x[static_cast<std::size_t>(q.var2)]));
    }
    const double viol = row_violation(r.sense, bilinear_activity(r, x), r.rhs);
    if (note(rep.bilinear, r.name, viol, scale, r.active)) ++rep.bilinear_violations;
  }
  return rep;
}

VerificationReport verify_point(const ModelIR& ir, const std::map<std::string, double>& point,
                                double tol) {
  std::vector<double> x(ir.num_variables());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& name = ir.variables()[j].name;
    auto it = point.find(name);
    if (it == point.end()) throw VerificationError("point misses a value for " + name);
    x[j] = it->second;
  }
  return verify_point(ir, x, tol);
}

}  // namespace robustbid
