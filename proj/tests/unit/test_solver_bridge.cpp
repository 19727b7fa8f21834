#include <cstdlib>

#include "doctest.h"
#include "robustbid/solver_bridge.hpp"
#include "test_support.hpp"

using namespace robustbid;
using namespace robustbid::testing;

namespace {

// min -x - 2y  s.t.  x + y <= 4, x - y >= -2, y binary, x in [0, 3].
ModelIR tiny_mip() {
  ModelIR ir;
  const int x = ir.add_variable("x", VarKind::continuous, 0.0, 3.0);
  const int y = ir.add_variable("y", VarKind::binary, 0.0, 1.0);
  ir.add_row("cap", {{x, 1.0}, {y, 1.0}}, Sense::le, 4.0);
  ir.add_row("gap", {{x, 1.0}, {y, -1.0}}, Sense::ge, -2.0);
  ir.objective() = {{x, -1.0}, {y, -2.0}};
  ir.objective_constant = 0.5;
  return ir;
}

// Smallest t with t*d + m*n >= 1 for fixed n, d: a single bilinear row.
ModelIR tiny_bilinear() {
  ModelIR ir;
  const int t = ir.add_variable("t", VarKind::continuous, -10.0, 10.0);
  const int d = ir.add_variable("d", VarKind::continuous, 2.0, 2.0);
  const int m = ir.add_variable("m", VarKind::continuous, 0.0, 0.0);
  const int n = ir.add_variable("n", VarKind::continuous, 0.0, 1.0);
  BilinearRow r;
  r.name = "bil";
  r.quad = {{t, d, 1.0}, {m, n, 1.0}};
  r.sense = Sense::ge;
  r.rhs = 1.0;
  ir.add_bilinear_row(r);
  ir.objective() = {{t, 1.0}};
  return ir;
}

}  // namespace

TEST_CASE("IR bookkeeping") {
  ModelIR ir = tiny_mip();
  CHECK(ir.num_variables() == 2);
  CHECK(ir.num_binaries() == 1);
  CHECK(ir.index("y") == 1);
  CHECK_FALSE(ir.find("z").has_value());
  CHECK_THROWS_AS(ir.add_variable("x", VarKind::continuous, 0.0, 1.0), BuildError);
  CHECK_THROWS_AS(ir.add_row("bad", {{7, 1.0}}, Sense::le, 0.0), BuildError);
  ir.relax_integrality();
  CHECK(ir.num_binaries() == 0);
}

TEST_CASE("HiGHS solves a small MIP") {
  const ModelIR ir = tiny_mip();
  const SolveResult r = solve_with(HighsBackend(), ir, tight_options());
  REQUIRE(r.status == SolveStatus::optimal);
  // y = 1 allows x = 3: -3 - 2 + 0.5.
  CHECK(r.objective == doctest::Approx(-4.5));
  CHECK(r.value(ir, "x") == doctest::Approx(3.0));
  CHECK(r.bilinear_violations == 0);
  CHECK(verify_point(ir, r.point).feasible);
  const SolveResult again = solve_with(HighsBackend(), ir, tight_options());
  CHECK(again.objective == r.objective);
}

TEST_CASE("HiGHS reports infeasible and unbounded models") {
  ModelIR ir;
  const int x = ir.add_variable("x", VarKind::continuous, 0.0, 1.0);
  ir.add_row("impossible", {{x, 1.0}}, Sense::ge, 2.0);
  CHECK(solve_with(HighsBackend(), ir, tight_options()).status == SolveStatus::infeasible);
  ModelIR u;
  const int z = u.add_variable("z", VarKind::continuous, -kInf, kInf);
  u.add_row("loose", {{z, 1.0}}, Sense::le, 5.0);
  u.objective() = {{z, 1.0}};
  const SolveResult r = solve_with(HighsBackend(), u, tight_options());
  CHECK(r.status == SolveStatus::unbounded);
  CHECK_FALSE(r.has_point());
}

TEST_CASE("bilinear models are refused by linear backends") {
  const ModelIR ir = tiny_bilinear();
  CHECK_THROWS_AS(solve_with(HighsBackend(), ir, tight_options()), SolverError);
  CHECK_THROWS_AS(solve_with(ExternalBackend("/bin/true", false), ir, tight_options()), SolverError);
}

TEST_CASE("MPS round trip preserves the model") {
  Rng rng(31);
  const Instance inst = random_instance(rng, 4);
  ModelOptions o = inst.options;
  o.variant = Variant::exact;
  const ModelIR ir = build_model(inst.inputs, o);
  const std::string text = emit_model(ir, ModelFormat::mps_free);
  const ModelIR back = parse_mps(text);
  CHECK(back.num_variables() == ir.num_variables());
  CHECK(back.num_rows() == ir.num_rows());
  CHECK(back.num_binaries() == ir.num_binaries());
  CHECK(back.num_bilinear_rows() == ir.num_bilinear_rows());
  // Re-emission is byte-identical.
  CHECK(emit_model(back, ModelFormat::mps_free) == text);
  // A feasible point of the IR stays feasible for the parsed model.
  o.variant = Variant::restriction;
  const ModelIR restr = build_model(inst.inputs, o);
  const SolveResult r = solve_with(HighsBackend(), restr, tight_options());
  REQUIRE(r.has_point());
  const ModelIR restr_back = parse_mps(emit_model(restr, ModelFormat::mps_free));
  const auto rep = verify_point(restr_back, r.point_map(restr));
  CHECK(rep.feasible);
  const SolveResult r2 = solve_with(HighsBackend(), restr_back, tight_options());
  CHECK(r2.objective == doctest::Approx(r.objective).epsilon(1e-9).scale(1.0));
}

TEST_CASE("fixed MPS needs short names") {
  const ModelIR small = tiny_mip();
  const std::string fixed = emit_model(small, ModelFormat::mps_fixed);
  const ModelIR back = parse_mps(fixed, true);
  CHECK(back.num_variables() == 2);
  CHECK(back.objective_constant == doctest::Approx(0.5));
  Rng rng(32);
  const Instance inst = random_instance(rng, 4);
  const ModelIR big = build_model(inst.inputs, inst.options);
  CHECK_THROWS_AS(emit_model(big, ModelFormat::mps_fixed), EmissionError);
}

TEST_CASE("LP text format") {
  const std::string lp = emit_model(tiny_bilinear(), ModelFormat::lp);
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("[") != std::string::npos);
  CHECK(lp.find("End") != std::string::npos);
  const std::string mip = emit_model(tiny_mip(), ModelFormat::lp);
  CHECK(mip.find("Binar") != std::string::npos);
}

TEST_CASE("checksums are stable") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(checksum_hex("a") == "af63dc4c8601ec8c");
  const std::string a = emit_model(tiny_mip(), ModelFormat::mps_free);
  CHECK(checksum_hex(a) == checksum_hex(emit_model(tiny_mip(), ModelFormat::mps_free)));
}

TEST_CASE("solution files") {
  const ModelIR ir = tiny_mip();
  const SolveResult r = parse_solution_file(ir, "# status optimal\n# objective -4.5\nx 3\ny 1\n");
  CHECK(r.status == SolveStatus::optimal);
  CHECK(r.objective == doctest::Approx(-4.5));
  CHECK(r.point == std::vector<double>{3.0, 1.0});
  CHECK_THROWS_AS(parse_solution_file(ir, "x 3\nw 1\n"), SolverError);
  CHECK_THROWS_AS(parse_solution_file(ir, "# status optimal\nx 3\n"), SolverError);
  CHECK(parse_solution_file(ir, "# status infeasible\n").status == SolveStatus::infeasible);
}

TEST_CASE("verification tolerances") {
  const ModelIR ir = tiny_mip();
  CHECK(verify_point(ir, std::vector<double>{3.0, 1.0}).feasible);
  const auto bad = verify_point(ir, std::vector<double>{3.5, 1.0});
  CHECK_FALSE(bad.feasible);
  CHECK(bad.max_violation == doctest::Approx(0.5));
  CHECK_FALSE(verify_point(ir, std::vector<double>{0.0, 0.5}).feasible);
  CHECK_THROWS_AS(verify_point(ir, std::vector<double>{1.0}), VerificationError);
  ModelIR bil = tiny_bilinear();
  CHECK(verify_point(bil, std::vector<double>{0.5, 2.0, 0.0, 0.0}).feasible);
  const auto v = verify_point(bil, std::vector<double>{0.4, 2.0, 0.0, 0.0});
  CHECK_FALSE(v.feasible);
  CHECK(v.bilinear_violations == 1);
  bil.bilinear_rows()[0].active = false;
  const auto inactive = verify_point(bil, std::vector<double>{0.4, 2.0, 0.0, 0.0});
  CHECK(inactive.feasible);
  CHECK(inactive.bilinear_violations == 1);
}

TEST_CASE("external backend through the HiGHS shim") {
  const ModelIR ir = tiny_mip();
  const ExternalBackend ext(ROBUSTBID_HIGHS_SHIM, false);
  const SolveResult r = solve_with(ext, ir, tight_options());
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.objective == doctest::Approx(-4.5));
  CHECK(r.point == std::vector<double>{3.0, 1.0});
  const SolveResult missing = ExternalBackend("/nonexistent/solver").solve(ir, tight_options());
  CHECK(missing.status == SolveStatus::error);
}

TEST_CASE("external backend through SCIP handles bilinear rows") {
  if (!scip_available()) {
    MESSAGE("pyscipopt not installed; skipping");
    return;
  }
  const ModelIR ir = tiny_bilinear();
  const ExternalBackend ext(scip_shim());
  const SolveResult r = solve_with(ext, ir, tight_options());
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.objective == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(r.bilinear_violations == 0);
}

TEST_CASE("backend selection") {
  unsetenv(kBackendEnv);
  CHECK(make_backend("highs")->name() == "highs");
  const ModelIR lin = tiny_mip();
  CHECK(make_backend("auto", &lin)->name() == "highs");
  const char* saved = std::getenv(kSolverEnv);
  const std::string keep = saved ? saved : "";
  unsetenv(kSolverEnv);
  const ModelIR bil = tiny_bilinear();
  CHECK_THROWS_AS(make_backend("auto", &bil), ConfigError);
  setenv(kSolverEnv, "/opt/solver", 1);
  CHECK(make_backend("auto", &bil)->name() == "external:/opt/solver");
  CHECK_THROWS_AS(make_backend("gurobi"), ConfigError);
  if (saved) setenv(kSolverEnv, keep.c_str(), 1); else unsetenv(kSolverEnv);
}

TEST_CASE("relative gap") {
  CHECK(relative_gap(-10.0, -10.5) == doctest::Approx(0.05));
  CHECK(relative_gap(0.0, 0.0) == 0.0);
  CHECK(std::isinf(relative_gap(1.0, -kInf)));
}
