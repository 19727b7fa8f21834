// File-based solver shim around HiGHS, speaking the external-backend protocol:
//   highs_solve MODEL.mps SOLUTION.txt TIME_LIMIT GAP SEED

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>

#include "Highs.h"

int main(int argc, char** argv) {
  if (argc != 6) {
    std::fprintf(stderr, "usage: %s MODEL.mps SOLUTION.txt TIME_LIMIT GAP SEED\n", argv[0]);
    return 2;
  }
  Highs h;
  h.setOptionValue("output_flag", false);
  h.setOptionValue("threads", 1);
  h.setOptionValue("time_limit", std::atof(argv[3]));
  h.setOptionValue("mip_rel_gap", std::atof(argv[4]));
  h.setOptionValue("random_seed", std::atoi(argv[5]));
  if (h.readModel(argv[1]) == HighsStatus::kError) {
    std::fprintf(stderr, "cannot read %s\n", argv[1]);
    return 1;
  }
  if (h.run() == HighsStatus::kError) return 1;

  const HighsModelStatus ms = h.getModelStatus();
  const HighsInfo& info = h.getInfo();
  const bool has_primal = info.primal_solution_status == kSolutionStatusFeasible;
  const char* code = "error";
  if (ms == HighsModelStatus::kOptimal) code = "optimal";
  else if (ms == HighsModelStatus::kInfeasible) code = "infeasible";
  else if (ms == HighsModelStatus::kUnbounded || ms == HighsModelStatus::kUnboundedOrInfeasible)
    code = "unbounded";
  else if (has_primal) code = "feasible_limit";

  std::ofstream out(argv[2]);
  out << std::setprecision(17);
  out << "# status " << code << '\n';
  if (code == std::string("optimal") || code == std::string("feasible_limit")) {
    out << "# objective " << info.objective_function_value << '\n';
    const HighsLp& lp = h.getLp();
    const auto& x = h.getSolution().col_value;
    for (HighsInt j = 0; j < lp.num_col_; ++j) out << lp.col_names_[j] << ' ' << x[j] << '\n';
  }
  return 0;
}
