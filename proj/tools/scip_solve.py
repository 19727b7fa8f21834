#!/usr/bin/env python3
"""File-based solver shim around SCIP for the external backend.

Usage: scip_solve.py MODEL.mps SOLUTION.txt TIME_LIMIT GAP SEED
"""

import math
import sys

import pyscipopt


def main(argv):
    if len(argv) != 6:
        print(__doc__, file=sys.stderr)
        return 2
    model_path, sol_path, time_limit, gap, seed = argv[1:]
    m = pyscipopt.Model()
    m.hideOutput()
    m.readProblem(model_path)
    m.setParam("limits/time", float(time_limit))
    m.setParam("limits/gap", float(gap))
    m.setParam("randomization/randomseedshift", int(seed))
    m.setParam("numerics/feastol", 1e-9)
    m.optimize()

    status = m.getStatus()
    has_sol = m.getNSols() > 0
    if status == "optimal":
        code = "optimal"
    elif status == "infeasible":
        code = "infeasible"
    elif status in ("unbounded", "inforunbd"):
        code = "unbounded"
    elif has_sol:
        code = "feasible_limit"
    else:
        code = "error"

    with open(sol_path, "w") as out:
        out.write(f"# status {code}\n")
        if code in ("optimal", "feasible_limit"):
            out.write(f"# objective {m.getObjVal()!r}\n")
            bound = m.getDualbound()
            if math.isfinite(bound):
                out.write(f"# bound {bound!r}\n")
            sol = m.getBestSol()
            for v in m.getVars():
                out.write(f"{v.name} {m.getSolVal(sol, v)!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
