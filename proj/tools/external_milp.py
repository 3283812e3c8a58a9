#!/usr/bin/env python3
"""Solve an LP-format model with HiGHS and write a name/value solution file.

Output format:
    # status <optimal|feasible|infeasible|time_limit|unbounded|error>
    # objective <value>
    <variable name> <value>
"""

import argparse
import os
import sys
import tempfile

import highspy

# HiGHS reserves square brackets in LP files; names travel as parentheses.
TO_ENGINE = str.maketrans({"[": "(", "]": ")"})
FROM_ENGINE = str.maketrans({"(": "[", ")": "]"})


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("model")
    parser.add_argument("solution")
    parser.add_argument("--gap", type=float, default=1e-6)
    parser.add_argument("--time-limit", type=float, default=600.0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    with open(args.model, encoding="utf-8") as f:
        text = f.read().translate(TO_ENGINE)
    fd, path = tempfile.mkstemp(suffix=".lp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("mip_rel_gap", args.gap)
        h.setOptionValue("time_limit", args.time_limit)
        h.setOptionValue("threads", max(1, args.threads))
        h.setOptionValue("random_seed", args.seed % 2147483647)
        if h.readModel(path) != highspy.HighsStatus.kOk:
            print("cannot read model", file=sys.stderr)
            return 1
        h.run()
    finally:
        os.unlink(path)

    status = h.getModelStatus()
    ms = highspy.HighsModelStatus
    info = h.getInfo()
    has_solution = info.primal_solution_status == 2
    if status == ms.kOptimal:
        label = "optimal"
    elif status == ms.kInfeasible:
        label = "infeasible"
    elif status in (ms.kUnbounded, ms.kUnboundedOrInfeasible):
        label = "unbounded"
    elif status == ms.kTimeLimit:
        label = "time_limit"
    elif has_solution:
        label = "feasible"
    else:
        label = "error"

    lines = [f"# status {label}"]
    if has_solution and label != "infeasible":
        lines.append(f"# objective {info.objective_function_value!r}")
        names = h.getLp().col_names_
        values = h.getSolution().col_value
        for name, value in zip(names, values):
            lines.append(f"{name.translate(FROM_ENGINE)} {value!r}")
    tmp = args.solution + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    os.replace(tmp, args.solution)
    return 0


if __name__ == "__main__":
    sys.exit(main())
