#!/usr/bin/env python3
"""Independent reference solver for dumped conic programs.

Reads one or more program dumps (as produced by Program::dump) and re-solves
them with cvxpy, printing the optimal value for each. Used to cross-check the
in-tree interior-point solver on randomized instances.

Usage: conic_oracle.py dump1.json [dump2.json ...]
"""
import json
import sys

import cvxpy as cp
import numpy as np


def parse_bound(v):
    if v == "+inf":
        return np.inf
    if v == "-inf":
        return -np.inf
    return float(v)


def lin(expr_json, y):
    e = expr_json["c0"]
    for var, coef in expr_json["terms"]:
        e = e + coef * y[var]
    return e


def solve_dump(j):
    m = j["num_scalars"]
    y = cp.Variable(m)
    cons = []
    for i in j["nonneg"]:
        cons.append(y[i] >= 0)
    for lc in j["linear"]:
        lo, hi = parse_bound(lc["lo"]), parse_bound(lc["hi"])
        e = lin(lc["expr"], y)
        if lo == hi:
            cons.append(e == lo)
        else:
            if lo != -np.inf:
                cons.append(e >= lo)
            if hi != np.inf:
                cons.append(e <= hi)
    for pc in j["psd"]:
        f0 = np.array(pc["f0"]["re"]) + 1j * np.array(pc["f0"]["im"])
        expr = cp.Constant(f0)
        for cj in pc["coef"]:
            fi = np.array(cj["mat"]["re"]) + 1j * np.array(cj["mat"]["im"])
            expr = expr + y[cj["var"]] * cp.Constant(fi)
        cons.append(cp.Constant(np.zeros(f0.shape)) << expr)
    for pb in j["power"]:
        t, x = lin(pb["t"], y), lin(pb["x"], y)
        cons.append(t >= pb["c"] * cp.power(x, pb["q"]))
    obj = cp.Minimize(lin(j["objective"], y))
    prob = cp.Problem(obj, cons)
    for solver, kwargs in (
        (cp.CLARABEL, {}),
        (cp.SCS, {"eps": 1e-10, "max_iters": 200000}),
    ):
        try:
            prob.solve(solver=solver, **kwargs)
        except cp.error.SolverError:
            continue
        if prob.status in (cp.OPTIMAL, cp.UNBOUNDED, cp.INFEASIBLE):
            return prob.status, prob.value
    return prob.status, prob.value


def main():
    for path in sys.argv[1:]:
        with open(path) as f:
            j = json.load(f)
        status, value = solve_dump(j)
        print(f"{path}: status={status} value={value!r}")


if __name__ == "__main__":
    main()
