"""Reference optimal costs for the shipped OPF cases, solved with cvxpy and SCS.

The relaxation is written here from the case JSON alone, independently of the
C++ encoding. Output values are frozen into tests/unit/test_opf.cpp.

    python3 tests/oracles/opf_reference.py data/cases/*.json
"""

import json
import sys

import cvxpy as cp
import numpy as np


def solve(case, load_scale=1.0):
    base = case.get("base_mva", 100.0)
    zbase = case["base_kv"] ** 2 / base if "base_kv" in case else 1.0
    buses = [b["id"] for b in case["buses"]]
    idx = {b: k for k, b in enumerate(buses)}
    gens, lines, loads = case["generators"], case["lines"], case["loads"]
    vmin, vmax = case["voltage"]["vmin"], case["voltage"]["vmax"]

    p = cp.Variable(len(gens))
    q = cp.Variable(len(gens))
    w = cp.Variable(len(buses))
    wr = cp.Variable(len(lines))
    wi = cp.Variable(len(lines))

    inj_p = [0] * len(buses)
    inj_q = [0] * len(buses)
    cons = [w >= vmin**2, w <= vmax**2]
    for k, g in enumerate(gens):
        cons += [p[k] >= g["pmin"] / base, p[k] <= g["pmax"] / base,
                 q[k] >= g["qmin"] / base, q[k] <= g["qmax"] / base]
        inj_p[idx[g["bus"]]] += p[k]
        inj_q[idx[g["bus"]]] += q[k]
    for d in loads:
        inj_p[idx[d["bus"]]] -= load_scale * d["p"] / base
        inj_q[idx[d["bus"]]] -= load_scale * d["q"] / base
    for l, ln in enumerate(lines):
        g, b = ln["g"] * zbase, ln["b_susceptance"] * zbase
        i, j = idx[ln["from"]], idx[ln["to"]]
        # S_ij = (W_ii - W_ij) conj(y), S_ji = (W_jj - conj(W_ij)) conj(y).
        pij = (w[i] - wr[l]) * g - wi[l] * b
        qij = -(w[i] - wr[l]) * b - wi[l] * g
        pji = (w[j] - wr[l]) * g + wi[l] * b
        qji = -(w[j] - wr[l]) * b + wi[l] * g
        inj_p[i] -= pij
        inj_q[i] -= qij
        inj_p[j] -= pji
        inj_q[j] -= qji
        cons += [cp.norm(cp.hstack([2 * wr[l], 2 * wi[l], w[i] - w[j]])) <= w[i] + w[j],
                 cp.norm(cp.hstack([pij, qij])) <= ln["k_max"] / base]
    cons += [e == 0 for e in inj_p + inj_q]
    cost = sum(g["a"] * cp.square(base * p[k]) + g["b"] * base * p[k]
               for k, g in enumerate(gens))
    prob = cp.Problem(cp.Minimize(cost), cons)
    # Clarabel stops a few 1e-7 (relative) low on case33; SCS at eps 1e-10 is
    # consistent across all shipped cases.
    prob.solve(solver=cp.SCS, eps=1e-10, max_iters=500000)
    if prob.status != cp.OPTIMAL:
        raise RuntimeError(f"solver status {prob.status}")
    return prob.value, base * p.value


if __name__ == "__main__":
    for path in sys.argv[1:]:
        with open(path) as f:
            case = json.load(f)
        cost, p_mw = solve(case)
        zero_cost, _ = solve(case, load_scale=0.0)
        print(f"{path}: cost {cost:.12g} p_mw {np.round(p_mw, 8).tolist()} zero-load cost {zero_cost:.3g}")
