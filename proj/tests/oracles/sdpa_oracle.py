"""Solves an SDPA sparse (.dat-s) file with cvxpy: min c'x s.t. sum_i F_i x_i - F_0 >= 0 per block.

The optional first comment line '"objective constant v' produced by the exporter is added to the
optimal value. Negative block sizes denote diagonal (LP) blocks.
"""
import sys

import cvxpy as cp
import numpy as np


def parse(text):
    lines = [l.strip() for l in text.splitlines()]
    const = 0.0
    body = []
    for l in lines:
        if not l:
            continue
        if l[0] in "\"*":
            if l.startswith('"objective constant'):
                const = float(l.split()[-1])
            continue
        body.append(l)
    m = int(body[0].split()[0])
    nb = int(body[1].split()[0])
    sizes = [int(float(t)) for t in body[2].replace(",", " ").replace("{", " ").replace("}", " ").split()][:nb]
    c = np.array([float(t) for t in body[3].replace(",", " ").split()][:m])
    mats = [[np.zeros((abs(s), abs(s))) for s in sizes] for _ in range(m + 1)]
    for l in body[4:]:
        k, b, i, j, v = l.split()
        k, b, i, j, v = int(k), int(b) - 1, int(i) - 1, int(j) - 1, float(v)
        mats[k][b][i, j] = v
        mats[k][b][j, i] = v
    return const, c, sizes, mats


def solve(text):
    const, c, sizes, mats = parse(text)
    m = len(c)
    x = cp.Variable(m)
    cons = []
    for b, s in enumerate(sizes):
        expr = sum(mats[k + 1][b] * x[k] for k in range(m) if np.any(mats[k + 1][b])) - mats[0][b]
        if s < 0:
            cons.append(cp.diag(expr) >= 0)
        else:
            cons.append((expr + expr.T) / 2 >> 0)
    prob = cp.Problem(cp.Minimize(c @ x), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10, max_iter=500)
    return prob.status, prob.value + const


if __name__ == "__main__":
    status, value = solve(open(sys.argv[1]).read())
    print(status, repr(value))
