"""Independent ACOPF oracles for small MATPOWER cases.

Local AC optimum: scipy SLSQP in rectangular voltage coordinates, many starts.
SDP relaxation: cvxpy with a dense Hermitian PSD matrix (no sparsity, no cuts).
"""
import re
import sys

import numpy as np
import cvxpy as cp
from scipy.optimize import minimize


def parse(path):
    text = open(path).read()
    base = float(re.search(r"mpc\.baseMVA\s*=\s*([0-9.eE+-]+)", text).group(1))

    def mat(name):
        body = re.search(r"mpc\." + name + r"\s*=\s*\[(.*?)\];", text, re.S).group(1)
        rows = []
        for line in body.splitlines():
            line = line.split("%")[0].strip().rstrip(";")
            if line:
                rows.append([float(v) for v in line.split()])
        return np.array(rows)

    return base, mat("bus"), mat("gen"), mat("branch"), mat("gencost")


def build(base, bus, gen, branch):
    nb = bus.shape[0]
    idx = {int(b): k for k, b in enumerate(bus[:, 0])}
    Y = np.zeros((nb, nb), complex)
    br = []
    for row in branch:
        if row[10] == 0:
            continue
        f, t = idx[int(row[0])], idx[int(row[1])]
        ys = 1 / complex(row[2], row[3])
        bc = row[4]
        tau = row[8] if row[8] != 0 else 1.0
        tap = tau * np.exp(1j * np.deg2rad(row[9]))
        yff = (ys + 1j * bc / 2) / tau**2
        yft = -ys / np.conj(tap)
        ytf = -ys / tap
        ytt = ys + 1j * bc / 2
        Y[f, f] += yff
        Y[f, t] += yft
        Y[t, f] += ytf
        Y[t, t] += ytt
        br.append((f, t, yff, yft, ytf, ytt, row[5] / base, np.deg2rad(row[11]), np.deg2rad(row[12])))
    for k in range(nb):
        Y[k, k] += complex(bus[k, 4], bus[k, 5]) / base
    return idx, Y, br


def ac_local(path, starts=40, seed=0):
    base, bus, gen, branch, cost = parse(path)
    idx, Y, br = build(base, bus, gen, branch)
    nb, ng = bus.shape[0], gen.shape[0]
    gb = [idx[int(g)] for g in gen[:, 0]]
    pd, qd = bus[:, 2] / base, bus[:, 3] / base

    def unpack(z):
        v = z[:nb] + 1j * z[nb:2 * nb]
        return v, z[2 * nb:2 * nb + ng], z[2 * nb + ng:]

    def obj(z):
        _, pg, _ = unpack(z)
        mw = pg * base
        return float(np.sum(cost[:, 4] * mw**2 + cost[:, 5] * mw + cost[:, 6]))

    def balance(z):
        v, pg, qg = unpack(z)
        s = v * np.conj(Y @ v)
        inj = np.zeros(nb, complex)
        for g in range(ng):
            inj[gb[g]] += pg[g] + 1j * qg[g]
        r = inj - (pd + 1j * qd) - s
        return np.concatenate([r.real, r.imag])

    def ineq(z):
        v, _, _ = unpack(z)
        out = [np.abs(v)**2 - bus[:, 12]**2, bus[:, 11]**2 - np.abs(v)**2]
        for f, t, yff, yft, ytf, ytt, smax, amin, amax in br:
            sf = v[f] * np.conj(yff * v[f] + yft * v[t])
            st = v[t] * np.conj(ytf * v[f] + ytt * v[t])
            if smax > 0:
                out.append(np.array([smax**2 - abs(sf)**2, smax**2 - abs(st)**2]))
            x = v[f] * np.conj(v[t])
            out.append(np.array([x.imag - np.tan(amin) * x.real, np.tan(amax) * x.real - x.imag, x.real]))
        # Reference angle: Im V_ref = 0, Re V_ref >= 0 (enforced below through bounds).
        return np.concatenate(out)

    ref = int(np.argmax(bus[:, 1] == 3))
    bounds = [(-1.2, 1.2)] * (2 * nb)
    bounds[nb + ref] = (0.0, 0.0)
    bounds[ref] = (0.0, 1.2)
    bounds += [(gen[g, 9] / base, gen[g, 8] / base) for g in range(ng)]
    bounds += [(gen[g, 4] / base, gen[g, 3] / base) for g in range(ng)]
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(starts):
        ang = rng.uniform(-0.3, 0.3, nb)
        ang[ref] = 0.0
        mag = rng.uniform(0.95, 1.05, nb)
        z0 = np.concatenate([mag * np.cos(ang), mag * np.sin(ang),
                             rng.uniform(0, 2, ng), rng.uniform(-0.5, 0.5, ng)])
        res = minimize(obj, z0, method="SLSQP", bounds=bounds,
                       constraints=[{"type": "eq", "fun": balance}, {"type": "ineq", "fun": ineq}],
                       options={"maxiter": 1000, "ftol": 1e-12})
        if res.success and np.max(np.abs(balance(res.x))) < 1e-8 and np.min(ineq(res.x)) > -1e-8:
            if best is None or res.fun < best.fun:
                best = res
    return best.fun, unpack(best.x)


def sdp(path):
    base, bus, gen, branch, cost = parse(path)
    idx, Y, br = build(base, bus, gen, branch)
    nb, ng = bus.shape[0], gen.shape[0]
    gb = [idx[int(g)] for g in gen[:, 0]]
    X = cp.Variable((nb, nb), hermitian=True)
    pg = cp.Variable(ng)
    qg = cp.Variable(ng)
    cons = [X >> 0]
    for k in range(nb):
        # S_k = sum_m conj(Y_km) X_km with X = V V^*.
        sk = cp.sum(cp.multiply(np.conj(Y[k, :]), X[k, :]))
        gens = [g for g in range(ng) if gb[g] == k]
        cons += [sum(pg[g] for g in gens) - bus[k, 2] / base == cp.real(sk) if gens else cp.real(sk) == -bus[k, 2] / base,
                 sum(qg[g] for g in gens) - bus[k, 3] / base == cp.imag(sk) if gens else cp.imag(sk) == -bus[k, 3] / base,
                 cp.real(X[k, k]) >= bus[k, 12]**2, cp.real(X[k, k]) <= bus[k, 11]**2]
    for f, t, yff, yft, ytf, ytt, smax, amin, amax in br:
        sf = np.conj(yff) * X[f, f] + np.conj(yft) * X[f, t]
        st = np.conj(ytt) * X[t, t] + np.conj(ytf) * X[t, f]
        if smax > 0:
            cons += [cp.norm(cp.hstack([cp.real(sf), cp.imag(sf)])) <= smax,
                     cp.norm(cp.hstack([cp.real(st), cp.imag(st)])) <= smax]
        cons += [cp.imag(X[f, t]) >= np.tan(amin) * cp.real(X[f, t]),
                 cp.imag(X[f, t]) <= np.tan(amax) * cp.real(X[f, t])]
    cons += [pg >= gen[:, 9] / base, pg <= gen[:, 8] / base, qg >= gen[:, 4] / base, qg <= gen[:, 3] / base]
    mw = pg * base
    objective = cp.sum(cp.multiply(cost[:, 4], cp.square(mw)) + cp.multiply(cost[:, 5], mw) + cost[:, 6])
    prob = cp.Problem(cp.Minimize(objective), cons)
    prob.solve(solver=cp.CLARABEL if "CLARABEL" in cp.installed_solvers() else cp.SCS)
    return prob.value


if __name__ == "__main__":
    path = sys.argv[1]
    f, (v, pg, qg) = ac_local(path)
    print("ac_local", repr(f))
    print("V", v)
    print("Pg", pg, "Qg", qg)
    print("sdp", repr(sdp(path)))
