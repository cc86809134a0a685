"""Independent dense reference values for the Rust test-suite.

Builds every operator from scratch with numpy (no shared code with the
crate) and prints the numbers that the integration tests freeze.

    python3 tools/oracle.py
"""

import itertools

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar


def orb(i, s):
    return 2 * i + s


def apply(ops, bits):
    """Apply (orbital, dagger) ladder ops right to left; None if annihilated."""
    sign = 1
    for p, dag in reversed(ops):
        occ = (bits >> p) & 1
        if dag == bool(occ):
            return None
        if bin(bits & ((1 << p) - 1)).count("1") % 2:
            sign = -sign
        bits ^= 1 << p
    return sign, bits


def matrix(terms, states):
    idx = {s: k for k, s in enumerate(states)}
    m = np.zeros((len(states), len(states)))
    for coef, ops in terms:
        for k, s in enumerate(states):
            r = apply(ops, s)
            if r is not None and r[1] in idx:
                m[idx[r[1]], k] += coef * r[0]
    return m


def num(p):
    return [(p, True), (p, False)]


def hop(i, j, s):
    return [(orb(i, s), True), (orb(j, s), False)]


def sector(n):
    out = []
    for bits in range(1 << (2 * n)):
        up = sum((bits >> orb(i, 0)) & 1 for i in range(n))
        dn = sum((bits >> orb(i, 1)) & 1 for i in range(n))
        if up == n // 2 and dn == n // 2:
            out.append(bits)
    return out


def bonds(n):
    if n == 2:
        return [(0, 1)]
    return sorted({tuple(sorted((i, (i + 1) % n))) for i in range(n)})


def projector(i, j, s, x):
    """Channel projector on spin s: x bit0 = site i occupied, bit1 = site j."""
    a = [(1.0, num(orb(i, s)))] if x in (1, 3) else [(1.0, []), (-1.0, num(orb(i, s)))]
    b = [(1.0, num(orb(j, s)))] if x in (2, 3) else [(1.0, []), (-1.0, num(orb(j, s)))]
    return [(ca * cb, oa + ob) for ca, oa in a for cb, ob in b]


def hubbard(n, t, mu, u, states):
    h0, v, s_gen = [], [], []
    for i in range(n):
        for s in range(2):
            h0.append((mu[i], num(orb(i, s))))
        h0.append((u[i], num(orb(i, 0)) + num(orb(i, 1))))
    for i, j in bonds(n):
        for s in range(2):
            v += [(-t, hop(i, j, s)), (-t, hop(j, i, s))]
    for i, j in bonds(n):
        for a, b in [(i, j), (j, i)]:
            dmu = mu[a] - mu[b]
            dens = [dmu, dmu + u[a], dmu - u[b], dmu + u[a] - u[b]]
            lam = [(-t / d if d != 0 else 0.0) for d in dens]
            for s in range(2):
                for x in range(4):
                    for cp, op in projector(a, b, 1 - s, x):
                        c = 0.5 * lam[x] * cp
                        s_gen += [(c, op + hop(a, b, s)), (-c, op + hop(b, a, s))]
    return matrix(h0, states), matrix(v, states), matrix(s_gen, states)


def argmin(f, lo, hi):
    grid = np.linspace(lo, hi, 241)
    vals = [f(x) for x in grid]
    k = int(np.argmin(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    r = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    return r.x, r.fun


def heisenberg_embedded(n, states):
    configs = [c for c in range(1 << n) if bin(c).count("1") == n // 2]
    idx = {c: k for k, c in enumerate(configs)}
    h = np.zeros((len(configs), len(configs)))
    for k, c in enumerate(configs):
        for i, j in bonds(n):
            if ((c >> i) & 1) == ((c >> j) & 1):
                h[k, k] += 0.25
            else:
                h[k, k] -= 0.25
                h[idx[c ^ (1 << i) ^ (1 << j)], k] += 0.5
    w, vecs = np.linalg.eigh(h)
    g = vecs[:, 0]
    out = np.zeros(len(states))
    sidx = {s: k for k, s in enumerate(states)}
    for c, a in zip(configs, g):
        bits = sum(1 << orb(i, 0 if (c >> i) & 1 else 1) for i in range(n))
        out[sidx[bits]] = a
    return w[0], out


def dimer_report():
    st = sector(2)  # [3, 6, 9, 12]
    p = np.diag([0.0, 1.0, 1.0, 0.0])
    q = np.eye(4) - p
    heis = np.array([0.0, -1.0, 1.0, 0.0]) / np.sqrt(2)
    ionic_right = np.array([0.0, 0.0, 0.0, 1.0])  # |0011>
    for u in [0.5, 4.0, 20.0]:
        h0, v, s = hubbard(2, 1.0, [1.0, -1.0], [u, u], st)
        h = h0 + v

        def hb(th):
            return expm(th * s) @ h @ expm(-th * s)

        tx, _ = argmin(lambda th: np.linalg.norm(p @ hb(th) @ q + q @ hb(th) @ p), 0.0, 1.5)
        th, eh = argmin(lambda th: heis @ hb(th) @ heis, 0.0, 1.5)
        ti, ei = argmin(lambda th: ionic_right @ hb(th) @ ionic_right, 0.0, 1.5)
        print(f"tilted U={u}: theta_X={tx:.10f} theta_heis={th:.10f} E_heis={eh:.12f} "
              f"theta_ionic={ti:.10f} E_ionic={ei:.12f} E_heis@theta_X={heis @ hb(tx) @ heis:.12f}")
        print(f"   spectrum={np.round(np.linalg.eigvalsh(h), 12).tolist()}")


def ring_report():
    for n, u in [(4, 4.0), (4, 8.0), (6, 4.0)]:
        st = sector(n)
        h0, v, s = hubbard(n, 1.0, [0.0] * n, [u] * n, st)
        h = h0 + v
        e_spin, phi = heisenberg_embedded(n, st)
        e_exact = np.linalg.eigvalsh(h)[0]

        def energy(th):
            psi = expm(-th * s) @ phi
            return psi @ h @ psi

        th, e = argmin(energy, 0.0, 1.2)
        print(f"ring N={n} U={u}: E_spin={e_spin:.12f} E_exact={e_exact:.12f} "
              f"E(1)={energy(1.0):.12f} theta*={th:.10f} E(theta*)={e:.12f}")


def main():
    dimer_report()
    ring_report()


if __name__ == "__main__":
    main()
