"""Independent reference computations used by the tests."""
import itertools

import numpy as np


def simplex_grid(n, steps):
    """All points of the probability simplex with coordinates in multiples of 1/steps."""
    pts = []
    for bars in itertools.combinations(range(steps + n - 1), n - 1):
        prev = -1
        p = []
        for b in bars:
            p.append(b - prev - 1)
            prev = b
        p.append(steps + n - 2 - prev)
        pts.append(p)
    return np.array(pts, dtype=np.float64) / steps


def brute_force_simplex(objective, n, C, coarse=None, min_step=1e-7, radius=3):
    """Minimize ``objective`` (vectorized over rows) on ``{0 <= a <= C, sum a = 1}``.

    Exhaustive search on a coarse simplex grid, then repeated local lattice
    searches around the incumbent with a shrinking step (zoom refinement).
    """
    if n == 1:
        a = np.ones((1, 1))
        return a[0], float(objective(a)[0])
    coarse = coarse or {2: 1000, 3: 200, 4: 60, 5: 30, 6: 20}.get(n, 12)
    P = simplex_grid(n, coarse)
    P = P[(P <= C + 1e-12).all(1)]
    # the uniform point is always feasible when C >= 1/n
    P = np.vstack([P, np.full((1, n), 1.0 / n)])
    vals = objective(P)
    best = P[np.argmin(vals)].copy()
    fbest = float(vals.min())
    h = 1.0 / coarse
    offs = np.array(list(itertools.product(range(-radius, radius + 1), repeat=n - 1)), dtype=np.float64)
    while h > min_step:
        cand = np.empty((offs.shape[0], n))
        cand[:, :-1] = best[:-1] + h * offs
        cand[:, -1] = 1.0 - cand[:, :-1].sum(1)
        ok = (cand >= -1e-15).all(1) & (cand <= C + 1e-15).all(1)
        cand = np.clip(cand[ok], 0.0, C)
        v = objective(cand)
        j = int(np.argmin(v))
        if v[j] < fbest - 1e-15:
            best, fbest = cand[j].copy(), float(v[j])
        else:
            h /= 2.0
    return best, fbest


def svdd_dual_oracle(G, C):
    """Maximum of ``sum a_i G_ii - a'Ga`` by brute force; returns ``(alpha, value)``."""
    dg = np.diag(G)
    f = lambda P: -(P @ dg - np.einsum("ij,jk,ik->i", P, G, P))
    a, v = brute_force_simplex(f, G.shape[0], C)
    return a, -v


def ocsvm_oracle(G, nu):
    n = G.shape[0]
    C = 1.0 / (nu * n)
    f = lambda P: 0.5 * np.einsum("ij,jk,ik->i", P, G, P)
    return brute_force_simplex(f, n, C)


def lagrangian_terms(Q, X, alphas, lam, beta_signed):
    """Term-by-term double loop evaluation of the subspace Lagrangian."""
    N = X.shape[1]
    Z = [Q @ X[:, i] for i in range(N)]
    total = 0.0
    for i in range(N):
        total += alphas[i] * float(Z[i] @ Z[i])
    for i in range(N):
        for j in range(N):
            total -= alphas[i] * alphas[j] * float(Z[i] @ Z[j])
    psi = 0.0
    for i in range(N):
        for j in range(N):
            psi += lam[i] * lam[j] * float(Z[i] @ Z[j])
    return total + beta_signed * psi


def inverse_sqrt_spd(S):
    w, V = np.linalg.eigh(S)
    return V @ np.diag(1.0 / np.sqrt(w)) @ V.T


def gaussian_gram(X, sigma):
    N = X.shape[1]
    G = np.empty((N, N))
    for i in range(N):
        for j in range(N):
            G[i, j] = np.exp(-np.sum((X[:, i] - X[:, j]) ** 2) / (2 * sigma ** 2))
    return G
