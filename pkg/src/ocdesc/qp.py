"""Convex QP over the capped simplex.

Solves::

    minimize    0.5 * a' H a - f' a
    subject to  0 <= a_i <= C,  sum(a) = 1

by accelerated projected gradient (FISTA with gradient restarts). Whenever
the iterate's active set looks settled, a short primal active-set refinement
solves the equality-constrained subproblem on the free variables exactly; its
result is accepted only if it passes the KKT test, so refinement changes the
speed of the solver but never the problem being solved.

The inner loops are compiled with numba; the grid searches call this solver
hundreds of thousands of times on small problems.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConvergenceError, InfeasibleError

KKT_TOL = 1e-6
MAX_ITER = 10_000


@njit(cache=True, nogil=True)
def _project(v, C, total):
    n = v.size
    vs = -np.sort(-v)
    csum = np.zeros(n + 1)
    for i in range(n):
        csum[i + 1] = csum[i] + vs[i]
    bps = np.empty(2 * n)
    bps[:n] = v
    bps[n:] = v - C
    bps = -np.sort(-bps)
    # f(tau) = sum(clip(v - tau, 0, C)) is nondecreasing along descending bps
    k1 = 0
    k2 = 0
    prev_b = bps[0]
    prev_f = 0.0
    tau = bps[2 * n - 1]
    for j in range(2 * n):
        b = bps[j]
        while k1 < n and vs[k1] > b:
            k1 += 1
        while k2 < n and vs[k2] - C > b:
            k2 += 1
        fb = (csum[k1] - k1 * b) - (csum[k2] - k2 * (b + C))
        if fb >= total:
            if j == 0 or fb == total:
                tau = b
            else:
                tau = prev_b + (total - prev_f) * (b - prev_b) / (fb - prev_f)
            break
        prev_b = b
        prev_f = fb
    out = np.empty(n)
    for i in range(n):
        x = v[i] - tau
        out[i] = 0.0 if x < 0.0 else (C if x > C else x)
    return out


@njit(cache=True, nogil=True)
def _kkt_gap(a, g, C):
    hi = -np.inf
    lo = np.inf
    for i in range(a.size):
        if a[i] > 0.0 and g[i] > hi:
            hi = g[i]
        if a[i] < C and g[i] < lo:
            lo = g[i]
    if hi == -np.inf or lo == np.inf:
        return 0.0
    return max(0.0, hi - lo)


@njit(cache=True, nogil=True)
def _objective(H, f, a):
    return 0.5 * (a @ (H @ a)) - f @ a


@njit(cache=True, nogil=True)
def _polish_sum(a, C):
    n = a.size
    nfree = 0
    s = 0.0
    for i in range(n):
        if a[i] < 0.0:
            a[i] = 0.0
        elif a[i] > C:
            a[i] = C
        if a[i] > 0.0 and a[i] < C:
            nfree += 1
        s += a[i]
    resid = 1.0 - s
    if nfree > 0 and resid != 0.0:
        for i in range(n):
            if a[i] > 0.0 and a[i] < C:
                a[i] = min(C, max(0.0, a[i] + resid / nfree))
    return a


@njit(cache=True, nogil=True)
def _bound_violation(a, g, free, C, nu):
    worst = -1
    worstv = 0.0
    for i in range(a.size):
        if free[i]:
            continue
        v = 0.0
        if a[i] == 0.0 and g[i] < nu:
            v = nu - g[i]
        elif a[i] == C and g[i] > nu:
            v = g[i] - nu
        if v > worstv:
            worstv = v
            worst = i
    return worst


@njit(cache=True, nogil=True)
def _refine(H, f, C, alpha, max_steps):
    """Primal active-set iterations from the feasible point ``alpha``.

    Returns ``(a, ok)``; ``ok`` is False when the refinement cannot make
    progress, in which case ``a`` is the untouched start point.
    """
    n = alpha.size
    a = alpha.copy()
    free = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        free[i] = a[i] > 0.0 and a[i] < C
    obj = _objective(H, f, a)
    for _ in range(max_steps):
        g = H @ a - f
        m = 0
        for i in range(n):
            if free[i]:
                m += 1
        if m == 0:
            hi = -np.inf
            lo = np.inf
            for i in range(n):
                if a[i] > 0.0 and g[i] > hi:
                    hi = g[i]
                if a[i] < C and g[i] < lo:
                    lo = g[i]
            worst = _bound_violation(a, g, free, C, 0.5 * (hi + lo))
            if worst < 0:
                return a, True
            free[worst] = True
            continue
        F = np.empty(m, dtype=np.int64)
        k = 0
        for i in range(n):
            if free[i]:
                F[k] = i
                k += 1
        K = np.zeros((m + 1, m + 1))
        rhs = np.zeros(m + 1)
        rmax = 1.0
        for p in range(m):
            for q in range(m):
                K[p, q] = H[F[p], F[q]]
            K[p, m] = 1.0
            K[m, p] = 1.0
            rhs[p] = -g[F[p]]
            if abs(rhs[p]) > rmax:
                rmax = abs(rhs[p])
        # pseudo-inverse solve; the residual spans the flat directions
        w, V = np.linalg.eigh(K)
        cut = 1e-12 * max(np.abs(w).max(), 1e-300) * (m + 1)
        coef = V.T @ rhs
        sol = np.zeros(m + 1)
        resid = np.zeros(m + 1)
        for j in range(m + 1):
            if abs(w[j]) > cut:
                sol += (coef[j] / w[j]) * V[:, j]
            else:
                resid += coef[j] * V[:, j]
        ray = np.abs(resid).max() > 1e-8 * rmax
        step_dir = np.empty(m)
        if ray:
            # objective decreases linearly along the residual direction
            dot = 0.0
            for p in range(m):
                step_dir[p] = resid[p]
                dot += resid[p] * g[F[p]]
            if dot >= 0.0:
                return alpha.copy(), False
        else:
            for p in range(m):
                step_dir[p] = sol[p]
        step = np.inf
        blocking = -1
        for p in range(m):
            d = step_dir[p]
            ap = a[F[p]]
            if d < 0.0:
                lim = -ap / d
            elif d > 0.0:
                lim = (C - ap) / d
            else:
                continue
            if lim < step:
                step = lim
                blocking = p
        if not ray and step >= 1.0:
            for p in range(m):
                a[F[p]] += step_dir[p]
            g = H @ a - f
            worst = _bound_violation(a, g, free, C, -sol[m])
            if worst < 0:
                return _polish_sum(a, C), True
            free[worst] = True
        else:
            if blocking < 0 or not np.isfinite(step):
                return alpha.copy(), False
            for p in range(m):
                a[F[p]] += step * step_dir[p]
            idx = F[blocking]
            a[idx] = 0.0 if step_dir[blocking] < 0.0 else C
            free[idx] = False
        new_obj = _objective(H, f, a)
        if new_obj > obj + 1e-12 * max(1.0, abs(obj)):
            return alpha.copy(), False
        obj = new_obj
    return _polish_sum(a, C), True


@njit(cache=True, nogil=True)
def _same(p, q):
    for i in range(p.size):
        if p[i] != q[i]:
            return False
    return True


@njit(cache=True, nogil=True)
def _fista(H, f, C, x, L, thresh, max_iter, refine_steps):
    """Returns ``(alpha, gap, iterations, refined, converged, best, best_gap)``."""
    n = x.size
    y = x.copy()
    t = 1.0
    best = x.copy()
    best_gap = _kkt_gap(x, H @ x - f, C)
    last = np.full(2 * n, -1, dtype=np.int8)
    tried = np.full(2 * n, -1, dtype=np.int8)
    pat = np.empty(2 * n, dtype=np.int8)
    for it in range(1, max_iter + 1):
        gy = H @ y - f
        x_new = _project(y - gy / L, C, 1.0)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        if (y - x_new) @ (x_new - x) > 0.0:
            t_new = 1.0
            y = x_new.copy()
        else:
            y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x = x_new
        t = t_new
        if it % 10 == 0 or it == max_iter:
            g = H @ x - f
            gap = _kkt_gap(x, g, C)
            if gap < best_gap:
                best_gap = gap
                best = x.copy()
            if gap <= thresh:
                # snap onto the exact face solution when possible
                r, ok = _refine(H, f, C, x, refine_steps)
                if ok:
                    rg = _kkt_gap(r, H @ r - f, C)
                    if rg <= gap:
                        return r, rg, it, True, True, r, rg
                return x, gap, it, False, True, x, gap
            for i in range(n):
                pat[i] = 1 if x[i] > 0.0 else 0
                pat[n + i] = 1 if x[i] < C else 0
            settled = _same(pat, last) and not _same(pat, tried)
            last[:] = pat
            if settled:
                tried[:] = pat
                r, ok = _refine(H, f, C, x, refine_steps)
                if ok:
                    rg = _kkt_gap(r, H @ r - f, C)
                    if rg <= thresh:
                        return r, rg, it, True, True, r, rg
    return x, best_gap, max_iter, False, False, best, best_gap


@njit(cache=True, nogil=True)
def _solve(H, f, C, x, warm, L, tol, max_iter):
    """Solver driver shared by the Python wrapper and compiled callers.

    ``x`` must be feasible. ``L <= 0`` requests a Lipschitz bound from the
    spectrum of ``H``. Returns ``(alpha, gap, iterations, refined, converged)``;
    on failure ``alpha`` is the best iterate seen.
    """
    n = x.size
    dmax = 1.0
    for i in range(n):
        if abs(H[i, i]) > dmax:
            dmax = abs(H[i, i])
    thresh = tol * dmax
    refine_steps = min(3 * n + 10, 60)
    gap = _kkt_gap(x, H @ x - f, C)
    if gap <= thresh:
        return x, gap, 0, False, True
    if warm:
        r, ok = _refine(H, f, C, x, refine_steps)
        if ok:
            rg = _kkt_gap(r, H @ r - f, C)
            if rg <= thresh:
                return r, rg, 0, True, True
    if L <= 0.0:
        L = np.linalg.eigvalsh(H)[-1]
    L = max(L, 1e-12)
    a, gap, its, refined, converged, best, best_gap = _fista(H, f, C, x, L, thresh, max_iter,
                                                             refine_steps)
    if converged:
        return a, gap, its, refined, True
    return best, best_gap, its, False, False


def project_capped_simplex(v, C, total=1.0):
    """Euclidean projection of ``v`` onto ``{0 <= a <= C, sum(a) = total}``."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    if C * v.size < total - 1e-12:
        raise InfeasibleError(f"C={C} too small for {v.size} variables")
    return _project(v, float(C), float(total))


def kkt_gap(alpha, g, C):
    """Maximal violating-pair gap; zero exactly at a KKT point.

    At an optimum there is a multiplier ``nu`` with ``g_i >= nu`` where
    ``alpha_i < C`` and ``g_i <= nu`` where ``alpha_i > 0``.
    """
    return float(_kkt_gap(np.ascontiguousarray(alpha, dtype=np.float64),
                          np.ascontiguousarray(g, dtype=np.float64), float(C)))


@dataclass
class QPResult:
    alpha: np.ndarray
    gap: float
    iterations: int
    refined: bool


def solve_capped_simplex_qp(H, f, C, init=None, tol=KKT_TOL, max_iter=MAX_ITER,
                            lipschitz=None):
    """Minimize ``0.5 a'Ha - f'a`` over the capped simplex.

    ``tol`` bounds :func:`kkt_gap` relative to ``max(1, max|H_ii|)``. A
    feasible ``init`` is used as is (warm start). Raises
    :class:`ConvergenceError` carrying the best iterate as a :class:`QPResult`
    when ``max_iter`` iterations do not reach ``tol``.
    """
    H = np.ascontiguousarray(H, dtype=np.float64)
    f = np.ascontiguousarray(f, dtype=np.float64)
    C = float(C)
    n = f.size
    if C * n < 1.0 - 1e-12:
        raise InfeasibleError(f"infeasible box: C={C} < 1/N={1.0 / n:.6g}")
    if init is None:
        x = _project(np.full(n, 1.0 / n), C, 1.0)
    else:
        x = np.array(init, dtype=np.float64)
        if x.min() < 0 or x.max() > C or abs(x.sum() - 1.0) > 1e-12:
            x = _project(x, C, 1.0)
    if lipschitz is None:
        lipschitz = 0.0 if n <= 1500 else float(np.abs(H).sum(1).max())
    a, gap, its, refined, converged = _solve(H, f, C, x, init is not None, float(lipschitz),
                                             float(tol), int(max_iter))
    if converged:
        return QPResult(a, float(gap), int(its), bool(refined))
    thresh = tol * max(1.0, float(np.abs(np.diag(H)).max()))
    raise ConvergenceError(
        f"QP did not reach KKT gap {thresh:.3g} in {max_iter} iterations (best {gap:.3g})",
        best=QPResult(a, float(gap), int(its), False))
