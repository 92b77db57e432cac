"""Mixed (s, q)-summable norm.

``inf ||tau||_r * ||x0||_{w,s}`` over factorizations ``x_j = tau_j x0_j`` with
``1/r = 1/q - 1/s``.  Only ``tau`` on the support of ``x`` matters.

Upper bounds come from explicit factorizations.  Lower bounds come from the
dual side: for any probability weights ``w`` on functionals ``a_k`` in the dual
ball, ``G(w) = sum_j (sum_k w_k |a_k(x_j)|^s)^(q/s)`` satisfies
``G(w)^(1/q) <= mixed norm`` (Hoelder with exponents ``r/q`` and ``s/q``).
``G`` is concave, and at its maximizer the factorization
``tau_j = c_j^(1/(r+s))``, ``c_j = sum_k w_k |a_k(x_j)|^s``, closes the gap.
The engine maximizes ``G``, builds that factorization, then runs a multi-start
descent in ``log tau`` and keeps the best factorization found.
"""
from __future__ import annotations

import clarabel
import numpy as np
from scipy import sparse

from ..nseq import NSeq
from ..optim import DEFAULT_BUDGET, OptBudget, outer_rounds, best_index, random_unit_rows
from ..spaces import INF, Exponent, FiniteSpace, InputError, ball_vertices, lp_norms, norming_vectors
from .base import MixedFactorization, Mode, NormResult, support_rows
from .weak import ascent, weak_matrix, weak_norm

CUT_ROUNDS = 10
CUT_BATCH = 8
DESCENT_ITERATIONS = 300


def multiplier_exponent(s: float, q: float) -> Exponent:
    """``r`` with ``1/r = 1/q - 1/s``; INF when ``s == q``."""
    if s == q:
        return INF
    return 1.0 / (1.0 / q - 1.0 / s)


def _effective_q(r: Exponent, s: float) -> float:
    return s if r is INF else 1.0 / (1.0 / r + 1.0 / s)


def factorization_value(X: np.ndarray, tau: np.ndarray, space: FiniteSpace, r, s, budget,
                        seeds=(), salt=0):
    """``||tau||_r * ||X / tau||_{w,s}`` and the weak-norm mode used."""
    w, phi, mode, _, _ = weak_matrix(X / tau[:, None], space, s, budget=budget, seeds=seeds, salt=salt)
    return float(lp_norms(tau, r)) * w, phi, mode


def _dual_weights(P: np.ndarray, r, s):
    """Weights on the atoms (columns of ``P``) from the convex program in ``u = tau^-s``.

    ``min sum_j u_j^(-r/s)`` s.t. ``P^T u <= 1``; the multipliers of the linear
    rows, normalized, are (near) maximizers of ``G``.  Only the weights are
    used, and ``G`` is re-evaluated from them, so solver error cannot inflate
    the certificate.
    """
    M, K = P.shape
    P = P / max(float(P.max()), 1e-300)
    alpha = 1.0 / (1.0 + r / s)
    # variables (u, z); power cones (z_j, u_j, 1): z^alpha u^(1-alpha) >= 1
    rows = [np.arange(K).repeat(M), K + 3 * np.arange(M), K + 3 * np.arange(M) + 1]
    cols = [np.tile(np.arange(M), K), M + np.arange(M), np.arange(M)]
    vals = [P.T.ravel(), -np.ones(M), -np.ones(M)]
    A = sparse.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(K + 3 * M, 2 * M))
    b = np.zeros(K + 3 * M)
    b[:K] = 1.0
    b[K + 2::3] = 1.0
    q = np.concatenate([np.zeros(M), np.ones(M)])
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    cones = [clarabel.NonnegativeConeT(K)] + [clarabel.PowerConeT(alpha)] * M
    sol = clarabel.DefaultSolver(sparse.csc_matrix((2 * M, 2 * M)), q, A, b, cones, settings).solve()
    lam = np.clip(np.asarray(sol.z, dtype=float)[:K], 0.0, None)
    if not np.all(np.isfinite(lam)) or lam.sum() <= 0:
        return np.full(K, 1.0 / K)
    return lam / lam.sum()


def _G(P, w, rho):
    return float(np.sum((P @ w) ** rho))


def _descent(P: np.ndarray, tau0: np.ndarray, r, s, iterations: int, tol: float):
    """Minimize ``log ||tau||_r + (1/s) log max_k sum_j P_jk tau_j^-s`` over ``log tau``."""
    sig = np.log(tau0)

    def f_grad(sig):
        sig = sig - sig.max()
        er = np.exp(r * sig)
        es = np.exp(-s * sig)
        cols = es @ P
        k = best_index(cols)
        W = cols[k]
        val = np.log(er.sum()) / r + np.log(W) / s
        g = er / er.sum() - P[:, k] * es / W
        return val, g

    val, g = f_grad(sig)
    step = 0.5
    for _ in range(iterations):
        gn = np.linalg.norm(g)
        if gn < tol or step < 1e-12:
            break
        cand = sig - step * g / gn
        cval, cg = f_grad(cand)
        if cval < val - 1e-15:
            sig, val, g = cand, cval, cg
            step *= 1.3
        else:
            step *= 0.5
    return np.exp(sig - sig.max())


def _surrogate(P, tau, r, s) -> float:
    """``||tau||_r * max_k (sum_j P_jk tau_j^-s)^(1/s)``: the objective over the current atoms."""
    return float(lp_norms(tau, r) * np.max(tau ** -s @ P) ** (1.0 / s))


def _atoms_for(X: np.ndarray, space: FiniteSpace, s: float, budget: OptBudget):
    verts = ball_vertices(space.dim, space.dual_exponent, half=True)
    if verts is not None:
        return verts, True
    atoms = [np.eye(space.dim)]
    atoms.append(norming_vectors(X, space.exponent))
    _, phi, _, _, _ = weak_matrix(X, space, s, budget=budget)
    atoms.append(phi[None, :])
    atoms.append(random_unit_rows(budget.rng(0x313), 2 * space.dim, space.dim, space.dual_exponent))
    A = np.concatenate(atoms)
    return A[np.any(A != 0, axis=1)], False


def _tau_from_weights(P, w, r, s):
    c = P @ w
    c = np.where(c > 0, c, c[c > 0].min() if np.any(c > 0) else 1.0)
    return c ** (1.0 / (r + s))


def mixed_matrix(X: np.ndarray, space: FiniteSpace, s: float, r, budget: OptBudget, seeds=()):
    """Core of the general case on nonzero rows; returns ``(upper, lower, tau, mode_meta)``."""
    rho = r / (r + s)  # = q/s
    A, polytope = _atoms_for(X, space, s, budget)
    qe = _effective_q(r, s)
    lower = 0.0
    converged = polytope
    tau_dual = None
    rounds = 1 if polytope else outer_rounds(budget, CUT_ROUNDS)
    for rnd in range(rounds):
        P = np.abs(X @ A.T) ** s
        w = _dual_weights(P, r, s)
        lower = max(lower, _G(P, w, rho) ** (1.0 / qe))
        tau_dual = _tau_from_weights(P, w, r, s)
        if polytope:
            break
        # price new functionals against the factorization the weights suggest
        Y = X / tau_dual[:, None]
        n, _, _, vals, pts = ascent(Y, space, s, budget, seeds=list(A), salt=rnd, return_all=True)
        current = float(np.max(lp_norms((Y @ A.T).T, s)))
        if n <= current * (1.0 + 1e-9):
            converged = True
            break
        order = np.argsort(-vals, kind="stable")
        new = [pts[k] for k in order[:CUT_BATCH] if vals[k] > current * (1.0 + 1e-9)]
        A = np.concatenate([A, np.array(new)])

    P = np.abs(X @ A.T) ** s
    norms = lp_norms(X, space.exponent)
    # tau = 1 and tau = ||x_j||^(1 - q/s) realize the weak and strong envelopes
    envelope = [np.ones(len(X)), norms ** (1.0 - rho)]
    starts = envelope + [norms ** t for t in (0.5, rho, 1.0)] + [tau_dual]
    for sd in seeds or ():
        sd = np.asarray(sd, dtype=float)
        if sd.shape == (len(X),) and np.all(sd > 0):
            starts.append(sd)
    iters = min(budget.iterations, DESCENT_ITERATIONS)
    descended = [_descent(P, t0, r, s, iters, 1e-10) for t0 in starts]
    surrogate = np.array([_surrogate(P, t, r, s) for t in descended])
    picks = np.argsort(surrogate, kind="stable")[:2]
    candidates = envelope + [descended[k] for k in picks] + starts[len(envelope) + 4:]
    best = None
    for k, cand in enumerate(candidates):
        val, _, mode = factorization_value(X, cand, space, r, s, budget, seeds=list(A), salt=k)
        if best is None or val < best[0]:
            best = (val, cand, mode)
    upper, tau, wmode = best
    # the lower certificate can never exceed a valid upper bound
    return upper, min(lower, upper), tau, converged, wmode


def _factorization(x: NSeq, idx, tau_rows, value) -> MixedFactorization:
    tau = np.zeros(x.size)
    tau[idx] = tau_rows
    flat = x.flat()
    x0 = np.zeros_like(flat)
    x0[idx] = flat[idx] / tau_rows[:, None]
    return MixedFactorization(NSeq.scalars(tau.reshape(x.bounds)),
                              NSeq(x0.reshape(x.entries.shape), x.space), float(value))


def _seed_rows(seeds, idx, x: NSeq):
    out = []
    for sd in seeds or ():
        if isinstance(sd, MixedFactorization):
            sd = sd.tau.values()
        t = np.asarray(sd, dtype=float).reshape(-1)
        if t.shape != (x.size,):
            raise InputError(f"mixed seed with {t.size} multipliers for {x.size} entries")
        out.append(t[idx])
    return out


def mixed_norm(x: NSeq, s, q, budget: OptBudget = DEFAULT_BUDGET, seeds=()) -> NormResult:
    """Mixed (s, q)-summable norm, ``1 <= q <= s < inf``.

    Returns an UPPER_BOUND attained by the witness factorization, with a dual
    lower certificate in ``lower``.  For ``s == q`` the norm is the weak
    ``l_q`` norm and the weak engine's result is passed through.
    """
    s, q = float(s), float(q)
    if not (1.0 <= q <= s < float("inf")):
        raise InputError(f"mixed norm needs 1 <= q <= s < inf, got s={s}, q={q}")
    r = multiplier_exponent(s, q)
    X, idx = support_rows(x)
    meta = {"r": "inf" if r is INF else r}
    if r is INF:
        wres = weak_norm(x, s, budget=budget)
        tau = np.ones(len(X))
        fac = _factorization(x, idx, tau, wres.value)
        return NormResult(wres.value, wres.mode, fac, wres.converged, wres.lower, wres.upper,
                          meta={**meta, "engine": "weak-reduction", **wres.meta})
    if len(X) == 0:
        return NormResult(0.0, Mode.EXACT, _factorization(x, idx, np.ones(0), 0.0),
                          meta={**meta, "engine": "zero"})
    if len(X) == 1:
        v = float(lp_norms(X[0], x.space.exponent))
        return NormResult(v, Mode.EXACT, _factorization(x, idx, np.ones(1), v),
                          meta={**meta, "engine": "single-entry"})
    if x.space.dim == 1:
        qe = _effective_q(r, s)
        a = np.abs(X[:, 0])
        v = float(lp_norms(a, qe))
        tau = (a / v) ** (qe / r)
        return NormResult(v, Mode.EXACT, _factorization(x, idx, tau, v),
                          meta={**meta, "engine": "scalar-hoelder"})
    upper, lower, tau, converged, wmode = mixed_matrix(X, x.space, s, r, budget,
                                                      _seed_rows(seeds, idx, x))
    meta.update(engine="dual-certified-descent", weak_mode=wmode.value)
    return NormResult(upper, Mode.UPPER_BOUND, _factorization(x, idx, tau, upper), converged,
                      lower=lower, upper=upper, meta=meta)
