"""Mid p-summable norm.

``sup (sum_c sum_j |phi_c(x_j)|^p)^(1/p)`` over finite families ``(phi_c)`` in
``E'`` whose weak ``l_p`` norm is at most one.

Writing ``phi_c = nu_c^(1/p) a_c`` with fixed directions ``a_c`` makes both the
objective (to the power p) and every constraint ``sum_c |phi_c(e)|^p <= 1``
linear in the weights ``nu``.  The engine therefore solves a linear program
over a growing set of directions (column generation), with one constraint per
vertex of the unit ball of ``E`` when that ball is a polytope and cutting
planes otherwise.  The family is pruned to at most ``trunc`` functionals and
rescaled by its independently computed weak norm.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from ..nseq import NSeq
from ..optim import DEFAULT_BUDGET, OptBudget, outer_rounds, normalize_rows, sphere_ascent
from ..spaces import FiniteSpace, InputError, as_exponent, ball_vertices, lp_norms, norming_vectors
from .base import DEFAULT_MID_TRUNC, Mode, NormResult, support_rows
from .weak import ascent, weak_matrix

PRICING_ROUNDS = 25
CUT_ROUNDS = 5
COLUMN_BATCH = 16
PRICE_TOL = 1e-5
STALL_ROUNDS = 3
#: largest number of sign patterns for the exact p = 1 program
PATTERN_LIMIT = 64


def family_objective(X: np.ndarray, F: np.ndarray, p: float) -> float:
    """``(sum_c ||X phi_c||_p^p)^(1/p)`` for the rows ``phi_c`` of ``F``."""
    if len(X) == 0 or len(F) == 0:
        return 0.0
    return float(lp_norms((X @ F.T).ravel(), p))


def family_norm(F: np.ndarray, space: FiniteSpace, p: float, budget: OptBudget, salt=0):
    """Weak ``l_p`` norm of the family in ``E'``; returns ``(value, e, mode)``."""
    value, e, mode, _, _ = weak_matrix(F, space.dual(), p, budget=budget, salt=salt)
    return value, e, mode


def _pow(v, p):
    return np.abs(v) ** p


def _solve_lp(f: np.ndarray, G: np.ndarray):
    """max ``f . nu`` s.t. ``G nu <= 1``, ``nu >= 0``; returns ``(nu, duals)`` or None."""
    res = linprog(-f, A_ub=G, b_ub=np.ones(len(G)), bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    return res.x, -res.ineqlin.marginals


def _price(X, Psi, rho, p, budget: OptBudget, salt, tol):
    """Directions with reduced cost ``||X a||_p^p - sum_k rho_k |a.psi_k|^p`` above ``tol``."""
    d = X.shape[1]
    if p == 2.0:
        Q = X.T @ X - (Psi.T * rho) @ Psi
        w, v = np.linalg.eigh(Q)
        order = np.argsort(-w, kind="stable")
        return [(float(w[k]), v[:, k]) for k in order if w[k] > tol]

    def fun_grad(A):
        Y = A @ X.T
        Z = A @ Psi.T
        val = _pow(Y, p).sum(axis=1) - (_pow(Z, p) * rho).sum(axis=1)
        gy = p * np.sign(Y) * np.abs(Y) ** (p - 1.0)
        gz = p * np.sign(Z) * np.abs(Z) ** (p - 1.0) * rho
        return val, gy @ X - gz @ Psi

    rng = budget.rng(0x41D, salt)
    starts = np.concatenate([
        normalize_rows(X, 2.0),
        np.eye(d),
        rng.standard_normal((max(4, budget.starts // 4), d)),
    ])
    starts = starts[np.any(starts != 0, axis=1)]
    A, val = sphere_ascent(fun_grad, starts, min(budget.iterations, 200), budget.tolerance)
    order = np.argsort(-val, kind="stable")
    return [(float(val[k]), A[k]) for k in order if val[k] > tol]


def _distinct(a, pool, tol=1e-9):
    """True if the unit vector ``a`` is not +-parallel to a row of ``pool``."""
    if len(pool) == 0:
        return True
    return bool(np.all(np.abs(np.asarray(pool) @ a) < 1.0 - tol))


def _column_generation(X, Psi, atoms, p, budget, salt):
    """Optimize weights over directions ``atoms`` subject to the rows of ``Psi``."""
    atoms = [a / np.linalg.norm(a) for a in atoms if np.any(a)]
    converged = False
    nu = None
    history = []
    for rnd in range(outer_rounds(budget, PRICING_ROUNDS, per=20)):
        Amat = np.array(atoms)
        f = _pow(X @ Amat.T, p).sum(axis=0)
        G = _pow(Psi @ Amat.T, p)
        sol = _solve_lp(f, G)
        if sol is None:
            break
        nu, rho = sol
        obj = float(f @ nu)
        tol = PRICE_TOL * max(1.0, obj)
        history.append(obj)
        # degenerate duals can keep pricing columns in that never move the
        # objective; stop once it has been flat for a few rounds
        if len(history) > STALL_ROUNDS and history[-1] - history[-1 - STALL_ROUNDS] <= tol:
            converged = True
            break
        added = 0
        for _, a in _price(X, Psi, rho, p, budget, salt * 1000 + rnd, tol):
            a = a / np.linalg.norm(a)
            if _distinct(a, atoms):
                atoms.append(a)
                added += 1
            if added >= COLUMN_BATCH:
                break
        if added == 0:
            converged = True
            break
    if nu is None:
        return np.zeros((0, X.shape[1])), False
    Amat = np.array(atoms[: len(nu)])
    keep = nu > 0
    return (nu[keep] ** (1.0 / p))[:, None] * Amat[keep], converged


def _all_patterns(M: int) -> np.ndarray:
    return np.array([(1.0,) + tuple(1.0 - 2.0 * ((k >> b) & 1) for b in range(M - 1))
                     for k in range(2 ** (M - 1))])


def _patterns_near(X: np.ndarray, F: np.ndarray, limit: int) -> np.ndarray:
    """Sign patterns of the family on the support rows plus their single flips."""
    base = []
    for col in np.sign(X @ F.T).T:
        col = np.where(col == 0, 1.0, col)
        base.append(col * col[0])
    seen, out = set(), []

    def add(pat):
        key = tuple(pat)
        if key not in seen and len(out) < limit:
            seen.add(key)
            out.append(pat)

    for pat in base:
        add(pat)
    for pat in base:
        for j in range(len(pat)):
            q = pat.copy()
            q[j] = -q[j]
            add(q * q[0])
    return np.array(out)


def _sign_pattern_lp(X: np.ndarray, verts: np.ndarray, patterns: np.ndarray | None = None):
    """Exact optimal family for ``p = 1`` when the unit ball of ``E`` is a polytope.

    Functionals whose values on the support rows share a sign pattern can be
    merged without leaving the feasible set, so one functional per pattern
    ``sigma`` suffices and the objective becomes ``sum_sigma phi_sigma(y_sigma)``
    with ``y_sigma = sum_j sigma_j x_j``.  With auxiliaries ``t >= |phi(v)|``
    per vertex this is a linear program.  Restricting ``patterns`` to a subset
    still gives a feasible family (a lower bound).  Returns the family or None.
    """
    M, d = X.shape
    if patterns is None:
        patterns = _all_patterns(M)
    Y = patterns @ X
    K, V = len(Y), len(verts)
    nphi = K * d
    c = np.concatenate([-Y.ravel(), np.zeros(K * V)])
    rows = []
    for k in range(K):
        for v in range(V):
            for sign in (1.0, -1.0):
                row = np.zeros(nphi + K * V)
                row[k * d:(k + 1) * d] = sign * verts[v]
                row[nphi + k * V + v] = -1.0
                rows.append(row)
    A_sign = np.array(rows)
    A_sum = np.zeros((V, nphi + K * V))
    for v in range(V):
        A_sum[v, nphi + v::V] = 1.0
    A = np.vstack([A_sign, A_sum])
    b = np.concatenate([np.zeros(len(A_sign)), np.ones(V)])
    bounds = [(None, None)] * nphi + [(0, None)] * (K * V)
    res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    F = res.x[:nphi].reshape(K, d)
    return F[np.any(np.abs(F) > 1e-14, axis=1)]


def _prune(F, X, p, trunc):
    if len(F) <= trunc:
        return F
    contrib = _pow(X @ F.T, p).sum(axis=0)
    order = np.argsort(-contrib, kind="stable")[:trunc]
    return F[np.sort(order)]


def _certify(F, X, space, p, budget, salt=0):
    if len(F) == 0:
        return 0.0, F
    n, _, _ = family_norm(F, space, p, budget, salt)
    if n <= 0:
        return 0.0, F
    return family_objective(X, F, p) / n, F / n


def _seed_families(seeds, d):
    out = []
    for s in seeds or ():
        F = np.atleast_2d(np.asarray(s, dtype=float))
        if F.shape[1] != d:
            raise InputError(f"mid seed family with rows of length {F.shape[1]}, expected {d}")
        out.append(F[np.any(F != 0, axis=1)])
    return out


def mid_norm(x: NSeq, p, trunc: int = DEFAULT_MID_TRUNC, budget: OptBudget = DEFAULT_BUDGET,
             seeds=()) -> NormResult:
    """Mid p-summable norm with families of at most ``trunc`` functionals.

    The witness is the family as an array of shape ``(k, dim)``, ``k <= trunc``.
    The single functional found by the weak engine is always a candidate, so
    the result is never below the weak norm.
    """
    p = as_exponent(p)
    if not isinstance(p, float):
        raise InputError("mid norm needs a finite p")
    if int(trunc) != trunc or trunc < 1:
        raise InputError(f"mid truncation must be a positive integer, got {trunc}")
    trunc = int(trunc)
    space = x.space
    d = space.dim
    X, _ = support_rows(x)
    meta = {"trunc": trunc}
    if len(X) == 0:
        return NormResult(0.0, Mode.EXACT, np.zeros((1, d)), meta={**meta, "engine": "zero"})
    if d == 1:
        return NormResult(float(lp_norms(X[:, 0], p)), Mode.EXACT, np.ones((1, 1)),
                          meta={**meta, "engine": "scalar-duality"})
    if len(X) == 1:
        phi = norming_vectors(X, space.exponent)
        return NormResult(float(lp_norms(X[0], space.exponent)), Mode.EXACT, phi,
                          meta={**meta, "engine": "single-entry"})
    if space.exponent == 2.0 and p == 2.0:
        _, sv, vt = np.linalg.svd(X, full_matrices=False)
        k = min(trunc, len(sv))
        return NormResult(float(np.sqrt(np.sum(sv[:k] ** 2))), Mode.EXACT, vt[:k].copy(),
                          meta={**meta, "engine": "spectral"})

    wval, wphi, _, _, _ = weak_matrix(X, space, p, budget=budget)
    atoms = [wphi]
    atoms.extend(norming_vectors(X, space.exponent))
    dverts = ball_vertices(d, space.dual_exponent, half=True)
    if dverts is not None and len(dverts) <= 64:
        atoms.extend(dverts)
    atoms.extend(np.eye(d))
    seeded = _seed_families(seeds, d)
    for F in seeded:
        atoms.extend(F)

    verts = ball_vertices(d, space.exponent, half=True)
    converged = True
    if verts is not None and p == 1.0 and 2 ** (len(X) - 1) <= PATTERN_LIMIT:
        F = _sign_pattern_lp(X, verts)
        if F is not None and len(F) <= trunc:
            value, F = _certify(F, X, space, p, budget)
            meta.update(engine="sign-pattern-lp", family_size=int(len(F)), weak_value=wval)
            return NormResult(value, Mode.EXACT, F, meta=meta)
    if verts is not None:
        F, converged = _column_generation(X, verts, atoms, p, budget, 0)
        engine = "lp-column-generation"
    else:
        engine = "lp-column-generation-cuts"
        cuts = [e / float(lp_norms(e, space.exponent)) for e in np.eye(d)]
        cuts.extend(normalize_rows(norming_vectors(X, space.dual_exponent), space.exponent))
        F = np.zeros((0, d))
        for rnd in range(outer_rounds(budget, CUT_ROUNDS)):
            F, converged = _column_generation(X, np.array(cuts), atoms, p, budget, rnd + 1)
            if len(F) == 0:
                break
            n, _, _, vals, pts = ascent(F, space.dual(), p, budget, salt=rnd, return_all=True)
            if n <= 1.0 + 1e-7:
                break
            converged = False
            added = 0
            for k in np.argsort(-vals, kind="stable"):
                if vals[k] <= 1.0 + 1e-7 or added >= COLUMN_BATCH:
                    break
                e = pts[k] / float(lp_norms(pts[k], space.exponent))
                if _distinct(e / np.linalg.norm(e), [c / np.linalg.norm(c) for c in cuts]):
                    cuts.append(e)
                    added += 1
            if added == 0:
                break
    if verts is not None and p == 1.0 and len(F):
        # local search over sign patterns around the column-generation family
        G = F
        for _ in range(outer_rounds(budget, CUT_ROUNDS)):
            H = _sign_pattern_lp(X, verts, _patterns_near(X, G, PATTERN_LIMIT))
            if H is None or family_objective(X, H, p) <= family_objective(X, G, p) * (1.0 + PRICE_TOL):
                break
            G = H
        if family_objective(X, G, p) > family_objective(X, F, p):
            F = G
    F = _prune(F, X, p, trunc)
    value, F = _certify(F, X, space, p, budget)
    # the weak witness alone is always feasible
    candidates = [np.atleast_2d(wphi)] + [_prune(S, X, p, trunc) for S in seeded]
    for k, S in enumerate(candidates):
        sval, sF = _certify(S, X, space, p, budget, salt=1000 + k)
        if sval > value:
            value, F = sval, sF
    meta.update(engine=engine, family_size=int(len(F)), weak_value=wval)
    return NormResult(value, Mode.LOWER_BOUND, F, converged, meta=meta)
