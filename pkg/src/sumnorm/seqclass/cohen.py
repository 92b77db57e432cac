"""Cohen strongly p-summable norm.

``sup sum_j phi_j(x_j)`` over families ``(phi_j)`` in ``E'`` whose weak
``l_{p'}`` norm (a sup over the unit ball of ``E``) is at most one.  This is the
projective tensor norm of ``l_p^M (x) E``.

Closed forms cover scalars, single entries, ``E = l_1^d`` (where the
constraint splits by coordinates) and the Euclidean ``p = 2`` case (nuclear
norm).  Everything else is a conic program: the constraint family is listed
exactly when the unit ball of ``E`` is a polytope and grown by cutting planes
otherwise.  The solver's family is rescaled by its independently computed
constraint norm, so the reported value is always attained by the witness.
"""
from __future__ import annotations

import clarabel
import numpy as np
from scipy import sparse

from ..nseq import NSeq
from ..optim import DEFAULT_BUDGET, OptBudget, outer_rounds
from ..spaces import FiniteSpace, InputError, ball_vertices, dual_exponent, lp_norms, norming_vectors
from .base import Mode, NormResult, support_rows
from .weak import ascent, weak_matrix

#: cutting-plane schedule on non-polytope balls
CUT_ROUNDS = 8
CUT_BATCH = 8
CUT_TOL = 1e-6


def constraint_exponent(p: float) -> float:
    """Weak exponent imposed on the functional family: the conjugate ``p'``."""
    return dual_exponent(p)


def constraint_norm(Phi: np.ndarray, space: FiniteSpace, c: float, budget: OptBudget, salt=0, seeds=()):
    """Weak ``l_c`` norm of the family ``Phi`` viewed in ``E'``; returns ``(value, e, mode)``."""
    value, e, mode, _, _ = weak_matrix(Phi, space.dual(), c, budget=budget, seeds=seeds, salt=salt)
    return value, e, mode


def _pairing(Phi, X):
    return float(np.sum(Phi * X))


def _full_witness(Phi_rows, idx, x: NSeq) -> np.ndarray:
    W = np.zeros((x.size, x.space.dim))
    W[idx] = Phi_rows
    return W.reshape(x.entries.shape)


def _closed_form(X: np.ndarray, space: FiniteSpace, c: float):
    """``(value, Phi, engine)`` when a closed form applies, else None."""
    po = dual_exponent(c)
    M, d = X.shape
    if M == 1:
        phi = norming_vectors(X, space.exponent)
        return float(lp_norms(X[0], space.exponent)), phi, "single-entry"
    if d == 1:
        Phi = norming_vectors(X[:, 0], po).reshape(M, 1)
        return float(lp_norms(X[:, 0], po)), Phi, "scalar-duality"
    if space.exponent == 1.0:
        cols = X.T
        Phi = norming_vectors(cols, po).T
        return float(np.sum(lp_norms(cols, po))), Phi, "coordinatewise"
    if space.exponent == 2.0 and c == 2.0:
        u, sv, vt = np.linalg.svd(X, full_matrices=False)
        return float(sv.sum()), u @ vt, "nuclear"
    return None


def _conic_data(M: int, d: int, E: np.ndarray, c: float):
    """Clarabel data for ``max <Phi, X>`` s.t. ``||Phi e_k||_c <= 1`` for each row ``e_k`` of ``E``.

    Variables are ``Phi`` (row-major) followed, for ``c != 2``, by epigraph
    variables ``Z[k, j] >= |(Phi e_k)_j|^c`` with ``sum_j Z[k, j] <= 1``.
    """
    K = len(E)
    nphi = M * d
    j_idx, i_idx = np.divmod(np.arange(nphi), d)
    if c == 2.0:
        # second-order cones (1, Phi e_k)
        rows = (k_of := np.repeat(np.arange(K), nphi)) * (M + 1) + 1 + np.tile(j_idx, K)
        cols = np.tile(np.arange(nphi), K)
        vals = -E[k_of, np.tile(i_idx, K)]
        b = np.zeros(K * (M + 1))
        b[:: M + 1] = 1.0
        A = sparse.csc_matrix((vals, (rows, cols)), shape=(K * (M + 1), nphi))
        cones = [clarabel.SecondOrderConeT(M + 1)] * K
        return A, b, cones, nphi
    nz = M * K
    # budget rows: sum_j Z[k, j] <= 1
    r1 = np.repeat(np.arange(K), M)
    c1 = nphi + np.arange(nz)
    v1 = np.ones(nz)
    # power cones (Z[k, j], 1, (Phi e_k)_j), three rows each, after the K budget rows
    base = K + 3 * np.arange(nz)
    r2 = base
    c2 = nphi + np.arange(nz)
    v2 = -np.ones(nz)
    kk = np.repeat(np.arange(K), M * d)
    jj = np.tile(np.repeat(np.arange(M), d), K)
    ii = np.tile(np.arange(d), K * M)
    r3 = K + 3 * (kk * M + jj) + 2
    c3 = jj * d + ii
    v3 = -E[kk, ii]
    rows = np.concatenate([r1, r2, r3])
    cols = np.concatenate([c1, c2, c3])
    vals = np.concatenate([v1, v2, v3])
    b = np.zeros(K + 3 * nz)
    b[:K] = 1.0
    b[K + 1:: 3] = 1.0
    A = sparse.csc_matrix((vals, (rows, cols)), shape=(K + 3 * nz, nphi + nz))
    cones = [clarabel.NonnegativeConeT(K)] + [clarabel.PowerConeT(1.0 / c)] * nz
    return A, b, cones, nphi + nz


def _solve(X: np.ndarray, E: np.ndarray, c: float):
    M, d = X.shape
    A, b, cones, nvar = _conic_data(M, d, np.asarray(E, dtype=float), c)
    q = np.zeros(nvar)
    q[: M * d] = -X.ravel()
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    solver = clarabel.DefaultSolver(sparse.csc_matrix((nvar, nvar)), q, A, b, cones, settings)
    sol = solver.solve()
    x = np.asarray(sol.x, dtype=float)
    if x.size != nvar or not np.all(np.isfinite(x)):
        return None
    return x[: M * d].reshape(M, d)


def _certified(Phi, X, space, c, budget, salt=0):
    n, e, mode = constraint_norm(Phi, space, c, budget, salt)
    if n <= 0:
        return 0.0, Phi, e, mode
    return _pairing(Phi, X) / n, Phi / n, e, mode


def _conic(X: np.ndarray, space: FiniteSpace, c: float, budget: OptBudget):
    verts = ball_vertices(space.dim, space.exponent, half=True)
    if verts is not None:
        Phi = _solve(X, verts, c)
        if Phi is None:
            return None
        value, Phi, _, mode = _certified(Phi, X, space, c, budget)
        return value, Phi, "conic-vertices", mode, True
    # cutting planes over the unit ball of E, several cuts per round
    d = space.dim
    dual = space.dual()
    cuts = list(np.eye(d))
    cuts.extend(norming_vectors(X, dual_exponent(space.exponent))[:CUT_BATCH])
    cuts.extend(budget.rng(0xC07).standard_normal((2 * d, d)))
    cuts = [e / float(lp_norms(e, space.exponent)) for e in cuts if np.any(e)]
    best = None
    converged = False
    rounds = outer_rounds(budget, CUT_ROUNDS)
    for rnd in range(rounds):
        Phi = _solve(X, np.array(cuts), c)
        if Phi is None:
            break
        n, _, _, vals, pts = ascent(Phi, dual, c, budget, salt=rnd, return_all=True)
        if n <= 0:
            break
        relaxed = _pairing(Phi, X)
        value = relaxed / n
        if best is None or value > best[0]:
            best = (value, Phi / n)
        # the relaxation over the current cuts bounds the norm from above
        if n <= 1.0 + CUT_TOL or relaxed - best[0] <= CUT_TOL * relaxed:
            converged = True
            break
        added = 0
        for k in np.argsort(-vals, kind="stable"):
            if vals[k] <= 1.0 + CUT_TOL or added >= CUT_BATCH:
                break
            e = pts[k] / float(lp_norms(pts[k], space.exponent))
            if any(abs(float(e @ f)) > 1.0 - 1e-9 for f in cuts):
                continue
            cuts.append(e)
            added += 1
        if added == 0:
            break
    if best is None:
        return None
    # a fresh ascent, seeded with every cut, guards against a norm the loop underestimated
    n, _, _ = constraint_norm(best[1], space, c, budget, salt=0xCE47, seeds=cuts)
    scale = max(1.0, n)
    return best[0] / scale, best[1] / scale, "conic-cutting-planes", Mode.LOWER_BOUND, converged


def _seed_rows(seeds, idx, x: NSeq):
    out = []
    for s in seeds or ():
        S = np.asarray(s, dtype=float).reshape(-1, x.space.dim)
        if S.shape[0] != x.size:
            raise InputError(f"cohen seed with {S.shape[0]} rows for {x.size} entries")
        out.append(S[idx])
    return out


def cohen_norm(x: NSeq, p, budget: OptBudget = DEFAULT_BUDGET, seeds=()) -> NormResult:
    """Cohen strongly p-summable norm of an n-sequence (``1 < p < inf``).

    The witness is the functional family, shaped like ``x.entries``, whose
    weak ``p'`` norm is at most one and whose pairing with ``x`` is ``value``.
    """
    p = float(p)
    if not 1.0 < p < float("inf"):
        raise InputError(f"cohen norm needs 1 < p < inf, got {p}")
    c = constraint_exponent(p)
    space = x.space
    X, idx = support_rows(x)
    if len(X) == 0:
        return NormResult(0.0, Mode.EXACT, np.zeros(x.entries.shape), meta={"engine": "zero"})
    closed = _closed_form(X, space, c)
    if closed is not None:
        value, Phi, engine = closed
        return NormResult(value, Mode.EXACT, _full_witness(Phi, idx, x), meta={"engine": engine})
    out = _conic(X, space, c, budget)
    if out is None:
        value, Phi, engine, cmode, converged = 0.0, np.zeros_like(X), "failed", Mode.EXACT, False
    else:
        value, Phi, engine, cmode, converged = out
    # the family norming each entry in proportion to ||x_j||^(p-1) always certifies
    # the strong l_p norm, so the bound never falls below it
    candidates = [_strong_family(X, space, p)] + _seed_rows(seeds, idx, x)
    for k, S in enumerate(candidates):
        sval, sPhi, _, _ = _certified(S, X, space, c, budget, salt=1000 + k)
        if sval > value:
            value, Phi = sval, sPhi
    meta = {"engine": engine, "constraint_mode": cmode.value}
    return NormResult(value, Mode.LOWER_BOUND, _full_witness(Phi, idx, x), converged, meta=meta)


def _strong_family(X: np.ndarray, space: FiniteSpace, p: float) -> np.ndarray:
    w = lp_norms(X, space.exponent) ** (p - 1.0)
    return norming_vectors(X, space.exponent) * w[:, None]
