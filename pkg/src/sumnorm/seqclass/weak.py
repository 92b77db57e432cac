"""Weak l_p norm: ``sup_{phi in B_E'} (sum_j |phi(x_j)|^p)^(1/p)``.

The objective is convex in ``phi``, so over a polytope dual ball the sup sits
at a vertex and vertex enumeration is exact.  For ``p = 1`` the sup equals
the largest ``||sum_j eps_j x_j||`` over sign vectors, exact for short
supports in any space.  Otherwise a batched
conditional-gradient ascent (each step jumps to the linear maximizer of the
gradient over the ball, which can only increase a convex objective) gives a
lower bound.
"""
from __future__ import annotations

import numpy as np

from ..nseq import NSeq
from ..optim import DEFAULT_BUDGET, OptBudget, best_index, normalize_rows, random_unit_rows
from ..spaces import (INF, Exponent, FiniteSpace, Functional, InputError, as_exponent,
                      ball_vertices, dual_exponent, lp_norms, norming_vectors)
from .base import Mode, NormResult, Strategy, StrategyError, support_rows

#: largest vertex list the exact path is willing to enumerate
VERTEX_LIMIT = 1 << 16
#: largest number of sign patterns for the exact p = 1 path
SIGN_LIMIT = 1 << 12


def functional_exponent(space: FiniteSpace) -> Exponent:
    """Exponent of the ball the functionals range over (the dual ball)."""
    return space.dual_exponent


def column_values(X: np.ndarray, Phi: np.ndarray, p: float) -> np.ndarray:
    """``||X phi||_p`` for every row ``phi`` of ``Phi``."""
    if len(X) == 0:
        return np.zeros(len(Phi))
    return lp_norms((X @ Phi.T).T, p)


def exact_vertices(space: FiniteSpace):
    """Half of the vertices of the functional ball, or None if not a small polytope."""
    fexp = functional_exponent(space)
    if space.dim > 17 and fexp is INF:
        return None
    return ball_vertices(space.dim, fexp, half=True)


def is_spectral(space: FiniteSpace, p: float) -> bool:
    return space.exponent == 2.0 and functional_exponent(space) == 2.0 and p == 2.0


def has_exact_path(space: FiniteSpace, p: float) -> bool:
    return exact_vertices(space) is not None or is_spectral(space, p)


def _lmo(G: np.ndarray, fexp: Exponent) -> np.ndarray:
    """Rows maximizing ``<g, phi>`` over the unit ball of ``l_fexp``."""
    return norming_vectors(G, dual_exponent(fexp))


def _seed_rows(seeds, space: FiniteSpace, fexp) -> list:
    rows = []
    for s in seeds or ():
        c = s.coefficients if isinstance(s, Functional) else np.asarray(s, dtype=float)
        c = np.asarray(c, dtype=float).reshape(-1)
        if c.shape != (space.dim,):
            raise InputError(f"weak seed of length {len(c)} for {space!r}")
        if np.any(c):
            rows.append(c / float(lp_norms(c, fexp)))
    return rows


def ascent(X: np.ndarray, space: FiniteSpace, p: float, budget: OptBudget, seeds=(),
           salt: int = 0, return_all: bool = False):
    """Multi-start conditional-gradient ascent; returns ``(value, phi, converged)``.

    With ``return_all`` the final value and point of every start are returned too.
    """
    d = space.dim
    fexp = functional_exponent(space)
    starts = _seed_rows(seeds, space, fexp)
    if len(X):
        # norming functionals of the largest entries
        order = np.argsort(-lp_norms(X, space.exponent), kind="stable")[: min(4, len(X))]
        starts.extend(norming_vectors(X[order], space.exponent))
        _, _, vt = np.linalg.svd(X, full_matrices=False)
        starts.append(normalize_rows(vt[:1], fexp)[0])
    n_random = max(1, budget.starts - len(starts))
    starts.extend(random_unit_rows(budget.rng(0x5EED, salt), n_random, d, fexp))
    Phi = np.array(starts)
    vals = column_values(X, Phi, p)
    live = np.ones(len(Phi), dtype=bool)
    converged = False
    for _ in range(budget.iterations):
        Y = X @ Phi[live].T
        W = np.sign(Y) * np.abs(Y) ** (p - 1.0) if p != 1.0 else np.sign(Y)
        cand = _lmo((X.T @ W).T, fexp)
        cval = column_values(X, cand, p)
        idx = np.flatnonzero(live)
        better = cval > vals[idx] * (1.0 + budget.tolerance) + 1e-300
        Phi[idx[better]] = cand[better]
        vals[idx[better]] = cval[better]
        live[idx[~better]] = False
        if not live.any():
            converged = True
            break
    k = best_index(vals)
    if return_all:
        return float(vals[k]), Phi[k].copy(), converged, vals, Phi
    return float(vals[k]), Phi[k].copy(), converged


def weak_matrix(X: np.ndarray, space: FiniteSpace, p: float, strategy=Strategy.AUTO,
                budget: OptBudget = DEFAULT_BUDGET, seeds=(), salt: int = 0):
    """Core evaluation on a flat entry matrix; returns ``(value, phi, mode, converged, meta)``."""
    strategy = Strategy(strategy) if not isinstance(strategy, Strategy) else strategy
    verts = exact_vertices(space)
    meta = {}
    if strategy is not Strategy.OPT and verts is not None and len(verts) <= VERTEX_LIMIT:
        vals = column_values(X, verts, p)
        k = best_index(vals)
        meta["engine"] = "vertex-enumeration"
        return float(vals[k]), verts[k].copy(), Mode.EXACT, True, meta
    if strategy is not Strategy.OPT and p == 1.0 and 0 < len(X) and 2 ** (len(X) - 1) <= SIGN_LIMIT:
        # sup_phi sum_j |phi(x_j)| = max over signs of ||sum_j eps_j x_j||
        M = len(X)
        signs = np.array([(1.0,) + tuple(1.0 - 2.0 * ((k >> b) & 1) for b in range(M - 1))
                          for k in range(2 ** (M - 1))])
        Y = signs @ X
        r = dual_exponent(functional_exponent(space))
        vals = lp_norms(Y, r)
        k = best_index(vals)
        meta["engine"] = "sign-enumeration"
        phi = norming_vectors(Y[k], r)[0] if vals[k] > 0 else np.eye(space.dim)[0]
        return float(vals[k]), phi, Mode.EXACT, True, meta
    if strategy is Strategy.AUTO and is_spectral(space, p):
        meta["engine"] = "spectral"
        if len(X) == 0:
            return 0.0, np.eye(space.dim)[0], Mode.EXACT, True, meta
        _, sv, vt = np.linalg.svd(X, full_matrices=False)
        return float(sv[0]), vt[0].copy(), Mode.EXACT, True, meta
    if strategy is Strategy.EXACT:
        raise StrategyError(f"no exact weak-norm path for {space!r} with p={p:g}")
    meta["engine"] = "conditional-gradient"
    if len(X) == 0:
        return 0.0, np.eye(space.dim)[0], Mode.LOWER_BOUND, True, meta
    value, phi, conv = ascent(X, space, p, budget, seeds, salt)
    return value, phi, Mode.LOWER_BOUND, conv, meta


def weak_norm(x: NSeq, p, strategy=Strategy.AUTO, budget: OptBudget = DEFAULT_BUDGET,
              seeds=()) -> NormResult:
    """Weak l_p norm of an n-sequence.

    ``strategy`` EXACT enumerates the vertices of the dual ball (StrategyError
    when that ball is not a polytope); OPT always runs the multi-start ascent
    and reports a lower bound; AUTO picks EXACT when available.
    """
    p = as_exponent(p)
    if p is INF:
        raise InputError("weak norm needs a finite p")
    X, _ = support_rows(x)
    value, phi, mode, conv, meta = weak_matrix(X, x.space, p, strategy, budget, seeds)
    return NormResult(value, mode, Functional(phi, x.space), conv, meta=meta)
