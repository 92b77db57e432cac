"""Moving witnesses between related n-sequences.

When two class norms are compared (``||y|| <= c ||x||``) and an engine only
returns a bound, the comparison is made robust by evaluating one side first
and handing its witness, carried over to the other sequence, as a seed:

* sup-type engines (WEAK, COHEN, MID) evaluate the small side first; its
  functional(s), moved to the big side, certify at least the same value there;
* the inf-type engine (MIXED) evaluates the big side first; its multipliers,
  moved to the small side, give a factorization that is at least as good.

Per-entry witnesses (the COHEN family, the MIXED multipliers) are moved by a
``layout`` function acting on arrays shaped ``bounds + (k,)``.
"""
from __future__ import annotations

import numpy as np

from .base import Kind, NormResult

SUP_KINDS = (Kind.WEAK, Kind.COHEN, Kind.MID)


def small_first(kind: Kind) -> bool:
    """Whether the small side of an inequality should be evaluated first."""
    return kind in SUP_KINDS


def carry(kind: Kind, result: NormResult, layout=None) -> list:
    """Seeds for a sequence whose entries are ``layout`` of the evaluated one's."""
    w = result.witness
    if w is None:
        return []
    if kind in (Kind.WEAK, Kind.MID):
        return [w]
    if kind is Kind.COHEN:
        Phi = np.asarray(w, dtype=float)
        return [layout(Phi) if layout else Phi]
    if kind is Kind.MIXED:
        tau = w.tau.entries
        return [(layout(tau) if layout else tau)[..., 0]]
    return []


def through_linear(kind: Kind, result: NormResult, matrix) -> list:
    """Seeds across an entrywise linear map ``u`` (``matrix``: target x source).

    For sup-type engines ``result`` belongs to ``u x`` and the seeds to ``x``
    (functionals are pulled back by ``u``).  For MIXED ``result`` belongs to
    ``x`` and the same multipliers serve ``u x``.
    """
    w = result.witness
    if w is None:
        return []
    A = np.asarray(matrix, dtype=float)
    if kind is Kind.WEAK:
        return [A.T @ w.coefficients]
    if kind is Kind.COHEN:
        return [np.asarray(w, dtype=float) @ A]
    if kind is Kind.MID:
        return [np.asarray(w, dtype=float) @ A]
    if kind is Kind.MIXED:
        return [w.tau.values()]
    return []


def through_scaling(kind: Kind, result: NormResult, lam, axis: int, p: float, r=None) -> list:
    """Seeds relating ``a`` and ``scale_axis(a, lam, axis)``.

    Sup-type: ``result`` belongs to the scaled sequence, seeds to ``a``.  The
    COHEN family is contracted against ``lam / ||lam||_p`` along ``axis``.
    MIXED: ``result`` belongs to ``a``; the seed for the scaled sequence is
    ``|lam_k|^(q/r) tau_j`` with ``q/r`` passed as ``r`` (exponent ratio).
    """
    w = result.witness
    if w is None:
        return []
    lam = np.asarray(lam, dtype=float).reshape(-1)
    if kind in (Kind.WEAK, Kind.MID):
        return [w]
    if kind is Kind.COHEN:
        n = float(np.sum(np.abs(lam) ** p) ** (1.0 / p))
        if n == 0.0:
            return []
        return [np.tensordot(lam / n, np.asarray(w, dtype=float), axes=([0], [axis]))]
    if kind is Kind.MIXED:
        tau = w.tau.values()
        weights = np.abs(lam) ** r
        shape = [1] * (tau.ndim + 1)
        shape[axis] = len(lam)
        return [np.expand_dims(tau, axis) * weights.reshape(shape)]
    return []
