"""Strong classes: ``l_inf`` and strong ``l_p`` of the entry norms (always exact)."""
from __future__ import annotations

import numpy as np

from ..nseq import NSeq
from ..spaces import INF, InputError, as_exponent, lp_norms
from .base import Mode, NormResult


def lp_exponent(p: float) -> float:
    """Exponent applied to the entry norms by the strong ``l_p`` engine."""
    return p


def linf_norm(x: NSeq) -> NormResult:
    """``max_j ||x_j||``; the witness is the multi-index of a largest entry."""
    norms = lp_norms(x.entries, x.space.exponent)
    if norms.size == 0:
        return NormResult(0.0, Mode.EXACT, None, meta={"engine": "max-entry"})
    k = int(np.argmax(norms))
    return NormResult(float(norms.flat[k]), Mode.EXACT, tuple(int(i) for i in np.unravel_index(k, norms.shape)),
                      meta={"engine": "max-entry"})


def lp_norm_seq(x: NSeq, p) -> NormResult:
    """``(sum_j ||x_j||^p)^(1/p)`` over all entries."""
    p = as_exponent(p)
    if p is INF:
        raise InputError("strong l_p engine needs a finite p; use LINF")
    norms = lp_norms(x.entries, x.space.exponent).ravel()
    return NormResult(float(lp_norms(norms, lp_exponent(p))) if norms.size else 0.0, Mode.EXACT,
                      meta={"engine": "entry-norms"})
