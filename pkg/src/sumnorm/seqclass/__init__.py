"""Norm engines for the six sequence classes behind one dispatch."""
from __future__ import annotations

from ..nseq import NSeq
from ..optim import DEFAULT_BUDGET, OptBudget
from .base import (COHEN, DEFAULT_MID_TRUNC, LINF, LP, MID, MIXED, WEAK, ClassSpec, Kind,
                   MixedFactorization, Mode, NormResult, Strategy, StrategyError)
from .cohen import cohen_norm
from .mid import mid_norm
from .mixed import mixed_norm
from .strong import linf_norm, lp_norm_seq
from .weak import weak_norm


def class_norm(spec: ClassSpec, x: NSeq, budget: OptBudget = DEFAULT_BUDGET, seeds=(),
               strategy=Strategy.AUTO) -> NormResult:
    """Evaluate the class norm described by ``spec`` on ``x``.

    ``seeds`` are witnesses in the format the engine returns them (see
    :class:`NormResult`); optimizer paths start from them in addition to their
    own starts.  ``strategy`` only affects WEAK.
    """
    if not isinstance(spec, ClassSpec):
        raise TypeError(f"expected a ClassSpec, got {type(spec).__name__}")
    kind = spec.kind
    if kind is Kind.LINF:
        return linf_norm(x)
    if kind is Kind.LP:
        return lp_norm_seq(x, spec.p)
    if kind is Kind.WEAK:
        return weak_norm(x, spec.p, strategy=strategy, budget=budget, seeds=seeds)
    if kind is Kind.COHEN:
        return cohen_norm(x, spec.p, budget=budget, seeds=seeds)
    if kind is Kind.MID:
        return mid_norm(x, spec.p, trunc=spec.trunc, budget=budget, seeds=seeds)
    return mixed_norm(x, spec.s, spec.q, budget=budget, seeds=seeds)


__all__ = [
    "COHEN", "DEFAULT_MID_TRUNC", "LINF", "LP", "MID", "MIXED", "WEAK", "ClassSpec", "Kind",
    "MixedFactorization", "Mode", "NormResult", "Strategy", "StrategyError", "class_norm",
    "cohen_norm", "linf_norm", "lp_norm_seq", "mid_norm", "mixed_norm", "weak_norm",
]
