"""Finite-dimensional toolkit for sequence-class norms and multiple summing operators."""
from .nseq import NSeq
from .optim import DEFAULT_BUDGET, OptBudget
from .seqclass import ClassSpec, Kind, Mode, NormResult, class_norm
from .spaces import INF, FiniteSpace, Functional, InputError

__version__ = "0.1.0"

__all__ = ["DEFAULT_BUDGET", "INF", "ClassSpec", "FiniteSpace", "Functional", "InputError", "Kind",
           "Mode", "NSeq", "NormResult", "OptBudget", "class_norm"]
