"""Class specs, results and shared helpers for the sequence-class engines."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..nseq import NSeq
from ..spaces import INF, Exponent, Functional, InputError, as_exponent, exponent_to_json


class Kind(enum.Enum):
    LINF = "LINF"
    LP = "LP"
    WEAK = "WEAK"
    COHEN = "COHEN"
    MID = "MID"
    MIXED = "MIXED"


class Mode(enum.Enum):
    EXACT = "EXACT"
    LOWER_BOUND = "LOWER_BOUND"
    UPPER_BOUND = "UPPER_BOUND"


class Strategy(enum.Enum):
    AUTO = "AUTO"
    EXACT = "EXACT"
    OPT = "OPT"


class StrategyError(InputError):
    """An exact strategy was requested where no exact path exists."""


DEFAULT_MID_TRUNC = 8


def _finite_exponent(value, what) -> float:
    r = as_exponent(value)
    if r is INF:
        raise InputError(f"{what} must be finite")
    return float(r)


@dataclass(frozen=True)
class ClassSpec:
    """Which class norm to evaluate and with what parameters.

    ``p`` is used by LP, WEAK, COHEN and MID; ``s`` and ``q`` by MIXED;
    ``trunc`` is the number of functionals kept by MID.
    """

    kind: Kind
    p: float | None = None
    s: float | None = None
    q: float | None = None
    trunc: int = DEFAULT_MID_TRUNC

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, Kind) else _parse_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Kind.LINF:
            object.__setattr__(self, "p", None)
        elif kind is Kind.MIXED:
            if self.s is None or self.q is None:
                raise InputError("MIXED needs both s and q")
            s = _finite_exponent(self.s, "MIXED s")
            q = _finite_exponent(self.q, "MIXED q")
            if q > s:
                raise InputError(f"MIXED needs q <= s, got s={s}, q={q}")
            object.__setattr__(self, "s", s)
            object.__setattr__(self, "q", q)
        else:
            if self.p is None:
                raise InputError(f"{kind.value} needs an exponent p")
            p = _finite_exponent(self.p, f"{kind.value} p")
            if kind is Kind.COHEN and not 1.0 < p:
                raise InputError(f"COHEN needs 1 < p < inf, got p={p}")
            object.__setattr__(self, "p", p)
        if kind is Kind.MID:
            if int(self.trunc) != self.trunc or self.trunc < 1:
                raise InputError(f"MID truncation must be a positive integer, got {self.trunc}")
            object.__setattr__(self, "trunc", int(self.trunc))

    @property
    def mixed_r(self) -> Exponent:
        """Multiplier exponent ``r`` with ``1/r = 1/q - 1/s`` (INF when ``s == q``)."""
        from . import mixed

        return mixed.multiplier_exponent(self.s, self.q)

    def scalar_exponent(self) -> Exponent:
        """The exponent ``t`` such that this class restricted to scalars is ``l_t``."""
        if self.kind is Kind.LINF:
            return INF
        if self.kind is Kind.MIXED:
            return self.q
        return self.p

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind.value}
        if self.kind is Kind.MIXED:
            out["s"], out["q"] = self.s, self.q
        elif self.kind is not Kind.LINF:
            out["p"] = self.p
        if self.kind is Kind.MID:
            out["trunc"] = self.trunc
        return out

    @classmethod
    def from_json(cls, obj) -> "ClassSpec":
        if not isinstance(obj, dict):
            raise InputError("spec: expected an object")
        if "kind" not in obj:
            raise InputError("spec: missing field 'kind'")
        unknown = set(obj) - {"kind", "p", "s", "q", "trunc"}
        if unknown:
            raise InputError(f"spec: unknown field(s) {sorted(unknown)}")
        return cls(obj["kind"], obj.get("p"), obj.get("s"), obj.get("q"),
                   obj.get("trunc", DEFAULT_MID_TRUNC))

    def __str__(self):
        if self.kind is Kind.LINF:
            return "LINF"
        if self.kind is Kind.MIXED:
            return f"MIXED(s={self.s:g},q={self.q:g})"
        if self.kind is Kind.MID:
            return f"MID(p={self.p:g},N={self.trunc})"
        return f"{self.kind.value}(p={self.p:g})"


def _parse_kind(kind) -> Kind:
    try:
        return Kind(str(kind).upper())
    except ValueError:
        raise InputError(f"unknown class kind {kind!r}") from None


def LINF() -> ClassSpec:
    return ClassSpec(Kind.LINF)


def LP(p) -> ClassSpec:
    return ClassSpec(Kind.LP, p)


def WEAK(p) -> ClassSpec:
    return ClassSpec(Kind.WEAK, p)


def COHEN(p) -> ClassSpec:
    return ClassSpec(Kind.COHEN, p)


def MID(p, trunc=DEFAULT_MID_TRUNC) -> ClassSpec:
    return ClassSpec(Kind.MID, p, trunc=trunc)


def MIXED(s, q) -> ClassSpec:
    return ClassSpec(Kind.MIXED, s=s, q=q)


@dataclass(frozen=True, eq=False)
class MixedFactorization:
    """``x = tau * x0`` entrywise, with ``value = ||tau||_r * ||x0||_{w,s}``."""

    tau: NSeq
    x0: NSeq
    value: float

    def reconstruct(self) -> NSeq:
        return NSeq(self.tau.entries * self.x0.entries, self.x0.space)

    def to_json(self) -> dict:
        return {"tau": self.tau.to_json(), "x0": self.x0.to_json(), "value": self.value}


@dataclass(frozen=True, eq=False)
class NormResult:
    """A class-norm value together with how far it can be trusted.

    ``lower``/``upper`` bracket the true norm as far as the engine can tell;
    for EXACT results both equal ``value``.  ``witness`` is engine specific:
    a functional (WEAK), a family of functionals (COHEN, MID), a
    :class:`MixedFactorization` (MIXED) or the index of a largest entry (LINF).
    """

    value: float
    mode: Mode
    witness: Any = None
    converged: bool = True
    lower: float | None = None
    upper: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = float(self.value)
        object.__setattr__(self, "value", v)
        if self.mode is Mode.EXACT:
            object.__setattr__(self, "lower", v)
            object.__setattr__(self, "upper", v)
        elif self.mode is Mode.LOWER_BOUND and self.lower is None:
            object.__setattr__(self, "lower", v)
        elif self.mode is Mode.UPPER_BOUND and self.upper is None:
            object.__setattr__(self, "upper", v)

    @property
    def lower_value(self) -> float:
        """Best known lower bound; falls back to ``value``."""
        return self.value if self.lower is None else self.lower

    @property
    def upper_value(self) -> float:
        return self.value if self.upper is None else self.upper

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "mode": self.mode.value,
            "converged": self.converged,
            "lower": self.lower,
            "upper": self.upper,
            "witness": witness_to_json(self.witness),
            "meta": {k: _json_scalar(v) for k, v in sorted(self.meta.items())},
        }


def _json_scalar(v):
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, tuple):
        return list(v)
    if v is INF:
        return exponent_to_json(v)
    return v


def witness_to_json(w):
    if w is None:
        return None
    if hasattr(w, "to_json"):
        return w.to_json()
    if isinstance(w, Functional):
        return {"coefficients": w.coefficients.tolist(), "space": w.host.to_json()}
    if isinstance(w, np.ndarray):
        return w.tolist()
    if isinstance(w, tuple):
        return [int(k) for k in w]
    return w


def exact(value, witness=None, **meta) -> NormResult:
    return NormResult(value, Mode.EXACT, witness, True, meta=meta)


# ---------------------------------------------------------------- flat views

def support_rows(x: NSeq):
    """Flat entry matrix restricted to nonzero rows, plus their flat indices."""
    X = x.flat()
    idx = np.flatnonzero(np.any(X != 0, axis=1))
    return X[idx], idx


def strong_lp(X: np.ndarray, r: Exponent, p: float) -> float:
    """``(sum_j ||x_j||_r^p)^(1/p)`` for the rows of ``X``."""
    from ..spaces import lp_norms

    if len(X) == 0:
        return 0.0
    return float(lp_norms(lp_norms(X, r), p))


def rel_close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def is_finite_number(v) -> bool:
    return isinstance(v, (int, float)) and math.isfinite(v)
