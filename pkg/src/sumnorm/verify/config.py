"""Property ids, check configuration, class presets and reports."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace

from ..optim import OptBudget
from ..seqclass import COHEN, LINF, LP, MID, MIXED, WEAK, ClassSpec, Kind
from ..spaces import INF, FiniteSpace, InputError, scalar_field


class PropertyId(enum.Enum):
    UNIT_NORM = "UNIT_NORM"
    LINF_EMBED = "LINF_EMBED"
    SYMMETRY = "SYMMETRY"
    FIN_DET = "FIN_DET"
    LINEAR_STABILITY = "LINEAR_STABILITY"
    MULT1 = "MULT1"
    IDEAL_INEQ = "IDEAL_INEQ"
    IN_NORM_ONE = "IN_NORM_ONE"
    SEQ_COMPAT = "SEQ_COMPAT"
    DOWN_REGULAR = "DOWN_REGULAR"
    MULTIPLE_REGULAR = "MULTIPLE_REGULAR"
    CH1 = "CH1"
    CH2 = "CH2"
    CH3 = "CH3"
    CH4 = "CH4"
    LEMMA_PA = "LEMMA_PA"


def parse_property(name) -> PropertyId:
    if isinstance(name, PropertyId):
        return name
    try:
        return PropertyId(str(name).upper())
    except ValueError:
        raise InputError(f"unknown property id {name!r}") from None


ENGINE_KINDS = (Kind.LINF, Kind.LP, Kind.WEAK, Kind.COHEN, Kind.MID, Kind.MIXED)

#: preset families: input class of the scalar/vector arguments -> output class
FAMILIES = ("summing", "cohen", "mixing", "strong_mixing", "strong_mid", "mid_weakly")


@dataclass(frozen=True)
class Preset:
    """A multiple-summing setting: input class for the arguments, output class for the values."""

    family: str
    input_spec: ClassSpec
    output_spec: ClassSpec

    def __str__(self):
        return f"{self.family}[{self.input_spec} -> {self.output_spec}]"

    def to_json(self) -> dict:
        return {"family": self.family, "input": self.input_spec.to_json(),
                "output": self.output_spec.to_json()}


def preset_grid(family: str, ps=(1.0, 2.0, 4.0), ss=(2.0, 4.0)) -> list:
    """All parameter instances of a family on the grid (``p >= q`` where inputs are weaker)."""
    out = []
    if family == "summing":
        out = [Preset(family, WEAK(q), LP(p)) for q in ps for p in ps if p >= q]
    elif family == "cohen":
        out = [Preset(family, LP(p), COHEN(p)) for p in ps if p > 1.0]
    elif family == "mixing":
        out = [Preset(family, WEAK(q), MIXED(s, q)) for s in ss for q in ps if q <= s]
    elif family == "strong_mixing":
        out = [Preset(family, MIXED(s, q), LP(p)) for s in ss for q in ps if q <= s for p in ps if p >= q]
    elif family == "strong_mid":
        out = [Preset(family, MID(p), LP(p)) for p in ps]
    elif family == "mid_weakly":
        out = [Preset(family, WEAK(p), MID(p)) for p in ps]
    else:
        raise InputError(f"unknown preset family {family!r}")
    return out


def engine_grid(kind: Kind, ps=(1.0, 2.0, 4.0), ss=(2.0, 4.0)) -> list:
    if kind is Kind.LINF:
        return [LINF()]
    if kind is Kind.LP:
        return [LP(p) for p in ps]
    if kind is Kind.WEAK:
        return [WEAK(p) for p in ps]
    if kind is Kind.COHEN:
        return [COHEN(p) for p in ps if p > 1.0]
    if kind is Kind.MID:
        return [MID(p) for p in ps]
    return [MIXED(s, q) for s in ss for q in ps if q <= s]


def default_spaces() -> tuple:
    return (scalar_field(), FiniteSpace(3, 1.0), FiniteSpace(3, INF), FiniteSpace(3, 2.0))


#: engine budget for checks; small enough for thousands of samples
CHECK_BUDGET = OptBudget(starts=16, iterations=100)


@dataclass(frozen=True)
class CheckConfig:
    """What to sample and how strictly to judge it.

    ``samples`` is per subject: per engine for the sequence-class axioms, per
    preset family for the operator-level properties.
    """

    samples: int = 16
    seed: int = 0
    spaces: tuple = field(default_factory=default_spaces)
    engines: tuple = ENGINE_KINDS
    families: tuple = FAMILIES
    p_grid: tuple = (1.0, 2.0, 4.0)
    s_grid: tuple = (2.0, 4.0)
    max_order: int = 3
    max_bound: int = 3
    max_dim: int = 4
    exact_tol: float = 1e-9
    opt_tol: float = 1e-4
    budget: OptBudget = CHECK_BUDGET

    def __post_init__(self):
        if isinstance(self.samples, bool) or int(self.samples) != self.samples or self.samples < 1:
            raise InputError(f"samples must be a positive integer, got {self.samples!r}")
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "engines", tuple(e if isinstance(e, Kind) else Kind(str(e).upper())
                                                  for e in self.engines))
        for f in self.families:
            if f not in FAMILIES:
                raise InputError(f"unknown preset family {f!r}")
        if not self.spaces:
            raise InputError("at least one space is needed")
        if self.max_order < 1 or self.max_bound < 1 or self.max_dim < 1:
            raise InputError("max_order, max_bound and max_dim must be positive")
        if not (self.exact_tol >= 0 and self.opt_tol >= 0):
            raise InputError("tolerances must be nonnegative")
        object.__setattr__(self, "budget", self.budget.with_seed(self.seed))

    def with_seed(self, seed: int) -> "CheckConfig":
        return replace(self, seed=int(seed))

    def to_json(self) -> dict:
        return {"samples": self.samples, "seed": self.seed,
                "spaces": [s.to_json() for s in self.spaces],
                "engines": [e.value for e in self.engines], "families": list(self.families),
                "p_grid": list(self.p_grid), "s_grid": list(self.s_grid),
                "max_order": self.max_order, "max_bound": self.max_bound, "max_dim": self.max_dim,
                "exact_tol": self.exact_tol, "opt_tol": self.opt_tol, "budget": self.budget.to_json()}

    @classmethod
    def from_json(cls, obj) -> "CheckConfig":
        if not isinstance(obj, dict):
            raise InputError("config: expected an object")
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise InputError(f"config: unknown field(s) {sorted(unknown)}")
        kw = dict(obj)
        if "spaces" in kw:
            kw["spaces"] = tuple(FiniteSpace.from_json(s) for s in kw["spaces"])
        if "budget" in kw:
            kw["budget"] = OptBudget.from_json(kw["budget"])
        for key in ("engines", "families", "p_grid", "s_grid"):
            if key in kw:
                kw[key] = tuple(kw[key])
        try:
            return cls(**kw)
        except (TypeError, ValueError) as e:
            if isinstance(e, InputError):
                raise
            raise InputError(f"config: {e}") from None


@dataclass(frozen=True, eq=False)
class CheckReport:
    """Outcome of one property (or, with ``children``, of a whole suite).

    ``worst_margin`` is the smallest normalized slack seen (negative beyond
    the tolerance means failure).  ``runtime`` is wall-clock seconds; it is
    left out of the JSON so that reports are reproducible byte for byte.
    """

    property: str
    passed: bool
    worst_margin: float
    samples: int
    counterexample: dict | None = None
    runtime: float = 0.0
    children: tuple = ()
    seed: int = 0

    def to_json(self, include_runtime: bool = False) -> dict:
        out = {"property": self.property, "passed": self.passed, "seed": self.seed,
               "worst_margin": _finite(self.worst_margin), "samples": self.samples,
               "counterexample": self.counterexample}
        if self.children:
            out["checks"] = [c.to_json(include_runtime) for c in self.children]
        if include_runtime:
            out["runtime"] = self.runtime
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def table(self) -> str:
        rows = list(self.children) if self.children else [self]
        lines = [f"seed {self.seed}", f"{'property':<18}{'result':<8}{'samples':>8}  worst margin"]
        for r in rows:
            lines.append(f"{r.property:<18}{'PASS' if r.passed else 'FAIL':<8}{r.samples:>8}  "
                         f"{_finite(r.worst_margin):.3e}")
        lines.append(f"{'overall':<18}{'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _finite(v: float):
    if v == float("inf"):
        return 1e300
    return float(v)
