"""Lower bounds for multiple summing norms of multilinear operators.

The summing norm of ``T`` for input classes ``g_1, ..., g_n`` and output class
``g`` is the best ``C`` with

    ||(T(x^1_{j_1}, ..., x^n_{j_n}))||_g <= C * prod_i ||(x^i_j)||_{g_i}

for all finite input sequences.  Every evaluated ratio is a lower bound for it;
:func:`estimate_lower` searches for large ratios over growing sequence lengths.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .nseq import NSeq
from .operators import LinearOp, MultiOp, apply_batch, opnorm
from .optim import DEFAULT_BUDGET, OptBudget, best_index
from .seqclass import ClassSpec, Kind, Mode, NormResult, class_norm
from .seqclass.transport import small_first, through_linear
from .spaces import InputError, ball_vertices

#: search budget used when a problem does not specify one
DEFAULT_SEARCH_BUDGET = OptBudget(starts=4, iterations=60)
#: cap on enumerated vertex/sign-pattern seeds per shape
SEED_LIMIT = 64
MIN_STEP = 1e-6


@dataclass(frozen=True, eq=False)
class SummingProblem:
    """An operator with its input and output classes and the sequence-length caps.

    ``budget`` drives the search over input sequences; ``norm_budget`` is
    handed to the class-norm engines.
    """

    T: MultiOp
    input_specs: tuple
    output_spec: ClassSpec
    shape_caps: tuple | None = None
    budget: OptBudget = DEFAULT_SEARCH_BUDGET
    norm_budget: OptBudget = DEFAULT_BUDGET

    def __post_init__(self):
        specs = tuple(self.input_specs)
        if len(specs) != self.T.arity:
            raise InputError(f"{len(specs)} input classes for an operator of arity {self.T.arity}")
        if not all(isinstance(s, ClassSpec) for s in specs + (self.output_spec,)):
            raise InputError("input and output classes must be ClassSpec values")
        caps = (4,) * self.T.arity if self.shape_caps is None else tuple(int(c) for c in self.shape_caps)
        if len(caps) != self.T.arity or any(c < 1 for c in caps):
            raise InputError(f"shape caps {caps} do not fit arity {self.T.arity}")
        object.__setattr__(self, "input_specs", specs)
        object.__setattr__(self, "shape_caps", caps)

    def to_json(self) -> dict:
        return {"operator": self.T.to_json(), "input_specs": [s.to_json() for s in self.input_specs],
                "output_spec": self.output_spec.to_json(), "shape_caps": list(self.shape_caps),
                "budget": self.budget.to_json(), "norm_budget": self.norm_budget.to_json()}

    @classmethod
    def from_json(cls, obj) -> "SummingProblem":
        if not isinstance(obj, dict):
            raise InputError("problem: expected an object")
        for key in ("operator", "input_specs", "output_spec"):
            if key not in obj:
                raise InputError(f"problem: missing field '{key}'")
        if not isinstance(obj["input_specs"], list):
            raise InputError("problem: 'input_specs' must be a list")
        return cls(MultiOp.from_json(obj["operator"]),
                   tuple(ClassSpec.from_json(s) for s in obj["input_specs"]),
                   ClassSpec.from_json(obj["output_spec"]),
                   obj.get("shape_caps"),
                   OptBudget.from_json(obj["budget"]) if "budget" in obj else DEFAULT_SEARCH_BUDGET,
                   OptBudget.from_json(obj["norm_budget"]) if "norm_budget" in obj else DEFAULT_BUDGET)


@dataclass(frozen=True, eq=False)
class SummingEstimate:
    """Best ratio found, the unit-norm input sequences attaining it, and how it was computed.

    ``certified`` is True when the numerator came from an EXACT or LOWER_BOUND
    evaluation and every denominator from an EXACT or UPPER_BOUND one, so the
    value is a guaranteed lower bound for the summing norm.
    """

    value: float
    witnesses: tuple
    modes: tuple
    converged: bool
    certified: bool
    shape: tuple
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"value": self.value, "witnesses": [w.to_json() for w in self.witnesses],
                "modes": [m.value for m in self.modes], "converged": self.converged,
                "certified": self.certified, "shape": list(self.shape),
                "meta": dict(sorted(self.meta.items()))}


@dataclass(frozen=True)
class RatioDetail:
    value: float
    output: NormResult
    inputs: tuple

    @property
    def certified(self) -> bool:
        return (self.output.mode is not Mode.UPPER_BOUND
                and all(r.mode is not Mode.LOWER_BOUND for r in self.inputs))


def ratio_detail(T: MultiOp, Xs, input_specs, output_spec: ClassSpec,
                 budget: OptBudget = DEFAULT_BUDGET) -> RatioDetail:
    if len(Xs) != T.arity or len(input_specs) != T.arity:
        raise InputError(f"operator of arity {T.arity} needs {T.arity} sequences and classes")
    ins = tuple(class_norm(s, X, budget) for s, X in zip(input_specs, Xs))
    denom = float(np.prod([r.value for r in ins]))
    if denom <= 0.0:
        raise InputError("ratio undefined: an input sequence has zero class norm")
    out = class_norm(output_spec, apply_batch(T, *Xs), budget)
    return RatioDetail(out.value / denom, out, ins)


def ratio(T: MultiOp, Xs, input_specs, output_spec: ClassSpec, budget: OptBudget = DEFAULT_BUDGET) -> float:
    """``||T(X_1, ..., X_n)||_out / prod_i ||X_i||_in_i``."""
    return ratio_detail(T, Xs, input_specs, output_spec, budget).value


def _shapes(caps):
    """Diagonal growth ``(1,..,1), (2,..,2), ...`` clipped to the caps, ending at the caps."""
    out = []
    for k in range(1, max(caps) + 1):
        s = tuple(min(k, c) for c in caps)
        if s not in out:
            out.append(s)
    return out


def _seed_points(prob: SummingProblem, shape, rng):
    """Starting input blocks (lists of arrays ``(m_i, d_i)``) for one shape."""
    T = prob.T
    dims = [s.dim for s in T.sources]
    seeds = []
    if all(m == 1 for m in shape):
        # vertex combinations of polytope source balls; unit vectors otherwise
        per = []
        for s in T.sources:
            v = ball_vertices(s.dim, s.exponent, half=True)
            per.append(v if v is not None else np.eye(s.dim))
        for combo in itertools.islice(itertools.product(*per), SEED_LIMIT):
            seeds.append([np.asarray(c)[None, :] for c in combo])
    elif all(d == 1 for d in dims):
        # sign patterns on every argument
        sizes = [m for m in shape]
        patterns = itertools.product(*[itertools.product((1.0, -1.0), repeat=m - 1) for m in sizes])
        for pat in itertools.islice(patterns, SEED_LIMIT // 4):
            seeds.append([np.array((1.0,) + p)[:, None] for p in pat])
    for _ in range(prob.budget.starts):
        seeds.append([rng.standard_normal((m, d)) for m, d in zip(shape, dims)])
    return seeds


class _Search:
    def __init__(self, prob: SummingProblem):
        self.prob = prob
        self.evals = 0

    def wrap(self, blocks):
        return [NSeq(b, s) for b, s in zip(blocks, self.prob.T.sources)]

    def value(self, blocks) -> float:
        self.evals += 1
        Xs = self.wrap(blocks)
        if any(not np.any(b) for b in blocks):
            return -1.0
        try:
            return ratio(self.prob.T, Xs, self.prob.input_specs, self.prob.output_spec,
                         self.prob.norm_budget)
        except InputError:
            return -1.0

    def climb(self, blocks, val, rng):
        """Random-direction hill climbing with step halving."""
        step = 0.5
        it = 0
        converged = False
        while it < self.prob.budget.iterations:
            it += 1
            i = int(rng.integers(len(blocks)))
            scale = max(float(np.max(np.abs(blocks[i]))), 1e-12)
            cand = [b.copy() for b in blocks]
            cand[i] = cand[i] + step * scale * rng.standard_normal(cand[i].shape)
            cval = self.value(cand)
            if cval > val * (1.0 + self.prob.budget.tolerance):
                blocks, val = cand, cval
                step = min(step * 1.5, 2.0)
            else:
                step *= 0.7
                if step < MIN_STEP:
                    converged = True
                    break
        return blocks, val, converged


def _pad(blocks, shape):
    out = []
    for b, m in zip(blocks, shape):
        z = np.zeros((m, b.shape[1]))
        z[: len(b)] = b
        out.append(z)
    return out


def estimate_lower(prob: SummingProblem) -> SummingEstimate:
    """Largest ratio found over input sequences with lengths up to ``shape_caps``.

    Shapes grow diagonally up to the caps; each shape starts from the best
    blocks of the previous shape (zero padded, which leaves the ratio
    unchanged), seeded extremal inputs and ``budget.starts`` Gaussian blocks,
    each improved by hill climbing.  All randomness is keyed by the budget seed
    and the shape, so the value is nondecreasing in the caps.
    """
    search = _Search(prob)
    best_blocks, best_val, best_shape = None, -1.0, None
    all_converged = True
    for shape in _shapes(prob.shape_caps):
        rng = prob.budget.rng(0x5A, *shape)
        starts = _seed_points(prob, shape, rng)
        if best_blocks is not None:
            starts.insert(0, _pad(best_blocks, shape))
        vals = [search.value(b) for b in starts]
        order = np.argsort(-np.asarray(vals), kind="stable")[: max(1, prob.budget.starts)]
        for k in order:
            blocks, val, conv = search.climb(starts[k], vals[k], prob.budget.rng(0xC1, *shape, int(k)))
            all_converged &= conv
            if val > best_val:
                best_blocks, best_val, best_shape = blocks, val, shape
        k0 = best_index(vals)
        if vals[k0] > best_val:
            best_blocks, best_val, best_shape = starts[k0], vals[k0], shape
    if best_val < 0.0:
        raise InputError("no input sequence with nonzero class norms was found")
    Xs = search.wrap(best_blocks)
    # report unit-norm witnesses and the ratio recomputed on exactly those
    unit = []
    for spec, X in zip(prob.input_specs, Xs):
        n = class_norm(spec, X, prob.norm_budget).value
        unit.append(NSeq(X.entries / n, X.space))
    det = ratio_detail(prob.T, unit, prob.input_specs, prob.output_spec, prob.norm_budget)
    modes = (det.output.mode,) + tuple(r.mode for r in det.inputs)
    return SummingEstimate(det.value, tuple(unit), modes, all_converged, det.certified, best_shape,
                           meta={"evaluations": search.evals, "seed": prob.budget.seed})


def _seeded_pair(spec: ClassSpec, x: NSeq, u: LinearOp, budget: OptBudget):
    """``(||u x||, ||x||)`` for one class, evaluated so the pair is consistent.

    Witnesses of the first evaluation seed the second (see ``transport``), so
    bound-mode engines cannot fake a violation of ``||u x|| <= ||u|| ||x||``.
    """
    ux = u.on(x)
    if small_first(spec.kind):
        s = class_norm(spec, ux, budget)
        b = class_norm(spec, x, budget, seeds=through_linear(spec.kind, s, u.matrix))
    elif spec.kind is Kind.MIXED:
        b = class_norm(spec, x, budget)
        s = class_norm(spec, ux, budget, seeds=through_linear(spec.kind, b, u.matrix))
    else:
        s, b = class_norm(spec, ux, budget), class_norm(spec, x, budget)
    return s, b


def ideal_witness_check(t: LinearOp, T: MultiOp, us, Xs, input_specs, output_spec: ClassSpec,
                        budget: OptBudget = DEFAULT_BUDGET, tol: float = 1e-9, return_modes: bool = False):
    """Check ``ratio(t T (u_1..u_n), X) <= ||t|| prod ||u_i|| ratio(T, u_1 X_1, ..., u_n X_n)``.

    Returns ``(passed, margin)`` with ``margin = rhs - lhs`` relative to
    ``max(1, rhs)`` (and the modes of all class-norm evaluations when
    ``return_modes`` is set).  A zero image sequence makes the inequality
    vacuous and is reported as a pass with infinite margin.
    """
    us = list(us)
    if len(us) != T.arity or len(Xs) != T.arity or len(input_specs) != T.arity:
        raise InputError(f"operator of arity {T.arity} needs {T.arity} maps, sequences and classes")
    pairs = [_seeded_pair(s, X, u, budget) for s, X, u in zip(input_specs, Xs, us)]
    images = [u.on(X) for u, X in zip(us, Xs)]
    modes = []
    for small, big in pairs:
        modes += [small.mode, big.mode]
    if any(small.value <= 0.0 for small, _ in pairs) or any(big.value <= 0.0 for _, big in pairs):
        return (True, float("inf"), tuple(modes)) if return_modes else (True, float("inf"))
    Z = apply_batch(T, *images)
    out_small, out_big = _seeded_pair(output_spec, Z, t, budget)
    modes += [out_small.mode, out_big.mode]
    lhs = out_small.value / float(np.prod([big.value for _, big in pairs]))
    factor = opnorm(t) * float(np.prod([opnorm(u) for u in us]))
    rhs = factor * out_big.value / float(np.prod([small.value for small, _ in pairs]))
    margin = (rhs - lhs) / max(1.0, abs(rhs))
    if return_modes:
        return margin >= -tol, margin, tuple(modes)
    return margin >= -tol, margin
