"""Optimizer budget, deterministic multi-start helpers and a bounded thread pool."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .spaces import InputError, lp_norms


@dataclass(frozen=True)
class OptBudget:
    """Effort knobs shared by every optimizer-backed routine."""

    starts: int = 64
    iterations: int = 500
    seed: int = 0
    tolerance: float = 1e-8

    def __post_init__(self):
        if int(self.starts) < 1 or int(self.iterations) < 1:
            raise InputError("budget starts and iterations must be positive")
        if not self.tolerance > 0:
            raise InputError("budget tolerance must be positive")
        if int(self.seed) < 0:
            raise InputError("budget seed must be nonnegative")
        object.__setattr__(self, "starts", int(self.starts))
        object.__setattr__(self, "iterations", int(self.iterations))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "tolerance", float(self.tolerance))

    def with_seed(self, seed: int) -> "OptBudget":
        return replace(self, seed=int(seed))

    def rng(self, *salt) -> np.random.Generator:
        """Generator keyed on the seed plus integer salt, so callers get independent streams."""
        return np.random.default_rng([self.seed, *[int(s) for s in salt]])

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj) -> "OptBudget":
        if obj is None:
            return cls()
        if not isinstance(obj, dict):
            raise InputError("budget: expected an object")
        unknown = set(obj) - {"starts", "iterations", "seed", "tolerance"}
        if unknown:
            raise InputError(f"budget: unknown field(s) {sorted(unknown)}")
        return cls(**obj)


DEFAULT_BUDGET = OptBudget()


def thread_count() -> int:
    """Worker cap from ``SUMNORM_THREADS`` (default 1)."""
    raw = os.environ.get("SUMNORM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"SUMNORM_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def ordered_map(fn, items):
    """``list(map(fn, items))``, possibly on a thread pool; results keep input order."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def random_unit_rows(rng: np.random.Generator, count: int, dim: int, exponent) -> np.ndarray:
    """Gaussian directions normalized in ``l_exponent``."""
    g = rng.standard_normal((count, dim))
    nrm = lp_norms(g, exponent)
    nrm[nrm == 0] = 1.0
    return g / nrm[:, None]


def normalize_rows(v: np.ndarray, exponent) -> np.ndarray:
    nrm = lp_norms(v, exponent)
    out = np.zeros_like(v)
    nz = nrm > 0
    out[nz] = v[nz] / nrm[nz][:, None]
    return out


def best_index(values) -> int:
    """Index of the largest value; ties go to the lowest index."""
    values = np.asarray(values, dtype=float)
    return int(np.argmax(values))


def sphere_ascent(fun_grad, starts: np.ndarray, iterations: int, tol: float):
    """Projected gradient ascent on the Euclidean unit sphere, batched over starts.

    ``fun_grad(A)`` maps a ``(S, d)`` array of unit rows to ``(values, grads)``.
    Each start keeps its own step size, halved whenever a step fails to
    improve.  Returns the final points and values.
    """
    A = normalize_rows(np.array(starts, dtype=float), 2.0)
    val, grad = fun_grad(A)
    step = np.ones(len(A))
    for _ in range(iterations):
        # tangent component of the gradient
        tang = grad - np.sum(grad * A, axis=1, keepdims=True) * A
        gn = np.linalg.norm(tang, axis=1)
        active = (gn > tol) & (step > 1e-12)
        if not active.any():
            break
        cand = normalize_rows(A + (step / np.maximum(gn, 1e-300))[:, None] * tang, 2.0)
        cval, cgrad = fun_grad(cand)
        ok = active & (cval > val)
        A[ok], val[ok], grad[ok] = cand[ok], cval[ok], cgrad[ok]
        step[ok] *= 1.5
        step[active & ~ok] *= 0.5
    return A, val


def outer_rounds(budget: OptBudget, cap: int, per: int = 50) -> int:
    """Outer-loop rounds (cutting planes, pricing) a budget allows: one per ``per`` iterations."""
    return max(1, min(cap, budget.iterations // per))
