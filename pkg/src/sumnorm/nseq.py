"""Finitely supported vector-valued n-sequences.

An :class:`NSeq` of order ``n`` and bounds ``(m_1, ..., m_n)`` stands for the
infinite n-sequence that agrees with the stored block and vanishes elsewhere.
Entries are stored densely as an array of shape ``bounds + (dim,)``.

Indices and axes are 0-based throughout the Python API.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spaces import FiniteSpace, InputError, scalar_field

#: cap on ``prod(bounds) * dim``; raise it deliberately for bigger experiments
MAX_ENTRIES = 10**6


@dataclass(frozen=True)
class Shape:
    bounds: tuple

    def __post_init__(self):
        b = tuple(int(m) for m in self.bounds)
        if len(b) < 1:
            raise InputError("an n-sequence needs order n >= 1")
        if any(m < 1 for m in b):
            raise InputError(f"bounds must be >= 1, got {b}")
        object.__setattr__(self, "bounds", b)

    @property
    def order(self) -> int:
        return len(self.bounds)

    @property
    def size(self) -> int:
        return math.prod(self.bounds)


class NSeq:
    """An immutable E-valued n-sequence with finite support."""

    __slots__ = ("space", "entries")

    def __init__(self, entries, space: FiniteSpace):
        arr = np.array(entries, dtype=float)
        if space.dim == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
            arr = arr[..., None]
        if arr.ndim < 2 or arr.shape[-1] != space.dim:
            raise InputError(
                f"entries of shape {arr.shape} are not {space!r}-valued n-sequence data")
        Shape(arr.shape[:-1])
        if arr.size > MAX_ENTRIES:
            raise InputError(f"n-sequence with {arr.size} numbers exceeds MAX_ENTRIES={MAX_ENTRIES}")
        arr.flags.writeable = False
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "entries", arr)

    def __setattr__(self, name, value):
        raise AttributeError("NSeq is immutable")

    @classmethod
    def zeros(cls, bounds, space: FiniteSpace) -> "NSeq":
        return cls(np.zeros(tuple(bounds) + (space.dim,)), space)

    @classmethod
    def scalars(cls, values, space: FiniteSpace | None = None) -> "NSeq":
        """Scalar n-sequence from an array of numbers (order = ``values.ndim``)."""
        return cls(np.asarray(values, dtype=float)[..., None], space or scalar_field())

    @property
    def shape(self) -> Shape:
        return Shape(self.entries.shape[:-1])

    @property
    def bounds(self) -> tuple:
        return self.entries.shape[:-1]

    @property
    def order(self) -> int:
        return self.entries.ndim - 1

    @property
    def size(self) -> int:
        return math.prod(self.bounds)

    def flat(self) -> np.ndarray:
        """Entries as a ``(prod(bounds), dim)`` matrix in C order."""
        return self.entries.reshape(-1, self.space.dim)

    def values(self) -> np.ndarray:
        """Scalar entries without the trailing axis (scalar spaces only)."""
        if self.space.dim != 1:
            raise InputError("values() is only defined for scalar n-sequences")
        return self.entries[..., 0]

    def is_zero(self) -> bool:
        return not np.any(self.entries)

    def with_entries(self, entries) -> "NSeq":
        return NSeq(entries, self.space)

    def __eq__(self, other):
        if not isinstance(other, NSeq):
            return NotImplemented
        return (self.space.same_geometry(other.space)
                and self.entries.shape == other.entries.shape
                and bool(np.array_equal(self.entries, other.entries)))

    def __hash__(self):
        return hash((self.entries.shape, self.entries.tobytes()))

    def allclose(self, other: "NSeq", atol=1e-12) -> bool:
        return (self.entries.shape == other.entries.shape
                and bool(np.allclose(self.entries, other.entries, rtol=0, atol=atol)))

    def __repr__(self):
        return f"NSeq(order={self.order}, bounds={self.bounds}, space={self.space!r})"

    def to_json(self) -> dict:
        return {"order": self.order, "bounds": list(self.bounds),
                "space": self.space.to_json(), "entries": self.entries.tolist()}

    @classmethod
    def from_json(cls, obj) -> "NSeq":
        if not isinstance(obj, dict):
            raise InputError("nseq: expected an object")
        for key in ("space", "entries"):
            if key not in obj:
                raise InputError(f"nseq: missing field '{key}'")
        space = FiniteSpace.from_json(obj["space"])
        try:
            x = cls(obj["entries"], space)
        except (TypeError, ValueError) as exc:
            raise InputError(f"nseq.entries: {exc}") from None
        if "bounds" in obj and list(x.bounds) != [int(m) for m in obj["bounds"]]:
            raise InputError(f"nseq.bounds {obj['bounds']} disagree with entries {list(x.bounds)}")
        if "order" in obj and int(obj["order"]) != x.order:
            raise InputError(f"nseq.order {obj['order']} disagrees with entries ({x.order})")
        return x


def _check_index(bounds, index):
    index = tuple(int(k) for k in index)
    if len(index) != len(bounds):
        raise InputError(f"index {index} has the wrong order for bounds {bounds}")
    for k, m in zip(index, bounds):
        if not 0 <= k < m:
            raise InputError(f"index {index} out of bounds {bounds}")
    return index


def unit_nseq(bounds, space: FiniteSpace, index, v) -> NSeq:
    """The n-sequence with ``v`` at ``index`` and zeros elsewhere."""
    bounds = Shape(tuple(bounds)).bounds
    index = _check_index(bounds, index)
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (space.dim,):
        raise InputError(f"vector of length {len(v)} is not in {space!r}")
    arr = np.zeros(bounds + (space.dim,))
    arr[index] = v
    return NSeq(arr, space)


def _check_perm(sigma, n):
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(n)):
        raise InputError(f"{sigma} is not a permutation of 0..{n - 1}")
    return sigma


def inverse_permutation(sigma) -> tuple:
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma):
        inv[s] = i
    return tuple(inv)


def permute(x: NSeq, sigma: Sequence[int]) -> NSeq:
    """Entry ``(j_0, ..., j_{n-1})`` of the result is ``x[j_sigma(0), ..., j_sigma(n-1)]``."""
    sigma = _check_perm(sigma, x.order)
    axes = inverse_permutation(sigma) + (x.order,)
    return NSeq(np.transpose(x.entries, axes), x.space)


def diagonal(x: NSeq) -> NSeq:
    """The 1-sequence ``(x_{j,...,j})_j`` of length ``min(bounds)``."""
    m = min(x.bounds)
    idx = np.arange(m)
    return NSeq(x.entries[(idx,) * x.order], x.space)


def fix_index(x: NSeq, axis: int, k: int) -> NSeq:
    """The (n-1)-sequence obtained by freezing index ``axis`` at ``k``."""
    if x.order < 2:
        raise InputError("fix_index needs order >= 2")
    if not 0 <= axis < x.order:
        raise InputError(f"axis {axis} out of range for order {x.order}")
    if not 0 <= k < x.bounds[axis]:
        raise InputError(f"index {k} out of bounds {x.bounds[axis]} on axis {axis}")
    return NSeq(np.take(x.entries, k, axis=axis), x.space)


def scale_axis(a: NSeq, lam, axis: int) -> NSeq:
    """Insert a new axis at ``axis`` carrying the scalar weights ``lam``.

    Entry ``(j_0, ..., j_n)`` of the result is ``lam[j_axis] * a[j without j_axis]``.
    """
    lam = np.asarray(lam.values() if isinstance(lam, NSeq) else lam, dtype=float).reshape(-1)
    if len(lam) < 1:
        raise InputError("scale_axis needs at least one weight")
    if not 0 <= axis <= a.order:
        raise InputError(f"axis {axis} out of range for inserting into order {a.order}")
    shape = [1] * (a.order + 2)
    shape[axis] = len(lam)
    return NSeq(np.expand_dims(a.entries, axis) * lam.reshape(shape), a.space)


def outer_scalars(*lams) -> NSeq:
    """Scalar n-sequence ``(lam1[j_1] * ... * lamn[j_n])``."""
    if not lams:
        raise InputError("outer_scalars needs at least one factor")
    vecs = [np.asarray(l.values() if isinstance(l, NSeq) else l, dtype=float).reshape(-1)
            for l in lams]
    out = vecs[0]
    for v in vecs[1:]:
        out = np.multiply.outer(out, v)
    return NSeq.scalars(out)


def truncate(x: NSeq, bounds) -> NSeq:
    """The leading block ``x[:m_1, ..., :m_n]``."""
    bounds = Shape(tuple(bounds)).bounds
    if len(bounds) != x.order or any(m > M for m, M in zip(bounds, x.bounds)):
        raise InputError(f"truncation {bounds} does not fit inside {x.bounds}")
    return NSeq(x.entries[tuple(slice(0, m) for m in bounds)], x.space)


def zero_trailing(x: NSeq, bounds) -> NSeq:
    """Same shape as ``x``, zero outside the leading block ``bounds``."""
    t = truncate(x, bounds)
    arr = np.zeros_like(x.entries)
    arr[tuple(slice(0, m) for m in t.bounds)] = t.entries
    return NSeq(arr, x.space)


def pad(x: NSeq, bounds) -> NSeq:
    """Extend ``x`` by zeros to the larger ``bounds``."""
    bounds = Shape(tuple(bounds)).bounds
    if len(bounds) != x.order or any(m < M for m, M in zip(bounds, x.bounds)):
        raise InputError(f"cannot pad {x.bounds} to {bounds}")
    arr = np.zeros(bounds + (x.space.dim,))
    arr[tuple(slice(0, m) for m in x.bounds)] = x.entries
    return NSeq(arr, x.space)


def apply_linear(matrix, x: NSeq, target: FiniteSpace) -> NSeq:
    """Apply a linear map entrywise; ``matrix`` has shape ``(target.dim, x.space.dim)``."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (target.dim, x.space.dim):
        raise InputError(f"matrix of shape {matrix.shape} does not map {x.space!r} to {target!r}")
    return NSeq(x.entries @ matrix.T, target)
