"""Finite-dimensional model spaces ``l_r^d`` and their duals.

Every space is ``R^d`` with the ``l_r`` norm, ``1 <= r <= inf``.  The dual of
``l_r^d`` is ``l_{r'}^d`` under the standard pairing.  For ``r`` in ``{1, inf}``
(and for ``d == 1``) the dual unit ball is a polytope whose vertices can be
listed, which is what makes exact suprema possible elsewhere in the package.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np


class InputError(ValueError):
    """Raised for malformed or inconsistent arguments."""


class Inf(enum.Enum):
    INF = "inf"

    def __repr__(self):
        return "INF"


INF = Inf.INF
Exponent = Union[float, Inf]


def as_exponent(r) -> Exponent:
    """Normalize ``r`` to a valid exponent; ``'inf'`` and ``math.inf`` map to INF."""
    if r is INF:
        return INF
    if isinstance(r, str):
        if r.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        try:
            r = float(r)
        except ValueError:
            raise InputError(f"invalid exponent {r!r}") from None
    if isinstance(r, bool) or not isinstance(r, (int, float, np.floating, np.integer)):
        raise InputError(f"invalid exponent {r!r}")
    r = float(r)
    if math.isinf(r) and r > 0:
        return INF
    if not r >= 1.0:
        raise InputError(f"exponent must lie in [1, inf], got {r}")
    return r


def dual_exponent(r: Exponent) -> Exponent:
    """Conjugate exponent with ``1' = inf`` and ``inf' = 1``."""
    r = as_exponent(r)
    if r is INF:
        return 1.0
    if r == 1.0:
        return INF
    return r / (r - 1.0)


def exponent_to_json(r: Exponent):
    return "inf" if r is INF else float(r)


def lp_norms(v, r: Exponent) -> np.ndarray:
    """l_r norms along the last axis of ``v``."""
    a = np.abs(np.asarray(v, dtype=float))
    if a.shape[-1] == 0:
        return np.zeros(a.shape[:-1])
    if r is INF:
        return a.max(axis=-1)
    if r == 1.0:
        return a.sum(axis=-1)
    # scale first so large/small entries do not overflow or underflow in a**r
    m = a.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    return safe[..., 0] * ((a / safe) ** r).sum(axis=-1) ** (1.0 / r)


def lp_norm(v, r: Exponent) -> float:
    return float(lp_norms(np.ravel(v), r))


def norming_vectors(v, r: Exponent) -> np.ndarray:
    """Unit vectors of ``l_{r'}`` attaining the duality ``<phi, v> = ||v||_r``.

    Works row-wise on a 2-D array.  Zero rows map to zero rows.  For ``r = 1``
    zero coordinates get sign ``+1`` so the result is a vertex of the cube.
    """
    v = np.atleast_2d(np.asarray(v, dtype=float))
    out = np.zeros_like(v)
    nrm = lp_norms(v, r)
    nz = nrm > 0
    if not nz.any():
        return out
    w = v[nz]
    if r is INF:
        k = np.argmax(np.abs(w), axis=1)
        phi = np.zeros_like(w)
        phi[np.arange(len(w)), k] = np.sign(w[np.arange(len(w)), k])
    elif r == 1.0:
        phi = np.where(w >= 0, 1.0, -1.0)
    else:
        scaled = w / nrm[nz][:, None]
        phi = np.sign(scaled) * np.abs(scaled) ** (r - 1.0)
    out[nz] = phi
    return out


@dataclass(frozen=True)
class FiniteSpace:
    """The normed space ``l_r^d``."""

    dim: int
    exponent: Exponent = 2.0
    label: str = ""

    def __post_init__(self):
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "exponent", as_exponent(self.exponent))

    @property
    def dual_exponent(self) -> Exponent:
        return dual_exponent(self.exponent)

    def dual(self) -> "FiniteSpace":
        label = self.label + "'" if self.label else ""
        return FiniteSpace(self.dim, self.dual_exponent, label)

    @property
    def is_scalar(self) -> bool:
        return self.dim == 1

    @property
    def dual_ball_is_polytope(self) -> bool:
        return self.dim == 1 or self.exponent is INF or self.exponent == 1.0

    def same_geometry(self, other: "FiniteSpace") -> bool:
        """Equality up to the label; a one-dimensional space ignores its exponent."""
        if self.dim != other.dim:
            return False
        return self.dim == 1 or self.exponent == other.exponent

    def to_json(self) -> dict:
        return {"dim": self.dim, "exponent": exponent_to_json(self.exponent), "label": self.label}

    @classmethod
    def from_json(cls, obj) -> "FiniteSpace":
        if not isinstance(obj, dict):
            raise InputError("space: expected an object")
        try:
            dim = obj["dim"]
        except KeyError:
            raise InputError("space: missing field 'dim'") from None
        return cls(dim, obj.get("exponent", 2.0), str(obj.get("label", "")))

    def __repr__(self):
        r = "inf" if self.exponent is INF else f"{self.exponent:g}"
        tag = f" {self.label}" if self.label else ""
        return f"l_{r}^{self.dim}{tag}"


def scalar_field(label: str = "K") -> FiniteSpace:
    return FiniteSpace(1, INF, label)


def _as_vector(space: FiniteSpace, v, what="vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 and space.dim == 1:
        v = v.reshape(1)
    if v.shape != (space.dim,):
        raise InputError(f"{what} of shape {v.shape} does not match {space!r}")
    return v


def norm(space: FiniteSpace, v) -> float:
    """``||v||`` in ``space``."""
    return float(lp_norms(_as_vector(space, v), space.exponent))


@dataclass(frozen=True, eq=False)
class Functional:
    """A linear functional on ``host``, i.e. an element of the dual space."""

    coefficients: np.ndarray
    host: FiniteSpace = field(default=None)

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float).reshape(-1)
        host = self.host if self.host is not None else FiniteSpace(len(c), 2.0)
        if c.shape != (host.dim,):
            raise InputError(f"functional of length {len(c)} on {host!r}")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "host", host)

    @property
    def dual_norm(self) -> float:
        return float(lp_norms(self.coefficients, self.host.dual_exponent))

    def __call__(self, v) -> float:
        return pair(self, v)

    def __repr__(self):
        return f"Functional({self.coefficients.tolist()}, on {self.host!r})"


def pair(f: Functional, v) -> float:
    return float(f.coefficients @ _as_vector(f.host, v))


def dual_norm(f: Functional) -> float:
    return f.dual_norm


def ball_vertices(dim: int, exponent: Exponent, half: bool = False):
    """Vertices of the unit ball of ``l_exponent^dim`` as rows, or None.

    With ``half=True`` only one vertex of each ``+-`` pair is returned; this is
    all an even objective needs.
    """
    exponent = as_exponent(exponent)
    if dim == 1:
        pts = [[1.0]] if half else [[1.0], [-1.0]]
        return np.array(pts)
    if exponent == 1.0:
        eye = np.eye(dim)
        return eye if half else np.concatenate([np.stack([e, -e]) for e in eye])
    if exponent is INF:
        if half:
            return np.array([(1.0,) + s for s in itertools.product((1.0, -1.0), repeat=dim - 1)])
        return np.array(list(itertools.product((1.0, -1.0), repeat=dim)))
    return None


def dual_extreme_points(space: FiniteSpace):
    """Extreme points of the dual unit ball, or None when it is not a polytope.

    ``r = inf``: the ``2d`` points ``+-e_i``.  ``r = 1``: the ``2^d`` sign vectors.
    A one-dimensional space always gives ``+-1``.
    """
    verts = ball_vertices(space.dim, space.dual_exponent)
    if verts is None:
        return None
    return [Functional(v, space) for v in verts]


def norming_functional(space: FiniteSpace, v) -> Functional:
    """A norm-one functional ``f`` with ``f(v) = ||v||``."""
    v = _as_vector(space, v)
    return Functional(norming_vectors(v, space.exponent)[0], space)
