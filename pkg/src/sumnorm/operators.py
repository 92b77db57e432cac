"""Finite-dimensional linear and multilinear operators and homogeneous polynomials.

A :class:`MultiOp` ``T: E_1 x ... x E_n -> F`` is stored as a coefficient
tensor of shape ``(d_1, ..., d_n, d_F)``; ``T(x_1, ..., x_n)`` contracts input
axis ``i`` with ``x_i``.  Axis numbers are 0-based throughout.  A
:class:`Polynomial` is stored only through its symmetric multilinear operator.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .nseq import NSeq
from .optim import DEFAULT_BUDGET, OptBudget, best_index, random_unit_rows
from .spaces import (FiniteSpace, Functional, InputError, ball_vertices, dual_exponent,
                     lp_norms, norming_vectors, scalar_field)

SYMMETRY_TOL = 1e-12


def _space_json(s: FiniteSpace) -> dict:
    return s.to_json()


def _vector(v, space: FiniteSpace, what: str) -> np.ndarray:
    if isinstance(v, Functional):
        v = v.coefficients
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.shape != (space.dim,):
        raise InputError(f"{what} of shape {v.shape} does not live in {space!r}")
    return v


# ---------------------------------------------------------------- linear maps

@dataclass(frozen=True, eq=False)
class LinearOp:
    """``u: source -> target`` given by a ``target.dim x source.dim`` matrix."""

    source: FiniteSpace
    target: FiniteSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.shape != (self.target.dim, self.source.dim):
            raise InputError(f"matrix of shape {m.shape} for a map {self.source!r} -> {self.target!r}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, space: FiniteSpace) -> "LinearOp":
        return cls(space, space, np.eye(space.dim))

    def __call__(self, v) -> np.ndarray:
        return self.matrix @ _vector(v, self.source, "argument")

    def scaled(self, c: float) -> "LinearOp":
        return LinearOp(self.source, self.target, c * self.matrix)

    def on(self, x: NSeq) -> NSeq:
        """Apply entrywise to an n-sequence."""
        if not x.space.same_geometry(self.source):
            raise InputError(f"n-sequence in {x.space!r}, map expects {self.source!r}")
        return NSeq(x.entries @ self.matrix.T, self.target)

    def to_json(self) -> dict:
        return {"source": _space_json(self.source), "target": _space_json(self.target),
                "matrix": self.matrix.tolist()}

    @classmethod
    def from_json(cls, obj) -> "LinearOp":
        try:
            return cls(FiniteSpace.from_json(obj["source"]), FiniteSpace.from_json(obj["target"]),
                       obj["matrix"])
        except (KeyError, TypeError) as e:
            raise InputError(f"linear map: missing or malformed field {e}") from None


def opnorm_is_exact(u: LinearOp) -> bool:
    """Whether :func:`opnorm` enumerates a polytope (source ball or target dual ball)."""
    return (ball_vertices(u.source.dim, u.source.exponent) is not None
            or ball_vertices(u.target.dim, u.target.dual_exponent) is not None
            or (u.source.exponent == 2.0 and u.target.exponent == 2.0))


def opnorm(u: LinearOp, budget: OptBudget = DEFAULT_BUDGET) -> float:
    """Induced norm ``sup_{||v|| <= 1} ||u v||``.

    Exact when the source ball is a polytope (max over its vertices), when the
    target's dual ball is (``||u|| = ||u^T||`` over those vertices), or for
    Euclidean spaces (largest singular value).  Otherwise a lower bound from
    multi-start conditional-gradient ascent.
    """
    A = u.matrix
    sv = ball_vertices(u.source.dim, u.source.exponent)
    if sv is not None:
        return float(np.max(lp_norms(sv @ A.T, u.target.exponent)))
    tv = ball_vertices(u.target.dim, u.target.dual_exponent)
    if tv is not None:
        return float(np.max(lp_norms(tv @ A, u.source.dual_exponent)))
    if u.source.exponent == 2.0 and u.target.exponent == 2.0:
        return float(np.linalg.norm(A, 2))
    # convex maximization over the source ball
    V = random_unit_rows(budget.rng(0x0B), budget.starts, u.source.dim, u.source.exponent)
    vals = lp_norms(V @ A.T, u.target.exponent)
    for _ in range(budget.iterations):
        G = norming_vectors(V @ A.T, u.target.exponent) @ A
        cand = norming_vectors(G, dual_exponent(u.source.exponent))
        cval = lp_norms(cand @ A.T, u.target.exponent)
        better = cval > vals * (1.0 + budget.tolerance)
        if not better.any():
            break
        V[better], vals[better] = cand[better], cval[better]
    return float(vals[best_index(vals)])


# ---------------------------------------------------------------- multilinear maps

@dataclass(frozen=True, eq=False)
class MultiOp:
    """An n-linear operator ``E_1 x ... x E_n -> F``."""

    sources: tuple
    target: FiniteSpace
    coefficients: np.ndarray

    def __post_init__(self):
        sources = tuple(self.sources)
        if not sources:
            raise InputError("a multilinear operator needs at least one source")
        c = np.array(self.coefficients, dtype=float)
        shape = tuple(s.dim for s in sources) + (self.target.dim,)
        if c.shape != shape:
            # scalar targets may omit the trailing axis; singleton sources may be flattened
            if c.size == math.prod(shape) and (c.shape == shape[:-1] or all(k == 1 for k in shape[:-1])):
                c = c.reshape(shape)
            else:
                raise InputError(f"coefficients of shape {c.shape}, expected {shape}")
        c.flags.writeable = False
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "coefficients", c)

    @property
    def arity(self) -> int:
        return len(self.sources)

    def is_zero(self) -> bool:
        return not np.any(self.coefficients)

    def __call__(self, *xs) -> np.ndarray:
        return apply(self, *xs)

    def to_json(self) -> dict:
        return {"sources": [_space_json(s) for s in self.sources], "target": _space_json(self.target),
                "coefficients": self.coefficients.tolist()}

    @classmethod
    def from_json(cls, obj) -> "MultiOp":
        if not isinstance(obj, dict):
            raise InputError("operator: expected an object")
        try:
            sources = [FiniteSpace.from_json(s) for s in obj["sources"]]
            return cls(tuple(sources), FiniteSpace.from_json(obj["target"]), obj["coefficients"])
        except KeyError as e:
            raise InputError(f"operator: missing field {e}") from None
        except (TypeError, ValueError) as e:
            if isinstance(e, InputError):
                raise
            raise InputError(f"operator: malformed coefficients ({e})") from None


def apply(T: MultiOp, *xs) -> np.ndarray:
    """``T(x_1, ..., x_n)`` as a vector of the target."""
    if len(xs) != T.arity:
        raise InputError(f"operator of arity {T.arity} applied to {len(xs)} arguments")
    out = T.coefficients
    for x, s in zip(xs, T.sources):
        out = np.tensordot(_vector(x, s, "argument"), out, axes=([0], [0]))
    return np.asarray(out, dtype=float).reshape(T.target.dim)


def apply_batch(T: MultiOp, *Xs: NSeq) -> NSeq:
    """The n-sequence ``(T(x^1_{j_1}, ..., x^n_{j_n}))`` from 1-sequences ``X_i``."""
    if len(Xs) != T.arity:
        raise InputError(f"operator of arity {T.arity} applied to {len(Xs)} sequences")
    out = T.coefficients
    for i, (X, s) in enumerate(zip(Xs, T.sources)):
        if X.order != 1:
            raise InputError(f"argument {i} has order {X.order}, expected a 1-sequence")
        if not X.space.same_geometry(s):
            raise InputError(f"argument {i} lives in {X.space!r}, operator expects {s!r}")
        # contract the leading input axis; the new sequence axis goes last
        out = np.tensordot(out, X.entries, axes=([0], [1]))
    return NSeq(np.moveaxis(out, 0, -1), T.target)


def compose(t: LinearOp, T: MultiOp, *us: LinearOp) -> MultiOp:
    """``t o T o (u_1, ..., u_n)``."""
    if len(us) != T.arity:
        raise InputError(f"compose needs {T.arity} inner maps, got {len(us)}")
    if not t.source.same_geometry(T.target):
        raise InputError(f"outer map starts in {t.source!r}, operator ends in {T.target!r}")
    out = T.coefficients
    for i, (u, s) in enumerate(zip(us, T.sources)):
        if not u.target.same_geometry(s):
            raise InputError(f"inner map {i} ends in {u.target!r}, operator expects {s!r}")
        out = np.tensordot(out, u.matrix, axes=([0], [0]))
    out = np.tensordot(t.matrix, out, axes=([1], [0]))
    return MultiOp(tuple(u.source for u in us), t.target, np.moveaxis(out, 0, -1))


def finite_type(functionals, b, target: FiniteSpace | None = None) -> MultiOp:
    """Rank-one operator ``(x_1, ..., x_n) -> phi_1(x_1) ... phi_n(x_n) b``."""
    functionals = list(functionals)
    if not functionals:
        raise InputError("finite_type needs at least one functional")
    for f in functionals:
        if not isinstance(f, Functional):
            raise InputError("finite_type expects Functional arguments")
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if target is None:
        target = scalar_field() if b.size == 1 else FiniteSpace(b.size)
    b = _vector(b, target, "b")
    out = functionals[0].coefficients
    for f in functionals[1:]:
        out = np.multiply.outer(out, f.coefficients)
    return MultiOp(tuple(f.host for f in functionals), target, np.multiply.outer(out, b))


def product_op(n: int) -> MultiOp:
    """Scalar multiplication ``(l_1, ..., l_n) -> l_1 ... l_n``."""
    if int(n) != n or n < 1:
        raise InputError(f"product_op needs n >= 1, got {n}")
    k = scalar_field()
    return MultiOp((k,) * int(n), k, np.ones((1,) * (int(n) + 1)))


def restrict(T: MultiOp, a, axis: int) -> MultiOp:
    """Fix argument ``axis`` to ``a``; arity drops by one."""
    if T.arity < 2:
        raise InputError("restrict needs arity >= 2")
    if not 0 <= axis < T.arity:
        raise InputError(f"axis {axis} out of range for arity {T.arity}")
    a = _vector(a, T.sources[axis], "fixed argument")
    out = np.tensordot(a, T.coefficients, axes=([0], [axis]))
    return MultiOp(T.sources[:axis] + T.sources[axis + 1:], T.target, out)


def extend_by_functional(T: MultiOp, gamma: Functional) -> MultiOp:
    """``(x_1, ..., x_{n+1}) -> gamma(x_{n+1}) T(x_1, ..., x_n)``."""
    c = T.coefficients
    out = np.expand_dims(c, -2) * gamma.coefficients[:, None]
    return MultiOp(T.sources + (gamma.host,), T.target, out)


# ---------------------------------------------------------------- polynomials

def symmetrization_divisor(n: int) -> int:
    """Normalization of the sum over the ``n!`` input-axis permutations."""
    return math.factorial(n)


def extension_divisor(n: int) -> int:
    """Normalization of the ``n+1``-term sum building ``phi P`` from ``P`` of degree ``n``."""
    return n + 1


def _is_symmetric(c: np.ndarray, n: int) -> bool:
    scale = max(1.0, float(np.max(np.abs(c)))) if c.size else 1.0
    for i in range(n - 1):
        axes = list(range(c.ndim))
        axes[i], axes[i + 1] = axes[i + 1], axes[i]
        if np.max(np.abs(c - np.transpose(c, axes)), initial=0.0) > SYMMETRY_TOL * scale:
            return False
    return True


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Homogeneous polynomial ``P(x) = A(x, ..., x)`` with ``A`` symmetric n-linear."""

    degree: int
    space: FiniteSpace
    target: FiniteSpace
    coefficients: np.ndarray

    def __post_init__(self):
        n = int(self.degree)
        if n != self.degree or n < 1:
            raise InputError(f"polynomial degree must be a positive integer, got {self.degree}")
        op = MultiOp((self.space,) * n, self.target, self.coefficients)
        if not _is_symmetric(op.coefficients, n):
            raise InputError("polynomial coefficients are not symmetric in the input axes")
        object.__setattr__(self, "degree", n)
        object.__setattr__(self, "coefficients", op.coefficients)

    @property
    def operator(self) -> MultiOp:
        """The associated symmetric n-linear operator."""
        return MultiOp((self.space,) * self.degree, self.target, self.coefficients)

    def __call__(self, x) -> np.ndarray:
        return apply(self.operator, *([x] * self.degree))

    def to_json(self) -> dict:
        return {"degree": self.degree, **self.operator.to_json()}

    @classmethod
    def from_json(cls, obj) -> "Polynomial":
        op = MultiOp.from_json(obj)
        if "degree" not in obj:
            raise InputError("polynomial: missing field 'degree'")
        if len({(s.dim, s.exponent) for s in op.sources}) != 1:
            raise InputError("polynomial: all sources must be the same space")
        return cls(obj["degree"], op.sources[0], op.target, op.coefficients)


def symmetrize(T: MultiOp) -> Polynomial:
    """Polynomial whose symmetric operator is the average of ``T`` over argument orders."""
    s0 = T.sources[0]
    if any(not s.same_geometry(s0) for s in T.sources):
        raise InputError("symmetrize needs all sources equal")
    n = T.arity
    c = T.coefficients
    total = np.zeros_like(c)
    for perm in itertools.permutations(range(n)):
        total = total + np.transpose(c, perm + (n,))
    return Polynomial(n, s0, T.target, total / symmetrization_divisor(n))


def poly_restrict(P: Polynomial, a) -> Polynomial:
    """``x -> A(a, x, ..., x)``, degree ``n - 1``."""
    if P.degree < 2:
        raise InputError("poly_restrict needs degree >= 2")
    R = restrict(P.operator, a, 0)
    return Polynomial(P.degree - 1, P.space, P.target, R.coefficients)


def poly_scalar_extend(P: Polynomial, phi: Functional) -> Polynomial:
    """``x -> phi(x) P(x)`` of degree ``n + 1``.

    Its symmetric operator is ``sum_k phi(x_k) A(x without x_k)`` over the
    ``n + 1`` positions, divided by ``n + 1``.
    """
    n = P.degree
    f = _vector(phi, P.space, "functional")
    c = P.coefficients
    total = np.zeros((P.space.dim,) * (n + 1) + (P.target.dim,))
    for k in range(n + 1):
        # phi on input axis k, the n arguments of A on the remaining axes
        term = np.multiply.outer(f, c)  # phi on axis 0
        order = list(range(1, k + 1)) + [0] + list(range(k + 1, n + 2))
        total = total + np.transpose(term, order)
    return Polynomial(n + 1, P.space, P.target, total / extension_divisor(n))


def polarize(values, degree: int, space: FiniteSpace, target: FiniteSpace) -> np.ndarray:
    """Symmetric n-linear coefficients recovered from the values of ``x -> P(x)``.

    Uses ``A(x_1, ..., x_n) = (2^n n!)^-1 sum_eps eps_1 ... eps_n P(sum_k eps_k x_k)``
    at every tuple of basis vectors; only evaluations of ``values`` are used.
    """
    n, d = int(degree), space.dim
    eye = np.eye(d)
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    norm = 2.0 ** n * math.factorial(n)
    out = np.zeros((d,) * n + (target.dim,))
    for idx in itertools.product(range(d), repeat=n):
        acc = np.zeros(target.dim)
        for eps in signs:
            acc += np.prod(eps) * np.asarray(values(eps @ eye[list(idx)]), dtype=float).reshape(target.dim)
        out[idx] = acc / norm
    return out


__all__ = [
    "LinearOp", "MultiOp", "Polynomial", "apply", "apply_batch", "compose", "extend_by_functional",
    "extension_divisor", "finite_type", "opnorm", "opnorm_is_exact", "poly_restrict",
    "poly_scalar_extend", "polarize", "product_op", "restrict", "symmetrization_divisor", "symmetrize",
]
