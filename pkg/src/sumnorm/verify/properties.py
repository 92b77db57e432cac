"""One checker per property.

A checker receives a seeded generator, the configuration, the subject (an
engine spec kind or a preset family) and whether to use the fixed degenerate
sample, and returns a list of :class:`Outcome`.  Margins are normalized
slacks: ``(big - small) / max(1, |big|)`` for inequalities and
``-|a - b| / max(1, |a|, |b|)`` for identities; an outcome fails when its
margin is below ``-tol``.  Identities between class norms are checked as
two inequalities so that bound-mode engines can be judged by transported
witnesses.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nseq import (NSeq, diagonal, fix_index, inverse_permutation, outer_scalars, pad, permute,
                    scale_axis, truncate, unit_nseq, zero_trailing)
from ..operators import (LinearOp, MultiOp, apply, apply_batch, extend_by_functional, opnorm, poly_restrict,
                         poly_scalar_extend, polarize, restrict, symmetrize)
from ..optim import OptBudget
from ..seqclass import ClassSpec, Kind, Mode, NormResult, class_norm
from ..seqclass.transport import carry, small_first, through_linear, through_scaling
from ..spaces import INF, FiniteSpace, Functional, lp_norms, norming_vectors
from ..summing import SummingProblem, estimate_lower, ideal_witness_check
from .config import CheckConfig, PropertyId, engine_grid, preset_grid

#: identities between finite contractions are held to this absolute scale
ALGEBRA_TOL = 1e-12
#: the I_n estimate must reach this far below one
IN_NORM_SLACK = 1e-3
#: the weak-class sup over restarts must reach this fraction of ||u||
STABILITY_REACH = 0.99
SUP_RESTARTS = 64


@dataclass
class Outcome:
    margin: float
    tol: float
    payload: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.margin < -self.tol


# ---------------------------------------------------------------- helpers

def _value(r) -> float:
    return r.value if isinstance(r, NormResult) else float(r)


def _tol(cfg: CheckConfig, *results) -> float:
    exact = all(not isinstance(r, NormResult) or r.mode is Mode.EXACT for r in results)
    return cfg.exact_tol if exact else cfg.opt_tol


def _le(small, big, factor: float = 1.0) -> float:
    b = factor * _value(big)
    return (b - _value(small)) / max(1.0, abs(b))


def _eq(a, b) -> float:
    a, b = _value(a), _value(b)
    return -abs(a - b) / max(1.0, abs(a), abs(b))


def _norm(cfg, spec, x, seeds=()):
    return class_norm(spec, x, cfg.budget, seeds=seeds)


def _layout(fn):
    """Apply an n-sequence operation to a witness array shaped ``bounds + (k,)``."""
    def run(arr):
        arr = np.asarray(arr, dtype=float)
        return fn(NSeq(arr, FiniteSpace(arr.shape[-1]))).entries
    return run


def _ordered(cfg, spec: ClassSpec, small_x, big_x, to_big=None, to_small=None):
    """Evaluate both sides of ``||small|| <= ||big||`` with witness seeding."""
    if small_first(spec.kind):
        s = _norm(cfg, spec, small_x)
        b = _norm(cfg, spec, big_x, carry(spec.kind, s, to_big))
    elif spec.kind is Kind.MIXED:
        b = _norm(cfg, spec, big_x)
        s = _norm(cfg, spec, small_x, carry(spec.kind, b, to_small))
    else:
        s, b = _norm(cfg, spec, small_x), _norm(cfg, spec, big_x)
    return s, b


def _pick(rng, items):
    return items[int(rng.integers(len(items)))]


def rand_space(rng, cfg: CheckConfig) -> FiniteSpace:
    return _pick(rng, cfg.spaces)


def rand_spec(rng, cfg: CheckConfig, kind: Kind) -> ClassSpec:
    return _pick(rng, engine_grid(kind, cfg.p_grid, cfg.s_grid))


def rand_preset(rng, cfg: CheckConfig, family: str):
    return _pick(rng, preset_grid(family, cfg.p_grid, cfg.s_grid))


def rand_resized(rng, cfg: CheckConfig, max_dim: int | None = None) -> FiniteSpace:
    """A space with a configured exponent and a random dimension up to ``max_dim``."""
    s = rand_space(rng, cfg)
    d = int(rng.integers(1, (max_dim or cfg.max_dim) + 1))
    return FiniteSpace(d, s.exponent if s.dim > 1 else _pick(rng, [1.0, 2.0, INF]))


def rand_bounds(rng, cfg, order):
    return tuple(int(b) for b in rng.integers(1, cfg.max_bound + 1, size=order))


def rand_entries(rng, shape):
    """Gaussian entries, sometimes sparse, at a random overall scale."""
    a = rng.standard_normal(shape)
    if rng.random() < 0.5:
        a = a * (rng.random(shape[:-1] + (1,)) > 0.3)
    return a * 10.0 ** rng.uniform(-1.0, 1.0)


def rand_nseq(rng, cfg, space, order=None, min_order=1, max_order=None, degenerate=False) -> NSeq:
    if order is None:
        order = int(rng.integers(min_order, (max_order or cfg.max_order) + 1))
    bounds = rand_bounds(rng, cfg, order)
    if degenerate:
        return NSeq.zeros(bounds, space)
    return NSeq(rand_entries(rng, bounds + (space.dim,)), space)


def rand_seq1(rng, cfg, space, degenerate=False) -> NSeq:
    return rand_nseq(rng, cfg, space, order=1, degenerate=degenerate)


def rand_functional(rng, space) -> Functional:
    return Functional(rng.standard_normal(space.dim), space)


def rand_op(rng, sources, target, degenerate=False) -> MultiOp:
    shape = tuple(s.dim for s in sources) + (target.dim,)
    c = np.zeros(shape) if degenerate else rng.standard_normal(shape)
    return MultiOp(tuple(sources), target, c)


def _spec_json(spec):
    return spec.to_json()


# ---------------------------------------------------------------- sequence-class axioms

def unit_norm(rng, cfg, kind, degenerate):
    spec = rand_spec(rng, cfg, kind)
    space = rand_space(rng, cfg)
    order = int(rng.integers(1, cfg.max_order + 1))
    bounds = rand_bounds(rng, cfg, order)
    index = tuple(int(rng.integers(b)) for b in bounds)
    if degenerate or rng.random() < 0.5:
        v = np.zeros(space.dim)
        v[int(rng.integers(space.dim))] = rng.choice([-1.0, 1.0])
    else:
        v = rng.standard_normal(space.dim)
        v = v / float(lp_norms(v, space.exponent))
    x = unit_nseq(bounds, space, index, v)
    r = _norm(cfg, spec, x)
    return [Outcome(_eq(r, 1.0), _tol(cfg, r), {"spec": _spec_json(spec), "x": x.to_json()})]


def linf_embed(rng, cfg, kind, degenerate):
    spec = rand_spec(rng, cfg, kind)
    x = rand_nseq(rng, cfg, rand_space(rng, cfg), degenerate=degenerate)
    top = float(np.max(lp_norms(x.entries, x.space.exponent)))
    r = _norm(cfg, spec, x)
    return [Outcome(_le(top, r), _tol(cfg, r), {"spec": _spec_json(spec), "x": x.to_json()})]


def _equal(cfg, spec, x, y, fwd, back, payload):
    """``||x|| = ||y||`` as two seeded inequalities (``fwd`` maps x layouts to y layouts)."""
    s1, b1 = _ordered(cfg, spec, x, y, fwd, back)
    s2, b2 = _ordered(cfg, spec, y, x, back, fwd)
    return Outcome(min(_le(s1, b1), _le(s2, b2)), _tol(cfg, s1, b1, s2, b2), payload)


def symmetry(rng, cfg, kind, degenerate):
    spec = rand_spec(rng, cfg, kind)
    x = rand_nseq(rng, cfg, rand_space(rng, cfg), degenerate=degenerate)
    sigma = tuple(int(k) for k in rng.permutation(x.order))
    y = permute(x, sigma)
    fwd = _layout(lambda s: permute(s, sigma))
    back = _layout(lambda s: permute(s, inverse_permutation(sigma)))
    return [_equal(cfg, spec, x, y, fwd, back,
                   {"spec": _spec_json(spec), "x": x.to_json(), "sigma": list(sigma)})]


def fin_det(rng, cfg, kind, degenerate):
    spec = rand_spec(rng, cfg, kind)
    x = rand_nseq(rng, cfg, rand_space(rng, cfg), degenerate=degenerate)
    bounds = tuple(int(rng.integers(1, m + 1)) for m in x.bounds)
    t = truncate(x, bounds)
    z = zero_trailing(x, bounds)
    payload = {"spec": _spec_json(spec), "x": x.to_json(), "bounds": list(bounds)}
    # the truncation and its zero padding have the same norm
    out = [_equal(cfg, spec, t, z, _layout(lambda s: pad(s, x.bounds)), _layout(lambda s: truncate(s, bounds)),
                  payload)]
    # and never more than the full sequence
    s, b = _ordered(cfg, spec, z, x)
    out.append(Outcome(_le(s, b), _tol(cfg, s, b), payload))
    return out


def _embed_fixed(shape, axis, k):
    def run(arr):
        arr = np.asarray(arr, dtype=float)
        out = np.zeros(tuple(shape) + arr.shape[-1:])
        idx = [slice(None)] * len(shape)
        idx[axis] = k
        out[tuple(idx)] = arr
        return out
    return run


def down_regular(rng, cfg, kind, degenerate):
    spec = rand_spec(rng, cfg, kind)
    x = rand_nseq(rng, cfg, rand_space(rng, cfg), min_order=2, degenerate=degenerate)
    axis = int(rng.integers(x.order))
    k = int(rng.integers(x.bounds[axis]))
    small = fix_index(x, axis, k)
    s, b = _ordered(cfg, spec, small, x, _embed_fixed(x.bounds, axis, k),
                    _layout(lambda q: fix_index(q, axis, k)))
    return [Outcome(_le(s, b), _tol(cfg, s, b),
                    {"spec": _spec_json(spec), "x": x.to_json(), "axis": axis, "index": k})]


def _embed_diagonal(shape):
    def run(arr):
        arr = np.asarray(arr, dtype=float)
        out = np.zeros(tuple(shape) + arr.shape[-1:])
        idx = np.arange(arr.shape[0])
        out[(idx,) * len(shape)] = arr
        return out
    return run


def seq_compat(rng, cfg, kind, degenerate):
    spec = rand_spec(rng, cfg, kind)
    x = rand_nseq(rng, cfg, rand_space(rng, cfg), min_order=2, degenerate=degenerate)
    small = diagonal(x)
    s, b = _ordered(cfg, spec, small, x, _embed_diagonal(x.bounds), _layout(diagonal))
    return [Outcome(_le(s, b), _tol(cfg, s, b), {"spec": _spec_json(spec), "x": x.to_json()})]


def _scaling_exponents(spec: ClassSpec):
    """``(t, c)``: the class pairs with scalar ``l_t``; ``c`` is the multiplier power for MIXED."""
    t = spec.scalar_exponent()
    c = None
    if spec.kind is Kind.MIXED:
        r = spec.mixed_r
        c = 0.0 if r is INF else spec.q / r
    return t, c


def _scaled_pair(cfg, spec, a: NSeq, lam, axis):
    """``(||scale_axis(a, lam)||, ||a||)`` evaluated with witness seeding."""
    y = scale_axis(a, lam, axis)
    t, c = _scaling_exponents(spec)
    p = t if t is not INF else 1.0
    if small_first(spec.kind):
        s = _norm(cfg, spec, y)
        b = _norm(cfg, spec, a, through_scaling(spec.kind, s, lam, axis, p))
    elif spec.kind is Kind.MIXED:
        b = _norm(cfg, spec, a)
        s = _norm(cfg, spec, y, through_scaling(spec.kind, b, lam, axis, p, c))
    else:
        s, b = _norm(cfg, spec, y), _norm(cfg, spec, a)
    return s, b, y


def multiple_regular(rng, cfg, kind, degenerate):
    spec = rand_spec(rng, cfg, kind)
    a = rand_nseq(rng, cfg, rand_space(rng, cfg), max_order=max(1, cfg.max_order - 1), degenerate=degenerate)
    lam = rand_entries(rng, (int(rng.integers(1, cfg.max_bound + 1)), 1))[:, 0]
    axis = int(rng.integers(a.order + 1))
    t, _ = _scaling_exponents(spec)
    factor = float(lp_norms(lam, t))
    s, b, _ = _scaled_pair(cfg, spec, a, lam, axis)
    return [Outcome(_le(s, b, factor), _tol(cfg, s, b),
                    {"spec": _spec_json(spec), "a": a.to_json(), "lambda": lam.tolist(), "axis": axis})]


def _weak_ratio_sup(rng, cfg, u: LinearOp, p) -> float:
    """Largest ``||u v|| / ||v||`` seen by the weak engine on single-entry sequences."""
    spec = ClassSpec(Kind.WEAK, p)
    E, A = u.source, u.matrix
    V = rng.standard_normal((SUP_RESTARTS, E.dim))
    # a few conditional-gradient steps on the ratio from every restart
    for _ in range(10):
        G = norming_vectors(V @ A.T, u.target.exponent) @ A
        V = norming_vectors(G, E.dual_exponent)
        V = np.where(np.any(V, axis=1, keepdims=True), V, 1.0)
    best = 0.0
    for v in V:
        x = NSeq(v[None, :], E)
        den = _norm(cfg, spec, x).value
        if den > 0:
            best = max(best, _norm(cfg, spec, u.on(x)).value / den)
    return best


def linear_stability(rng, cfg, kind, degenerate):
    spec = rand_spec(rng, cfg, kind)
    E, F = rand_resized(rng, cfg), rand_resized(rng, cfg)
    u = LinearOp(E, F, np.zeros((F.dim, E.dim)) if degenerate else rng.standard_normal((F.dim, E.dim)))
    x = rand_nseq(rng, cfg, E)
    ux = u.on(x)
    if small_first(spec.kind):
        s = _norm(cfg, spec, ux)
        b = _norm(cfg, spec, x, through_linear(spec.kind, s, u.matrix))
    elif spec.kind is Kind.MIXED:
        b = _norm(cfg, spec, x)
        s = _norm(cfg, spec, ux, through_linear(spec.kind, b, u.matrix))
    else:
        s, b = _norm(cfg, spec, ux), _norm(cfg, spec, x)
    un = opnorm(u)
    payload = {"spec": _spec_json(spec), "u": u.to_json(), "x": x.to_json()}
    out = [Outcome(_le(s, b, un), _tol(cfg, s, b), payload)]
    if spec.kind is Kind.WEAK and un > 0 and E.dim <= 4:
        reach = _weak_ratio_sup(rng, cfg, u, spec.p)
        out.append(Outcome((reach - STABILITY_REACH * un) / max(1.0, un), 0.0,
                           {**payload, "reach": reach, "opnorm": un}))
    return out


# ---------------------------------------------------------------- operator level

def mult1(rng, cfg, family, degenerate):
    preset = rand_preset(rng, cfg, family)
    n = int(rng.integers(1, cfg.max_order + 1))
    lams = [rand_entries(rng, (int(rng.integers(1, cfg.max_bound + 1)), 1))[:, 0] for _ in range(n)]
    if degenerate:
        lams[0] = np.zeros_like(lams[0])
    lhs = _norm(cfg, preset.output_spec, outer_scalars(*lams))
    factors = [_norm(cfg, preset.input_spec, NSeq.scalars(l)) for l in lams]
    rhs = float(np.prod([f.value for f in factors]))
    return [Outcome(_le(lhs, rhs), _tol(cfg, lhs, *factors),
                    {"preset": preset.to_json(), "lambdas": [l.tolist() for l in lams]})]


def ideal_ineq(rng, cfg, family, degenerate):
    preset = rand_preset(rng, cfg, family)
    n = 2
    dmax = min(3, cfg.max_dim)
    G = [rand_resized(rng, cfg, dmax) for _ in range(n)]
    E = [rand_resized(rng, cfg, dmax) for _ in range(n)]
    F, F2 = rand_resized(rng, cfg, dmax), rand_resized(rng, cfg, dmax)
    T = rand_op(rng, E, F, degenerate)
    t = LinearOp(F, F2, rng.standard_normal((F2.dim, F.dim)))
    us = [LinearOp(g, e, rng.standard_normal((e.dim, g.dim))) for g, e in zip(G, E)]
    Xs = [rand_seq1(rng, cfg, g) for g in G]
    if any(_norm(cfg, preset.input_spec, X).value == 0.0 for X in Xs):
        return [Outcome(0.0, 0.0, {})]
    passed, margin, modes = ideal_witness_check(t, T, us, Xs, [preset.input_spec] * n, preset.output_spec,
                                                cfg.budget, tol=cfg.exact_tol, return_modes=True)
    tol = cfg.exact_tol if all(m is Mode.EXACT for m in modes) else cfg.opt_tol
    return [Outcome(margin, tol, {"preset": preset.to_json(), "T": T.to_json(), "t": t.to_json(),
                                  "u": [u.to_json() for u in us], "X": [X.to_json() for X in Xs]})]


#: search budget for the I_n estimate inside the suite
IN_SEARCH = OptBudget(starts=2, iterations=20)


def in_norm_one(rng, cfg, family, degenerate):
    from ..operators import product_op

    preset = rand_preset(rng, cfg, family)
    n = int(rng.integers(1, min(2, cfg.max_order) + 1))
    caps = (min(3, cfg.max_bound),) * n
    prob = SummingProblem(product_op(n), (preset.input_spec,) * n, preset.output_spec, caps,
                          IN_SEARCH.with_seed(int(rng.integers(2**31))), cfg.budget)
    est = estimate_lower(prob)
    tol = cfg.exact_tol if all(m is Mode.EXACT for m in est.modes) else cfg.opt_tol
    payload = {"preset": preset.to_json(), "n": n, "caps": list(caps), "value": est.value}
    return [Outcome(1.0 - est.value, tol, payload),
            Outcome(est.value - (1.0 - IN_NORM_SLACK), 0.0, payload)]


def _ops_setting(rng, cfg, n, degenerate, equal_sources=False):
    dmax = min(3, cfg.max_dim)
    if equal_sources:
        E = [rand_resized(rng, cfg, dmax)] * n
    else:
        E = [rand_resized(rng, cfg, dmax) for _ in range(n)]
    F = rand_resized(rng, cfg, dmax)
    return E, F, rand_op(rng, E, F, degenerate)


def _algebra(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    return -float(np.max(np.abs(a - b), initial=0.0)) / scale


def _restriction_outcomes(cfg, spec, small, big, payload):
    """Exact ``small = fix_index(big, 0, 0)`` plus the down-regular inequality."""
    out = [Outcome(_algebra(small.entries, fix_index(big, 0, 0).entries), ALGEBRA_TOL, payload)]
    s, b = _ordered(cfg, spec, small, big, _embed_fixed(big.bounds, 0, 0),
                    _layout(lambda q: fix_index(q, 0, 0)))
    out.append(Outcome(_le(s, b), _tol(cfg, s, b), payload))
    return out


def ch1(rng, cfg, family, degenerate):
    preset = rand_preset(rng, cfg, family)
    n = int(rng.integers(2, max(2, cfg.max_order) + 1))
    E, F, T = _ops_setting(rng, cfg, n, degenerate)
    a = rng.standard_normal(E[0].dim)
    Xs = [rand_seq1(rng, cfg, e) for e in E[1:]]
    small = apply_batch(restrict(T, a, 0), *Xs)
    big = apply_batch(T, NSeq(a[None, :], E[0]), *Xs)
    payload = {"preset": preset.to_json(), "T": T.to_json(), "a": a.tolist(), "X": [X.to_json() for X in Xs]}
    return _restriction_outcomes(cfg, preset.output_spec, small, big, payload)


def ch2(rng, cfg, family, degenerate):
    preset = rand_preset(rng, cfg, family)
    n = int(rng.integers(2, max(2, cfg.max_order) + 1))
    E, F, T = _ops_setting(rng, cfg, n, degenerate, equal_sources=True)
    P = symmetrize(T)
    a = rng.standard_normal(E[0].dim)
    Pa = poly_restrict(P, a)
    axis = int(rng.integers(n))
    payload = {"preset": preset.to_json(), "T": T.to_json(), "a": a.tolist(), "axis": axis}
    # the restricted polynomial's operator is the restricted symmetric operator, on any axis
    out = [Outcome(_algebra(Pa.coefficients, restrict(P.operator, a, axis).coefficients), ALGEBRA_TOL, payload)]
    Xs = [rand_seq1(rng, cfg, E[0]) for _ in range(n - 1)]
    small = apply_batch(Pa.operator, *Xs)
    big = apply_batch(P.operator, NSeq(a[None, :], E[0]), *Xs)
    payload = {**payload, "X": [X.to_json() for X in Xs]}
    return out + _restriction_outcomes(cfg, preset.output_spec, small, big, payload)


def _scaling_outcomes(cfg, preset, small, big, lam, axis, payload):
    """Exact ``small = scale_axis(big, lam, axis)`` plus the multiple-regular inequality."""
    out = [Outcome(_algebra(small.entries, scale_axis(big, lam, axis).entries), ALGEBRA_TOL, payload)]
    spec = preset.output_spec
    fac = _norm(cfg, preset.input_spec, NSeq.scalars(lam))
    s, b, _ = _scaled_pair(cfg, spec, big, lam, axis)
    out.append(Outcome(_le(s, b, fac.value), _tol(cfg, s, b, fac), payload))
    return out


def ch3(rng, cfg, family, degenerate):
    preset = rand_preset(rng, cfg, family)
    n = int(rng.integers(1, max(1, cfg.max_order - 1) + 1))
    E, F, T = _ops_setting(rng, cfg, n, degenerate)
    En = rand_resized(rng, cfg, min(3, cfg.max_dim))
    gamma = rand_functional(rng, En)
    Xs = [rand_seq1(rng, cfg, e) for e in E]
    Xn = rand_seq1(rng, cfg, En)
    big = apply_batch(T, *Xs)
    small = apply_batch(extend_by_functional(T, gamma), *Xs, Xn)
    lam = Xn.flat() @ gamma.coefficients
    payload = {"preset": preset.to_json(), "T": T.to_json(), "gamma": gamma.coefficients.tolist(),
               "X": [X.to_json() for X in Xs + [Xn]]}
    return _scaling_outcomes(cfg, preset, small, big, lam, n, payload)


def ch4(rng, cfg, family, degenerate):
    preset = rand_preset(rng, cfg, family)
    n = int(rng.integers(1, max(1, cfg.max_order - 1) + 1))
    E, F, T = _ops_setting(rng, cfg, n, degenerate, equal_sources=True)
    P = symmetrize(T)
    phi = rand_functional(rng, E[0])
    Q = poly_scalar_extend(P, phi)
    payload = {"preset": preset.to_json(), "T": T.to_json(), "phi": phi.coefficients.tolist()}
    # diagonal identity (phi P)(x) = phi(x) P(x)
    xs = rng.standard_normal((8, E[0].dim))
    out = [Outcome(min(_algebra(Q(x), phi(x) * P(x)) for x in xs), ALGEBRA_TOL, payload)]
    X = rand_seq1(rng, cfg, E[0])
    lam = X.flat() @ phi.coefficients
    big = apply_batch(P.operator, *[X] * n)
    small = apply_batch(Q.operator, *[X] * (n + 1))
    spec = preset.output_spec
    fac = _norm(cfg, preset.input_spec, NSeq.scalars(lam))
    # every term of the symmetric sum is a permuted scaling of ``big``
    if small_first(spec.kind):
        s = _norm(cfg, spec, small)
        t, _ = _scaling_exponents(spec)
        seeds = []
        for k in range(n + 1):
            seeds += through_scaling(spec.kind, s, lam, k, t if t is not INF else 1.0)
        b = _norm(cfg, spec, big, seeds)
    else:
        s, b = _norm(cfg, spec, small), _norm(cfg, spec, big)
    out.append(Outcome(_le(s, b, fac.value), _tol(cfg, s, b, fac), {**payload, "X": X.to_json()}))
    return out


def lemma_pa(rng, cfg, subject, degenerate):
    n = int(rng.integers(2, max(2, cfg.max_order) + 1))
    E = FiniteSpace(int(rng.integers(1, min(3, cfg.max_dim) + 1)))
    F = FiniteSpace(int(rng.integers(1, 3)))
    T = rand_op(rng, [E] * n, F, degenerate)
    P = symmetrize(T)
    a = rng.standard_normal(E.dim)
    x = rng.standard_normal(E.dim)
    errs = [
        # the polynomial agrees with T on the diagonal
        _algebra(P(x), apply(T, *[x] * n)),
        # polarizing the diagonal values of T gives back the symmetric operator
        _algebra(polarize(lambda v: apply(T, *[v] * n), n, E, F), P.coefficients),
        # polarizing x -> A(a, x, ..., x) gives the restricted operator
        _algebra(polarize(lambda v: apply(P.operator, a, *[v] * (n - 1)), n - 1, E, F),
                 poly_restrict(P, a).coefficients),
    ]
    errs += [_algebra(poly_restrict(P, a).coefficients, restrict(P.operator, a, k).coefficients)
             for k in range(n)]
    return [Outcome(min(errs), ALGEBRA_TOL, {"T": T.to_json(), "a": a.tolist(), "x": x.tolist()})]


CHECKERS = {
    PropertyId.UNIT_NORM: unit_norm,
    PropertyId.LINF_EMBED: linf_embed,
    PropertyId.SYMMETRY: symmetry,
    PropertyId.FIN_DET: fin_det,
    PropertyId.LINEAR_STABILITY: linear_stability,
    PropertyId.MULT1: mult1,
    PropertyId.IDEAL_INEQ: ideal_ineq,
    PropertyId.IN_NORM_ONE: in_norm_one,
    PropertyId.SEQ_COMPAT: seq_compat,
    PropertyId.DOWN_REGULAR: down_regular,
    PropertyId.MULTIPLE_REGULAR: multiple_regular,
    PropertyId.CH1: ch1,
    PropertyId.CH2: ch2,
    PropertyId.CH3: ch3,
    PropertyId.CH4: ch4,
    PropertyId.LEMMA_PA: lemma_pa,
}

ENGINE_PROPERTIES = frozenset({
    PropertyId.UNIT_NORM, PropertyId.LINF_EMBED, PropertyId.SYMMETRY, PropertyId.FIN_DET,
    PropertyId.LINEAR_STABILITY, PropertyId.SEQ_COMPAT, PropertyId.DOWN_REGULAR,
    PropertyId.MULTIPLE_REGULAR,
})
