import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumnorm import NSeq
from sumnorm.nseq import unit_nseq
from sumnorm.optim import OptBudget
from sumnorm.seqclass import (COHEN, LINF, LP, MID, MIXED, WEAK, ClassSpec, Kind, Mode, Strategy, StrategyError,
                              class_norm, cohen, mid_norm, mixed, mixed_norm, strong, weak, weak_norm)
from sumnorm.seqclass.transport import through_linear
from sumnorm.spaces import INF, FiniteSpace, InputError, scalar_field

K = scalar_field()
FAST = OptBudget(starts=16, iterations=100)


def brute_weak(X, r, p):
    """Weak norm by enumerating every sign vertex / unit vector of the dual ball."""
    d = X.shape[1]
    if r == 1.0:
        cands = [np.array(s) for s in itertools.product((1.0, -1.0), repeat=d)]
    else:
        cands = list(np.eye(d))
    return max(float(np.sum(np.abs(X @ c) ** p) ** (1 / p)) for c in cands)


def seq(a, dim=None, r=2.0):
    a = np.asarray(a, dtype=float)
    return NSeq(a, FiniteSpace(a.shape[-1], r)) if dim else NSeq.scalars(a)


# ---- strong and LINF

def test_lp_two_units():
    res = class_norm(LP(2), seq([[1, 0], [0, 1]]))
    assert res.value == pytest.approx(np.sqrt(2)) and res.mode is Mode.EXACT


def test_linf_unit_vector_is_one():
    x = unit_nseq((2, 3), FiniteSpace(3, 1.0), (1, 2), [0.5, -0.25, 0.25])
    res = class_norm(LINF(), x)
    assert res.value == 1.0 and res.mode is Mode.EXACT and res.witness == (1, 2)


# ---- weak

def test_weak_scalar_p1_is_l1():
    assert class_norm(WEAK(1), seq([3, -4, 1])).value == pytest.approx(8.0)


def test_weak_examples():
    E = FiniteSpace(2, 2.0)
    assert weak_norm(NSeq(np.eye(2), E), 2, Strategy.OPT).value == pytest.approx(1.0)
    assert weak_norm(NSeq([[1.0, 0], [1.0, 0]], E), 2).value == pytest.approx(np.sqrt(2))
    r = weak_norm(NSeq(np.eye(2), FiniteSpace(2, INF)), 1, Strategy.EXACT)
    assert r.value == pytest.approx(1.0) and r.mode is Mode.EXACT


def test_weak_exact_needs_polytope():
    with pytest.raises(StrategyError):
        weak_norm(NSeq(np.eye(3), FiniteSpace(3, 2.0)), 1.5, Strategy.EXACT)


@pytest.mark.parametrize("r", [1.0, INF])
@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_weak_against_enumeration(r, p, rng):
    for _ in range(10):
        d, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        X = rng.standard_normal((m, d))
        oracle = brute_weak(X, r, p)
        for strategy in (Strategy.EXACT, Strategy.OPT):
            res = weak_norm(NSeq(X, FiniteSpace(d, r)), p, strategy, FAST)
            assert res.value == pytest.approx(oracle, rel=1e-9)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6), st.sampled_from([1.0, 2.0, 3.0]))
def test_scalar_collapse(values, p):
    x = seq(values)
    expect = float(np.sum(np.abs(values) ** p) ** (1 / p))
    for spec in (WEAK(p), MID(p), LP(p)) + ((COHEN(p),) if p > 1 else ()):
        assert class_norm(spec, x, FAST).value == pytest.approx(expect, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("r", [1.0, 2.0, INF])
def test_single_entry_is_vector_norm(r, rng):
    v = rng.standard_normal(3)
    x = NSeq(v[None, :], FiniteSpace(3, r))
    expect = float(np.sum(np.abs(v) ** r) ** (1 / r)) if r is not INF else float(np.max(np.abs(v)))
    for spec in (WEAK(2), COHEN(2), MID(2), MIXED(4, 2), LP(3), LINF()):
        assert class_norm(spec, x, FAST).value == pytest.approx(expect, rel=1e-7)


@pytest.mark.parametrize("spec", [WEAK(2), COHEN(2), MID(1), MIXED(4, 1), LP(1), LINF()])
def test_zero_sequence(spec):
    res = class_norm(spec, NSeq.zeros((2, 2), FiniteSpace(3, 2.0)), FAST)
    assert res.value == 0.0


# ---- envelopes (the weak, strong and l_1 norms bracket the other classes)

def _random_x(rng, r):
    m, d = int(rng.integers(2, 6)), int(rng.integers(2, 4))
    return NSeq(rng.standard_normal((m, d)), FiniteSpace(d, r))


@pytest.mark.parametrize("r", [1.0, 2.0, INF])
def test_class_envelopes(r, rng):
    for _ in range(4):
        x = _random_x(rng, r)
        for p in (2.0, 4.0):
            w = class_norm(WEAK(p), x, FAST).value
            s = class_norm(LP(p), x).value
            l1 = class_norm(LP(1), x).value
            c = class_norm(COHEN(p), x, FAST)
            assert s * (1 - 1e-9) <= c.value <= l1 * (1 + 1e-9)
            assert c.upper is None or c.upper >= c.value * (1 - 1e-9)
            md = class_norm(MID(p), x, FAST).value
            assert w * (1 - 1e-9) <= md <= s * (1 + 1e-6)


def test_mid_spectral_path():
    X = np.diag([3.0, 2.0, 1.0])
    res = mid_norm(NSeq(X, FiniteSpace(3)), 2, trunc=2)
    assert res.mode is Mode.EXACT and res.value == pytest.approx(np.sqrt(13))


def test_mid_p1_reseeding_is_stable(rng):
    # the exact sign-pattern program leaves nothing for seeds to improve
    x = NSeq(rng.standard_normal((4, 3)), FiniteSpace(3, INF))
    a = mid_norm(x, 1, budget=FAST)
    b = mid_norm(x, 1, budget=FAST.with_seed(3), seeds=[a.witness])
    assert a.mode is Mode.EXACT and b.value == pytest.approx(a.value, rel=1e-9)


def test_cohen_witness_is_feasible(rng):
    # an independent, much larger ascent must not find the family's constraint norm above one
    from sumnorm.seqclass.cohen import constraint_norm

    big = OptBudget(starts=256, iterations=1000)
    for _ in range(6):
        x = NSeq(rng.standard_normal((2, 3, 3)), FiniteSpace(3))
        res = class_norm(COHEN(4), x, OptBudget(starts=16, iterations=100))
        n, _, _ = constraint_norm(res.witness.reshape(-1, 3), x.space, 4 / 3, big)
        assert n <= 1 + 1e-7
        assert np.sum(res.witness * x.entries) == pytest.approx(res.value, rel=1e-9)


# ---- mixed

def test_mixed_equal_exponents_is_weak(rng):
    x = _random_x(rng, 1.0)
    a, b = mixed_norm(x, 2, 2), weak_norm(x, 2)
    assert a.value == b.value and a.mode is b.mode


def test_mixed_unit_entry():
    x = unit_nseq((1, 1), K, (0, 0), [1.0])
    assert mixed_norm(x, 4, 2).value == pytest.approx(1.0)


@pytest.mark.parametrize("r", [1.0, 2.0, INF])
def test_mixed_envelope_and_factorization(r, rng):
    for _ in range(3):
        x = _random_x(rng, r)
        for s, q in ((4.0, 2.0), (2.0, 1.0), (4.0, 1.0)):
            res = mixed_norm(x, s, q, FAST)
            assert res.mode in (Mode.UPPER_BOUND, Mode.EXACT)
            assert weak_norm(x, q).value - 1e-9 <= res.value
            assert res.value <= class_norm(LP(q), x).value + 1e-9
            f = res.witness
            assert np.allclose(f.reconstruct().entries, x.entries)
            assert f.value == pytest.approx(res.value)


def test_mixed_scalar_closed_form():
    # over the scalars the mixed norm is the l_t norm with 1/t = 1/r + 1/s
    x = seq([1.0, -2.0, 0.5])
    s, q = 4.0, 2.0
    t = q  # 1/r + 1/s = 1/q
    res = mixed_norm(x, s, q)
    assert res.value == pytest.approx(float(np.sum(np.abs([1.0, 2.0, 0.5]) ** t) ** (1 / t)))


# ---- hooks and specs

def test_formula_hooks():
    assert strong.lp_exponent(3.0) == 3.0
    assert weak.functional_exponent(FiniteSpace(3, 1.0)) is INF
    assert cohen.constraint_exponent(4.0) == pytest.approx(4 / 3)
    assert mixed.multiplier_exponent(4.0, 2.0) == pytest.approx(4.0)
    assert mixed.multiplier_exponent(2.0, 2.0) is INF


@pytest.mark.parametrize("bad", [
    {"kind": "COHEN", "p": 1}, {"kind": "MIXED", "s": 1, "q": 2}, {"kind": "MIXED", "s": "inf", "q": 2},
    {"kind": "LP"}, {"kind": "NOPE", "p": 2}, {"kind": "MID", "p": 2, "trunc": 0}, {"kind": "LP", "p": 0.5},
])
def test_spec_validation(bad):
    with pytest.raises(InputError):
        ClassSpec.from_json(bad)


@pytest.mark.parametrize("spec", [LINF(), LP(2), WEAK(1), COHEN(4), MID(2, 5), MIXED(4, 2)])
def test_spec_and_result_json(spec, rng):
    assert ClassSpec.from_json(spec.to_json()) == spec
    x = _random_x(rng, 2.0)
    json.dumps(class_norm(spec, x, FAST).to_json())


def test_pulled_back_functional_certifies(rng):
    # ||u x||_w <= ||u|| ||x||_w survives bound-mode evaluation once seeded
    E, F = FiniteSpace(3, 2.0), FiniteSpace(2, 2.0)
    A = rng.standard_normal((2, 3))
    x = NSeq(rng.standard_normal((4, 3)), E)
    ux = NSeq(x.entries @ A.T, F)
    small = weak_norm(ux, 1.5, budget=FAST)
    big = weak_norm(x, 1.5, budget=FAST, seeds=through_linear(Kind.WEAK, small, A))
    assert small.value <= np.linalg.norm(A, 2) * big.value * (1 + 1e-12)
