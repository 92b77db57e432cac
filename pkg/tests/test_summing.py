import json

import numpy as np
import pytest

from sumnorm import NSeq
from sumnorm.operators import LinearOp, MultiOp, finite_type, product_op
from sumnorm.optim import OptBudget
from sumnorm.seqclass import LP, WEAK, class_norm
from sumnorm.spaces import INF, FiniteSpace, Functional, InputError, scalar_field
from sumnorm.summing import SummingProblem, estimate_lower, ideal_witness_check, ratio

K = scalar_field()
FAST = OptBudget(starts=16, iterations=100)


def test_ratio_examples():
    one = NSeq.scalars([1.0])
    assert ratio(product_op(2), [one, one], [LP(1), LP(1)], LP(1)) == pytest.approx(1.0)
    zero = MultiOp((K, K), K, np.zeros((1, 1, 1)))
    X = NSeq.scalars([1.0, -2.0])
    assert ratio(zero, [X, X], [LP(2), LP(2)], LP(2)) == 0.0
    with pytest.raises(InputError):
        ratio(product_op(2), [one, NSeq.scalars([0.0])], [LP(1), LP(1)], LP(1))


def test_ratio_is_scale_invariant(rng):
    E = FiniteSpace(2, 1.0)
    T = MultiOp((E, E), FiniteSpace(2), rng.standard_normal((2, 2, 2)))
    X = [NSeq(rng.standard_normal((3, 2)), E) for _ in range(2)]
    specs = [WEAK(2), WEAK(2)]
    base = ratio(T, X, specs, LP(2), FAST)
    scaled = ratio(T, [NSeq(3.5 * X[0].entries, E), NSeq(0.2 * X[1].entries, E)], specs, LP(2), FAST)
    assert scaled == pytest.approx(base, rel=1e-12)


def test_estimate_I2_is_one():
    prob = SummingProblem(product_op(2), (WEAK(2), WEAK(2)), LP(2), (3, 3))
    est = estimate_lower(prob)
    assert 1 - 1e-3 <= est.value <= 1 + 1e-9
    assert est.certified
    for X in est.witnesses:
        assert class_norm(WEAK(2), X).value == pytest.approx(1.0)


def test_estimate_zero_operator():
    zero = MultiOp((K, K), K, np.zeros((1, 1, 1)))
    assert estimate_lower(SummingProblem(zero, (WEAK(1), WEAK(1)), LP(1), (2, 2))).value == 0.0


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_estimate_finite_type_singletons(p):
    # oracle: sup over source-ball vertices of |phi(x) psi(y)| for unit phi, psi
    E = FiniteSpace(3, 1.0)
    phi, psi = Functional([1.0, -0.5, 0.2], E), Functional([0.3, 1.0, 1.0], E)
    T = finite_type([phi, psi], [1.0])
    oracle = max(abs(phi(x) * psi(y)) for x in np.eye(3) for y in np.eye(3))
    est = estimate_lower(SummingProblem(T, (WEAK(p), WEAK(p)), LP(p), (1, 1)))
    assert oracle == pytest.approx(1.0)
    assert est.value >= oracle - 1e-9


def test_estimate_grows_with_caps():
    E = FiniteSpace(2, INF)
    T = MultiOp((E, E), K, np.array([[1.0, 1.0], [1.0, -1.0]])[..., None])
    small = estimate_lower(SummingProblem(T, (WEAK(1), WEAK(1)), LP(1), (1, 1)))
    big = estimate_lower(SummingProblem(T, (WEAK(1), WEAK(1)), LP(1), (2, 2)))
    assert big.value >= small.value - 1e-12


def test_problem_json_roundtrip():
    prob = SummingProblem(product_op(2), (WEAK(1), WEAK(2)), LP(2), (2, 3))
    again = SummingProblem.from_json(json.loads(json.dumps(prob.to_json())))
    assert again.to_json() == prob.to_json()
    with pytest.raises(InputError):
        SummingProblem(product_op(2), (WEAK(1),), LP(2))


def _ideal_setting(rng):
    E, G, F = FiniteSpace(2, 1.0), FiniteSpace(3, 2.0), FiniteSpace(2, INF)
    T = MultiOp((E, E), F, rng.standard_normal((2, 2, 2)))
    us = [LinearOp(G, E, rng.standard_normal((2, 3))) for _ in range(2)]
    Xs = [NSeq(rng.standard_normal((3, 3)), G) for _ in range(2)]
    return T, us, Xs


def test_ideal_check_identities(rng):
    E, F = FiniteSpace(2, 1.0), FiniteSpace(2, INF)
    T = MultiOp((E, E), F, rng.standard_normal((2, 2, 2)))
    Xs = [NSeq(rng.standard_normal((3, 2)), E) for _ in range(2)]
    ids = [LinearOp.identity(E)] * 2
    ok, margin = ideal_witness_check(LinearOp.identity(F), T, ids, Xs, [WEAK(2)] * 2, LP(2), FAST)
    assert ok and abs(margin) <= 1e-12


def test_ideal_check_scaling_outer_map(rng):
    # both sides double; with both sides above one the relative margin is unchanged
    T, us, Xs = _ideal_setting(rng)
    T = MultiOp(T.sources, T.target, 100.0 * T.coefficients)
    F = T.target
    ok1, m1 = ideal_witness_check(LinearOp.identity(F), T, us, Xs, [WEAK(2)] * 2, LP(2), FAST)
    ok2, m2 = ideal_witness_check(LinearOp(F, F, 2 * np.eye(2)), T, us, Xs, [WEAK(2)] * 2, LP(2), FAST)
    assert ok1 and ok2
    assert m2 == pytest.approx(m1, abs=1e-9)
