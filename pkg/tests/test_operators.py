import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumnorm import NSeq
from sumnorm.operators import (LinearOp, MultiOp, Polynomial, apply, apply_batch, compose, extend_by_functional,
                               finite_type, opnorm, poly_restrict, poly_scalar_extend, polarize, product_op,
                               restrict, symmetrize)
from sumnorm.spaces import INF, FiniteSpace, Functional, InputError, lp_norm, scalar_field

K = scalar_field()
E2 = FiniteSpace(2)


def test_apply_examples():
    assert apply(product_op(2), 2.0, 3.0) == pytest.approx(6.0)
    T = MultiOp((E2, E2), E2, np.random.default_rng(0).standard_normal((2, 2, 2)))
    assert np.all(apply(T, [0, 0], [1, 2]) == 0)
    b = [0.5, -1.0]
    F = finite_type([Functional([1, 0], E2), Functional([0, 1], E2)], b)
    assert np.allclose(apply(F, [1, 0], [0, 1]), b)


def test_apply_batch_examples():
    X1 = NSeq.scalars([1.0, 0.0])
    X2 = NSeq.scalars([1.0, 1.0])
    assert np.array_equal(apply_batch(product_op(2), X1, X2).values(), [[1, 1], [0, 0]])
    Z = apply_batch(product_op(2), NSeq.scalars([0.0]), X2)
    assert Z.is_zero()
    assert apply_batch(product_op(2), NSeq.scalars([2.0]), NSeq.scalars([-3.0])).values()[0, 0] == -6.0


def test_compose_examples(rng):
    E, F = FiniteSpace(3), FiniteSpace(2)
    T = MultiOp((E, F), E2, rng.standard_normal((3, 2, 2)))
    same = compose(LinearOp.identity(E2), T, LinearOp.identity(E), LinearOp.identity(F))
    assert np.allclose(same.coefficients, T.coefficients)
    doubled = compose(LinearOp(E2, E2, 2 * np.eye(2)), T, LinearOp.identity(E), LinearOp.identity(F))
    assert np.allclose(doubled.coefficients, 2 * T.coefficients)
    zero = compose(LinearOp.identity(E2), T, LinearOp(E, E, np.zeros((3, 3))), LinearOp.identity(F))
    assert zero.is_zero()


@given(st.integers(0, 10**6))
def test_compose_commutes_with_application(seed):
    rng = np.random.default_rng(seed)
    G1, G2, E1, E2_, F, F2 = (FiniteSpace(int(d)) for d in rng.integers(1, 4, size=6))
    T = MultiOp((E1, E2_), F, rng.standard_normal((E1.dim, E2_.dim, F.dim)))
    t = LinearOp(F, F2, rng.standard_normal((F2.dim, F.dim)))
    u1 = LinearOp(G1, E1, rng.standard_normal((E1.dim, G1.dim)))
    u2 = LinearOp(G2, E2_, rng.standard_normal((E2_.dim, G2.dim)))
    x, y = rng.standard_normal(G1.dim), rng.standard_normal(G2.dim)
    lhs = apply(compose(t, T, u1, u2), x, y)
    rhs = t.matrix @ apply(T, u1.matrix @ x, u2.matrix @ y)
    assert np.allclose(lhs, rhs)


def test_finite_type_examples():
    F = finite_type([Functional([1, 0], E2)], [0, 1], E2)
    # coefficients are stored source-first; as a target x source matrix:
    assert np.array_equal(F.coefficients.T, [[0, 0], [1, 0]])
    assert finite_type([Functional([0, 0], E2), Functional([1, 1], E2)], 1.0).is_zero()
    ones = finite_type([Functional([1.0], K)] * 3, 1.0)
    assert np.array_equal(ones.coefficients, product_op(3).coefficients)


def test_product_op_examples():
    assert apply(product_op(1), 5.0) == pytest.approx(5.0)
    assert apply(product_op(2), 3.0, -2.0) == pytest.approx(-6.0)
    assert apply(product_op(3), 1.0, 1.0, 1.0) == pytest.approx(1.0)
    with pytest.raises(InputError):
        product_op(0)


def test_restrict_examples(rng):
    r = restrict(product_op(2), [1.0], 0)
    assert np.array_equal(r.coefficients, [[1.0]])
    T = MultiOp((E2, E2), E2, rng.standard_normal((2, 2, 2)))
    assert restrict(T, [0, 0], 1).is_zero()
    phi, psi = Functional([1, 2], E2), Functional([-1, 3], E2)
    b = [0.5, 2.0]
    a = np.array([0.3, -0.7])
    got = restrict(finite_type([phi, psi], b), a, 0)
    want = finite_type([psi], phi(a) * np.asarray(b))
    assert np.allclose(got.coefficients, want.coefficients)


def test_extend_by_functional_examples(rng):
    T = MultiOp((E2,), FiniteSpace(3), rng.standard_normal((2, 3)))
    g = Functional([2.0, -1.0], E2)
    a = np.array([0.4, 1.3])
    assert np.allclose(restrict(extend_by_functional(T, g), a, 1).coefficients, g(a) * T.coefficients)
    assert extend_by_functional(T, Functional([0, 0], E2)).is_zero()
    ext = extend_by_functional(product_op(1), Functional([1.0], K))
    assert np.array_equal(ext.coefficients, product_op(2).coefficients)


def test_symmetrize_examples():
    P = symmetrize(MultiOp((E2, E2), K, [[0.0, 1.0], [0.0, 0.0]]))
    assert np.allclose(P.coefficients[..., 0], [[0, 0.5], [0.5, 0]])
    again = symmetrize(P.operator)
    assert np.allclose(again.coefficients, P.coefficients)
    assert np.array_equal(symmetrize(product_op(3)).coefficients, product_op(3).coefficients)
    with pytest.raises(InputError):
        Polynomial(2, E2, K, [[0.0, 1.0], [0.0, 0.0]])


def test_poly_restrict_examples():
    P = symmetrize(MultiOp((E2, E2), K, [[0.0, 1.0], [0.0, 0.0]]))
    Pa = poly_restrict(P, [1.0, 0.0])
    assert np.allclose(Pa.coefficients[:, 0], [0.0, 0.5])
    assert np.all(poly_restrict(P, [0.0, 0.0]).coefficients == 0)
    a = np.array([0.2, -1.1])
    assert np.allclose(restrict(P.operator, a, 0).coefficients, restrict(P.operator, a, 1).coefficients)


def test_poly_scalar_extend_examples(rng):
    T = MultiOp((E2, E2), FiniteSpace(3), rng.standard_normal((2, 2, 3)))
    P = symmetrize(T)
    phi = Functional(rng.standard_normal(2), E2)
    Q = poly_scalar_extend(P, phi)
    for x in rng.standard_normal((100, 2)):
        assert np.allclose(Q(x), phi(x) * P(x), atol=1e-12)
    assert np.all(poly_scalar_extend(P, Functional([0, 0], E2)).coefficients == 0)
    Pid = symmetrize(product_op(1))
    Q = poly_scalar_extend(Pid, Functional([1.0], K))
    assert np.allclose(Q.coefficients, product_op(2).coefficients)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_polarization_recovers_symmetric_operator(n, rng):
    E = FiniteSpace(2)
    T = MultiOp((E,) * n, E2, rng.standard_normal((2,) * n + (2,)))
    P = symmetrize(T)
    rec = polarize(lambda v: P(v), n, E, E2)
    assert np.max(np.abs(rec - P.coefficients)) <= 1e-12


def test_opnorm_examples(rng):
    E1 = FiniteSpace(3, 1.0)
    assert opnorm(LinearOp.identity(E1)) == pytest.approx(1.0)
    assert opnorm(LinearOp(E1, E1, 2 * np.eye(3))) == pytest.approx(2.0)
    assert opnorm(LinearOp(FiniteSpace(2, 1.0), FiniteSpace(2, INF), np.eye(2))) == pytest.approx(1.0)


@pytest.mark.parametrize("r,s", [(1.0, 2.0), (2.0, INF), (INF, 1.0), (2.0, 2.0), (3.0, 4.0)])
def test_opnorm_against_sampling(r, s, rng):
    E, F = FiniteSpace(3, r), FiniteSpace(2, s)
    A = rng.standard_normal((2, 3))
    est = opnorm(LinearOp(E, F, A))
    v = rng.standard_normal((20000, 3))
    ratios = [lp_norm(A @ x, s) / lp_norm(x, r) for x in v]
    assert max(ratios) <= est * (1 + 1e-9)
    assert max(ratios) >= 0.97 * est


def test_operator_json_roundtrip(rng):
    T = MultiOp((E2, FiniteSpace(3, 1.0)), FiniteSpace(1, INF), rng.standard_normal((2, 3, 1)))
    assert np.array_equal(MultiOp.from_json(T.to_json()).coefficients, T.coefficients)
    u = LinearOp(E2, FiniteSpace(3, 1.0), rng.standard_normal((3, 2)))
    assert np.array_equal(LinearOp.from_json(u.to_json()).matrix, u.matrix)
    with pytest.raises(InputError):
        MultiOp((E2,), E2, np.zeros((3, 2)))


def test_symmetrize_is_the_permutation_average(rng):
    T = MultiOp((E2,) * 3, K, rng.standard_normal((2, 2, 2, 1)))
    c = T.coefficients
    avg = sum(np.transpose(c, perm + (3,)) for perm in itertools.permutations(range(3))) / math.factorial(3)
    assert np.allclose(symmetrize(T).coefficients, avg)
