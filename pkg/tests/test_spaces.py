import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumnorm.spaces import (INF, FiniteSpace, Functional, InputError, as_exponent, ball_vertices,
                            dual_exponent, dual_extreme_points, dual_norm, lp_norm, norm, norming_functional,
                            norming_vectors, pair)

exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0, 4.0, INF])
vectors = st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=5)


def test_norm_examples():
    assert norm(FiniteSpace(2, 2.0), [3, 4]) == 5.0
    assert norm(FiniteSpace(2, 1.0), [1, -1]) == 2.0
    assert norm(FiniteSpace(3, INF), [0, 0, 0]) == 0.0


def test_pair_examples():
    E = FiniteSpace(2)
    assert pair(Functional([1, 0], E), [3, 4]) == 3.0
    assert pair(Functional([0, 0], E), [7, -2]) == 0.0
    assert pair(Functional([1, 1], E), [1, -1]) == 0.0


def test_dual_extreme_points():
    pts = {tuple(f.coefficients) for f in dual_extreme_points(FiniteSpace(2, INF))}
    assert pts == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    pts = {tuple(f.coefficients) for f in dual_extreme_points(FiniteSpace(2, 1.0))}
    assert pts == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert dual_extreme_points(FiniteSpace(3, 2.0)) is None


def test_exponent_parsing():
    assert as_exponent("inf") is INF
    assert dual_exponent(1.0) is INF and dual_exponent(INF) == 1.0
    assert dual_exponent(4.0) == pytest.approx(4.0 / 3.0)
    for bad in (0.5, -1, "x", float("nan")):
        with pytest.raises(InputError):
            as_exponent(bad)


def test_space_validation_and_json():
    with pytest.raises(InputError):
        FiniteSpace(0)
    with pytest.raises(InputError):
        Functional([1, 2, 3], FiniteSpace(2))
    E = FiniteSpace(3, INF, "E")
    assert FiniteSpace.from_json(E.to_json()) == E


@given(vectors, exponents)
def test_norming_vectors_attain_the_norm(v, r):
    v = np.asarray(v)
    phi = norming_vectors(v, r)[0]
    assert phi @ v == pytest.approx(lp_norm(v, r), rel=1e-9, abs=1e-12)
    if np.any(v):
        assert lp_norm(phi, dual_exponent(r)) == pytest.approx(1.0, rel=1e-9)


@given(vectors, vectors, exponents)
def test_hoelder(v, w, r):
    n = min(len(v), len(w))
    v, w = np.asarray(v[:n]), np.asarray(w[:n])
    E = FiniteSpace(n, r)
    f = Functional(w, E)
    assert abs(pair(f, v)) <= dual_norm(f) * norm(E, v) * (1 + 1e-12) + 1e-12


@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("r", [1.0, INF])
def test_vertices_are_unit_and_extreme(dim, r):
    V = ball_vertices(dim, r)
    assert np.allclose([lp_norm(v, r) for v in V], 1.0)
    # the norm of a random vector equals the max pairing with dual vertices
    D = ball_vertices(dim, dual_exponent(r))
    x = np.random.default_rng(dim).standard_normal(dim)
    assert np.max(D @ x) == pytest.approx(lp_norm(x, r))


def test_norming_functional():
    E = FiniteSpace(3, 1.0)
    f = norming_functional(E, [1, -2, 0])
    assert f([1, -2, 0]) == pytest.approx(3.0) and f.dual_norm == pytest.approx(1.0)


@pytest.mark.parametrize("r", [1.5, 2.0, 4.0])
@pytest.mark.parametrize("scale", [1e-306, 1e200])
def test_norms_survive_extreme_scales(r, scale):
    v = np.array([3.0, 4.0, 0.0]) * scale
    assert lp_norm(v, r) == pytest.approx(lp_norm([3.0, 4.0, 0.0], r) * scale, rel=1e-12)
    assert lp_norm(norming_vectors(v, r)[0], dual_exponent(r)) == pytest.approx(1.0, rel=1e-12)
