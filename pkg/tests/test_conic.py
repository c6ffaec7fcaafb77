import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attainment_lab.conic import (
    AffineConicConstraint,
    HyperboloidSet,
    SecondOrderCone,
    constraint_slack,
    hyperboloid_contains,
    hyperboloid_kkt_residual,
    hyperboloid_project,
    soc_contains,
    soc_interior_contains,
    soc_margin,
    soc_project,
)
from attainment_lab.errors import DimensionError
from attainment_lab.robust import build_canonical

FIRST3 = SecondOrderCone(3, "first")
LAST3 = SecondOrderCone(3, "last")

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)


def test_cone_validation():
    with pytest.raises(ValueError):
        SecondOrderCone(1)
    with pytest.raises(ValueError):
        SecondOrderCone(3, "middle")
    with pytest.raises(DimensionError):
        soc_contains([1.0, 0.0], FIRST3)


def test_membership_examples():
    assert soc_contains([1.0, 0.0, 0.0], FIRST3, 0.0)
    x = (math.sqrt(2.0), -1.0)
    assert soc_contains([1.0, x[1], x[0]], LAST3, 0.0)
    assert not soc_contains([1.0, 1.0, 1.0], FIRST3)


def test_interior_examples():
    assert soc_interior_contains([2.0, 1.0, 0.0], FIRST3, 0.0)
    assert not soc_interior_contains([1.0, 1.0, 0.0], FIRST3, 0.0)
    # slack of (P) at x = (2, 0)
    assert soc_interior_contains([1.0, 0.0, 2.0], LAST3, 0.0)
    assert soc_margin([1.0, 0.0, 2.0], LAST3) == 1.0


def test_project_examples():
    np.testing.assert_array_equal(soc_project([5.0, 1.0, 1.0], FIRST3), [5.0, 1.0, 1.0])
    np.testing.assert_array_equal(soc_project([-3.0, 0.0, 0.0], FIRST3), [0.0, 0.0, 0.0])
    np.testing.assert_allclose(soc_project([0.0, 1.0, 0.0], FIRST3), [0.5, 0.5, 0.0], atol=1e-15)


def test_project_matches_grid_oracle():
    # cone points (a, a cos t, a sin t) for a >= 0, plus the interior via scaling
    y = np.array([0.0, 1.0, 0.0])
    a = np.linspace(0, 1.5, 601)
    t = np.linspace(-math.pi, math.pi, 721)
    A, T = np.meshgrid(a, t)
    pts = np.stack([A, A * np.cos(T), A * np.sin(T)], axis=-1).reshape(-1, 3)
    d = np.linalg.norm(pts - y, axis=1)
    best = pts[np.argmin(d)]
    np.testing.assert_allclose(soc_project(y, FIRST3), best, atol=5e-3)
    assert np.linalg.norm(soc_project(y, FIRST3) - y) <= d.min() + 1e-12


def test_projection_optimality(rng):
    cone = SecondOrderCone(4, "first")
    ys = rng.standard_normal((1000, 4)) * 3
    # random cone points: tail direction times a head no smaller than its norm
    tails = rng.standard_normal((1000, 3))
    heads = np.linalg.norm(tails, axis=1) * (1 + rng.random(1000))
    zs = np.column_stack([heads, tails])
    for y in ys:
        p = soc_project(y, cone)
        assert soc_contains(p, cone, 1e-12)
        assert np.all(np.linalg.norm(y - p) <= np.linalg.norm(zs - y, axis=1) + 1e-9)


@given(st.lists(finite, min_size=2, max_size=6))
@settings(max_examples=300, deadline=None)
def test_projection_idempotent(v):
    cone = SecondOrderCone(len(v), "first")
    p = soc_project(v, cone)
    np.testing.assert_allclose(soc_project(p, cone), p, atol=1e-12)
    assert soc_contains(p, cone, 1e-12)


@given(st.lists(finite, min_size=2, max_size=6))
@settings(max_examples=300)
def test_convention_rotation(v):
    y = np.array(v)
    first = SecondOrderCone(y.size, "first")
    last = SecondOrderCone(y.size, "last")
    assert soc_contains(y, first) == soc_contains(np.roll(y, -1), last)
    assert soc_interior_contains(y, first) == soc_interior_contains(np.roll(y, -1), last)


@given(st.lists(finite, min_size=2, max_size=5))
@settings(max_examples=300)
def test_hyperboloid_rho_zero_is_cone(v):
    x = np.array(v)
    assert hyperboloid_contains(x, HyperboloidSet(x.size, 0.0)) == soc_contains(x, SecondOrderCone(x.size, "first"))


def test_hyperboloid_examples():
    hs = HyperboloidSet(2, 1.0)
    assert hyperboloid_contains([1.0, 0.0], hs)
    assert hyperboloid_contains([math.sqrt(10.0), -3.0], hs)
    assert not hyperboloid_contains([1.0, 1.0], hs)
    with pytest.raises(ValueError):
        HyperboloidSet(2, -1.0)
    with pytest.raises(ValueError):
        HyperboloidSet(1)


def _boundary_oracle(x, rho=1.0, lo=-10.0, hi=10.0, m=2_000_001):
    t = np.linspace(lo, hi, m)
    d = np.hypot(np.sqrt(rho * rho + t * t) - x[0], t - x[1])
    i = int(np.argmin(d))
    return np.array([math.sqrt(rho * rho + t[i] ** 2), t[i]]), float(d[i])


def test_hyperboloid_project_examples():
    hs = HyperboloidSet(2, 1.0)
    np.testing.assert_array_equal(hyperboloid_project([3.0, 0.0], hs), [3.0, 0.0])
    z = hyperboloid_project([0.0, 0.0], hs)
    best, _ = _boundary_oracle([0.0, 0.0])
    np.testing.assert_allclose(z, [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(z, best, atol=1e-5)
    z = hyperboloid_project([0.0, -5.0], hs)
    _, dist = _boundary_oracle([0.0, -5.0])
    assert -5.0 < z[1] < 0.0
    assert abs(np.linalg.norm(z - [0.0, -5.0]) - dist) <= 1e-6


@given(st.lists(finite, min_size=2, max_size=5), st.one_of(st.just(0.0), st.floats(min_value=1e-6, max_value=5.0)))
@settings(max_examples=300, deadline=None)
def test_hyperboloid_project_properties(v, rho):
    x = np.array(v)
    hs = HyperboloidSet(x.size, rho)
    z = hyperboloid_project(x, hs)
    assert hyperboloid_contains(z, hs, 1e-9 * (1 + np.linalg.norm(x)))
    np.testing.assert_allclose(hyperboloid_project(z, hs), z, atol=1e-9 * (1 + np.linalg.norm(z)))
    if rho > 0:
        assert hyperboloid_kkt_residual(x, z, hs) <= 1e-9


def test_hyperboloid_project_beats_random_members(rng):
    hs = HyperboloidSet(3, 1.0)
    tails = rng.standard_normal((2000, 2)) * 4
    members = np.column_stack([np.sqrt(1 + np.sum(tails**2, axis=1)) + rng.random(2000), tails])
    for x in rng.standard_normal((200, 3)) * 5:
        z = hyperboloid_project(x, hs)
        assert np.all(np.linalg.norm(z - x) <= np.linalg.norm(members - x, axis=1) + 1e-9)


def test_hyperboloid_project_far_point():
    hs = HyperboloidSet(2, 1.0)
    z = hyperboloid_project([-1e9, -1e9], hs)
    assert hyperboloid_contains(z, hs, 1e-6)


def test_constraint_slack_examples():
    P = build_canonical(2).problem
    np.testing.assert_array_equal(constraint_slack([0.0, 0.0], P), [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(constraint_slack([3.0, -2.0], P), [1.0, -2.0, 3.0])
    P3 = build_canonical(3).problem
    np.testing.assert_array_equal(constraint_slack([4.0, 5.0, 6.0], P3), [1.0, 5.0, 6.0, 4.0])
    with pytest.raises(DimensionError):
        constraint_slack([1.0], P)


def test_slack_predicate_matches_hyperboloid_exactly():
    P = build_canonical(2).problem
    g = np.linspace(-10, 10, 201)
    for x1 in g:
        for x2 in g:
            lhs = soc_contains(constraint_slack([x1, x2], P), P.constraint.cone, 0.0)
            assert lhs == (x1 >= math.sqrt(1 + x2 * x2))


def test_constraint_rejects_bad_shapes():
    with pytest.raises(DimensionError):
        AffineConicConstraint(np.zeros((3, 2)), np.zeros(2), FIRST3)
    with pytest.raises(DimensionError):
        AffineConicConstraint(np.zeros((2, 2)), np.zeros(2), FIRST3)
    with pytest.raises(ValueError):
        AffineConicConstraint(np.full((3, 2), np.inf), np.zeros(3), FIRST3)


def test_degenerate_inputs():
    assert soc_contains(np.zeros(3), FIRST3)
    np.testing.assert_array_equal(soc_project(np.zeros(3), FIRST3), np.zeros(3))
    np.testing.assert_array_equal(hyperboloid_project([0.0, 0.0], HyperboloidSet(2, 0.0)), [0.0, 0.0])


def test_hyperboloid_project_tiny_rho():
    # rho small enough that rho^2 underflows behaves like the cone
    for rho in (1e-200, 5e-324):
        z = hyperboloid_project([-1.0, 1.0], HyperboloidSet(2, rho))
        assert hyperboloid_contains(z, HyperboloidSet(2, rho))
        assert np.linalg.norm(z) <= 1e-150
