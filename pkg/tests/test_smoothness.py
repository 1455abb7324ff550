from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from ksmooth import numeric as nm
from ksmooth import spaces as sp
from ksmooth.errors import NotOnSphere, WrongDimension, ZeroVector
from ksmooth.fuzz import random_polygon
from ksmooth.numeric import QSqrt2
from ksmooth.smoothness import (
    bj_orthogonal,
    duality_map,
    same_segment_interior,
    supporting_face,
    vector_order,
)

from conftest import R, q, regular_octagon

T4 = 2 ** -0.25


def grid_orthogonal(space, x, y, lo=-4.0, hi=4.0, step=1e-4, tol=1e-9) -> bool:
    """Definitional check: ||x + t y|| >= ||x|| on a grid of t."""
    x = np.array([float(c) for c in x])
    y = np.array([float(c) for c in y])
    ts = np.arange(lo, hi + step / 2, step)
    pts = x[None, :] + ts[:, None] * y[None, :]
    if space.is_polyhedral:
        F = np.array([[float(c) for c in f] for f in sp.facet_functionals(space)])
        vals = (pts @ F.T).max(axis=1)
        base = float((F @ x).max())
    else:
        p = space.norm.p
        vals = (np.abs(pts) ** p).sum(axis=1) ** (1 / p)
        base = float((np.abs(x) ** p).sum() ** (1 / p))
    return bool(vals.min() >= base - tol)


def test_face_at_cube_vertex():
    face = supporting_face(sp.linf(3), q(1, 1, 1))
    assert set(face.ext_functionals) == {q(1, 0, 0), q(0, 1, 0), q(0, 0, 1)}
    assert face.order == 3
    assert not face.smooth


def test_face_at_cube_facet_point():
    face = supporting_face(sp.linf(3), q(1, Fraction(1, 2), 0))
    assert face.ext_functionals == (q(1, 0, 0),)
    assert face.order == 1 and face.smooth


def test_l4_duality_map():
    face = supporting_face(sp.lp(2, 4), (T4, T4))
    (f,) = face.ext_functionals
    assert f == pytest.approx((2 ** -0.75, 2 ** -0.75), abs=1e-12)
    assert f[0] * T4 + f[1] * T4 == pytest.approx(1.0, abs=1e-12)
    assert face.order == 1


def test_duality_map_signs_and_zero_coordinates():
    x = np.array([-1.0, 0.0, 2.0])
    x = x / np.sum(np.abs(x) ** 3) ** (1 / 3)
    f = duality_map(sp.lp(3, 3), tuple(x))
    assert f[0] < 0 and f[1] == 0 and f[2] > 0
    assert np.dot(f, x) == pytest.approx(1.0)
    assert sp.dual_norm(sp.lp(3, 3), f) == pytest.approx(1.0)


def test_face_requires_unit_vector():
    with pytest.raises(NotOnSphere):
        supporting_face(sp.linf(3), q(1, 2, 0))


@pytest.mark.parametrize(
    "space, x, expected",
    [
        (regular_octagon(), q(1, 0), 2),
        (regular_octagon(), (R, R), 2),
        (sp.linf(3), q(1, 1, -1), 3),
        (sp.l1(3), q(1, 0, 0), 3),
        (sp.l1(3), q(Fraction(1, 2), Fraction(-1, 2), 0), 2),
        (sp.l1(3), q(Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)), 1),
    ],
)
def test_vector_order(space, x, expected):
    assert vector_order(space, x) == expected


def test_octagon_edge_midpoint_is_smooth():
    octagon = regular_octagon()
    mid = tuple((a + b) / 2 for a, b in zip(q(1, 0), (R, R)))
    unit = tuple(c / sp.norm(octagon, mid) for c in mid)
    assert sp.norm(octagon, mid) == 1  # midpoints of edges are already unit
    assert vector_order(octagon, unit) == 1


@pytest.mark.parametrize("seed", range(10))
def test_planar_orders_are_one_or_two(seed):
    rng = random.Random(seed)
    poly = random_polygon(rng)
    verts = sp.ext_points(poly)
    for v in verts:
        assert vector_order(poly, v) == 2
    for _ in range(10):
        u, w = rng.sample(list(verts), 2)
        t = Fraction(rng.randint(1, 9), 10)
        x = tuple(t * a + (1 - t) * b for a, b in zip(u, w))
        n = sp.norm(poly, x)
        if n == 0:
            continue
        x = tuple(c / n for c in x)
        expected = 2 if any(sp.same_vector(x, v) for v in verts) else 1
        assert vector_order(poly, x) == expected


# -- Birkhoff-James orthogonality ---------------------------------------------


def test_bj_l4_example():
    x = (T4, T4, 0.0, 0.0)
    y = (-T4, T4, 0.0, 0.0)
    space = sp.lp(4, 4)
    assert bj_orthogonal(space, x, y)
    assert bj_orthogonal(space, y, x)


def test_bj_linf_example():
    space = sp.linf(2)
    x, y = q(1, 1), q(-1, 1)
    assert bj_orthogonal(space, x, y)
    assert grid_orthogonal(space, x, y)


@pytest.mark.parametrize("space", [sp.linf(2), sp.l1(3), regular_octagon(), sp.lp(3, 4)])
def test_bj_vector_to_itself(space):
    x = tuple(QSqrt2(1) if i == 0 else QSqrt2(0) for i in range(space.dim))
    if not space.is_polyhedral:
        x = tuple(float(c) for c in x)
    assert not bj_orthogonal(space, x, x)


def test_bj_zero_vector():
    with pytest.raises(ZeroVector):
        bj_orthogonal(sp.linf(2), q(0, 0), q(1, 0))
    assert bj_orthogonal(sp.linf(2), q(1, 0), q(0, 0))


def test_bj_scale_invariance():
    space = regular_octagon()
    x, y = q(3, 1), q(-1, 2)
    base = bj_orthogonal(space, x, y)
    for s in (QSqrt2(Fraction(1, 7)), QSqrt2(2, 1)):
        assert bj_orthogonal(space, tuple(s * c for c in x), y) == base
        assert bj_orthogonal(space, x, tuple(-s * c for c in y)) == base


def test_bj_is_not_symmetric_in_linf():
    space = sp.linf(2)
    x, y = q(1, 0), q(1, 1)
    assert not bj_orthogonal(space, x, y)
    assert bj_orthogonal(space, y, x)


def test_bj_is_symmetric_in_l2():
    rng = np.random.default_rng(3)
    space = sp.lp(3, 2)
    for _ in range(50):
        x = rng.standard_normal(3)
        y = rng.standard_normal(3)
        y -= (y @ x) / (x @ x) * x
        assert bj_orthogonal(space, tuple(x), tuple(y)) and bj_orthogonal(space, tuple(y), tuple(x))


@pytest.mark.parametrize("seed", range(6))
def test_bj_matches_grid_oracle_on_polygons(seed):
    rng = random.Random(seed)
    poly = random_polygon(rng)
    verts = sp.ext_points(poly)
    agree = 0
    for _ in range(15):
        x = rng.choice(verts)
        y = q(rng.randint(-3, 3), rng.randint(-3, 3))
        if all(c == 0 for c in y):
            continue
        assert bj_orthogonal(poly, x, y) == grid_orthogonal(poly, x, y), (x, y)
        agree += 1
    assert agree > 0


# -- edges of planar spheres ---------------------------------------------------


@pytest.mark.parametrize(
    "u, v, expected",
    [
        (q(1, Fraction(1, 3)), q(1, Fraction(-1, 2)), True),
        (q(1, Fraction(1, 3)), q(1, 1), False),
        (q(1, Fraction(1, 3)), q(Fraction(1, 3), 1), False),
        (q(1, Fraction(1, 3)), q(-1, Fraction(1, 3)), False),
    ],
)
def test_same_segment_interior_linf(u, v, expected):
    assert same_segment_interior(sp.linf(2), u, v) is expected


def test_same_segment_interior_strictly_convex():
    u = (2 ** -0.25, 2 ** -0.25)
    v = (1.0, 0.0)
    assert not same_segment_interior(sp.lp(2, 4), u, v)


def test_same_segment_needs_the_plane():
    with pytest.raises(WrongDimension):
        same_segment_interior(sp.linf(3), q(1, 0, 0), q(1, 0, 0))
