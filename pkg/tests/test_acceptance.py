"""Acceptance criteria, one test per criterion.

Each criterion is a plain function returning ``(ok, detail)`` so the module
can also be run directly: ``python tests/test_acceptance.py``.  Under pytest
the PASS/FAIL lines are printed in the terminal summary.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE, fixture_operator, fixture_space, q  # noqa: E402

from ksmooth import numeric as nm  # noqa: E402
from ksmooth import spaces as sp  # noqa: E402
from ksmooth.fuzz import random_instance, random_polygon  # noqa: E402
from ksmooth.numeric import QSqrt2  # noqa: E402
from ksmooth.operators import Operator, attainment_ext  # noqa: E402
from ksmooth.order import (  # noqa: E402
    Method,
    exposed_nsmooth_check,
    oracle_order,
    smoothness_order_rank,
    sum_rule,
    two_dim_classify,
)
from ksmooth.smoothness import bj_orthogonal, duality_map, supporting_face  # noqa: E402

T4 = 2 ** -0.25


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


# -- 1-5: reproduced examples ---------------------------------------------------------


def criterion_1():
    def work():
        T = fixture_operator("op_linf3_half_sum")
        return sum_rule(T), smoothness_order_rank(T)

    (s, r), secs = _timed(work)
    ok = s is not None and s.method is Method.SUM and s.k == 6 and r.k == 6 and secs < 1.0
    return ok, f"SumRule k={s.k if s else None}, RankOracle k={r.k}, {secs:.3f}s (limit 1s)"


def criterion_2():
    def work():
        T = fixture_operator("op_linf3_first_coordinate")
        att = attainment_ext(T)
        return att, sum_rule(T, att), smoothness_order_rank(T, att), oracle_order(T)

    (att, s, r, o), secs = _timed(work)
    dependent = nm.rank(list(att.canonical_points)) < att.r == 4
    ok = s is None and dependent and r.k == 3 and o.k == 3 and secs < 1.0
    return ok, (
        f"r={att.r} points of rank {nm.rank(list(att.canonical_points))}, SumRule "
        f"{'declined' if s is None else 'applied'}, RankOracle k={r.k}, PolytopeOracle k={o.k}, {secs:.3f}s"
    )


def criterion_3():
    T = fixture_operator("op_l4_rotation")
    att = attainment_ext(T)
    expected = [np.array([T4, T4, 0, 0]), np.array([T4, -T4, 0, 0])]  # canonical forms of 2^-1/4 (+-1, 1, 0, 0)
    pts = [np.array(p) for p in att.canonical_points]
    matched = att.r == 2 and all(any(np.max(np.abs(p - e)) <= 1e-6 for p in pts) for e in expected)
    s = sum_rule(T, att)
    x, y = att.canonical_points
    both_ways = bj_orthogonal(T.domain, x, y) and bj_orthogonal(T.domain, y, x)
    ok = matched and s is not None and s.certificate.bj_orthogonal is True and both_ways and s.k == 2
    err = max(min(np.max(np.abs(p - e)) for p in pts) for e in expected)
    return ok, f"r={att.r}, max deviation {err:.1e}, mutual BJ {both_ways}, SumRule k={s.k if s else None}"


def criterion_4():
    def work():
        T = fixture_operator("op_octagon_rotation")
        att = attainment_ext(T)
        return T, att, two_dim_classify(T, att), smoothness_order_rank(T, att)

    (T, att, two, rank), secs = _timed(work)
    exact = T.is_exact and att.exact and all(isinstance(c, QSqrt2) for row in T.matrix for c in row)
    dets = [v for _, _, v in two.certificate.determinants]
    zero = bool(dets) and all(isinstance(v, QSqrt2) and v == 0 for v in dets)
    ok = exact and att.r == 4 and two.method is Method.TWO_DIM and two.k == 3 and zero and rank.k == 3 and secs < 2.0
    return ok, f"exact={exact}, r={att.r}, TwoDim k={two.k}, {len(dets)} determinants all zero={zero}, RankOracle k={rank.k}, {secs:.3f}s"


def criterion_5():
    T = fixture_operator("op_octagon_to_irregular")
    two = two_dim_classify(T)
    rank = smoothness_order_rank(T)
    cert = two.certificate
    witness = cert.quadruple is not None and cert.determinant is not None and cert.determinant != 0
    ok = two.method is Method.TWO_DIM and two.k == 4 and witness and rank.k == 4
    return ok, f"TwoDim k={two.k}, witness determinant {cert.determinant}, RankOracle k={rank.k}"


# -- 6-10: properties -----------------------------------------------------------------


def criterion_6():
    def work():
        spaces = [fixture_space(n) for n in ("space_l1_3", "space_linf_3", "space_regular_octagon", "space_irregular_octagon")]
        rng = random.Random(6)
        spaces += [random_polygon(rng) for _ in range(50)]
        return [exposed_nsmooth_check(s) for s in spaces]

    checks, secs = _timed(work)
    failed = [c.space for c in checks if not c.passed]
    ok = not failed and len(checks) == 54 and secs < 5.0
    return ok, f"{len(checks) - len(failed)}/{len(checks)} spaces pass, {secs:.2f}s (limit 5s)"


def _random_codomain(rng):
    m = rng.choice((2, 3))
    kind = rng.random()
    if kind < 0.2:
        return sp.l1(m)
    if kind < 0.4:
        return sp.linf(m)
    while True:
        pts = [tuple(QSqrt2(Fraction(rng.randint(-3, 3), rng.randint(1, 2))) for _ in range(m)) for _ in range(m + 2)]
        if nm.rank(pts) == m:
            return sp.polyhedral(sp.hull_vertices(pts, m), validate=False)


def criterion_7():
    rng = random.Random(7)
    applied = agree = 0
    mismatches = []
    for i in range(200):
        n = rng.choice((2, 3, 4))
        y = _random_codomain(rng)
        while True:
            m = tuple(tuple(QSqrt2(rng.randint(-2, 2)) for _ in range(n)) for _ in range(y.dim))
            if any(c for row in m for c in row):
                break
        T = Operator(sp.l1(n), y, m)
        att = attainment_ext(T)
        independent = nm.rank(list(att.canonical_points)) == att.r
        if not independent:
            continue
        applied += 1
        s = sum_rule(T, att)
        k = smoothness_order_rank(T, att).k
        if s is not None and s.k == k:
            agree += 1
        else:
            mismatches.append(i)
    ok = applied > 0 and agree == applied
    detail = f"independent attainment in {applied}/200 instances; SumRule = RankOracle in {agree}/{applied}"
    return ok, detail + (f"; mismatched instances {mismatches}" if mismatches else "")


def planar_fuzz_instances(count, seed=7):
    out, index = [], 0
    while len(out) < count:
        kind, T = random_instance(seed, index)
        index += 1
        if T.domain.dim == 2 and T.codomain.dim == 2:
            out.append(T)
    return out


def criterion_8():
    def work():
        agree = with_two_dim = 0
        for T in planar_fuzz_instances(200):
            rank = smoothness_order_rank(T).k
            oracle = oracle_order(T).k
            two = two_dim_classify(T)
            ks = {rank, oracle}
            if two.method is Method.TWO_DIM:
                with_two_dim += 1
                ks.add(two.k)
            agree += len(ks) == 1
        return agree, with_two_dim

    (agree, with_two_dim), secs = _timed(work)
    ok = agree == 200 and secs < 30.0
    return ok, f"{agree}/200 agree (TwoDim hypotheses met in {with_two_dim}), {secs:.2f}s (limit 30s)"


def criterion_9():
    rng = random.Random(9)
    same = 0
    for i in range(100):
        _, T = random_instance(9, i)
        c = QSqrt2(Fraction(rng.randint(1, 1000), 100))
        if rng.random() < 0.25:
            c = QSqrt2(Fraction(rng.randint(0, 4), 2), Fraction(rng.randint(1, 6), 3))  # a + b*sqrt2 in (0, 10]
        assert 0 < float(c) <= 10
        a, b = smoothness_order_rank(T), smoothness_order_rank(T.scaled(c))
        same += a.k == b.k and a.attainment.canonical_points == b.attainment.canonical_points
    return same == 100, f"{same}/100 scaled operators keep k and the canonical attainment points"


GRID = np.arange(-8.0, 8.0 + 5e-4, 1e-3)
BJ_EPS = 1e-6


def grid_orthogonal(space, x, y) -> bool:
    x = np.array([float(c) for c in x])
    y = np.array([float(c) for c in y])
    pts = x[None, :] + GRID[:, None] * y[None, :]
    if space.is_polyhedral:
        F = np.array([[float(c) for c in f] for f in sp.facet_functionals(space)])
        vals, base = (pts @ F.T).max(axis=1), float((F @ x).max())
    else:
        p = space.norm.p
        vals, base = (np.abs(pts) ** p).sum(axis=1) ** (1 / p), float((np.abs(x) ** p).sum() ** (1 / p))
    return bool(vals.min() >= base - BJ_EPS)


def _bj_spaces():
    spaces = [sp.linf(2), sp.linf(3), sp.l1(3), fixture_space("space_regular_octagon"), fixture_space("space_irregular_octagon")]
    rng = random.Random(10)
    spaces += [random_polygon(rng) for _ in range(5)]
    spaces += [sp.lp(n, p) for n in (2, 3) for p in (1.5, 3.0, 4.0)]
    return spaces


def _bj_triple(rng, space):
    n = space.dim
    if space.is_polyhedral:
        verts = sp.ext_points(space)
        u, w = rng.sample(list(verts), 2)
        t = Fraction(rng.randint(0, 4), 4) if rng.random() < 0.5 else Fraction(0)
        x = tuple(t * a + (1 - t) * b for a, b in zip(u, w))
        nx = sp.norm(space, x)
        if nx == 0:
            x, nx = tuple(w), 1
        x = tuple(c / nx for c in x)
        fs = supporting_face(space, x).ext_functionals
        weights = [Fraction(rng.randint(1, 4)) for _ in fs]
        f = tuple(sum(wt * g[i] for wt, g in zip(weights, fs)) / sum(weights) for i in range(n))
        z = tuple(QSqrt2(Fraction(rng.randint(-4, 4), rng.randint(1, 3))) for _ in range(n))
    else:
        x = np.random.default_rng(rng.randint(0, 2**31)).standard_normal(n)
        x = tuple(x / np.sum(np.abs(x) ** space.norm.p) ** (1 / space.norm.p))
        f = duality_map(space, x)
        z = tuple(rng.uniform(-2, 2) for _ in range(n))
    if rng.random() < 0.5:
        # project z onto ker f along x, so that f in J(x) kills y
        fz = nm.dot(f, z)
        z = tuple(a - fz * b for a, b in zip(z, x))
    if all(float(c) == 0 for c in z):
        z = tuple(x)
    ny = sp.norm(space, z)
    return x, tuple(c / ny for c in z)


def criterion_10():
    rng = random.Random(10)
    spaces = _bj_spaces()
    agree = orthogonal = 0
    disagreements = []
    with nm.tolerance(BJ_EPS):
        for i in range(500):
            space = spaces[i % len(spaces)]
            x, y = _bj_triple(rng, space)
            james = bj_orthogonal(space, x, y)
            grid = grid_orthogonal(space, x, y)
            orthogonal += james
            if james == grid:
                agree += 1
            else:
                disagreements.append((space.name, x, y, james, grid))
    detail = f"{agree}/500 triples agree ({orthogonal} orthogonal, {500 - orthogonal} not), eps={BJ_EPS:g}"
    return agree == 500, detail + (f"; first disagreement {disagreements[0]}" if disagreements else "")


CRITERIA = {
    1: ("half-sum operator on linf^3 is 6-smooth via SumRule and RankOracle", criterion_1),
    2: ("first-coordinate operator: SumRule declines, oracles give 3", criterion_2),
    3: ("l4^4 rotation: 2 attainment points, mutual BJ path, k = 2", criterion_3),
    4: ("octagon rotation: exact, r = 4, determinants zero, k = 3", criterion_4),
    5: ("octagon to irregular octagon: witness determinant, k = 4", criterion_5),
    6: ("vertex orders on polytopes and 50 random polygons", criterion_6),
    7: ("SumRule = RankOracle on independent attainment from l1^n", criterion_7),
    8: ("RankOracle = PolytopeOracle = TwoDim on 200 planar instances", criterion_8),
    9: ("scaling invariance on 100 instances", criterion_9),
    10: ("BJ James criterion vs grid minimization on 500 triples", criterion_10),
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    title, fn = CRITERIA[number]
    ok, detail = fn()
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failures = 0
    for number in sorted(CRITERIA):
        title, fn = CRITERIA[number]
        ok, detail = fn()
        failures += not ok
        print(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    sys.exit(1 if failures else 0)
