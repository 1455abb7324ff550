"""Randomized cross-checking of every computation path on small exact instances."""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from . import numeric as nm
from . import spaces as sp
from .errors import DegenerateBall, KSmoothError
from .operators import Operator, attainment_ext
from .order import crosscheck, exposed_nsmooth_check, smoothness_order_rank
from .spaces import Space

KINDS_2D = ("random", "identity", "signed-permutation", "rank-one", "vertex-map", "face-pattern", "face-pattern")


def _rational(rng: random.Random, height: int, dens: int = 3) -> nm.QSqrt2:
    return nm.QSqrt2(Fraction(rng.randint(-height, height), rng.randint(1, dens)))


def random_polygon(rng: random.Random, min_vertices: int = 4, max_vertices: int = 12) -> Space:
    """A symmetric polygon with small rational vertices."""
    while True:
        m = rng.randint(2, max_vertices // 2 + 1)
        pts = [(_rational(rng, 4), _rational(rng, 4)) for _ in range(m)]
        try:
            verts = sp.hull_vertices(pts, 2)
        except DegenerateBall:
            continue
        if min_vertices <= len(verts) <= max_vertices:
            return sp.polyhedral(verts, name=f"polygon{len(verts)}", validate=False)


def _angle_sorted(space: Space) -> list:
    return sorted(sp.ext_points(space), key=lambda v: math.atan2(float(v[1]), float(v[0])))


def _edge_functional(u, w) -> tuple:
    det = u[0] * w[1] - u[1] * w[0]
    return ((w[1] - u[1]) / det, (u[0] - w[0]) / det)


def face_pattern(rng: random.Random, x: Space) -> tuple[Space, tuple]:
    """A codomain and map under which every vertex of ``x`` attains the norm.

    Each canonical vertex of ``x`` gets its own supporting functional (a
    smooth image), two of them (a corner), or shares the edge functional
    with its neighbour; the codomain ball is the polar of those functionals,
    then moved by a random invertible matrix that also serves as the map.
    """
    xs = _angle_sorted(x)
    n = len(xs)
    funcs = []
    i = 0
    while i < n // 2:
        prev = _edge_functional(xs[i - 1], xs[i])
        nxt = _edge_functional(xs[i], xs[(i + 1) % n])
        pattern = rng.choice(("smooth", "smooth", "smooth", "corner", "shared"))
        if pattern == "shared":
            # the neighbour gets no functional of its own, so both images stay smooth
            funcs.append(nxt)
            i += 2
            continue
        i += 1
        weights = [Fraction(rng.randint(1, 3), 4)]
        if pattern == "corner":
            weights.append(Fraction(rng.randint(1, 3), 4) / 2)
        for t in weights:
            funcs.append(tuple(t * a + (1 - t) * b for a, b in zip(prev, nxt)))
    polar_pts = sp.hull_vertices(funcs, 2)
    ball = sp.enumerate_facets(polar_pts, 2)
    while True:
        a = tuple(tuple(nm.QSqrt2(rng.randint(-2, 2)) for _ in range(2)) for _ in range(2))
        if a[0][0] * a[1][1] - a[0][1] * a[1][0]:
            break
    verts = [tuple(nm.dot(row, v) for row in a) for v in ball]
    return sp.polyhedral(verts, name=f"pattern{len(verts)}", validate=False), a


def _matrix_2d(rng: random.Random, kind: str, x: Space, y: Space) -> tuple:
    if kind == "identity":
        return ((nm.ONE, nm.ZERO), (nm.ZERO, nm.ONE))
    if kind == "signed-permutation":
        s1, s2 = rng.choice((1, -1)), rng.choice((1, -1))
        if rng.random() < 0.5:
            return ((nm.QSqrt2(s1), nm.ZERO), (nm.ZERO, nm.QSqrt2(s2)))
        return ((nm.ZERO, nm.QSqrt2(s1)), (nm.QSqrt2(s2), nm.ZERO))
    if kind == "rank-one":
        u = [_rational(rng, 3, 1) for _ in range(2)]
        v = [_rational(rng, 3, 1) for _ in range(2)]
        return tuple(tuple(a * b for b in v) for a in u)
    if kind == "vertex-map":
        # send two adjacent domain vertices onto two codomain vertices
        xs, ys = _angle_sorted(x), _angle_sorted(y)
        i = rng.randrange(len(xs))
        j = rng.randrange(len(ys))
        v1, v2 = xs[i], xs[(i + 1) % len(xs)]
        w1, w2 = ys[j], ys[(j + rng.choice((1, 2))) % len(ys)]
        det = v1[0] * v2[1] - v1[1] * v2[0]
        inv = ((v2[1] / det, -v2[0] / det), (-v1[1] / det, v1[0] / det))
        w = ((w1[0], w2[0]), (w1[1], w2[1]))
        return tuple(
            tuple(w[r][0] * inv[0][c] + w[r][1] * inv[1][c] for c in range(2)) for r in range(2)
        )
    return tuple(tuple(_rational(rng, 3, 2) for _ in range(2)) for _ in range(2))


def random_instance(seed: int, index: int) -> tuple[str, Operator]:
    """Deterministic instance number ``index`` of the stream for ``seed``."""
    rng = random.Random(f"{seed}:{index}")
    while True:
        if rng.random() < 0.2:
            x = rng.choice((sp.l1(3), sp.linf(3)))
            y = rng.choice((sp.l1(3), sp.linf(3)))
            m = tuple(tuple(nm.QSqrt2(rng.choice((-1, 0, 0, 1))) for _ in range(3)) for _ in range(3))
            kind = "cube-3d"
        else:
            kind = rng.choice(KINDS_2D)
            x = random_polygon(rng, min_vertices=6 if kind == "face-pattern" else 4)
            if kind == "face-pattern":
                y, m = face_pattern(rng, x)
            else:
                y = x if kind == "identity" else random_polygon(rng)
                m = _matrix_2d(rng, kind, x, y)
        if any(c for row in m for c in row):
            return kind, Operator(x, y, m)


def _height(s: nm.QSqrt2) -> int:
    return max(abs(q.numerator) + q.denominator for q in (s.a, s.b))


def instance_size(T: Operator) -> tuple[int, int]:
    verts = len(sp.ext_points(T.domain)) + len(sp.ext_points(T.codomain))
    coords = [c for s in (T.domain, T.codomain) for v in sp.ext_points(s) for c in v]
    coords += [c for row in T.matrix for c in row]
    return verts, max(_height(nm.exact(c)) for c in coords)


def check_instance(T: Operator) -> tuple[int, str]:
    """Run every path and invariant on ``T``; returns (k, case) or raises."""
    joint = crosscheck(T)
    att = attainment_ext(T)
    if att.r == 0:
        raise AssertionError("empty attainment set")
    for i, x in enumerate(att.canonical_points):
        if not sp.is_extreme(T.domain, x):
            raise AssertionError(f"attainment point {x} is not extreme")
        if not nm.close(sp.norm(T.codomain, T(x)), att.op_norm):
            raise AssertionError(f"attainment point {x} does not attain the norm")
        for z in att.canonical_points[i + 1 :]:
            if sp.same_vector(x, z) or sp.same_vector(x, tuple(-c for c in z)):
                raise AssertionError("attainment points repeat up to sign")
    scaled = smoothness_order_rank(T.scaled(nm.QSqrt2(Fraction(7, 3))))
    if scaled.k != joint.k or scaled.attainment.canonical_points != att.canonical_points:
        raise AssertionError("order changed under positive scaling")
    for space in (T.domain, T.codomain):
        if space.dim == 2:
            check = exposed_nsmooth_check(space)
            if not check.passed:
                raise AssertionError("; ".join(check.violations))
    if T.domain.dim != 2:
        case = f"{T.domain.dim}d r={att.r}"
    elif "TwoDim" in joint.reports:
        case = joint.reports["TwoDim"].certificate.case
    else:
        case = f"deferred r={att.r}"
    return joint.k, case


@dataclass
class FuzzFailure:
    index: int
    kind: str
    error: str
    operator: Operator

    @property
    def size(self) -> tuple[int, int]:
        return instance_size(self.operator)


@dataclass
class FuzzSummary:
    seed: int
    count: int
    agreed: int = 0
    kinds: Counter = field(default_factory=Counter)
    cases: Counter = field(default_factory=Counter)
    orders: Counter = field(default_factory=Counter)
    failures: list[FuzzFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def minimal_failure(self) -> FuzzFailure | None:
        if not self.failures:
            return None
        return min(self.failures, key=lambda f: (f.size, f.index))

    def text(self) -> str:
        lines = [f"fuzz seed={self.seed} count={self.count}: {self.agreed}/{self.count} agree"]
        lines.append("kinds:  " + ", ".join(f"{k}={v}" for k, v in sorted(self.kinds.items())))
        lines.append("cases:  " + ", ".join(f"{k}={v}" for k, v in sorted(self.cases.items())))
        lines.append("orders: " + ", ".join(f"k={k}:{v}" for k, v in sorted(self.orders.items())))
        for f in self.failures:
            lines.append(f"FAIL #{f.index} ({f.kind}, size {f.size}): {f.error.splitlines()[0]}")
        return "\n".join(lines)


def run_fuzz(count: int, seed: int) -> FuzzSummary:
    if count < 1:
        raise ValueError("count must be at least 1")
    summary = FuzzSummary(seed, count)
    for i in range(count):
        kind, T = random_instance(seed, i)
        summary.kinds[kind] += 1
        try:
            k, case = check_instance(T)
        except (KSmoothError, AssertionError) as exc:
            summary.failures.append(FuzzFailure(i, kind, f"{type(exc).__name__}: {exc}", T))
            continue
        summary.agreed += 1
        summary.cases[case] += 1
        summary.orders[k] += 1
    return summary
