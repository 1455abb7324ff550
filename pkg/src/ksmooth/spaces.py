"""Finite-dimensional normed spaces: polyhedral balls and l_p norms.

Vectors and functionals are plain tuples of scalars; a functional acts on a
vector by the coordinate dot product.  A polyhedral space is given by the
vertices of its unit ball; the vertices of the polar ball (the facet
functionals) are derived by brute-force hyperplane enumeration when not
supplied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence, Union

from . import numeric as nm
from .errors import (
    DegenerateBall,
    DimensionMismatch,
    InvalidSpace,
    NotOnSphere,
    NotPolyhedral,
)
from .numeric import Scalar

Vector = tuple  # tuple[Scalar, ...]
Functional = tuple  # tuple[Scalar, ...]


@dataclass(frozen=True)
class Polyhedral:
    vertices: tuple[Vector, ...]
    facets: tuple[Functional, ...] | None = None


@dataclass(frozen=True)
class Lp:
    p: float

    def __post_init__(self) -> None:
        if not (1 < self.p < math.inf):
            raise InvalidSpace(f"l_p needs 1 < p < inf, got {self.p}")

    @property
    def q(self) -> float:
        return self.p / (self.p - 1)


NormSpec = Union[Polyhedral, Lp]


@dataclass(frozen=True, eq=False)
class Space:
    dim: int
    norm: NormSpec
    name: str = field(default="", compare=False)

    @property
    def is_polyhedral(self) -> bool:
        return isinstance(self.norm, Polyhedral)

    @property
    def is_exact(self) -> bool:
        return self.is_polyhedral and all(
            nm.is_exact(c) for v in self.norm.vertices for c in v
        )

    @cached_property
    def _facets(self) -> tuple[Functional, ...]:
        if self.norm.facets is not None:
            return self.norm.facets
        return enumerate_facets(self.norm.vertices, self.dim)

    def __repr__(self) -> str:
        if self.name:
            return f"Space({self.name})"
        return f"Space(dim={self.dim}, norm={self.norm!r})"


def _neg(v: Sequence) -> tuple:
    return tuple(-c for c in v)


def _key(v: Sequence) -> tuple:
    """Hashable identity of a vector; floats are rounded to the tolerance scale."""
    if all(nm.is_exact(c) for c in v):
        return tuple(nm.exact(c) for c in v)
    digits = max(0, int(-math.log10(nm.get_eps())) - 1)
    return tuple(round(float(c), digits) + 0.0 for c in v)


def canonical(v: Sequence) -> tuple:
    """The member of ``{v, -v}`` whose first nonzero coordinate is positive."""
    for c in v:
        s = nm.sign(c)
        if s:
            return tuple(v) if s > 0 else _neg(v)
    return tuple(v)


def same_vector(u: Sequence, v: Sequence, scale: float = 10.0) -> bool:
    return len(u) == len(v) and all(nm.close(a, b, scale) for a, b in zip(u, v))


def enumerate_facets(vertices: Sequence[Vector], dim: int) -> tuple[Functional, ...]:
    """Vertices of the polar ball of ``conv(vertices)``.

    Every ``dim``-subset of linearly independent points defines a unique
    hyperplane ``f(v) = 1``; it supports a facet exactly when no point lies
    beyond it.  The ball must contain the origin in its interior.
    """
    pts = [tuple(v) for v in vertices]
    if nm.rank(pts) < dim:
        raise DegenerateBall("vertex set does not span the space")
    seen: dict[tuple, Functional] = {}
    for combo in combinations(range(len(pts)), dim):
        sub = [pts[i] for i in combo]
        # antipodal points never share a supporting hyperplane
        if any(_key(_neg(a)) == _key(b) for a, b in combinations(sub, 2)):
            continue
        f = nm.solve(sub, [1] * dim)
        if f is None:
            continue
        f = tuple(f)
        k = _key(f)
        if k in seen:
            continue
        if all(nm.sign(nm.dot(f, p) - 1) <= 0 for p in pts):
            seen[k] = f
    facets = list(seen.values())
    facets.sort(key=lambda f: tuple(-float(c) for c in f))
    return tuple(facets)


def hull_vertices(points: Sequence[Vector], dim: int) -> tuple[Vector, ...]:
    """Extreme points of the symmetric hull of ``points`` (negatives added)."""
    pts = _symmetric_closure(points)
    facets = enumerate_facets(pts, dim)
    out = []
    for p in pts:
        active = [f for f in facets if nm.sign(nm.dot(f, p) - 1) == 0]
        if active and nm.rank(active) == dim:
            out.append(p)
    return tuple(out)


def _symmetric_closure(points: Sequence[Vector]) -> list[Vector]:
    out: list[Vector] = []
    seen = set()
    for p in points:
        for q in (tuple(p), _neg(p)):
            k = _key(q)
            if k not in seen:
                seen.add(k)
                out.append(q)
    return out


def polyhedral(
    vertices: Sequence[Sequence],
    facets: Sequence[Sequence] | None = None,
    *,
    name: str = "",
    validate: bool = True,
) -> Space:
    """Build a polyhedral space from unit-ball vertices (closed under negation).

    With ``validate`` the ball is checked to be full-dimensional, every listed
    vertex extreme, and supplied facets polar-consistent.
    """
    if not vertices:
        raise InvalidSpace("a polyhedral norm needs vertices")
    dim = len(vertices[0])
    if any(len(v) != dim for v in vertices):
        raise DimensionMismatch("vertices of unequal dimension")
    verts = tuple(_symmetric_closure(vertices))
    facs = None
    if facets is not None:
        if any(len(f) != dim for f in facets):
            raise DimensionMismatch("facet functionals must match the vertex dimension")
        facs = tuple(_symmetric_closure(facets))
    space = Space(dim, Polyhedral(verts, facs), name)
    if validate:
        _validate_polyhedral(space)
    return space


def _validate_polyhedral(space: Space) -> None:
    verts = space.norm.vertices
    if nm.rank(list(verts)) < space.dim:
        raise DegenerateBall("vertex set does not span the space")
    facets = facet_functionals(space)
    if space.norm.facets is not None:
        for v in verts:
            if not nm.close(max_value(facets, v), 1):
                raise InvalidSpace(f"vertex {v} is not on the facet-defined sphere")
        for f in facets:
            if not nm.close(max_value(verts, f), 1):
                raise InvalidSpace(f"facet {f} does not support the vertex hull")
    for v in verts:
        active = [f for f in facets if nm.close(nm.dot(f, v), 1)]
        if not active or nm.rank(active) < space.dim:
            raise InvalidSpace(f"listed vertex {v} is not an extreme point")


def max_value(points: Sequence[Sequence], f: Sequence):
    best = None
    for p in points:
        val = nm.dot(f, p)
        if best is None or nm.sign(val - best) > 0:
            best = val
    return best


def l1(n: int) -> Space:
    verts = []
    for i in range(n):
        e = [nm.ZERO] * n
        e[i] = nm.ONE
        verts.append(tuple(e))
    return polyhedral(verts, name=f"l1^{n}", validate=False)


def linf(n: int) -> Space:
    verts = [tuple(nm.QSqrt2(1 - 2 * ((m >> i) & 1)) for i in range(n)) for m in range(2**n)]
    facets = []
    for i in range(n):
        e = [nm.ZERO] * n
        e[i] = nm.ONE
        facets.append(tuple(e))
    return polyhedral(verts, facets, name=f"linf^{n}", validate=False)


def lp(n: int, p: float) -> Space:
    return Space(n, Lp(float(p)), f"l{p:g}^{n}")


def _check_dim(space: Space, v: Sequence) -> None:
    if len(v) != space.dim:
        raise DimensionMismatch(f"expected length {space.dim}, got {len(v)}")


def _lp_norm(v: Sequence, p: float) -> float:
    return sum(abs(float(c)) ** p for c in v) ** (1.0 / p)


def norm(space: Space, x: Sequence) -> Scalar:
    """Gauge of the unit ball: max over facet functionals, or the l_p formula."""
    _check_dim(space, x)
    if isinstance(space.norm, Lp):
        return _lp_norm(x, space.norm.p)
    return max_value(facet_functionals(space), x)


def dual_norm(space: Space, f: Sequence) -> Scalar:
    _check_dim(space, f)
    if isinstance(space.norm, Lp):
        return _lp_norm(f, space.norm.q)
    return max_value(space.norm.vertices, f)


def ext_points(space: Space) -> tuple[Vector, ...]:
    if not isinstance(space.norm, Polyhedral):
        raise NotPolyhedral("an l_p sphere has infinitely many extreme points")
    return space.norm.vertices


def facet_functionals(space: Space) -> tuple[Functional, ...]:
    if not isinstance(space.norm, Polyhedral):
        raise NotPolyhedral("l_p balls have no facets")
    return space._facets


def on_sphere(space: Space, x: Sequence) -> bool:
    return nm.close(norm(space, x), 1, scale=10.0)


def _require_unit(space: Space, x: Sequence) -> None:
    if not on_sphere(space, x):
        raise NotOnSphere(f"{tuple(x)} is not a unit vector")


def is_extreme(space: Space, x: Sequence) -> bool:
    _require_unit(space, x)
    if isinstance(space.norm, Lp):
        return True
    return any(same_vector(x, v) for v in space.norm.vertices)


def is_exposed(space: Space, x: Sequence) -> bool:
    # extreme and exposed points coincide on polytopes and on strictly convex balls
    return is_extreme(space, x)


def polar(space: Space) -> Space:
    """The dual space, whose unit ball is the polar of ``space``'s ball."""
    if not isinstance(space.norm, Polyhedral):
        return Space(space.dim, Lp(space.norm.q), f"dual({space.name})")
    return Space(
        space.dim,
        Polyhedral(facet_functionals(space), space.norm.vertices),
        f"dual({space.name})",
    )
