"""Supporting functionals of unit vectors, their smoothness order, and
Birkhoff-James orthogonality."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import numeric as nm
from . import spaces as sp
from .errors import NotOnSphere, WrongDimension, ZeroVector
from .spaces import Functional, Lp, Space, Vector


@dataclass(frozen=True)
class SupportFace:
    """A unit vector with the extreme points of its supporting-functional set."""

    point: Vector
    ext_functionals: tuple[Functional, ...]
    order: int

    @property
    def smooth(self) -> bool:
        return self.order == 1


def duality_map(space: Space, x: Sequence) -> Functional:
    """The unique supporting functional of a unit vector of an l_p space."""
    p = space.norm.p
    n = sp.norm(space, x)
    return tuple(
        (1.0 if c > 0 else -1.0 if c < 0 else 0.0) * abs(c / n) ** (p - 1)
        for c in map(float, x)
    )


def supporting_face(space: Space, x: Sequence) -> SupportFace:
    if not sp.on_sphere(space, x):
        raise NotOnSphere(f"{tuple(x)} is not a unit vector")
    x = tuple(x)
    if isinstance(space.norm, Lp):
        return SupportFace(x, (duality_map(space, x),), 1)
    attained = tuple(
        f for f in sp.facet_functionals(space) if nm.close(nm.dot(f, x), 1, scale=10.0)
    )
    return SupportFace(x, attained, nm.rank(list(attained)))


def vector_order(space: Space, x: Sequence) -> int:
    return supporting_face(space, x).order


def _unit(space: Space, x: Sequence) -> tuple:
    n = sp.norm(space, x)
    if nm.sign(n) == 0:
        raise ZeroVector("x must be nonzero")
    return tuple(c / n for c in x)


def bj_orthogonal(space: Space, x: Sequence, y: Sequence) -> bool:
    """Whether ``||x + t*y|| >= ||x||`` for every real ``t``.

    Decided through supporting functionals: true iff some functional in
    J(x/||x||) vanishes on ``y``.  For a polytope J is the hull of its
    extreme functionals, so it suffices that their values on ``y`` straddle 0.
    """
    sp._check_dim(space, y)
    face = supporting_face(space, _unit(space, x))
    values = [nm.dot(f, y) for f in face.ext_functionals]
    if isinstance(space.norm, Lp):
        return abs(float(values[0])) <= nm.get_eps()
    lo = min(values, key=float)
    hi = max(values, key=float)
    return nm.sign(lo) <= 0 <= nm.sign(hi)


def same_segment_interior(space: Space, u: Sequence, v: Sequence) -> bool:
    """Whether ``u`` and ``v`` are relative-interior points of one edge of a
    two-dimensional unit sphere.  Never true for strictly convex spheres."""
    if space.dim != 2:
        raise WrongDimension("segment test is defined for planar spaces")
    fu = supporting_face(space, u)
    fv = supporting_face(space, v)
    if isinstance(space.norm, Lp):
        return False
    if not (fu.smooth and fv.smooth):
        return False
    return sp.same_vector(fu.ext_functionals[0], fv.ext_functionals[0])
