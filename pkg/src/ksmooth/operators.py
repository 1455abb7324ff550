"""Linear operators between spaces: operator norm and norm attainment on
extreme points of the domain ball."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import numeric as nm
from . import spaces as sp
from .errors import DimensionMismatch, NonFiniteAttainment, Unsupported, ZeroOperator
from .numeric import Scalar
from .smoothness import SupportFace, supporting_face
from .spaces import Lp, Space, Vector

SCAN_ANGLES = 4096
STARTS = 64
MAX_CLUSTERS = 64
CLUSTER_RADIUS = 1e-6
VALUE_RTOL = 1e-9
STATIONARITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Operator:
    domain: Space
    codomain: Space
    matrix: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self) -> None:
        m = tuple(tuple(row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(m) != self.codomain.dim or any(len(r) != self.domain.dim for r in m):
            raise DimensionMismatch(
                f"matrix must be {self.codomain.dim}x{self.domain.dim}"
            )

    def __call__(self, x: Sequence) -> Vector:
        if len(x) != self.domain.dim:
            raise DimensionMismatch("vector does not match the domain")
        return tuple(nm.dot(row, x) for row in self.matrix)

    def scaled(self, c) -> Operator:
        return Operator(
            self.domain, self.codomain, tuple(tuple(c * a for a in r) for r in self.matrix)
        )

    @property
    def is_exact(self) -> bool:
        return (
            self.domain.is_exact
            and self.codomain.is_exact
            and all(nm.is_exact(a) for r in self.matrix for a in r)
        )

    def float_matrix(self) -> np.ndarray:
        return np.array([[float(a) for a in r] for r in self.matrix], dtype=float)


@dataclass(frozen=True)
class AttainmentSet:
    """Canonical representatives of the norm-attaining extreme points.

    ``faces[i]`` is the support face of ``T x_i / ||T||`` in the codomain.
    ``exact`` marks an exact certificate; ``certified`` marks a finite set
    whose every point passed verification (always true when exact).
    """

    canonical_points: tuple[Vector, ...]
    faces: tuple[SupportFace, ...]
    op_norm: Scalar
    exact: bool
    certified: bool = True
    notes: tuple[str, ...] = field(default=())

    @property
    def r(self) -> int:
        return len(self.canonical_points)


def op_norm(T: Operator) -> Scalar:
    if isinstance(T.domain.norm, Lp):
        return _numeric_maximizers(T)[0]
    return max(
        (sp.norm(T.codomain, T(v)) for v in sp.ext_points(T.domain)),
        key=_order_key,
    )


def _order_key(s):
    # exact values sort exactly through QSqrt2 comparisons; floats as floats
    return s if nm.is_exact(s) else float(s)


def normalize(T: Operator) -> Operator:
    n = op_norm(T)
    if nm.sign(n) == 0:
        raise ZeroOperator("the zero operator cannot be normalized")
    return T.scaled(1 / n) if nm.is_exact(n) else T.scaled(1.0 / float(n))


def attainment_ext(T: Operator) -> AttainmentSet:
    if isinstance(T.domain.norm, Lp):
        return _attainment_lp(T)
    verts = sp.ext_points(T.domain)
    values = [sp.norm(T.codomain, T(v)) for v in verts]
    best = max(values, key=_order_key)
    if nm.sign(best) == 0:
        raise ZeroOperator("the zero operator attains its norm everywhere")
    exact = nm.is_exact(best)
    points: list[Vector] = []
    for v, val in zip(verts, values):
        if not nm.close(val, best, scale=10.0 * max(1.0, float(best))):
            continue
        c = sp.canonical(v)
        if not any(sp.same_vector(c, q) for q in points):
            points.append(c)
    points.sort(key=_point_key)
    faces = tuple(_image_face(T, x, best) for x in points)
    return AttainmentSet(tuple(points), faces, best, exact=exact, certified=True)


def _point_key(v):
    return tuple(-float(c) for c in v)


def _image_face(T: Operator, x: Vector, n: Scalar) -> SupportFace:
    y = T(x)
    if nm.is_exact(n) and all(nm.is_exact(c) for c in y):
        unit = tuple(c / n for c in y)
    else:
        m = float(sp.norm(T.codomain, y))
        unit = tuple(float(c) / m for c in y)
    return supporting_face(T.codomain, unit)


# -- l_p domains -------------------------------------------------------------


def _codomain_norm(T: Operator):
    cod = T.codomain
    if isinstance(cod.norm, Lp):
        q = cod.norm.p
        return lambda y: float(np.sum(np.abs(y) ** q) ** (1.0 / q))
    F = np.array([[float(c) for c in f] for f in sp.facet_functionals(cod)])
    return lambda y: float(np.max(F @ y))


def _codomain_support(T: Operator):
    """A supporting functional of the codomain at a nonzero point."""
    cod = T.codomain
    if isinstance(cod.norm, Lp):
        q = cod.norm.p

        def g(y):
            n = np.sum(np.abs(y) ** q) ** (1.0 / q)
            return np.sign(y) * np.abs(y / n) ** (q - 1)

        return g
    F = np.array([[float(c) for c in f] for f in sp.facet_functionals(cod)])
    return lambda y: F[int(np.argmax(F @ y))]


def _lp_unit(x: np.ndarray, p: float) -> np.ndarray:
    return x / np.sum(np.abs(x) ** p) ** (1.0 / p)


def _best_response(z: np.ndarray, p: float) -> np.ndarray:
    """The unit vector of l_p maximizing the functional ``z``."""
    q = p / (p - 1)
    x = np.sign(z) * np.abs(z) ** (q - 1)
    return _lp_unit(x, p)


def _power_polish(A, p, ynorm, support, x, iters=20000, tol=1e-15):
    # monotone ascent: g(Tx_k) = ||Tx_k||, and x_{k+1} maximizes g(T .) on the ball
    val = ynorm(A @ x)
    for _ in range(iters):
        y = A @ x
        if not np.any(y):
            break
        z = A.T @ support(y)
        if not np.any(z):
            break
        nxt = _best_response(z, p)
        nval = ynorm(A @ nxt)
        if nval < val - 1e-15:
            break
        step = np.max(np.abs(nxt - x))
        x, val = nxt, nval
        if step < tol:
            break
    return x, val


def _stationary(A, p, support, x) -> bool:
    y = A @ x
    if not np.any(y):
        return False
    z = A.T @ support(y)
    if not np.any(z):
        return False
    br = _best_response(z, p)
    return min(np.max(np.abs(br - x)), np.max(np.abs(br + x))) <= STATIONARITY_TOL


def _canon_float(x: np.ndarray) -> np.ndarray:
    for c in x:
        if abs(c) > 1e-9:
            return x if c > 0 else -x
    return x


def _numeric_maximizers(T: Operator) -> tuple[float, list[np.ndarray]]:
    A = T.float_matrix()
    p = T.domain.norm.p
    ynorm = _codomain_norm(T)
    support = _codomain_support(T)
    n = T.domain.dim

    def ratio(x):
        return ynorm(A @ x) / np.sum(np.abs(x) ** p) ** (1.0 / p)

    candidates: list[np.ndarray] = []
    if not np.any(A):
        return 0.0, []
    if n == 1:
        candidates.append(np.array([1.0]))
    elif n == 2:
        thetas = np.linspace(0.0, math.pi, SCAN_ANGLES, endpoint=False)
        vals = np.array([ratio(np.array([math.cos(t), math.sin(t)])) for t in thetas])
        top = vals.max()
        near = vals >= top * (1 - 1e-9)
        if near.sum() > SCAN_ANGLES // 16:
            raise NonFiniteAttainment("norm is attained on a continuum of directions")
        h = thetas[1] - thetas[0]
        for i in range(SCAN_ANGLES):
            if vals[i] >= vals[i - 1] and vals[i] >= vals[(i + 1) % SCAN_ANGLES]:
                res = minimize_scalar(
                    lambda t: -ratio(np.array([math.cos(t), math.sin(t)])),
                    bounds=(thetas[i] - h, thetas[i] + h),
                    method="bounded",
                    options={"xatol": 1e-13},
                )
                x = np.array([math.cos(res.x), math.sin(res.x)])
                x, _ = _power_polish(A, p, ynorm, support, _lp_unit(x, p), iters=200)
                candidates.append(x)
    else:
        rng = np.random.default_rng(0)
        for _ in range(STARTS):
            x0 = _lp_unit(rng.standard_normal(n), p)
            x, _ = _power_polish(A, p, ynorm, support, x0)
            candidates.append(x)
    candidates = [_lp_unit(c, p) for c in candidates]
    values = [ynorm(A @ c) for c in candidates]
    best = max(values)
    keep = [c for c, v in zip(candidates, values) if v >= best * (1 - VALUE_RTOL)]
    clusters: list[np.ndarray] = []
    for c in sorted((_canon_float(c) for c in keep), key=lambda v: tuple(-v)):
        if not any(np.max(np.abs(c - d)) <= CLUSTER_RADIUS for d in clusters):
            clusters.append(c)
    if len(clusters) >= MAX_CLUSTERS:
        raise NonFiniteAttainment(f"{len(clusters)} distinct maximizers found")
    return best, clusters


def _attainment_lp(T: Operator) -> AttainmentSet:
    best, clusters = _numeric_maximizers(T)
    if best <= nm.get_eps():
        raise ZeroOperator("the zero operator attains its norm everywhere")
    A = T.float_matrix()
    p = T.domain.norm.p
    support = _codomain_support(T)
    notes = []
    certified = True
    for c in clusters:
        if not _stationary(A, p, support, c):
            certified = False
            notes.append(f"stationarity check failed at {c.tolist()}")
    if not certified:
        raise Unsupported("; ".join(notes))
    points = tuple(tuple(float(v) + 0.0 for v in c) for c in clusters)
    points = tuple(sorted(points, key=_point_key))
    faces = tuple(_image_face(T, x, best) for x in points)
    notes.append(f"{len(points)} maximizer cluster(s), stationarity verified")
    return AttainmentSet(points, faces, best, exact=False, certified=True, notes=tuple(notes))
