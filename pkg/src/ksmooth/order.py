"""Order of smoothness of operators.

The order ``k`` of a norm-one operator ``T`` is the dimension of the span of
its supporting functionals.  Between finite-dimensional spaces the extreme
supporting functionals are the tensors ``y* (x) x: S -> y*(S x)`` with ``x``
a norm-attaining extreme point of the domain ball and ``y*`` an extreme
supporting functional of ``T x``, so ``k`` is the rank of finitely many
rank-one matrices.  Besides that rank formula this module carries the
closed-form shortcuts (sum rule, planar classification) and an independent
pair-enumeration oracle used for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, permutations
from typing import Sequence

from . import numeric as nm
from . import spaces as sp
from .errors import Disagreement, NotPolyhedral, Unsupported, WrongDimension
from .numeric import Scalar
from .operators import AttainmentSet, Operator, attainment_ext
from .smoothness import SupportFace, bj_orthogonal, same_segment_interior, vector_order
from .spaces import Functional, Lp, Space, Vector


class Method(str, Enum):
    RANK = "RankOracle"
    ORACLE = "PolytopeOracle"
    SUM = "SumRule"
    TWO_DIM = "TwoDim"


@dataclass(frozen=True)
class TensorFunctional:
    """The functional ``S -> ystar(S x)`` on codomain-by-domain matrices."""

    x: Vector
    ystar: Functional

    @property
    def flat(self) -> tuple:
        # row-major over (codomain index i, domain index j)
        return tuple(yi * xj for yi in self.ystar for xj in self.x)

    def __call__(self, matrix: Sequence[Sequence]) -> Scalar:
        return nm.dot(self.ystar, [nm.dot(row, self.x) for row in matrix])

    def to_dict(self) -> dict:
        return {"x": _vec_out(self.x), "ystar": _vec_out(self.ystar)}


def _vec_out(v: Sequence) -> list:
    return [nm.scalar_print(c) for c in v]


@dataclass
class TwoDimCertificate:
    case: str
    quadruple: tuple[Vector, Vector, Vector, Vector] | None = None
    point_coefficients: tuple[Scalar, Scalar, Scalar, Scalar] | None = None
    functional_coefficients: tuple[Scalar, Scalar, Scalar, Scalar] | None = None
    determinant: Scalar | None = None
    determinants: list[tuple[int, int, Scalar]] = field(default_factory=list)

    def to_dict(self) -> dict:
        out: dict = {"case": self.case}
        if self.quadruple is not None:
            out["quadruple"] = [_vec_out(x) for x in self.quadruple]
            a, b, c, d = self.point_coefficients
            out["a"], out["b"], out["c"], out["d"] = map(nm.scalar_print, (a, b, c, d))
            a1, a2, b1, b2 = self.functional_coefficients
            out["alpha1"], out["alpha2"] = nm.scalar_print(a1), nm.scalar_print(a2)
            out["beta1"], out["beta2"] = nm.scalar_print(b1), nm.scalar_print(b2)
            out["determinant"] = nm.scalar_print(self.determinant)
        if self.determinants:
            out["determinants"] = [
                {"x2": i, "x4": j, "value": nm.scalar_print(v)} for i, j, v in self.determinants
            ]
        return out


@dataclass
class SumRuleCertificate:
    independent: bool
    bj_orthogonal: bool | None
    orders: list[int]

    def to_dict(self) -> dict:
        return {
            "case": "sum-rule",
            "independent": self.independent,
            "bj_orthogonal": self.bj_orthogonal,
            "orders": self.orders,
        }


@dataclass
class SmoothnessReport:
    k: int
    op_norm: Scalar
    method: Method
    attainment: AttainmentSet
    basis: list[TensorFunctional]
    trace: list[str] = field(default_factory=list)
    certificate: TwoDimCertificate | SumRuleCertificate | None = None

    def to_dict(self) -> dict:
        out = {
            "k": self.k,
            "op_norm": nm.scalar_print(self.op_norm),
            "method": self.method.value,
            "attainment": [_vec_out(x) for x in self.attainment.canonical_points],
            "basis": [t.to_dict() for t in self.basis],
            "trace": list(self.trace),
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out


def _require_certified(att: AttainmentSet) -> None:
    if not (att.exact or att.certified):
        raise Unsupported("norm attainment is not certified; refusing to apply a closed-form rule")


def _check_bound(T: Operator, k: int) -> None:
    if not 1 <= k <= T.domain.dim * T.codomain.dim:
        raise AssertionError(f"order {k} outside [1, {T.domain.dim * T.codomain.dim}]")


def ext_J_operator(T: Operator, attainment: AttainmentSet | None = None) -> list[TensorFunctional]:
    """Extreme supporting functionals of ``T / ||T||`` (canonical ``x`` only)."""
    att = attainment if attainment is not None else attainment_ext(T)
    _require_certified(att)
    return [
        TensorFunctional(x, f)
        for x, face in zip(att.canonical_points, att.faces)
        for f in face.ext_functionals
    ]


def _describe(att: AttainmentSet) -> str:
    pts = ", ".join("(" + ", ".join(_fmt(c) for c in x) + ")" for x in att.canonical_points)
    return f"||T|| = {_fmt(att.op_norm)}; r = {att.r} canonical attainment points: {pts}"


def _fmt(s) -> str:
    v = nm.scalar_print(s)
    return v if isinstance(v, str) else f"{v:.12g}"


def smoothness_order_rank(T: Operator, attainment: AttainmentSet | None = None) -> SmoothnessReport:
    att = attainment if attainment is not None else attainment_ext(T)
    tensors = ext_J_operator(T, att)
    flats = [t.flat for t in tensors]
    k = nm.rank(flats)
    chosen = nm.row_basis(flats)
    if len(chosen) != k:
        raise AssertionError("greedy basis and elimination rank disagree")
    _check_bound(T, k)
    trace = [
        _describe(att),
        f"{len(tensors)} tensor functionals y*(x)x; rank of their matrix coordinates = {k}",
    ]
    return SmoothnessReport(k, att.op_norm, Method.RANK, att, [tensors[i] for i in chosen], trace)


# -- independent oracle --------------------------------------------------------


def _polar_vertices(space: Space) -> tuple[Functional, ...]:
    """Polar-ball vertices; planar balls use angular adjacency of the vertices,
    a route independent of the hyperplane enumeration in :mod:`spaces`."""
    if space.dim != 2:
        return sp.facet_functionals(space)
    verts = sorted(
        sp.ext_points(space), key=lambda v: math.atan2(float(v[1]), float(v[0]))
    )
    out = []
    for u, w in zip(verts, verts[1:] + verts[:1]):
        det = u[0] * w[1] - u[1] * w[0]
        out.append(((w[1] - u[1]) / det, (u[0] - w[0]) / det))
    return tuple(out)


def oracle_order(T: Operator) -> SmoothnessReport:
    """Rank of all tensors ``y*(x)x`` over vertex pairs with ``y*(T x) = ||T||``.

    Uses every vertex ``x`` of the domain ball and every vertex ``y*`` of the
    polar of the codomain ball without consulting the attainment set.
    """
    if not (T.domain.is_polyhedral and T.codomain.is_polyhedral):
        raise NotPolyhedral("the pair oracle needs polyhedral domain and codomain")
    xs = sp.ext_points(T.domain)
    ys = _polar_vertices(T.codomain)
    images = [T(x) for x in xs]
    table = [[nm.dot(y, tx) for y in ys] for tx in images]
    best = max((v for row in table for v in row), key=lambda s: s if nm.is_exact(s) else float(s))
    if nm.sign(best) == 0:
        raise Unsupported("zero operator")
    pairs = [
        (xs[i], ys[j])
        for i in range(len(xs))
        for j in range(len(ys))
        if nm.close(table[i][j], best, scale=10.0)
    ]
    grouped: dict[tuple, list] = {}
    reps: dict[tuple, Vector] = {}
    for x, y in pairs:
        c = sp.canonical(x)
        key = sp._key(c)
        reps[key] = c
        fy = y if sp.same_vector(c, x) else tuple(-v for v in y)
        if not any(sp.same_vector(fy, g) for g in grouped.setdefault(key, [])):
            grouped[key].append(fy)
    points = sorted(reps.values(), key=lambda v: tuple(-float(c) for c in v))
    faces = []
    tensors = []
    for x in points:
        fs = tuple(grouped[sp._key(x)])
        tx = T(x)
        faces.append(SupportFace(tuple(c / best for c in tx), fs, nm.rank(list(fs))))
        tensors.extend(TensorFunctional(x, f) for f in fs)
    flats = [t.flat for t in tensors]
    k = nm.rank(flats)
    _check_bound(T, k)
    att = AttainmentSet(tuple(points), tuple(faces), best, exact=nm.is_exact(best))
    trace = [
        f"{len(xs)} domain vertices x {len(ys)} polar vertices; "
        f"{len(pairs)} pairs attain max y*(Tx) = {_fmt(best)}",
        f"rank of attaining tensors = {k}",
    ]
    basis = [tensors[i] for i in nm.row_basis(flats)]
    return SmoothnessReport(k, best, Method.ORACLE, att, basis, trace)


# -- sum rule --------------------------------------------------------------------


def sum_rule(T: Operator, attainment: AttainmentSet | None = None) -> SmoothnessReport | None:
    """``k = m_1 + ... + m_r`` when the attainment points allow it, else None.

    Applies when the canonical attainment points are linearly independent, or
    when the domain is smooth and they are mutually Birkhoff-James orthogonal.
    """
    att = attainment if attainment is not None else attainment_ext(T)
    _require_certified(att)
    pts = list(att.canonical_points)
    r = len(pts)
    independent = nm.rank(pts) == r
    trace = [_describe(att)]
    trace.append(
        f"independence of attainment points: {'holds' if independent else 'fails'}"
        f" (rank {nm.rank(pts)} of {r})"
    )
    bj = None
    if isinstance(T.domain.norm, Lp):
        bj = all(bj_orthogonal(T.domain, pts[i], pts[j]) for i, j in permutations(range(r), 2))
        trace.append(
            f"mutual Birkhoff-James orthogonality in the smooth domain: {'holds' if bj else 'fails'}"
        )
    if not (independent or bj):
        trace.append("sum rule does not apply")
        return None
    orders = [face.order for face in att.faces]
    k = sum(orders)
    _check_bound(T, k)
    basis = []
    for x, face in zip(pts, att.faces):
        fs = list(face.ext_functionals)
        basis.extend(TensorFunctional(x, fs[i]) for i in nm.row_basis(fs))
    trace.append(f"image orders m_i = {orders}; k = {k}")
    cert = SumRuleCertificate(independent, bj, orders)
    return SmoothnessReport(k, att.op_norm, Method.SUM, att, basis, trace, cert)


# -- planar classification -----------------------------------------------------------


def _coords(u: Sequence, v: Sequence, w: Sequence):
    """Coefficients ``(s, t)`` with ``w = s*u + t*v`` in the plane."""
    sol = nm.solve([[u[0], v[0]], [u[1], v[1]]], [w[0], w[1]])
    if sol is None:
        raise AssertionError("decomposition basis is singular")
    return sol[0], sol[1]


def _unit_image(T: Operator, att: AttainmentSet, i: int) -> Vector:
    return att.faces[i].point


def two_dim_classify(T: Operator, attainment: AttainmentSet | None = None) -> SmoothnessReport:
    """Order of an operator between planar spaces from its attainment pattern.

    Falls back to the rank formula (and says so in the trace) for patterns the
    closed-form cases do not cover.
    """
    if T.domain.dim != 2 or T.codomain.dim != 2:
        raise WrongDimension("planar classification needs 2x2 operators")
    att = attainment if attainment is not None else attainment_ext(T)
    _require_certified(att)
    r = att.r
    faces = att.faces
    smooth = [f.smooth for f in faces]
    pts = att.canonical_points
    trace = [_describe(att), f"image smoothness: {['smooth' if s else 'non-smooth' for s in smooth]}"]

    def done(k: int, cert: TwoDimCertificate, basis_idx: Sequence[tuple[int, int]]) -> SmoothnessReport:
        _check_bound(T, k)
        basis = [TensorFunctional(pts[i], faces[i].ext_functionals[j]) for i, j in basis_idx]
        trace.append(f"case {cert.case}: k = {k}")
        return SmoothnessReport(k, att.op_norm, Method.TWO_DIM, att, basis, trace, cert)

    def defer(reason: str) -> SmoothnessReport:
        trace.append(f"outside the closed-form cases ({reason}); deferring to the rank formula")
        rep = smoothness_order_rank(T, att)
        rep.trace = trace + rep.trace
        rep.certificate = TwoDimCertificate("deferred")
        return rep

    def all_pairs(idx):
        return [(i, j) for i in idx for j in range(len(faces[i].ext_functionals))]

    if r == 1:
        return done(faces[0].order, TwoDimCertificate("r=1"), all_pairs([0]))
    if r == 2:
        return done(faces[0].order + faces[1].order, TwoDimCertificate("r=2"), all_pairs([0, 1]))
    if r == 3:
        if all(smooth):
            return done(3, TwoDimCertificate("r=3.i"), all_pairs([0, 1, 2]))
        rough = [i for i in range(3) if not smooth[i]]
        if len(rough) > 1:
            return defer(f"{len(rough)} non-smooth images among 3 attainment points")
        i1 = rough[0]
        i2, i3 = [i for i in range(3) if i != i1]
        u, v = _unit_image(T, att, i2), _unit_image(T, att, i3)
        if sp.same_vector(u, v) or sp.same_vector(u, tuple(-c for c in v)):
            return defer("two attainment points share an image up to sign")
        plus = same_segment_interior(T.codomain, u, v)
        minus = same_segment_interior(T.codomain, u, tuple(-c for c in v))
        trace.append(
            f"non-smooth image at point {i1}; Tx{i2}, Tx{i3} interior to one edge: {plus}; "
            f"Tx{i2}, -Tx{i3}: {minus}"
        )
        if plus or minus:
            return done(3, TwoDimCertificate("r=3.ii"), all_pairs([i1]) + [(i2, 0)])
        return done(4, TwoDimCertificate("r=3.iii"), all_pairs([i1]) + [(i2, 0), (i3, 0)])
    # r >= 4
    if not all(smooth):
        trace.append(f"non-smooth image at point {smooth.index(False)}")
        tensors = ext_J_operator(T, att)
        rep = done(4, TwoDimCertificate("r>=4.i"), [])
        rep.basis = [tensors[i] for i in nm.row_basis([t.flat for t in tensors])]
        return rep
    ys = [f.ext_functionals[0] for f in faces]
    first = next(
        ((i, j) for i, j in combinations(range(r), 2) if nm.rank([ys[i], ys[j]]) == 2),
        None,
    )
    if first is None:
        return defer("all images share one supporting functional")
    i1, i3 = first
    x1, x3, y1, y3 = pts[i1], pts[i3], ys[i1], ys[i3]
    rest = [i for i in range(r) if i not in first]
    trace.append(f"basis points x1 = point {i1}, x3 = point {i3}")
    cert = TwoDimCertificate("r>=4.ii-no")
    witness = None
    for i2, i4 in permutations(rest, 2):
        a, b = _coords(x1, x3, pts[i2])
        c, d = _coords(x1, x3, pts[i4])
        al1, al2 = _coords(y1, y3, ys[i2])
        be1, be2 = _coords(y1, y3, ys[i4])
        det = be1 * al2 * a * d - be2 * al1 * b * c
        cert.determinants.append((i2, i4, det))
        if witness is None and nm.sign(det) != 0:
            witness = (i2, i4, (a, b, c, d), (al1, al2, be1, be2), det)
    nonzero = sum(1 for _, _, v in cert.determinants if nm.sign(v) != 0)
    trace.append(f"{len(cert.determinants)} ordered quadruples tested; {nonzero} nonzero determinants")
    if witness is not None:
        i2, i4, pc, fc, det = witness
        cert.case = "r>=4.ii-yes"
        cert.quadruple = (x1, pts[i2], x3, pts[i4])
        cert.point_coefficients = pc
        cert.functional_coefficients = fc
        cert.determinant = det
        return done(4, cert, [(i1, 0), (i2, 0), (i3, 0), (i4, 0)])
    extra = rest[0]
    return done(3, cert, [(i1, 0), (i3, 0), (extra, 0)])


# -- dispatch, cross-checking, vertex check -----------------------------------------


METHODS = ("auto", "rank", "oracle", "sum", "2d", "crosscheck")


def smoothness_order(T: Operator, method: str = "auto") -> SmoothnessReport:
    """Order of smoothness of ``T`` by the requested method.

    ``auto`` tries the sum rule, then the planar classification, then the
    rank formula.  ``crosscheck`` runs every applicable path and raises
    :class:`Disagreement` unless they agree.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if method == "rank":
        return smoothness_order_rank(T)
    if method == "oracle":
        return oracle_order(T)
    if method == "crosscheck":
        return crosscheck(T).preferred
    att = attainment_ext(T)
    if method == "sum":
        rep = sum_rule(T, att)
        if rep is None:
            raise Unsupported("the sum-rule hypotheses do not hold for this operator")
        return rep
    if method == "2d":
        return two_dim_classify(T, att)
    rep = sum_rule(T, att)
    if rep is not None:
        return rep
    if T.domain.dim == 2 and T.codomain.dim == 2:
        return two_dim_classify(T, att)
    return smoothness_order_rank(T, att)


@dataclass
class CrosscheckReport:
    k: int
    reports: dict[str, SmoothnessReport]

    @property
    def preferred(self) -> SmoothnessReport:
        for m in (Method.SUM, Method.TWO_DIM, Method.RANK, Method.ORACLE):
            if m.value in self.reports:
                rep = self.reports[m.value]
                rep.trace = rep.trace + [
                    "crosscheck: " + ", ".join(f"{n}={r.k}" for n, r in self.reports.items())
                ]
                return rep
        raise AssertionError("empty crosscheck")

    def to_dict(self) -> dict:
        return {"k": self.k, "reports": {m: r.to_dict() for m, r in self.reports.items()}}


def crosscheck(T: Operator) -> CrosscheckReport:
    att = attainment_ext(T)
    reports: dict[str, SmoothnessReport] = {}
    reports[Method.RANK.value] = smoothness_order_rank(T, att)
    if T.domain.is_polyhedral and T.codomain.is_polyhedral:
        reports[Method.ORACLE.value] = oracle_order(T)
    s = sum_rule(T, att)
    if s is not None:
        reports[Method.SUM.value] = s
    if T.domain.dim == 2 and T.codomain.dim == 2:
        t = two_dim_classify(T, att)
        if t.method is Method.TWO_DIM:
            reports[Method.TWO_DIM.value] = t
    ks = {name: rep.k for name, rep in reports.items()}
    if len(set(ks.values())) != 1:
        lines = [f"methods disagree: {ks}"]
        for name, rep in reports.items():
            lines.append(f"[{name}]")
            lines.extend("  " + t for t in rep.trace)
        raise Disagreement("\n".join(lines), reports)
    return CrosscheckReport(next(iter(ks.values())), reports)


@dataclass
class NSmoothCheck:
    space: str
    dim: int
    vertices_checked: int
    interior_checked: int
    violations: list[str]

    @property
    def passed(self) -> bool:
        return not self.violations


def exposed_nsmooth_check(space: Space) -> NSmoothCheck:
    """Every vertex of a polyhedral ball must have order ``dim``; relative
    interior points of facets order 1, and other non-vertex boundary
    points order below ``dim``."""
    n = space.dim
    verts = sp.ext_points(space)
    violations = []
    for v in verts:
        m = vector_order(space, v)
        if m != n:
            violations.append(f"vertex {_vec_str(v)} has order {m}, expected {n}")
    interior = 0
    for f in sp.facet_functionals(space):
        on = [v for v in verts if nm.close(nm.dot(f, v), 1)]
        centroid = tuple(sum(v[i] for v in on) / len(on) for i in range(n))
        interior += 1
        m = vector_order(space, centroid)
        if m != 1:
            violations.append(f"facet centroid {_vec_str(centroid)} has order {m}, expected 1")
    for u, w in combinations(verts, 2):
        mid = tuple((a + b) / 2 for a, b in zip(u, w))
        if not sp.on_sphere(space, mid):
            continue
        interior += 1
        m = vector_order(space, mid)
        if m >= n:
            violations.append(f"boundary point {_vec_str(mid)} has order {m}, expected < {n}")
    return NSmoothCheck(space.name or repr(space), n, len(verts), interior, violations)


def _vec_str(v: Sequence) -> str:
    return "(" + ", ".join(_fmt(c) for c in v) + ")"
