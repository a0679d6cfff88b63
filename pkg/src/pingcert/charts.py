"""Affine charts of the boundary sphere at a cusp, and certified transport of
cusp neighbourhoods between charts.

A chart at the cusp ``v`` identifies ``x in Q^n`` with the isotropic vector
``u + sum x_k w_k + alpha v`` where ``alpha = -(u + sum x_k w_k)^2 / 2``; the
cusp itself is the point at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidInput, PingcertError
from .exact import (Interval, QMatrix, box_hull, poly_add, poly_enclose, poly_eval,
                    poly_scale, sup_norm, vector)
from .lattice import Cusp, Lattice
from .parabolic import StabilizerBasis, complete_isotropic_basis


class AtInfinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "AT_INFINITY"

    def __reduce__(self):
        return (AtInfinity, ())


AT_INFINITY = AtInfinity()


@dataclass(frozen=True)
class SpherePoint:
    """Ray representative of a boundary point: isotropic, on the positive side."""

    representative: tuple

    def normalized(self):
        m = sup_norm(self.representative)
        return SpherePoint(vector(Fraction(x) / m for x in self.representative))

    def same_ray(self, other):
        a, b = self.normalized().representative, other.normalized().representative
        return a == b


@dataclass(frozen=True)
class NeighborhoodSpec:
    """``U = {||x||_inf > radius}`` in the chart of player ``index``, plus its cusp."""

    index: int
    radius: Fraction

    def __post_init__(self):
        if Fraction(self.radius) <= 0:
            raise InvalidInput("neighbourhood radius must be positive")


@dataclass(frozen=True)
class Chart:
    lattice: Lattice
    cusp: Cusp
    basis: StabilizerBasis

    @classmethod
    def at(cls, lat: Lattice, cusp: Cusp, basis: StabilizerBasis = None):
        return cls(lat, cusp, basis or complete_isotropic_basis(lat, cusp))

    @property
    def n(self):
        return self.basis.n

    @property
    def v(self):
        return self.basis.v

    def lift(self, x):
        """Point ``u + sum x_k w_k`` of the affine hyperplane ``(., v) = 1``."""
        if len(x) != self.n:
            raise InvalidInput(f"chart point has length {len(x)}, expected {self.n}")
        y = list(self.basis.u)
        for xk, wk in zip(x, self.basis.w):
            y = [a + Fraction(xk) * b for a, b in zip(y, wk)]
        return tuple(y)

    def to_boundary(self, x) -> SpherePoint:
        z = self.lift(x)
        alpha = -Fraction(self.lattice.square(z)) / 2
        return SpherePoint(vector(a + alpha * b for a, b in zip(z, self.v)))

    def from_boundary(self, y):
        y = tuple(y.representative if isinstance(y, SpherePoint) else y)
        if self.lattice.square(y) != 0:
            raise InvalidInput("not on cone boundary: point is not isotropic")
        s = Fraction(self.lattice.pair(y, self.v))
        if s == 0:
            if QMatrix.from_columns([self.v, y]).rank() == 1 and self.lattice.pair(y, self.lattice.anchor) > 0:
                return AT_INFINITY
            raise InvalidInput("not on cone boundary")
        if s < 0:
            raise InvalidInput("not on cone boundary: point lies on the negative cone")
        coords = self.basis.coordinates([Fraction(a) / s for a in y])
        return vector(coords[1:self.n + 1])

    def position(self, cusp: Cusp):
        return self.from_boundary(cusp.v)

    def translate(self, x, t):
        return vector(Fraction(a) + Fraction(b) for a, b in zip(x, t))


def cusp_position(chart: Chart, cusp: Cusp):
    return chart.position(cusp)


# ---------------------------------------------------------------------------
# Transport of neighbourhoods


@dataclass(frozen=True)
class Undecided:
    reason: str


@dataclass(frozen=True)
class Leaf:
    face: tuple          # (k, s): theta_k fixed to s
    domain: tuple        # Intervals for theta_1..theta_n, r
    enclosure: tuple     # Intervals in target-chart coordinates


@dataclass(frozen=True)
class Transport:
    """Box in chart ``i`` containing the image of ``U_j``, with the leaf cover
    that proves it."""

    target: int
    source: int
    radius: Fraction
    r_max: Fraction
    box: tuple
    position: tuple
    leaves: tuple = field(repr=False)


@dataclass(frozen=True)
class TransportPolys:
    position: tuple
    pairing: Fraction     # (v_j, v_i) > 0
    denominator: dict     # (y, v_i) as a polynomial in (theta, r)
    numerators: tuple     # M_k with x_k = pos_k + r M_k / (pairing * denominator)


def transport_polys(chart_i: Chart, chart_j: Chart) -> TransportPolys:
    """Polynomials describing chart-``i`` coordinates of ``U_j``.

    ``U_j`` is swept by the rays
    ``y(theta, r) = r^2 u + r sum theta_k w_k - (1/2)(r u + sum theta_k w_k)^2 v``
    with ``theta`` on the faces of the unit sup-ball and ``r in [0, 1/R_j]``;
    ``r = 0`` gives the cusp ``v_j`` itself.  Chart-``i`` coordinates are
    written in centred form ``pos + r M(theta, r) / ((v_j, v_i) D)`` which is
    exact at the cusp.
    """
    lat = chart_i.lattice
    bj = chart_j.basis
    n = bj.n
    nv = n + 1
    terms = []  # (exponent tuple, ambient coefficient vector)
    uu = Fraction(lat.square(bj.u))
    terms.append(((0,) * n + (2,), tuple(Fraction(a) - uu / 2 * b for a, b in zip(bj.u, bj.v))))
    for k in range(n):
        uw = Fraction(lat.pair(bj.u, bj.w[k]))
        e = [0] * nv
        e[k] += 1
        e[n] += 1
        terms.append((tuple(e), tuple(Fraction(a) - uw * b for a, b in zip(bj.w[k], bj.v))))
        for l in range(k, n):
            ww = Fraction(lat.pair(bj.w[k], bj.w[l]))
            coef = -ww / 2 if k == l else -ww
            e = [0] * nv
            e[k] += 1
            e[l] += 1
            terms.append((tuple(e), tuple(coef * b for b in bj.v)))

    inv = chart_i.basis.inverse
    ni = chart_i.n

    def functional(row):
        p = {}
        for exps, vec in terms:
            c = sum((Fraction(a) * b for a, b in zip(row, vec)), Fraction(0))
            if c:
                p = poly_add(p, {exps: c})
        return p

    D = functional(inv.rows[ni + 1])
    N = [functional(inv.rows[k + 1]) for k in range(ni)]
    vj_coords = inv @ bj.v
    pairing = Fraction(vj_coords[ni + 1])
    if pairing <= 0:
        raise InvalidInput("cusps are not distinct points of the boundary sphere")
    position = tuple(Fraction(vj_coords[k + 1]) / pairing for k in range(ni))
    M = []
    for k in range(ni):
        E = poly_add(poly_scale(N[k], pairing), D, scale=-Fraction(vj_coords[k + 1]))
        shifted = {}
        for exps, c in E.items():
            if exps[n] == 0:
                raise PingcertError("internal: centred numerator does not vanish at the cusp")
            shifted[exps[:n] + (exps[n] - 1,)] = c
        M.append(shifted)
    return TransportPolys(position, pairing, D, tuple(M))


def chart_image(polys: TransportPolys, theta, r):
    """Exact chart-``i`` coordinates of the sweep point ``(theta, r)``."""
    pt = tuple(theta) + (r,)
    d = poly_eval(polys.denominator, pt)
    return tuple(p + Fraction(r) * poly_eval(m, pt) / (polys.pairing * d)
                 for p, m in zip(polys.position, polys.numerators))


def enclose_leaf(polys: TransportPolys, domain):
    """Interval enclosure over one parameter box; None if the pairing with
    the target cusp is not bounded away from 0 there."""
    D = poly_enclose(polys.denominator, domain)
    if D.lo <= 0:
        return None
    scale = D * polys.pairing
    r = domain[-1]
    return tuple(Interval.point(p) + (r * poly_enclose(m, domain)) / scale
                 for p, m in zip(polys.position, polys.numerators))


def face_domains(n, r_max):
    faces = []
    for k in range(n):
        for s in (-1, 1):
            dom = [Interval(-1, 1)] * n + [Interval(0, r_max)]
            dom[k] = Interval(s, s)
            faces.append(((k, s), tuple(dom)))
    return faces


def _check_precondition(chart_i, chart_j, radius):
    if chart_i.v == chart_j.v:
        raise InvalidInput("precondition: transport needs two distinct cusps")
    where = chart_j.position(chart_i.cusp)
    if sup_norm(where) >= radius:
        raise InvalidInput(
            "precondition: the target cusp lies in the closure of the source neighbourhood")


def transport_enclosure(chart_i: Chart, chart_j: Chart, radius, depth=24, min_depth=0,
                        r_max=None, target=None, source=None):
    """Certified box containing ``U_j = {||x||_inf > radius}`` (in chart ``j``)
    seen in chart ``i``.

    Branch-and-bound over the sweep parameters: a parameter box is split while
    the pairing with ``v_i`` is not bounded away from zero (or while its level
    is below ``min_depth``).  Returns :class:`Transport` or :class:`Undecided`.
    """
    radius = Fraction(radius)
    _check_precondition(chart_i, chart_j, radius)
    r_max = 1 / radius if r_max is None else Fraction(r_max)
    polys = transport_polys(chart_i, chart_j)
    n = chart_j.n
    if n == 0:
        pos = tuple(Interval.point(p) for p in polys.position)
        return Transport(target, source, radius, r_max, pos, polys.position, ())

    full = [Interval(-1, 1)] * n + [Interval(0, r_max)]
    leaves = []
    for face, dom in face_domains(n, r_max):
        stack = [(dom, 0)]
        while stack:
            d, level = stack.pop()
            enc = enclose_leaf(polys, d) if level >= min_depth else None
            if enc is not None:
                leaves.append(Leaf(face, d, enc))
                continue
            splittable = [k for k, iv in enumerate(d) if iv.width > 0]
            if level >= depth or not splittable:
                return Undecided("increase R_j or depth")
            k = max(splittable, key=lambda k: d[k].width / full[k].width)
            lo, hi = d[k].bisect()
            stack.append((d[:k] + (hi,) + d[k + 1:], level + 1))
            stack.append((d[:k] + (lo,) + d[k + 1:], level + 1))
    hull = leaves[0].enclosure
    for leaf in leaves[1:]:
        hull = box_hull(hull, leaf.enclosure)
    return Transport(target, source, radius, r_max, hull, polys.position, tuple(leaves))


# ---------------------------------------------------------------------------
# Re-verification of a stored transport cover


def _volume(dom, dims):
    v = Fraction(1)
    for k in dims:
        v *= dom[k].width
    return v


def _interiors_meet(a, b, dims):
    return all(a[k].lo < b[k].hi and b[k].lo < a[k].hi for k in dims)


def check_transport(chart_i: Chart, chart_j: Chart, radius, r_max, leaves, box):
    """Re-verify a stored cover without any subdivision.

    Checks that the leaves tile every face domain (containment, pairwise
    disjoint interiors, total volume), that each leaf's interval enclosure has
    a positive denominator, matches the stored one and lies in ``box``.  Returns a list of failures.
    """
    failures = []
    radius, r_max = Fraction(radius), Fraction(r_max)
    try:
        _check_precondition(chart_i, chart_j, radius)
    except InvalidInput as exc:
        return [str(exc)]
    if r_max != 1 / radius:
        failures.append("sweep range does not match the radius")
    polys = transport_polys(chart_i, chart_j)
    n = chart_j.n
    if n == 0:
        if not all(iv.contains(p) for iv, p in zip(box, polys.position)):
            failures.append("box misses the cusp position")
        return failures
    hull = None
    for leaf in leaves:
        if leaf.enclosure is not None:
            hull = tuple(leaf.enclosure) if hull is None else box_hull(hull, leaf.enclosure)
    if hull is not None and tuple(box) != hull:
        failures.append("box is not the hull of the leaf enclosures")
    by_face = {}
    for leaf in leaves:
        by_face.setdefault(tuple(leaf.face), []).append(leaf)
    for face, dom in face_domains(n, r_max):
        group = by_face.pop(face, [])
        dims = [k for k, iv in enumerate(dom) if iv.width > 0]
        if not group:
            failures.append(f"face {face} has no leaves")
            continue
        total = Fraction(0)
        for idx, leaf in enumerate(group):
            d = tuple(leaf.domain)
            if len(d) != len(dom) or not all(o.contains_interval(x) for o, x in zip(dom, d)):
                failures.append(f"leaf outside face {face}")
                continue
            total += _volume(d, dims)
            enc = enclose_leaf(polys, d)
            if enc is None:
                failures.append(f"leaf of face {face} has a non-positive pairing")
                continue
            if leaf.enclosure is not None and tuple(leaf.enclosure) != enc:
                failures.append(f"stored leaf enclosure of face {face} differs")
            if not all(b.contains_interval(e) for b, e in zip(box, enc)):
                failures.append(f"leaf enclosure of face {face} escapes the box")
            for other in group[idx + 1:]:
                if _interiors_meet(d, tuple(other.domain), dims):
                    failures.append(f"overlapping leaves on face {face}")
        if total != _volume(dom, dims):
            failures.append(f"leaves do not cover face {face}")
    if by_face:
        failures.append("leaves on unknown faces")
    return failures
