"""Fractional linear ping-pong for PGL(2, Z) on the Riemann sphere.

Points are exact Gaussian rationals or infinity.  Regions bounded by circles
and lines are stored as Hermitian forms, so images under integer Moebius maps
are exact coefficient congruences and every set inclusion below reduces to
comparisons of rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInput
from .exact import Q, QMatrix, fraction_str
from .words import ReducedWord, Witness, WordEvaluator, reduce_word


# ---------------------------------------------------------------------------
# Points


@dataclass(frozen=True)
class GaussianPoint:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)
    infinite: bool = False

    def __post_init__(self):
        object.__setattr__(self, "re", Q(self.re))
        object.__setattr__(self, "im", Q(self.im))
        if self.infinite and (self.re or self.im):
            raise InvalidInput("the point at infinity has no coordinates")

    @classmethod
    def of(cls, z):
        if isinstance(z, GaussianPoint):
            return z
        if isinstance(z, complex):
            raise InvalidInput("use exact coordinates, not a float complex")
        return cls(Q(z), Fraction(0))

    def __add__(self, o):
        o = GaussianPoint.of(o)
        if self.infinite or o.infinite:
            return INFINITY
        return GaussianPoint(self.re + o.re, self.im + o.im)

    def __mul__(self, o):
        o = GaussianPoint.of(o)
        return GaussianPoint(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def conj(self):
        return GaussianPoint(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __truediv__(self, o):
        o = GaussianPoint.of(o)
        n = o.abs2()
        if n == 0:
            raise ZeroDivisionError("division by zero in Gaussian rationals")
        p = self * o.conj()
        return GaussianPoint(p.re / n, p.im / n)

    def __str__(self):
        if self.infinite:
            return "oo"
        if not self.im:
            return fraction_str(self.re)
        im = f"{fraction_str(self.im)}i"
        return im if not self.re else f"{fraction_str(self.re)}{'+' if self.im > 0 else ''}{im}"


INFINITY = GaussianPoint(infinite=True)


def gaussian(re, im=0):
    return GaussianPoint(Q(re), Q(im))


# ---------------------------------------------------------------------------
# Maps


@dataclass(frozen=True)
class MoebiusMap:
    """Integer 2x2 matrix of determinant +-1, acting up to sign."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for x in (self.a, self.b, self.c, self.d):
            if Fraction(x).denominator != 1:
                raise InvalidInput("Moebius map needs integer entries")
        if self.det not in (1, -1):
            raise InvalidInput(f"determinant {self.det} is not +-1")

    @classmethod
    def of(cls, m):
        if isinstance(m, MoebiusMap):
            return m
        rows = m.rows if isinstance(m, QMatrix) else m
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def matrix(self):
        return QMatrix([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, o):
        return MoebiusMap.of(self.matrix @ MoebiusMap.of(o).matrix)

    def adjugate(self):
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def inverse(self):
        m = self.adjugate()
        return m if self.det == 1 else MoebiusMap(-m.a, -m.b, -m.c, -m.d)

    def __pow__(self, k):
        return MoebiusMap.of(self.matrix ** k)

    def projectively_equal(self, o):
        o = MoebiusMap.of(o)
        return self == o or self == MoebiusMap(-o.a, -o.b, -o.c, -o.d)

    def __call__(self, p):
        return moebius_act(self, p)


def moebius_act(m, p) -> GaussianPoint:
    m = MoebiusMap.of(m)
    p = GaussianPoint.of(p)
    if p.infinite:
        return INFINITY if m.c == 0 else GaussianPoint(Fraction(m.a, m.c), 0)
    den = p * m.c + m.d
    if den.abs2() == 0:
        return INFINITY
    return (p * m.a + m.b) / den


# ---------------------------------------------------------------------------
# Circles and the regions they bound


@dataclass(frozen=True)
class GeneralizedCircle:
    """Zero set of f(z) = A|z|^2 + 2 Re(conj(B) z) + C with B = b_re + i b_im.

    ``side`` selects the open region {side * f < 0}.  Lines have A = 0.
    """

    A: Fraction
    b_re: Fraction
    b_im: Fraction
    C: Fraction
    side: int = 1

    def __post_init__(self):
        for k in ("A", "b_re", "b_im", "C"):
            object.__setattr__(self, k, Q(getattr(self, k)))
        if self.side not in (1, -1):
            raise InvalidInput("side must be +1 or -1")
        if not (self.A or self.b_re or self.b_im or self.C):
            raise InvalidInput("all circle coefficients are zero")

    @classmethod
    def disk(cls, center, radius2):
        """Open disk |z - center| < r with r^2 = ``radius2``."""
        c = GaussianPoint.of(center)
        return cls(1, -c.re, -c.im, c.abs2() - Q(radius2))

    @classmethod
    def half_plane_re(cls, bound, greater=True):
        """Open half plane Re z > bound (or < bound)."""
        s = Fraction(-1, 2) if greater else Fraction(1, 2)
        return cls(0, s, 0, Q(bound) if greater else -Q(bound))

    def value(self, z):
        z = GaussianPoint.of(z)
        return self.A * z.abs2() + 2 * (self.b_re * z.re + self.b_im * z.im) + self.C

    def normalized(self):
        """Same region with side folded into the coefficients (side = +1)."""
        s = self.side
        return GeneralizedCircle(s * self.A, s * self.b_re, s * self.b_im, s * self.C)

    def on_boundary(self, z):
        z = GaussianPoint.of(z)
        return self.A == 0 if z.infinite else self.value(z) == 0

    def contains(self, z):
        z = GaussianPoint.of(z)
        if z.infinite:
            return self.side * self.A < 0
        return self.side * self.value(z) < 0

    @property
    def kind(self):
        a = self.side * self.A
        return "disk" if a > 0 else "exterior" if a < 0 else "half-plane"

    def center(self):
        if self.A == 0:
            raise InvalidInput("a line has no center")
        return GaussianPoint(-self.b_re / self.A, -self.b_im / self.A)

    def radius2(self):
        if self.A == 0:
            raise InvalidInput("a line has no radius")
        return (self.b_re ** 2 + self.b_im ** 2) / self.A ** 2 - self.C / self.A

    def hermitian(self):
        """Real and imaginary parts of [[A, B], [conj B, C]]."""
        return (QMatrix([[self.A, self.b_re], [self.b_re, self.C]]),
                QMatrix([[0, self.b_im], [-self.b_im, 0]]))

    def to_list(self):
        return [fraction_str(x) for x in (self.A, self.b_re, self.b_im, self.C)] + [self.side]

    @classmethod
    def from_list(cls, xs):
        return cls(Q(xs[0]), Q(xs[1]), Q(xs[2]), Q(xs[3]), int(xs[4]))


def image_circle(m, c: GeneralizedCircle) -> GeneralizedCircle:
    """Exact image of a circle and its chosen side.

    With Z = (z, 1) we have f = Z* H Z, and the image form is adj(M)^T H adj(M);
    adj(M) = det(M) M^-1 and det^2 = 1, so the side is unchanged.
    """
    m = MoebiusMap.of(m)
    N = m.adjugate().matrix
    re, im = c.hermitian()
    re2 = N.T @ re @ N
    im2 = N.T @ im @ N
    return GeneralizedCircle(re2.rows[0][0], re2.rows[0][1], im2.rows[0][1], re2.rows[1][1], c.side)


# ---------------------------------------------------------------------------
# Exact inclusions between regions


def _sqrt_sum_le(x, y, z):
    """sqrt(x) + sqrt(y) <= sqrt(z) for rationals x, y, z >= 0."""
    rhs = z - x - y
    return rhs >= 0 and 4 * x * y <= rhs * rhs


def region_contains_disk(outer: GeneralizedCircle, disk: GeneralizedCircle):
    """Is the open disk ``disk`` inside the open region ``outer``?

    Exact: uses only squared comparisons.  Sufficient and necessary for
    disks, half planes and disk exteriors.
    """
    if disk.kind != "disk":
        raise InvalidInput("inner region must be a bounded disk")
    c, r2 = disk.center(), disk.radius2()
    o = outer.normalized()
    if o.A == 0:
        # half plane {l(z) < 0}: need l(c) + 2|B| r <= 0
        lc = o.value(c)
        b2 = o.b_re ** 2 + o.b_im ** 2
        return lc <= 0 and lc * lc >= 4 * b2 * r2
    c2, R2 = o.center(), o.radius2()
    d2 = (c + c2 * -1).abs2()
    if o.A > 0:
        return _sqrt_sum_le(d2, r2, R2)
    # exterior of a disk: need |c - c2| >= r + R
    return _sqrt_sum_le(r2, R2, d2)


# ---------------------------------------------------------------------------
# The ping-pong instance


F1 = MoebiusMap(1, 0, 1, 1)
F2 = MoebiusMap(1, 1, 0, 1)
J = MoebiusMap(0, 1, 1, 0)
P = gaussian(0, 2)
U1 = GeneralizedCircle.disk(0, 1)
U2_PARTS = (GeneralizedCircle.half_plane_re(1, True), GeneralizedCircle.half_plane_re(-1, False))


def in_u1(z):
    return U1.contains(z)


def in_u2(z):
    z = GaussianPoint.of(z)
    return z.infinite or any(h.contains(z) for h in U2_PARTS)


def conclusion_for(n):
    return f"<f1^{n}, f2^{n}> = <f1^{n}> * <f2^{n}> ≅ Z * Z"


def _checks(n):
    """Every exact check of the ping-pong argument, as (name, data, ok)."""
    g1, g2 = F1 ** n, F2 ** n
    out = []
    out.append(("conjugation j g2 j = g1", {"product": _mat(J @ g2 @ J)}, (J @ g2 @ J) == g1))

    # j(U2 + P) in U1: the two half planes, infinity and P
    for name, h in zip(("Re z > 1", "Re z < -1"), U2_PARTS):
        img = image_circle(J, h)
        out.append((f"j({name}) in U1", {"image": img.to_list()},
                    img.kind == "disk" and region_contains_disk(U1, img)))
    jinf, jp = J(INFINITY), J(P)
    out.append(("j(oo) in U1", {"image": str(jinf)}, in_u1(jinf)))
    out.append(("j(P) in U1", {"image": str(jp), "abs2": fraction_str(jp.abs2())}, in_u1(jp)))

    # g2^k (U1 + P) in U2 for k = +-1; the monotonicity check below covers every k != 0
    for k in (1, -1):
        gk = g2 ** k
        img = image_circle(gk, U1)
        part = U2_PARTS[0] if k * n > 0 else U2_PARTS[1]
        out.append((f"g2^{k}(U1) in U2", {"image": img.to_list()},
                    img.kind == "disk" and region_contains_disk(part, img)))
        gp = gk(P)
        out.append((f"g2^{k}(P) in U2", {"image": str(gp)}, in_u2(gp)))
    # monotonicity: g2^k(U1) is the disk of radius 1 about kn and lies in U2
    # iff |kn| - 1 >= 1; |kn| grows with |k|, so k = +-1 is the worst case
    out.append(("monotonicity in |k|", {"worst_shift": abs(n), "needed": 2}, abs(n) - 1 >= 1))
    out.append(("P outside U1 and U2", {"P": str(P)}, not in_u1(P) and not in_u2(P)))
    return out


def _mat(m):
    return [[m.a, m.b], [m.c, m.d]]


@dataclass(frozen=True)
class MoebiusCertificate:
    n: int
    checks: tuple

    @property
    def conclusion(self):
        return conclusion_for(self.n)

    def to_dict(self):
        from .certificate import digest
        g1, g2 = F1 ** self.n, F2 ** self.n
        out = {
            "format": 1,
            "kind": "moebius-pingpong",
            "n": self.n,
            "maps": {"g1": _mat(g1), "g2": _mat(g2), "j": _mat(J)},
            "regions": {"U1": U1.to_list(), "U2": [h.to_list() for h in U2_PARTS], "U2_has_infinity": True},
            "basepoint": str(P),
            "checks": [{"claim": name, "data": data, "ok": ok} for name, data, ok in self.checks],
            "free_product": "<g2> * <j>",
            "conclusion": self.conclusion,
        }
        out["digest"] = digest(out)
        return out


def verify_moebius_pingpong(n):
    """Certificate for n >= 2; for n = 1 the relation witness instead."""
    n = int(n)
    if n < 1:
        raise InvalidInput("n must be >= 1")
    if n == 1:
        return psl2_witness().witness
    checks = tuple(_checks(n))
    failed = [name for name, _, ok in checks if not ok]
    assert not failed, f"ping-pong checks failed: {failed}"
    return MoebiusCertificate(n, checks)


def recheck_moebius(data):
    failures = []
    n = int(data["n"])
    if n < 2:
        return ["n must be >= 2"]
    expected = MoebiusCertificate(n, tuple(_checks(n))).to_dict()
    for key in ("format", "maps", "regions", "basepoint", "checks", "free_product", "conclusion"):
        if data.get(key) != expected[key]:
            failures.append(f"{key} differs from the recomputation")
    if not all(c["ok"] for c in expected["checks"]):
        failures.append("a ping-pong check fails")
    return failures


# ---------------------------------------------------------------------------
# The relation for n = 1


@dataclass(frozen=True)
class PSLWitness:
    word: ReducedWord
    trace: tuple
    product: QMatrix

    @property
    def witness(self):
        return Witness(self.word, self.product, "projective")

    def is_identity(self, mode="projective"):
        ident = QMatrix.identity(2)
        if mode == "exact":
            return self.product == ident
        return self.product == ident or self.product == -ident


def psl2_witness():
    """(f2 f1^-1 f2)^2 = -I: a nontrivial reduced word trivial in PSL(2, Z)."""
    letters = [("f2", 1), ("f1", -1), ("f2", 1)] * 2
    word = reduce_word(letters)
    ev = WordEvaluator({"f1": [F1.matrix], "f2": [F2.matrix]})
    trace, m = [], QMatrix.identity(2)
    for pid, e in word:
        m = m @ ev.syllable(pid, e)
        trace.append((f"{pid}^{e[0]}", m))
    return PSLWitness(word, tuple(trace), m)


def generation_words():
    """Short words showing f1, f2 generate SL(2, Z)."""
    return {"S": [("f2", -1), ("f1", 1), ("f2", -1)], "T": [("f2", 1)]}
