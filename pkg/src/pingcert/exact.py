"""Exact rational linear algebra and rational interval arithmetic.

Scalars are :class:`fractions.Fraction` (or plain ``int`` where integrality
matters).  Nothing in here ever touches a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import InvalidInput, IntervalContainsZero

Rational = Fraction


def Q(x) -> Fraction:
    """Coerce an int, Fraction or fraction string (``"-3/2"``) to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidInput(f"boolean is not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip().replace("−", "-")
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError):
            raise InvalidInput(f"malformed fraction {x!r}") from None
    raise InvalidInput(f"not an exact number: {x!r}")


def fraction_str(x) -> str:
    x = Q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def as_int(x) -> int:
    x = Q(x)
    if x.denominator != 1:
        raise InvalidInput(f"expected an integer, got {fraction_str(x)}")
    return x.numerator


def lcm_denominators(values) -> int:
    d = 1
    for x in values:
        d = math.lcm(d, Q(x).denominator)
    return d


def vec_gcd(v) -> int:
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    return g


def dot(x, y):
    if len(x) != len(y):
        raise InvalidInput(f"dimension mismatch: {len(x)} vs {len(y)}")
    return sum((a * b for a, b in zip(x, y)), 0)


def sup_norm(v):
    return max((abs(x) for x in v), default=Fraction(0))


# ---------------------------------------------------------------------------
# Matrices


class QMatrix:
    """Immutable dense matrix of exact scalars (ints or Fractions).

    Vectors are plain tuples; ``m @ v`` is a matrix-vector product and
    ``m @ n`` a matrix product.
    """

    __slots__ = ("rows", "shape", "_hash")

    def __init__(self, rows):
        rows = tuple(tuple(_exact(x) for x in r) for r in rows)
        ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise InvalidInput("row length mismatch in matrix")
        self.rows = rows
        self.shape = (len(rows), ncols)
        self._hash = None

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m, n):
        return cls([[0] * n for _ in range(m)])

    @classmethod
    def from_columns(cls, cols, nrows=None):
        cols = [tuple(c) for c in cols]
        if not cols:
            return cls.zeros(nrows or 0, 0) if nrows else cls([])
        return cls([[c[i] for c in cols] for i in range(len(cols[0]))])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        body = ", ".join("[" + ", ".join(fraction_str(x) for x in r) + "]" for r in self.rows)
        return f"QMatrix([{body}])"

    @property
    def T(self):
        m, n = self.shape
        return QMatrix([[self.rows[i][j] for i in range(m)] for j in range(n)])

    def column(self, j):
        return tuple(r[j] for r in self.rows)

    def columns(self):
        return [self.column(j) for j in range(self.shape[1])]

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            if self.shape[1] != other.shape[0]:
                raise InvalidInput(f"dimension mismatch: {self.shape} @ {other.shape}")
            cols = other.columns()
            return QMatrix([[sum((a * b for a, b in zip(r, c)), 0) for c in cols]
                            for r in self.rows])
        v = tuple(other)
        if self.shape[1] != len(v):
            raise InvalidInput(f"dimension mismatch: {self.shape} @ vector of length {len(v)}")
        return tuple(sum((a * b for a, b in zip(r, v)), 0) for r in self.rows)

    def __add__(self, other):
        if self.shape != other.shape:
            raise InvalidInput("dimension mismatch in matrix sum")
        return QMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if self.shape != other.shape:
            raise InvalidInput("dimension mismatch in matrix difference")
        return QMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return QMatrix([[-a for a in r] for r in self.rows])

    def scale(self, c):
        return QMatrix([[c * a for a in r] for r in self.rows])

    def __pow__(self, k):
        if self.shape[0] != self.shape[1]:
            raise InvalidInput("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = QMatrix.identity(self.shape[0])
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_square(self):
        return self.shape[0] == self.shape[1]

    def is_symmetric(self):
        return self.is_square() and all(
            self.rows[i][j] == self.rows[j][i]
            for i in range(self.shape[0]) for j in range(i))

    def is_integral(self):
        return all(_is_integer(x) for r in self.rows for x in r)

    def to_int(self):
        return QMatrix([[as_int(x) for x in r] for r in self.rows])

    def is_identity(self):
        return self == QMatrix.identity(self.shape[0])

    def det(self):
        if not self.is_square():
            raise InvalidInput("determinant of a non-square matrix")
        a = [[Q(x) for x in r] for r in self.rows]
        n = len(a)
        d = Fraction(1)
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k] != 0), None)
            if piv is None:
                return _normalize(Fraction(0))
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                d = -d
            d *= a[k][k]
            for i in range(k + 1, n):
                f = a[i][k] / a[k][k]
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        return _normalize(d)

    def rref(self):
        """Reduced row echelon form and the pivot columns."""
        a = [[Q(x) for x in r] for r in self.rows]
        m, n = self.shape
        pivots = []
        row = 0
        for col in range(n):
            piv = next((i for i in range(row, m) if a[i][col] != 0), None)
            if piv is None:
                continue
            a[row], a[piv] = a[piv], a[row]
            p = a[row][col]
            a[row] = [x / p for x in a[row]]
            for i in range(m):
                if i != row and a[i][col] != 0:
                    f = a[i][col]
                    a[i] = [x - f * y for x, y in zip(a[i], a[row])]
            pivots.append(col)
            row += 1
            if row == m:
                break
        return QMatrix(a), tuple(pivots)

    def rank(self):
        return len(self.rref()[1])

    def nullspace(self):
        """Rational basis of the right kernel, as a list of tuples."""
        m, n = self.shape
        r, pivots = self.rref()
        free = [j for j in range(n) if j not in pivots]
        basis = []
        for f in free:
            x = [Fraction(0)] * n
            x[f] = Fraction(1)
            for i, p in enumerate(pivots):
                x[p] = -r[i, f]
            basis.append(tuple(_normalize(c) for c in x))
        return basis

    def inverse(self):
        n = self.shape[0]
        if not self.is_square():
            raise InvalidInput("inverse of a non-square matrix")
        aug = QMatrix([list(r) + [1 if i == j else 0 for j in range(n)]
                       for i, r in enumerate(self.rows)])
        r, pivots = aug.rref()
        if pivots[:n] != tuple(range(n)):
            raise InvalidInput("matrix is singular")
        return QMatrix([[_normalize(x) for x in row[n:]] for row in r.rows])

    def solve(self, b):
        """Unique solution of ``self @ x = b`` for square invertible ``self``."""
        return self.inverse() @ tuple(b)


def _is_integer(x):
    return isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)


def _normalize(x):
    # keep integer-valued entries as ints so integer matrices stay hashable-equal
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _exact(x):
    if isinstance(x, bool):
        raise InvalidInput("boolean matrix entry")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return _normalize(x)
    return _normalize(Q(x))


def vector(xs):
    return tuple(_exact(x) for x in xs)


# ---------------------------------------------------------------------------
# Symmetric forms


def signature(gram: QMatrix):
    """(positive, negative, zero) inertia of a symmetric matrix.

    Symmetric Gaussian elimination over Q.  A zero diagonal with a nonzero
    off-diagonal entry ``a_ij`` is repaired by the congruence ``x_i += x_j``,
    which puts ``2 a_ij`` on the diagonal.
    """
    if not gram.is_symmetric():
        raise InvalidInput("signature requires a symmetric matrix")
    a = [[Q(x) for x in r] for r in gram.rows]
    pos = neg = zero = 0
    while a:
        n = len(a)
        i = next((k for k in range(n) if a[k][k] != 0), None)
        if i is None:
            hit = next(((k, l) for k in range(n) for l in range(n) if a[k][l] != 0), None)
            if hit is None:
                zero += n
                break
            k, l = hit
            a[k] = [x + y for x, y in zip(a[k], a[l])]
            for row in a:
                row[k] += row[l]
            continue
        p = a[i][i]
        if p > 0:
            pos += 1
        else:
            neg += 1
        rest = [k for k in range(n) if k != i]
        a = [[a[k][l] - a[k][i] * a[i][l] / p for l in rest] for k in rest]
    return pos, neg, zero


def charpoly(m: QMatrix):
    """Coefficients ``[c_0, ..., c_n]`` of det(xI - m), lowest degree first.

    Faddeev-LeVerrier recursion; exact over Q.
    """
    n = m.shape[0]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = QMatrix.zeros(n, n)
    ident = QMatrix.identity(n)
    for k in range(1, n + 1):
        mk = m @ (mk + ident.scale(coeffs[n - k + 1]))
        tr = sum((Q(mk[i, i]) for i in range(n)), Fraction(0))
        coeffs[n - k] = -tr / k
    return coeffs


def _sign_changes(cs):
    signs = [c > 0 for c in cs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def signature_by_descartes(gram: QMatrix):
    """Inertia from the characteristic polynomial via Descartes' rule.

    Exact for symmetric matrices because every root is real.
    """
    if not gram.is_symmetric():
        raise InvalidInput("signature requires a symmetric matrix")
    cs = charpoly(gram)
    zero = next(i for i, c in enumerate(cs) if c != 0)
    cs = cs[zero:]
    pos = _sign_changes(cs)
    neg = _sign_changes([c if i % 2 == 0 else -c for i, c in enumerate(cs)])
    return pos, neg, zero


# ---------------------------------------------------------------------------
# Intervals


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed rational interval ``[lo, hi]``.

    Every operation returns an interval containing the exact image of its
    operands; squaring and even powers are handled exactly.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Q(self.lo), Q(self.hi)
        if lo > hi:
            raise InvalidInput(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x):
        return cls(x, x)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def mag(self):
        return max(abs(self.lo), abs(self.hi))

    def contains(self, x):
        return self.lo <= x <= self.hi

    def contains_interval(self, other):
        return self.lo <= other.lo and other.hi <= self.hi

    def hull(self, other):
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        other = _as_interval(other)
        ps = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(ps), max(ps))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k == 0:
            return Interval(1, 1)
        a, b = self.lo ** k, self.hi ** k
        if k % 2 == 1:
            return Interval(a, b)
        if self.lo >= 0:
            return Interval(a, b)
        if self.hi <= 0:
            return Interval(b, a)
        return Interval(0, max(a, b))

    def __truediv__(self, other):
        other = _as_interval(other)
        if other.lo <= 0 <= other.hi:
            raise IntervalContainsZero(f"division by interval [{other.lo}, {other.hi}]")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def bisect(self):
        m = self.mid
        return Interval(self.lo, m), Interval(m, self.hi)


def _as_interval(x):
    return x if isinstance(x, Interval) else Interval.point(x)


Box = tuple  # tuple of Interval


def box(*bounds) -> tuple:
    return tuple(Interval(lo, hi) for lo, hi in bounds)


def box_hull(a, b):
    return tuple(x.hull(y) for x, y in zip(a, b))


def box_contains_point(b, p):
    return len(b) == len(p) and all(iv.contains(x) for iv, x in zip(b, p))


def box_contains_box(outer, inner):
    return all(o.contains_interval(i) for o, i in zip(outer, inner))


def box_maxnorm(b):
    return max((iv.mag() for iv in b), default=Fraction(0))


# ---------------------------------------------------------------------------
# Polynomials: dict mapping exponent tuples to rational coefficients


def poly_eval(poly, point):
    total = Fraction(0)
    for exps, c in poly.items():
        term = Q(c)
        for x, e in zip(point, exps):
            if e:
                term *= Q(x) ** e
        total += term
    return total


def poly_enclose(poly, domain):
    """Interval extension of one polynomial over a box."""
    total = Interval(0, 0)
    for exps, c in poly.items():
        if len(exps) != len(domain):
            raise InvalidInput("polynomial arity does not match domain dimension")
        term = Interval.point(c)
        for iv, e in zip(domain, exps):
            if e:
                term = term * (iv ** e)
        total = total + term
    return total


def enclose_poly_map(polys, domain):
    """Box containing the exact image of ``domain`` under a polynomial map."""
    domain = tuple(_as_interval(iv) for iv in domain)
    return tuple(poly_enclose(p, domain) for p in polys)


def poly_add(p, q, scale=1):
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, 0) + scale * c
        if out[k] == 0:
            del out[k]
    return out


def poly_scale(p, c):
    return {k: c * v for k, v in p.items() if c * v != 0}


def grid_points(bounds, steps):
    """Rational grid inside a box, for tests and sampling."""
    axes = []
    for lo, hi in bounds:
        lo, hi = Q(lo), Q(hi)
        axes.append([lo + (hi - lo) * Fraction(k, steps) for k in range(steps + 1)])
    return list(product(*axes))
