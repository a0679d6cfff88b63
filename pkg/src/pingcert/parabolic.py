"""Parabolic isometries: block form at a cusp, finite order of the linear part,
translation vectors and the lattice of translations with its exact minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, islice
from typing import NamedTuple

from .errors import InvalidInput, PingcertError, TranslationRankZero
from .exact import Q, QMatrix, lcm_denominators, signature, sup_norm, vector
from .lattice import Cusp, Isometry, Lattice

# ---------------------------------------------------------------------------
# Integer column reduction


def _column_reduce(row):
    """Unimodular ``U`` with ``row @ U = (g, 0, ..., 0)``, ``g = gcd(row) > 0``."""
    n = len(row)
    r = list(row)
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap(j, k):
        r[j], r[k] = r[k], r[j]
        for line in U:
            line[j], line[k] = line[k], line[j]

    def addmul(dst, src, q):
        r[dst] -= q * r[src]
        for line in U:
            line[dst] -= q * line[src]

    while True:
        nz = [j for j in range(n) if r[j] != 0]
        if not nz:
            raise InvalidInput("cannot reduce a zero row")
        j = min(nz, key=lambda k: abs(r[k]))
        if j != 0:
            swap(0, j)
        others = [k for k in range(1, n) if r[k] != 0]
        if not others:
            break
        for k in others:
            addmul(k, 0, r[k] // r[0])
    if r[0] < 0:
        r[0] = -r[0]
        for line in U:
            line[0] = -line[0]
    return r[0], QMatrix(U)


def unimodular_with_first_column(k):
    """Integer matrix of determinant +-1 whose first column is the primitive vector ``k``."""
    g, U = _column_reduce(tuple(k))
    if g != 1:
        raise InvalidInput("vector is not primitive")
    # k^T U = e_0^T  =>  U^T k = e_0  =>  (U^T)^{-1} e_0 = k
    V = U.T.inverse()
    assert V.column(0) == tuple(k)
    return V


# ---------------------------------------------------------------------------
# Basis adapted to a cusp


@dataclass(frozen=True)
class StabilizerBasis:
    """Basis ``(v, w_1..w_n, u)`` of the rational span adapted to a cusp.

    ``v, w_1..w_n`` is a Z-basis of the integral orthogonal complement of
    ``v``; ``u`` is rational with ``(v, u) = 1``.
    """

    lattice: Lattice
    v: tuple
    w: tuple
    u: tuple

    @property
    def n(self):
        return len(self.w)

    @property
    def matrix(self):
        return QMatrix.from_columns([self.v, *self.w, self.u])

    @property
    def inverse(self):
        return _cached_inverse(self.matrix)

    @property
    def gram_n(self):
        """Gram matrix of ``N = v^perp / Zv`` in the basis ``[w_i]``."""
        W = QMatrix.from_columns(self.w) if self.w else None
        if W is None:
            return QMatrix([])
        return (W.T @ self.lattice.gram @ W).to_int()

    def coordinates(self, y):
        return self.inverse @ tuple(y)


_INV_CACHE = {}


def _cached_inverse(m):
    inv = _INV_CACHE.get(m)
    if inv is None:
        inv = _INV_CACHE[m] = m.inverse()
    return inv


def complete_isotropic_basis(lat: Lattice, cusp: Cusp) -> StabilizerBasis:
    v = tuple(cusp.v)
    ell = lat.gram @ v  # x -> (x, v) as an integer row
    g, U = _column_reduce(ell)
    kernel = [U.column(j) for j in range(1, lat.rank)]
    u = tuple(Fraction(x, g) for x in U.column(0))
    if not kernel:
        raise InvalidInput("lattice of rank 1 has no cusps")
    K = QMatrix.from_columns(kernel)
    # coordinates of v in the kernel basis: K has full column rank
    coeffs = _solve_full_column_rank(K, v)
    k = tuple(int(c) for c in coeffs)
    if any(Fraction(c) != x for c, x in zip(coeffs, k)):
        raise PingcertError("internal: cusp not integral in v^perp basis")
    V = unimodular_with_first_column(k)
    new = K @ V
    cols = new.columns()
    assert cols[0] == v
    w = tuple(_reduce_mod_v(tuple(c), v) for c in cols[1:])
    u = vector(u)
    basis = StabilizerBasis(lat, v, w, u)
    if basis.matrix.det() == 0 or lat.pair(v, u) != 1:
        raise PingcertError("internal: adapted basis is degenerate")
    return basis


def _reduce_mod_v(w, v):
    # cosmetic: subtract the multiple of v that makes the first nonzero coordinate of v small in w
    j = next(i for i, x in enumerate(v) if x != 0)
    q = round(Fraction(w[j], v[j]))
    return tuple(a - q * b for a, b in zip(w, v))


def _solve_full_column_rank(K, y):
    _, pivots = K.T.rref()
    rows = list(pivots)
    sub = QMatrix([K.rows[i] for i in rows])
    x = sub.solve([y[i] for i in rows])
    if K @ x != tuple(y):
        raise InvalidInput("vector is not in the column span")
    return x


# ---------------------------------------------------------------------------
# Block form


@dataclass(frozen=True)
class BlockForm:
    """Blocks of ``M(g) = [[1, a^t, c], [0, A, b], [0, 0, d]]``."""

    a: tuple
    A: QMatrix
    b: tuple
    c: Fraction
    d: Fraction

    def assemble(self):
        n = len(self.b)
        rows = [[1, *self.a, self.c]]
        for i in range(n):
            rows.append([0, *self.A.rows[i], self.b[i]])
        rows.append([0] * (n + 1) + [self.d])
        return QMatrix(rows)


def block_decompose(g: Isometry, basis: StabilizerBasis) -> BlockForm:
    if g(basis.v) != basis.v:
        raise InvalidInput("not in stabilizer")
    P = basis.matrix
    M = basis.inverse @ g.matrix @ P
    n = basis.n
    if M.column(0) != tuple([1] + [0] * (n + 1)):
        raise PingcertError("internal: block zero pattern violated in first column")
    if any(M[n + 1, j] != 0 for j in range(n + 1)):
        raise PingcertError("internal: block zero pattern violated in last row")
    A = QMatrix([[M[i, j] for j in range(1, n + 1)] for i in range(1, n + 1)])
    if not A.is_integral():
        raise PingcertError("internal: linear part is not integral (basis bug)")
    bf = BlockForm(
        a=tuple(M[0, j] for j in range(1, n + 1)),
        A=A.to_int() if n else A,
        b=tuple(M[i, n + 1] for i in range(1, n + 1)),
        c=M[0, n + 1],
        d=M[n + 1, n + 1],
    )
    if bf.d != 1:
        raise PingcertError("internal: d-block is not 1")
    return bf


# ---------------------------------------------------------------------------
# Orders of definite isometries


def euler_phi(k):
    result, m, p = k, k, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def cyclotomic_indices(n):
    """All k with phi(k) <= n.  phi(k) >= sqrt(k/2) bounds the search."""
    if n == 0:
        return [1]
    return [k for k in range(1, 2 * n * n + 3) if euler_phi(k) <= n]


def order_bound(n):
    """lcm of every k with phi(k) <= n; the order of any finite-order
    integral n x n matrix divides it."""
    out = 1
    for k in cyclotomic_indices(n):
        out = math.lcm(out, k)
    return out


def _primes_upto(m):
    sieve = [True] * (m + 1)
    out = []
    for p in range(2, m + 1):
        if sieve[p]:
            out.append(p)
            for q in range(p * p, m + 1, p):
                sieve[q] = False
    return out


def max_order(n):
    """Upper bound on the order of a finite-order integral n x n matrix.

    Knapsack over prime powers with cost phi(p^a), the factor 2 being free
    (phi(2) = 1 never adds degree next to another cyclotomic factor).
    """
    best = {0: 1}
    for p in _primes_upto(n + 1 if n >= 1 else 2):
        options = []
        a = 1
        while True:
            cost = 0 if (p, a) == (2, 1) else euler_phi(p ** a)
            if cost > n:
                break
            options.append((cost, p ** a))
            a += 1
        new = dict(best)
        for used, val in best.items():
            for cost, pa in options:
                tot = used + cost
                if tot <= n and new.get(tot, 0) < val * pa:
                    new[tot] = val * pa
        best = new
    return max(best.values())


def finite_order(A: QMatrix, gramN: QMatrix) -> int:
    n = A.shape[0]
    if n == 0:
        return 1
    if not A.is_integral():
        raise InvalidInput("input violates preconditions: linear part not integral")
    if A.T @ gramN @ A != gramN:
        raise InvalidInput("input violates preconditions: A does not preserve the form")
    if signature(gramN) != (0, n, 0):
        raise InvalidInput("input violates preconditions: form is not negative definite")
    ident = QMatrix.identity(n)
    power = A
    for m in range(1, max_order(n) + 1):
        if power == ident:
            return m
        power = power @ A
    raise InvalidInput("input violates preconditions: order bound exceeded")


# ---------------------------------------------------------------------------
# Translation parts


class TranslationPart(NamedTuple):
    exponent: int
    t: tuple
    order: int
    powered: QMatrix


def translation_part(g: Isometry, basis: StabilizerBasis, convention="m") -> TranslationPart:
    """Power ``g`` until its linear part is trivial and read off the translation.

    ``convention="2m"`` powers by twice the order instead.
    """
    if convention not in ("m", "2m"):
        raise InvalidInput(f"unknown exponent convention {convention!r}")
    bf = block_decompose(g, basis)
    m = finite_order(bf.A, basis.gram_n)
    e = m if convention == "m" else 2 * m
    gm = g.matrix ** e
    pbf = block_decompose(Isometry(gm), basis)
    n = basis.n
    if n and not pbf.A.is_identity():
        raise PingcertError("internal: powered linear part is not the identity")
    if pbf.d != 1:
        raise PingcertError("internal: powered d-block is not 1")
    if not any(pbf.b):
        # zero translation forces c = 0 and a = 0, hence the identity
        if pbf.c != 0 or any(pbf.a) or not gm.is_identity():
            raise PingcertError("internal: zero translation on a non-identity element")
    return TranslationPart(e, tuple(pbf.b), m, gm)


# ---------------------------------------------------------------------------
# Translation lattices


def hermite_rows(vectors):
    """Row-echelon integer basis of the Z-span of integer vectors."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    ncols = len(rows[0])
    basis = []
    for col in range(ncols):
        active = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                (nxt if r[col] != 0 else rest).append(r)
            active = nxt
        if active:
            piv = active[0]
            if piv[col] < 0:
                piv = [-x for x in piv]
            for i, b in enumerate(basis):
                q = b[col] // piv[col]
                basis[i] = [x - q * y for x, y in zip(b, piv)]
            basis.append(piv)
        rows = [r for r in rest if any(r)]
    return [tuple(b) for b in basis]


def _ldl(G):
    r = G.shape[0]
    q = [Fraction(0)] * r
    mu = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r):
        q[i] = Q(G[i, i]) - sum((mu[k][i] ** 2 * q[k] for k in range(i)), Fraction(0))
        for j in range(i + 1, r):
            mu[i][j] = (Q(G[i, j]) - sum((mu[k][i] * mu[k][j] * q[k] for k in range(i)),
                                         Fraction(0))) / q[i]
    return q, mu


def _int_range(center, radius_sq):
    """Integers a with (a - center)^2 <= radius_sq."""
    if radius_sq < 0:
        return range(0)
    s = math.isqrt(math.floor(radius_sq))
    lo = math.floor(center) - s - 1
    hi = math.ceil(center) + s + 1
    good = [a for a in range(lo, hi + 1) if (a - center) ** 2 <= radius_sq]
    return range(good[0], good[-1] + 1) if good else range(0)


def shortest_sup_vector(basis):
    """Exact minimum sup-norm over nonzero integer combinations of ``basis``.

    Fincke-Pohst enumeration on the Euclidean Gram matrix, using
    ``|x|_2^2 <= dim * |x|_inf^2`` to bound the search and shrinking the
    radius whenever a shorter vector appears.  Returns (norm, coefficients).
    """
    B = QMatrix(basis)
    r, dim = B.shape
    G = B @ B.T
    q, mu = _ldl(G)
    i0 = min(range(r), key=lambda i: sup_norm(basis[i]))
    best = [sup_norm(basis[i0]), tuple(1 if k == i0 else 0 for k in range(r))]
    a = [0] * r

    def value(coeffs):
        return sup_norm(B.T @ coeffs)

    def search(i, partial):
        bound = dim * best[0] ** 2
        center = -sum((mu[i][j] * a[j] for j in range(i + 1, r)), Fraction(0))
        for ai in _int_range(center, (bound - partial) / q[i]):
            a[i] = ai
            p = partial + q[i] * (ai - center) ** 2
            if p > dim * best[0] ** 2:
                continue
            if i == 0:
                if any(a):
                    val = value(tuple(a))
                    if val < best[0] or (val == best[0] and _lex_key(a) < _lex_key(best[1])):
                        best[0], best[1] = val, tuple(a)
            else:
                search(i - 1, p)
        a[i] = 0

    search(r - 1, Fraction(0))
    return best[0], best[1]


def _lex_key(a):
    # canonical representative of +-a: first nonzero coefficient positive
    a = tuple(a)
    s = next((x for x in a if x), 1)
    return tuple(x if s > 0 else -x for x in a)


def sup_lower_bound(basis, max_subsets=500):
    """Cheap, re-checkable lower bound for the minimal sup-norm of a lattice.

    For an invertible row subset ``S`` of the n x r basis matrix, any nonzero
    integer ``a`` has ``1 <= |a|_inf <= |S^-1|_inf |Ba|_inf``.  Returns the
    best bound over tried subsets together with its row indices and ``S^-1``.
    """
    Bt = QMatrix(basis).T  # n x r, columns are basis vectors
    n, r = Bt.shape
    best = None
    for rows in islice(combinations(range(n), r), max_subsets):
        S = QMatrix([Bt.rows[i] for i in rows])
        if S.det() == 0:
            continue
        Sinv = S.inverse()
        norm = max(sum((abs(x) for x in row), Fraction(0)) for row in Sinv.rows)
        lb = 1 / Fraction(norm)
        if best is None or lb > best[0]:
            best = (lb, rows, Sinv)
    if best is None:
        raise PingcertError("internal: lattice basis is not of full column rank")
    return best


@dataclass(frozen=True)
class TranslationLattice:
    """Subgroup of Q^n generated by translation vectors.

    ``basis`` holds integer vectors equal to ``D`` times a Z-basis; ``coeffs``
    expresses each generator in that basis.  ``lambda1`` is the exact
    minimal nonzero sup-norm; ``lambda_lb`` a lower bound certified by the
    left inverse ``left_rows``/``left_inverse`` of the basis.
    """

    generators: tuple
    common_denominator: int
    rank: int
    basis: tuple
    coeffs: tuple
    lambda1: Fraction
    shortest: tuple
    lambda_lb: Fraction
    left_rows: tuple
    left_inverse: QMatrix


def translation_lattice(parts) -> TranslationLattice:
    parts = [(word, tuple(Q(x) for x in t)) for word, t in parts]
    if not parts:
        raise InvalidInput("translation lattice needs at least one generator")
    D = lcm_denominators(x for _, t in parts for x in t)
    ints = [tuple(int(x * D) for x in t) for _, t in parts]
    basis = hermite_rows(ints)
    if not basis:
        raise TranslationRankZero()
    r = len(basis)
    Bt = QMatrix(basis).T
    coeffs = []
    for v in ints:
        c = _solve_full_column_rank(Bt, v)
        if not all(Fraction(x).denominator == 1 for x in c):
            raise PingcertError("internal: generator not in its own lattice")
        coeffs.append(tuple(int(x) for x in c))
    lam, short = shortest_sup_vector(basis)
    lb, rows, Sinv = sup_lower_bound(basis)
    return TranslationLattice(
        generators=tuple(parts),
        common_denominator=D,
        rank=r,
        basis=tuple(basis),
        coeffs=tuple(coeffs),
        lambda1=Fraction(lam, D),
        shortest=short,
        lambda_lb=lb / D,
        left_rows=rows,
        left_inverse=Sinv,
    )
