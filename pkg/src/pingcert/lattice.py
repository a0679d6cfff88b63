"""Hyperbolic lattices, integral isometries and primitive isotropic cusps."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidInput
from .exact import QMatrix, as_int, dot, lcm_denominators, signature, vec_gcd


@dataclass(frozen=True)
class Lattice:
    """Integral lattice of signature (1, rank - 1).

    ``anchor`` is a vector of positive square selecting the positive cone
    (it plays the part of an ample class).
    """

    gram: QMatrix
    anchor: tuple

    @property
    def rank(self):
        return self.gram.shape[0]

    def pair(self, x, y):
        return dot(x, self.gram @ tuple(y))

    def square(self, x):
        return self.pair(x, x)


@dataclass(frozen=True)
class Isometry:
    matrix: QMatrix
    det: int = field(default=1)

    def __call__(self, x):
        return self.matrix @ tuple(x)


@dataclass(frozen=True)
class Cusp:
    v: tuple
    label: str = ""


def _int_matrix(m, what):
    m = m if isinstance(m, QMatrix) else QMatrix(m)
    if not m.is_integral():
        raise InvalidInput(f"{what} must have integer entries")
    return m.to_int()


def validate_lattice(gram, anchor) -> Lattice:
    gram = _int_matrix(gram, "gram matrix")
    if not gram.is_square():
        raise InvalidInput("gram matrix is not square")
    if not gram.is_symmetric():
        raise InvalidInput("gram matrix is not symmetric")
    anchor = tuple(as_int(x) for x in anchor)
    if len(anchor) != gram.shape[0]:
        raise InvalidInput(f"anchor has length {len(anchor)}, expected {gram.shape[0]}")
    if gram.det() == 0:
        raise InvalidInput("not hyperbolic: gram matrix is degenerate")
    pos, neg, zero = signature(gram)
    if (pos, neg, zero) != (1, gram.shape[0] - 1, 0):
        raise InvalidInput(f"not hyperbolic: signature is ({pos}, {neg}, {zero})")
    lat = Lattice(gram, anchor)
    if lat.square(anchor) <= 0:
        raise InvalidInput("anchor not positive")
    return lat


def validate_isometry(lat: Lattice, m) -> Isometry:
    m = _int_matrix(m, "isometry")
    n = lat.rank
    if m.shape != (n, n):
        raise InvalidInput(f"isometry has shape {m.shape}, expected {(n, n)}")
    lhs = m.T @ lat.gram @ m
    for i in range(n):
        for j in range(n):
            if lhs[i, j] != lat.gram[i, j]:
                raise InvalidInput(
                    f"not an isometry: (g^T G g)[{i}][{j}] = {lhs[i, j]}, expected {lat.gram[i, j]}")
    det = m.det()
    if det not in (1, -1):
        raise InvalidInput(f"not an isometry: determinant {det}")
    return Isometry(m, det)


def make_cusp(lat: Lattice, v, label="") -> Cusp:
    v = tuple(as_int(x) for x in v)
    if len(v) != lat.rank:
        raise InvalidInput(f"cusp vector has length {len(v)}, expected {lat.rank}")
    if not any(v):
        raise InvalidInput("cusp vector is zero")
    if lat.square(v) != 0:
        raise InvalidInput("not isotropic")
    g = vec_gcd(v)
    v = tuple(x // g for x in v)
    s = lat.pair(v, lat.anchor)
    if s == 0:
        raise InvalidInput("not on positive-cone boundary")
    if s < 0:
        v = tuple(-x for x in v)
    return Cusp(v, label)


def fixes(g: Isometry, v) -> bool:
    return g(v) == tuple(v)


def infer_cusp(lat: Lattice, generators, label=""):
    """Common fixed isotropic class of a set of parabolic generators.

    The fixed space ``K`` of all generators is computed over Q; the cusp is the
    radical of the form restricted to ``K`` when that radical is a line.
    """
    n = lat.rank
    stacked = []
    for g in generators:
        d = g.matrix - QMatrix.identity(n)
        stacked.extend(d.rows)
    fixed = QMatrix(stacked).nullspace() if stacked else QMatrix.identity(n).columns()
    if not fixed:
        raise InvalidInput("generators have no common fixed vector; supply the cusp")
    K = QMatrix.from_columns(fixed)
    radical = (K.T @ lat.gram @ K).nullspace()
    if len(radical) != 1:
        raise InvalidInput("cannot infer a unique fixed isotropic class; supply the cusp")
    y = K @ radical[0]
    scale = lcm_denominators(y)
    return make_cusp(lat, [x * scale for x in y], label)
