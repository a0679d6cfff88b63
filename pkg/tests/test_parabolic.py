from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from pingcert.errors import InvalidInput, TranslationRankZero
from pingcert.exact import QMatrix, sup_norm
from pingcert.lattice import Isometry, make_cusp, validate_isometry, validate_lattice
from pingcert.parabolic import (block_decompose, complete_isotropic_basis, finite_order,
                                max_order, order_bound, shortest_sup_vector, sup_lower_bound,
                                translation_lattice, translation_part)

from conftest import G_MAT, GP_MAT


def test_rank3_basis(rank3, cusp_e1):
    b = complete_isotropic_basis(rank3, cusp_e1)
    assert b.v == (1, 0, 0)
    assert b.w == ((0, -1, 1),)
    assert b.u == (0, 1, 0)
    assert b.gram_n == QMatrix([[-2]])
    assert abs(b.matrix.det()) == 1


def test_rank3_block_form(rank3, cusp_e1, g_iso):
    b = complete_isotropic_basis(rank3, cusp_e1)
    bf = block_decompose(g_iso, b)
    assert bf.a == (2,) and bf.A == QMatrix([[1]]) and bf.b == (1,)
    assert bf.c == 0 and bf.d == 1
    # independent change of basis with sympy
    P = sympy.Matrix(3, 3, lambda i, j: b.matrix[i, j])
    M = P.inv() * sympy.Matrix(G_MAT) * P
    assert [[Fraction(str(x)) for x in M.row(i)] for i in range(3)] == [list(r) for r in bf.assemble().rows]
    assert b.matrix @ bf.assemble() @ b.inverse == g_iso.matrix


def test_translation_part(rank3, cusp_e1, g_iso):
    b = complete_isotropic_basis(rank3, cusp_e1)
    tp = translation_part(g_iso, b)
    assert (tp.exponent, tp.order, tp.t) == (1, 1, (1,))
    tp2 = translation_part(g_iso, b, convention="2m")
    assert tp2.exponent == 2 and tp2.t == (2,)
    with pytest.raises(InvalidInput, match="not in stabilizer"):
        block_decompose(validate_isometry(rank3, QMatrix(GP_MAT)), b)


@settings(max_examples=100, deadline=None)
@given(st.integers(-6, 6))
def test_zero_translation_is_identity(rank3, k):
    """In the stabilizer a trivial translation forces a = 0, c = 0 and g = I."""
    b = complete_isotropic_basis(rank3, make_cusp(rank3, (1, 0, 0)))
    g = Isometry(QMatrix(G_MAT) ** k)
    tp = translation_part(g, b)
    assert tp.t == (k,)
    bf = block_decompose(Isometry(tp.powered), b)
    assert bf.A.is_identity() and bf.d == 1 and bf.b == (k,)
    if k == 0:
        assert bf.a == (0,) and bf.c == 0 and tp.powered.is_identity()


def test_order_bounds():
    assert [max_order(n) for n in (1, 2, 4)] == [2, 6, 12]
    assert order_bound(1) == 2
    assert order_bound(2) == 12


def signed_perm(perm, signs):
    n = len(perm)
    return QMatrix([[signs[i] if perm[i] == j else 0 for j in range(n)] for i in range(n)])


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.permutations(range(n)),
                                                     st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n))))
def test_finite_order_minimal_and_divides(data):
    perm, signs = data
    n = len(perm)
    A = signed_perm(perm, signs)
    gram = QMatrix.identity(n).scale(-2)
    m = finite_order(A, gram)
    assert (A ** m).is_identity()
    assert all(not (A ** k).is_identity() for k in range(1, m))
    assert order_bound(n) % m == 0
    assert m <= max_order(n)


def test_finite_order_a2_rotation():
    gram = QMatrix([[-2, 1], [1, -2]])
    A = QMatrix([[0, -1], [1, -1]])
    assert finite_order(A, gram) == 3
    assert finite_order(-A, gram) == 6
    with pytest.raises(InvalidInput, match="preconditions"):
        finite_order(QMatrix([[1, 1], [0, 1]]), QMatrix([[-2, 0], [0, -2]]))


def test_translation_lattice_example():
    tl = translation_lattice([("a", (Fraction(1, 2), 0)), ("b", (0, Fraction(1, 3)))])
    assert tl.common_denominator == 6 and tl.rank == 2
    assert tl.lambda1 == Fraction(1, 3)
    assert tl.lambda_lb == Fraction(1, 3)
    with pytest.raises(TranslationRankZero, match="translation rank 0"):
        translation_lattice([("a", (0, 0))])


bases = st.lists(st.tuples(*[st.integers(-7, 7)] * 3), min_size=1, max_size=2).filter(
    lambda b: QMatrix([list(v) for v in b]).rank() == len(b))


@settings(max_examples=100, deadline=None)
@given(bases)
def test_shortest_vector_vs_brute_force(basis):
    basis = [tuple(v) for v in basis]
    lam, coeffs = shortest_sup_vector(basis)
    r = len(basis)
    vec = tuple(sum(c * v[k] for c, v in zip(coeffs, basis)) for k in range(3))
    assert any(coeffs) and sup_norm(vec) == lam
    brute = min(sup_norm(tuple(sum(c * v[k] for c, v in zip(cs, basis)) for k in range(3)))
                for cs in product(range(-5, 6), repeat=r) if any(cs))
    assert lam <= brute
    if max(abs(c) for c in coeffs) <= 5:
        assert lam == brute
    lb = sup_lower_bound(basis)[0]
    assert lb <= lam


def test_rank2_has_no_translations():
    """In U the stabilizer of e is {I}: (g e, g f) = 1 and g f isotropic force g f = f."""
    lat = validate_lattice(QMatrix([[0, 1], [1, 0]]), (1, 1))
    cusp = make_cusp(lat, (1, 0))
    b = complete_isotropic_basis(lat, cusp)
    assert b.n == 0
    from pingcert.engine import build_player
    with pytest.raises(TranslationRankZero, match="translation rank 0"):
        build_player(lat, "a", [QMatrix.identity(2)], (1, 0))
