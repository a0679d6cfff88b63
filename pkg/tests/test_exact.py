from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from pingcert.errors import IntervalContainsZero, InvalidInput
from pingcert.exact import (Interval, Q, QMatrix, charpoly, enclose_poly_map, fraction_str,
                            poly_enclose, poly_eval, signature, signature_by_descartes)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def matrices(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def symmetric(n):
    return matrices(n).map(lambda m: [[m[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)])


def sympy_signature(rows):
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    roots = M.charpoly(sympy.Symbol("x")).real_roots()
    assert len(roots) == len(rows)
    return (sum(1 for r in roots if r > 0), sum(1 for r in roots if r < 0),
            sum(1 for r in roots if r == 0))


def test_fraction_strings():
    assert Q("-3/2") == Fraction(-3, 2)
    assert Q("−3/2") == Fraction(-3, 2)
    assert fraction_str(Fraction(6, 4)) == "3/2"
    assert fraction_str(Fraction(4, 2)) == "2"
    for bad in ("3/0", "1.5.2", "x"):
        with pytest.raises(InvalidInput, match="malformed fraction"):
            Q(bad)
    with pytest.raises(InvalidInput):
        Q(1.5)
    with pytest.raises(InvalidInput):
        Q(True)


def test_matrix_basics():
    m = QMatrix([[2, 1], [1, 1]])
    assert m.det() == 1
    assert m.inverse() == QMatrix([[1, -1], [-1, 2]])
    assert m @ m.inverse() == QMatrix.identity(2)
    assert m ** -2 == m.inverse() @ m.inverse()
    assert m ** 0 == QMatrix.identity(2)
    assert QMatrix([[1, 2], [2, 4]]).rank() == 1
    ns = QMatrix([[1, 2], [2, 4]]).nullspace()
    assert len(ns) == 1 and QMatrix([[1, 2], [2, 4]]) @ ns[0] == (0, 0)


def test_signature_examples():
    J = QMatrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert signature(J) == (1, 2, 0)
    assert signature_by_descartes(J) == (1, 2, 0)
    U = QMatrix([[0, 1], [1, 0]])
    assert signature(U) == (1, 1, 0)
    assert signature(QMatrix([[1, 1], [1, 1]])) == (1, 0, 1)


@settings(max_examples=120, deadline=None)
@given(matrices(3))
def test_det_inverse_charpoly_vs_sympy(rows):
    m = QMatrix(rows)
    S = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    assert m.det() == Fraction(str(S.det()))
    lam = sympy.Symbol("x")
    coeffs = [Fraction(str(c)) for c in S.charpoly(lam).all_coeffs()]
    assert list(charpoly(m)) == coeffs[::-1]
    if m.det() != 0:
        assert m @ m.inverse() == QMatrix.identity(3)


@settings(max_examples=100, deadline=None)
@given(symmetric(3), matrices(3))
def test_sylvester_law(rows, change):
    """Signature agrees with an eigenvalue oracle and is invariant under congruence."""
    m = QMatrix(rows)
    sig = signature(m)
    assert sig == signature_by_descartes(m)
    assert sig == sympy_signature(rows)
    P = QMatrix(change)
    if P.det() != 0:
        assert signature(P.T @ m @ P) == sig


def test_interval_basics():
    a = Interval(-1, 2)
    assert a ** 2 == Interval(0, 4)
    assert Interval(-3, -1) ** 2 == Interval(1, 9)
    assert a * Interval(2, 3) == Interval(-3, 6)
    with pytest.raises(IntervalContainsZero):
        Interval(1, 2) / a
    assert Interval(1, 2) / Interval(2, 4) == Interval(Fraction(1, 4), 1)
    with pytest.raises(InvalidInput):
        Interval(2, 1)


ivs = st.tuples(small, small).map(lambda t: Interval(min(t), max(t)))


@settings(max_examples=150, deadline=None)
@given(ivs, ivs, st.integers(0, 6), st.integers(0, 4))
def test_interval_soundness(a, b, k, t):
    """Every operation contains the exact image of sampled points."""
    pts = lambda iv: [iv.lo, iv.hi, iv.mid, iv.lo + iv.width * Fraction(t, 4)]
    for x in pts(a):
        assert (a ** k).contains(x ** k)
        for y in pts(b):
            assert (a + b).contains(x + y)
            assert (a - b).contains(x - y)
            assert (a * b).contains(x * y)
            if not b.contains(0):
                assert (a / b).contains(x / y)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), small, max_size=6),
       ivs, ivs, st.integers(0, 4), st.integers(0, 4))
def test_poly_enclosure_soundness(poly, a, b, s, t):
    x = a.lo + a.width * Fraction(s, 4)
    y = b.lo + b.width * Fraction(t, 4)
    assert poly_enclose(poly, (a, b)).contains(poly_eval(poly, (x, y)))
    (enc,) = enclose_poly_map([poly], (a, b))
    assert enc.contains(poly_eval(poly, (x, y)))
