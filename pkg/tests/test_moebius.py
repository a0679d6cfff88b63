from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pingcert.errors import InvalidInput
from pingcert.exact import QMatrix
from pingcert.moebius import (F1, F2, INFINITY, J, P, U1, GeneralizedCircle, MoebiusMap,
                              generation_words, gaussian, image_circle, in_u1, in_u2,
                              moebius_act, psl2_witness, region_contains_disk, verify_moebius_pingpong)
from pingcert.words import Witness, evaluate_word, falsify_relations

q = st.fractions(min_value=-6, max_value=6, max_denominator=8)
points = st.tuples(q, q).map(lambda t: gaussian(*t))


def _product(letters):
    m = MoebiusMap(1, 0, 0, 1)
    for g, k in letters:
        m = m @ (g ** k)
    return m


maps = st.lists(st.tuples(st.sampled_from([F1, F2, J]), st.integers(-2, 2)), max_size=5).map(_product)


def test_act_examples():
    assert moebius_act(J, gaussian(0, 2)) == gaussian(0, Fraction(-1, 2))
    assert in_u1(J(P))
    assert moebius_act(F2 ** 2, gaussian(0)) == gaussian(2)
    assert moebius_act(J, INFINITY) == gaussian(0)
    assert moebius_act(J, gaussian(0)) is INFINITY or moebius_act(J, gaussian(0)).infinite
    with pytest.raises(InvalidInput):
        MoebiusMap(2, 0, 0, 1)


def test_image_circle_examples():
    line = GeneralizedCircle.half_plane_re(1)
    img = image_circle(J, line)
    assert img.kind == "disk" and img.center() == gaussian(Fraction(1, 2)) and img.radius2() == Fraction(1, 4)
    img2 = image_circle(F2 ** 2, U1)
    assert img2.center() == gaussian(2) and img2.radius2() == 1
    img3 = image_circle(J, U1)
    assert img3.kind == "exterior" and img3.center() == gaussian(0) and img3.radius2() == 1


@settings(max_examples=100, deadline=None)
@given(maps, maps, points)
def test_action_homomorphism(m1, m2, p):
    assert moebius_act(m1 @ m2, p) == moebius_act(m1, moebius_act(m2, p))


@settings(max_examples=100, deadline=None)
@given(maps, q, q, st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4),
       st.sampled_from([(Fraction(3, 5), Fraction(4, 5)), (Fraction(-5, 13), Fraction(12, 13)),
                        (Fraction(1), Fraction(0)), (Fraction(-8, 17), Fraction(-15, 17))]))
def test_circle_image_consistency(m, a, b, r, direction):
    """Exact points of a circle (rational radius) map onto the image circle."""
    c = gaussian(a, b)
    circ = GeneralizedCircle.disk(c, r * r)
    img = image_circle(m, circ)
    for sx, sy in (direction, (-direction[1], direction[0]), (-direction[0], -direction[1])):
        z = c + gaussian(r * sx, r * sy)
        w = moebius_act(m, z)
        assert img.on_boundary(w)
    # an interior point stays inside
    w = moebius_act(m, c)
    assert img.contains(w)


def test_region_inclusions():
    small = GeneralizedCircle.disk(gaussian(Fraction(1, 2)), Fraction(1, 4))
    assert region_contains_disk(U1, small)
    assert not region_contains_disk(U1, GeneralizedCircle.disk(gaussian(1), Fraction(1, 4)))
    half = GeneralizedCircle.half_plane_re(1)
    assert region_contains_disk(half, GeneralizedCircle.disk(gaussian(2), 1))
    assert not region_contains_disk(half, GeneralizedCircle.disk(gaussian(Fraction(3, 2)), 1))
    ext = image_circle(J, U1)
    assert region_contains_disk(ext, GeneralizedCircle.disk(gaussian(3), 1))
    assert not region_contains_disk(ext, GeneralizedCircle.disk(gaussian(2), Fraction(5, 4)))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_certificates(n):
    c = verify_moebius_pingpong(n)
    assert c.conclusion == f"<f1^{n}, f2^{n}> = <f1^{n}> * <f2^{n}> ≅ Z * Z"
    assert all(ok for _, _, ok in c.checks)
    from pingcert.certificate import recheck
    assert recheck(c.to_dict()) == []


def test_n1_witness():
    w = verify_moebius_pingpong(1)
    assert isinstance(w, Witness)
    assert w.matrix == -QMatrix.identity(2)
    assert w.word.letters <= 6
    pw = psl2_witness()
    assert pw.word.letters == 6 and len(pw.word) == 5
    assert pw.is_identity("projective") and not pw.is_identity("exact")
    assert pw.trace[-1][1] == pw.product
    # (f2 f1^-1 f2) = [[0, 1], [-1, 0]]
    assert F2.matrix @ F1.matrix.inverse() @ F2.matrix == QMatrix([[0, 1], [-1, 0]])


@pytest.mark.parametrize("n", range(1, 8))
def test_conjugation_identity(n):
    assert J @ (F2 ** n) @ J == F1 ** n


def test_generation():
    gens = {"f1": [F1.matrix], "f2": [F2.matrix]}
    words = generation_words()
    assert evaluate_word(words["S"], gens) == QMatrix([[0, -1], [1, 0]])
    assert evaluate_word(words["T"], gens) == QMatrix([[1, 1], [0, 1]])


def test_cross_validation_with_falsifier():
    gens = {"f1": [(F1 ** 2).matrix], "f2": [(F2 ** 2).matrix]}
    assert falsify_relations(gens, 14, mode="projective", exponent_bound=2) is None


def test_basepoint_outside():
    assert not in_u1(P) and not in_u2(P)
    assert in_u2(INFINITY)


def test_recheck_detects_tampering():
    from pingcert.certificate import digest, recheck
    d = verify_moebius_pingpong(2).to_dict()
    d["checks"][1]["data"]["image"][3] = "1/3"
    d["digest"] = digest(d)
    assert recheck(d)
    d = verify_moebius_pingpong(2).to_dict()
    d["n"] = 3
    d["digest"] = digest(d)
    assert recheck(d)
