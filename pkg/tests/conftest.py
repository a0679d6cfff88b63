from fractions import Fraction

import pytest

from pingcert.exact import QMatrix
from pingcert.lattice import make_cusp, validate_isometry, validate_lattice

RANK3_GRAM = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
G_MAT = [[1, 0, 2], [0, 0, -1], [0, 1, 2]]
GP_MAT = [[0, 0, -1], [0, 1, 2], [1, 0, 2]]
RANK4_GRAM = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, -2, 0], [0, 0, 0, -2]]


def eichler(gram, x, z):
    """Eichler transvection y -> y - (y,x) z + (y,z) x - (z,z)/2 (y,x) x as a matrix."""
    G = QMatrix(gram)
    n = G.shape[0]

    def pair(a, b):
        return sum(a[i] * G[i, j] * b[j] for i in range(n) for j in range(n))

    cols = []
    for k in range(n):
        y = [int(i == k) for i in range(n)]
        yx, yz, zz = pair(y, x), pair(y, z), pair(z, z)
        cols.append([y[i] - yx * z[i] + yz * x[i] - Fraction(zz, 2) * yx * x[i] for i in range(n)])
    return QMatrix.from_columns(cols)


@pytest.fixture(scope="session")
def rank3():
    return validate_lattice(QMatrix(RANK3_GRAM), (1, 1, 1))


@pytest.fixture(scope="session")
def rank3_players(rank3):
    return [("g", [QMatrix(G_MAT)], (1, 0, 0)), ("gp", [QMatrix(GP_MAT)], (0, 1, 0))]


@pytest.fixture(scope="session")
def rank4():
    return validate_lattice(QMatrix(RANK4_GRAM), (1, 1, 0, 0))


@pytest.fixture(scope="session")
def rank4_players():
    G = RANK4_GRAM
    e, f, x = (1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 1, 0)
    w1, w2, emf = (0, 0, 1, 0), (0, 0, 0, 1), (1, -1, 0, 0)
    return [("a", [eichler(G, e, w1), eichler(G, e, w2)], e),
            ("b", [eichler(G, f, w1), eichler(G, f, w2)], f),
            ("c", [eichler(G, x, w2), eichler(G, x, emf)], x)]


@pytest.fixture(scope="session")
def rank3_cert(rank3, rank3_players):
    from pingcert.engine import certify_free_product
    result, _ = certify_free_product(rank3, rank3_players)
    return result


@pytest.fixture(scope="session")
def rank4_cert(rank4, rank4_players):
    from pingcert.engine import certify_free_product
    result, _ = certify_free_product(rank4, rank4_players)
    return result


@pytest.fixture(scope="session")
def cusp_e1(rank3):
    return make_cusp(rank3, (1, 0, 0))


@pytest.fixture(scope="session")
def g_iso(rank3):
    return validate_isometry(rank3, QMatrix(G_MAT))


ACCEPTANCE_LINES = []


def record_acceptance(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
