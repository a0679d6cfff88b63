"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import json
import re
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

from pingcert import charts, parabolic, words
from pingcert.certificate import digest, recheck
from pingcert.cli import run
from pingcert.exact import QMatrix
from pingcert.lattice import Isometry, make_cusp
from pingcert.moebius import F1, F2, psl2_witness
from pingcert.parabolic import block_decompose, complete_isotropic_basis, translation_part
from pingcert.words import evaluate_word, falsify_relations, reduce_word

from conftest import G_MAT, GP_MAT, record_acceptance
from test_certificate import corrupted, rational_paths

ROOT = Path(__file__).resolve().parent.parent


def timed(argv):
    t = time.perf_counter()
    report, code, _ = run(argv)
    return report, code, time.perf_counter() - t


def test_criterion_1_moebius():
    details, ok = [], True
    for n in (2, 3, 4, 5):
        rep, code, dt = timed(["moebius-demo", "--n", str(n)])
        good = (code == 0 and rep["status"] == "certified" and dt < 1
                and rep["conclusion"] == f"<f1^{n}, f2^{n}> = <f1^{n}> * <f2^{n}> ≅ Z * Z"
                and all(c["ok"] for c in rep["certificate"]["checks"]))
        ok &= good
        details.append(f"n={n} {dt * 1000:.0f}ms")
    rep, code, dt = timed(["moebius-demo", "--n", "1"])
    w = rep["witness"]
    syl = [(p, tuple(e)) for p, e in w["syllables"]]
    value = evaluate_word(syl, {"f1": [F1.matrix], "f2": [F2.matrix]})
    good1 = (code == 1 and rep["status"] == "relation_found" and w["letters"] <= 6
             and value == -QMatrix.identity(2) and dt < 1)
    ok &= good1
    details.append(f"n=1 witness {w['word']} = -I")
    record_acceptance(1, ok, "; ".join(details))
    assert ok


def test_criterion_2_rank3_pipeline():
    rep, code, dt = timed(["certify", "rank3-kummer-cover"])
    exps = rep.get("exponents", [])
    cert_ok = code == 0 and rep["status"] == "certified" and len(exps) == 2 and min(exps) >= 2 and dt < 30
    # relation at exponents (1,1), budget 6
    frep, fcode, _ = timed(["falsify", "rank3-kummer-cover", "--exponents", "1,1", "--max-syllables", "6"])
    gens = {"g": [QMatrix(G_MAT)], "gp": [QMatrix(GP_MAT)]}
    mirror_word = reduce_word([("gp", 1), ("g", -1), ("gp", 1)] * 2)
    found = [w.word for w in falsify_relations(gens, 6, collect=True)]
    rel_ok = (fcode == 1 and frep["witness"]["letters"] <= 6 and mirror_word in found
              and evaluate_word(mirror_word, gens).is_identity())
    # nothing at the certified exponents, budget 12
    nrep, ncode, ndt = timed(["falsify", "rank3-kummer-cover", "--exponents", ",".join(map(str, exps)),
                              "--max-syllables", "12"])
    none_ok = ncode == 3 and "witness" not in nrep
    # consistency through the PSL(2,Z) covering: g' g^-1 g' mirrors f2 f1^-1 f2,
    # whose square is -I in SL(2,Z) and trivial in PSL(2,Z), i.e. in SO(2,1)
    pw = psl2_witness()
    cover_ok = (pw.is_identity("projective") and not pw.is_identity("exact")
                and [p for p, _ in pw.word] == [{"g": "f1", "gp": "f2"}[p] for p, _ in mirror_word]
                and [e for _, e in pw.word] == [e for _, e in mirror_word]
                and min(exps) >= 2)
    ok = cert_ok and rel_ok and none_ok and cover_ok
    record_acceptance(2, ok, f"certified exponents {exps} in {dt:.2f}s; (1,1) relation "
                             f"{frep['witness']['word']} (search also contains {mirror_word}); "
                             f"no relation at {exps} up to 12 syllables ({ndt:.1f}s); covering consistent")
    assert ok


def test_criterion_3_parabolic_oracle(rank3):
    cusp = make_cusp(rank3, (1, 0, 0))
    b = complete_isotropic_basis(rank3, cusp)
    g = Isometry(QMatrix(G_MAT))
    bf = block_decompose(g, b)
    # independent oracle: plain change-of-basis multiplication with an
    # inverse computed by Cramer's rule on the 3x3 basis matrix
    P = [list(r) for r in b.matrix.rows]

    def det3(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    d = Fraction(det3(P))
    # 3x3 inverse by cyclic cofactors (the cyclic index shift carries the sign)
    inv = [[Fraction(P[(j + 1) % 3][(i + 1) % 3] * P[(j + 2) % 3][(i + 2) % 3]
                     - P[(j + 1) % 3][(i + 2) % 3] * P[(j + 2) % 3][(i + 1) % 3]) / d
            for j in range(3)] for i in range(3)]
    mul = lambda x, y: [[sum(x[i][k] * y[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    oracle = mul(mul(inv, G_MAT), P)
    reassembled = b.matrix @ bf.assemble() @ b.inverse
    tp = translation_part(g, b)
    ok = (oracle == [list(r) for r in bf.assemble().rows]
          and reassembled == QMatrix(G_MAT)
          and tp.order == 1 and bf.b in ((1,), (-1,)) and bf.d == 1 and bf.c == 0)
    record_acceptance(3, ok, f"a={list(bf.a)} A={bf.A.rows} b={list(bf.b)} c={bf.c} d={bf.d}, m={tp.order}; "
                             "reassembly and oracle agree exactly")
    assert ok


PROPERTY_SUITES = {
    "isometry pairing preservation": "tests/test_lattice.py::test_isometry_pairing_preservation",
    "chart round trip, isotropy, (.,v)=1": "tests/test_charts.py::test_round_trip_and_normalization",
    "translation equivariance": "tests/test_charts.py::test_translation_equivariance",
    "transport soundness (200 points)": "tests/test_charts.py::test_transport_soundness",
    "finite_order minimality/divisibility": "tests/test_parabolic.py::test_finite_order_minimal_and_divides",
    "shortest vector vs brute force": "tests/test_parabolic.py::test_shortest_vector_vs_brute_force",
    "word evaluation homomorphism": "tests/test_words.py::test_word_evaluation_homomorphism",
    "certificate/falsifier non-contradiction": "tests/test_engine.py::test_certificate_falsifier_non_contradiction",
}


def test_criterion_4_property_suites():
    t = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                           "--hypothesis-show-statistics", *PROPERTY_SUITES.values()],
                          cwd=ROOT, capture_output=True, text=True)
    dt = time.perf_counter() - t
    counts = {}
    current = None
    for line in proc.stdout.splitlines():
        m = re.match(r"(tests/\S+::\S+):", line.strip())
        if m:
            current = m.group(1)
        m = re.search(r"(\d+) passing examples, (\d+) failing", line)
        if m and current:
            counts[current] = counts.get(current, 0) + int(m.group(1))
    need = {v: (200 if "soundness" in v else 100) for v in PROPERTY_SUITES.values()}
    short = {k: counts.get(k, 0) for k, n in need.items() if counts.get(k, 0) < n}
    ok = proc.returncode == 0 and not short and dt < 60
    record_acceptance(4, ok, f"{len(PROPERTY_SUITES)} suites, min cases "
                             f"{min(counts.values()) if counts else 0}, total {dt:.1f}s"
                             + (f"; short: {short}" if short else ""))
    assert ok, proc.stdout[-3000:]


def test_criterion_5_degenerate():
    rep, code, _ = timed(["certify", "rank2-degenerate"])
    ok = code == 2 and rep["status"] == "invalid_input" and "translation rank 0" in rep["error"]
    record_acceptance(5, ok, f"exit {code}: {rep.get('error')}")
    assert ok


def test_criterion_6_recheck(monkeypatch):
    certs = []
    for name in ("rank3-kummer-cover", "rank4-three-cusps"):
        rep, code, _ = timed(["certify", name])
        assert code == 0
        certs.append(rep["certificate"])
    for n in (2, 3, 4, 5):
        certs.append(run(["moebius-demo", "--n", str(n)])[0]["certificate"])

    def forbidden(*a, **k):
        raise AssertionError("search during recheck")

    with monkeypatch.context() as mp:
        for mod, name in ((charts, "transport_enclosure"), (parabolic, "shortest_sup_vector"),
                          (parabolic, "sup_lower_bound"), (words, "falsify_relations")):
            mp.setattr(mod, name, forbidden)
        mp.setattr(charts.Interval, "bisect", forbidden)
        clean = [recheck(json.loads(json.dumps(c))) for c in certs]
    all_pass = all(f == [] for f in clean)
    missed = 0
    total = 0
    for c in certs:
        paths = list(rational_paths(c))
        if len(paths) > 300:
            paths = paths[::3]
        for p in paths:
            total += 1
            if not recheck(corrupted(c, p)):
                missed += 1
    tamper = dict(certs[0])
    tamper["conclusion"] = "<H_g, H_gp> = H_g * H_gp ≅ Z * Z * Z"
    tamper["digest"] = digest(tamper)
    ok = all_pass and missed == 0 and recheck(tamper)
    record_acceptance(6, ok, f"{len(certs)} certificates recheck with search disabled; "
                             f"{total - missed}/{total} corruptions rejected")
    assert ok
