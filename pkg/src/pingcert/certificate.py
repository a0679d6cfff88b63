"""JSON form of certificates and their re-verification.

Re-verification uses only the stored data: matrix identities, one interval
evaluation per stored leaf, and rational comparisons.  It never subdivides and
never enumerates lattice points or words.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .charts import AT_INFINITY, Chart, Leaf, check_transport
from .errors import PingcertError
from .exact import Interval, Q, QMatrix, box_maxnorm, fraction_str, sup_norm
from .lattice import Cusp, Isometry, validate_isometry, validate_lattice
from .parabolic import StabilizerBasis, block_decompose
from .engine import CAVEAT, conclusion_string, free_product_string

FORMAT = 1


# ---------------------------------------------------------------------------
# Encoding helpers


def enc_q(x):
    return fraction_str(x)


def enc_vec(v):
    return [enc_q(x) for x in v]


def enc_mat(m):
    return [enc_vec(r) for r in (m.rows if isinstance(m, QMatrix) else m)]


def enc_box(b):
    return [[enc_q(iv.lo), enc_q(iv.hi)] for iv in b]


def dec_vec(v):
    return tuple(Q(x) for x in v)


def dec_mat(m):
    return QMatrix([[Q(x) for x in r] for r in m])


def dec_box(b):
    return tuple(Interval(Q(lo), Q(hi)) for lo, hi in b)


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(obj):
    body = {k: v for k, v in obj.items() if k != "digest"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


# ---------------------------------------------------------------------------
# Lattice ping-pong certificates


def certificate_to_dict(cert):
    lat = cert.lattice
    players = []
    for pl, c in zip(cert.players, cert.exponents):
        b = pl.chart.basis
        tl = pl.translations
        players.append({
            "name": pl.name,
            "cusp": enc_vec(pl.cusp.v),
            "basis": {"v": enc_vec(b.v), "w": [enc_vec(w) for w in b.w], "u": enc_vec(b.u)},
            "generators": [enc_mat(g.matrix) for g in pl.generators],
            "convention": pl.convention,
            "orders": [p.order for p in pl.parts],
            "powers": [p.exponent for p in pl.parts],
            "translations": [enc_vec(p.t) for p in pl.parts],
            "translation_lattice": {
                "denominator": tl.common_denominator,
                "rank": tl.rank,
                "basis": [enc_vec(v) for v in tl.basis],
                "coeffs": [list(c_) for c_ in tl.coeffs],
                "lambda1": enc_q(tl.lambda1),
                "shortest": list(tl.shortest),
                "lambda_lb": enc_q(tl.lambda_lb),
                "left_rows": list(tl.left_rows),
                "left_inverse": enc_mat(tl.left_inverse),
            },
            "exponent": c,
        })
    out = {
        "format": FORMAT,
        "kind": "lattice-pingpong",
        "lattice": {"gram": enc_mat(lat.gram), "anchor": enc_vec(lat.anchor)},
        "players": players,
        "table": {
            "radii": enc_vec(cert.table.radii),
            "basepoint": enc_vec(cert.table.basepoint.representative),
            "basepoint_coords": [enc_vec(x) for x in cert.basepoint_coords],
        },
        "transports": [{
            "target": t.target,
            "source": t.source,
            "radius": enc_q(t.radius),
            "r_max": enc_q(t.r_max),
            "box": enc_box(t.box),
            "maxnorm": enc_q(box_maxnorm(t.box)),
            "leaves": [{"face": list(leaf.face), "domain": enc_box(leaf.domain),
                        "enclosure": enc_box(leaf.enclosure)} for leaf in t.leaves],
        } for t in cert.transports],
        "inclusions": [{
            "target": inc.target,
            "source": inc.source,
            "exponent": inc.exponent,
            "lambda": enc_q(inc.lam),
            "lhs": enc_q(inc.lhs),
            "radius": enc_q(inc.radius),
            "box_maxnorm": enc_q(inc.box_maxnorm),
            "basepoint_norm": enc_q(inc.basepoint_norm),
            "rhs": enc_q(inc.rhs),
        } for inc in cert.inclusions],
        "subgroups": {pl.name: [f"{pl.name}[{k}]^{p.exponent * c}" for k, p in enumerate(pl.parts)]
                      for pl, c in zip(cert.players, cert.exponents)},
        "free_product": cert.free_product,
        "conclusion": cert.conclusion,
        "caveat": cert.caveat,
    }
    out["digest"] = digest(out)
    return out


def _expect(cond, msg, failures):
    if not cond:
        failures.append(msg)
    return cond


def recheck(data):
    """Re-verify a certificate dictionary.  Returns a list of failures
    (empty on success)."""
    if not isinstance(data, dict):
        return ["certificate is not a JSON object"]
    kind = data.get("kind")
    try:
        if kind == "lattice-pingpong":
            failures = _recheck_lattice(data)
        elif kind == "moebius-pingpong":
            from .moebius import recheck_moebius
            failures = recheck_moebius(data)
        else:
            return [f"unknown certificate kind {kind!r}"]
    except (PingcertError, KeyError, TypeError, ValueError, IndexError, ZeroDivisionError,
            AssertionError) as exc:
        failures = [f"malformed certificate: {type(exc).__name__}: {exc}"]
    if data.get("digest") != digest(data):
        failures.append("digest mismatch")
    return failures


def _recheck_lattice(data):
    f = []
    if data.get("format") != FORMAT:
        f.append("unsupported format")
    lat = validate_lattice(dec_mat(data["lattice"]["gram"]), dec_vec(data["lattice"]["anchor"]))
    pls = data["players"]
    s = len(pls)
    _expect(s >= 2, "fewer than two players", f)
    charts, lams, ranks = [], [], []
    for pd in pls:
        name = pd["name"]
        v = dec_vec(pd["cusp"])
        _expect(lat.square(v) == 0 and lat.pair(v, lat.anchor) > 0,
                f"{name}: cusp not on the positive-cone boundary", f)
        b = pd["basis"]
        basis = StabilizerBasis(lat, dec_vec(b["v"]), tuple(dec_vec(w) for w in b["w"]),
                                dec_vec(b["u"]))
        _expect(basis.v == v, f"{name}: basis does not start at the cusp", f)
        _expect(len(basis.w) == lat.rank - 2, f"{name}: wrong number of w-vectors", f)
        _expect(all(lat.pair(w, v) == 0 for w in basis.w), f"{name}: w not orthogonal to v", f)
        _expect(lat.pair(v, basis.u) == 1, f"{name}: (v, u) != 1", f)
        _expect(basis.matrix.is_integral() and abs(basis.matrix.det()) == 1,
                f"{name}: basis is not an integral unimodular basis", f)
        chart = Chart(lat, Cusp(v, name), basis)
        charts.append(chart)

        gens = [validate_isometry(lat, dec_mat(g)) for g in pd["generators"]]
        for a in range(len(gens)):
            _expect(gens[a](v) == v, f"{name}: generator {a} does not fix the cusp", f)
            for c in range(a + 1, len(gens)):
                x, y = gens[a].matrix, gens[c].matrix
                _expect(x @ y == y @ x, f"{name}: generators {a}, {c} do not commute", f)
        conv = pd["convention"]
        _expect(conv in ("m", "2m"), f"{name}: unknown convention", f)
        ts = [dec_vec(t) for t in pd["translations"]]
        _expect(len(ts) == len(gens) == len(pd["powers"]) == len(pd["orders"]),
                f"{name}: generator data lengths differ", f)
        for k, (g, e, m, t) in enumerate(zip(gens, pd["powers"], pd["orders"], ts)):
            _expect(int(e) == (m if conv == "m" else 2 * m), f"{name}: power {k} != convention", f)
            _expect(int(m) >= 1, f"{name}: order {k} not positive", f)
            A = block_decompose(g, basis).A
            if basis.n:
                _expect((A ** int(m)).is_identity(), f"{name}: A^m != I for generator {k}", f)
            bf = block_decompose(Isometry(g.matrix ** int(e)), basis)
            if basis.n:
                _expect(bf.A.is_identity(), f"{name}: powered generator {k} not a translation", f)
            _expect(tuple(bf.b) == t, f"{name}: stored translation {k} is wrong", f)

        tl = pd["translation_lattice"]
        D = int(tl["denominator"])
        B = [dec_vec(x) for x in tl["basis"]]
        r = int(tl["rank"])
        _expect(D >= 1 and len(B) == r and r >= 1, f"{name}: malformed translation lattice", f)
        _expect(all(all(Fraction(x).denominator == 1 for x in vec) for vec in B),
                f"{name}: lattice basis not integral", f)
        _expect(QMatrix(B).rank() == r, f"{name}: lattice basis dependent", f)
        coeffs = [tuple(int(x) for x in c) for c in tl["coeffs"]]
        for k, (t, c) in enumerate(zip(ts, coeffs)):
            comb = tuple(sum((ci * bv[l] for ci, bv in zip(c, B)), 0) for l in range(len(t)))
            _expect(tuple(D * x for x in t) == comb, f"{name}: translation {k} not in lattice", f)
        _expect(len(coeffs) == len(ts), f"{name}: coefficient count mismatch", f)
        # the generators must span the stored lattice, or lambda bounds a bigger group
        _expect(QMatrix(coeffs).rank() == r if coeffs else False, f"{name}: generators do not span", f)
        rows = [int(x) for x in tl["left_rows"]]
        Sinv = dec_mat(tl["left_inverse"])
        S = QMatrix([[vec[i] for vec in B] for i in rows])
        _expect(Sinv @ S == QMatrix.identity(r), f"{name}: left inverse is wrong", f)
        norm = max(sum((abs(x) for x in row), Fraction(0)) for row in Sinv.rows)
        lb = 1 / (norm * D)
        _expect(Q(tl["lambda_lb"]) == lb, f"{name}: lambda lower bound mismatch", f)
        lam1 = Q(tl["lambda1"])
        short = tuple(int(x) for x in tl["shortest"])
        sv = tuple(sum((a * bv[l] for a, bv in zip(short, B)), 0) for l in range(len(B[0])))
        _expect(any(short) and sup_norm(sv) == lam1 * D, f"{name}: shortest-vector witness mismatch", f)
        _expect(lb <= lam1, f"{name}: lower bound exceeds lambda1", f)
        # the coefficient lattice generated by the powered generators must be all of Z^r,
        # i.e. the coefficient matrix has full rank; elements with zero translation are trivial
        lams.append(lb)
        ranks.append(r)

    names = [pd["name"] for pd in pls]
    _expect(len(set(names)) == len(names), "player names repeat", f)
    for i in range(s):
        for j in range(i):
            _expect(charts[i].v != charts[j].v, f"players {names[j]}, {names[i]} share a cusp", f)

    tab = data["table"]
    radii = [Q(x) for x in tab["radii"]]
    _expect(len(radii) == s and all(x > 0 for x in radii), "bad radii", f)
    p = dec_vec(tab["basepoint"])
    _expect(lat.square(p) == 0 and lat.pair(p, lat.anchor) > 0, "basepoint not on the boundary", f)
    coords = []
    for i, ch in enumerate(charts):
        x = ch.from_boundary(p)
        _expect(x is not AT_INFINITY, f"basepoint is the cusp of {names[i]}", f)
        coords.append(x)
        _expect(x == dec_vec(tab["basepoint_coords"][i]), f"basepoint coordinates wrong in {names[i]}", f)
        _expect(x is AT_INFINITY or sup_norm(x) <= radii[i], f"basepoint lies in U_{names[i]}", f)
        for j in range(s):
            if j != i:
                _expect(sup_norm(ch.position(charts[j].cusp)) <= radii[i],
                        f"cusp of {names[j]} lies in U_{names[i]}", f)

    boxes = {}
    for td in data["transports"]:
        i, j = int(td["target"]), int(td["source"])
        _expect(i != j and 0 <= i < s and 0 <= j < s, "bad transport indices", f)
        _expect(Q(td["radius"]) == radii[j], f"transport ({i},{j}) uses the wrong radius", f)
        box = dec_box(td["box"])
        leaves = [Leaf(tuple(int(x) for x in ld["face"]), dec_box(ld["domain"]),
                       dec_box(ld["enclosure"])) for ld in td["leaves"]]
        for msg in check_transport(charts[i], charts[j], radii[j], Q(td["r_max"]), leaves, box):
            f.append(f"transport ({i},{j}): {msg}")
        _expect(Q(td["maxnorm"]) == box_maxnorm(box), f"transport ({i},{j}): maxnorm mismatch", f)
        boxes[(i, j)] = box
    _expect(set(boxes) == {(i, j) for i in range(s) for j in range(s) if i != j},
            "transports do not cover every ordered pair", f)

    exps = [int(pd["exponent"]) for pd in pls]
    _expect(all(c >= 1 for c in exps), "exponents must be positive", f)
    seen = set()
    for idt in data["inclusions"]:
        i, j = int(idt["target"]), int(idt["source"])
        seen.add((i, j))
        c, lam, R = int(idt["exponent"]), Q(idt["lambda"]), Q(idt["radius"])
        bm, pn = Q(idt["box_maxnorm"]), Q(idt["basepoint_norm"])
        _expect(c == exps[i], f"inclusion ({i},{j}): exponent mismatch", f)
        _expect(lam == lams[i], f"inclusion ({i},{j}): lambda mismatch", f)
        _expect(R == radii[i], f"inclusion ({i},{j}): radius mismatch", f)
        _expect((i, j) in boxes and bm == box_maxnorm(boxes[(i, j)]),
                f"inclusion ({i},{j}): box norm mismatch", f)
        _expect(coords[i] is not AT_INFINITY and pn == sup_norm(coords[i]),
                f"inclusion ({i},{j}): basepoint norm mismatch", f)
        lhs, rhs = c * lam, R + max(bm, pn)
        _expect(Q(idt["lhs"]) == lhs and Q(idt["rhs"]) == rhs,
                f"inclusion ({i},{j}): stored sides differ", f)
        _expect(lhs > rhs, f"inclusion ({i},{j}): {lhs} <= {rhs}", f)
    _expect(seen == set(boxes), "inclusions do not cover every ordered pair", f)

    _expect(data.get("free_product") == free_product_string(ranks), "free product string mismatch", f)
    _expect(data.get("conclusion") == conclusion_string(names, ranks), "conclusion mismatch", f)
    _expect(data.get("caveat") == CAVEAT, "caveat missing", f)
    for pd in pls:
        expected = [f"{pd['name']}[{k}]^{int(e) * int(pd['exponent'])}" for k, e in enumerate(pd["powers"])]
        _expect(data.get("subgroups", {}).get(pd["name"]) == expected,
                f"{pd['name']}: subgroup description mismatch", f)
    return f


def subgroup_generators(data):
    """Exact generator matrices of each certified subgroup, from a stored certificate."""
    out = {}
    for pd in data["players"]:
        c = int(pd["exponent"])
        out[pd["name"]] = [dec_mat(g) ** (int(e) * c) for g, e in zip(pd["generators"], pd["powers"])]
    return out
