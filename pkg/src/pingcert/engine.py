"""Ping-pong certification of free products of parabolic subgroups.

Each player is a free abelian group of isometries fixing one cusp.  After
powering its generators so that they act on the cusp's chart as pure
translations, a further exponent ``c`` pushes every foreign neighbourhood and
the basepoint into the player's own neighbourhood, which is the hypothesis of
the ping-pong lemma.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .charts import AT_INFINITY, Chart, SpherePoint, Undecided, transport_enclosure
from .errors import InvalidInput, TranslationRankZero, tag_stage
from .exact import Q, box_maxnorm, sup_norm, vector
from .lattice import Lattice, infer_cusp, make_cusp, validate_isometry
from .parabolic import TranslationLattice, translation_lattice, translation_part

CAVEAT = ("statement holds in O(NS); lifting to Bir M needs subgroups H_i of the "
          "Mordell-Weil groups with r_NS(H_i) = H_i' and finite Ker r_NS (assumed, not computed)")


@dataclass(frozen=True)
class Player:
    name: str
    chart: Chart
    generators: tuple
    parts: tuple
    translations: TranslationLattice
    convention: str = "m"

    @property
    def cusp(self):
        return self.chart.cusp

    @property
    def rank(self):
        return self.translations.rank

    @property
    def powered(self):
        return tuple(p.powered for p in self.parts)

    @property
    def lam(self):
        """Certified lower bound on the sup-norm of nonzero translations."""
        return self.translations.lambda_lb


@dataclass(frozen=True)
class Table:
    radii: tuple
    basepoint: SpherePoint


@dataclass(frozen=True)
class Refuted:
    reason: str


@dataclass(frozen=True)
class Inclusion:
    target: int
    source: int
    exponent: int
    lam: Fraction
    radius: Fraction
    box_maxnorm: Fraction
    basepoint_norm: Fraction

    @property
    def lhs(self):
        return self.exponent * self.lam

    @property
    def rhs(self):
        return self.radius + max(self.box_maxnorm, self.basepoint_norm)

    def holds(self):
        return self.lhs > self.rhs


@dataclass(frozen=True)
class Certificate:
    lattice: Lattice
    players: tuple
    table: Table
    exponents: tuple
    basepoint_coords: tuple
    transports: tuple
    inclusions: tuple
    caveat: str = field(default=CAVEAT)

    @property
    def free_product(self):
        return free_product_string(p.rank for p in self.players)

    @property
    def conclusion(self):
        return conclusion_string([p.name for p in self.players], [p.rank for p in self.players])

    def subgroup_generators(self):
        """Generators of each certified subgroup ``H_i``, as exact matrices."""
        return {p.name: [m ** c for m in p.powered] for p, c in zip(self.players, self.exponents)}


def free_product_string(ranks):
    return " * ".join("Z" if r == 1 else f"Z^{r}" for r in ranks)


def conclusion_string(names, ranks):
    hs = [f"H_{n}" for n in names]
    return f"<{', '.join(hs)}> = {' * '.join(hs)} ≅ {free_product_string(ranks)}"


# ---------------------------------------------------------------------------
# Players


@tag_stage("validate")
def _validate_generators(lat, name, matrices):
    if not matrices:
        raise InvalidInput(f"player {name!r} has no generators")
    gens = []
    for k, m in enumerate(matrices):
        try:
            gens.append(validate_isometry(lat, m))
        except InvalidInput as exc:
            raise InvalidInput(f"player {name!r}, generator {k}: {exc}") from None
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            x, y = gens[a].matrix, gens[b].matrix
            if x @ y != y @ x:
                raise InvalidInput(f"player {name!r}: generators {a} and {b} do not commute")
    return gens


@tag_stage("decompose")
def build_player(lat: Lattice, name, matrices, cusp=None, convention="m") -> Player:
    """Validate a player and compute its translation lattice."""
    gens = _validate_generators(lat, name, matrices)
    c = infer_cusp(lat, gens, name) if cusp is None else make_cusp(lat, cusp, name)
    for k, g in enumerate(gens):
        if g(c.v) != c.v:
            raise InvalidInput(f"player {name!r}, generator {k}: does not fix the cusp")
    chart = Chart.at(lat, c)
    parts = tuple(translation_part(g, chart.basis, convention) for g in gens)
    try:
        tl = translation_lattice([((name, k), p.t) for k, p in enumerate(parts)])
    except TranslationRankZero:
        raise TranslationRankZero(f"translation rank 0 (player {name!r})") from None
    return Player(name, chart, tuple(gens), parts, tl, convention)


# ---------------------------------------------------------------------------
# Tables


def basepoint_coords(players, p: SpherePoint):
    out = []
    for pl in players:
        x = pl.chart.from_boundary(p)
        if x is AT_INFINITY:
            return None
        out.append(x)
    return out


def auto_basepoint(players, search_radius=2):
    """Integer point of the first chart minimising its worst chart norm."""
    ch = players[0].chart
    best = None
    for x in product(range(-search_radius, search_radius + 1), repeat=ch.n):
        p = ch.to_boundary(x)
        coords = basepoint_coords(players, p)
        if coords is None:
            continue
        score = max(sup_norm(c) for c in coords) if coords else Fraction(0)
        key = (score, sup_norm(x), x)
        if best is None or key < best[0]:
            best = (key, p)
    if best is None:
        raise InvalidInput("no basepoint candidate avoids every cusp; supply one")
    return best[1]


def auto_radii(players, p: SpherePoint):
    """Radius per chart: twice the largest norm of the basepoint and the
    foreign cusps, so that all of them sit well inside the bounded region."""
    coords = basepoint_coords(players, p)
    radii = []
    for i, pl in enumerate(players):
        m = sup_norm(coords[i])
        for j, other in enumerate(players):
            if j != i:
                m = max(m, sup_norm(pl.chart.position(other.cusp)))
        radii.append(2 * m if m > 0 else Fraction(1))
    return tuple(Fraction(r) for r in radii)


def make_table(players, radii=None, basepoint=None):
    p = auto_basepoint(players) if basepoint is None else basepoint
    if not isinstance(p, SpherePoint):
        p = SpherePoint(vector(p))
    lat = players[0].chart.lattice
    if lat.square(p.representative) != 0 or lat.pair(p.representative, lat.anchor) <= 0:
        raise InvalidInput("basepoint is not on the positive-cone boundary")
    if radii is None:
        radii = auto_radii(players, p)
    radii = tuple(Q(r) for r in radii)
    if len(radii) != len(players):
        raise InvalidInput(f"expected {len(players)} radii, got {len(radii)}")
    if any(r <= 0 for r in radii):
        raise InvalidInput("radii must be positive")
    return Table(radii, p)


def check_table(players, table):
    """Exact table invariants; returns a reason string on failure, else None."""
    coords = basepoint_coords(players, table.basepoint)
    if coords is None:
        return "basepoint coincides with a cusp"
    for i, pl in enumerate(players):
        if sup_norm(coords[i]) > table.radii[i]:
            return f"basepoint lies in U_{pl.name}"
        for j, other in enumerate(players):
            if j != i and sup_norm(pl.chart.position(other.cusp)) > table.radii[i]:
                return f"cusp of {other.name} lies in U_{pl.name}"
    return None


# ---------------------------------------------------------------------------
# Exponents


def search_exponent(lam, need):
    """Smallest positive integer ``c`` with ``c * lam > need``: doubling, then bisection."""
    lam, need = Q(lam), Q(need)
    if lam <= 0:
        raise TranslationRankZero("translation rank 0: no exponent exists")
    ok = lambda c: c * lam > need  # noqa: E731
    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2  # ok(lo) is False unless lo == 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def needs(players, table, transports, coords):
    out = []
    for i in range(len(players)):
        m = sup_norm(coords[i])
        for t in transports:
            if t.target == i:
                m = max(m, box_maxnorm(t.box))
        out.append(table.radii[i] + m)
    return out


def search_exponents(players, table, transports):
    coords = basepoint_coords(players, table.basepoint)
    return tuple(search_exponent(pl.lam, need)
                 for pl, need in zip(players, needs(players, table, transports, coords)))


# ---------------------------------------------------------------------------
# Verification


def _worker_count():
    try:
        return max(1, int(os.environ.get("PINGCERT_WORKERS", "1")))
    except ValueError:
        return 1


def _transport_job(args):
    chart_i, chart_j, radius, depth, min_depth, i, j = args
    return transport_enclosure(chart_i, chart_j, radius, depth=depth, min_depth=min_depth,
                               target=i, source=j)


@tag_stage("transport")
def compute_transports(players, table, depth=24, min_depth=0):
    jobs = [(players[i].chart, players[j].chart, table.radii[j], depth, min_depth, i, j)
            for i in range(len(players)) for j in range(len(players)) if i != j]
    workers = _worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_transport_job, jobs))
    return [_transport_job(job) for job in jobs]


def check_players(players):
    if len(players) < 2:
        raise InvalidInput("ping-pong needs s >= 2 players")
    names = [p.name for p in players]
    if len(set(names)) != len(names):
        raise InvalidInput("player names must be distinct")
    for i in range(len(players)):
        for j in range(i):
            if players[i].cusp.v == players[j].cusp.v:
                raise InvalidInput(f"players {names[j]!r} and {names[i]!r} share a cusp")


@tag_stage("verify")
def verify_pingpong(players, table, exponents=None, depth=24, min_depth=0):
    """Certificate, Undecided or Refuted for a ping-pong table.

    Refuted means an exact table invariant fails (the basepoint or a foreign
    cusp lies in some U_i); Undecided means transport or the exponent
    inequality could not be established.
    """
    players = tuple(players)
    check_players(players)
    names = [p.name for p in players]
    reason = check_table(players, table)
    if reason:
        return Refuted(reason)
    transports = compute_transports(players, table, depth, min_depth)
    for t in transports:
        if isinstance(t, Undecided):
            return t
    coords = basepoint_coords(players, table.basepoint)
    if exponents is None:
        exponents = search_exponents(players, table, transports)
    exponents = tuple(int(c) for c in exponents)
    if len(exponents) != len(players) or any(c < 1 for c in exponents):
        raise InvalidInput("one positive exponent per player is required")
    inclusions = []
    for t in transports:
        i, j = t.target, t.source
        inc = Inclusion(i, j, exponents[i], players[i].lam, table.radii[i],
                        box_maxnorm(t.box), sup_norm(coords[i]))
        if not inc.holds():
            return Undecided(f"inequality fails for ({names[i]}, {names[j]}): "
                             f"{inc.lhs} <= {inc.rhs}")
        inclusions.append(inc)
    return Certificate(players[0].chart.lattice, players, table, exponents, tuple(coords),
                       tuple(transports), tuple(inclusions))


@dataclass(frozen=True)
class Options:
    radii: tuple = None
    basepoint: tuple = None
    depth: int = 24
    min_depth: int = 0
    convention: str = "m"
    retries: int = 6


def certify_free_product(lat: Lattice, specs, options: Options = None):
    """Full pipeline from a lattice and player descriptions.

    ``specs`` is a list of ``(name, generator matrices, cusp or None)``.
    Returns ``(result, players)`` where result is a Certificate or Undecided.
    """
    options = options or Options()
    if len(specs) < 2:
        raise InvalidInput("ping-pong needs s >= 2 players", stage="validate")
    players = tuple(build_player(lat, name, mats, cusp, options.convention)
                    for name, mats, cusp in specs)
    _tag(check_players, "validate")(players)
    table = _tag(make_table, "table")(players, options.radii, options.basepoint)
    result = None
    for attempt in range(options.retries + 1):
        result = verify_pingpong(players, table, depth=options.depth, min_depth=options.min_depth)
        if not isinstance(result, Undecided) or options.radii is not None:
            break
        table = Table(tuple(2 * r for r in table.radii), table.basepoint)
    if isinstance(result, Refuted):
        result = Undecided(f"table refuted: {result.reason}")
    return result, players


def _tag(fn, stage):
    return tag_stage(stage)(fn)
