"""Problem files and reports.

Problems are JSON with every number an integer or an exact fraction string.
Floats are rejected so nothing inexact can enter the pipeline.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import InvalidInput
from .exact import Q, QMatrix

FORMAT = 1


@dataclass(frozen=True)
class PlayerSpec:
    name: str
    generators: tuple
    cusp: tuple = None


@dataclass(frozen=True)
class ProblemOptions:
    radii: tuple = None
    basepoint: tuple = None
    max_syllables: int = 6
    exponent_bound: int = 2
    depth: int = 24
    exponent_convention: str = "m"
    mode: str = "exact"


@dataclass(frozen=True)
class Problem:
    name: str
    gram: QMatrix
    anchor: tuple
    players: tuple
    options: ProblemOptions = field(default_factory=ProblemOptions)
    digest: str = ""

    def player(self, name):
        for p in self.players:
            if p.name == name:
                return p
        raise InvalidInput(f"no player named {name!r}; have {[p.name for p in self.players]}")


def _num(x, where):
    if isinstance(x, bool) or isinstance(x, float):
        raise InvalidInput(f"{where}: {x!r} is not an integer or exact fraction string")
    try:
        return Q(x)
    except InvalidInput as exc:
        raise InvalidInput(f"{where}: {exc}") from None


def _vector(xs, where, length=None):
    if not isinstance(xs, list):
        raise InvalidInput(f"{where}: expected a list")
    if length is not None and len(xs) != length:
        raise InvalidInput(f"{where}: dimension mismatch, length {len(xs)} != {length}")
    return tuple(_num(x, f"{where}[{i}]") for i, x in enumerate(xs))


def _matrix(rows, where, size=None):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InvalidInput(f"{where}: expected a non-empty list of rows")
    n = size if size is not None else len(rows)
    if len(rows) != n:
        raise InvalidInput(f"{where}: dimension mismatch, {len(rows)} rows != {n}")
    out = []
    for i, r in enumerate(rows):
        if len(r) != n:
            raise InvalidInput(f"{where}[{i}]: row length {len(r)} != {n}")
        out.append(_vector(r, f"{where}[{i}]"))
    return QMatrix(out)


def _int(x, where, lo=None):
    if isinstance(x, bool) or not isinstance(x, int):
        raise InvalidInput(f"{where}: expected an integer")
    if lo is not None and x < lo:
        raise InvalidInput(f"{where}: must be >= {lo}")
    return x


def _keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise InvalidInput(f"{where}: expected an object")
    extra = set(obj) - set(allowed)
    if extra:
        raise InvalidInput(f"{where}: unknown keys {sorted(extra)}")


def problem_from_dict(data, digest=""):
    _keys(data, ("format", "name", "description", "lattice", "players", "options"), "problem")
    if data.get("format", FORMAT) != FORMAT:
        raise InvalidInput(f"problem: unsupported format {data.get('format')!r}")
    if "lattice" not in data or "players" not in data:
        raise InvalidInput("problem: needs 'lattice' and 'players'")
    lat = data["lattice"]
    _keys(lat, ("gram", "anchor"), "lattice")
    if "gram" not in lat or "anchor" not in lat:
        raise InvalidInput("lattice: needs 'gram' and 'anchor'")
    gram = _matrix(lat["gram"], "lattice.gram")
    n = gram.shape[0]
    anchor = _vector(lat["anchor"], "lattice.anchor", n)
    if not isinstance(data["players"], list):
        raise InvalidInput("players: expected a list")
    players, names = [], set()
    for k, p in enumerate(data["players"]):
        where = f"players[{k}]"
        _keys(p, ("name", "cusp", "generators"), where)
        name = p.get("name", f"H{k + 1}")
        if not isinstance(name, str) or not name:
            raise InvalidInput(f"{where}.name: expected a non-empty string")
        if name in names:
            raise InvalidInput(f"{where}.name: duplicate player {name!r}")
        names.add(name)
        gens = p.get("generators")
        if not isinstance(gens, list) or not gens:
            raise InvalidInput(f"{where}.generators: expected a non-empty list of matrices")
        mats = tuple(_matrix(g, f"{where}.generators[{i}]", n) for i, g in enumerate(gens))
        cusp = p.get("cusp")
        cusp = None if cusp is None else _vector(cusp, f"{where}.cusp", n)
        players.append(PlayerSpec(name, mats, cusp))
    o = data.get("options", {})
    _keys(o, ("radii", "basepoint", "max_syllables", "exponent_bound", "depth",
              "exponent_convention", "mode"), "options")
    radii = o.get("radii")
    if radii is not None:
        radii = _vector(radii, "options.radii", len(players))
        if any(r <= 0 for r in radii):
            raise InvalidInput("options.radii: radii must be positive")
    basepoint = o.get("basepoint")
    if basepoint is not None:
        basepoint = _vector(basepoint, "options.basepoint", n)
    conv = o.get("exponent_convention", "m")
    if conv not in ("m", "2m"):
        raise InvalidInput("options.exponent_convention: expected 'm' or '2m'")
    mode = o.get("mode", "exact")
    if mode not in ("exact", "projective"):
        raise InvalidInput("options.mode: expected 'exact' or 'projective'")
    opts = ProblemOptions(
        radii=radii, basepoint=basepoint,
        max_syllables=_int(o.get("max_syllables", 6), "options.max_syllables", 1),
        exponent_bound=_int(o.get("exponent_bound", 2), "options.exponent_bound", 1),
        depth=_int(o.get("depth", 24), "options.depth", 0),
        exponent_convention=conv, mode=mode)
    return Problem(data.get("name", "problem"), gram, anchor, tuple(players), opts, digest)


def bundled_problems():
    return sorted(p.name[:-5] for p in resources.files("pingcert.data").iterdir()
                  if p.name.endswith(".json"))


def resolve(path):
    """A file path, or the name of a bundled problem."""
    p = Path(path)
    if p.exists():
        return p.read_bytes()
    name = p.name[:-5] if p.name.endswith(".json") else p.name
    if name in bundled_problems():
        return resources.files("pingcert.data").joinpath(name + ".json").read_bytes()
    raise InvalidInput(f"no such file or bundled problem: {path}")


def load_json(path):
    raw = resolve(path)
    try:
        return json.loads(raw), hashlib.sha256(raw).hexdigest()
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: not valid JSON ({exc})") from None


def parse_problem(path) -> Problem:
    data, dg = load_json(path)
    return problem_from_dict(data, dg)


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def payload(report):
    """Report without timings: byte-identical across runs on the same input."""
    return {k: v for k, v in report.items() if k != "timings"}
