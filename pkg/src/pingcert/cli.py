"""Command line driver: certify, falsify, analyze-stabilizer, moebius-demo, recheck.

Every command prints a JSON report.  Exit codes: 0 certified (or a demo or
analysis that succeeded), 1 relation found, 2 invalid input, 3 undecided.
"""

from __future__ import annotations

import argparse
import sys
import time
from contextlib import contextmanager

from . import __version__
from .certificate import certificate_to_dict, enc_mat, enc_q, enc_vec, recheck
from .charts import Undecided
from .engine import Options, build_player, certify_free_product
from .errors import BudgetExhausted, InvalidInput, PingcertError
from .exact import Q
from .io import FORMAT, dumps, load_json, parse_problem
from .lattice import validate_lattice
from .moebius import F1, F2, psl2_witness, verify_moebius_pingpong
from .parabolic import block_decompose
from .words import falsify_relations

EXIT = {"certified": 0, "ok": 0, "relation_found": 1, "invalid_input": 2, "undecided": 3}


class Timer:
    def __init__(self):
        self.stages = {}

    @contextmanager
    def __call__(self, stage):
        t = time.perf_counter()
        try:
            yield
        finally:
            self.stages[stage] = round(self.stages.get(stage, 0) + time.perf_counter() - t, 6)


def _report(command, status, timer, digest=None, **payload):
    out = {"format": FORMAT, "command": command, "status": status, "version": __version__,
           "timings": timer.stages}
    if digest:
        out["input_digest"] = digest
    out.update(payload)
    return out


def _parse_list(s, conv, what):
    try:
        return tuple(conv(x) for x in s.split(","))
    except (ValueError, InvalidInput):
        raise InvalidInput(f"malformed {what}: {s!r}") from None


def _lattice(problem):
    return validate_lattice(problem.gram, problem.anchor)


def _witness_payload(w):
    return {
        "word": str(w.word),
        "syllables": [[p, list(e)] for p, e in w.word],
        "letters": w.word.letters,
        "value": enc_mat(w.matrix),
        "mode": w.mode,
    }


# ---------------------------------------------------------------------------
# Commands


def cmd_certify(args, timer):
    with timer("parse"):
        problem = parse_problem(args.file)
        o = problem.options
        radii = _parse_list(args.radii, Q, "radii") if args.radii else o.radii
        opts = Options(radii=radii, basepoint=o.basepoint,
                       depth=args.depth if args.depth is not None else o.depth,
                       convention=args.exponent_convention or o.exponent_convention)
    with timer("certify"):
        lat = _lattice(problem)
        specs = [(p.name, p.generators, p.cusp) for p in problem.players]
        result, players = certify_free_product(lat, specs, opts)
    if isinstance(result, Undecided):
        return _report("certify", "undecided", timer, problem.digest, reason=result.reason)
    with timer("serialize"):
        cert = certificate_to_dict(result)
    return _report("certify", "certified", timer, problem.digest,
                   conclusion=result.conclusion, free_product=result.free_product,
                   exponents=list(result.exponents), certificate=cert)


def cmd_falsify(args, timer):
    with timer("parse"):
        problem = parse_problem(args.file)
        o = problem.options
        exps = _parse_list(args.exponents, int, "exponents")
        if len(exps) != len(problem.players):
            raise InvalidInput(f"--exponents has {len(exps)} entries for {len(problem.players)} players")
        if any(c < 1 for c in exps):
            raise InvalidInput("--exponents must be positive")
        budget = args.max_syllables if args.max_syllables is not None else o.max_syllables
        mode = args.mode or o.mode
        conv = args.exponent_convention or o.exponent_convention
    with timer("decompose"):
        lat = _lattice(problem)
        players = [build_player(lat, p.name, p.generators, p.cusp, conv) for p in problem.players]
        gens = {pl.name: [m ** c for m in pl.powered] for pl, c in zip(players, exps)}
    with timer("search"):
        try:
            w = falsify_relations(gens, budget, mode=mode, exponent_bound=args.exponent_bound)
        except BudgetExhausted as exc:
            return _report("falsify", "undecided", timer, problem.digest, reason=str(exc),
                           exponents=list(exps), mode=mode)
    common = {"exponents": list(exps), "mode": mode, "max_syllables": budget,
              "exponent_bound": args.exponent_bound,
              "generators": {n: [enc_mat(m) for m in ms] for n, ms in gens.items()}}
    if w is None:
        return _report("falsify", "undecided", timer, problem.digest,
                       reason=f"no relation up to {budget} syllables (not a proof of freeness)", **common)
    return _report("falsify", "relation_found", timer, problem.digest,
                   witness=_witness_payload(w), **common)


def cmd_analyze(args, timer):
    with timer("parse"):
        problem = parse_problem(args.file)
        ps = problem.player(args.player)
    with timer("decompose"):
        lat = _lattice(problem)
        conv = args.exponent_convention or problem.options.exponent_convention
        pl = build_player(lat, ps.name, ps.generators, ps.cusp, conv)
    b = pl.chart.basis
    blocks = []
    for g, part in zip(pl.generators, pl.parts):
        bf = block_decompose(g, b)
        blocks.append({"a": enc_vec(bf.a), "A": enc_mat(bf.A) if b.n else [], "b": enc_vec(bf.b),
                       "c": enc_q(bf.c), "d": enc_q(bf.d), "order": part.order,
                       "power": part.exponent, "translation": enc_vec(part.t)})
    tl = pl.translations
    return _report("analyze-stabilizer", "ok", timer, problem.digest, player=pl.name,
                   cusp=enc_vec(pl.cusp.v),
                   basis={"v": enc_vec(b.v), "w": [enc_vec(w) for w in b.w], "u": enc_vec(b.u)},
                   generators=blocks,
                   translation_lattice={"denominator": tl.common_denominator, "rank": tl.rank,
                                        "basis": [enc_vec(v) for v in tl.basis],
                                        "lambda1": enc_q(tl.lambda1),
                                        "lambda_lower_bound": enc_q(tl.lambda_lb)})


def cmd_moebius(args, timer):
    if args.n < 1:
        raise InvalidInput("--n must be >= 1")
    with timer("verify"):
        res = verify_moebius_pingpong(args.n)
    if args.n == 1:
        w = psl2_witness()
        return _report("moebius-demo", "relation_found", timer, n=1,
                       generators={"f1": enc_mat(F1.matrix), "f2": enc_mat(F2.matrix)},
                       witness=_witness_payload(res),
                       trace=[[s, enc_mat(m)] for s, m in w.trace],
                       conclusion="<f1, f2> is not <f1> * <f2> (it is Z/2 * Z/3)")
    return _report("moebius-demo", "certified", timer, n=args.n,
                   conclusion=res.conclusion, certificate=res.to_dict())


def cmd_recheck(args, timer):
    with timer("parse"):
        data, dg = load_json(args.file)
        cert = data.get("certificate", data) if isinstance(data, dict) else data
    with timer("recheck"):
        failures = recheck(cert)
    if failures:
        return _report("recheck", "invalid_input", timer, dg, failures=failures)
    return _report("recheck", "certified", timer, dg, conclusion=cert.get("conclusion"))


# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="pingcert", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-o", "--output", help="also write the report to this file")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="certify a free product by ping-pong")
    c.add_argument("file", help="problem JSON file or bundled problem name")
    c.add_argument("--radii", help="comma separated radii R1,R2,...")
    c.add_argument("--depth", type=int, help="maximal subdivision depth")
    c.add_argument("--exponent-convention", choices=("m", "2m"))
    c.set_defaults(func=cmd_certify)

    f = sub.add_parser("falsify", help="search short words for a relation")
    f.add_argument("file")
    f.add_argument("--exponents", required=True, help="comma separated c1,c2,...")
    f.add_argument("--max-syllables", type=int)
    f.add_argument("--mode", choices=("exact", "projective"))
    f.add_argument("--exponent-bound", type=int, default=2)
    f.add_argument("--exponent-convention", choices=("m", "2m"))
    f.set_defaults(func=cmd_falsify)

    a = sub.add_parser("analyze-stabilizer", help="block form and translation lattice of one player")
    a.add_argument("file")
    a.add_argument("--player", required=True)
    a.add_argument("--exponent-convention", choices=("m", "2m"))
    a.set_defaults(func=cmd_analyze)

    m = sub.add_parser("moebius-demo", help="ping-pong for <f1^n, f2^n> in PGL(2,Z)")
    m.add_argument("--n", type=int, required=True)
    m.set_defaults(func=cmd_moebius)

    r = sub.add_parser("recheck", help="re-verify a stored certificate or certify report")
    r.add_argument("file")
    r.set_defaults(func=cmd_recheck)
    return ap


def run(argv=None):
    """Run a command; returns ``(report, exit code, parsed args)``."""
    args = build_parser().parse_args(argv)
    timer = Timer()
    try:
        report = args.func(args, timer)
    except (InvalidInput, PingcertError) as exc:
        report = _report(args.command, "invalid_input", timer,
                         error=str(exc), stage=getattr(exc, "stage", None))
    return report, EXIT[report["status"]], args


def main(argv=None):
    report, code, args = run(argv)
    text = dumps(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
