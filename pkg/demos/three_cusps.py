"""
Three cusps in rank 4
=====================

U + A1 + A1 has many isotropic classes.  Around each of e, f and e + f + w1
two commuting Eichler transvections generate a rank-2 group of translations,
and ping-pong shows that suitable powers generate Z^2 * Z^2 * Z^2.  The
certificate is written to disk and checked again without any search.
"""

import json
import tempfile
import time

from pingcert.certificate import recheck
from pingcert.cli import run

t = time.perf_counter()
rep, code, _ = run(["certify", "rank4-three-cusps"])
print(rep["conclusion"], "exponents", rep["exponents"], f"({time.perf_counter() - t:.2f}s)")

cert = rep["certificate"]
for tr in cert["transports"]:
    print(f"  U_{tr['source']} seen from chart {tr['target']}: {len(tr['leaves'])} leaves, "
          f"max norm {tr['maxnorm']}")

with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump(rep, fh)
t = time.perf_counter()
print("recheck:", recheck(json.load(open(fh.name))["certificate"]) or "ok",
      f"({time.perf_counter() - t:.2f}s)")
