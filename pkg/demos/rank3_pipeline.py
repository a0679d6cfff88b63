"""
Two parabolic isometries of a rank-3 lattice
============================================

The Neron-Severi lattice of E x E for an elliptic curve without complex
multiplication has Gram matrix [[0,1,1],[1,0,1],[1,1,0]].  The isometries g
and g' fix the fibre classes e1 and e2.  Some powers of them generate a free
group; g and g' themselves satisfy a short relation.
"""

import json

from pingcert.cli import run

##############################################################################
# The stabilizer of e1 in block form.  The translation part b is what the
# ping-pong uses; A = [1] has order m = 1 and c = 0.

rep, _, _ = run(["analyze-stabilizer", "rank3-kummer-cover", "--player", "g"])
print(json.dumps(rep["generators"], indent=1))
print("lambda_1 =", rep["translation_lattice"]["lambda1"])

##############################################################################
# Certify.  The table (basepoint and radii) is chosen automatically, then the
# smallest exponents making every inequality strict.

rep, code, _ = run(["certify", "rank3-kummer-cover"])
print(rep["status"], rep["conclusion"], "exponents", rep["exponents"])
for inc in rep["certificate"]["inclusions"]:
    print(f"  c*lambda = {inc['lhs']} > {inc['rhs']} = R + max(box, basepoint)")

##############################################################################
# Falsify.  At exponents (1, 1) a relation turns up quickly; at the certified
# exponents nothing does, as it must.

rep, code, _ = run(["falsify", "rank3-kummer-cover", "--exponents", "1,1", "--max-syllables", "6"])
print(rep["status"], rep["witness"]["word"])
rep, code, _ = run(["falsify", "rank3-kummer-cover", "--exponents", "4,4", "--max-syllables", "10"])
print(rep["status"], rep["reason"])
