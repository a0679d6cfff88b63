"""
Ping-pong on the Riemann sphere
===============================

f1 = [[1, 0], [1, 1]] and f2 = [[1, 1], [0, 1]] generate SL(2, Z), so
<f1, f2> cannot be free: (f2 f1^-1 f2)^2 = -I.  Their powers f1^n, f2^n with
n >= 2 do generate a free group, and this is checked here with exact circle
arithmetic.
"""

from pingcert.moebius import (INFINITY, J, P, U1, U2_PARTS, F2, image_circle, psl2_witness,
                              verify_moebius_pingpong)

##############################################################################
# The relation for n = 1.  Each syllable is applied in turn.

w = psl2_witness()
print("word:", w.word, f"({w.word.letters} letters)")
for step, m in w.trace:
    print(f"  after {step:6s} {m.rows}")
print("trivial in PSL(2,Z):", w.is_identity("projective"), " exact identity:", w.is_identity("exact"))

##############################################################################
# The two sets: U1 is the open unit disk, U2 is |Re z| > 1 together with oo.
# j = [[0, 1], [1, 0]] swaps the roles; it sends both half planes of U2 into
# disks of radius 1/2 inside U1.

for h in U2_PARTS:
    img = image_circle(J, h)
    print("j maps", h.to_list(), "to the disk centred", img.center(), "with r^2 =", img.radius2())
print("j(oo) =", J(INFINITY), " j(P) =", J(P))

##############################################################################
# Translating U1 by +-n lands in U2 as soon as n >= 2.  For n = 1 the image
# disk sticks out of U2, so the ping-pong breaks down exactly where the
# relation above appears.

for n in (1, 2):
    img = image_circle(F2 ** n, U1)
    print(f"n={n}: f2^n(U1) is the disk centred {img.center()} radius^2 {img.radius2()}")

for n in (2, 3, 4, 5):
    cert = verify_moebius_pingpong(n)
    print(cert.conclusion, "-", len(cert.checks), "exact checks")
