"""
A locally LIP function that is not LIP
======================================

The integers prime to 6 are covered by U = 4 + 6N0, V = odd numbers and
W = 2 + 6N0. We grow a pair of integer polynomials, f on U u V and g on
V u W, that agree on V. Gluing them gives Q with Q(2) = 1, Q(4) = 0.
"""
import logging

from kirchlip.cexgen import certify_counterexample, generate_counterexample
from kirchlip.lipcalc import find_circuit

logging.basicConfig(level=logging.INFO, format="%(message)s")

# run the default CORE, CORE, STRAW_U, STRAW_W cycle until [1, 40] is covered
cex = generate_counterexample(window=40)
s = cex.final
print(f"{len(cex.trace) - 1} steps, consumed U_{s.i}, V_{s.m}, W_{s.j}, 2-power exponent k = {s.k}")

# the values that never change
print("Q(2) =", cex.Q(2), " Q(4) =", cex.Q(4))

# on any single piece Q is an integer polynomial, so no circuit there
for piece, ok in certify_counterexample(cex.Q)["piece_lip"].items():
    print(f"  LIP on {piece:4s}: {ok}")

# but on the whole window the slope between 2 and 4 is -1/2
c = find_circuit(cex.Q)
print("circuit", c.points, "leading coefficient", c.leading)

# coefficient growth along the run
for mode, state in cex.trace[::5]:
    bits = max((abs(x).bit_length() for x in state.f.coeffs), default=0)
    print(f"  {mode:8s} deg f = {state.f.degree:3d}, largest coefficient ~ 2^{bits}")
