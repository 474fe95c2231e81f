"""
Splitting a function on an overlap
==================================

With U = odd numbers, W = 1 + 3N0 and V = U n W = 1 + 6N0, every integer
polynomial on V is g - h with g LIP on U and h LIP on W. The split is built
stage by stage and earlier stages never move.
"""
from kirchlip.kirch import Progression, first_elements
from kirchlip.lipcalc import find_circuit
from kirchlip.splitter import SplitPlan, split_stream

U, W, V = Progression(1, 2), Progression(1, 3), Progression(1, 6)
plan = SplitPlan(U, W, V)
print("stage breakpoints on V:", plan.schedule(8))

# f = 2 - (x - 1) + 3 (x - 1)(x - 7) as Newton coefficients on V
coeffs = [2, -1, 3]
res = split_stream(coeffs, U, W, V, 6, plan=plan)
print("window", res.window)
for x in V.enumerate(res.window)[:5]:
    print(f"  f({x}) = {res.g(x)} - ({res.h(x)})")
print("g has a circuit on U:", find_circuit(res.g) is not None)
print("h has a circuit on W:", find_circuit(res.h) is not None)

# the first values on U do not change when more stages are added
more = split_stream(coeffs, U, W, V, 8, plan=plan)
print("first 6 values on U stable:",
      [res.g_poly(x) for x in first_elements(U, 6)] == [more.g_poly(x) for x in first_elements(U, 6)])
