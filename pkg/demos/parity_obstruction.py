"""
An H^1 class that no coboundary hits
====================================

Cover N by the classes mod 3 and mod 5 (six pieces). The functional
D(f) = f(1) - f(7) - f(11) + f(17) is even on every coboundary, and the
indicator of 1 + 15N0 has D = 1, so it is not a coboundary.
"""
import random

from kirchlip.cech import (
    build_cech_complex,
    cohomology_window,
    is_coboundary,
    load_obstruction_catalog,
    mod15_cover,
    mod15_indicator_cocycle,
    parity_obstruction,
)
from kirchlip.kirch import Progression
from kirchlip.lipcalc import WindowFunction

cx = build_cech_complex(mod15_cover(), 30, max_degree=2)
print("cochain ranks:", [cx.rank(k) for k in range(3)])

ind = WindowFunction.from_callable(Progression(1, 1), 30, lambda x: int(x % 15 == 1))
print("D(indicator) =", parity_obstruction(ind))

# random coboundaries
(fn,) = load_obstruction_catalog()
rng = random.Random(0)
values = []
for _ in range(20):
    vec = [rng.randint(-100, 100) for _ in range(cx.rank(0))]
    values.append(fn.evaluate(cx.cochain_from_vector(1, cx.apply_delta(0, vec))))
print("D on 20 coboundaries:", values)

verdict = is_coboundary(cx, mod15_indicator_cocycle(cx))
print("coboundary?", verdict.is_coboundary, verdict.kind, verdict.certificate)
print("window H^1:", cohomology_window(cx, 1))
