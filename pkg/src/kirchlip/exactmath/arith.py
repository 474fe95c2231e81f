"""Integer arithmetic: Bezout, Chinese remaindering, trial factorization."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence

from ..errors import InputError, ResourceError

DEFAULT_FACTOR_BOUND = 10**6


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = gcd(a, b) >= 0 and s*a + t*b = g."""
    if a == 0 and b == 0:
        return 0, 0, 0
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def mod_inverse(a: int, m: int) -> int:
    g, s, _ = ext_gcd(a % m, m)
    if g != 1:
        raise InputError(f"{a} is not invertible modulo {m}")
    return s % m


def least_abs_residue(a: int, m: int) -> int:
    """Representative of a mod m of least absolute value, ties to the smaller value."""
    m = abs(m)
    if m == 0:
        return a
    r = a % m
    if 2 * r > m:
        r -= m
    elif 2 * r == m:
        r = -r
    return r


@dataclass(frozen=True)
class CongruenceSystem:
    """A list of congruences x = residue (mod modulus), residues reduced."""

    congruences: tuple[tuple[int, int], ...]

    def __init__(self, congruences: Iterable[tuple[int, int]]):
        norm = []
        for r, m in congruences:
            if m < 1:
                raise InputError(f"modulus must be positive, got {m}")
            norm.append((r % m, m))
        object.__setattr__(self, "congruences", tuple(norm))

    def __iter__(self):
        return iter(self.congruences)

    def __len__(self):
        return len(self.congruences)

    def satisfied_by(self, x: int) -> bool:
        return all((x - r) % m == 0 for r, m in self.congruences)


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> Optional[tuple[int, int]]:
    g, s, _ = ext_gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    lcm = m1 // g * m2
    x = r1 + (r2 - r1) // g * s % (m2 // g) * m1
    return x % lcm, lcm


def crt_solve(system) -> Optional[tuple[int, int]]:
    """Solve a system of congruences.

    Returns ``(r, M)`` where M is the lcm of the moduli and r in [0, M) the
    unique common solution class, or ``None`` if the congruences conflict.
    """
    if not isinstance(system, CongruenceSystem):
        system = CongruenceSystem(system)
    r, m = 0, 1
    for ri, mi in system:
        res = crt_pair(r, m, ri, mi)
        if res is None:
            return None
        r, m = res
    return r, m


def trial_factor(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> dict[int, int]:
    """Factor n >= 1 completely by trial division up to ``bound``.

    Raises ResourceError if a cofactor remains whose smallest prime factor
    may exceed the bound.
    """
    if n < 1:
        raise InputError(f"trial_factor needs n >= 1, got {n}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d, step = 5, 2
    while d * d <= n:
        if d > bound:
            raise ResourceError(f"cofactor {n} has no prime factor <= {bound}")
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += step
        step = 6 - step
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return dict(sorted(out.items()))


def prime_divisors(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> list[int]:
    return list(trial_factor(abs(n), bound)) if n else []


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in trial_factor(n).values())


def p_adic_order(n: int, p: int) -> int:
    if n == 0:
        raise InputError("order of zero is infinite")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def gcd_all(values: Sequence[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g


def integer_bezout(values: Sequence[int]) -> tuple[int, list[int]]:
    """Return (g, coeffs) with sum(c*v) = g = gcd(values)."""
    g, coeffs = 0, []
    for v in values:
        g2, s, t = ext_gcd(g, v)
        coeffs = [c * s for c in coeffs] + [t]
        g = g2
    return g, coeffs
