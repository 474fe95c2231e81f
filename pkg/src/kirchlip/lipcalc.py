"""LIP calculus on finite windows.

A function on a finite set is LIP exactly when its interpolation polynomial
has integer coefficients, equivalently when every divided difference over
every subset is an integer. This module computes divided differences and
Newton (product-sum) expansions exactly, locates minimal circuits, and
implements the exchange and circuit-improvement identities.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .errors import InputError, InternalContradiction, ResourceError
from .exactmath import IntegerPolynomial, RationalPolynomial, crt_solve, gcd_all, prime_divisors
from .kirch import Finite, SetExpression, ac_closure, enumerate_window, intersect

SUBSET_SEARCH_LIMIT = 5_000_000


@dataclass(frozen=True, eq=False)
class WindowFunction:
    """Integer values on exactly ``domain`` intersected with ``[1, window]``."""

    domain: SetExpression
    window: int
    values: Mapping[int, int]

    def __post_init__(self):
        vals = {int(x): int(y) for x, y in dict(self.values).items()}
        pts = enumerate_window(self.domain, self.window)
        if sorted(vals) != pts:
            missing = sorted(set(pts) - set(vals))[:5]
            extra = sorted(set(vals) - set(pts))[:5]
            raise InputError(
                f"values must cover exactly the window points (missing {missing}, extra {extra})"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, domain: SetExpression, window: int, fn: Callable[[int], int]):
        return cls(domain, window, {x: fn(x) for x in enumerate_window(domain, window)})

    @classmethod
    def from_table(cls, table: Mapping[int, int] | Iterable[tuple[int, int]]):
        """A function on the finite set of its table's keys."""
        table = dict(table)
        if not table:
            raise InputError("empty value table")
        return cls(Finite(tuple(table)), max(table), table)

    @property
    def points(self) -> list[int]:
        return sorted(self.values)

    def pairs(self) -> list[tuple[int, int]]:
        return [(x, self.values[x]) for x in self.points]

    def __call__(self, x: int) -> int:
        try:
            return self.values[x]
        except KeyError:
            raise InputError(f"{x} is not in the window of this function") from None

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, WindowFunction):
            return NotImplemented
        return self.values == other.values

    def restrict(self, S: SetExpression) -> "WindowFunction":
        sub = intersect(self.domain, S)
        if sub is None:
            sub = Finite(())
        return WindowFunction(sub, self.window, {x: self.values[x] for x in sub.enumerate(self.window)})

    def restrict_points(self, pts: Iterable[int]) -> "WindowFunction":
        pts = sorted(set(pts))
        return WindowFunction(Finite(tuple(pts)), self.window, {x: self(x) for x in pts})

    def _combine(self, other, op):
        if self.points != other.points:
            raise InputError("functions live on different windows")
        return WindowFunction(self.domain, self.window, {x: op(self.values[x], other.values[x]) for x in self.values})

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return WindowFunction(self.domain, self.window, {x: -y for x, y in self.values.items()})

    def scale(self, k: int) -> "WindowFunction":
        return WindowFunction(self.domain, self.window, {x: k * y for x, y in self.values.items()})


def _check_distinct(xs: Sequence[int]):
    if len(set(xs)) != len(xs):
        raise InputError("interpolation nodes must be distinct")


def _as_pairs(points) -> list[tuple[int, int]]:
    if isinstance(points, WindowFunction):
        return points.pairs()
    if isinstance(points, Mapping):
        return sorted(points.items())
    return [(x, y) for x, y in points]


def divided_differences(points) -> list[list[Fraction]]:
    """Triangular divided-difference table.

    Row k holds f[x_i, ..., x_{i+k}] for consecutive nodes in the given order;
    ``table[-1][0]`` is the leading coefficient of the interpolation polynomial.
    """
    pairs = _as_pairs(points)
    xs = [x for x, _ in pairs]
    _check_distinct(xs)
    table = [[Fraction(y) for _, y in pairs]]
    for k in range(1, len(pairs)):
        prev = table[-1]
        table.append([(prev[i + 1] - prev[i]) / (xs[i + k] - xs[i]) for i in range(len(prev) - 1)])
    return table


def newton_coefficients(points) -> list[Fraction]:
    return [row[0] for row in divided_differences(points)]


def top_divided_difference(points) -> Fraction:
    """Leading coefficient of the interpolation polynomial through the points."""
    pairs = _as_pairs(points)
    if not pairs:
        raise InputError("no points")
    return divided_differences(pairs)[-1][0]


def newton_to_poly(xs: Sequence[int], coeffs: Sequence) -> RationalPolynomial:
    if not coeffs:
        return RationalPolynomial()
    poly = RationalPolynomial([coeffs[-1]])
    for k in range(len(coeffs) - 2, -1, -1):
        poly = poly * RationalPolynomial([-xs[k], 1]) + Fraction(coeffs[k])
    return poly


def interp_poly(points) -> RationalPolynomial:
    """The unique polynomial of degree < n through n points, exactly."""
    pairs = _as_pairs(points)
    if not pairs:
        return RationalPolynomial()
    xs = [x for x, _ in pairs]
    return newton_to_poly(xs, newton_coefficients(pairs))


def is_window_lip(points) -> bool:
    """Integrality of the full interpolation polynomial, in integer arithmetic.

    Runs the divided-difference recursion and stops at the first
    non-divisible step; every entry is a divided difference over a subset,
    so a non-integer entry already rules out LIP.
    """
    pairs = _as_pairs(points)
    xs = [x for x, _ in pairs]
    _check_distinct(xs)
    row = [y for _, y in pairs]
    for k in range(1, len(pairs)):
        nxt = []
        for i in range(len(row) - 1):
            num, den = row[i + 1] - row[i], xs[i + k] - xs[i]
            if num % den:
                return False
            nxt.append(num // den)
        row = nxt
    return True


@dataclass(frozen=True)
class Circuit:
    """A minimal finite set on which the interpolation polynomial is not integral."""

    points: tuple[int, ...]
    leading: Fraction
    denominator: int

    @classmethod
    def from_function(cls, f, points: Iterable[int]) -> "Circuit":
        pts = tuple(sorted(points))
        c = top_divided_difference([(x, _value(f, x)) for x in pts])
        return cls(pts, c, c.denominator)

    def check(self, f) -> list[str]:
        """Re-verify the circuit invariants against f; returns violated ones."""
        bad = []
        pairs = [(x, _value(f, x)) for x in self.points]
        c = top_divided_difference(pairs)
        if c != self.leading or c.denominator != self.denominator:
            bad.append("leading coefficient mismatch")
        if self.denominator < 2:
            bad.append("leading coefficient is integral")
        for k in range(len(pairs)):
            if not is_window_lip(pairs[:k] + pairs[k + 1 :]):
                bad.append(f"deleting {pairs[k][0]} leaves a non-integral set")
        if len({x % self.denominator for x in self.points}) != 1:
            bad.append("points not congruent modulo the denominator")
        return bad


def _value(f, x):
    if isinstance(f, WindowFunction):
        return f(x)
    if isinstance(f, Mapping):
        return f[x]
    return f(x)


def find_circuit(f, limit: int = SUBSET_SEARCH_LIMIT) -> Optional[Circuit]:
    """A minimum-size circuit of f on its window, or None if f is window-LIP.

    Ties between circuits of the same size are broken lexicographically by
    the sorted point list. Candidate sets whose pairwise differences are
    coprime are skipped: a circuit's points agree modulo every prime
    dividing its denominator.
    """
    pairs = _as_pairs(f)
    if is_window_lip(pairs):
        return None
    xs = [x for x, _ in pairs]
    ys = [Fraction(y) for _, y in pairs]
    n = len(xs)
    memo: dict[tuple[int, ...], Fraction] = {}

    def dd(idx: tuple[int, ...]) -> Fraction:
        if len(idx) == 1:
            return ys[idx[0]]
        got = memo.get(idx)
        if got is None:
            got = (dd(idx[1:]) - dd(idx[:-1])) / (xs[idx[-1]] - xs[idx[0]])
            if n <= 24:
                memo[idx] = got
        return got

    visited = 0
    for size in range(2, n + 1):
        for idx in combinations(range(n), size):
            visited += 1
            if visited > limit:
                raise ResourceError(f"circuit search exceeded {limit} candidate sets")
            base = xs[idx[0]]
            if gcd_all([xs[i] - base for i in idx[1:]]) == 1:
                continue
            c = dd(idx)
            if c.denominator != 1:
                return Circuit(tuple(xs[i] for i in idx), c, c.denominator)
        if n > 24:
            memo.clear()
    raise InternalContradiction("non-LIP window without a circuit")  # pragma: no cover


# -- product-sums -----------------------------------------------------------

@dataclass(frozen=True)
class ProductSum:
    """Newton-form coefficients a_k of sum a_k * prod_{i<k} (x - x_i)."""

    enumeration: tuple[int, ...]
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        enum = tuple(int(x) for x in self.enumeration)
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        _check_distinct(enum)
        if len(coeffs) > len(enum):
            raise InputError("more coefficients than enumeration points")
        object.__setattr__(self, "enumeration", enum)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __call__(self, x: int) -> Fraction:
        return product_sum_eval(self, x)

    def to_poly(self) -> RationalPolynomial:
        if not self.coeffs:
            return RationalPolynomial()
        return newton_to_poly(self.enumeration, self.coeffs)


def product_sum_encode(f: WindowFunction, enumeration: Optional[Sequence[int]] = None) -> ProductSum:
    """Newton coefficients of f relative to an ordering of its window."""
    if enumeration is None:
        enumeration = f.points
    enumeration = [int(x) for x in enumeration]
    if sorted(enumeration) != f.points:
        raise InputError("enumeration does not match the function's window")
    return ProductSum(tuple(enumeration), tuple(newton_coefficients([(x, f(x)) for x in enumeration])))


def product_sum_eval(ps: ProductSum, x: int) -> Fraction:
    acc = Fraction(0)
    for k in range(len(ps.coeffs) - 1, -1, -1):
        acc = acc * (x - ps.enumeration[k]) + ps.coeffs[k]
    return acc


def product_sum_decode(ps: ProductSum, domain: SetExpression, window: int) -> WindowFunction:
    vals = {}
    for x in enumerate_window(domain, window):
        v = product_sum_eval(ps, x)
        if v.denominator != 1:
            raise InputError(f"product-sum value at {x} is not an integer")
        vals[x] = v.numerator
    return WindowFunction(domain, window, vals)


def d_derivative(ps: ProductSum) -> ProductSum:
    """D f(x) = (f(x+d) - f(x))/d on an arithmetic enumeration a, a+d, ...

    Coefficients shift like a derivative: a_k -> (k+1) a_{k+1}. The result
    lives on the enumeration minus its last point.
    """
    enum = ps.enumeration
    if len(enum) < 2:
        raise InputError("d-derivative needs at least two enumeration points")
    d = enum[1] - enum[0]
    if d <= 0 or any(enum[i + 1] - enum[i] != d for i in range(len(enum) - 1)):
        raise InputError("enumeration is not an increasing arithmetic progression")
    coeffs = list(ps.coeffs) + [Fraction(0)] * (len(enum) - len(ps.coeffs))
    return ProductSum(enum[:-1], tuple((k + 1) * coeffs[k + 1] for k in range(len(enum) - 1)))


# -- exchange formula and circuit improvement ---------------------------------

@dataclass(frozen=True)
class ExchangeReport:
    lhs: RationalPolynomial
    rhs: RationalPolynomial
    leading: Fraction
    holds: bool


def exchange_transport(values: Mapping[int, int], a: int, b: int) -> ExchangeReport:
    """Both sides of f_{X+a} = f_{X+b} + c (a - b) prod_{z in X} (x - z)."""
    if a == b:
        raise InputError("exchange needs two different points")
    values = dict(values)
    if a not in values or b not in values:
        raise InputError("a and b must carry values")
    X = sorted(x for x in values if x not in (a, b))
    lhs = interp_poly([(x, values[x]) for x in X + [a]])
    base = interp_poly([(x, values[x]) for x in X + [b]])
    c = top_divided_difference([(x, values[x]) for x in X + [a, b]])
    rhs = base + RationalPolynomial(IntegerPolynomial.split(X).coeffs) * (c * (a - b))
    return ExchangeReport(lhs, rhs, c, lhs == rhs)


def circuit_improve(
    f, circuit: Circuit, m: int, e: int, order: Optional[Sequence[int]] = None
) -> tuple[int, Circuit]:
    """Swap e into the circuit in place of one of its first m points.

    ``order`` lists the circuit points as x_1, ..., x_n (default: ascending).
    Returns the least 1-based index i <= m for which X + {e} - {x_i} is not
    integral, together with a circuit inside that set (the set itself when f
    has no smaller circuits).
    """
    pts = list(order) if order is not None else list(circuit.points)
    if sorted(pts) != sorted(circuit.points):
        raise InputError("order must list exactly the circuit points")
    n = len(pts)
    if not 2 <= m <= n:
        raise InputError(f"need 2 <= m <= {n}, got m={m}")
    if e in pts:
        raise InputError(f"{e} is already in the circuit")
    if not ac_closure(pts[:m]).contains(e):
        raise InputError(f"{e} is not in the AC closure of the first {m} points")
    try:
        _value(f, e)
    except (KeyError, InputError):
        raise InputError(f"{e} is not in the function's window") from None
    if circuit.check(f):
        raise InputError("the given set is not a circuit for f")
    for i in range(m):
        cand = sorted(pts[:i] + pts[i + 1 :] + [e])
        if not is_window_lip([(x, _value(f, x)) for x in cand]):
            if all(
                is_window_lip([(x, _value(f, x)) for x in cand if x != y]) for y in cand
            ):
                return i + 1, Circuit.from_function(f, cand)
            sub = find_circuit([(x, _value(f, x)) for x in cand])
            return i + 1, sub
    raise InternalContradiction("circuit improvement found no replaceable point")


@dataclass(frozen=True)
class ConnectionReport:
    """Outcome of the point-replacement procedure on a circuit."""

    points: tuple[int, ...]
    new_points: tuple[int, ...]
    steps: tuple[tuple[int, int], ...]  # (chosen e, replaced point)
    connected: bool
    inconclusive: bool = False
    reason: str = ""


def neighborhoods_meet(x: int, dx: int, y: int, dy: int) -> bool:
    """Whether x + dx*N0 and y + dy*N0 intersect."""
    return (x - y) % gcd(dx, dy) == 0


def connect_circuit(
    f: WindowFunction,
    circuit: Circuit,
    neighborhood: Callable[[int], int] | Mapping[int, int],
    U: SetExpression,
) -> ConnectionReport:
    """Replace circuit points one at a time so all neighborhoods pairwise meet.

    ``neighborhood(v)`` gives the square-free difference d_v of a basic
    neighborhood v + d_v*N0 on which f is assumed LIP. At each step a point e
    is taken from the AC closure of the remaining old points, divisible by
    every prime dividing a point difference or some d_v except the primes
    dividing all differences of old points; the least such e in the window
    is used. Returns an inconclusive report if no such e exists in the window.
    """
    nb = neighborhood if callable(neighborhood) else (lambda v, _m=dict(neighborhood): _m[v])
    smallest = find_circuit(f)
    if smallest is None or len(smallest.points) != len(circuit.points):
        raise InputError("circuit must have minimum size for f")
    old = list(circuit.points)
    new: list[int] = []
    steps = []
    window_pts = set(f.points)
    while len(old) > 1:
        allpts = old + new
        g = gcd_all([x - old[0] for x in old[1:]])
        primes = set()
        for x, y in combinations(allpts, 2):
            primes.update(prime_divisors(abs(x - y)))
        for x in allpts:
            primes.update(prime_divisors(nb(x)))
        primes = sorted(p for p in primes if g % p)
        system = [(old[0], g)] + [(0, p) for p in primes]
        res = crt_solve(system)
        e = None
        if res is not None:
            r, M = res
            cand = r if r > 0 else M
            while cand <= f.window:
                if cand in window_pts and cand not in allpts and U.contains(cand):
                    e = cand
                    break
                cand += M
        if e is None:
            return ConnectionReport(
                tuple(old + new), tuple(new), tuple(steps), False, True,
                "no point satisfying the divisibility condition in the window",
            )
        i, nxt = circuit_improve(f, Circuit.from_function(f, allpts), len(old), e, order=allpts)
        if len(nxt.points) != len(allpts):
            raise InputError("f has circuits smaller than the given one")
        replaced = old.pop(i - 1)
        new.append(e)
        steps.append((e, replaced))
    final = old + new
    ok = all(
        neighborhoods_meet(x, nb(x), y, nb(y)) for x, y in combinations(final, 2)
    )
    return ConnectionReport(tuple(final), tuple(new), tuple(steps), ok)
