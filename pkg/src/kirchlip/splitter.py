"""Split a LIP function on V = U n W into a difference of LIP functions on U and W.

Write U_n, W_n, V_m for the first n (or m) elements of each set and [S] for
the monic polynomial prod (x - s). The engine is an ideal-membership witness

    [V_m] = sigma*[V_{m+1}] + mu*[U_n] + tau*[W_n]

built either from the resultant of [U_n - V] and [W_n - V] with a per-prime
correction, or by an exact integer lattice solve. Chaining witnesses along
an increasing schedule m_1 < m_2 < ... moves every Newton term of f into
multiples of [U_n] and [W_n]; stage n never changes values on the first n
points of U or W.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import InputError, InternalContradiction, ResourceError
from .exactmath import (
    IntegerPolynomial,
    integer_bezout,
    p_adic_order,
    prime_divisors,
    resultant_cofactors,
    solve_integer,
    split,
)
from .kirch import SetExpression, element_index, first_elements, intersect, meets_class, proximity_solve
from .lipcalc import ProductSum, WindowFunction, find_circuit, product_sum_encode

DEFAULT_STAGE_CAP = 12
PROXIMITY_BOUND = 10**7


@dataclass(frozen=True)
class CofactorTriple:
    """sigma, mu, tau with [V_m] = sigma*[V_m'] + mu*[U_n] + tau*[W_n], m' > m.

    Usually m' = m + 1. The four split polynomials are kept so the identity can be re-checked;
    construction fails if it does not hold.
    """

    sigma: IntegerPolynomial
    mu: IntegerPolynomial
    tau: IntegerPolynomial
    v_m: IntegerPolynomial = field(repr=False)
    v_next: IntegerPolynomial = field(repr=False)
    u_split: IntegerPolynomial = field(repr=False)
    w_split: IntegerPolynomial = field(repr=False)

    def __post_init__(self):
        if not self.holds():
            raise InternalContradiction("cofactor identity fails")

    def holds(self) -> bool:
        rhs = self.sigma * self.v_next + self.mu * self.u_split + self.tau * self.w_split
        return rhs == self.v_m


@dataclass(frozen=True)
class PrimeCorrection:
    """Data for one prime p dividing the resultant.

    ``second_kind`` are the points of U_n - V whose class mod p misses V;
    ``proximity`` pairs each remaining point u with v in V, v = u mod p^order.
    """

    p: int
    order: int
    second_kind: tuple[int, ...]
    proximity: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ColonData:
    """Everything about stage n that does not depend on m."""

    u_pts: tuple[int, ...]
    w_pts: tuple[int, ...]
    u_outside: tuple[int, ...]
    w_outside: tuple[int, ...]
    resultant: int
    alpha: IntegerPolynomial
    beta: IntegerPolynomial
    primes: tuple[PrimeCorrection, ...]
    required: tuple[int, ...]  # points of V that V_m must contain
    required_m: int


@dataclass(frozen=True)
class WitnessTrace:
    """A witness together with the per-prime constants used to build it."""

    triple: CofactorTriple
    m: int
    next_point: int
    prime_values: tuple[tuple[int, int], ...]  # (p, f_p(v_{m+1}))


def _nearest_in_V(V: SetExpression, u: int, p: int, k: int, avoid: set[int], bound: int) -> int:
    N = max(64, 4 * p**k)
    while True:
        for v in proximity_solve(V, u, p, k, N):
            if v not in avoid:
                return v
        if N >= bound:
            raise ResourceError(f"no point of V congruent to {u} mod {p}^{k} below {bound}")
        N = min(bound, 4 * N)


def colon_data(
    u_pts: Sequence[int], w_pts: Sequence[int], V: SetExpression, bound: int = PROXIMITY_BOUND
) -> ColonData:
    """Resultant, Bezout cofactors and proximity points for given U_n, W_n."""
    u_pts, w_pts = tuple(u_pts), tuple(w_pts)
    if len(set(u_pts)) != len(u_pts) or len(set(w_pts)) != len(w_pts):
        raise InputError("point lists must be distinct")
    a = tuple(u for u in u_pts if not V.contains(u))
    b = tuple(w for w in w_pts if not V.contains(w))
    if set(a) & set(b):
        # a common point outside V would lie in U n W = V
        raise InputError("U_n and W_n share a point outside V; is V = U n W?")
    R, alpha, beta = resultant_cofactors(split(a), split(b))
    avoid = set(u_pts) | set(w_pts)
    required = {x for x in u_pts + w_pts if V.contains(x)}
    primes = []
    for p in prime_divisors(abs(R)):
        k = p_adic_order(R, p)
        second, prox, used = [], [], set()
        for u in a:
            if meets_class(V, u, p):
                v = _nearest_in_V(V, u, p, k, avoid | used, bound)
                used.add(v)
                prox.append((u, v))
            else:
                second.append(u)
        required |= used
        primes.append(PrimeCorrection(p, k, tuple(second), tuple(prox)))
    required_m = max((element_index(V, x, limit=bound) for x in required), default=0)
    return ColonData(u_pts, w_pts, a, b, R, alpha, beta, tuple(primes), tuple(sorted(required)), required_m)


def _reduce(sigma, mu, tau, un, wn, v_next):
    """Shrink mu below deg [W_n] and tau below deg [V_{m+1}] without changing the sum."""
    k, mu = mu.divmod_by_monic(wn)
    tau = tau + k * un
    k, tau = tau.divmod_by_monic(v_next)
    sigma = sigma + k * wn
    return sigma, mu, tau


def witness_trace(data: ColonData, V: SetExpression, m: int) -> WitnessTrace:
    """Cofactors for [V_m] in the ideal ([V_{m+1}], [U_n], [W_n])."""
    if m < data.required_m:
        raise InputError(f"m={m} is too small; V_m must contain {list(data.required)}")
    vpts = first_elements(V, m + 1)
    if len(vpts) < m + 1:
        raise InputError("V has fewer than m+1 elements")
    c = vpts[m]
    vm, v_next = split(vpts[:m]), split(vpts[: m + 1])
    un, wn = split(data.u_pts), split(data.w_pts)
    u_in = split([u for u in data.u_pts if V.contains(u)])
    w_in = split([w for w in data.w_pts if V.contains(w)])
    zero = IntegerPolynomial()

    # each entry (g, sigma, mu, tau) satisfies g*[V_m] = sigma*[V_{m+1}] + mu*[U_n] + tau*[W_n]
    R = data.resultant
    elements = [(IntegerPolynomial([R]), zero, data.alpha * vm.exact_div(u_in), data.beta * vm.exact_div(w_in))]
    prime_values = []
    for pc in data.primes:
        q = pc.p**pc.order
        fp = split(pc.second_kind)
        rest = vm.exact_div(u_in * split([v for _, v in pc.proximity]))
        diff = fp * vm - un * rest
        if any(x % q for x in diff.coeffs):
            raise InternalContradiction(f"congruence mod {pc.p}^{pc.order} fails")
        E = IntegerPolynomial([x // q for x in diff.coeffs])
        g = fp * (R // q)
        mu = rest * (R // q) + data.alpha * E.exact_div(u_in)
        tau = data.beta * E.exact_div(w_in)
        elements.append((g, zero, mu, tau))
        prime_values.append((pc.p, g(c)))
        if g(c) % pc.p == 0:
            raise InternalContradiction(f"{pc.p} divides the correction at {c}")

    # replace each g by the constant g(c): (x - c)[V_m] = [V_{m+1}]
    consts, parts = [], []
    for g, s, mu, tau in elements:
        quot, val = g.div_linear(c)
        consts.append(val)
        parts.append((s - quot, mu, tau))
    gg, lams = integer_bezout(consts)
    if gg != 1:
        raise InternalContradiction(f"constants {consts} have common factor {gg}")
    sigma = mu = tau = zero
    for lam, (s, m_, t) in zip(lams, parts):
        sigma, mu, tau = sigma + s * lam, mu + m_ * lam, tau + t * lam
    sigma, mu, tau = _reduce(sigma, mu, tau, un, wn, v_next)
    triple = CofactorTriple(sigma, mu, tau, vm, v_next, un, wn)
    return WitnessTrace(triple, m, c, tuple(prime_values))


def _divisible_case(vm, v_next, un, wn) -> Optional[CofactorTriple]:
    """(0, [V_m]/[U_n], 0) or (0, 0, [V_m]/[W_n]) when one of the divisions is exact."""
    zero = IntegerPolynomial()
    q, r = vm.divmod_by_monic(un)
    if not r:
        return CofactorTriple(zero, q, zero, vm, v_next, un, wn)
    q, r = vm.divmod_by_monic(wn)
    if not r:
        return CofactorTriple(zero, zero, q, vm, v_next, un, wn)
    return None


def membership_witness(
    u_pts: Sequence[int], w_pts: Sequence[int], V: SetExpression, m: int
) -> CofactorTriple:
    """[V_m] = sigma*[V_{m+1}] + mu*[U_n] + tau*[W_n] for the given point lists."""
    vpts = first_elements(V, m + 1)
    direct = _divisible_case(split(vpts[:m]), split(vpts), split(u_pts), split(w_pts))
    if direct is not None:
        return direct
    return witness_trace(colon_data(u_pts, w_pts, V), V, m).triple


def lattice_witness(
    u_pts: Sequence[int], w_pts: Sequence[int], V: SetExpression, m: int, m_next: int
) -> Optional[CofactorTriple]:
    """Cofactors for [V_m] in ([V_{m_next}], [U_n], [W_n]) by an exact lattice solve.

    Modulo the monic [U_n] the ideal becomes the Z-span of x^i*[V_{m_next}]
    and x^i*[W_n] (i < n) inside Z^n, so membership is an integer linear
    system. Returns None when [V_m] is not in the ideal.
    """
    if not 0 <= m <= m_next:
        raise InputError("need 0 <= m <= m_next")
    vpts = first_elements(V, m_next)
    if len(vpts) < m_next:
        raise InputError(f"V has fewer than {m_next} elements")
    vm, v_next = split(vpts[:m]), split(vpts)
    un, wn = split(u_pts), split(w_pts)
    n = un.degree
    if n < 1:
        raise InputError("need at least one point of U")
    direct = _divisible_case(vm, v_next, un, wn)
    if direct is not None:
        return direct
    cols = []
    for gen in (v_next, wn):
        r = gen.mod_monic(un)
        for _ in range(n):
            cols.append([r[k] for k in range(n)])
            r = (r * IntegerPolynomial.x()).mod_monic(un)
    A = [[col[k] for col in cols] for k in range(n)]
    t = vm.mod_monic(un)
    y, _, _ = solve_integer(A, [t[k] for k in range(n)], cols=len(cols))
    if y is None:
        return None
    sigma, tau = IntegerPolynomial(y[:n]), IntegerPolynomial(y[n:])
    mu = (vm - sigma * v_next - tau * wn).exact_div(un)
    sigma, mu, tau = _reduce(sigma, mu, tau, un, wn, v_next)
    return CofactorTriple(sigma, mu, tau, vm, v_next, un, wn)


def _check_sets(U, W, V):
    meet = intersect(U, W)
    if meet is None:
        raise InputError("U and W are disjoint")
    probe = 2 + max(_scale(U), _scale(W), _scale(V)) * 4
    if meet.enumerate(probe) != V.enumerate(probe):
        raise InputError("V must equal U n W")
    if not first_elements(V, 2)[1:]:
        raise InputError("V must be infinite")


def _scale(S) -> int:
    pts = [0]
    for piece in S.pieces():
        base = getattr(piece, "base", None)
        if base is not None:
            pts += [base.a, base.d, *piece.excluded]
        else:
            pts += list(piece.points)
    return max(pts)


def _compose(outer, inner, un, wn):
    """Substitute [V_a] = inner into [V_b] = outer*[V_a] + ... style chains."""
    sigma, mu, tau = outer
    t = inner
    return _reduce(sigma * t.sigma, mu + sigma * t.mu, tau + sigma * t.tau, un, wn, t.v_next)


class SplitPlan:
    """Schedule and chained witnesses for one triple (U, W, V), computed lazily.

    ``method="lattice"`` (default) takes m_n as the least m >= m_{n-1} + 1,
    with V_m holding every point of (U_n u W_n) n V, such that the one-step
    membership [V_k] in ([V_{k+1}], [U_n], [W_n]) holds for all k in
    [m, m + lookahead); the chain identity from m_n to m_{n+1} is then
    solved directly. ``method="proof"`` uses the resultant construction
    with proximity points, whose breakpoints grow very quickly with n.
    """

    def __init__(
        self,
        U: SetExpression,
        W: SetExpression,
        V: SetExpression,
        stage_cap: int = DEFAULT_STAGE_CAP,
        method: str = "lattice",
        lookahead: int = 6,
        search_bound: int = 2000,
    ):
        if method not in ("lattice", "proof"):
            raise InputError(f"unknown method {method!r}")
        _check_sets(U, W, V)
        self.U, self.W, self.V = U, W, V
        self.stage_cap = stage_cap
        self.method = method
        self.lookahead = lookahead
        self.search_bound = search_bound
        self._data: dict[int, ColonData] = {}
        self._schedule: list[int] = []
        self._chain: dict[int, tuple] = {}

    def points(self, n: int):
        return first_elements(self.U, n), first_elements(self.W, n)

    def data(self, n: int) -> ColonData:
        if n not in self._data:
            u, w = self.points(n)
            self._data[n] = colon_data(u, w, self.V)
        return self._data[n]

    def _containment(self, n: int) -> int:
        u, w = self.points(n)
        need = [x for x in u + w if self.V.contains(x)]
        return max((element_index(self.V, x) for x in need), default=0)

    def _threshold(self, n: int, start: int) -> int:
        u, w = self.points(n)
        m, run = start, 0
        while run < self.lookahead:
            if m + run > self.search_bound:
                raise ResourceError(f"no stable breakpoint for stage {n} below m={self.search_bound}")
            if lattice_witness(u, w, self.V, m + run, m + run + 1) is None:
                m, run = m + run + 1, 0
            else:
                run += 1
        return m

    def schedule(self, n_max: int) -> list[int]:
        if n_max > self.stage_cap + 1:
            raise ResourceError(f"{n_max - 1} stages exceed the cap of {self.stage_cap}")
        while len(self._schedule) < n_max:
            n = len(self._schedule) + 1
            prev = self._schedule[-1] if self._schedule else 0
            if self.method == "proof":
                m = max(self.data(n).required_m, prev + 1)
            else:
                m = self._threshold(n, max(self._containment(n), prev + 1))
            self._schedule.append(m)
        return self._schedule[:n_max]

    def chain(self, n: int):
        """(sigma, mu, tau) with [V_{m_n}] = sigma*[V_{m_{n+1}}] + mu*[U_n] + tau*[W_n]."""
        if n in self._chain:
            return self._chain[n]
        sched = self.schedule(n + 1)
        m0, m1 = sched[n - 1], sched[n]
        u, w = self.points(n)
        if self.method == "lattice":
            t = lattice_witness(u, w, self.V, m0, m1)
            if t is None:
                raise ResourceError(f"no chain identity from m={m0} to m={m1} at stage {n}")
            out = (t.sigma, t.mu, t.tau)
        else:
            data = self.data(n)
            un, wn = split(u), split(w)
            out = (IntegerPolynomial([1]), IntegerPolynomial(), IntegerPolynomial())
            for m in range(m0, m1):
                out = _compose(out, witness_trace(data, self.V, m).triple, un, wn)
        self._chain[n] = out
        return out


def split_schedule(
    U: SetExpression, W: SetExpression, V: SetExpression, n_max: int, method: str = "lattice"
) -> list[int]:
    """Strictly increasing m_1 < ... < m_{n_max}, each sufficient for its stage."""
    if n_max < 0:
        raise InputError("n_max must be non-negative")
    return SplitPlan(U, W, V, stage_cap=max(n_max, DEFAULT_STAGE_CAP), method=method).schedule(n_max)


def regroup(coeffs: Sequence[int], v_pts: Sequence[int], schedule: Sequence[int]) -> list[IntegerPolynomial]:
    """Write sum a_k [V_k] as f_0 + sum_n f_n [V_{m_n}] for the given breakpoints.

    Coefficients past the last breakpoint are folded into the last group.
    """
    bounds = [0] + list(schedule) + [max(len(coeffs), schedule[-1] if schedule else 0)]
    groups = []
    for j in range(len(bounds) - 1):
        lo, hi = bounds[j], bounds[j + 1]
        acc = IntegerPolynomial()
        for k in range(lo, min(hi, len(coeffs))):
            if coeffs[k]:
                acc = acc + split(v_pts[lo:k]) * coeffs[k]
        groups.append(acc)
    return groups


@dataclass(frozen=True)
class SplitterState:
    """The rewriter after ``stage`` stages: f = g - h + carry*[V_{m_{stage+1}}]."""

    stage: int
    g: IntegerPolynomial
    h: IntegerPolynomial
    carry: IntegerPolynomial
    groups: tuple[IntegerPolynomial, ...]

    def step(self, plan: SplitPlan) -> "SplitterState":
        n = self.stage + 1
        sigma, mu, tau = plan.chain(n)
        data = plan.data(n)
        un, wn = split(data.u_pts), split(data.w_pts)
        nxt = self.groups[n + 1] if n + 1 < len(self.groups) else IntegerPolynomial()
        return SplitterState(
            n,
            self.g + self.carry * mu * un,
            self.h - self.carry * tau * wn,
            nxt + self.carry * sigma,
            self.groups,
        )


def _coeffs_on_V(f, V: SetExpression) -> list[int]:
    if isinstance(f, WindowFunction):
        f = product_sum_encode(f)
    if isinstance(f, ProductSum):
        if not f.is_integral:
            raise InputError("f is not LIP on its window (non-integral Newton coefficients)")
        if list(f.enumeration[: len(f.coeffs)]) != first_elements(V, len(f.coeffs)):
            raise InputError("product-sum enumeration must start with the increasing elements of V")
        return [int(c) for c in f.coeffs]
    coeffs = list(f)
    if any(int(c) != c for c in coeffs):
        raise InputError("coefficients must be integers")
    return [int(c) for c in coeffs]


@dataclass(frozen=True)
class SplitResult:
    g: WindowFunction
    h: WindowFunction
    g_poly: IntegerPolynomial
    h_poly: IntegerPolynomial
    schedule: tuple[int, ...]
    window: int
    certificate: dict


def split_stream(
    f,
    U: SetExpression,
    W: SetExpression,
    V: SetExpression,
    stages: int,
    plan: Optional[SplitPlan] = None,
    window: Optional[int] = None,
) -> SplitResult:
    """Run ``stages`` stages of the rewriter on f and verify the outcome.

    f is a ProductSum over the increasing enumeration of V, a WindowFunction
    on V, or a plain list of Newton coefficients. The returned window N is
    the largest one on which f = g - h is guaranteed, namely the position of
    the m_{K+1}-th element of V; a smaller ``window`` may be requested.
    """
    if stages < 0:
        raise InputError("stages must be non-negative")
    plan = plan or SplitPlan(U, W, V)
    if (plan.U, plan.W, plan.V) != (U, W, V):
        raise InputError("plan was built for different sets")
    coeffs = _coeffs_on_V(f, V)
    sched = plan.schedule(stages + 1)
    v_pts = first_elements(V, max(len(coeffs), sched[-1]))
    groups = tuple(regroup(coeffs, v_pts, sched))
    state = SplitterState(0, groups[0], IntegerPolynomial(), groups[1], groups)
    for _ in range(stages):
        state = state.step(plan)
    N = v_pts[sched[stages] - 1]
    if window is not None:
        if window > N:
            raise InputError(f"window {window} exceeds the certified window {N}")
        N = window
    g = WindowFunction.from_callable(U, N, state.g)
    h = WindowFunction.from_callable(W, N, state.h)
    fpoly = sum((split(v_pts[:k]) * a for k, a in enumerate(coeffs) if a), IntegerPolynomial())
    agrees = all(fpoly(x) == state.g(x) - state.h(x) for x in V.enumerate(N))
    g_circ, h_circ = find_circuit(g), find_circuit(h)
    cert = {
        "window": N,
        "stages": stages,
        "schedule": sched,
        "f_equals_g_minus_h": agrees,
        "g_circuit": None if g_circ is None else list(g_circ.points),
        "h_circuit": None if h_circ is None else list(h_circ.points),
    }
    if not agrees or g_circ or h_circ:
        raise InternalContradiction(f"split verification failed: {cert}")
    return SplitResult(g, h, state.g, state.h, tuple(sched), N, cert)
