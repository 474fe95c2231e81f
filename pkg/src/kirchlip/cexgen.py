"""A locally LIP function that is not LIP, on the integers prime to 6.

X is covered by U = 4 + 6N0, V = the odd numbers and W = 2 + 6N0. A state
is a pair of integer polynomials f (on U_i u V_m) and g (on V_m u W_j)
agreeing on V_m, with

    f - g = p*[V_m],   2^k p = mu*[U_i] - tau*[W_j].

Three moves grow the state: CORE takes one more point of V, STRAW_U one
more point of U, STRAW_W one more point of W. Gluing f and g gives Q with
Q(2) = 1 and Q(4) = 0 forever, so {2, 4} stays a circuit while Q is LIP on
U u V and on V u W.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import InputError, InternalContradiction
from .exactmath import (
    IntegerPolynomial,
    ext_gcd,
    least_abs_residue,
    mod_inverse,
    p_adic_order,
    resultant_cofactors,
    split,
)
from .kirch import Progression, SetExpression, first_elements, union_of
from .lipcalc import WindowFunction, find_circuit

CORE, STRAW_U, STRAW_W = "CORE", "STRAW_U", "STRAW_W"
MODES = (CORE, STRAW_U, STRAW_W)
DEFAULT_SCHEDULE = (CORE, CORE, STRAW_U, STRAW_W)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CexConfig:
    """Three progressions with V odd and U, W even, so [U_i](v), [W_j](v) are odd."""

    U: Progression = Progression(4, 6)
    V: Progression = Progression(1, 2)
    W: Progression = Progression(2, 6)

    def __post_init__(self):
        for name in ("U", "V", "W"):
            S = getattr(self, name)
            if not isinstance(S, Progression) or S.d % 2:
                raise InputError(f"{name} must be a progression with even difference")
        if self.V.a % 2 == 0 or self.U.a % 2 or self.W.a % 2:
            raise InputError("need V odd and U, W even so that the core values stay odd")

    @property
    def X(self) -> SetExpression:
        return union_of([self.U, self.V, self.W])

    def points(self, which: str, n: int) -> list[int]:
        return first_elements(getattr(self, which), n)


DEFAULT_CONFIG = CexConfig()


@dataclass(frozen=True)
class PairState:
    i: int
    j: int
    m: int
    k: int
    f: IntegerPolynomial
    g: IntegerPolynomial
    mu: IntegerPolynomial
    tau: IntegerPolynomial

    def splits(self, cfg: CexConfig = DEFAULT_CONFIG):
        return (
            split(cfg.points("U", self.i)),
            split(cfg.points("V", self.m)),
            split(cfg.points("W", self.j)),
        )

    def p(self, cfg: CexConfig = DEFAULT_CONFIG) -> IntegerPolynomial:
        _, vm, _ = self.splits(cfg)
        q, r = (self.f - self.g).divmod_by_monic(vm)
        if r:
            raise InternalContradiction("f and g disagree on V_m")
        return q

    def check(self, cfg: CexConfig = DEFAULT_CONFIG) -> bool:
        """The defining identities, checked exactly."""
        ui, vm, wj = self.splits(cfg)
        try:
            p = self.p(cfg)
        except InternalContradiction:
            return False
        return p * (2**self.k) == self.mu * ui - self.tau * wj

    def to_json(self) -> dict:
        enc = lambda poly: [str(c) for c in poly.coeffs]
        return {
            "i": self.i, "j": self.j, "m": self.m, "k": self.k,
            "f": enc(self.f), "g": enc(self.g), "mu": enc(self.mu), "tau": enc(self.tau),
        }

    @classmethod
    def from_json(cls, doc) -> "PairState":
        dec = lambda xs: IntegerPolynomial([int(c) for c in xs])
        return cls(int(doc["i"]), int(doc["j"]), int(doc["m"]), int(doc["k"]),
                   dec(doc["f"]), dec(doc["g"]), dec(doc["mu"]), dec(doc["tau"]))


def initial_state(cfg: CexConfig = DEFAULT_CONFIG) -> PairState:
    """f = 0 on {u_1, v_1}, g = x - v_1 on {v_1, w_1}.

    For the default sets 2*(-1) = (x - 4) - (x - 2), so k = 1, mu = tau = 1.
    """
    u1, v1, w1 = cfg.points("U", 1)[0], cfg.points("V", 1)[0], cfg.points("W", 1)[0]
    f = IntegerPolynomial()
    g = IntegerPolynomial([-v1, 1])
    # p = -1 and mu*(x - u1) - tau*(x - w1) = 2^k p needs mu = tau, mu*(w1 - u1) = -2^k
    diff = w1 - u1
    k = p_adic_order(diff, 2)
    if abs(diff) != 2**k:
        raise InputError("first points of U and W must differ by a power of two")
    mu = IntegerPolynomial([-(2**k) // diff])
    state = PairState(1, 1, 1, k, f, g, mu, mu)
    if not state.check(cfg):
        raise InternalContradiction("initial state fails its identity")
    return state


def _core(state: PairState, cfg: CexConfig) -> PairState:
    ui, vm, wj = state.splits(cfg)
    c = cfg.points("V", state.m + 1)[-1]
    p = state.p(cfg)
    A, B = ui(c), wj(c)
    if A % 2 == 0 or B % 2 == 0:
        raise InternalContradiction("core values are not odd")
    two_k = 2**state.k
    # a*A - b*B = -p(c); one solution from Bezout, then shift along (B/d, A/d)
    d, s, t = ext_gcd(A, B)
    if p(c) % d:
        raise InternalContradiction("p(c) is not a multiple of gcd(A, B)")
    a0, b0 = -p(c) // d * s, p(c) // d * t
    assert a0 * A - b0 * B == -p(c)
    # pick e so that B divides mu(c) + 2^k a with a = a0 + e*B/d; since B is
    # odd this fixes a modulo |B|, and the class meets a0 + (B/d)Z
    mod = abs(B)
    target = (-state.mu(c) * mod_inverse(two_k, mod)) % mod if mod > 1 else 0
    if (target - a0) % (mod // d):
        raise InternalContradiction("core class misses the Bezout line")
    e = 0 if mod == 1 else ((target - a0) // (mod // d) * (1 if B > 0 else -1)) % d
    a = least_abs_residue(a0 + e * (B // d), mod)
    if (p(c) + a * A) % B:
        raise InternalContradiction("no integral b for the chosen a")
    b = (p(c) + a * A) // B
    lam_num = state.mu(c) + two_k * a
    if lam_num % B:
        raise InternalContradiction("core correction failed to make B divide mu(c) + 2^k a")
    lam = lam_num // B
    if state.tau(c) + two_k * b != lam * A:
        raise InternalContradiction("core correction is inconsistent")
    mu = state.mu.difference_quotient(c) - wj.difference_quotient(c) * lam
    tau = state.tau.difference_quotient(c) - ui.difference_quotient(c) * lam
    return PairState(
        state.i, state.j, state.m + 1, state.k,
        state.f + ui * vm * a,
        state.g + vm * wj * b,
        mu, tau,
    )


def _straw(state: PairState, cfg: CexConfig, side: str) -> PairState:
    ui, vm, wj = state.splits(cfg)
    two_k = 2**state.k
    if side == "U":
        own, other, coef = ui, wj, state.mu
        c = cfg.points("U", state.i + 1)[-1]
    else:
        own, other, coef = wj, ui, state.tau
        c = cfg.points("W", state.j + 1)[-1]
    grown = own * IntegerPolynomial([-c, 1])
    R, alpha, beta = resultant_cofactors(grown, other)
    s = p_adic_order(R, 2)
    d = abs(R) >> s
    a = 0 if d == 1 else least_abs_residue(-coef(c) * mod_inverse(two_k, d), d)
    K = coef(c) + two_k * a
    if (K << s) % R:
        raise InternalContradiction("odd part of the resultant does not divide the corrected value")
    L = (K << s) // R
    new_own = coef.difference_quotient(c) * (2**s) + own * alpha * L
    new_other_coef = (state.tau if side == "U" else state.mu) * (2**s) - own * beta * L
    if side == "U":
        mu, tau = new_own, new_other_coef
        q, mu = mu.divmod_by_monic(wj)
        tau = tau - q * grown
        return PairState(state.i + 1, state.j, state.m, state.k + s, state.f + ui * vm * a, state.g, mu, tau)
    tau, mu = new_own, new_other_coef
    # 2^k p~ = mu*[U_i] - tau*[W_{j+1}]; keep mu reduced modulo [W_{j+1}]
    q, mu = mu.divmod_by_monic(grown)
    tau = tau - q * ui
    return PairState(state.i, state.j + 1, state.m, state.k + s, state.f, state.g + vm * wj * a, mu, tau)


def extend_pair(state: PairState, mode: str, cfg: CexConfig = DEFAULT_CONFIG) -> PairState:
    """One move of the iteration; the result is re-verified."""
    if mode not in MODES:
        raise InputError(f"unknown mode {mode!r}; expected one of {MODES}")
    if not state.check(cfg):
        raise InternalContradiction("state identity fails on entry")
    if mode == CORE:
        new = _core(state, cfg)
    else:
        new = _straw(state, cfg, "U" if mode == STRAW_U else "W")
    if not new.check(cfg):
        raise InternalContradiction(f"{mode} step broke the state identity")
    return new


def coefficient_bits(state: PairState) -> int:
    """Largest coefficient bit length over f, g, mu, tau."""
    polys = (state.f, state.g, state.mu, state.tau)
    return max((abs(c).bit_length() for poly in polys for c in poly.coeffs), default=0)


@dataclass(frozen=True)
class Counterexample:
    Q: WindowFunction
    final: PairState
    trace: tuple[tuple[str, PairState], ...]

    def trace_json(self) -> list[dict]:
        return [{"mode": mode, "state": st.to_json(), "bits": coefficient_bits(st)} for mode, st in self.trace]


def _covers(state: PairState, cfg: CexConfig, N: int) -> bool:
    return (
        cfg.points("U", state.i)[-1] >= max(cfg.U.enumerate(N), default=0)
        and cfg.points("V", state.m)[-1] >= max(cfg.V.enumerate(N), default=0)
        and cfg.points("W", state.j)[-1] >= max(cfg.W.enumerate(N), default=0)
    )


def generate_counterexample(
    steps: Optional[int] = None,
    schedule: Sequence[str] = DEFAULT_SCHEDULE,
    window: int = 40,
    cfg: CexConfig = DEFAULT_CONFIG,
    max_steps: int = 10_000,
) -> Counterexample:
    """Run the iteration and glue the final pair into Q on X n [1, window].

    The schedule is cycled. With ``steps=None`` the run stops as soon as the
    consumed points cover the window; otherwise exactly ``steps`` moves are
    made and the window must be covered afterwards.
    """
    schedule = list(schedule)
    if not schedule or any(mode not in MODES for mode in schedule):
        raise InputError(f"schedule must be a non-empty list of {MODES}")
    state = initial_state(cfg)
    trace = [("START", state)]
    n = 0
    while (steps is None and not _covers(state, cfg, window)) or (steps is not None and n < steps):
        if n >= max_steps:
            raise InputError(f"schedule does not cover the window within {max_steps} steps")
        mode = schedule[n % len(schedule)]
        new = extend_pair(state, mode, cfg)
        if new.k < state.k or (mode == CORE and new.k != state.k):
            raise InternalContradiction("2-power exponent moved the wrong way")
        state = new
        trace.append((mode, state))
        log.debug("step %d %s: i=%d j=%d m=%d k=%d bits=%d", n + 1, mode,
                  state.i, state.j, state.m, state.k, coefficient_bits(state))
        n += 1
    if not _covers(state, cfg, window):
        raise InputError(
            f"schedule insufficient for window {window}: consumed U_{state.i}, V_{state.m}, W_{state.j}"
        )
    vals = {}
    for x in cfg.X.enumerate(window):
        vals[x] = state.g(x) if cfg.W.contains(x) else state.f(x)
    Q = WindowFunction(cfg.X, window, vals)
    return Counterexample(Q, state, tuple(trace))


def certify_counterexample(Q: WindowFunction, cfg: CexConfig = DEFAULT_CONFIG) -> dict:
    """Circuit of Q plus window-LIP verdicts on V, U u V and W u V."""
    if 2 not in Q.values or 4 not in Q.values:
        raise InputError("window must contain 2 and 4")
    circ = find_circuit(Q)
    pieces = {
        "V": cfg.V,
        "U+V": union_of([cfg.U, cfg.V]),
        "W+V": union_of([cfg.W, cfg.V]),
    }
    verdicts = {}
    for name, S in pieces.items():
        pts = [x for x in sorted(Q.values) if S.contains(x)]
        verdicts[name] = find_circuit(Q.restrict_points(pts)) is None
    return {
        "circuit": None if circ is None else [str(x) for x in circ.points],
        "leading": None if circ is None else str(circ.leading),
        "denominator": None if circ is None else str(circ.denominator),
        "values": {str(x): str(Q(x)) for x in (2, 4)},
        "window": str(Q.window),
        "piece_lip": verdicts,
    }
