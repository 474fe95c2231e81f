"""Windowed Čech complexes of LIP data over finite covers.

On a finite window every LIP module is free with the Newton basis
prod_{i<j} (x - p_i) of the window points, so cochain groups are Z^r and
coboundaries are integer matrices. Cohomology of the truncated complex is
read off Smith normal forms. Non-vanishing verdicts come with either an
exact functional certificate (valid on every window) or a window-relative
Smith-form certificate.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from typing import Callable, Mapping, Optional, Sequence

from .errors import InputError, InternalContradiction, ResourceError
from .exactmath import (
    is_zero_matrix,
    matmul,
    matvec,
    prime_divisors,
    smith_normal_form,
    solve_integer,
    split,
)
from .kirch import (
    Finite,
    Progression,
    SetExpression,
    classify_cover,
    element_index,
    first_elements,
    intersect,
    set_from_json,
    set_to_json,
    union_of,
)
from .lipcalc import WindowFunction, find_circuit, newton_coefficients
from .splitter import SplitPlan, split_stream


def _newton_restriction(src: Sequence[int], dst: Sequence[int]) -> list[list[int]]:
    """Matrix taking Newton coordinates on src to Newton coordinates on dst."""
    cols = []
    for j in range(len(src)):
        basis = split(src[:j])
        coeffs = newton_coefficients([(x, basis(x)) for x in dst])
        if any(c.denominator != 1 for c in coeffs):
            raise InternalContradiction("restriction of an integer polynomial is not integral")
        cols.append([int(c) for c in coeffs])
    return [[cols[j][i] for j in range(len(src))] for i in range(len(dst))]


@dataclass
class CechComplex:
    """Truncated Čech complex of window-LIP modules.

    ``simplices[k]`` lists the index tuples of (k+1)-fold intersections that
    are nonempty in the window; ``points[s]`` is the window of simplex s;
    ``delta[k]`` maps degree k to degree k+1 in stacked Newton coordinates.
    """

    cover: list[SetExpression]
    window: int
    max_degree: int
    simplices: list[list[tuple[int, ...]]]
    points: dict[tuple[int, ...], list[int]]
    delta: list[list[list[int]]]
    offsets: list[dict[tuple[int, ...], int]] = field(default_factory=list)

    def rank(self, k: int) -> int:
        return sum(len(self.points[s]) for s in self.simplices[k]) if 0 <= k <= self.max_degree else 0

    def cochain_vector(self, cochain: "CechCochain") -> list[int]:
        """Stacked Newton coordinates of a cochain; missing components are zero."""
        k = cochain.degree
        if not 0 <= k <= self.max_degree:
            raise InputError(f"degree {k} outside 0..{self.max_degree}")
        vec = [0] * self.rank(k)
        known = set(self.simplices[k])
        for s, f in cochain.components.items():
            if s not in known:
                if f is None or all(v == 0 for v in _values(f)):
                    continue
                raise InputError(f"component {s} lies on an intersection that is empty in the window")
            pts = self.points[s]
            vals = [_value_at(f, x) for x in pts]
            coeffs = newton_coefficients(list(zip(pts, vals)))
            if any(c.denominator != 1 for c in coeffs):
                raise InputError(f"component {s} is not window-LIP on its intersection")
            off = self.offsets[k][s]
            vec[off : off + len(pts)] = [int(c) for c in coeffs]
        return vec

    def cochain_from_vector(self, k: int, vec: Sequence[int]) -> "CechCochain":
        comps = {}
        for s in self.simplices[k]:
            pts = self.points[s]
            off = self.offsets[k][s]
            coeffs = vec[off : off + len(pts)]
            vals = {}
            for x in pts:
                acc, prod = 0, 1
                for c, p in zip(coeffs, pts):
                    acc += c * prod
                    prod *= x - p
                vals[x] = acc
            comps[s] = WindowFunction(Finite(tuple(pts)), self.window, vals) if pts else None
        return CechCochain(k, comps)

    def apply_delta(self, k: int, vec: Sequence[int]) -> list[int]:
        return matvec(self.delta[k], vec)


def _values(f):
    if isinstance(f, WindowFunction):
        return f.values.values()
    if isinstance(f, Mapping):
        return f.values()
    return []


def _value_at(f, x):
    if isinstance(f, (WindowFunction, Mapping)):
        return f[x] if isinstance(f, Mapping) else f(x)
    return f(x)


@dataclass
class CechCochain:
    """Degree-k cochain: one function per (k+1)-fold intersection, keyed by sorted index tuple."""

    degree: int
    components: dict[tuple[int, ...], object]

    def __post_init__(self):
        comps = {}
        for key, f in self.components.items():
            key = tuple(sorted(int(i) for i in key))
            if len(key) != self.degree + 1 or len(set(key)) != len(key):
                raise InputError(f"index {key} does not fit degree {self.degree}")
            comps[key] = f
        self.components = comps


def build_cech_complex(cover: Sequence[SetExpression], window: int, max_degree: int = 2) -> CechComplex:
    """Čech complex of window-LIP data up to degree ``max_degree``."""
    cover = list(cover)
    if not cover:
        raise InputError("empty cover")
    if max_degree < 0:
        raise InputError("max_degree must be non-negative")
    for i, piece in enumerate(cover):
        if not piece.enumerate(window):
            raise InputError(f"piece {i} ({piece}) is empty in the window [1, {window}]")
    simplices, points, offsets = [], {}, []
    for k in range(max_degree + 1):
        level = []
        for s in combinations(range(len(cover)), k + 1):
            if k == 0:
                pts = cover[s[0]].enumerate(window)
            else:
                # faces come first in the iteration, so an empty face prunes
                face = s[:-1]
                if face not in points:
                    continue
                pts = [x for x in points[face] if cover[s[-1]].contains(x)]
            if pts:
                points[s] = pts
                level.append(s)
        simplices.append(level)
        off, table = 0, {}
        for s in level:
            table[s] = off
            off += len(points[s])
        offsets.append(table)
    delta = []
    for k in range(max_degree):
        rows, cols = sum(len(points[s]) for s in simplices[k + 1]), sum(len(points[s]) for s in simplices[k])
        mat = [[0] * cols for _ in range(rows)]
        for t in simplices[k + 1]:
            for j in range(k + 2):
                face = t[:j] + t[j + 1 :]
                sign = -1 if j % 2 else 1
                block = _newton_restriction(points[face], points[t])
                r0, c0 = offsets[k + 1][t], offsets[k][face]
                for a, row in enumerate(block):
                    target = mat[r0 + a]
                    for b, v in enumerate(row):
                        if v:
                            target[c0 + b] += sign * v
        delta.append(mat)
    cx = CechComplex(cover, window, max_degree, simplices, points, delta, offsets)
    for k in range(max_degree - 1):
        if delta[k] and delta[k + 1] and not is_zero_matrix(matmul(delta[k + 1], delta[k])):
            raise InternalContradiction(f"coboundary maps do not compose to zero at degree {k}")
    return cx


@dataclass(frozen=True)
class CohomologyGroup:
    """Z^rank plus torsion Z/t for each listed t > 1."""

    rank: int
    torsion: tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self):
        parts = ([f"Z^{self.rank}"] if self.rank else []) + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def cohomology_window(complex: CechComplex, k: int) -> CohomologyGroup:
    """ker delta_k / im delta_{k-1} for the truncated complex."""
    if not 0 <= k <= complex.max_degree - 1:
        raise InputError(f"degree {k} needs max_degree >= {k + 1}")
    n_k = complex.rank(k)
    if n_k == 0:
        return CohomologyGroup(0, ())
    dk = complex.delta[k]
    snf = smith_normal_form(dk, cols=n_k)
    r = snf.rank
    kernel_dim = n_k - r
    if k == 0 or complex.rank(k - 1) == 0:
        return CohomologyGroup(kernel_dim, ())
    prev = complex.delta[k - 1]
    coords = matmul(snf.v_inv, prev)
    if any(x for row in coords[:r] for x in row):
        raise InternalContradiction("image of the previous coboundary leaves the kernel")
    sub = coords[r:]
    if not sub:
        return CohomologyGroup(0, ())
    inner = smith_normal_form(sub, cols=complex.rank(k - 1))
    factors = inner.invariant_factors
    return CohomologyGroup(kernel_dim - len(factors), tuple(d for d in factors if d > 1))


# -- obstruction functionals ------------------------------------------------

@dataclass(frozen=True)
class ObstructionFunctional:
    """sum sign * c_s(point) over (point, sign, simplex) terms, read mod ``modulus``."""

    name: str
    cover: tuple[SetExpression, ...]
    terms: tuple[tuple[int, int, tuple[int, ...]], ...]
    modulus: int
    degree: int = 1

    def match(self, cover: Sequence[SetExpression]) -> Optional[dict[int, int]]:
        """Index map from this functional's cover into ``cover``, if the pieces agree."""
        keys = [json.dumps(set_to_json(p), sort_keys=True) for p in cover]
        mapping = {}
        for i, piece in enumerate(self.cover):
            key = json.dumps(set_to_json(piece), sort_keys=True)
            if key not in keys:
                return None
            mapping[i] = keys.index(key)
        return mapping

    def evaluate(self, cochain: CechCochain, mapping: Optional[dict[int, int]] = None) -> int:
        total = 0
        for point, sign, simplex in self.terms:
            s = tuple(sorted(mapping[i] for i in simplex)) if mapping else simplex
            f = cochain.components.get(s)
            total += sign * (_value_at(f, point) if f is not None else 0)
        return total

    def row(self, complex: CechComplex, mapping: dict[int, int]) -> list[int]:
        """The functional as a row vector on stacked Newton coordinates."""
        row = [0] * complex.rank(self.degree)
        for point, sign, simplex in self.terms:
            s = tuple(sorted(mapping[i] for i in simplex))
            if s not in complex.offsets[self.degree]:
                raise InputError(f"simplex {s} is empty in the window")
            pts = complex.points[s]
            if point not in pts:
                raise InputError(f"point {point} is outside the window of simplex {s}")
            off, prod = complex.offsets[self.degree][s], 1
            for j, p in enumerate(pts):
                row[off + j] += sign * prod
                prod *= point - p
        return row

    def kills_coboundaries(self, complex: CechComplex, mapping: dict[int, int]) -> bool:
        """Whether the functional vanishes mod modulus on every coboundary of the window."""
        if self.degree < 1:
            return False
        row = self.row(complex, mapping)
        prev = complex.delta[self.degree - 1]
        return all(sum(a * prev[i][j] for i, a in enumerate(row)) % self.modulus == 0 for j in range(complex.rank(self.degree - 1)))


def _functional_from_json(doc) -> ObstructionFunctional:
    return ObstructionFunctional(
        doc["name"],
        tuple(set_from_json(p) for p in doc["cover"]),
        tuple((int(t["point"]), int(t["sign"]), tuple(int(i) for i in t["simplex"])) for t in doc["terms"]),
        int(doc["modulus"]),
        int(doc.get("degree", 1)),
    )


def load_obstruction_catalog(path: Optional[str] = None) -> list[ObstructionFunctional]:
    """Registered obstruction functionals (package data unless ``path`` is given)."""
    if path is None:
        text = resources.files("kirchlip").joinpath("data/obstructions.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    doc = json.loads(text)
    return [_functional_from_json(d) for d in doc["obstructions"]]


def parity_obstruction(f) -> int:
    """f(1) - f(7) - f(11) + f(17); even on sums of restrictions from mod 3 and mod 5 classes."""
    try:
        return _value_at(f, 1) - _value_at(f, 7) - _value_at(f, 11) + _value_at(f, 17)
    except (KeyError, InputError):
        raise InputError("parity obstruction needs values at 1, 7, 11 and 17") from None


def mod15_cover() -> list[SetExpression]:
    """Classes 1, 2 mod 3 and 1..4 mod 5: a cover of the integers prime to 15 (in N)."""
    return [Progression(1, 3), Progression(2, 3)] + [Progression(a, 5) for a in range(1, 5)]


def mod15_indicator_cocycle(complex: CechComplex) -> CechCochain:
    """The indicator of 1 mod 15 on each (mod 3, mod 5) intersection, zero elsewhere."""
    comps = {}
    for s in complex.simplices[1]:
        pts = complex.points[s]
        comps[s] = WindowFunction(Finite(tuple(pts)), complex.window, {x: int(x % 15 == 1) for x in pts})
    return CechCochain(1, comps)


@dataclass(frozen=True)
class CoboundaryVerdict:
    is_coboundary: bool
    witness: Optional[CechCochain] = None
    kind: str = ""  # "EXACT" or "WINDOW-RELATIVE" for negative verdicts
    certificate: dict = field(default_factory=dict)


def is_coboundary(
    complex: CechComplex, cocycle: CechCochain, catalog: Optional[Sequence[ObstructionFunctional]] = None
) -> CoboundaryVerdict:
    """Decide whether a 1-cocycle (or any k-cocycle) is a coboundary in the window."""
    k = cocycle.degree
    if not 1 <= k <= complex.max_degree:
        raise InputError(f"degree {k} outside 1..{complex.max_degree}")
    vec = complex.cochain_vector(cocycle)
    if k < complex.max_degree and any(complex.apply_delta(k, vec)):
        raise InputError("cochain is not closed")
    if catalog is None:
        catalog = load_obstruction_catalog()
    for fn in catalog:
        if fn.degree != k:
            continue
        mapping = fn.match(complex.cover)
        if mapping is None:
            continue
        try:
            kills = fn.kills_coboundaries(complex, mapping)
        except InputError:
            continue
        value = sum(a * b for a, b in zip(fn.row(complex, mapping), vec))
        if kills and value % fn.modulus:
            return CoboundaryVerdict(
                False,
                None,
                "EXACT",
                {
                    "functional": fn.name,
                    "terms": [[p, s, list(sm)] for p, s, sm in fn.terms],
                    "value": value,
                    "modulus": fn.modulus,
                    "residue": value % fn.modulus,
                },
            )
    x, _, obstruction = solve_integer(complex.delta[k - 1], vec, cols=complex.rank(k - 1))
    if x is not None:
        if complex.apply_delta(k - 1, x) != vec:
            raise InternalContradiction("coboundary witness does not reproduce the cocycle")
        return CoboundaryVerdict(True, complex.cochain_from_vector(k - 1, x))
    psi, modulus = obstruction
    return CoboundaryVerdict(
        False,
        None,
        "WINDOW-RELATIVE",
        {"row": psi, "modulus": modulus, "window": complex.window},
    )


# -- ZL sections and gluing ---------------------------------------------------

@dataclass(frozen=True)
class ZLSection:
    """One integer function per cover piece, pairwise differing by window-LIP functions."""

    pieces: tuple[SetExpression, ...]
    functions: tuple[WindowFunction, ...]

    def __post_init__(self):
        if len(self.pieces) != len(self.functions):
            raise InputError("need one function per piece")
        bad = self.failures()
        if bad:
            raise InputError("; ".join(bad))

    def failures(self) -> list[str]:
        out = []
        for i, j in combinations(range(len(self.pieces)), 2):
            meet = intersect(self.pieces[i], self.pieces[j])
            if meet is None:
                continue
            diff = self.functions[i].restrict(meet) - self.functions[j].restrict(meet)
            circ = find_circuit(diff)
            if circ is not None:
                out.append(f"pieces {i},{j}: difference has circuit {list(circ.points)}")
        return out


@dataclass(frozen=True)
class GlueResult:
    union: SetExpression
    glued: WindowFunction
    adjust_u: WindowFunction  # LIP on U: glued = alpha - adjust_u on U
    adjust_w: WindowFunction  # LIP on W: glued = beta - adjust_w on W
    stages: int


def zl_glue(alpha: tuple[SetExpression, WindowFunction], beta: tuple[SetExpression, WindowFunction], max_stages: int = 12) -> GlueResult:
    """Glue two representatives whose difference is window-LIP on the overlap.

    The difference on V = U n W is split as a1 - b1 with a1 LIP on U and b1
    LIP on W; alpha - a1 and beta - b1 then agree on V and define one
    function on U u W.
    """
    U, fa = alpha
    W, fb = beta
    if fa.window != fb.window:
        raise InputError("representatives must share a window")
    N = fa.window
    V = intersect(U, W)
    if V is None:
        raise InputError("U and W are disjoint; nothing to glue")
    c = fa.restrict(V) - fb.restrict(V)
    circ = find_circuit(c)
    if circ is not None:
        raise InputError(f"difference on the overlap is not LIP: circuit {list(circ.points)}")
    coeffs = [int(a) for a in newton_coefficients(c.pairs())]
    plan = SplitPlan(U, W, V, stage_cap=max_stages)
    v_max = max(V.enumerate(N), default=0)
    for stages in range(max_stages + 1):
        sched = plan.schedule(stages + 1)
        if first_elements(V, sched[-1])[-1] >= v_max:
            break
    else:
        raise ResourceError(f"window {N} needs more than {max_stages} splitting stages")
    res = split_stream(coeffs, U, W, V, stages, plan)
    a1 = WindowFunction.from_callable(U, N, res.g_poly)
    b1 = WindowFunction.from_callable(W, N, res.h_poly)
    X = union_of([U, W])
    vals = {}
    for x in U.enumerate(N):
        vals[x] = fa(x) - a1(x)
    for x in W.enumerate(N):
        y = fb(x) - b1(x)
        if x in vals and vals[x] != y:
            raise InternalContradiction(f"adjusted representatives disagree at {x}")
        vals[x] = y
    return GlueResult(X, WindowFunction(X, N, vals), a1, b1, stages)


# -- nest chains ----------------------------------------------------------------

@dataclass(frozen=True)
class NestStage:
    pieces: tuple[int, ...]  # 0-based cover indices; piece i contains u_{i+1}
    straw: tuple[int, ...]
    core: tuple[int, ...]


def _piece_getter(cover) -> Callable[[int], SetExpression]:
    if callable(cover):
        return cover
    pieces = list(cover)

    def get(i):
        if i >= len(pieces):
            raise ResourceError(f"cover has only {len(pieces)} pieces; piece {i} needed")
        return pieces[i]

    return get


def _validate_refined(U: SetExpression, get, indices, window: int):
    indices = sorted(set(indices))
    u = first_elements(U, indices[-1] + 1)
    for i in indices:
        piece = get(i)
        if not piece.is_almost_basic:
            raise InputError(f"piece {i} is not almost basic")
        if not piece.contains(u[i]):
            raise InputError(f"piece {i} does not contain u_{i + 1} = {u[i]}")
        if any(piece.contains(u[j]) for j in range(i)):
            raise InputError(f"piece {i} contains an earlier element of U")
        if any(not U.contains(x) for x in piece.enumerate(window)):
            raise InputError(f"piece {i} is not contained in U")


def build_nest_chain(
    U: SetExpression, cover, steps: int, search_bound: int = 10**5, check_window: int = 500
) -> list[NestStage]:
    """Increasing nests N_1, N_2, ... made from a refined cover of U.

    ``cover`` is a callable i -> piece (0-based) with piece i containing the
    (i+1)-th element of U and no earlier one, or a finite list of such
    pieces. N_1 is the first piece. N_{t+1} takes all pieces of N_t plus the
    first unused one as straw, and a core of two pieces found by the
    divisibility rule: k1 in U divisible by every prime of the collected
    differences that does not divide U's difference, then k2 divisible by
    the primes of k1 and of the difference of k1's piece that do not divide
    U's difference. The piece for an element x is the one indexed by x's
    position in U; a finite list may run out of positions, so there every
    piece containing x is a candidate. The least candidates giving a valid
    nest are used.
    """
    if steps < 0:
        raise InputError("steps must be non-negative")
    if not U.is_almost_basic:
        raise InputError("U must be almost basic")
    if steps == 0:
        return []
    finite = not callable(cover)
    get = _piece_getter(cover)
    size = len(cover) if finite else None
    if finite:
        if not cover:
            raise InputError("empty cover")
        _validate_refined(U, get, range(len(cover)), check_window)
        covered = set().union(*[p.enumerate(check_window) for p in cover])
        if any(x not in covered for x in U.enumerate(check_window)):
            raise InputError(f"pieces do not cover U on [1, {check_window}]")
    else:
        _validate_refined(U, get, [0], check_window)
    dU = U.base.d
    chain = [NestStage((0,), (), (0,))]

    def pieces_for(x):
        if finite:
            return [i for i in range(size) if get(i).contains(x)]
        return [element_index(U, x, limit=search_bound) - 1]

    def candidates(primes):
        need = 1
        for p in primes:
            need *= p
        for x in U.iter_elements():
            if x > search_bound:
                return
            if x % need == 0:
                yield x

    def attempt(collection):
        diffs = [get(i).base.d for i in collection]
        primes1 = sorted({p for d in diffs for p in prime_divisors(d) if dU % p})
        for k1 in candidates(primes1):
            for i1 in pieces_for(k1):
                primes2 = sorted({p for p in prime_divisors(k1 * get(i1).base.d) if dU % p})
                for tries, k2 in enumerate(candidates(primes2)):
                    if tries >= 20:
                        break
                    for i2 in pieces_for(k2):
                        if i2 == i1:
                            continue
                        core = (i1, i2)
                        straw = tuple(i for i in collection if i not in core)
                        members = sorted(set(collection) | set(core))
                        if not finite:
                            _validate_refined(U, get, members, check_window)
                        local = {i: k for k, i in enumerate(members)}
                        verdict = classify_cover(
                            [get(i) for i in members],
                            straw=[local[i] for i in straw],
                            core=[local[i] for i in core],
                            spot_check_window=None,
                        )
                        if verdict.nest:
                            return NestStage(tuple(members), straw, core)
        return None

    while len(chain) < steps:
        collection = list(chain[-1].pieces)
        unused = next(i for i in range(len(collection) + 1) if i not in collection)
        if finite and unused >= size:
            raise ResourceError("every piece of the cover is already in the nest")
        collection.append(unused)
        found = attempt(collection)
        if found is None:
            raise ResourceError(f"no nest-completing pair below {search_bound}")
        chain.append(found)
    return chain
