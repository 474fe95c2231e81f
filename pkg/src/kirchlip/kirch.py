"""Symbolic Kirch-open sets: progressions, almost basic sets, unions.

Every set here can be enumerated exactly on a window ``[1, N]``. Full
progressions are stored by their least positive element, so two
``Progression`` objects describe the same set iff they compare equal.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd
from typing import Iterable, Iterator, Optional, Sequence, Union as TUnion

from .errors import InputError
from .exactmath import crt_solve, gcd_all, is_squarefree, prime_divisors


@dataclass(frozen=True)
class Progression:
    """The full progression a + d*N0 (d >= 1) or the singleton {a} (d == 0)."""

    a: int
    d: int

    def __post_init__(self):
        a, d = int(self.a), int(self.d)
        if d < 0:
            raise InputError(f"negative common difference {d}")
        if d == 0:
            if a < 1:
                raise InputError(f"singleton {a} is not a positive integer")
        else:
            a = (a - 1) % d + 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "d", d)

    @property
    def is_basic(self) -> bool:
        return self.d >= 1 and gcd(self.a, self.d) == 1 and is_squarefree(self.d)

    @property
    def is_almost_basic(self) -> bool:
        return self.is_basic

    @property
    def base(self) -> "Progression":
        return self

    @property
    def excluded(self) -> tuple[int, ...]:
        return ()

    @property
    def is_infinite(self) -> bool:
        return self.d > 0

    def contains(self, x: int) -> bool:
        if self.d == 0:
            return x == self.a
        return x >= self.a and (x - self.a) % self.d == 0

    __contains__ = contains

    def enumerate(self, N: int) -> list[int]:
        if self.d == 0:
            return [self.a] if self.a <= N else []
        return list(range(self.a, N + 1, self.d))

    def iter_elements(self) -> Iterator[int]:
        if self.d == 0:
            yield self.a
            return
        x = self.a
        while True:
            yield x
            x += self.d

    def pieces(self) -> list["SetExpression"]:
        return [self]

    def __str__(self):
        return f"{{{self.a}}}" if self.d == 0 else f"{self.a}+{self.d}N0"


@dataclass(frozen=True)
class AlmostBasic:
    """A basic progression with finitely many points removed."""

    base: Progression
    excluded: tuple[int, ...] = ()

    def __post_init__(self):
        if not isinstance(self.base, Progression):
            raise InputError("AlmostBasic base must be a Progression")
        if not self.base.is_basic:
            raise InputError(f"AlmostBasic base {self.base} is not basic")
        ex = tuple(sorted(set(int(x) for x in self.excluded)))
        bad = [x for x in ex if not self.base.contains(x)]
        if bad:
            raise InputError(f"excluded points {bad} are not in {self.base}")
        object.__setattr__(self, "excluded", ex)

    is_basic = False
    is_almost_basic = True
    is_infinite = True

    def contains(self, x: int) -> bool:
        return self.base.contains(x) and x not in self.excluded

    __contains__ = contains

    def enumerate(self, N: int) -> list[int]:
        ex = set(self.excluded)
        return [x for x in self.base.enumerate(N) if x not in ex]

    def iter_elements(self) -> Iterator[int]:
        ex = set(self.excluded)
        return (x for x in self.base.iter_elements() if x not in ex)

    def pieces(self) -> list["SetExpression"]:
        return [self]

    def __str__(self):
        return f"{self.base}\\{set(self.excluded)}"


@dataclass(frozen=True)
class Finite:
    """An explicit finite set of positive integers."""

    points: tuple[int, ...]

    def __post_init__(self):
        pts = tuple(sorted(set(int(x) for x in self.points)))
        if any(x < 1 for x in pts):
            raise InputError("finite set points must be positive")
        object.__setattr__(self, "points", pts)

    is_basic = False
    is_almost_basic = False
    is_infinite = False

    def contains(self, x: int) -> bool:
        return x in self.points

    __contains__ = contains

    def enumerate(self, N: int) -> list[int]:
        return [x for x in self.points if x <= N]

    def iter_elements(self) -> Iterator[int]:
        return iter(self.points)

    def pieces(self) -> list["SetExpression"]:
        return [self]

    def __str__(self):
        return "{" + ",".join(map(str, self.points)) + "}"


@dataclass(frozen=True)
class Union:
    """A finite union of set expressions (parts may overlap)."""

    parts: tuple = field(default=())

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise InputError("Union needs at least one part")
        object.__setattr__(self, "parts", parts)

    is_basic = False
    is_almost_basic = False

    @property
    def is_infinite(self) -> bool:
        return any(p.is_infinite for p in self.parts)

    def contains(self, x: int) -> bool:
        return any(p.contains(x) for p in self.parts)

    __contains__ = contains

    def enumerate(self, N: int) -> list[int]:
        out: set[int] = set()
        for p in self.parts:
            out.update(p.enumerate(N))
        return sorted(out)

    def iter_elements(self) -> Iterator[int]:
        last = None
        for x in heapq.merge(*(p.iter_elements() for p in self.parts)):
            if x != last:
                yield x
                last = x

    def pieces(self) -> list["SetExpression"]:
        out = []
        for p in self.parts:
            out.extend(p.pieces())
        return out

    def __str__(self):
        return " U ".join(f"({p})" for p in self.parts)


SetExpression = TUnion[Progression, AlmostBasic, Finite, Union]


def enumerate_window(S: SetExpression, N: int) -> list[int]:
    """S intersected with [1, N], ascending."""
    return S.enumerate(N)


def first_elements(S: SetExpression, n: int) -> list[int]:
    """The n smallest elements of S (fewer if S is finite)."""
    out = []
    if n <= 0:
        return out
    for x in S.iter_elements():
        out.append(x)
        if len(out) == n:
            break
    return out


def element_index(S: SetExpression, x: int, limit: int = 10**6) -> int:
    """1-based position of x in the increasing enumeration of S."""
    if not S.contains(x):
        raise InputError(f"{x} is not in {S}")
    for i, y in enumerate(S.iter_elements(), start=1):
        if y == x:
            return i
        if i > limit:
            break
    raise InputError(f"index of {x} exceeds {limit}")  # pragma: no cover


# -- closures and intersections ---------------------------------------------

def ac_closure(points: Iterable[int]) -> SetExpression:
    """Arithmetic convex closure: the smallest full progression holding the points."""
    pts = sorted(set(int(p) for p in points))
    if not pts:
        raise InputError("AC closure of an empty set")
    if any(p < 1 for p in pts):
        raise InputError("points must be positive integers")
    if len(pts) == 1:
        return Finite(pts)
    d = gcd_all([p - pts[0] for p in pts[1:]])
    return Progression(pts[0], d)


def intersect_progressions(progs: Sequence[Progression]) -> Optional[Progression]:
    """All common elements as one full progression, or None if disjoint."""
    if not progs:
        raise InputError("intersection of an empty list")
    if any(p.d < 1 for p in progs):
        raise InputError("intersect_progressions needs d >= 1")
    res = crt_solve([(p.a, p.d) for p in progs])
    if res is None:
        return None
    r, M = res
    return Progression(r if r else M, M)


def _intersect_prog(p: Progression, q: Progression) -> Optional[Progression | Finite]:
    if p.d == 0:
        return Finite([p.a]) if q.contains(p.a) else None
    if q.d == 0:
        return Finite([q.a]) if p.contains(q.a) else None
    return intersect_progressions([p, q])


def _with_exclusions(base, excluded) -> Optional[SetExpression]:
    if isinstance(base, Finite):
        pts = [x for x in base.points if x not in excluded]
        return Finite(pts) if pts else None
    ex = [x for x in excluded if base.contains(x)]
    if not ex:
        return base
    if base.is_basic:
        return AlmostBasic(base, ex)
    raise InputError(f"cannot represent {base} minus {ex}: base is not basic")


def intersect(S: SetExpression, T: SetExpression) -> Optional[SetExpression]:
    """Exact symbolic intersection, or None when it is empty."""
    if isinstance(S, Union) or isinstance(T, Union):
        left = S.parts if isinstance(S, Union) else (S,)
        right = T.parts if isinstance(T, Union) else (T,)
        parts = [r for a in left for b in right if (r := intersect(a, b)) is not None]
        if not parts:
            return None
        return parts[0] if len(parts) == 1 else Union(tuple(parts))
    if isinstance(S, Finite):
        pts = [x for x in S.points if T.contains(x)]
        return Finite(pts) if pts else None
    if isinstance(T, Finite):
        return intersect(T, S)
    base = _intersect_prog(S.base, T.base)
    if base is None:
        return None
    return _with_exclusions(base, set(S.excluded) | set(T.excluded))


def intersect_all(sets: Sequence[SetExpression]) -> Optional[SetExpression]:
    if not sets:
        raise InputError("intersection of an empty list")
    acc = sets[0]
    for s in sets[1:]:
        acc = intersect(acc, s)
        if acc is None:
            return None
    return acc


def union_of(sets: Sequence[SetExpression]) -> SetExpression:
    return sets[0] if len(sets) == 1 else Union(tuple(sets))


def is_subset(A: SetExpression, B: SetExpression) -> bool:
    """Exact containment test; B may be a progression, almost basic or finite set."""
    if isinstance(A, Union):
        return all(is_subset(p, B) for p in A.parts)
    if isinstance(A, Finite):
        return all(B.contains(x) for x in A.points)
    if isinstance(B, Union):
        raise InputError("containment in a union is not supported")
    if isinstance(B, Finite):
        return A.base.d == 0 and B.contains(A.base.a)
    base_a, base_b = A.base, B.base
    if base_a.d == 0:
        return B.contains(base_a.a)
    if base_b.d == 0 or base_a.d % base_b.d or not base_b.contains(base_a.a):
        return False
    return all(not base_a.contains(x) or x in A.excluded for x in B.excluded)


def meets_class(S: SetExpression, r: int, mod: int) -> bool:
    """Whether S contains some element congruent to r modulo mod."""
    if isinstance(S, Union):
        return any(meets_class(p, r, mod) for p in S.parts)
    if isinstance(S, Finite):
        return any((x - r) % mod == 0 for x in S.points)
    base = S.base
    if base.d == 0:
        return S.contains(base.a) and (base.a - r) % mod == 0
    return crt_solve([(base.a, base.d), (r, mod)]) is not None


def proximity_solve(S: SetExpression, n: int, p: int, k: int, N: int) -> list[int]:
    """All u in S with u <= N and u = n (mod p^k), found piece by piece via CRT."""
    mod = p**k
    out: set[int] = set()
    for piece in S.pieces():
        if isinstance(piece, Finite):
            out.update(x for x in piece.points if x <= N and (x - n) % mod == 0)
            continue
        base = piece.base
        if base.d == 0:
            x = base.a
            if x <= N and (x - n) % mod == 0 and piece.contains(x):
                out.add(x)
            continue
        res = crt_solve([(base.a, base.d), (n, mod)])
        if res is None:
            continue
        r, M = res
        start = r if r >= base.a else r + ((base.a - r + M - 1) // M) * M
        out.update(x for x in range(start, N + 1, M) if piece.contains(x))
    return sorted(out)


# -- covers -----------------------------------------------------------------

@dataclass(frozen=True)
class CoverClassification:
    """Nerve and shape flags of a finite cover.

    ``star_like`` is None when some piece is not almost basic. ``nest`` is
    evaluated for the given straw/core partition (by default: no straw, all
    pieces in the core, which reduces to star-likeness).
    """

    n_pieces: int
    nerve: tuple[tuple[int, int], ...]
    star_like: Optional[bool]
    tree_like: bool
    connected: bool
    nest: Optional[bool]
    straw: tuple[int, ...] = ()
    core: tuple[int, ...] = ()
    nest_failures: tuple[str, ...] = ()
    nest_window_check: Optional[bool] = None


def nerve_edges(pieces: Sequence[SetExpression]) -> list[tuple[int, int]]:
    return [
        (i, j)
        for i, j in combinations(range(len(pieces)), 2)
        if intersect(pieces[i], pieces[j]) is not None
    ]


def _is_connected(n: int, edges) -> bool:
    if n == 0:
        return True
    adj = {i: set() for i in range(n)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen, stack = {0}, [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == n


def _progression_like(piece) -> bool:
    return isinstance(piece, (Progression, AlmostBasic)) and piece.base.d >= 1


def _residues_mod(piece, p: int) -> set[int]:
    """Residues mod p taken infinitely often by an infinite progression-like piece."""
    base = piece.base
    return set(range(p)) if base.d % p else {base.a % p}


def nest_failures(
    pieces: Sequence[SetExpression], straw: Sequence[int], core: Sequence[int]
) -> list[str]:
    """Reasons the straw/core partition fails to be a nest (empty list if it is one).

    Condition 2 is decided by primes dividing every core difference: a core
    piece whose difference is prime to p meets every class mod p.
    """
    for idx in list(straw) + list(core):
        if not pieces[idx].is_almost_basic:
            raise InputError(f"piece {idx} ({pieces[idx]}) is not almost basic")
    out = []
    for i, j in combinations(core, 2):
        if intersect(pieces[i], pieces[j]) is None:
            out.append(f"core pieces {i} and {j} are disjoint")
    for i in straw:
        for j in core:
            if intersect(pieces[i], pieces[j]) is None:
                out.append(f"straw piece {i} misses core piece {j}")
    if straw and not core:
        out.append("non-empty straw with empty core")
        return out
    g = gcd_all([pieces[j].base.d for j in core])
    for p in prime_divisors(g):
        core_res = set()
        for j in core:
            core_res |= _residues_mod(pieces[j], p)
        repeated = set()
        for i in straw:
            repeated |= _residues_mod(pieces[i], p)
        missing = sorted(repeated - core_res)
        if missing:
            out.append(f"prime {p}: repeated straw residues {missing} not met by the core")
    return out


def nest_window_check(
    pieces: Sequence[SetExpression], straw: Sequence[int], core: Sequence[int], N: int = 500
) -> bool:
    """Condition 2 checked by brute force on the window [1, N]."""
    U = sorted(set().union(*[pieces[i].enumerate(N) for i in straw])) if straw else []
    V = set().union(*[pieces[j].enumerate(N) for j in core]) if core else set()
    for p in _primes_upto(N):
        counts: dict[int, int] = {}
        for x in U:
            counts[x % p] = counts.get(x % p, 0) + 1
        vres = {v % p for v in V}
        if any(c >= 2 and r not in vres for r, c in counts.items()):
            return False
    return True


def _primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(n + 1) if sieve[i]]


def classify_cover(
    pieces: Sequence[SetExpression],
    straw: Optional[Sequence[int]] = None,
    core: Optional[Sequence[int]] = None,
    spot_check_window: Optional[int] = 500,
) -> CoverClassification:
    pieces = list(pieces)
    n = len(pieces)
    edges = nerve_edges(pieces)
    connected = _is_connected(n, edges)
    tree_like = connected and len(edges) == n - 1
    all_ab = all(p.is_almost_basic for p in pieces)
    star_like = (len(edges) == n * (n - 1) // 2) if all_ab else None

    if straw is None and core is None:
        if not all_ab:
            return CoverClassification(n, tuple(edges), star_like, tree_like, connected, None)
        straw, core = (), tuple(range(n))
    straw = tuple(straw or ())
    core = tuple(core or ())
    for idx in straw + core:
        if not 0 <= idx < n:
            raise InputError(f"piece index {idx} out of range")
    fails = nest_failures(pieces, straw, core)
    window_ok = None
    if spot_check_window:
        window_ok = nest_window_check(pieces, straw, core, spot_check_window)
    return CoverClassification(
        n,
        tuple(edges),
        star_like,
        tree_like,
        connected,
        not fails,
        straw,
        core,
        tuple(fails),
        window_ok,
    )


# -- JSON -------------------------------------------------------------------

def set_to_json(S: SetExpression) -> dict:
    if isinstance(S, Progression):
        return {"kind": "progression", "a": str(S.a), "d": str(S.d)}
    if isinstance(S, AlmostBasic):
        return {
            "kind": "almost",
            "base": set_to_json(S.base),
            "excluded": [str(x) for x in S.excluded],
        }
    if isinstance(S, Finite):
        return {"kind": "finite", "points": [str(x) for x in S.points]}
    if isinstance(S, Union):
        return {"kind": "union", "parts": [set_to_json(p) for p in S.parts]}
    raise InputError(f"not a set expression: {S!r}")


def set_from_json(doc) -> SetExpression:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError(f"malformed set expression: {doc!r}")
    kind = doc["kind"]
    try:
        if kind == "progression":
            return Progression(int(doc["a"]), int(doc["d"]))
        if kind == "almost":
            base = set_from_json(doc["base"])
            return AlmostBasic(base, tuple(int(x) for x in doc.get("excluded", [])))
        if kind == "finite":
            return Finite(tuple(int(x) for x in doc["points"]))
        if kind == "union":
            return Union(tuple(set_from_json(p) for p in doc["parts"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed set expression: {doc!r}") from exc
    raise InputError(f"unknown set kind {kind!r}")
