"""Exact integer linear algebra: determinants, resultants, Smith normal form.

Matrices are plain lists of row lists of Python ints.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import InputError
from .poly import IntegerPolynomial

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    if any(len(row) != inner for row in a):
        raise InputError("matrix shapes do not align")
    bt = list(zip(*b)) if b else [() for _ in range(cols)]
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Sequence[Sequence[int]]) -> Matrix:
    return [list(r) for r in zip(*a)]


def is_zero_matrix(a: Sequence[Sequence[int]]) -> bool:
    return all(x == 0 for row in a for x in row)


def det(m: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant of a square integer matrix."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    if any(len(r) != n for r in a):
        raise InputError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def rank(m: Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in m]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, rows):
            if a[i][c]:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def solve_rational(a: Sequence[Sequence[int]], b: Sequence[int]) -> Optional[list[Fraction]]:
    """One solution of a x = b over Q (free variables set to 0), or None."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [[Fraction(x) for x in a[i]] + [Fraction(b[i])] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(aug[i][cols] != 0 for i in range(r, rows)):
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = aug[i][cols]
    return x


# -- resultants -------------------------------------------------------------

def sylvester(p: IntegerPolynomial, q: IntegerPolynomial) -> Matrix:
    """Sylvester matrix with deg q shifted rows of p followed by deg p rows of q.

    Coefficients run from the leading term down, so det equals the standard
    resultant lc(p)^deg q * prod q(alpha) over roots alpha of p.
    """
    m, n = p.degree, q.degree
    size = m + n
    rows = []
    pc = list(reversed(p.coeffs))
    qc = list(reversed(q.coeffs))
    for i in range(n):
        rows.append([0] * i + pc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + qc + [0] * (size - n - 1 - i))
    return rows


def resultant(p: IntegerPolynomial, q: IntegerPolynomial) -> int:
    """Resultant with the convention res(p, q) = lc(q)^deg p * prod p(beta).

    The product runs over the roots beta of q with multiplicity. With this
    convention res(x - a, x - b) = b - a and res(p, c) = c^deg p for a
    constant c.
    """
    if p.is_zero() or q.is_zero():
        raise InputError("resultant of a zero polynomial")
    return det(sylvester(q, p))


def resultant_cofactors(p: IntegerPolynomial, q: IntegerPolynomial):
    """Return (R, s, t) with s*p + t*q = R = resultant(p, q).

    The cofactors satisfy deg s < deg q and deg t < deg p and are integral
    (they are adjugate minors of the Sylvester matrix).
    """
    R = resultant(p, q)
    m, n = p.degree, q.degree
    if m == 0 and n == 0:
        # R = 1 by convention; representable only when a constant is a unit
        if abs(p.leading) == 1:
            return R, IntegerPolynomial([p.leading]), IntegerPolynomial()
        if abs(q.leading) == 1:
            return R, IntegerPolynomial(), IntegerPolynomial([q.leading])
        raise InputError("resultant of two non-unit constants is not in their ideal")
    if R == 0:
        raise InputError("polynomials share a root; resultant is zero")
    # unknowns: s_0..s_{n-1}, t_0..t_{m-1}; equations: coefficient of x^k, k < m+n
    size = m + n
    a = zeros(size, size)
    for i in range(n):
        for k, c in enumerate(p.coeffs):
            a[i + k][i] += c
    for i in range(m):
        for k, c in enumerate(q.coeffs):
            a[i + k][n + i] += c
    rhs = [R] + [0] * (size - 1)
    sol = solve_rational(a, rhs)
    if sol is None or any(x.denominator != 1 for x in sol):
        raise InputError("resultant cofactors are not integral")  # pragma: no cover
    s = IntegerPolynomial([int(x) for x in sol[:n]])
    t = IntegerPolynomial([int(x) for x in sol[n:]])
    return R, s, t


# -- Smith normal form --------------------------------------------------------

@dataclass(frozen=True)
class SmithForm:
    """U * M * V = D with U, V unimodular; ``v_inv`` is the inverse of V."""

    D: Matrix
    U: Matrix
    V: Matrix
    v_inv: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d != 0]


def smith_normal_form(m: Sequence[Sequence[int]], cols: Optional[int] = None) -> SmithForm:
    """Smith normal form by elimination with explicit transforms.

    Pivots are chosen with minimal absolute value. ``cols`` gives the column
    count for matrices with zero rows.
    """
    a = [list(r) for r in m]
    rows = len(a)
    ncols = len(a[0]) if rows else (cols or 0)
    U = identity(rows)
    V = identity(ncols)
    Vi = identity(ncols)

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):  # row dst += q * row src
        if q:
            a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
            U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col dst += q * col src
        if q:
            for row in a:
                row[dst] += q * row[src]
            for row in V:
                row[dst] += q * row[src]
            # inverse transform: row src of V^-1 -= q * row dst
            Vi[src] = [x - q * y for x, y in zip(Vi[src], Vi[dst])]

    t = 0
    while t < min(rows, ncols):
        best = None
        for i in range(t, rows):
            for j in range(t, ncols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, ncols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    if a[t][j]:
                        clean = False
            if not clean:
                cand = [(abs(a[i][t]), i, t) for i in range(t + 1, rows) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, ncols) if a[t][j]]
                _, i, j = min(cand)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, ncols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return SmithForm(a, U, V, Vi)


def solve_integer(m: Sequence[Sequence[int]], b: Sequence[int], cols: Optional[int] = None):
    """Integer solution of m x = b via the Smith form, or None.

    Returns ``(x, snf, obstruction)``; when no solution exists ``x`` is None and
    ``obstruction`` is ``(row, modulus)``: an integer row vector psi with
    psi*m = 0 (mod modulus) but psi*b != 0 (mod modulus); modulus 0 means the
    equality psi*m = 0 holds exactly.
    """
    snf = smith_normal_form(m, cols=cols)
    ub = matvec(snf.U, b)
    diag = snf.diagonal
    ncols = len(snf.V)
    y = [0] * ncols
    for i, val in enumerate(ub):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if val != 0:
                return None, snf, (snf.U[i], 0)
        elif val % d:
            return None, snf, (snf.U[i], d)
        else:
            y[i] = val // d
    x = matvec(snf.V, y)
    return x, snf, None
