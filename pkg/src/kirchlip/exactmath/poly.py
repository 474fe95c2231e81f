"""Dense univariate polynomials over the integers and the rationals.

Coefficients are stored in ascending degree order; the zero polynomial has
an empty coefficient tuple. Both classes are immutable and hashable.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from ..errors import InputError


def _strip(coeffs: list) -> tuple:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class _Poly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _strip([self._coerce(c) for c in coeffs]))

    def __setattr__(self, name, value):
        raise AttributeError("polynomials are immutable")

    @staticmethod
    def _coerce(c):
        raise NotImplementedError

    # -- basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, _Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _strip([other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"{type(self).__name__}({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                cs = f"({c})" if isinstance(c, Fraction) and c.denominator != 1 else str(c)
                terms.append(cs + ("*" + mono if mono else ""))
        return " + ".join(terms).replace("+ -", "- ")

    # -- arithmetic -------------------------------------------------------
    def _result_type(self, other):
        if isinstance(self, RationalPolynomial) or isinstance(other, RationalPolynomial):
            return RationalPolynomial
        if isinstance(other, Fraction) and other.denominator != 1:
            return RationalPolynomial
        return type(self)

    def _lift(self, other):
        if isinstance(other, _Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return self._result_type(other)([other])
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        n = max(len(a), len(b))
        out = [(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)]
        return self._result_type(o)(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._result_type(other)([c * other for c in self.coeffs])
        if not isinstance(other, _Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return self._result_type(other)()
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return self._result_type(other)(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise InputError("negative exponent")
        result = type(self)([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod_by_monic(self, divisor: "_Poly"):
        """Quotient and remainder by a monic divisor (exact over the integers)."""
        if divisor.leading != 1:
            raise InputError("divisor must be monic")
        rem = list(self.coeffs)
        dd = divisor.degree
        if len(rem) - 1 < dd:
            return type(self)(), self
        quot = [0] * (len(rem) - dd)
        dc = divisor.coeffs
        for k in range(len(rem) - 1, dd - 1, -1):
            q = rem[k]
            if q == 0:
                continue
            quot[k - dd] = q
            for t in range(dd + 1):
                rem[k - dd + t] -= q * dc[t]
        return type(self)(quot), type(self)(rem[:dd])

    def exact_div(self, divisor: "_Poly"):
        """Divide by a monic polynomial, raising if the remainder is nonzero."""
        q, r = self.divmod_by_monic(divisor)
        if r:
            raise InputError("polynomial division is not exact")
        return q

    def div_linear(self, c):
        """Synthetic division by (x - c): returns (quotient, remainder)."""
        if not self.coeffs:
            return type(self)(), 0
        out = []
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * c + a
            out.append(acc)
        rem = out.pop()
        return type(self)(reversed(out)), rem

    def difference_quotient(self, c):
        """(p(x) - p(c)) / (x - c), always a polynomial."""
        return self.div_linear(c)[0]

    def derivative(self):
        return type(self)([k * self.coeffs[k] for k in range(1, len(self.coeffs))])


class IntegerPolynomial(_Poly):
    """Polynomial in Z[x]."""

    __slots__ = ()

    @staticmethod
    def _coerce(c):
        if isinstance(c, bool):
            return int(c)
        if isinstance(c, int):
            return c
        if isinstance(c, Fraction) and c.denominator == 1:
            return c.numerator
        if isinstance(c, Rational) and c.denominator == 1:
            return int(c.numerator)
        raise InputError(f"non-integer coefficient {c!r}")

    @classmethod
    def x(cls) -> "IntegerPolynomial":
        return cls([0, 1])

    @classmethod
    def constant(cls, c: int) -> "IntegerPolynomial":
        return cls([c])

    @classmethod
    def split(cls, roots: Iterable[int]) -> "IntegerPolynomial":
        """The monic split polynomial prod (x - a) over the given roots."""
        out = [1]
        for a in roots:
            nxt = [0] * (len(out) + 1)
            for k, c in enumerate(out):
                nxt[k + 1] += c
                nxt[k] -= a * c
            out = nxt
        return cls(out)

    def content(self) -> int:
        from math import gcd

        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def mod_monic(self, divisor: "IntegerPolynomial") -> "IntegerPolynomial":
        return self.divmod_by_monic(divisor)[1]

    def to_rational(self) -> "RationalPolynomial":
        return RationalPolynomial(self.coeffs)


class RationalPolynomial(_Poly):
    """Polynomial in Q[x] with coefficients kept in lowest terms."""

    __slots__ = ()

    @staticmethod
    def _coerce(c):
        if isinstance(c, Fraction):
            return c
        if isinstance(c, (int, Rational)):
            return Fraction(c)
        if isinstance(c, str):
            return Fraction(c)
        raise InputError(f"non-rational coefficient {c!r}")

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def to_integer(self) -> IntegerPolynomial:
        if not self.is_integral:
            raise InputError("polynomial has non-integral coefficients")
        return IntegerPolynomial([c.numerator for c in self.coeffs])

    def denominator(self) -> int:
        from math import lcm

        d = 1
        for c in self.coeffs:
            d = lcm(d, c.denominator)
        return d


def split(roots: Sequence[int]) -> IntegerPolynomial:
    """Shorthand for :meth:`IntegerPolynomial.split`."""
    return IntegerPolynomial.split(roots)
