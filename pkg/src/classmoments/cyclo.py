"""Exact arithmetic in cyclotomic fields Q(zeta_m).

An element is stored as ``(1/den) * sum(num[i] * zeta_m**i)`` with
``len(num) == phi(m)``, reduced modulo the m-th cyclotomic polynomial, so two
elements of the same conductor are equal iff their stored data are equal.
Mixed-conductor operations lift both operands to the lcm of the conductors.
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

__all__ = [
    "Cyclotomic",
    "cyclotomic_poly",
    "root_of_unity",
    "abs_square",
    "numeric",
    "is_real_times_root_of_unity",
    "real_times_root_witness",
    "reduce_power_rows",
]


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first (monic)."""
    if m < 1:
        raise ValueError(f"conductor must be positive, got {m}")
    # x^m - 1 divided by Phi_d for every proper divisor d of m
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _exact_divide(num, cyclotomic_poly(d))
    return tuple(num)


def _exact_divide(num: list[int], den: tuple[int, ...]) -> list[int]:
    num = list(num)
    dd = len(den) - 1
    q = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c:
            q[k - dd] = c
            for j, dj in enumerate(den):
                num[k - dd + j] -= c * dj
    if any(num[:dd]):
        raise ArithmeticError("cyclotomic division left a remainder")
    return q


def _reduce(poly: list[int], m: int) -> list[int]:
    """Reduce an integer polynomial in zeta_m to its canonical length-phi(m) form."""
    phi = cyclotomic_poly(m)
    deg = len(phi) - 1
    p = list(poly)
    if len(p) < deg:
        p.extend([0] * (deg - len(p)))
    for k in range(len(p) - 1, deg - 1, -1):
        c = p[k]
        if c:
            for j in range(deg):
                if phi[j]:
                    p[k - deg + j] -= c * phi[j]
    return p[:deg]


def reduce_power_rows(counts: np.ndarray, m: int) -> np.ndarray:
    """Vectorised reduction: ``counts[k]`` is the coefficient row of zeta_m**k.

    Returns the ``phi(m)`` canonical coefficient rows (integer arithmetic).
    """
    phi = cyclotomic_poly(m)
    deg = len(phi) - 1
    p = np.array(counts, dtype=np.int64, copy=True)
    if p.shape[0] < m:
        pad = np.zeros((m - p.shape[0],) + p.shape[1:], dtype=np.int64)
        p = np.concatenate([p, pad])
    for k in range(p.shape[0] - 1, deg - 1, -1):
        row = p[k]
        if row.any():
            for j in range(deg):
                if phi[j]:
                    p[k - deg + j] -= phi[j] * row
    return p[:deg]


class Cyclotomic:
    """Element of Q(zeta_m) with exact rational coefficients."""

    __slots__ = ("m", "num", "den")

    def __init__(self, m: int, num, den: int = 1, *, reduced: bool = False):
        if m < 1:
            raise ValueError(f"conductor must be positive, got {m}")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        num = [int(c) for c in num]
        if not reduced:
            num = _reduce(num, m)
        if den < 0:
            num = [-c for c in num]
            den = -den
        g = den
        for c in num:
            g = math.gcd(g, c)
            if g == 1:
                break
        if g > 1:
            num = [c // g for c in num]
            den //= g
        self.m = m
        self.num = tuple(num)
        self.den = den

    # -- constructors -------------------------------------------------
    @classmethod
    def from_rational(cls, q, m: int = 1) -> "Cyclotomic":
        q = Fraction(q)
        deg = len(cyclotomic_poly(m)) - 1
        return cls(m, [q.numerator] + [0] * (deg - 1), q.denominator, reduced=True)

    @classmethod
    def from_powers(cls, m: int, counts, den: int = 1) -> "Cyclotomic":
        """``(1/den) * sum(counts[k] * zeta_m**k)`` for a length-m count vector."""
        return cls(m, list(counts), den)

    @classmethod
    def from_fractions(cls, m: int, coeffs) -> "Cyclotomic":
        coeffs = [Fraction(c) for c in coeffs]
        den = 1
        for c in coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return cls(m, [int(c * den) for c in coeffs], den)

    # -- basic protocol -----------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def lift(self, m: int) -> "Cyclotomic":
        """Rewrite in Q(zeta_m); m must be a multiple of the current conductor."""
        if m == self.m:
            return self
        if m % self.m:
            raise ValueError(f"cannot lift conductor {self.m} to {m}")
        step = m // self.m
        poly = [0] * (step * (len(self.num) - 1) + 1)
        for i, c in enumerate(self.num):
            poly[i * step] = c
        return Cyclotomic(m, poly, self.den)

    def _coerce(self, other) -> tuple["Cyclotomic", "Cyclotomic"]:
        if isinstance(other, Cyclotomic):
            if other.m == self.m:
                return self, other
            L = self.m * other.m // math.gcd(self.m, other.m)
            return self.lift(L), other.lift(L)
        if isinstance(other, (int, Rational)):
            return self, Cyclotomic.from_rational(other, self.m)
        return NotImplemented, NotImplemented

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        den = a.den * b.den // math.gcd(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        return Cyclotomic(a.m, [x * fa + y * fb for x, y in zip(a.num, b.num)], den, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.m, [-c for c in self.num], self.den, reduced=True)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            q = Fraction(other)
            return Cyclotomic(self.m, [c * q.numerator for c in self.num], self.den * q.denominator, reduced=True)
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        prod = [0] * (2 * len(a.num) - 1)
        for i, x in enumerate(a.num):
            if x:
                for j, y in enumerate(b.num):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic(a.m, prod, a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = Cyclotomic.from_rational(1, self.m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "Cyclotomic":
        poly = [0] * self.m
        for i, c in enumerate(self.num):
            poly[(-i) % self.m] += c
        return Cyclotomic(self.m, poly, self.den)

    def __eq__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a.num == b.num and a.den == b.den

    __hash__ = None  # equality crosses conductors; no canonical hash

    def __complex__(self):
        return numeric(self)

    def __repr__(self):
        return f"Cyclotomic({self.to_text()!r})"

    # -- text serialisation ---------------------------------------------
    def to_text(self) -> str:
        """Serialise as ``"c0 + c1*z^1 + ... @ m"`` (zero terms omitted)."""
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(str(c) if i == 0 else f"{c}*z^{i}")
        return f"{' + '.join(terms) if terms else '0'} @ {self.m}"

    _TERM = re.compile(r"^\s*([-+]?\d+(?:/\d+)?)\s*(?:\*\s*z\^(\d+))?\s*$")

    @classmethod
    def from_text(cls, text: str) -> "Cyclotomic":
        body, _, m = text.rpartition("@")
        if not _:
            raise ValueError(f"missing '@ m' in {text!r}")
        m = int(m)
        poly: list[Fraction] = [Fraction(0)] * m
        for term in body.split(" + "):
            match = cls._TERM.match(term)
            if match is None:
                raise ValueError(f"bad cyclotomic term {term!r}")
            i = int(match.group(2) or 0)
            if i >= len(poly):
                poly.extend([Fraction(0)] * (i + 1 - len(poly)))
            poly[i] += Fraction(match.group(1))
        return cls.from_fractions(m, poly)


def root_of_unity(m: int, k: int = 1) -> Cyclotomic:
    """zeta_m**k in Q(zeta_m)."""
    counts = [0] * m
    counts[k % m] = 1
    return Cyclotomic(m, counts)


def abs_square(v: Cyclotomic) -> Cyclotomic:
    """v * conj(v); a totally real element."""
    return v * v.conj()


def numeric(v: Cyclotomic) -> complex:
    """Complex value; float error stays below 1e-12 for the conductors used here."""
    total = 0j
    for i, c in enumerate(v.num):
        if c:
            total += c * cmath.exp(2j * math.pi * i / v.m)
    return total / v.den


def real_times_root_witness(v: Cyclotomic) -> int | None:
    """Smallest t in [1, 2m] with v**t real, or None.

    v lies in R*(root of unity) iff such t exists: a root of unity in Q(zeta_m)
    has order dividing lcm(2, m).
    """
    if v.is_zero():
        return 1
    p = v
    for t in range(1, 2 * v.m + 1):
        if p == p.conj():
            return t
        p = p * v
    return None


def is_real_times_root_of_unity(v: Cyclotomic) -> bool:
    return real_times_root_witness(v) is not None
