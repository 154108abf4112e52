"""Imaginary quadratic orders: reduced forms, composition, and ideal-class counting tables.

Ideal counts a(sigma, n) are obtained from representation numbers of the
reduced form g_sigma: a(sigma, n) = r_g(n) / w for gcd(n, f) = 1.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .chartheory import DualCharacter, GaloisFrame, dual_group, semidirect_frame
from .cyclo import reduce_power_rows
from .permgroup import decompose_abelian

__all__ = [
    "NonIntegral",
    "NonIntegralWeightOffset",
    "QuadDiscriminant",
    "QuadForm",
    "FormClassGroup",
    "CoefficientTable",
    "CyclotomicArray",
    "ScaledArray",
    "is_fundamental",
    "fundamental_discriminants",
    "reduce_form",
    "enumerate_reduced",
    "compose",
    "count_representations",
    "ideal_class_counts",
    "char_coefficients",
    "cusp_coefficients",
    "eta_product_coeffs",
    "kronecker",
    "kronecker_divisor_sums",
    "write_table",
    "read_table",
    "export_csv",
    "quadratic_frame",
]

CELL_GUARD = 10**8


class NonIntegral(ArithmeticError):
    pass


class NonIntegralWeightOffset(ValueError):
    pass


def _squarefree(n: int) -> bool:
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def is_fundamental(D: int) -> bool:
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def fundamental_discriminants(bound: int) -> list[int]:
    """Negative fundamental discriminants D with |D| <= bound, in decreasing order."""
    return [D for D in range(-3, -bound - 1, -1) if is_fundamental(D)]


@dataclass(frozen=True)
class QuadDiscriminant:
    D: int

    def __post_init__(self):
        if self.D >= 0 or self.D % 4 not in (0, 1):
            raise ValueError(f"{self.D} is not a negative discriminant")

    @cached_property
    def _split(self) -> tuple[int, int]:
        f = math.isqrt(-self.D)
        while f >= 1:
            if self.D % (f * f) == 0 and is_fundamental(self.D // (f * f)):
                return self.D // (f * f), f
            f -= 1
        raise ValueError(f"no fundamental part for {self.D}")

    @property
    def D0(self) -> int:
        return self._split[0]

    @property
    def f(self) -> int:
        return self._split[1]

    @property
    def w(self) -> int:
        return {-3: 6, -4: 4}.get(self.D, 2)


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self
        if not (abs(b) <= a <= c):
            return False
        return b >= 0 or (abs(b) != a and a != c)

    def inverse(self) -> "QuadForm":
        return reduce_form(QuadForm(self.a, -self.b, self.c))

    def __call__(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y


def reduce_form(g: Sequence[int]) -> QuadForm:
    """Unique reduced form equivalent to the positive definite form g."""
    a, b, c = (int(t) for t in g)
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError(f"{tuple(g)} is not positive definite")
    while True:
        r = b % (2 * a)
        if r > a:
            r -= 2 * a
        k = (r - b) // (2 * a)
        c = a * k * k + b * k + c
        b = r
        if c < a:
            a, b, c = c, -b, a
            continue
        break
    if (a == c or b == -a) and b < 0:
        b = -b
    return QuadForm(a, b, c)


def enumerate_reduced(D: int) -> list[QuadForm]:
    """Reduced primitive forms of discriminant D, sorted by (a, b, c)."""
    QuadDiscriminant(D)
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            g = QuadForm(a, b, c)
            if g.is_reduced() and math.gcd(a, b, c) == 1:
                out.append(g)
    return sorted(out)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(u, v, d) with u*a + v*b = d = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -x0, -y0, -a
    return x0, y0, a


def compose(g1: Sequence[int], g2: Sequence[int]) -> QuadForm:
    """Gaussian composition of primitive forms of equal discriminant (Cohen, Alg. 5.4.7)."""
    a1, b1, c1 = g1
    a2, b2, c2 = g2
    if b1 * b1 - 4 * a1 * c1 != b2 * b2 - 4 * a2 * c2:
        raise ValueError("forms have different discriminants")
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        y1, _, d = _xgcd(a2, a1)
    if s % d == 0:
        x2, y2, d1 = 0, -1, d
    else:
        x2, v, d1 = _xgcd(s, d)
        y2 = -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return reduce_form((a3, b3, c3))


class FormClassGroup:
    """Reduced forms of discriminant D under composition."""

    def __init__(self, D: int):
        self.disc = QuadDiscriminant(D)
        self.forms = enumerate_reduced(D)
        self.index = {g: i for i, g in enumerate(self.forms)}
        h = len(self.forms)
        self.table = np.array(
            [[self.index[compose(g1, g2)] for g2 in self.forms] for g1 in self.forms], dtype=np.int64
        ).reshape(h, h)
        principal = reduce_form((1, D % 2, (D % 2 - D) // 4))
        self.identity = self.index[principal]
        self.structure, self.coords = decompose_abelian(
            range(h), lambda i, j: int(self.table[i, j]), self.identity
        )
        self.form_of = {v: i for i, v in self.coords.items()}

    @property
    def D(self) -> int:
        return self.disc.D

    @property
    def h(self) -> int:
        return len(self.forms)

    def inverse_index(self, i: int) -> int:
        return self.index[self.forms[i].inverse()]

    def __repr__(self):
        return f"FormClassGroup(D={self.D}, h={self.h}, structure={self.structure.factors})"


def quadratic_frame(cg: FormClassGroup) -> GaloisFrame:
    """Ring class field frame: N = class group, Q = C2 acting by inversion."""
    A = cg.structure
    return semidirect_frame(A, A.neg, 2, name=f"quad:{cg.D}")


def count_representations(g: Sequence[int], X: int) -> np.ndarray:
    """r_g(n) = #{(x, y) : g(x, y) = n} for 0 <= n <= X (index 0 is set to 0)."""
    a, b, c = (int(t) for t in g)
    D = b * b - 4 * a * c
    ymax = math.isqrt(4 * a * X // -D) + 1
    ys = np.arange(-ymax, ymax + 1, dtype=np.int64)
    # a x^2 + b y x + c y^2 <= X  <=>  (2 a x + b y)^2 <= 4 a X + D y^2
    rad = 4 * a * X + D * ys * ys
    keep = rad >= 0
    ys, rad = ys[keep], rad[keep]
    root = np.sqrt(rad.astype(np.float64))
    lo = np.floor((-b * ys - root) / (2 * a)).astype(np.int64) - 1
    hi = np.ceil((-b * ys + root) / (2 * a)).astype(np.int64) + 1
    # flatten all (x, y) candidates into one batch
    lens = hi - lo + 1
    yy = np.repeat(ys, lens)
    starts = np.repeat(lo - np.concatenate([[0], np.cumsum(lens)[:-1]]), lens)
    xs = starts + np.arange(int(lens.sum()), dtype=np.int64)
    vals = a * xs * xs + b * yy * xs + c * yy * yy
    vals = vals[vals <= X]
    counts = np.bincount(vals, minlength=X + 1).astype(np.int64)
    counts[0] = 0
    return counts


@dataclass
class CoefficientTable:
    """a(sigma, n) and r_g(n) for every reduced form, 0 <= n <= X (index 0 unused)."""

    cg: FormClassGroup
    X: int
    counts: np.ndarray  # (h, X+1), zero off the domain
    r: np.ndarray  # (h, X+1)
    domain: np.ndarray = field(repr=False)  # gcd(n, f) == 1, n >= 1

    @property
    def h(self) -> int:
        return self.cg.h

    def total(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def _domain_mask(X: int, f: int) -> np.ndarray:
    n = np.arange(X + 1)
    return (np.gcd(n, f) == 1) & (n >= 1)


def ideal_class_counts(cg: FormClassGroup | int, X: int) -> CoefficientTable:
    if isinstance(cg, int):
        cg = FormClassGroup(cg)
    if cg.h * (X + 1) > CELL_GUARD:
        raise MemoryError(f"table of {cg.h} x {X + 1} cells exceeds the guard {CELL_GUARD}")
    w = cg.disc.w
    r = np.stack([count_representations(g, X) for g in cg.forms])
    domain = _domain_mask(X, cg.disc.f)
    if (r[:, domain] % w).any():
        raise NonIntegral(f"r_g(n) not divisible by w = {w} for D = {cg.D}")
    counts = np.where(domain, r // w, 0)
    return CoefficientTable(cg, X, counts, r, domain)


@dataclass
class CyclotomicArray:
    """Array of elements of Q(zeta_m): ``rows[i][n]`` is the coefficient of zeta_m**i."""

    m: int
    rows: np.ndarray

    def is_rational(self) -> bool:
        return not self.rows[1:].any()

    def to_int(self) -> np.ndarray:
        if not self.is_rational():
            raise ValueError("array has irrational entries")
        return self.rows[0].copy()

    def to_complex(self) -> np.ndarray:
        z = np.exp(2j * np.pi * np.arange(self.rows.shape[0]) / self.m)
        return z @ self.rows

    def to_float(self) -> np.ndarray:
        return self.to_complex().real

    def __getitem__(self, n: int):
        from .cyclo import Cyclotomic

        return Cyclotomic(self.m, [int(v) for v in self.rows[:, n]], reduced=True)


@dataclass
class ScaledArray:
    """Rational array num / den."""

    num: np.ndarray
    den: int

    def to_float(self) -> np.ndarray:
        return self.num / self.den


def _sigma_power_counts(table: CoefficientTable, chi: DualCharacter) -> np.ndarray:
    E = chi.N.exponent
    S = np.zeros((E, table.X + 1), dtype=np.int64)
    for i in range(table.h):
        S[chi.power_index(table.cg.coords[i])] += table.counts[i]
    return S


def char_coefficients(table: CoefficientTable, chi: DualCharacter) -> CyclotomicArray:
    """a(chi, n) = sum_sigma chi(sigma) a(sigma, n), exactly."""
    S = _sigma_power_counts(table, chi)
    E = S.shape[0]
    if not np.array_equal(S, S[(-np.arange(E)) % E]):
        raise NonIntegral("a(chi, n) is not real")
    return CyclotomicArray(E, reduce_power_rows(S, E))


def cusp_coefficients(table: CoefficientTable, sigma: int) -> ScaledArray:
    """a(sigma, n) with the real-character part removed; ``sigma`` is a form index."""
    cg = table.cg
    vec = cg.coords[sigma]
    num = cg.h * table.counts[sigma].astype(np.int64)
    for chi in dual_group(cg.structure):
        if chi.is_real:
            sign = 1 if chi.power_index(vec) == 0 else -1
            num -= sign * char_coefficients(table, chi).to_int()
    return ScaledArray(num, cg.h)


def _pentagonal(X: int) -> tuple[np.ndarray, np.ndarray]:
    """Exponents and signs of prod (1 - q^n) = sum (-1)^k q^{k(3k-1)/2} up to q^X."""
    exps, signs = [0], [1]
    k = 1
    while k * (3 * k - 1) // 2 <= X:
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e <= X:
                exps.append(e)
                signs.append(-1 if k % 2 else 1)
        k += 1
    return np.array(exps), np.array(signs)


def eta_product_coeffs(levels: Sequence[tuple[int, int]], X: int) -> np.ndarray:
    """Coefficients c[0..X] of prod_m eta(m z)^e as a q-series."""
    if X > 10**7:
        raise ValueError("X above 10^7")
    offset24 = sum(m * e for m, e in levels)
    if offset24 % 24:
        raise NonIntegralWeightOffset(f"q-offset {offset24}/24 is not an integer")
    offset = offset24 // 24
    out = np.zeros(X + 1, dtype=np.int64)
    L = X - offset
    if L < 0:
        return out
    series = np.zeros(L + 1, dtype=np.int64)
    series[0] = 1
    for m, e in levels:
        if e < 1:
            raise ValueError("exponents must be positive")
        exps, signs = _pentagonal(L // m)
        for _ in range(e):
            new = np.zeros_like(series)
            for p, s in zip(exps * m, signs):
                new[p:] += s * series[: L + 1 - p]
            series = new
    out[offset:] = series
    return out


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D / n) for n >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D / n), n odd
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker_divisor_sums(D: int, X: int) -> np.ndarray:
    """sum_{d | n} (D / d) for 0 <= n <= X, via a divisor sieve (index 0 unused)."""
    period = abs(D)
    base = np.array([0] + [kronecker(D, d) for d in range(1, period + 1)], dtype=np.int64)
    chi = base[((np.arange(X + 1) - 1) % period) + 1]
    out = np.zeros(X + 1, dtype=np.int64)
    for d in range(1, X + 1):
        if chi[d]:
            out[d::d] += chi[d]
    out[0] = 0
    return out


_HEADER = struct.Struct("<5q")


def write_table(table: CoefficientTable, path: str | Path) -> None:
    """Header (D, X, h, f, w) then h rows of X little-endian uint32 counts for n = 1..X."""
    d = table.cg.disc
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(d.D, table.X, table.h, d.f, d.w))
        fh.write(table.counts[:, 1:].astype("<u4").tobytes())


def read_table(path: str | Path) -> tuple[dict, np.ndarray]:
    raw = Path(path).read_bytes()
    D, X, h, f, w = _HEADER.unpack_from(raw)
    data = np.frombuffer(raw, dtype="<u4", offset=_HEADER.size).reshape(h, X)
    counts = np.zeros((h, X + 1), dtype=np.int64)
    counts[:, 1:] = data
    return {"D": D, "X": X, "h": h, "f": f, "w": w}, counts


def export_csv(table: CoefficientTable, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["n", "in_domain"] + [f"{a}_{b}_{c}" for a, b, c in table.cg.forms])
        for n in range(1, table.X + 1):
            wr.writerow([n, int(table.domain[n])] + [int(v) for v in table.counts[:, n]])
