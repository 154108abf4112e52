"""Partial sums of coefficient powers and log-power exponent estimates.

For coefficients with sum_{n<=x} |a(n)|^p ~ c x (log x)^(rho - 1) we estimate
rho two ways: a least-squares fit of log(S(x)/x) against log log x, and the
pole order of the truncated Dirichlet series F(1 + eps) = sum |a(n)|^p n^-(1+eps).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DomainExceeded",
    "InsufficientSpan",
    "ZeroSeries",
    "EpsilonTooSmall",
    "MomentSeries",
    "ExponentEstimate",
    "default_grid",
    "default_eps_grid",
    "squarefree_mask",
    "domain_mask",
    "partial_sums",
    "fit_log_exponent",
    "dirichlet_exponent",
]

INT_LIMIT = 1 << 62


class DomainExceeded(ValueError):
    pass


class InsufficientSpan(ValueError):
    pass


class ZeroSeries(ValueError):
    pass


class EpsilonTooSmall(ValueError):
    pass


@dataclass
class MomentSeries:
    x: list[int]
    S: list  # ints on the exact path, floats otherwise
    domain: str
    power: float | int
    source: str = ""
    exact: bool = False

    def rows(self) -> list[dict]:
        return [
            {"x": x, "S": s, "domain": self.domain, "power": self.power, "source": self.source}
            for x, s in zip(self.x, self.S)
        ]


@dataclass
class ExponentEstimate:
    rho_hat: float
    stderr: float
    method: str
    window: tuple[float, float]
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def default_grid(X: int, start: int = 1 << 14, ratio: float = math.sqrt(2)) -> list[int]:
    """Geometric checkpoints from 2^14 up to X, always ending at X."""
    grid, k = [], 0
    while True:
        x = int(round(start * ratio**k))
        if x >= X:
            break
        grid.append(x)
        k += 1
    grid.append(X)
    return grid


def squarefree_mask(lo: int, hi: int) -> np.ndarray:
    """Squarefree indicator for n in [lo, hi), by sieving out multiples of p^2."""
    mask = np.ones(hi - lo, dtype=bool)
    for p in range(2, math.isqrt(hi - 1) + 1):
        # composite p are redundant but harmless: their squares are covered by prime squares
        pp = p * p
        mask[(-lo) % pp :: pp] = False
    if lo == 0:
        mask[0] = False
    return mask


def domain_mask(lo: int, hi: int, domain: str, f: int = 1) -> np.ndarray:
    n = np.arange(lo, hi)
    if domain == "all":
        m = np.ones(hi - lo, dtype=bool)
    elif domain == "squarefree":
        m = squarefree_mask(lo, hi)
    elif domain == "coprime-f":
        m = np.gcd(n, f) == 1
    else:
        raise ValueError(f"unknown domain filter {domain!r}")
    return m & (n >= 1)


def _as_blocks(coeffs) -> Iterable[tuple[int, np.ndarray]]:
    if isinstance(coeffs, np.ndarray):
        # an array indexed by n; drop n = 0
        yield 1, coeffs[1:]
    else:
        yield from coeffs


def _integrand(vals: np.ndarray, power, signed: bool):
    """|v|^power (or v^power when signed) and whether it is exact."""
    p = Fraction(power) if not isinstance(power, float) else power
    int_power = isinstance(p, Fraction) and p.denominator == 1
    if np.issubdtype(vals.dtype, np.integer) and int_power:
        k = int(p)
        base = vals.astype(np.int64) if signed else np.abs(vals.astype(np.int64))
        if base.size and float(np.abs(base).max()) ** k >= INT_LIMIT / max(1, base.size):
            return [int(b) ** k for b in base.tolist()], True
        return base**k, True
    fp = float(power)
    if signed:
        if not int_power:
            raise ValueError("signed sums need an integer power")
        return np.real(vals.astype(complex) ** int(p)), False
    return np.abs(vals).astype(float) ** fp, False


def _segment_sum(seg, exact: bool):
    if exact:
        if isinstance(seg, list):
            return sum(seg)
        return int(seg.sum())
    return math.fsum(np.asarray(seg, dtype=float).tolist())


def partial_sums(
    coeffs,
    power=1,
    grid: Sequence[int] | None = None,
    domain: str = "all",
    f: int = 1,
    signed: bool = False,
    source: str = "",
    X: int | None = None,
) -> MomentSeries:
    """S(x) = sum over n <= x in the domain of |a(n)|^power at each checkpoint x.

    ``coeffs`` is either an array indexed by n (entry 0 ignored) or an iterable
    of consecutive blocks (lo, values) starting at n = 1.
    """
    if grid is None:
        if X is None:
            if not isinstance(coeffs, np.ndarray):
                raise ValueError("need a grid or X for block input")
            X = len(coeffs) - 1
        grid = default_grid(X)
    grid = sorted(set(int(x) for x in grid))
    if any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 1:
        raise ValueError("checkpoints must be positive and increasing")
    total, exact_all = 0, True
    out_x, out_S = [], []
    gi = 0
    covered = 0
    for lo, vals in _as_blocks(coeffs):
        if gi >= len(grid):
            break
        if lo != covered + 1:
            raise ValueError(f"blocks must be consecutive; expected {covered + 1}, got {lo}")
        hi = lo + len(vals)
        vals = np.asarray(vals)
        mask = domain_mask(lo, hi, domain, f)
        integ, exact = _integrand(vals, power, signed)
        exact_all &= exact
        if isinstance(integ, list):
            integ = [v if m else 0 for v, m in zip(integ, mask.tolist())]
        else:
            integ = np.where(mask, integ, 0)
        start = 0
        while gi < len(grid) and grid[gi] < hi:
            cut = grid[gi] - lo + 1
            total += _segment_sum(integ[start:cut], exact)
            out_x.append(grid[gi])
            out_S.append(total)
            start = cut
            gi += 1
        total += _segment_sum(integ[start:], exact)
        covered = hi - 1
    if gi < len(grid):
        raise DomainExceeded(f"coefficients end at n = {covered}, checkpoint {grid[gi]} requested")
    if not exact_all:
        out_S = [float(s) for s in out_S]
    return MomentSeries(out_x, out_S, domain, power if not isinstance(power, Fraction) else float(power), source, exact_all)


def _ols(x: np.ndarray, y: np.ndarray, extra_cols: Sequence[np.ndarray] = ()):
    A = np.column_stack([x, np.ones_like(x), *extra_cols])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = len(y) - A.shape[1]
    s2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = s2 * np.linalg.pinv(A.T @ A)
    return coef, math.sqrt(max(cov[0, 0], 0.0))


def fit_log_exponent(series: MomentSeries, min_points: int = 6, min_ratio: float = 4.0) -> ExponentEstimate:
    """Least squares of log(S(x)/x) on log log x; rho_hat = slope + 1."""
    x = np.array(series.x, dtype=float)
    S = np.array(series.S, dtype=float)
    if not np.any(S > 0):
        raise ZeroSeries("partial sums are identically zero")
    keep = S > 0
    x, S = x[keep], S[keep]
    if len(x) < min_points or x[-1] / x[0] < min_ratio:
        raise InsufficientSpan(f"{len(x)} checkpoints over a ratio of {x[-1] / x[0] if len(x) else 0:.3g}")
    coef, se = _ols(np.log(np.log(x)), np.log(S / x))
    return ExponentEstimate(float(coef[0] + 1), se, "log-fit", (float(x[0]), float(x[-1])))


def default_eps_grid(X: int, points: int = 16, eps_max: float = 1.0) -> np.ndarray:
    lo = 3 / math.log(X)
    return np.geomspace(lo, max(eps_max, lo), points)


def _power_law_tail(xs: np.ndarray, S: np.ndarray, X: int, eps: np.ndarray) -> np.ndarray:
    """sum_{n > X} of the integrand times n^-(1+eps), extrapolating S(t) = A t (log t)^r.

    A and r come from the checkpoints in [X/16, X]; with u = log t the tail is
    the integral over u > log X of A exp(-eps u) (u^r + r u^(r-1)).
    """
    L = math.log(X)
    if np.all(S > 0):
        r, logA = np.polyfit(np.log(np.log(xs)), np.log(S / xs), 1)
    else:
        r, logA = 0.0, math.log(max(S[-1], 0.0) / X) if S[-1] > 0 else -np.inf
    if not np.isfinite(logA):
        return np.zeros_like(eps)
    A = math.exp(logA)
    out = np.empty(len(eps))
    for i, e in enumerate(eps):
        u = np.linspace(L, L + 60 / e, 20001)
        g = A * np.exp(-e * u) * (u**r + r * u ** (r - 1))
        out[i] = float((g[:-1] + g[1:]).sum() / 2 * (u[1] - u[0]))
    return out


def dirichlet_exponent(
    coeffs,
    power=1,
    eps_grid: Sequence[float] | None = None,
    domain: str = "all",
    f: int = 1,
    X: int | None = None,
) -> ExponentEstimate:
    """Pole order of F(s) = sum |a(n)|^power n^-s at s = 1 from the truncated series.

    The tail beyond X is extrapolated from the growth of the partial sums near
    X, and log F = rho log(1/eps) + a + b eps + c eps^2 is fitted over the eps
    grid; the polynomial terms absorb the holomorphic factor of F at s = 1.
    """
    if isinstance(coeffs, np.ndarray):
        X = len(coeffs) - 1 if X is None else X
    if X is None:
        raise ValueError("X is required for block input")
    eps = np.asarray(default_eps_grid(X) if eps_grid is None else eps_grid, dtype=float)
    if eps.min() < 3 / math.log(X) - 1e-12:
        raise EpsilonTooSmall(f"eps = {eps.min():.4g} below 3/log X = {3 / math.log(X):.4g}")
    xs = np.unique(np.geomspace(X / 16, X, 9).astype(np.int64))
    S_at = np.zeros(len(xs))
    F = np.zeros(len(eps))
    running = 0.0
    for lo, vals in _as_blocks(coeffs):
        if lo > X:
            break
        vals = np.asarray(vals)[: X - lo + 1]
        hi = lo + len(vals)
        n = np.arange(lo, hi, dtype=float)
        mask = domain_mask(lo, hi, domain, f)
        w = np.where(mask, np.abs(vals).astype(float) ** float(power), 0.0)
        cum = running + np.cumsum(w)
        inside = (xs >= lo) & (xs < hi)
        S_at[inside] = cum[xs[inside] - lo]
        running = float(cum[-1]) if len(cum) else running
        logn = np.log(n)
        for i, e in enumerate(eps):
            F[i] += float(np.dot(w, np.exp(-(1 + e) * logn)))
    if not np.any(F > 0):
        raise ZeroSeries("Dirichlet series is identically zero")
    tail = _power_law_tail(xs.astype(float), S_at, X, eps)
    coef, se = _ols(np.log(1 / eps), np.log(F + tail), [eps, eps**2])
    return ExponentEstimate(float(coef[0]), se, "dirichlet-fit", (float(eps.min()), float(eps.max())))
