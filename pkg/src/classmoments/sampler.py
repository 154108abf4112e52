"""Synthetic Chebotarev coefficient streams on squarefree integers.

Each prime p <= X gets an i.i.d. conjugacy class of G drawn with weight
|C|/|G|.  For squarefree n the coefficient of an induced character is the
product of its values at the classes of the prime factors of n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .chartheory import DualCharacter, GaloisFrame, _representatives, dual_group, induce
from .cyclo import numeric

__all__ = [
    "CrossCheckMismatch",
    "FrobeniusAssignment",
    "BLOCK",
    "prime_sieve",
    "assign",
    "class_count_blocks",
    "synthetic_char_coeffs",
    "synthetic_class_coeffs",
    "synthetic_cusp_coeffs",
    "coset_counts",
    "collect",
]

BLOCK = 1 << 20
MAX_X = 10**8


class CrossCheckMismatch(AssertionError):
    pass


def prime_sieve(X: int) -> np.ndarray:
    """Primes <= X (Eratosthenes)."""
    if X < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(X + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, int(X**0.5) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p)


@dataclass
class FrobeniusAssignment:
    frame: GaloisFrame
    X: int
    seed: int
    primes: np.ndarray
    class_of: np.ndarray  # class index for primes, -1 elsewhere; length X + 1

    def classes(self) -> np.ndarray:
        return self.class_of[self.primes]


def assign(frame: GaloisFrame, X: int, seed: int) -> FrobeniusAssignment:
    if X > MAX_X:
        raise ValueError(f"X = {X} above {MAX_X}")
    primes = prime_sieve(X)
    weights = np.array(frame.class_sizes, dtype=float) / frame.G.order
    rng = np.random.default_rng(seed)
    drawn = rng.choice(len(weights), size=len(primes), p=weights)
    class_of = np.full(X + 1, -1, dtype=np.int16)
    class_of[primes] = drawn
    return FrobeniusAssignment(frame, X, seed, primes, class_of)


def class_count_blocks(asg: FrobeniusAssignment, block: int = BLOCK) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield (lo, counts, squarefree) for n in [lo, lo + len).

    ``counts[c, i]`` is the number of prime factors of lo + i whose class is c.
    """
    nclass = len(asg.frame.classes)
    small = asg.primes[asg.primes * asg.primes <= asg.X]
    for lo in range(1, asg.X + 1, block):
        hi = min(lo + block, asg.X + 1)
        rem = np.arange(lo, hi, dtype=np.int64)
        counts = np.zeros((nclass, hi - lo), dtype=np.int8)
        sqfree = np.ones(hi - lo, dtype=bool)
        for p in small:
            p = int(p)
            if p * p >= hi and p >= hi:
                break
            start = (-lo) % p
            rem[start::p] //= p
            counts[asg.class_of[p], start::p] += 1
            pp = p * p
            sqfree[(-lo) % pp :: pp] = False
        big = sqfree & (rem > 1)
        np.add.at(counts, (asg.class_of[rem[big]], np.flatnonzero(big)), 1)
        yield lo, counts, sqfree


def _stream(asg: FrobeniusAssignment, values: Sequence[complex], block: int):
    """Products of per-class prime values over the squarefree n, blockwise."""
    vals = np.asarray(values, dtype=complex)
    integral = np.allclose(vals.imag, 0) and np.allclose(vals.real, np.round(vals.real))
    for lo, counts, sqfree in class_count_blocks(asg, block):
        if integral:
            iv = np.round(vals.real).astype(np.int64)
            out = np.ones(counts.shape[1], dtype=np.int64)
            for c, v in enumerate(iv):
                if v != 1:
                    out *= v ** counts[c].astype(np.int64)
        else:
            out = np.ones(counts.shape[1], dtype=complex)
            for c, v in enumerate(vals):
                if v != 1:
                    out *= v ** counts[c]
        out[~sqfree] = 0
        yield lo, out


def synthetic_char_coeffs(asg: FrobeniusAssignment, chi: DualCharacter, block: int = BLOCK):
    """Blocks (lo, a(chi, n)) with a(chi, n) = prod_{p | n} chi~^ind(class(p)), zero off squarefree n."""
    ind = induce(asg.frame, chi)
    return _stream(asg, [numeric(v) for v in ind.values], block)


def coset_counts(frame: GaloisFrame) -> np.ndarray:
    """M[c, s] = #{gH : g^-1 c g in H with image the s-th element of N}, c a class representative."""
    G = frame.G
    vecs = frame.N.vectors()
    pos = {v: i for i, v in enumerate(vecs)}
    M = np.zeros((len(frame.classes), len(vecs)), dtype=np.int64)
    for ci, cls in enumerate(frame.classes):
        for g in frame.q_lifts:
            x = G.conjugate(cls.representative, g)
            if x in frame.H:
                M[ci, pos[frame.to_n[x]]] += 1
    return M


def _char_sum_prime_table(frame: GaloisFrame) -> np.ndarray:
    """(1/|N|) sum_chi conj(chi(sigma)) chi~^ind(c), rounded; checked against coset counts."""
    vecs = frame.N.vectors()
    chars = dual_group(frame)
    T = np.zeros((len(frame.classes), len(vecs)), dtype=complex)
    for chi in chars:
        ind = np.array([numeric(v) for v in induce(frame, chi).values])
        conj_vals = np.array([numeric(chi.value(s)).conjugate() for s in vecs])
        T += np.outer(ind, conj_vals)
    T /= len(chars)
    R = np.round(T.real).astype(np.int64)
    if np.abs(T - R).max() > 1e-6:
        raise CrossCheckMismatch("character sum is not integral at a prime")
    if not np.array_equal(R, coset_counts(frame)):
        raise CrossCheckMismatch("character sum disagrees with the coset count")
    return R


def synthetic_class_coeffs(asg: FrobeniusAssignment, sigma: Sequence[int], block: int = BLOCK):
    """Blocks (lo, a(sigma, n)) as integers, via the character-sum route.

    The prime values are cross-checked against a direct coset count for every class.
    """
    frame = asg.frame
    _char_sum_prime_table(frame)
    chars = dual_group(frame)
    weights = [numeric(chi.value(sigma)).conjugate() / len(chars) for chi in chars]
    streams = [synthetic_char_coeffs(asg, chi, block) for chi in chars]
    for parts in zip(*streams):
        lo = parts[0][0]
        total = sum(w * np.asarray(p[1], dtype=complex) for w, p in zip(weights, parts))
        out = np.round(total.real).astype(np.int64)
        if np.abs(total - out).max() > 1e-6:
            raise CrossCheckMismatch("a(sigma, n) is not integral")
        yield lo, out


def synthetic_cusp_coeffs(asg: FrobeniusAssignment, sigma: Sequence[int], block: int = BLOCK):
    """Blocks of (1/|N|) sum_i conj(chi_i^ind(sigma)) a(chi_i, n) over orbit representatives."""
    frame = asg.frame
    reps = _representatives(frame)
    c = frame.class_of_vector(sigma)
    weights = [numeric(induce(frame, chi).values[c]).conjugate() / frame.N.order for chi in reps]
    streams = [synthetic_char_coeffs(asg, chi, block) for chi in reps]
    for parts in zip(*streams):
        lo = parts[0][0]
        yield lo, sum(w * np.asarray(p[1], dtype=complex) for w, p in zip(weights, parts))


def collect(blocks) -> np.ndarray:
    """Concatenate a block stream into one array indexed by n (index 0 is zero)."""
    arrays = [np.zeros(1, dtype=np.int64)]
    for _, vals in blocks:
        arrays.append(vals)
    return np.concatenate(arrays)
