"""Finite permutation groups: closure, conjugacy classes, subgroups, abelian quotients.

Permutations act on the points ``0..n-1``. Products compose left to right:
``(a * b)(i) == b(a(i))``, so conjugation is ``x ** g == g^-1 * x * g``.
Groups are stored as a deterministic element list (breadth-first from the
generators, each layer sorted lexicographically); elements are referred to by
their index in that list, the identity always being index 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

__all__ = [
    "GroupError",
    "OrderBound",
    "DegreeMismatch",
    "NotClosed",
    "NotNormal",
    "NotAbelian",
    "Permutation",
    "FiniteGroup",
    "Subgroup",
    "ConjugacyClass",
    "AbelianStructure",
    "closure",
    "conjugacy_classes",
    "subgroup_from_predicate",
    "subgroup_generated",
    "stabilizer",
    "trivial_subgroup",
    "quotient_abelian",
    "decompose_abelian",
    "smith_normal_form",
]

ORDER_GUARD = 100_000


class GroupError(ValueError):
    pass


class OrderBound(GroupError):
    pass


class DegreeMismatch(GroupError):
    pass


class NotClosed(GroupError):
    pass


class NotNormal(GroupError):
    pass


class NotAbelian(GroupError):
    pass


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(i) for i in self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation of 0..{len(self.images) - 1}: {self.images}")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int, offset: int = 0) -> "Permutation":
        """Build from cycle notation; ``offset=1`` reads 1-indexed cycles."""
        img = list(range(degree))
        for cyc in cycles:
            pts = [p - offset for p in cyc]
            for a, b in zip(pts, pts[1:] + pts[:1]):
                img[a] = b
        return cls(tuple(img))

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.degree != self.degree:
            raise DegreeMismatch(f"degrees {self.degree} and {other.degree}")
        return Permutation(tuple(other.images[i] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cyc, p = [], start
            while p not in seen:
                seen.add(p)
                cyc.append(p)
                p = self.images[p]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return math.lcm(1, *(len(c) for c in self.cycles()))


def _compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(b[i] for i in a)


class FiniteGroup:
    """A permutation group with an explicit, deterministically ordered element list."""

    def __init__(self, degree: int, elements: Sequence[tuple[int, ...]], generators: Sequence[int]):
        self.degree = degree
        self.elements = [Permutation(e) for e in elements]
        self.generators = list(generators)
        self.index = {e.images: i for i, e in enumerate(self.elements)}
        self.id = self.index[tuple(range(degree))]

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"FiniteGroup(degree={self.degree}, order={self.order})"

    @cached_property
    def image_array(self) -> np.ndarray:
        return np.array([e.images for e in self.elements], dtype=np.int64)

    def _lookup_rows(self, rows: np.ndarray) -> np.ndarray:
        d = self.degree
        if d <= 16:
            radix = np.array([d**i for i in range(d)], dtype=np.uint64)
            keys = rows.astype(np.uint64) @ radix
            pos = np.searchsorted(self._sorted_keys, keys)
            return self._key_order[pos]
        return np.array([self.index[tuple(r)] for r in rows.tolist()], dtype=np.int64)

    @cached_property
    def _key_data(self):
        d = self.degree
        radix = np.array([d**i for i in range(d)], dtype=np.uint64)
        keys = self.image_array.astype(np.uint64) @ radix
        order = np.argsort(keys, kind="stable")
        return keys[order], order

    @property
    def _sorted_keys(self):
        return self._key_data[0]

    @property
    def _key_order(self):
        return self._key_data[1]

    @cached_property
    def mul(self) -> np.ndarray:
        """Multiplication table, ``mul[a, b] == index(a * b)``."""
        n = self.order
        if n > 5000:
            raise OrderBound(f"multiplication table for order {n} is too large")
        E = self.image_array
        table = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            table[a] = self._lookup_rows(E[:, E[a]])
        return table

    @cached_property
    def inv(self) -> np.ndarray:
        return np.argmax(self.mul == self.id, axis=1)

    def product(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def conjugate(self, x: int, g: int) -> int:
        """Index of g^-1 x g."""
        return int(self.mul[self.mul[self.inv[g], x], g])

    @cached_property
    def classes(self) -> list["ConjugacyClass"]:
        return conjugacy_classes(self)

    @cached_property
    def class_of(self) -> np.ndarray:
        out = np.empty(self.order, dtype=np.int64)
        for c, cls in enumerate(self.classes):
            out[list(cls.members)] = c
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.id:
            x = int(self.mul[x, a])
            k += 1
        return k


def closure(generators: Sequence[Permutation], guard: int = ORDER_GUARD) -> FiniteGroup:
    """Generate the group; raises OrderBound beyond ``guard`` elements."""
    gens = [g if isinstance(g, Permutation) else Permutation(tuple(g)) for g in generators]
    if not gens:
        raise ValueError("need at least one generator (use the identity for the trivial group)")
    degree = gens[0].degree
    if any(g.degree != degree for g in gens):
        raise DegreeMismatch("generators have different degrees")
    gen_images = [g.images for g in gens]
    ident = tuple(range(degree))
    seen = {ident}
    ordered = [ident]
    layer = [ident]
    while layer:
        nxt = set()
        for x in layer:
            for g in gen_images:
                y = _compose(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.add(y)
        layer = sorted(nxt)
        ordered.extend(layer)
        if len(ordered) > guard:
            raise OrderBound(f"group order exceeds guard {guard}")
    idx = {e: i for i, e in enumerate(ordered)}
    return FiniteGroup(degree, ordered, [idx[g] for g in gen_images])


@dataclass(frozen=True)
class ConjugacyClass:
    representative: int
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def conjugacy_classes(G: FiniteGroup) -> list[ConjugacyClass]:
    """Classes by direct orbit expansion, ordered by their minimal element index."""
    n = G.order
    assigned = np.full(n, False)
    everything = np.arange(n)
    out = []
    for x in range(n):
        if assigned[x]:
            continue
        # g^-1 x g for all g at once
        orbit = np.unique(G.mul[G.mul[G.inv, x], everything])
        assigned[orbit] = True
        out.append(ConjugacyClass(int(orbit[0]), tuple(int(i) for i in orbit)))
    return out


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]
    memberset: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(int(m) for m in self.members)))
        object.__setattr__(self, "memberset", frozenset(self.members))

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def __contains__(self, g: int) -> bool:
        return g in self.memberset

    def is_normal_in(self, ambient: "Subgroup | FiniteGroup") -> bool:
        G = self.parent
        others = ambient.members if isinstance(ambient, Subgroup) else range(G.order)
        mine = np.array(self.members)
        for g in others:
            conj = G.mul[G.mul[G.inv[g], mine], g]
            if not all(int(c) in self.memberset for c in conj):
                return False
        return True

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return self.memberset <= other.memberset

    def left_cosets(self) -> list[tuple[int, ...]]:
        """Cosets gH, each sorted, ordered by minimal element."""
        G = self.parent
        mine = np.array(self.members)
        seen = np.full(G.order, False)
        out = []
        for g in range(G.order):
            if seen[g]:
                continue
            coset = np.unique(G.mul[g, mine])
            seen[coset] = True
            out.append(tuple(int(c) for c in coset))
        return out


def _check_closed(G: FiniteGroup, members: Sequence[int]) -> None:
    mset = set(members)
    if G.id not in mset:
        raise NotClosed("selected set does not contain the identity")
    arr = np.array(sorted(mset))
    prods = G.mul[np.ix_(arr, arr)]
    if not np.isin(prods, arr).all():
        raise NotClosed("selected set is not closed under composition")
    if G.order % len(mset):
        raise NotClosed("selected set size does not divide the group order")


def subgroup_from_predicate(G: FiniteGroup, pred: Callable[[Permutation], bool]) -> Subgroup:
    members = [i for i, e in enumerate(G.elements) if pred(e)]
    _check_closed(G, members)
    return Subgroup(G, tuple(members))


def subgroup_generated(G: FiniteGroup, generators: Sequence[Permutation | Sequence[int]]) -> Subgroup:
    gens = [g if isinstance(g, Permutation) else Permutation(tuple(g)) for g in generators]
    if not gens:
        return trivial_subgroup(G)
    sub = closure(gens)
    try:
        members = [G.index[e.images] for e in sub.elements]
    except KeyError as exc:
        raise NotClosed("generators do not lie in the parent group") from exc
    return Subgroup(G, tuple(members))


def stabilizer(G: FiniteGroup, point: int) -> Subgroup:
    return subgroup_from_predicate(G, lambda g: g(point) == point)


def trivial_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, (G.id,))


# -- abelian groups ---------------------------------------------------------


@dataclass(frozen=True)
class AbelianStructure:
    """Z/d1 x Z/d2 x ... with d1 | d2 | ...; elements are exponent vectors."""

    factors: tuple[int, ...]

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def exponent(self) -> int:
        return self.factors[-1] if self.factors else 1

    @property
    def rank(self) -> int:
        return len(self.factors)

    def vectors(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(d) for d in self.factors)))

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.factors)

    def add(self, u, v) -> tuple[int, ...]:
        return tuple((a + b) % d for a, b, d in zip(u, v, self.factors))

    def neg(self, u) -> tuple[int, ...]:
        return tuple((-a) % d for a, d in zip(u, self.factors))

    def scale(self, k: int, u) -> tuple[int, ...]:
        return tuple((k * a) % d for a, d in zip(u, self.factors))

    def element_order(self, u) -> int:
        return math.lcm(*(d // math.gcd(a, d) for a, d in zip(u, self.factors))) if u else 1


def smith_normal_form(M: Sequence[Sequence[int]]):
    """Diagonalise a square integer matrix by unimodular row/column operations.

    Returns ``(diag, V, Vinv)`` with ``U M V = diag(diag)`` for some unimodular U,
    entries of ``diag`` nonnegative and each dividing the next.
    """
    A = [list(map(int, row)) for row in M]
    r = len(A)
    V = [[int(i == j) for j in range(r)] for i in range(r)]
    Vi = [[int(i == j) for j in range(r)] for i in range(r)]

    def col_add(dst, src, k):  # col_dst += k * col_src
        for row in A:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]
        Vi[src] = [a - k * b for a, b in zip(Vi[src], Vi[dst])]

    def col_swap(a, b):
        for row in A:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]
        Vi[a], Vi[b] = Vi[b], Vi[a]

    for t in range(r):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, r) for j in range(t, r) if A[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            A[t], A[i] = A[i], A[t]
            col_swap(t, j)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, r):
                q = A[i][t] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                dirty |= A[i][t] != 0
            for j in range(t + 1, r):
                q = A[t][j] // p
                if q:
                    col_add(j, t, -q)
                dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = [i for i in range(t + 1, r) if any(A[i][j] % p for j in range(t + 1, r))]
            if bad:
                A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
                continue
            break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
    return [A[i][i] for i in range(r)], V, Vi


def decompose_abelian(
    labels: Sequence[Hashable],
    op: Callable[[Hashable, Hashable], Hashable],
    identity: Hashable,
) -> tuple[AbelianStructure, dict]:
    """Invariant factors of a finite abelian group and a label -> vector isomorphism.

    A greedy generating set gives a triangular relation matrix (each generator's
    first power landing in the span of the earlier ones); its Smith form yields
    the invariant factors and the change of basis.
    """
    labels = list(labels)
    n = len(labels)

    def power(x, k):
        out = identity
        for _ in range(k):
            out = op(out, x)
        return out

    def order_of(x):
        k, y = 1, x
        while y != identity:
            y = op(y, x)
            k += 1
        return k

    by_order = sorted(range(n), key=lambda i: (-order_of(labels[i]), i))
    gens: list = []
    rel_orders: list[int] = []
    relations: list[list[int]] = []
    span = {identity: ()}  # element -> coordinates in the chosen generators
    for i in by_order:
        g = labels[i]
        if g in span:
            continue
        # smallest o with g^o in the current span
        o, y = 1, g
        while y not in span:
            y = op(y, g)
            o += 1
        coords = span[y]
        relations.append([-c for c in coords] + [o])
        new_span = {}
        gk = identity
        for k in range(o):
            for elt, vec in span.items():
                new_span[op(elt, gk)] = vec + (k,)
            gk = op(gk, g)
        span = new_span
        gens.append(g)
        rel_orders.append(o)
        if len(span) == n:
            break
    if len(span) != n:
        raise GroupError("labels do not form a group under op")
    r = len(gens)
    true_orders = [order_of(g) for g in gens]
    R = [row + [0] * (r - len(row)) for row in relations]
    diag, V, Vi = smith_normal_form(R) if r else ([], [], [])
    # new generator k = image of row k of V^-1 (coordinates in the old generators)
    new_gens = []
    factors = []
    for k in range(r):
        if diag[k] == 1:
            continue
        elt = identity
        for j in range(r):
            elt = op(elt, power(gens[j], Vi[k][j] % true_orders[j]))
        new_gens.append(elt)
        factors.append(diag[k])
    struct = AbelianStructure(tuple(factors))
    to_vec = {}
    for vec in struct.vectors():
        elt = identity
        for g, a in zip(new_gens, vec):
            elt = op(elt, power(g, a))
        to_vec[elt] = vec
    if len(to_vec) != n:
        raise GroupError("abelian decomposition failed to be bijective")
    return struct, to_vec


def quotient_abelian(H: Subgroup, Ksub: Subgroup) -> tuple[AbelianStructure, dict[int, tuple[int, ...]]]:
    """Structure of N = H/Ksub and the surjection H -> N (element index -> vector)."""
    if not Ksub.is_subgroup_of(H):
        raise NotNormal("Ksub is not contained in H")
    if not Ksub.is_normal_in(H):
        raise NotNormal("Ksub is not normal in H")
    G = H.parent
    kmem = np.array(Ksub.members)
    coset_of: dict[int, int] = {}
    reps = []
    for h in H.members:
        if h in coset_of:
            continue
        coset = G.mul[h, kmem]
        label = int(coset.min())
        reps.append(label)
        for c in coset:
            coset_of[int(c)] = label

    def op(a, b):
        return coset_of[int(G.mul[a, b])]

    for a, b in itertools.combinations(reps, 2):
        if op(a, b) != op(b, a):
            raise NotAbelian("H/Ksub is not abelian")
    struct, to_vec = decompose_abelian(reps, op, coset_of[G.id])
    return struct, {h: to_vec[coset_of[h]] for h in H.members}
