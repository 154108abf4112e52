"""Characters of the abelian subquotient N = H/Ksub, their induction to G, and moment exponents.

Everything here is exact over cyclotomic fields except exponents at a beta
with 2*beta not an integer, which are evaluated in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

from .cyclo import Cyclotomic, abs_square, is_real_times_root_of_unity, numeric, root_of_unity
from .permgroup import (
    AbelianStructure,
    FiniteGroup,
    NotNormal,
    Permutation,
    Subgroup,
    closure,
    quotient_abelian,
    subgroup_from_predicate,
    subgroup_generated,
    trivial_subgroup,
)

__all__ = [
    "NotNormalTower",
    "NotInteger",
    "NotAutomorphism",
    "CrossCheckError",
    "GaloisFrame",
    "DualCharacter",
    "ClassFunction",
    "CuspidalReport",
    "SigmaReport",
    "as_beta",
    "frame_from_spec",
    "semidirect_frame",
    "dual_group",
    "induce",
    "inner_product",
    "class_indicator",
    "rho_char",
    "rho_max",
    "extremal_set",
    "rho_joint",
    "q_action",
    "cuspidal_characters",
    "cuspidal_report",
    "cusp_vanishes",
    "rho_cusp",
    "cusp_extremal",
    "star_star",
    "rho_galois_action",
    "quadratic_vanishing_structural",
]

NUMERIC_TOL = 1e-9


class NotNormalTower(ValueError):
    """Operation needs H and Ksub normal in G."""


class NotInteger(ArithmeticError):
    pass


class NotAutomorphism(ValueError):
    pass


class CrossCheckError(AssertionError):
    pass


def as_beta(beta) -> Fraction | float:
    """Parse beta; strings like ``"3/2"`` and ints become exact, floats stay floats."""
    if isinstance(beta, str):
        beta = Fraction(beta)
    elif isinstance(beta, int):
        beta = Fraction(beta)
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return beta


def _doubled(beta) -> int | None:
    """2*beta when it is an integer, else None."""
    two = 2 * Fraction(beta)
    return two.numerator if two.denominator == 1 else None


# -- frames -----------------------------------------------------------------


class GaloisFrame:
    """G, H <= G and Ksub normal in H with N = H/Ksub abelian.

    ``to_n`` maps every element index of H to its vector in N.
    """

    def __init__(
        self,
        G: FiniteGroup,
        H: Subgroup,
        Ksub: Subgroup,
        N: AbelianStructure | None = None,
        to_n: Mapping[int, tuple[int, ...]] | None = None,
        name: str = "",
        spec: dict | None = None,
    ):
        if N is None or to_n is None:
            N, to_n = quotient_abelian(H, Ksub)
        self.G, self.H, self.Ksub = G, H, Ksub
        self.N = N
        self.to_n = dict(to_n)
        self.name = name
        self.spec = spec
        self._induced: dict[tuple[int, ...], ClassFunction] = {}

    def __repr__(self):
        return f"GaloisFrame({self.name!r}, |G|={self.G.order}, [G:H]={self.index}, N={self.N.factors})"

    @property
    def index(self) -> int:
        return self.G.order // self.H.order

    @property
    def classes(self):
        return self.G.classes

    @cached_property
    def class_sizes(self) -> tuple[int, ...]:
        return tuple(c.size for c in self.G.classes)

    @cached_property
    def class_h_vectors(self) -> list[list[tuple[int, ...]]]:
        """For each class C of G, the N-images of the elements of H n C."""
        out = [[] for _ in self.G.classes]
        cls = self.G.class_of
        for h in self.H.members:
            out[cls[h]].append(self.to_n[h])
        return out

    @cached_property
    def perm_values(self) -> tuple[int, ...]:
        """Induced trivial character: [G:H] |H n C| / |C| (the permutation character of G/H)."""
        vals = []
        for vecs, size in zip(self.class_h_vectors, self.class_sizes):
            v = Fraction(self.index * len(vecs), size)
            if v.denominator != 1:
                raise NotInteger(f"permutation character value {v} is not integral")
            vals.append(int(v))
        return tuple(vals)

    @cached_property
    def lift(self) -> dict[tuple[int, ...], int]:
        """A fixed preimage in H (minimal element index) of each element of N."""
        out: dict[tuple[int, ...], int] = {}
        for h in self.H.members:
            out.setdefault(self.to_n[h], h)
        return out

    def class_of_vector(self, sigma: Sequence[int]) -> int:
        return int(self.G.class_of[self.lift[tuple(sigma)]])

    @cached_property
    def is_normal_tower(self) -> bool:
        return self.H.is_normal_in(self.G) and self.Ksub.is_normal_in(self.G)

    @cached_property
    def q_lifts(self) -> list[int]:
        """Minimal representatives of the cosets gH; the identity coset comes first."""
        return [c[0] for c in self.H.left_cosets()]


def _parse_perm(obj, degree: int) -> Permutation:
    if isinstance(obj, dict) and "cycles" in obj:
        return Permutation.from_cycles(obj["cycles"], degree, offset=obj.get("offset", 0))
    return Permutation(tuple(obj))


def frame_from_spec(spec: dict, name: str = "") -> GaloisFrame:
    """Build a frame from the JSON group-fixture schema (0-indexed points)."""
    degree = int(spec["degree"])
    G = closure([_parse_perm(g, degree) for g in spec["generators"]])
    hs = spec.get("H", {"type": "whole"})
    if hs["type"] == "point_membership":
        point = int(hs.get("point", 0))
        pts = set(int(p) for p in hs["points"])
        H = subgroup_from_predicate(G, lambda g: g(point) in pts)
    elif hs["type"] == "generated":
        H = subgroup_generated(G, [_parse_perm(g, degree) for g in hs["generators"]])
    elif hs["type"] == "whole":
        H = Subgroup(G, tuple(range(G.order)))
    else:
        raise ValueError(f"unknown H type {hs['type']!r}")
    ks = spec.get("Ksub", {"type": "trivial"})
    if ks["type"] == "stabilizer":
        point = int(ks["point"])
        K = Subgroup(G, tuple(h for h in H.members if G.elements[h](point) == point))
    elif ks["type"] == "trivial":
        K = trivial_subgroup(G)
    elif ks["type"] == "generated":
        K = subgroup_generated(G, [_parse_perm(g, degree) for g in ks["generators"]])
    else:
        raise ValueError(f"unknown Ksub type {ks['type']!r}")
    if not K.is_subgroup_of(H):
        raise NotNormal("Ksub is not contained in H")
    return GaloisFrame(G, H, K, name=name, spec=spec)


def _check_automorphism(A: AbelianStructure, f: Callable) -> None:
    vecs = A.vectors()
    images = [tuple(f(v)) for v in vecs]
    if len(set(images)) != len(vecs) or set(images) != set(vecs):
        raise NotAutomorphism("map is not a bijection of A")
    basis = [tuple(int(i == k) for i in range(A.rank)) for k in range(A.rank)]
    fb = [tuple(f(b)) for b in basis]
    for v, fv in zip(vecs, images):
        for b, fbk in zip(basis, fb):
            if tuple(f(A.add(v, b))) != A.add(fv, fbk):
                raise NotAutomorphism("map is not additive")


def semidirect_frame(A: AbelianStructure, alpha: Callable, q: int, name: str = "") -> GaloisFrame:
    """Frame for G = A x| C_q, where the generator of C_q acts on A by ``alpha``.

    G acts faithfully on the disjoint union of A (by x -> alpha^j(x) + a) and
    C_q (by translation), so H = N = A is the stabiliser of a C_q point.
    """
    _check_automorphism(A, alpha)
    vecs = A.vectors()
    idx = {v: i for i, v in enumerate(vecs)}
    x = list(vecs)
    for _ in range(q):
        x = [tuple(alpha(v)) for v in x]
    if x != list(vecs):
        raise NotAutomorphism(f"alpha does not have order dividing {q}")
    a = len(vecs)
    degree = a + q
    gens = []
    for k in range(A.rank):
        e = tuple(int(i == k) for i in range(A.rank))
        gens.append([idx[A.add(v, e)] for v in vecs] + list(range(a, degree)))
    gens.append([idx[tuple(alpha(v))] for v in vecs] + [a + (j + 1) % q for j in range(q)])
    G = closure([Permutation(tuple(g)) for g in gens])
    if G.order != a * q:
        raise CrossCheckError(f"semidirect product has order {G.order}, expected {a * q}")
    H = subgroup_from_predicate(G, lambda g: g(a) == a)
    zero = idx[A.zero]
    to_n = {h: vecs[G.elements[h](zero)] for h in H.members}
    spec = {
        "degree": degree,
        "generators": gens,
        "H": {"type": "point_membership", "point": a, "points": [a]},
        "Ksub": {"type": "trivial"},
    }
    return GaloisFrame(G, H, trivial_subgroup(G), N=A, to_n=to_n, name=name, spec=spec)


# -- characters -------------------------------------------------------------


@dataclass(frozen=True)
class DualCharacter:
    """chi in the dual of N, stored as exponents e_i mod d_i against N's invariant factors."""

    N: AbelianStructure
    exps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exps", tuple(int(e) % d for e, d in zip(self.exps, self.N.factors)))

    def power_index(self, vec: Sequence[int]) -> int:
        """k with chi(vec) = zeta_E**k, E the exponent of N."""
        E = self.N.exponent
        return sum(e * v * (E // d) for e, v, d in zip(self.exps, vec, self.N.factors)) % E

    def value(self, vec: Sequence[int]) -> Cyclotomic:
        return root_of_unity(self.N.exponent, self.power_index(vec))

    @property
    def order(self) -> int:
        return self.N.element_order(self.exps)

    @property
    def is_trivial(self) -> bool:
        return not any(self.exps)

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    def inverse(self) -> "DualCharacter":
        return DualCharacter(self.N, self.N.neg(self.exps))

    conj = inverse

    def __mul__(self, other: "DualCharacter") -> "DualCharacter":
        return DualCharacter(self.N, self.N.add(self.exps, other.exps))


def dual_group(frame_or_N) -> list[DualCharacter]:
    """All characters in lexicographic exponent order; the trivial one first."""
    N = frame_or_N.N if isinstance(frame_or_N, GaloisFrame) else frame_or_N
    return [DualCharacter(N, v) for v in N.vectors()]


@dataclass(frozen=True, eq=False)
class ClassFunction:
    frame: GaloisFrame
    values: tuple[Cyclotomic, ...]

    def __eq__(self, other):
        if not isinstance(other, ClassFunction):
            return NotImplemented
        return self.frame is other.frame and all(a == b for a, b in zip(self.values, other.values))

    def __mul__(self, other: "ClassFunction") -> "ClassFunction":
        return ClassFunction(self.frame, tuple(a * b for a, b in zip(self.values, other.values)))

    def conj(self) -> "ClassFunction":
        return ClassFunction(self.frame, tuple(v.conj() for v in self.values))

    def at(self, g: int) -> Cyclotomic:
        return self.values[self.frame.G.class_of[g]]

    def at_sigma(self, sigma: Sequence[int]) -> Cyclotomic:
        return self.values[self.frame.class_of_vector(sigma)]


def induce(frame: GaloisFrame, chi: DualCharacter) -> ClassFunction:
    """chi~^ind(C) = ([G:H]/|C|) * sum of chi~(h) over h in H n C."""
    cached = frame._induced.get(chi.exps)
    if cached is not None:
        return cached
    E = frame.N.exponent
    vals = []
    for vecs, size in zip(frame.class_h_vectors, frame.class_sizes):
        counts = [0] * E
        for v in vecs:
            counts[chi.power_index(v)] += 1
        vals.append(Cyclotomic.from_powers(E, counts) * Fraction(frame.index, size))
    cf = ClassFunction(frame, tuple(vals))
    frame._induced[chi.exps] = cf
    return cf


def class_indicator(frame: GaloisFrame, c: int) -> ClassFunction:
    one, zero = Cyclotomic.from_rational(1), Cyclotomic.from_rational(0)
    return ClassFunction(frame, tuple(one if i == c else zero for i in range(len(frame.classes))))


def inner_product(f1: ClassFunction, f2: ClassFunction) -> Cyclotomic:
    frame = f1.frame
    total = Cyclotomic.from_rational(0)
    for size, a, b in zip(frame.class_sizes, f1.values, f2.values):
        if not (a.is_zero() or b.is_zero()):
            total = total + a * b.conj() * size
    return total * Fraction(1, frame.G.order)


def _abs_power_exact(v: Cyclotomic, beta) -> Cyclotomic | None:
    """|v|**(2 beta) exactly when possible, else None."""
    two = _doubled(beta)
    if two is None:
        return None
    s = abs_square(v)
    if two % 2 == 0:
        return s ** (two // 2)
    if not s.is_rational():
        return None
    q = s.to_fraction()
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn != q.numerator or rd * rd != q.denominator:
        return None
    return Cyclotomic.from_rational(Fraction(rn, rd) ** two)


def _weighted_moment(values: Sequence[Cyclotomic], weights: Sequence[Fraction], beta) -> Fraction | float:
    exact = [_abs_power_exact(v, beta) for v in values]
    if all(e is not None for e in exact):
        total = Cyclotomic.from_rational(0)
        for w, e in zip(weights, exact):
            total = total + e * w
        return total.to_fraction()
    b = float(beta)
    return math.fsum(float(w) * abs(numeric(v)) ** (2 * b) for w, v in zip(weights, values) if not v.is_zero())


def rho_char(frame: GaloisFrame, chi: DualCharacter, beta) -> Fraction | float:
    """(1/|G|) sum_g |chi~^ind(g)|^(2 beta); a Fraction on the exact path."""
    beta = as_beta(beta)
    weights = [Fraction(s, frame.G.order) for s in frame.class_sizes]
    return _weighted_moment(induce(frame, chi).values, weights, beta)


def rho_max(frame: GaloisFrame, beta) -> Fraction | float:
    """max over chi of rho(chi, beta), attained by the trivial character."""
    beta = as_beta(beta)
    two = _doubled(beta)
    if two is not None:
        return sum(
            (Fraction(s * p**two, frame.G.order) for s, p in zip(frame.class_sizes, frame.perm_values)),
            Fraction(0),
        )
    b = float(beta)
    return math.fsum(s * p ** (2 * b) for s, p in zip(frame.class_sizes, frame.perm_values) if p) / frame.G.order


def extremal_set(frame: GaloisFrame) -> list[DualCharacter]:
    """Characters whose induced character matches the permutation character in absolute value."""
    out = []
    for chi in dual_group(frame):
        ind = induce(frame, chi)
        if all(abs_square(v) == p * p for v, p in zip(ind.values, frame.perm_values)):
            out.append(chi)
    return out


def rho_joint(frame: GaloisFrame, chars: Sequence[DualCharacter]) -> int:
    """(1/|G|) sum_g prod_i chi_i~^ind(g); always a nonnegative integer."""
    if not chars:
        raise ValueError("need at least one character")
    prod = induce(frame, chars[0])
    for chi in chars[1:]:
        prod = prod * induce(frame, chi)
    total = Cyclotomic.from_rational(0)
    for size, v in zip(frame.class_sizes, prod.values):
        if not v.is_zero():
            total = total + v * size
    total = total * Fraction(1, frame.G.order)
    if not total.is_rational():
        raise NotInteger(f"joint exponent {total} is not rational")
    q = total.to_fraction()
    if q.denominator != 1 or q < 0:
        raise NotInteger(f"joint exponent {q} is not a nonnegative integer")
    return int(q)


# -- the Q-action and cuspidality --------------------------------------------


def _require_normal_tower(frame: GaloisFrame) -> None:
    if not frame.is_normal_tower:
        raise NotNormalTower(f"{frame.name or 'frame'}: H or Ksub is not normal in G")


def q_action(frame: GaloisFrame, tau: int, chi: DualCharacter) -> DualCharacter:
    """(tau chi)(h) = chi(tau~^-1 h tau~) for a lift tau~ (an element index of G)."""
    _require_normal_tower(frame)
    N = frame.N
    E = N.exponent
    exps = []
    for k, d in enumerate(N.factors):
        e = tuple(int(i == k) for i in range(N.rank))
        h = frame.G.conjugate(frame.lift[e], tau)
        p = chi.power_index(frame.to_n[h])
        exps.append(p * d // E)
    return DualCharacter(N, tuple(exps))


def _orbit(frame: GaloisFrame, chi: DualCharacter) -> list[DualCharacter]:
    return [q_action(frame, t, chi) for t in frame.q_lifts]


def cuspidal_characters(frame: GaloisFrame) -> list[DualCharacter]:
    """Characters moved by every nontrivial element of Q."""
    _require_normal_tower(frame)
    out = []
    for chi in dual_group(frame):
        if all(q_action(frame, t, chi) != chi for t in frame.q_lifts[1:]):
            out.append(chi)
    return out


@dataclass
class SigmaReport:
    sigma: tuple[int, ...]
    vanishes: bool
    rho_cusp: dict = field(default_factory=dict)
    extremal: dict = field(default_factory=dict)
    star_star: dict = field(default_factory=dict)


@dataclass
class CuspidalReport:
    frame: GaloisFrame
    cuspidal: list[DualCharacter]
    orbits: list[list[DualCharacter]]
    representatives: list[DualCharacter]
    orbit_id: dict
    sigmas: list[SigmaReport]

    @property
    def k(self) -> int:
        return len(self.representatives)


def _orbit_data(frame: GaloisFrame):
    cusp = cuspidal_characters(frame)
    orbits, orbit_id, seen = [], {}, set()
    for chi in cusp:
        if chi.exps in seen:
            continue
        orb = sorted({c.exps: c for c in _orbit(frame, chi)}.values(), key=lambda c: c.exps)
        for c in orb:
            seen.add(c.exps)
            orbit_id[c.exps] = len(orbits)
        orbits.append(orb)
    reps = [orb[0] for orb in orbits]
    return cusp, orbits, reps, orbit_id


def _representatives(frame: GaloisFrame) -> list[DualCharacter]:
    cached = getattr(frame, "_cusp_reps", None)
    if cached is None:
        cached = _orbit_data(frame)[2]
        frame._cusp_reps = cached
    return cached


def cusp_vanishes(frame: GaloisFrame, sigma: Sequence[int]) -> bool:
    """True iff chi_i^ind(sigma) = 0 for every orbit representative (zeta_cusp identically 0)."""
    _require_normal_tower(frame)
    c = frame.class_of_vector(sigma)
    return all(induce(frame, chi).values[c].is_zero() for chi in _representatives(frame))


def _nonvanishing_reps(frame, sigma):
    c = frame.class_of_vector(sigma)
    return [chi for chi in _representatives(frame) if not induce(frame, chi).values[c].is_zero()]


def rho_cusp(frame: GaloisFrame, sigma: Sequence[int], beta) -> Fraction | float | None:
    _require_normal_tower(frame)
    reps = _nonvanishing_reps(frame, sigma)
    if not reps:
        return None
    return max(rho_char(frame, chi, beta) for chi in reps)


def cusp_extremal(frame: GaloisFrame, sigma: Sequence[int], beta) -> list[DualCharacter]:
    """Representatives attaining rho_cusp(sigma, beta); all ties reported."""
    _require_normal_tower(frame)
    reps = _nonvanishing_reps(frame, sigma)
    if not reps:
        return []
    vals = [rho_char(frame, chi, beta) for chi in reps]
    best = max(vals)
    if all(isinstance(v, Fraction) for v in vals):
        return [chi for chi, v in zip(reps, vals) if v == best]
    return [chi for chi, v in zip(reps, vals) if abs(float(v) - float(best)) <= NUMERIC_TOL * max(1.0, abs(float(best)))]


def _values_real_times_root(frame: GaloisFrame, chi: DualCharacter) -> bool:
    return all(is_real_times_root_of_unity(v) for v in induce(frame, chi).values)


def star_star(frame: GaloisFrame, sigma: Sequence[int], beta) -> bool:
    """Every maximiser's induced values lie in R x (root of unity); vacuous when zeta_cusp vanishes."""
    return all(_values_real_times_root(frame, chi) for chi in cusp_extremal(frame, sigma, beta))


def cuspidal_report(frame: GaloisFrame, beta_grid: Iterable = (1,)) -> CuspidalReport:
    _require_normal_tower(frame)
    betas = [as_beta(b) for b in beta_grid]
    cusp, orbits, reps, orbit_id = _orbit_data(frame)
    frame._cusp_reps = reps
    cusp_set = {c.exps for c in cusp}
    for chi in dual_group(frame):
        ind = induce(frame, chi)
        irreducible = inner_product(ind, ind) == 1
        if irreducible != (chi.exps in cusp_set):
            raise CrossCheckError(f"character {chi.exps}: irreducibility disagrees with the Q-action")
    q = len(frame.q_lifts)
    if len(cusp) != len(reps) * q:
        raise CrossCheckError("Q does not act freely on the cuspidal characters")
    sigmas = []
    for sigma in frame.N.vectors():
        rep = SigmaReport(sigma, cusp_vanishes(frame, sigma))
        for b in betas:
            rep.rho_cusp[b] = rho_cusp(frame, sigma, b)
            rep.extremal[b] = [c.exps for c in cusp_extremal(frame, sigma, b)]
            rep.star_star[b] = star_star(frame, sigma, b)
        sigmas.append(rep)
    return CuspidalReport(frame, cusp, orbits, reps, orbit_id, sigmas)


def rho_galois_action(A: AbelianStructure, action: Sequence, chi: DualCharacter, beta) -> Fraction | float:
    """(1/(|A||Q|)) sum over classes a of |sum_tau chi(a^tau)|^(2 beta).

    ``action`` lists one automorphism of A (callable or mapping on vectors) per
    element of Q, with repetitions when Q does not act faithfully.
    """
    beta = as_beta(beta)
    fns = [t if callable(t) else t.__getitem__ for t in action]
    for f in fns:
        _check_automorphism(A, f)
    E = A.exponent
    vals = []
    for a in A.vectors():
        counts = [0] * E
        for f in fns:
            counts[chi.power_index(tuple(f(a)))] += 1
        vals.append(Cyclotomic.from_powers(E, counts))
    w = Fraction(1, A.order * len(fns))
    return _weighted_moment(vals, [w] * len(vals), beta)


def quadratic_vanishing_structural(N: AbelianStructure, sigma: Sequence[int]) -> bool:
    """Quadratic-field criterion: N = Z/4 x (Z/2)^n and sigma of order 4."""
    f = N.factors
    return bool(f) and f[-1] == 4 and all(d == 2 for d in f[:-1]) and N.element_order(tuple(sigma)) == 4
