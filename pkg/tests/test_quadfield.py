import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import factorint, primerange
from sympy.functions.combinatorial.numbers import kronecker_symbol

from classmoments.chartheory import cusp_vanishes, dual_group, quadratic_vanishing_structural
from classmoments.quadfield import (
    FormClassGroup,
    NonIntegralWeightOffset,
    QuadDiscriminant,
    QuadForm,
    char_coefficients,
    compose,
    count_representations,
    cusp_coefficients,
    enumerate_reduced,
    eta_product_coeffs,
    export_csv,
    fundamental_discriminants,
    ideal_class_counts,
    is_fundamental,
    kronecker,
    kronecker_divisor_sums,
    quadratic_frame,
    read_table,
    reduce_form,
    write_table,
)

DISCS_400 = [D for D in range(-3, -401, -1) if D % 4 in (0, 1)]


def class_number_oracle(D: int) -> int:
    """Analytic class number formula, lifted to orders by the conductor formula."""
    d = QuadDiscriminant(D)
    D0, f = d.D0, d.f
    w0 = {-3: 6, -4: 4}.get(D0, 2)
    s = sum(kronecker_symbol(D0, a) * a for a in range(1, -D0))
    h0 = Fraction(-w0 * s, 2 * -D0)
    h = h0 * f / Fraction(w0, d.w)
    for p in factorint(f):
        h *= 1 - Fraction(kronecker_symbol(D0, p), p)
    assert h.denominator == 1
    return int(h)


def naive_eta_product(levels, X):
    """q-coefficients of prod eta(m z)^e by multiplying out (1 - q^{mk}) factor by factor."""
    offset = sum(m * e for m, e in levels) // 24
    poly = [0] * (X + 1)
    poly[0] = 1
    for m, e in levels:
        for _ in range(e):
            for k in range(1, X // m + 1):
                step = m * k
                poly = [poly[i] - (poly[i - step] if i >= step else 0) for i in range(X + 1)]
    return [0] * offset + poly[: X + 1 - offset]


# ---------------------------------------------------------------- forms


def test_reduced_forms_examples():
    assert enumerate_reduced(-23) == [(1, 1, 6), (2, -1, 3), (2, 1, 3)]
    assert enumerate_reduced(-4) == [(1, 0, 1)]
    cg = FormClassGroup(-39)
    assert cg.h == 4 and cg.structure.factors == (4,)


def test_discriminant_parts():
    d = QuadDiscriminant(-92)
    assert (d.D0, d.f, d.w) == (-23, 2, 2)
    assert QuadDiscriminant(-3).w == 6 and QuadDiscriminant(-4).w == 4
    assert QuadDiscriminant(-12).f == 2 and QuadDiscriminant(-12).w == 2
    with pytest.raises(ValueError):
        QuadDiscriminant(-5)
    assert is_fundamental(-20) and not is_fundamental(-92) and not is_fundamental(-36)


def test_composition_examples():
    cg = FormClassGroup(-23)
    principal = QuadForm(1, 1, 6)
    for g in cg.forms:
        assert compose(principal, g) == g
        assert compose(g, g.inverse()) == principal
    assert compose((2, 1, 3), (2, 1, 3)) == (2, -1, 3)


@pytest.mark.parametrize("D", DISCS_400)
def test_group_law_and_class_number(D):
    cg = FormClassGroup(D)
    T = cg.table
    h = cg.h
    assert h == class_number_oracle(D)
    idx = np.arange(h)
    # associativity over all triples
    lhs = T[T[:, :, None], idx[None, None, :]]
    rhs = T[idx[:, None, None], T[None, :, :]]
    assert np.array_equal(lhs, rhs)
    assert np.array_equal(T, T.T)
    assert np.all(T[cg.identity] == idx)
    for i in range(h):
        assert T[i, cg.inverse_index(i)] == cg.identity
    assert cg.structure.order == h


@settings(max_examples=60)
@given(st.sampled_from(DISCS_400), st.data())
def test_composite_represents_products(D, data):
    """If g1 represents m and g2 represents n, coprime, then g1 o g2 represents m n."""
    forms = enumerate_reduced(D)
    g1 = data.draw(st.sampled_from(forms))
    g2 = data.draw(st.sampled_from(forms))
    x1, y1, x2, y2 = data.draw(st.tuples(*[st.integers(-6, 6)] * 4))
    m, n = g1(x1, y1), g2(x2, y2)
    if m == 0 or n == 0 or math.gcd(m, n) != 1:
        return
    g3 = compose(g1, g2)
    assert count_representations(g3, m * n)[m * n] > 0


@given(st.integers(1, 40), st.integers(-40, 40), st.integers(1, 40))
def test_reduction_is_canonical(a, b, c):
    if b * b - 4 * a * c >= 0:
        return
    g = reduce_form((a, b, c))
    assert g.is_reduced() and g.disc == b * b - 4 * a * c
    # an SL2(Z) move does not change the reduced representative
    assert reduce_form((a, b + 2 * a, a + b + c)) == g
    assert reduce_form((c, -b, a)) == g


# ---------------------------------------------------------------- counts


def test_representation_examples():
    assert count_representations((1, 1, 6), 10)[1] == 2
    assert count_representations((2, 1, 3), 10)[2] == 2
    r = count_representations((1, 0, 1), 200)
    for n in range(1, 201):
        d1 = sum(1 for d in range(1, n + 1) if n % d == 0 and d % 4 == 1)
        d3 = sum(1 for d in range(1, n + 1) if n % d == 0 and d % 4 == 3)
        assert r[n] == 4 * (d1 - d3)
    assert r[25] == 12


@given(st.sampled_from([(1, 1, 6), (2, 1, 3), (1, 0, 5), (2, 2, 3), (3, 2, 5)]), st.integers(1, 300))
def test_representations_brute_force(g, n):
    a, b, c = g
    D = b * b - 4 * a * c
    bound = math.isqrt(4 * a * n // -D) + 2
    brute = sum(
        1 for x in range(-bound * 4, bound * 4 + 1) for y in range(-bound, bound + 1) if a * x * x + b * x * y + c * y * y == n
    )
    assert count_representations(g, n)[n] == brute


def test_ideal_counts_examples(table23):
    c = table23.counts
    assert c[:, 2].tolist() == [0, 1, 1]
    assert c[:, 1].tolist() == [1, 0, 0]
    n = np.arange(table23.X + 1)
    keep = (n >= 1) & (n % 23 != 0)
    assert np.array_equal(table23.total()[keep], kronecker_divisor_sums(-23, table23.X)[keep])


@pytest.mark.parametrize("D", [-3, -4, -12, -16, -23, -39, -47, -92])
def test_dictionary_and_symmetry(D):
    t = ideal_class_counts(D, 3000)
    cg = t.cg
    dom = t.domain
    assert np.array_equal(t.r[:, dom], cg.disc.w * t.counts[:, dom])
    assert (t.counts >= 0).all()
    assert t.counts[:, 1].tolist() == [int(i == cg.identity) for i in range(cg.h)]
    for i in range(cg.h):
        assert np.array_equal(t.counts[i], t.counts[cg.inverse_index(i)])
    n = np.arange(t.X + 1)
    keep = (n >= 1) & (np.gcd(n, cg.D * cg.disc.f) == 1)
    assert np.array_equal(t.total()[keep], kronecker_divisor_sums(cg.disc.D0, t.X)[keep])


@given(st.integers(-500, 500), st.integers(1, 500))
def test_kronecker_matches_sympy(D, n):
    assert kronecker(D, n) == kronecker_symbol(D, n)


# ---------------------------------------------------------------- characters


def test_char_coefficients_d23(table23):
    chars = dual_group(table23.cg.structure)
    triv = [chi for chi in chars if chi.is_trivial][0]
    assert np.array_equal(char_coefficients(table23, triv).to_int(), table23.total())
    for chi in chars:
        if chi.is_trivial:
            continue
        a = char_coefficients(table23, chi)
        assert a.is_rational()
        assert a.to_int()[2] == -1


@pytest.mark.parametrize("D", [-23, -39, -47, -56, -84])
def test_char_coefficients_real(D):
    t = ideal_class_counts(D, 2000)
    for chi in dual_group(t.cg.structure):
        a = char_coefficients(t, chi)  # raises unless exactly self-conjugate
        z = a.to_complex()
        assert np.allclose(z.imag, 0, atol=1e-9)


@pytest.fixture(scope="module")
def table23_big():
    return ideal_class_counts(-23, 500 * 499)


@settings(max_examples=200)
@given(st.sampled_from(list(primerange(2, 500))), st.sampled_from(list(primerange(2, 500))))
def test_char_multiplicative(table23_big, p, q):
    if p == q or 23 in (p, q):
        return
    for chi in dual_group(table23_big.cg.structure):
        a = char_coefficients(table23_big, chi)
        assert a[p * q] == a[p] * a[q]


def test_char_multiplicative_order4():
    t = ideal_class_counts(-39, 4000)
    ps = [p for p in primerange(2, 60) if 39 % p]
    for chi in dual_group(t.cg.structure):
        a = char_coefficients(t, chi)
        for p, q in itertools.combinations(ps, 2):
            assert a[p * q] == a[p] * a[q]


def test_cusp_vanishes_at_order4_d39():
    t = ideal_class_counts(-39, 10**4)
    cg = t.cg
    for i in range(cg.h):
        num = cusp_coefficients(t, i).num
        order = cg.structure.element_order(cg.coords[i])
        assert (not num.any()) == (order == 4)


def test_cusp_denominator_and_definition(table23):
    cg = table23.cg
    for i in range(cg.h):
        cu = cusp_coefficients(table23, i)
        assert cu.den == cg.h
        # only the trivial character is real for a group of odd order
        expect = cg.h * table23.counts[i] - table23.total()
        assert np.array_equal(cu.num, expect)


@pytest.mark.parametrize("D", [-39, -56, -155, -260])
def test_structural_vanishing_matches_frame(D):
    cg = FormClassGroup(D)
    frame = quadratic_frame(cg)
    for v in cg.structure.vectors():
        assert cusp_vanishes(frame, v) == quadratic_vanishing_structural(cg.structure, v)


@pytest.mark.parametrize("D", [-4, -15, -84, -420])
def test_exponent_two_class_group_has_no_cusp_part(D):
    """Every character is real, so the cuspidal projection is an empty sum for every sigma."""
    cg = FormClassGroup(D)
    assert cg.structure.exponent <= 2
    frame = quadratic_frame(cg)
    assert all(cusp_vanishes(frame, v) for v in cg.structure.vectors())
    t = ideal_class_counts(cg, 500)
    assert all(not cusp_coefficients(t, i).num.any() for i in range(cg.h))


def test_fundamental_list():
    ds = fundamental_discriminants(30)
    assert ds == [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24]


# ---------------------------------------------------------------- eta


def test_eta_examples():
    c = eta_product_coeffs([(1, 1), (23, 1)], 30)
    assert c[1:7].tolist() == [1, -1, -1, 0, 0, 1]
    assert c[4] == 0
    assert c.tolist() == naive_eta_product([(1, 1), (23, 1)], 30)
    # n = 24 is the first index where the -q^23 term of the eta(23z) factor enters
    assert c[24] == naive_eta_product([(1, 1), (23, 1)], 30)[24]


@pytest.mark.parametrize("levels", [[(1, 24)], [(2, 12)], [(1, 2), (11, 2)], [(1, 1), (23, 1)], [(1, 8), (2, 8)]])
def test_eta_against_naive(levels):
    assert eta_product_coeffs(levels, 120).tolist() == naive_eta_product(levels, 120)


def test_eta_offset_must_be_integral():
    with pytest.raises(NonIntegralWeightOffset):
        eta_product_coeffs([(1, 1)], 10)


def test_eta_identity_d23(table23):
    chars = [chi for chi in dual_group(table23.cg.structure) if not chi.is_trivial]
    eta = eta_product_coeffs([(1, 1), (23, 1)], 5000)
    for chi in chars:
        assert np.array_equal(char_coefficients(table23, chi).to_int()[1:5001], eta[1:])


# ---------------------------------------------------------------- I/O


def test_binary_round_trip(tmp_path, table23):
    path = tmp_path / "d23.bin"
    write_table(table23, path)
    header, counts = read_table(path)
    assert header == {"D": -23, "X": table23.X, "h": 3, "f": 1, "w": 2}
    assert np.array_equal(counts, table23.counts)
    assert path.stat().st_size == 40 + 4 * 3 * table23.X
    export_csv(table23, tmp_path / "d23.csv")
    lines = (tmp_path / "d23.csv").read_text().splitlines()
    assert lines[0] == "n,in_domain,1_1_6,2_-1_3,2_1_3"
    assert lines[2] == "2,1,0,1,1"


def test_cell_guard():
    with pytest.raises(MemoryError):
        ideal_class_counts(-23, 10**8)
