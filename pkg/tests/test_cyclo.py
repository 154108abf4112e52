import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from classmoments.cyclo import (
    Cyclotomic,
    abs_square,
    cyclotomic_poly,
    is_real_times_root_of_unity,
    numeric,
    real_times_root_witness,
    root_of_unity,
)

CONDUCTORS = [1, 2, 3, 4, 5, 6, 7, 8, 12, 15]


def zeta(m, k=1):
    return root_of_unity(m, k)


@st.composite
def cyclotomics(draw, m=None):
    m = m or draw(st.sampled_from(CONDUCTORS))
    coeffs = draw(st.lists(st.fractions(max_denominator=6, min_value=-5, max_value=5), min_size=m, max_size=m))
    return Cyclotomic.from_fractions(m, coeffs)


def test_cyclotomic_polys():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)
    # degree is Euler's phi
    for m in range(1, 40):
        phi = sum(1 for k in range(1, m + 1) if math.gcd(k, m) == 1)
        assert len(cyclotomic_poly(m)) - 1 == phi


def test_root_sums():
    assert zeta(3) + zeta(3, 2) == -1
    assert sum((zeta(6, i) for i in range(6)), Cyclotomic.from_rational(0)).is_zero()
    v = zeta(7) + zeta(7, 2) + zeta(7, 4)
    assert v * v + v + 2 == 0
    assert abs(numeric(v) - complex(-0.5, math.sqrt(7) / 2)) < 1e-9


def test_abs_square_examples():
    v = zeta(7) + zeta(7, 2) + zeta(7, 4)
    assert abs_square(v) == 2
    assert abs_square(zeta(3) + zeta(3, 2)) == 1
    assert abs_square(Cyclotomic.from_rational(0)).is_zero()


def test_numeric_examples():
    assert abs(numeric(zeta(4)) - 1j) < 1e-12
    assert numeric(Cyclotomic.from_rational(0)) == 0


def test_real_times_root_examples():
    two_cos = zeta(5) + zeta(5, 4)
    assert real_times_root_witness(two_cos * zeta(3)) == 3
    assert not is_real_times_root_of_unity(zeta(7) + zeta(7, 2) + zeta(7, 4))
    assert real_times_root_witness(Cyclotomic.from_rational(-3)) == 1


def test_mixed_conductor_equality():
    assert zeta(3) == zeta(6, 2)
    assert zeta(4) * zeta(4) == -1
    assert (zeta(3) * zeta(4)).m == 12


def test_text_round_trip():
    v = zeta(7) * Fraction(3, 2) - zeta(7, 3) + 5
    assert Cyclotomic.from_text(v.to_text()) == v
    assert Cyclotomic.from_text("0 @ 5").is_zero()


@given(cyclotomics(), cyclotomics(), cyclotomics())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == 0


@given(cyclotomics(), cyclotomics())
def test_conj_is_ring_involution(a, b):
    assert a.conj().conj() == a
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()
    s = abs_square(a)
    assert s.conj() == s
    assert numeric(s).real >= -1e-9


@given(cyclotomics())
def test_numeric_matches_arithmetic(a):
    assert abs(numeric(a * a) - numeric(a) ** 2) < 1e-9 * (1 + abs(numeric(a)) ** 2)


@given(cyclotomics())
def test_canonical_form(a):
    assert Cyclotomic(a.m, a.num, a.den) == a
    assert a.is_zero() == (not any(a.coeffs))


def _numeric_oracle(v: Cyclotomic) -> bool:
    z = numeric(v)
    if abs(z) < 1e-9:
        return True
    M = 2 * v.m if v.m % 2 else v.m  # lcm(2, m): roots of unity in Q(zeta_m)
    return abs((z / abs(z)) ** (2 * M) - 1) < 1e-7


def test_real_times_root_against_numeric_oracle():
    rng = random.Random(12345)
    agree = positives = 0
    for trial in range(1000):
        m = rng.choice([3, 4, 5, 7, 8, 12])
        if trial % 2:
            v = Cyclotomic.from_rational(0, m)
            for _ in range(rng.randint(1, 4)):
                v = v + zeta(m, rng.randrange(m))
        else:
            a, b = rng.randrange(m), rng.randrange(m)
            v = (zeta(m, a) + zeta(m, -a)) * zeta(m, b) * rng.choice([1, -2, 3])
        exact = is_real_times_root_of_unity(v)
        positives += exact
        agree += exact == _numeric_oracle(v)
    assert agree == 1000
    assert 300 < positives < 1000


def test_bad_inputs():
    with pytest.raises(ValueError):
        Cyclotomic(0, [1])
    with pytest.raises(ValueError):
        (zeta(3) + 0).to_fraction()
    with pytest.raises(ValueError):
        zeta(3).lift(4)
