from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sticky_lab import krawtchouk as kr
from sticky_lab.numerics import binomial


def test_binary_values():
    for n in range(6):
        assert all(kr.binary_krawtchouk(n, 0, l) == 1 for l in range(n + 1))
    assert kr.binary_krawtchouk(3, 1, 1) == 1
    assert kr.binary_krawtchouk(4, 4, 1) == -1


@pytest.mark.parametrize("n", range(1, 7))
def test_binary_matches_character_sum(n):
    for k in range(n + 1):
        for l in range(n + 1):
            alpha = (1,) * l + (0,) * (n - l)
            assert kr.binary_krawtchouk(n, k, l) == kr.binary_krawtchouk_bruteforce(n, k, alpha)


def test_binary_inner_products():
    assert kr.binary_inner_product(3, 1, 1) == 3
    assert kr.binary_inner_product(5, 1, 2) == 0
    assert kr.binary_inner_product(4, 0, 0) == 1


def test_generalized_values():
    for n in range(1, 6):
        for p in (2, 3, 5):
            assert all(kr.generalized_krawtchouk(n, p, n, l) == 1 for l in range(n + 1))
    z = kr.generalized_krawtchouk_bruteforce(2, 3, 1, kr.alpha_with_zeros(2, 1))
    assert abs(z - kr.generalized_krawtchouk(2, 3, 1, 1)) < 1e-12
    assert kr.generalized_krawtchouk(2, 3, 1, 1) == 1


def test_generalized_binary_alignment():
    # k counts zeros of y and l zeros of alpha; the binary table counts ones
    for n in range(1, 8):
        for k in range(n + 1):
            for l in range(n + 1):
                assert kr.generalized_krawtchouk(n, 2, k, l) == kr.binary_krawtchouk(n, n - k, n - l)


@pytest.mark.parametrize("p", [2, 3, 4, 5])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_generalized_matches_character_sum(n, p):
    for k in range(n + 1):
        for l in range(n + 1):
            z = kr.generalized_krawtchouk_bruteforce(n, p, k, kr.alpha_with_zeros(n, l))
            assert abs(z.imag) < 1e-9
            assert abs(z.real - kr.generalized_krawtchouk(n, p, k, l)) < 1e-9


def test_generalized_inner_examples():
    assert kr.generalized_inner_product(2, 3, 1, 1) == 4
    assert kr.generalized_inner_product(4, 3, 1, 3) == 0
    assert kr.generalized_inner_product(3, 2, 2, 2) == 3
    with pytest.raises(ValueError):
        kr.generalized_inner_product(3, 4, 1, 1)


@pytest.mark.parametrize("p", [4, 6, 8, 9, 12])
def test_composite_orthogonality_holds(p):
    n = 5
    for r in range(n + 1):
        for s in range(n + 1):
            want = binomial(n, r) * (p - 1) ** (n - r) if r == s else 0
            assert kr.generalized_inner_product(n, p, r, s, require_prime=False) == want


def test_invariance():
    for k in range(5):
        for l in range(5):
            assert kr.invariance_check(4, 3, k, l).invariant
    with pytest.raises(ValueError):
        kr.invariance_check(9, 2, 1, 1)


def test_constant_function_expansion():
    # the all-ones row of the generalized table sits at k = n
    n, p = 4, 3
    c = kr.expansion_coefficients([1] * (n + 1), n, p)
    assert c.coeffs == (0,) * n + (1,)
    assert kr.reconstruct_ratio(c) == (1,) * (n + 1)


def test_indicator_round_trip():
    n, p = 5, 3
    f = [1] + [0] * n
    assert kr.reconstruct_ratio(kr.expansion_coefficients(f, n, p)) == tuple(f)
    zero = kr.ExpansionCoefficients((Fraction(0),) * (n + 1), n, p)
    assert kr.reconstruct_ratio(zero) == (0,) * (n + 1)


@given(st.integers(1, 7), st.integers(2, 6), st.data())
def test_expansion_round_trip(n, p, data):
    f = data.draw(st.lists(st.fractions(max_denominator=30), min_size=n + 1, max_size=n + 1))
    assert kr.reconstruct_ratio(kr.expansion_coefficients(f, n, p)) == tuple(f)


def test_expansion_length_check():
    with pytest.raises(ValueError):
        kr.expansion_coefficients([1, 2], 3, 2)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_generalized_reciprocity(p):
    assert kr.reciprocity_check(6, p).holds


def test_binary_weighted_reciprocity_fails_beyond_two():
    assert kr.reciprocity_check(5, 2, "binary").holds
    rep = kr.reciprocity_check(5, 3, "binary")
    assert not rep.holds
    assert (0, 1, Fraction(1, 32), Fraction(1, 16)) in rep.violations


def test_index_errors():
    with pytest.raises(IndexError):
        kr.binary_krawtchouk(3, 4, 0)
    with pytest.raises(ValueError):
        kr.krawtchouk_table(3, 3, "ternary")
