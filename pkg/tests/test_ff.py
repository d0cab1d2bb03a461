import random

import pytest

from jacsearch.ff import (
    CompositeCharacteristic,
    DivisionByZero,
    FieldMismatch,
    UnsupportedDegree,
    ZeroInput,
    batch_inv,
    field_new,
    is_probable_prime,
    is_qr,
    poly_factor_degrees,
    poly_irreducible,
    poly_mul,
    poly_add,
    poly_xgcd,
    sqrt,
)


def test_prime_field_arithmetic():
    F = field_new(7)
    assert F(3) * F(5) == 1
    assert F(3) + 5 == 1
    assert 2 - F(3) == 6
    assert F(3) / F(5) == F(3) * F(3)
    assert F.non_residue() == 3


def test_field_new_rejects_bad_input():
    for p in (2, 15, 1):
        with pytest.raises(CompositeCharacteristic):
            field_new(p)
    with pytest.raises(UnsupportedDegree):
        field_new(7, 4)


def test_mixing_fields_fails():
    with pytest.raises(FieldMismatch):
        field_new(7)(1) + field_new(11)(1)


@pytest.mark.parametrize("p", [2**61 - 1, 2**50 - 27, 2**89 - 1, 2**93 - 25])
def test_folding_reduction_matches_plain_modulus(p):
    F = field_new(p)
    rng = random.Random(p)
    for _ in range(200):
        a, b = rng.randrange(p), rng.randrange(p)
        assert (F(a) * F(b)).value == a * b % p


def test_probable_prime():
    assert is_probable_prime(2**61 - 1)
    assert is_probable_prime(2**89 - 1)
    assert not is_probable_prime(2**61 + 1)
    assert not is_probable_prime(561)
    assert not is_probable_prime(1)


@pytest.mark.parametrize("p,k", [(13, 1), (103, 1), (7, 2), (5, 3)])
def test_square_roots(p, k):
    F = field_new(p, k)
    assert not is_qr(F.non_residue())
    for a in F.elements():
        if not a:
            continue
        r = sqrt(a)
        if is_qr(a):
            assert r * r == a
        else:
            assert r is None


def test_quadratic_character_of_zero():
    with pytest.raises(ZeroInput):
        is_qr(field_new(7).zero)


def test_batch_inversion():
    F = field_new(101)
    values = [F(i) for i in range(1, 40)]
    for v, inv in zip(values, batch_inv(values)):
        assert v * inv == 1
    assert batch_inv([]) == []

    with pytest.raises(DivisionByZero) as exc:
        batch_inv([F(3), F(4), F(0), F(5)])
    assert exc.value.index == 2


def test_poly_xgcd_identity():
    F = field_new(101)
    a = [F(c) for c in [6, 11, 6, 1]]       # (x+1)(x+2)(x+3)
    b = [F(c) for c in [2, 3, 1]]           # (x+1)(x+2)
    g, s, t = poly_xgcd(a, b)
    assert g == b
    assert poly_add(poly_mul(s, a), poly_mul(t, b)) == g


def test_factor_degrees():
    # (x-1)(x-2)(x^2+1) over F_7, where x^2+1 is irreducible
    f = [2, -3, 3, -3, 1]
    assert poly_factor_degrees(f, field_new(7)) == [1, 1, 2]
    assert poly_factor_degrees(f, field_new(7, 2)) == [1, 1, 1, 1]
    # repeated factor (x-1)^2 (x^2+1)
    g = [1, -2, 2, -2, 1]
    assert poly_factor_degrees(g, field_new(7)) == [1, 1, 2]


def test_irreducibility():
    assert poly_irreducible([1, 0, 1], field_new(7))
    assert not poly_irreducible([1, 0, 1], field_new(13))
    assert not poly_irreducible([1, 0, 1], field_new(7, 2))
    assert not poly_irreducible([5], field_new(7))
