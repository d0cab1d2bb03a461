import random

import pytest

from jacsearch.curve import SingularCurve, curve_new, twist
from jacsearch.ff import field_new
from jacsearch.genalg import group_exponent
from jacsearch.oracle import (
    FieldTooLarge,
    OpaqueGroup,
    naive_counts,
    naive_jacobian_order,
    naive_order,
    opaque_group,
)
from jacsearch.zeta import lpoly_from_counts


def make_curve(g, p, seed):
    rng = random.Random(seed)
    F = field_new(p)
    while True:
        try:
            return curve_new(g, F, [rng.randrange(p) for _ in range(2 * g + 1)] + [1])
        except SingularCurve:
            continue


def brute_force_count(C):
    # Affine solutions of y^2 = f(x) plus the point at infinity.
    p = C.field.p
    f = C.coefficients()
    total = 1
    for x in range(p):
        fx = sum(c * pow(x, i, p) for i, c in enumerate(f)) % p
        total += sum(1 for y in range(p) if (y * y - fx) % p == 0)
    return total


def test_opaque_group_contract():
    G = opaque_group([4, 6], seed=1)
    assert G.true_order() == 24
    assert G.exponent() == 12
    assert len({G.element([i, j]) for i in range(4) for j in range(6)}) == 24

    a, b = G.element([1, 2]), G.element([3, 5])
    assert G.compose(a, b) == G.element([0, 1])
    assert G.is_identity(G.compose(a, G.invert(a)))
    assert G.element_order(G.element([1, 1])) == 12
    assert G.element_order(G.identity) == 1
    assert len(G.serialize(a)) == 1


def test_opaque_group_bounds():
    with pytest.raises(ValueError):
        opaque_group([2**31, 2**31])
    with pytest.raises(ValueError):
        OpaqueGroup([0, 5])


def test_opaque_group_exponent_matches_debug_channel():
    G = opaque_group([2, 12, 60], seed=4)
    assert group_exponent(G, B=100, rng=random.Random(1)) == G.exponent()


@pytest.mark.parametrize("g,p,seed", [(2, 7, 1), (2, 101, 2), (3, 101, 3), (3, 53, 4)])
def test_point_count_strategies_agree(g, p, seed):
    C = make_curve(g, p, seed)
    table = naive_counts(C, 1, method="table")
    assert table == naive_counts(C, 1, method="character")
    assert table == brute_force_count(C)


def test_counts_over_extension_fields():
    C = make_curve(2, 7, 5)
    over_f49 = curve_new(2, field_new(7, 2), C.coefficients())
    assert naive_counts(C, 2) == naive_counts(over_f49, 1)


def test_naive_counts_rejects_bad_requests():
    C = make_curve(2, 10007, 6)
    with pytest.raises(FieldTooLarge):
        naive_counts(C, 2)
    with pytest.raises(ValueError):
        naive_counts(C, 0)
    with pytest.raises(ValueError):
        naive_counts(make_curve(2, 7, 7), 2, method="table")
    with pytest.raises(ValueError):
        naive_counts(make_curve(2, 7, 7), 1, method="sieve")


def test_naive_order():
    G = opaque_group([2 * 9973], seed=8)
    assert naive_order(G, G.element([2]), 20000) == 9973
    assert naive_order(G, G.element([1]), 20000) == 2 * 9973
    assert naive_order(G, G.identity, 10) == 1
    with pytest.raises(ValueError):
        naive_order(G, G.element([1]), 100)


def test_naive_jacobian_order_from_element_orders():
    # q^2 > 2^16 so the order comes from element orders, not counts.
    p = 257
    C = make_curve(2, p, 9)
    P = lpoly_from_counts(p, 2, [naive_counts(C, 1), naive_counts(C, 2)])
    rng = random.Random(10)
    assert naive_jacobian_order(C, rng) == P.at(1)
    assert naive_jacobian_order(twist(C), rng) == P.at(-1)


def test_naive_jacobian_order_limit():
    C = make_curve(2, 2**61 - 1, 11)
    with pytest.raises(FieldTooLarge):
        naive_jacobian_order(C)
