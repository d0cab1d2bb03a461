import random

import pytest

from jacsearch.curve import (
    BadDegree,
    CurveMismatch,
    NotMonic,
    SingularCurve,
    Jacobian,
    curve_new,
    jac_add,
    jac_batch,
    jac_double,
    jac_exp,
    jac_hash,
    jac_neg,
    jac_random,
    twist,
)
from jacsearch.ff import field_new, poly_eval, sqrt
from jacsearch.oracle import naive_counts, naive_jacobian_order
from jacsearch.zeta import extension_order, lpoly_from_counts


def random_curve(g, F, rng):
    while True:
        try:
            return curve_new(g, F, [rng.randrange(F.p) for _ in range(2 * g + 1)] + [1])
        except SingularCurve:
            continue


def test_curve_validation():
    F = field_new(101)
    with pytest.raises(SingularCurve):
        curve_new(2, F, [0, 0, 0, 0, 0, 1])          # x^5
    with pytest.raises(BadDegree):
        curve_new(2, F, [1, 0, 0, 0, 1])             # degree 4
    with pytest.raises(BadDegree):
        curve_new(4, F, [1] * 10)
    with pytest.raises(NotMonic):
        curve_new(2, F, [1, 0, 0, 0, 0, 2])


@pytest.mark.parametrize("g,p", [(2, 10007), (3, 10007), (2, 2**61 - 1), (3, 2**50 - 27)])
def test_group_law(g, p):
    # Create a random curve and random divisors.
    rng = random.Random(g * p)
    C = random_curve(g, field_new(p), rng)
    J = Jacobian(C)
    a, b, c = (J.random(rng) for _ in range(3))

    # Explicit formulas agree with Cantor's algorithm and results stay reduced.
    assert J.compose(a, b) == J._cantor(a, b)
    assert J.compose(a, a) == J._cantor(a, a)
    assert J.compose(a, b).is_valid()

    # Abelian group axioms.
    assert J.compose(a, b) == J.compose(b, a)
    assert J.compose(J.compose(a, b), c) == J.compose(a, J.compose(b, c))
    assert J.compose(a, J.identity) == a
    assert J.is_identity(J.compose(a, J.invert(a)))

    # Batched operations give the same results as single ones.
    pairs = [(a, b), (b, c), (a, a), (c, J.identity), (a, J.invert(a))]
    assert J.batch_compose(pairs) == [J.compose(x, y) for x, y in pairs]


def test_exponentiation():
    rng = random.Random(5)
    C = curve_new(2, field_new(2**61 - 1), [816, 1, 7, 2, 0, 1])
    D = jac_random(C, rng)
    assert jac_exp(D, 2) == jac_double(D)
    assert jac_exp(D, 0) == Jacobian(C).identity
    J = Jacobian(C)
    assert J.exp(D, 77) == J.compose(J.exp(D, 70), J.exp(D, 7))
    assert J.exp_batch([D, jac_neg(D)], 1001) == [J.exp(D, 1001), J.invert(J.exp(D, 1001))]
    with pytest.raises(ValueError):
        jac_exp(D, -1)


def random_point(J, rng):
    # Degree-one divisor (x - x0, y0) of an affine point.
    while True:
        x = J.field.random(rng)
        y = sqrt(poly_eval(J.f, x))
        if y is not None:
            return J._make([-x, J.field.one], [y] if y else [])


@pytest.mark.parametrize("g", [2, 3])
def test_jac_add_and_batch(g):
    rng = random.Random(20 + g)
    C = random_curve(g, field_new(10007), rng)
    J = Jacobian(C)
    a, b = jac_random(C, rng), jac_random(C, rng)
    P, Q, R = (random_point(J, rng) for _ in range(3))
    shared_1, shared_2 = J._cantor(P, Q), J._cantor(P, R)

    assert jac_add(a, b) == J._cantor(a, b)
    assert jac_add(a, jac_neg(a)) == J.identity

    # Pairs the explicit formulas cannot take go through Cantor inside the same batch.
    pairs = [
        (a, b),
        (a, jac_neg(a)),
        (a, a),
        (a, J.identity),
        (J.identity, J.identity),
        (P, Q),
        (P, jac_neg(P)),
        (shared_1, shared_2),
        (b, a),
    ]
    results = jac_batch(pairs)
    assert results == [J._cantor(x, y) for x, y in pairs]
    assert results[1] == results[4] == results[6] == J.identity
    assert results[0] == results[-1]
    assert all(D.is_valid() for D in results)
    assert jac_batch([]) == []

    other = random_curve(g, field_new(10007), rng)
    with pytest.raises(CurveMismatch):
        jac_add(a, jac_random(other, rng))


def test_hash_ignores_sign():
    rng = random.Random(2)
    C = curve_new(3, field_new(10007), [3, 1, 4, 1, 5, 9, 2, 1])
    D = jac_random(C, rng)
    assert jac_hash(D) == jac_hash(jac_neg(D))
    assert jac_hash(Jacobian(C).identity) == 0


@pytest.mark.parametrize("g,p,seed", [(2, 101, 1), (2, 101, 2), (3, 31, 3)])
def test_order_annihilates_jacobian_and_twist(g, p, seed):
    # Build a small curve and compute P(z) from point counts.
    rng = random.Random(seed)
    C = random_curve(g, field_new(p), rng)
    P = lpoly_from_counts(p, g, [naive_counts(C, k) for k in range(1, g + 1)])

    # P(1) kills J(C), P(-1) kills the twist.
    for curve, order in ((C, P.at(1)), (twist(C), P.at(-1))):
        J = Jacobian(curve)
        for D in J.exp_batch([J.random(rng) for _ in range(10)], order):
            assert J.is_identity(D)

    # The twist order agrees with the oracle.
    assert naive_jacobian_order(twist(C)) == P.at(-1)


def test_extension_field_jacobian():
    # The same curve over F_{p^2} has order P(1)P(-1).
    p, g = 31, 2
    rng = random.Random(11)
    C = random_curve(g, field_new(p), rng)
    f = C.coefficients()
    P = lpoly_from_counts(p, g, [naive_counts(C, k) for k in (1, 2)])
    F2 = field_new(p, 2)
    J2 = Jacobian(curve_new(g, F2, f))
    order = extension_order(P, 2)
    assert order == P.at(1) * P.at(-1)
    for D in J2.exp_batch([J2.random(rng) for _ in range(10)], order):
        assert J2.is_identity(D)
