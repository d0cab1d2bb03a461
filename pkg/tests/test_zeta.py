import math
import random

import pytest
from sympy import Poly, nextprime, symbols

from jacsearch.curve import Jacobian, curve_new, twist
from jacsearch.ff import field_new, is_probable_prime
from jacsearch.genalg import EasyBound, is_b_easy
from jacsearch.oracle import naive_counts, naive_jacobian_order, opaque_group
from jacsearch.zeta import (
    FieldTooSmall,
    Inconclusive,
    InvalidCounts,
    LPolynomial,
    NoCandidate,
    NonDivisibleOrders,
    UnknownContext,
    derived_orders,
    extension_order,
    lpoly_from_counts,
    lpoly_from_orders,
    near_prime,
    normalize_label,
    quotient_order,
    recover_genus2,
    recover_genus3,
    security_equivalent_bits,
    smith_filter,
    trace_zero_order,
    twist_lpoly,
    validate_lpoly,
    weil_interval,
)

# Published genus 2 curves y^2 = f(x): (p, f low to high, a_1, a_2)
GENUS2 = {
    456579: (2**61 - 1, [456579, 1, 0, 0, 0, 1], 867588246, 503655589160075568),
    816: (2**61 - 1, [816, 1, 7, 2, 0, 1], 618350030, 415833882783789026),
    127861: (2**84 - 35, [127861, 1, 0, 0, 0, 1], -2092369310828, 35830907425009491385101310),
    89993: (2**84 - 35, [89993, 1, 0, 0, 0, 1], 1236014582768, -20956811918028115290034218),
    202214: (2**89 - 1, [202214, 1, 0, 0, 0, 1], -52033004229306, 1618004552234213280766854490),
    207686: (2**89 - 1, [207686, 1, 0, 0, 0, 1], 37333142265075, 1342175488412716989278850463),
    15466464: (2**89 - 1, [15466464, 81, 0, 0, 0, 1], -29105979141185, 216189507687913446441772723),
    1050: (2**93 - 25, [1050, 5, 3, 2, 0, 1], 20868893099084, 14008940235908131442826126566),
}

# Published genus 3 L-polynomials: (p, (a_1, a_2, a_3), #J(C))
GENUS3 = [
    (2**50 - 27, (13792821, 98748931364073, -4912096020329124903571),
     1427247710190335132030763894493884791800228867),
    (3 * 10**16 + 29, (-200710015, 49691549823351179, -9387711520293250802133155),
     5**2 * 373 * 2895442339877862336809237112865944284512053683),
    (2**61 - 1, (-255251897, 3731171990845206887, -1915761422452218541377951998),
     2**4 * 3**5 * 17 * 223 * 831781325652289358544190241299568732364985371373),
]


def lpoly2(t):
    p, _, a1, a2 = GENUS2[t]
    return LPolynomial.from_half(p, 2, [a1, a2])


def test_from_half_and_twist():
    P = LPolynomial.from_half(101, 2, [3, 7])
    assert P.coeffs == (1, 3, 7, 303, 10201)
    assert P.half == (3, 7)
    assert P.at(1) == sum(P.coeffs)
    assert twist_lpoly(P).coeffs == (1, -3, 7, -303, 10201)
    assert twist_lpoly(P).at(1) == P.at(-1)
    assert LPolynomial.from_dict(P.as_dict()) == P
    with pytest.raises(ValueError):
        LPolynomial.from_half(101, 2, [3])


@pytest.mark.parametrize("t,order", [
    (127861, 2**5 * 3**2 * 1299112566516217620665269205633002367450315129777),
    (202214, 2**2 * 3**2 * 5 * 2128466028980222265110760419187916380742710181533203),
])
def test_genus2_jacobian_orders(t, order):
    P = lpoly2(t)
    assert P.at(1) == order
    assert validate_lpoly(P).ok


@pytest.mark.parametrize("p,half,order", GENUS3)
def test_genus3_jacobian_orders(p, half, order):
    P = LPolynomial.from_half(p, 3, half)
    assert P.at(1) == order
    report = validate_lpoly(P)
    assert report.ok
    assert report.advisories == []


def test_prime_order_genus3_jacobian():
    p, half, order = GENUS3[0]
    assert near_prime(order) == (True, order, 1)


def test_extension_orders():
    P = lpoly2(456579)
    assert extension_order(P, 1) == P.at(1)
    assert extension_order(P, 2) == P.at(1) * P.at(-1)
    assert extension_order(P, 4) == extension_order(P, 2) * quotient_order(P, 4, 2)
    assert extension_order(P, 2) % 3 == 1
    with pytest.raises(ValueError):
        extension_order(P, 0)
    with pytest.raises(ValueError):
        quotient_order(P, 3, 2)
    with pytest.raises(ValueError):
        trace_zero_order(P, 5)


def test_trace_zero_near_primes_2_61():
    # Both J_{3/1}(C) and J_{3/1} of the twist are prime.
    P = lpoly2(456579)
    N = quotient_order(P, 3, 1)
    assert is_probable_prime(N)
    assert N.bit_length() == 244
    N_twist = quotient_order(twist_lpoly(P), 3, 1)
    assert is_probable_prime(N_twist)
    assert N_twist.bit_length() in (244, 245)

    order, exact = trace_zero_order(P, 3)
    assert (order, exact) == (N, True)


def test_trace_zero_order_with_cofactor():
    N = quotient_order(lpoly2(816), 3, 1)
    assert N.bit_length() == 244
    flag = near_prime(N)
    assert flag.cofactor == 5**2 * 547
    assert flag.largest_prime.bit_length() == 231
    assert not flag.is_near_prime


@pytest.mark.parametrize("t,label,cofactor,bits,j2_mod_3", [
    (89993, "J_3/1", 1, 336, 1),
    (15466464, "J_3/1", 7, 354, 2),
    (1050, "J_3/1", 7 * 313, 361, 0),
    (207686, "J_4/2", 13**2, 349, None),
])
def test_published_near_prime_groups(t, label, cofactor, bits, j2_mod_3):
    P = lpoly2(t)
    N = quotient_order(P, 3, 1) if label == "J_3/1" else quotient_order(P, 4, 2)
    assert N % cofactor == 0
    assert is_probable_prime(N // cofactor)
    assert (N // cofactor).bit_length() == bits
    if j2_mod_3 is not None:
        assert extension_order(P, 2) % 3 == j2_mod_3


def test_validate_lpoly_failures():
    q = 2**61 - 1
    report = validate_lpoly(LPolynomial.from_half(q, 2, [10**12, 0]))
    assert not report.ok
    assert "a_1" in report.violations[0]

    P = lpoly2(816)
    broken = LPolynomial(q, 2, (1,) + P.coeffs[1:4] + (q * q + 1,))
    assert any("functional equation" in v for v in validate_lpoly(broken).violations)
    assert not validate_lpoly(LPolynomial(q, 2, (2,) + P.coeffs[1:])).ok


def test_weil_interval():
    assert weil_interval(101, 1) == (82, 122)
    assert weil_interval(121, 1) == (100, 144)
    lo, hi = weil_interval(2**61 - 1, 2)
    assert lo <= lpoly2(816).at(1) <= hi


def test_lpoly_from_counts_predicts_next_count():
    # Create a small genus 2 curve and count points over F_p and F_p^2.
    p = 31
    rng = random.Random(4)
    F = field_new(p)
    while True:
        try:
            C = curve_new(2, F, [rng.randrange(p) for _ in range(5)] + [1])
            break
        except ValueError:
            continue
    N = [naive_counts(C, k) for k in (1, 2, 3)]
    P = lpoly_from_counts(p, 2, N[:2])

    # Newton's identities then give N_3.
    a1, a2, a3 = P.coeffs[1:4]
    s1, s2 = p + 1 - N[0], p**2 + 1 - N[1]
    s3 = -(a1 * s2 + a2 * s1 + 3 * a3)
    assert N[2] == p**3 + 1 - s3


def test_lpoly_from_counts_rejects_bad_input():
    with pytest.raises(InvalidCounts):
        lpoly_from_counts(101, 2, [100])
    with pytest.raises(InvalidCounts):
        lpoly_from_counts(101, 2, [10**6, 10**6])


def test_lpoly_from_orders():
    P = lpoly2(127861)
    assert lpoly_from_orders(P.q, 2, P.at(1), P.at(-1)) == P
    p, half, _ = GENUS3[1]
    P3 = LPolynomial.from_half(p, 3, half)
    assert lpoly_from_orders(p, 3, P3.at(1), P3.at(-1)) == P3
    assert lpoly_from_orders(101, 1, 107, 97).coeffs == (1, 5, 101)

    with pytest.raises(NonDivisibleOrders):
        lpoly_from_orders(P.q, 2, P.at(1), P.at(-1) + 1)
    with pytest.raises(FieldTooSmall):
        lpoly_from_orders(31, 3, 30000, 30000)


@pytest.mark.parametrize("t", [456579, 127861, 15466464])
def test_recover_genus2_published_curves(t):
    # #J(C) plus the twist as a black box determines P(z).
    p, f, _, _ = GENUS2[t]
    P = lpoly2(t)
    C = curve_new(2, field_new(p), f)
    recovered = recover_genus2(P.at(1), Jacobian(twist(C)), p, rng=random.Random(t))
    assert recovered == P


def test_recover_genus2_small_field():
    p = 10007
    rng = random.Random(3)
    for t in range(12, 40):
        try:
            C = curve_new(2, field_new(p), [t, 7, 3, 1, 2, 1])
            break
        except ValueError:
            continue
    order = naive_jacobian_order(C, rng)
    P = lpoly_from_orders(p, 2, order, naive_jacobian_order(twist(C), rng))
    assert recover_genus2(order, Jacobian(twist(C)), p, rng=rng) == P


def test_recover_without_candidates():
    with pytest.raises(NoCandidate):
        recover_genus2(1, opaque_group([2]), 2**61 - 1)
    with pytest.raises(FieldTooSmall):
        recover_genus3(100, opaque_group([2]), 1601)


def product_lpoly(q, traces):
    # Products of factors 1 - b z + q z^2 with |b| <= 2 sqrt(q) are valid L-polynomials.
    z = symbols("z")
    factors = 1
    for b in traces:
        factors *= 1 - b * z + q * z**2
    return LPolynomial(q, len(traces), tuple(int(c) for c in Poly(factors, z).all_coeffs()[::-1]))


def random_curve3(F, rng):
    while True:
        try:
            return curve_new(3, F, [rng.randrange(F.p) for _ in range(7)] + [1])
        except ValueError:
            continue


def test_recover_genus3_small_fields():
    rng = random.Random(7)
    for _ in range(200):
        q = nextprime(rng.randrange(1641, 4990))
        bound = math.isqrt(4 * q)
        P = product_lpoly(q, [rng.randint(-bound, bound) for _ in range(3)])
        assert validate_lpoly(P, roots=False).ok
        twist_box = opaque_group([P.at(-1)], seed=rng.randrange(1000))
        assert recover_genus3(P.at(1), twist_box, q, rng=rng) == P


@pytest.mark.slow
def test_recover_genus3_round_trip_p1709():
    p = 1709
    rng = random.Random(8)
    for _ in range(3):
        C = random_curve3(field_new(p), rng)
        order = naive_jacobian_order(C, rng)
        P = lpoly_from_orders(p, 3, order, naive_jacobian_order(twist(C), rng))
        assert recover_genus3(order, Jacobian(twist(C)), p, rng=rng) == P


@pytest.mark.slow
def test_recover_genus3_from_smooth_twist():
    # The twist order is smooth, so the search finds it first.
    p = 2**50 - 27
    P = LPolynomial.from_half(p, 3, [39141148, 1354965780525799, 18939879984661962930696])
    twist_order = (2**3 * 5**2 * 233 * 937 * 8053 * 18719 * 44171 * 1180799
                   * 13517389 * 307558308259)
    assert P.at(-1) == twist_order
    assert P.at(1) == 2**3 * 3 * 1083611 * 54880077749424473770842486727458448993
    assert is_b_easy(twist_order, EasyBound(2**24))
    assert not is_b_easy(P.at(1), EasyBound(2**24))

    C = curve_new(3, field_new(p), [648, 5, 1, 4, 1, 3, 0, 1])
    recovered = recover_genus3(P.at(-1), Jacobian(C), p, rng=random.Random(648))
    assert recovered == twist_lpoly(P)


def test_near_prime():
    assert near_prime(2**61 - 1) == (True, 2**61 - 1, 1)
    assert near_prime(3 * (2**127 - 1)).is_near_prime
    assert not near_prime(2**64).is_near_prime
    with pytest.raises(ValueError):
        near_prime(1)


def test_near_prime_with_unfactored_cofactor():
    # Two 100-bit primes, trial division only to 1000: size alone cannot rule out a large factor.
    hard = nextprime(2**99) * nextprime(2**100)
    with pytest.raises(Inconclusive):
        near_prime(hard, effort=1000, rho_retries=2)

    # Three 61-bit primes: no factor can reach 95% of the bits.
    three = nextprime(2**60) * nextprime(2**61) * nextprime(2**62)
    assert not near_prime(three, rho_retries=2).is_near_prime


def test_security_equivalent_bits():
    assert security_equivalent_bits(100, 2) == 100
    assert security_equivalent_bits(150, 3) == pytest.approx(150 * 8 / 9)
    assert security_equivalent_bits(244, 2, 2) == pytest.approx(244 * 9 / 14)
    assert security_equivalent_bits(244, 2, 3, trace_zero=True) == pytest.approx(244 * 5 / 6)
    assert security_equivalent_bits(244, 2, 3, trace_zero=True,
                                    three_divides_j2=True) == pytest.approx(244 * 4 / 5)
    with pytest.raises(UnknownContext):
        security_equivalent_bits(100, 3, 2)
    with pytest.raises(UnknownContext):
        security_equivalent_bits(100, 3, 3, trace_zero=True)


def test_smith_filter():
    x = symbols("x")
    F = field_new(7)
    one_cubic = Poly(x * (x - 1) * (x - 2) * (x - 3) * (x**3 + x + 1), x).all_coeffs()[::-1]
    assert smith_filter([int(c) for c in one_cubic], F)
    assert not smith_filter([0, -1, 0, 0, 0, 0, 0, 1], F)


def test_normalize_label():
    assert normalize_label("J_{3/1}") == "J_3/1"
    assert normalize_label("J_twist") == "J_twist"
    with pytest.raises(UnknownContext):
        normalize_label("J_5/1")


def test_derived_orders():
    P = lpoly2(456579)
    groups = {d.label: d for d in derived_orders(P, labels=("J_{3/1}", "J_3/1_twist", "T_3"))}
    assert set(groups) == {"J_3/1", "J_3/1_twist", "T_3"}

    j31 = groups["J_3/1"]
    assert j31.near_prime is True
    assert j31.bits == 244
    assert j31.security_bits == pytest.approx(244 * 5 / 6)
    assert groups["T_3"].exact
    assert groups["T_3"].order == j31.order

    row = j31.as_dict()
    assert row["order"] == str(j31.order)
    assert row["largest_prime_bits"] == 244
    assert row["factors"] == {str(j31.order): 1}
