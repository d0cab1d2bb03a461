"""
zeta.py

L-polynomials of genus 2 and 3 curves: recovery from a known #J(C) using the
quadratic twist as a black box, validation against the Weil constraints,
exact orders of extension-field Jacobians, quotients and trace zero
varieties, and near-prime classification with security annotations.

Key features:
  - LPolynomial values with exact evaluation and decimal-string serialization
  - Orders over F_{q^k} as exact circulant determinants (no complex floats)
  - Genus 2 recovery over at most eleven candidates for a_1
  - Genus 3 recovery by one baby-step giant-step search over the (at most 31)
    windows of P(-1) candidates, with +/- matching and batched giant steps
  - near_prime with trial division, Pollard rho and strong probable-prime tests

Usage examples:
  >>> P = LPolynomial.from_half(2**61 - 1, 2, [618350030, 415833882783789026])
  >>> validate_lpoly(P).ok
  True
  >>> near_prime(quotient_order(P, 3, 1))
"""

import logging
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import gmpy2
import mpmath
import numpy as np
from sympy import Matrix, factorint, pollard_rho, primerange

from .ff import Field, is_probable_prime, poly_factor_degrees
from .genalg import BlackBoxGroup, refine_candidates


class NoCandidate(ArithmeticError):
    pass


class Ambiguous(ArithmeticError):
    pass


class Inconclusive(ArithmeticError):
    pass


class FieldTooSmall(ValueError):
    pass


class NonDivisibleOrders(ValueError):
    pass


class InvalidCounts(ValueError):
    pass


class UnknownContext(ValueError):
    pass


@dataclass(frozen=True)
class LPolynomial:
    """P(z) = a_0 + a_1 z + ... + a_{2g} z^{2g}."""

    q: int
    g: int
    coeffs: tuple

    @classmethod
    def from_half(cls, q: int, g: int, half: Sequence[int]) -> "LPolynomial":
        """Complete a_1..a_g to the full polynomial with the functional equation."""
        if len(half) != g:
            raise ValueError(f"expected {g} coefficients, got {len(half)}")
        a = [1] + [int(x) for x in half]
        for i in range(g - 1, -1, -1):
            a.append(q ** (g - i) * a[i])
        return cls(q, g, tuple(a))

    def at(self, z: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    @property
    def half(self) -> tuple:
        return self.coeffs[1:self.g + 1]

    def as_dict(self) -> dict:
        return {"q": str(self.q), "g": self.g, "coeffs": [str(a) for a in self.coeffs]}

    @classmethod
    def from_dict(cls, data: dict) -> "LPolynomial":
        return cls(int(data["q"]), int(data["g"]), tuple(int(a) for a in data["coeffs"]))


def twist_lpoly(P: LPolynomial) -> LPolynomial:
    return LPolynomial(P.q, P.g, tuple(a if i % 2 == 0 else -a for i, a in enumerate(P.coeffs)))


def extension_order(P: LPolynomial, k: int) -> int:
    """
    #J(C/F_{q^k}), the product of P over the k-th roots of unity, as the
    determinant of the circulant matrix of P reduced mod z^k - 1.
    """
    if k < 1:
        raise ValueError(f"extension degree must be positive, got {k}")
    if k == 1:
        return P.at(1)
    c = [0] * k
    for i, a in enumerate(P.coeffs):
        c[i % k] += a
    M = Matrix(k, k, lambda r, s: c[(s - r) % k])
    return int(M.det(method="bareiss"))


def quotient_order(P: LPolynomial, a: int, b: int) -> int:
    """#J_{a/b}(C) = #J_a(C) / #J_b(C)."""
    if a % b:
        raise ValueError(f"quotient J_{a}/J_{b} needs b | a")
    num, den = extension_order(P, a), extension_order(P, b)
    if den == 0 or num % den:
        raise NonDivisibleOrders(f"#J_{b} = {den} does not divide #J_{a} = {num}")
    return num // den


def trace_zero_order(P: LPolynomial, k: int) -> tuple:
    """(#J_{k/1}(C), exact): exact is True when k does not divide #J(C), so T_k = J_{k/1}."""
    if k not in (2, 3):
        raise ValueError(f"trace zero varieties are supported for k in (2, 3), got {k}")
    return quotient_order(P, k, 1), P.at(1) % k != 0


# -- Weil constraints ----------------------------------------------------------

def weil_interval(q: int, g: int) -> tuple:
    """Integer bounds [ceil((sqrt(q)-1)^{2g}), floor((sqrt(q)+1)^{2g})]."""
    r = math.isqrt(q)
    if r * r == q:
        return (r - 1) ** (2 * g), (r + 1) ** (2 * g)
    digits = g * len(str(q)) + 30
    with mpmath.workdps(digits):
        s = mpmath.sqrt(q)
        lo = int(mpmath.ceil((s - 1) ** (2 * g)))
        hi = int(mpmath.floor((s + 1) ** (2 * g)))
    return lo, hi


def _coefficient_bound_ok(a: int, q: int, g: int, i: int) -> bool:
    """|a_i| <= C(2g, i) q^{i/2}, squared to stay in integers."""
    return a * a <= math.comb(2 * g, i) ** 2 * q ** i


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    advisories: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_lpoly(P: LPolynomial, roots: bool = True, max_extension: int = 4) -> ValidationReport:
    """
    Exact checks (a_0, functional equation, coefficient bounds, Weil intervals
    of #J over F_{q^k} for k <= max_extension) plus an advisory numeric check
    that the roots of P(w/sqrt(q)) lie on the unit circle.
    """
    report = ValidationReport()
    q, g, a = P.q, P.g, P.coeffs
    if len(a) != 2 * g + 1:
        report.violations.append(f"degree {len(a) - 1} is not 2g = {2 * g}")
        return report
    if a[0] != 1:
        report.violations.append(f"a_0 = {a[0]} is not 1")
    for i in range(g):
        if a[2 * g - i] != q ** (g - i) * a[i]:
            report.violations.append(f"functional equation fails at a_{2 * g - i}")
    for i in range(1, g + 1):
        if not _coefficient_bound_ok(a[i], q, g, i):
            report.violations.append(f"|a_{i}| exceeds C({2 * g},{i}) q^{i / 2}")
    if report.violations:
        return report
    for k in range(1, max_extension + 1):
        order = extension_order(P, k)
        lo, hi = weil_interval(q ** k, g)
        if not lo <= order <= hi:
            report.violations.append(f"#J over F_(q^{k}) = {order} outside the Weil interval")
    if roots:
        # coefficients of P(w / sqrt(q)); its roots lie on |w| = 1
        normalized = [float(Fraction(c, q ** (i // 2))) / (math.sqrt(q) if i % 2 else 1.0)
                      for i, c in enumerate(a)]
        found = np.roots(normalized[::-1])
        worst = float(np.max(np.abs(np.abs(found) - 1.0))) if len(found) else 0.0
        if worst > 1e-6:
            report.advisories.append(f"numeric roots deviate from |w| = 1 by {worst:.2e}")
    return report


# -- recovery from #J(C) ---------------------------------------------------------

def _check_recovered(P: LPolynomial, P1: int) -> LPolynomial:
    report = validate_lpoly(P, roots=False)
    if not report.ok or P.at(1) != P1:
        raise NoCandidate(f"recovered polynomial fails validation: {report.violations}")
    return P


def _resolve(twist_box: BlackBoxGroup, candidates: dict, rng: random.Random) -> int:
    """The unique candidate value of #J(C~); candidates maps P(-1) values to coefficient data."""
    if not candidates:
        raise NoCandidate("no candidate for #J of the twist annihilates a random element")
    survivors = refine_candidates(twist_box, candidates, rng)
    if not survivors:
        raise NoCandidate("every candidate for #J of the twist was eliminated")
    if len(survivors) > 1:
        raise Ambiguous(f"{len(survivors)} candidates for #J of the twist remain: {survivors}")
    return survivors[0]


def recover_genus2(P1: int, twist_box: BlackBoxGroup, q: int,
                   rng: Optional[random.Random] = None) -> LPolynomial:
    """
    L-polynomial of a genus 2 curve C from P(1) = #J(C), with J(C~) as a black
    box. P(-1) = P(1) - 2(q+1)a_1 and a_1 has at most eleven possible values.
    """
    rng = rng or random.Random(0)
    lo, hi = weil_interval(q, 2)
    target = P1 - q * q - 1
    center = target // (q + 1)
    table = {}
    for a1 in range(center - 6, center + 8):
        if abs((q + 1) * a1 - target) >= 6 * (q + 1):
            continue
        a2 = target - (q + 1) * a1
        if not (_coefficient_bound_ok(a1, q, 2, 1) and _coefficient_bound_ok(a2, q, 2, 2)):
            continue
        Pm1 = P1 - 2 * (q + 1) * a1
        if lo <= Pm1 <= hi:
            table[Pm1] = (a1, a2)
    logging.info("Genus 2 recovery: %d candidates for a_1", len(table))
    if not table:
        raise NoCandidate(f"no a_1 is consistent with #J(C) = {P1}")

    with twist_box.phase("recovery"):
        values = sorted(table)
        alpha = twist_box.random(rng)
        beta = twist_box.exp(alpha, 2 * (q + 1))
        x = twist_box.exp(alpha, values[0])
        hits, prev = [], values[0]
        for value in values:
            if value != prev:
                x = twist_box.compose(x, twist_box.exp(beta, (value - prev) // (2 * (q + 1))))
                prev = value
            if twist_box.is_identity(x):
                hits.append(value)
        Pm1 = _resolve(twist_box, {v: table[v] for v in hits}, rng)
    return _check_recovered(LPolynomial.from_half(q, 2, table[Pm1]), P1)


def _genus3_windows(P1: int, q: int) -> list:
    """(a1, a2_lo, a2_hi) for every admissible a_1, with a_2 clipped to all bounds."""
    lo, hi = weil_interval(q, 3)
    R = P1 - q ** 3 - 1
    c0 = 2 * (q ** 3 + 1) - P1
    a3_bound = math.isqrt(400 * q ** 3)
    a2_bound = 15 * q
    step = 2 * (q + 1)
    pm1_lo, pm1_hi = -(-(lo - c0) // step), (hi - c0) // step
    center = R // (q * q + 1)
    windows = []
    for a1 in range(center - 16, center + 17):
        if 2 * abs(a1 * (q * q + 1) - R) >= 31 * (q * q + 1):
            continue
        if not _coefficient_bound_ok(a1, q, 3, 1):
            continue
        delta = R - a1 * (q * q + 1)
        a2_lo = max(-(-(delta - a3_bound) // (q + 1)), -a2_bound, pm1_lo)
        a2_hi = min((delta + a3_bound) // (q + 1), a2_bound, pm1_hi)
        if a2_lo <= a2_hi:
            windows.append((a1, a2_lo, a2_hi))
    return windows


def _genus3_matches(twist_box: BlackBoxGroup, alpha, c0: int, q: int, windows: list) -> set:
    """Every a_2 inside the windows with alpha^(c0 + 2(q+1)a_2) = 1."""
    G = twist_box
    total = sum(hi - lo + 1 for _, lo, hi in windows)
    M = math.isqrt(max(1, total // 2)) + 1
    beta = G.exp(alpha, 2 * (q + 1))

    baby = {}
    x = G.identity
    for e in range(M + 1):
        baby.setdefault(G.hash(x), []).append((e, x))
        x = G.compose(x, beta)
    stride = G.exp(beta, 2 * M + 1)

    gamma0 = G.exp(alpha, c0)
    centers = [lo + M for _, lo, _ in windows]
    ys = [G.compose(gamma0, G.exp(beta, t)) for t in centers]
    active = list(range(len(windows)))
    found = set()
    while active:
        for idx in active:
            y, t = ys[idx], centers[idx]
            _, lo, hi = windows[idx]
            for e, elem in baby.get(G.hash(y), ()):
                for a2, ok in ((t - e, y == elem), (t + e, e and y == G.invert(elem))):
                    if ok and lo <= a2 <= hi:
                        found.add(a2)
        active = [i for i in active if centers[i] - M + 2 * M + 1 <= windows[i][2]]
        stepped = G.batch_compose([(ys[i], stride) for i in active])
        for i, y in zip(active, stepped):
            ys[i] = y
            centers[i] += 2 * M + 1
    return found


def recover_genus3(P1: int, twist_box: BlackBoxGroup, q: int,
                   rng: Optional[random.Random] = None, attempts: int = 5) -> LPolynomial:
    """
    L-polynomial of a genus 3 curve C (q > 1640) from P(1) = #J(C), with
    J(C~) as a black box. P(-1) = 2(q^3+1) + 2(q+1)a_2 - P(1), so a single
    search over a_2 covers every a_1 window at once.
    """
    if q <= 1640:
        raise FieldTooSmall(f"genus 3 recovery needs q > 1640, got {q}")
    rng = rng or random.Random(0)
    windows = _genus3_windows(P1, q)
    logging.info("Genus 3 recovery: %d windows for a_1, %d values of a_2",
                 len(windows), sum(hi - lo + 1 for _, lo, hi in windows))
    if not windows:
        raise NoCandidate(f"no a_1 is consistent with #J(C) = {P1}")
    c0 = 2 * (q ** 3 + 1) - P1
    R = P1 - q ** 3 - 1

    with twist_box.phase("recovery"):
        for attempt in range(attempts):
            a2_values = _genus3_matches(twist_box, twist_box.random(rng), c0, q, windows)
            if len(a2_values) <= 10000:
                break
            logging.debug("Genus 3 recovery: %d matches, element order too small", len(a2_values))
        table = {}
        for a2 in a2_values:
            options = []
            for a1, lo, hi in windows:
                a3 = R - a1 * (q * q + 1) - a2 * (q + 1)
                if lo <= a2 <= hi and _coefficient_bound_ok(a3, q, 3, 3):
                    options.append((a1, a2, a3))
            table[c0 + 2 * (q + 1) * a2] = options
        Pm1 = _resolve(twist_box, table, rng)

    options = table[Pm1]
    valid = [LPolynomial.from_half(q, 3, o) for o in options]
    valid = [P for P in valid if validate_lpoly(P, roots=False).ok]
    if not valid:
        raise NoCandidate(f"no valid L-polynomial with P(-1) = {Pm1}")
    if len(valid) > 1:
        raise Ambiguous(f"{len(valid)} L-polynomials share P(1) and P(-1)")
    return _check_recovered(valid[0], P1)


# -- L-polynomials from counts or both orders -------------------------------------

def lpoly_from_counts(q: int, g: int, counts: Sequence[int]) -> LPolynomial:
    """a_1..a_g from N_1..N_g by Newton's identities, k a_k = -sum s_i a_{k-i}."""
    if len(counts) < g:
        raise InvalidCounts(f"need N_1..N_{g}, got {len(counts)} counts")
    s = [None] + [q ** i + 1 - int(counts[i - 1]) for i in range(1, g + 1)]
    a = [1]
    for k in range(1, g + 1):
        total = -sum(s[i] * a[k - i] for i in range(1, k + 1))
        if total % k:
            raise InvalidCounts(f"counts give a non-integral a_{k}")
        a.append(total // k)
    P = LPolynomial.from_half(q, g, a[1:])
    report = validate_lpoly(P, roots=False)
    if not report.ok:
        raise InvalidCounts(f"counts {list(counts)} give an invalid L-polynomial: {report.violations}")
    return P


def lpoly_from_orders(q: int, g: int, P1: int, Pm1: int) -> LPolynomial:
    """P(z) from #J(C) = P(1) and #J(C~) = P(-1) for g <= 3 (q > 1640 when g = 3)."""
    if g == 1:
        half = [(P1 - Pm1) // 2]
    elif g == 2:
        half = [(P1 - Pm1) // (2 * (q + 1)), (P1 + Pm1) // 2 - (q * q + 1)]
    elif g == 3:
        if q <= 1640:
            raise FieldTooSmall(f"genus 3 needs q > 1640, got {q}")
        a2 = (P1 + Pm1) // (2 * (q + 1)) - (q * q - q + 1)
        odd = (P1 - Pm1) // 2
        a1 = (2 * odd + q * q + 1) // (2 * (q * q + 1))
        half = [a1, a2, odd - (q * q + 1) * a1]
    else:
        raise ValueError(f"genus {g} not supported")
    P = LPolynomial.from_half(q, g, half)
    if P.at(1) != P1 or P.at(-1) != Pm1:
        raise NonDivisibleOrders(f"({P1}, {Pm1}) is not a pair of Jacobian orders for q = {q}")
    return P


# -- factorization and security -------------------------------------------------

class NearPrime(NamedTuple):
    is_near_prime: bool
    largest_prime: int
    cofactor: int


@lru_cache(maxsize=4)
def _prime_product(limit: int):
    """Product of all primes <= limit, by a product tree."""
    level = [gmpy2.mpz(p) for p in primerange(2, limit + 1)]
    while len(level) > 1:
        level = [level[i] * level[i + 1] if i + 1 < len(level) else level[i]
                 for i in range(0, len(level), 2)]
    return level[0] if level else gmpy2.mpz(1)


def partial_factor(N: int, effort: int = 1 << 24, rho_retries: int = 40,
                   rho_steps: int = 1 << 12) -> tuple:
    """
    ({prime: exponent}, remainder): every prime <= ``effort`` (found through
    one gcd with the product of those primes) plus whatever Pollard rho
    splits off; the remainder is 1 or a composite with no factor <= effort.
    """
    primes, rest = {}, []
    small = int(gmpy2.gcd(N, _prime_product(effort) % N))
    for p in (factorint(small) if small > 1 else {}):
        while N % p == 0:
            N //= p
            primes[p] = primes.get(p, 0) + 1
    stack = [N]
    while stack:
        n = stack.pop()
        if n == 1:
            continue
        if is_probable_prime(n):
            primes[n] = primes.get(n, 0) + 1
            continue
        d = pollard_rho(n, retries=rho_retries, max_steps=rho_steps)
        if d is None or d in (1, n):
            rest.append(n)
        else:
            stack.extend([d, n // d])
    return primes, math.prod(rest)


def near_prime(N: int, threshold: float = 0.95, effort: int = 1 << 24,
               rho_retries: int = 40) -> NearPrime:
    """N has a prime factor with at least ``threshold`` of its bits (Inconclusive if undecidable)."""
    if N < 2:
        raise ValueError(f"near_prime needs N >= 2, got {N}")
    if is_probable_prime(N):
        return NearPrime(True, N, 1)
    primes, remainder = partial_factor(N, effort, rho_retries)
    return _classify(N, primes, remainder, threshold, effort)


def _classify(N: int, primes: dict, remainder: int, threshold: float, effort: int) -> NearPrime:
    largest = max(primes, default=1)
    need = threshold * N.bit_length()
    if largest.bit_length() >= need:
        return NearPrime(True, largest, N // largest)
    if remainder > 1:
        # a composite remainder with no factor <= effort has no factor above remainder/effort
        if remainder.bit_length() - effort.bit_length() + 1 < need:
            return NearPrime(False, largest, N // largest)
        raise Inconclusive(f"{remainder.bit_length()}-bit composite cofactor of {N} is unfactored")
    return NearPrime(False, largest, N // largest)


def security_equivalent_bits(bits: float, g: int, extension: int = 1, trace_zero: bool = False,
                             three_divides_j2: bool = False) -> float:
    """Bit length scaled to a genus 2 prime-field Jacobian of comparable security."""
    if trace_zero:
        if g != 2 or extension != 3:
            raise UnknownContext(f"trace zero ratio known for g=2 over F_(p^3), got g={g}, k={extension}")
        ratio = Fraction(5, 4) if three_divides_j2 else Fraction(6, 5)
    elif extension == 1 and g in (2, 3):
        ratio = Fraction(1) if g == 2 else Fraction(9, 8)
    elif extension == 2 and g == 2:
        ratio = Fraction(14, 9)
    else:
        raise UnknownContext(f"no security ratio for g={g} over an extension of degree {extension}")
    return float(bits / ratio)


def smith_filter(f: Sequence, F: Field) -> bool:
    """Exactly one irreducible factor of degree 3, 5 or 7."""
    return sum(1 for d in poly_factor_degrees(f, F) if d in (3, 5, 7)) == 1


# -- derived groups ----------------------------------------------------------------

LABELS = ("J", "J_twist", "J_3/1", "J_3/1_twist", "J_4/2", "T_3")


def normalize_label(label: str) -> str:
    out = label.replace("{", "").replace("}", "")
    if out not in LABELS:
        raise UnknownContext(f"Unknown group label: {label}")
    return out


@dataclass
class DerivedGroupOrder:
    label: str
    order: int
    factors: dict
    remainder: int
    near_prime: Optional[bool]
    largest_prime: int
    security_bits: Optional[float] = None
    exact: bool = True

    @property
    def bits(self) -> int:
        return self.order.bit_length()

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "order": str(self.order),
            "bits": self.bits,
            "factors": {str(p): e for p, e in sorted(self.factors.items())},
            "remainder": str(self.remainder),
            "near_prime": self.near_prime,
            "largest_prime_bits": self.largest_prime.bit_length(),
            "security_bits": self.security_bits,
            "exact": self.exact,
        }


def _label_order(P: LPolynomial, label: str) -> tuple:
    """(order, extension degree of the ambient Jacobian, trace zero?, exact)."""
    if label == "J":
        return P.at(1), 1, False, True
    if label == "J_twist":
        return P.at(-1), 1, False, True
    if label == "J_3/1":
        return quotient_order(P, 3, 1), 3, True, True
    if label == "J_3/1_twist":
        return quotient_order(twist_lpoly(P), 3, 1), 3, True, True
    if label == "J_4/2":
        return quotient_order(P, 4, 2), 2, False, True
    order, exact = trace_zero_order(P, 3)
    return order, 3, True, exact


def derived_orders(P: LPolynomial, labels: Sequence[str] = LABELS, threshold: float = 0.95,
                   effort: int = 1 << 24) -> list:
    """Orders, factorizations, near-prime flags and security bits for each label."""
    three_j2 = extension_order(P, 2) % 3 == 0
    out = []
    for raw in labels:
        label = normalize_label(raw)
        order, ext, tz, exact = _label_order(P, label)
        factors, remainder = partial_factor(order, effort) if order > 1 else ({}, 1)
        try:
            flag = _classify(order, factors, remainder, threshold, effort)
            is_np, largest = flag.is_near_prime, flag.largest_prime
        except Inconclusive as exc:
            logging.info("Near-prime test for %s inconclusive: %s", label, exc)
            is_np, largest = None, max(factors, default=1)
        try:
            security = security_equivalent_bits(largest.bit_length(), P.g, ext, tz, three_j2)
        except UnknownContext:
            security = None
        out.append(DerivedGroupOrder(label, order, factors, remainder, is_np, largest,
                                     security, exact))
        logging.info("%s: %d bits, near prime: %s", label, order.bit_length(), is_np)
    return out
