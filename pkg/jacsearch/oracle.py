"""
oracle.py

Brute-force ground truth for desk-scale checks: opaque test groups with a
known hidden structure, naive point counts, naive Jacobian orders and a
plain baby-step giant-step order oracle.

Key features:
  - OpaqueGroup: Z/n_1 x ... x Z/n_k behind an injective affine encoding,
    exposing only the black-box contract (plus a debug channel for tests)
  - naive_counts with two independent strategies: a numpy square-count table
    over the prime field and an Euler-criterion character sum
  - naive_jacobian_order from point counts on small fields, otherwise from
    element orders located in the Weil interval

Usage example:
  >>> G = opaque_group([4, 6], seed=1)
  >>> group_exponent(G, B=10) == G.exponent()
  True
  >>> naive_counts(curve_new(2, field_new(7), [1, 0, 0, 0, 0, 1]), 1)
"""

import logging
import math
import random
from typing import Optional, Sequence

import gmpy2
import numpy as np
from sympy import factorint

from .curve import CurveParams, jacobian
from .ff import field_new, is_qr
from .genalg import (
    BlackBoxGroup,
    FactoredExponent,
    interval_multiples,
    order_from_exponent,
    refine_candidates,
)
from .zeta import Ambiguous, lpoly_from_counts, weil_interval


class FieldTooLarge(ValueError):
    pass


class OpaqueGroup(BlackBoxGroup):
    """
    Z/n_1 x ... x Z/n_k. Elements are integers encoding the hidden index
    (mixed radix) through x -> (a*x + b) mod M with gcd(a, M) = 1.
    """

    def __init__(self, moduli: Sequence[int], seed: int = 0, fast_inverse: bool = True):
        super().__init__()
        self.fast_inverse = fast_inverse
        self.moduli = tuple(int(n) for n in moduli)
        if any(n < 1 for n in self.moduli):
            raise ValueError(f"cyclic factor orders must be positive: {self.moduli}")
        self.M = math.prod(self.moduli)
        rng = random.Random(seed)
        while True:
            self._a = rng.randrange(1, max(2, self.M))
            if math.gcd(self._a, self.M) == 1:
                break
        self._b = rng.randrange(self.M)
        self._ainv = int(gmpy2.invert(self._a, self.M)) if self.M > 1 else 0
        self._width = max(1, (self.M.bit_length() + 7) // 8)

    def _encode(self, coords) -> int:
        idx = 0
        for c, n in zip(coords, self.moduli):
            idx = idx * n + c
        return (self._a * idx + self._b) % self.M

    def _decode(self, x: int) -> list:
        idx = ((x - self._b) * self._ainv) % self.M
        coords = []
        for n in reversed(self.moduli):
            idx, c = divmod(idx, n)
            coords.append(c)
        return coords[::-1]

    @property
    def identity(self) -> int:
        return self._encode([0] * len(self.moduli))

    def _op(self, a: int, b: int) -> int:
        ca, cb = self._decode(a), self._decode(b)
        return self._encode([(x + y) % n for x, y, n in zip(ca, cb, self.moduli)])

    def invert(self, a: int) -> int:
        return self._encode([(-x) % n for x, n in zip(self._decode(a), self.moduli)])

    def random(self, rng: random.Random) -> int:
        return self._encode([rng.randrange(n) for n in self.moduli])

    def serialize(self, a: int) -> bytes:
        return a.to_bytes(self._width, "little")

    # -- debug channel (tests only) -------------------------------------------
    def true_order(self) -> int:
        return self.M

    def exponent(self) -> int:
        return math.lcm(*self.moduli) if self.moduli else 1

    def element_order(self, a: int) -> int:
        return math.lcm(*(n // math.gcd(c, n) for c, n in zip(self._decode(a), self.moduli)))

    def element(self, coords: Sequence[int]) -> int:
        return self._encode([c % n for c, n in zip(coords, self.moduli)])


def opaque_group(moduli: Sequence[int], seed: int = 0, fast_inverse: bool = True) -> OpaqueGroup:
    if math.prod(moduli) > 1 << 60:
        raise ValueError(f"opaque groups are capped at 2^60 elements, got {math.prod(moduli)}")
    return OpaqueGroup(moduli, seed, fast_inverse)


# -- point counting ----------------------------------------------------------

def _count_table(C: CurveParams) -> int:
    """N_1 over a prime field: number of y with y^2 = f(x), summed over x, via a square histogram."""
    p = C.field.p
    xs = np.arange(p, dtype=np.int64)
    squares = np.bincount((xs * xs) % p, minlength=p)
    values = np.zeros(p, dtype=np.int64)
    for c in reversed(C.coefficients()):
        values = (values * xs + c) % p
    return int(squares[values].sum()) + 1


def _count_character(C: CurveParams, k: int) -> int:
    """N_k as q^k + 1 + sum of quadratic characters of f(x) over F_{q^k}."""
    base = C.field
    if base.k == 1:
        F = base if k == 1 else field_new(base.p, k)
        f = [F(c.value) for c in C.f]
    elif k == 1:
        F, f = base, list(C.f)
    else:
        raise FieldTooLarge(f"extension F_{{q^{k}}} of {base} is not available")
    total = F.order + 1
    for x in F.elements():
        y2 = F.zero
        for c in reversed(f):
            y2 = y2 * x + c
        if y2:
            total += 1 if is_qr(y2) else -1
    return total


def naive_counts(C: CurveParams, k: int, method: str = "auto") -> int:
    """Projective point count N_k of C over F_{q^k} (one point at infinity)."""
    if k < 1:
        raise ValueError(f"extension degree must be positive, got {k}")
    q = C.field.order
    if q ** k > 1 << 26:
        raise FieldTooLarge(f"q^k = {q}^{k} exceeds 2^26")
    if method == "auto":
        method = "table" if C.field.k == 1 and k == 1 else "character"
    if method == "table":
        if C.field.k != 1 or k != 1:
            raise ValueError("the table method counts over prime fields only")
        return _count_table(C)
    if method == "character":
        return _count_character(C, k)
    raise ValueError(f"Unknown counting method: {method}")


# -- orders ------------------------------------------------------------------

def naive_order(G: BlackBoxGroup, alpha, bound: int) -> int:
    """|alpha| <= bound by plain baby-step giant-step (first N >= 1 with alpha^N = 1)."""
    m = math.isqrt(bound) + 1
    table = {}
    x = G.identity
    for j in range(m):
        if j and G.is_identity(x):
            return j
        table.setdefault(x, j)
        x = G.compose(x, alpha)
    step = G.invert(x)
    y = step
    for i in range(1, m + 1):
        j = table.get(y)
        if j is not None:
            return i * m + j
        y = G.compose(y, step)
    raise ValueError(f"element order exceeds {bound}")


def _first_multiple_in(G: BlackBoxGroup, alpha, lo: int, hi: int) -> Optional[int]:
    """Least N in [lo, hi] with alpha^N = 1, by baby-step giant-step over the interval."""
    m = math.isqrt(hi - lo + 1) + 1
    table = {}
    x = G.identity
    for j in range(m):
        table.setdefault(x, j)
        x = G.compose(x, alpha)
    step = G.invert(x)
    y = G.invert(G.exp(alpha, lo))
    for i in range(m + 1):
        j = table.get(y)
        if j is not None:
            N = lo + i * m + j
            return N if N <= hi else None
        y = G.compose(y, step)
    return None


def naive_jacobian_order(C: CurveParams, rng: Optional[random.Random] = None,
                         max_elements: int = 50, limit: int = 1 << 40) -> int:
    """
    #J(C) exactly: from point counts when q^g <= 2^16, otherwise from the lcm
    of element orders until a single multiple remains in the Weil interval.
    """
    q, g = C.field.order, C.genus
    if q ** g > limit:
        raise FieldTooLarge(f"q^g = {q}^{g} exceeds {limit}")
    if q ** g <= 1 << 16:
        counts = [naive_counts(C, k) for k in range(1, g + 1)]
        return lpoly_from_counts(q, g, counts).at(1)

    rng = rng or random.Random(0)
    J = jacobian(C)
    lo, hi = weil_interval(q, g)
    lam = 1
    for n in range(max_elements):
        alpha = J.exp(J.random(rng), lam)
        if J.is_identity(alpha):
            continue
        N0 = _first_multiple_in(J, alpha, -(-lo // lam), hi // lam)
        if N0 is None:
            raise ArithmeticError("no multiple of an element order lies in the Weil interval")
        lam *= order_from_exponent(J, alpha, FactoredExponent.from_dict(factorint(N0)))
        multiples = interval_multiples(lam, lo, hi)
        logging.debug("Naive order: lambda >= %d, %d interval multiples", lam, len(multiples))
        if len(multiples) == 1:
            return multiples[0]
    multiples = refine_candidates(J, interval_multiples(lam, lo, hi), rng)
    if len(multiples) != 1:
        raise Ambiguous(f"{len(multiples)} candidate orders survive for {C}")
    return multiples[0]
