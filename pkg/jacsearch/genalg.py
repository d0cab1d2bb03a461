"""
genalg.py

Conditional generic algorithms for finite abelian groups given only as a
black box: element orders from a factored exponent, a bounded parallel
primorial-steps order search, the group exponent and the group order and
structure via Sylow subgroups.

"Conditional" means an algorithm may reject (raise Reject) when its input
fails a stated size condition, but must otherwise answer correctly. The
bound B controls every condition: an integer N is B-easy when N/gcd(N, E)
is at most B^2, where E is the product of the maximal prime powers <= B.

Key features:
  - BlackBoxGroup base class with sliding-window exponentiation, batched
    exponentiation over batch_compose and per-phase operation counters
  - Wheel and primorial-steps planning (P_w, m, wheel gaps, E_wheel)
  - Baby and giant tables packed as 64-bit integers and matched by sorting
  - Sylow subgroup structure by incremental generating sets with
    baby-step giant-step discrete logarithms

Usage example:
  >>> plan = make_plan(100)
  >>> order_bounded(G, alpha, plan)      # |alpha| when it is <= 100^2
  >>> group_exponent(G, B=2**12, rng=random.Random(1))
"""

import hashlib
import logging
import math
import random
from abc import ABC, abstractmethod
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np
from sympy import factorint, prime, primerange


class Reject(ArithmeticError):
    """The condition of a conditional algorithm is not met."""


class AmbiguousOrder(ArithmeticError):
    pass


class NotPrimorial(ValueError):
    pass


class OrderCheckFailed(ArithmeticError):
    """A computed order failed the annihilation/minimality check."""


# -- black box groups --------------------------------------------------------

def window_size(bits: int) -> int:
    """Width k minimising bits/(k+1) + 2^(k-1), the multiplications of a 2^k-ary sliding window."""
    if bits <= 8:
        return 1
    k = 2
    while k < 16 and bits > (1 << (k - 1)) * (k + 1) * (k + 2):
        k += 1
    return k


class BlackBoxGroup(ABC):
    """
    Abstract finite abelian group. Subclasses implement ``identity``,
    ``_op``, ``invert``, ``random`` and ``serialize``; elements must be
    hashable and compare equal exactly when they are the same group element.
    """

    #: True when inverting costs (almost) nothing, enabling +/- matching.
    fast_inverse = False

    def __init__(self):
        self.ops = Counter()
        self._phase = "other"

    @property
    @abstractmethod
    def identity(self):
        ...

    @abstractmethod
    def _op(self, a, b):
        ...

    def _op_batch(self, pairs: Sequence[tuple]) -> list:
        return [self._op(a, b) for a, b in pairs]

    @abstractmethod
    def invert(self, a):
        ...

    @abstractmethod
    def random(self, rng: random.Random):
        ...

    @abstractmethod
    def serialize(self, a) -> bytes:
        ...

    @contextmanager
    def phase(self, label: str):
        """Attribute group operations inside the block to ``label``."""
        previous, self._phase = self._phase, label
        try:
            yield
        finally:
            self._phase = previous

    def compose(self, a, b):
        self.ops[self._phase] += 1
        return self._op(a, b)

    def batch_compose(self, pairs: Sequence[tuple]) -> list:
        self.ops[self._phase] += len(pairs)
        return self._op_batch(pairs)

    def is_identity(self, a) -> bool:
        return a == self.identity

    def canonical_bytes(self, a) -> bytes:
        data = self.serialize(a)
        if self.fast_inverse:
            data = min(data, self.serialize(self.invert(a)))
        return data

    def hash(self, a, bits: int = 64) -> int:
        """Hash of ``a`` (identical for a and its inverse); the identity hashes to 0."""
        if self.is_identity(a):
            return 0
        digest = hashlib.blake2b(self.canonical_bytes(a), digest_size=8).digest()
        value = int.from_bytes(digest, "little") & ((1 << bits) - 1)
        return value or 1

    def exp(self, a, e):
        if isinstance(e, FactoredExponent):
            e = e.value
        return self.exp_batch([a], e)[0]

    def exp_batch(self, elements: Sequence, e) -> list:
        """Raise every element to the same power with one shared 2^k-ary sliding window schedule."""
        if isinstance(e, FactoredExponent):
            e = e.value
        elements = list(elements)
        if not elements:
            return []
        if e == 0:
            return [self.identity] * len(elements)
        if e < 0:
            elements = [self.invert(a) for a in elements]
            e = -e
        k = window_size(e.bit_length())
        tables = [[a] for a in elements]
        if k > 1:
            squares = self.batch_compose([(a, a) for a in elements])
            for _ in range((1 << (k - 1)) - 1):
                nxt = self.batch_compose([(t[-1], s) for t, s in zip(tables, squares)])
                for t, x in zip(tables, nxt):
                    t.append(x)
        bits = bin(e)[2:]
        acc = None
        i = 0
        while i < len(bits):
            if bits[i] == "0":
                acc = self.batch_compose([(x, x) for x in acc])
                i += 1
                continue
            j = min(i + k, len(bits))
            while bits[j - 1] == "0":
                j -= 1
            val = int(bits[i:j], 2)
            if acc is None:
                acc = [t[val >> 1] for t in tables]
            else:
                for _ in range(j - i):
                    acc = self.batch_compose([(x, x) for x in acc])
                acc = self.batch_compose([(x, t[val >> 1]) for x, t in zip(acc, tables)])
            i = j
        return acc


# -- exponents, bounds and plans ---------------------------------------------

@dataclass(frozen=True)
class FactoredExponent:
    """Product of prime powers p^h, primes strictly increasing."""

    factors: tuple

    @cached_property
    def value(self) -> int:
        level = [p ** h for p, h in self.factors] or [1]
        while len(level) > 1:
            level = [math.prod(level[i:i + 2]) for i in range(0, len(level), 2)]
        return level[0]

    @property
    def primes(self) -> list:
        return [p for p, _ in self.factors]

    @property
    def prime_powers(self) -> list:
        return [p ** h for p, h in self.factors]

    @property
    def bits(self) -> int:
        return self.value.bit_length()

    @classmethod
    def from_dict(cls, factors: dict) -> "FactoredExponent":
        return cls(tuple(sorted((p, h) for p, h in factors.items() if h > 0)))

    def as_dict(self) -> dict:
        return dict(self.factors)


def build_exponent(B: int, prime_limit: Optional[int] = None) -> FactoredExponent:
    """
    Without ``prime_limit``: every prime p <= B to its largest power <= B
    (the full exponent). With it: primes p <= prime_limit to their largest
    power <= B^2 (the primorial-steps exponent).
    """
    if prime_limit is None:
        cap, limit = B, B
    else:
        cap, limit = B * B, prime_limit
    factors = []
    for p in primerange(2, limit + 1):
        h, q = 0, 1
        while q * p <= cap:
            q *= p
            h += 1
        if h:
            factors.append((p, h))
    return FactoredExponent(tuple(factors))


@dataclass(frozen=True)
class EasyBound:
    B: int

    @property
    def exponent(self) -> FactoredExponent:
        return _full_exponent(self.B)


@lru_cache(maxsize=8)
def _full_exponent(B: int) -> FactoredExponent:
    return build_exponent(B)


def strip_exponent(N: int, exponent: FactoredExponent, factor: bool = True) -> tuple:
    """
    Split N into (N / gcd(N, E), factors of gcd(N, E)). The gcd is B-smooth,
    so factoring it is cheap; pass factor=False when only the quotient matters.
    """
    g = math.gcd(N, exponent.value)
    return N // g, (dict(factorint(g)) if factor and g > 1 else {})


def is_b_easy(N: int, bound: EasyBound) -> bool:
    if N < 1:
        raise ValueError(f"is_b_easy needs N >= 1, got {N}")
    rest, _ = strip_exponent(N, bound.exponent, factor=False)
    return rest <= bound.B * bound.B


def primorial_index(P: int) -> int:
    w, acc = 0, 1
    for p in primerange(2, 100):
        if acc == P:
            return w
        if acc > P:
            break
        acc *= p
        w += 1
    raise NotPrimorial(f"{P} is not a primorial")


def wheel(P: int) -> tuple:
    """Gaps between consecutive integers coprime to P, starting at 1, and the largest gap."""
    if primorial_index(P) < 2:
        raise NotPrimorial(f"wheel needs P_w with w >= 2, got {P}")
    ks = np.flatnonzero(np.gcd(np.arange(1, P + 2, dtype=np.int64), P) == 1) + 1
    r = np.diff(ks)
    return tuple(int(x) for x in r), int(r.max())


def parallel_width(B: int, P: int, phi: int) -> int:
    """Smallest m with 2 m^2 P phi(P) >= B^2."""
    target = B * B
    m = max(1, math.isqrt(-(-target // (2 * P * phi))))
    while 2 * m * m * P * phi < target:
        m += 1
    return m


@lru_cache(maxsize=None)
def primorial_data(w: int) -> tuple:
    primes = list(primerange(2, prime(w) + 1))
    P = math.prod(primes)
    phi = math.prod(p - 1 for p in primes)
    return P, phi


def select_w(B: int, candidates: Iterable[int] = range(2, 9), min_parallel: int = 128) -> int:
    """Largest w whose parallel width m stays at least ``min_parallel``."""
    candidates = sorted(candidates)
    best = candidates[0]
    for w in candidates:
        P, phi = primorial_data(w)
        if parallel_width(B, P, phi) >= min_parallel:
            best = w
    return best


@dataclass(frozen=True)
class PrimorialPlan:
    B: int
    w: int
    P: int
    phi: int
    m: int
    gaps: tuple
    r_max: int
    exponent: FactoredExponent
    prime_limit: int

    @property
    def residues(self) -> list:
        """The phi(P) integers in [1, P) coprime to P, in increasing order."""
        ks = [1]
        for r in self.gaps[:-1]:
            ks.append(ks[-1] + r)
        return ks

    def as_dict(self) -> dict:
        return {"B": self.B, "w": self.w, "m": self.m, "prime_limit": self.prime_limit}


@lru_cache(maxsize=16)
def make_plan(B: int, w: Optional[int] = None, min_parallel: int = 128) -> PrimorialPlan:
    if B < 2:
        raise ValueError(f"bound B must be at least 2, got {B}")
    if w is None:
        w = select_w(B, min_parallel=min_parallel)
    P, phi = primorial_data(w)
    gaps, r_max = wheel(P)
    p_w = prime(w)
    return PrimorialPlan(B=B, w=w, P=P, phi=phi, m=parallel_width(B, P, phi), gaps=gaps,
                         r_max=r_max, exponent=build_exponent(B, prime_limit=p_w), prime_limit=p_w)


# -- element orders ----------------------------------------------------------

def _merge(a: dict, b: dict) -> dict:
    out = dict(a)
    for p, h in b.items():
        out[p] = out.get(p, 0) + h
    return out


def _prime_power_order(group: BlackBoxGroup, x, p: int) -> int:
    e = 0
    while not group.is_identity(x):
        x = group.exp(x, p)
        e += 1
    return e


def check_order(group: BlackBoxGroup, alpha, N: int, factors: dict) -> None:
    """alpha^N = 1 and alpha^(N/p) != 1 for every prime p | N."""
    if not group.is_identity(group.exp(alpha, N)):
        raise OrderCheckFailed(f"{N} does not annihilate the element")
    for p in factors:
        if group.is_identity(group.exp(alpha, N // p)):
            raise OrderCheckFailed(f"{N} is not minimal: {N // p} annihilates")


class _PowerChain:
    """alpha_0 = alpha, alpha_i = alpha_{i-1}^(q_i), saving every ``stride``-th term."""

    def __init__(self, group, alpha, powers, stride):
        self.group = group
        self.powers = powers
        self.stride = stride
        self.saved = {0: alpha}

    def get(self, j):
        base = j - j % self.stride
        x = self.saved[base]
        for t in range(base, j):
            x = self.group.exp(x, self.powers[t])
        return x


def _order_from_exponent(group, alpha, exponent: FactoredExponent, max_stored=None) -> tuple:
    if group.is_identity(alpha):
        return 1, {}
    primes, powers = exponent.primes, exponent.prime_powers
    w = len(powers)
    stride = 1 if max_stored is None or w <= max_stored else -(-w // max_stored)
    chain = _PowerChain(group, alpha, powers, stride)
    prev, cur, found = None, alpha, None
    for i in range(1, w + 1):
        prev, cur = cur, group.exp(cur, powers[i - 1])
        if i % stride == 0:
            chain.saved[i] = cur
        if group.is_identity(cur):
            found = i
            break
    if found is None:
        raise Reject("the exponent does not annihilate the element")
    p = primes[found - 1]
    e = _prime_power_order(group, prev, p)
    N, factors = p ** e, {p: e}
    i = found - 1
    while i > 0:
        lo, hi = 0, i
        while lo < hi:
            mid = (lo + hi) // 2
            if group.is_identity(group.exp(chain.get(mid), N)):
                hi = mid
            else:
                lo = mid + 1
        if lo == 0:
            break
        p = primes[lo - 1]
        e = _prime_power_order(group, group.exp(chain.get(lo - 1), N), p)
        N *= p ** e
        factors[p] = e
        i = lo - 1
    return N, factors


def memory_cap(order_bits: int) -> int:
    """Intermediate powers kept by order_from_exponent for a group of about 2^order_bits elements."""
    return 2 * max(1, order_bits) ** 2


def order_from_exponent(group: BlackBoxGroup, alpha, exponent: FactoredExponent,
                        max_stored: Optional[int] = None) -> int:
    """
    |alpha| given a factored exponent E with alpha^E = 1 (Reject otherwise).
    ``max_stored`` caps the intermediate powers kept in memory; the rest are
    recomputed from checkpoints.
    """
    N, factors = _order_from_exponent(group, alpha, exponent, max_stored)
    check_order(group, alpha, N, factors)
    return N


def _order_bounded(group: BlackBoxGroup, alpha, plan: PrimorialPlan) -> tuple:
    with group.phase("exp"):
        beta0 = group.exp(alpha, plan.exponent)
    if group.is_identity(beta0):
        Nb = 1
    else:
        with group.phase("search"):
            Nb = _primorial_steps(group, beta0, plan)
    factors = factorint(Nb) if Nb > 1 else {}
    tail, tail_factors = _order_from_exponent(group, group.exp(alpha, Nb), plan.exponent)
    return Nb * tail, _merge(factors, tail_factors)


def _primorial_steps(group: BlackBoxGroup, beta0, plan: PrimorialPlan) -> int:
    """|beta0| for an element of order <= B^2 coprime to P (Reject if none is found)."""
    m, P, phi = plan.m, plan.P, plan.phi
    ks = plan.residues
    # giant spacing s and columns K with s*K = 2 phi; s = 2 needs +/- matching
    s = 2 if group.fast_inverse else 1
    K = 2 * phi // s
    idx_bits = max(1, (m * K).bit_length())
    hash_bits = 64 - idx_bits
    if hash_bits < 16:
        raise ValueError(f"tables of {m * K} entries leave too few hash bits")

    # steps by even gaps: delta[r] = beta0^r
    delta = {2: group.compose(beta0, beta0)}
    for r in range(4, plan.r_max + 1, 2):
        delta[r] = group.compose(delta[r - 2], delta[2])

    # baby steps beta0^(P*i + k)
    beta_p = group.exp(beta0, P)
    row = [beta0]
    for _ in range(1, m):
        row.append(group.compose(row[-1], beta_p))
    baby = []
    best = None
    for j in range(phi):
        for i, x in enumerate(row):
            h = group.hash(x, hash_bits)
            if h == 0:
                n = P * i + ks[j]
                best = n if best is None else min(best, n)
            baby.append((h << idx_bits) | (j * m + i))
        if j < phi - 1:
            step = delta[plan.gaps[j]]
            row = group.batch_compose([(x, step) for x in row])
    if best is not None and group.is_identity(group.exp(beta0, best)):
        return best

    # giant steps beta0^(mP(1 + s(K*i + k)))
    gamma0 = group.exp(beta0, m * P)
    delta0 = group.compose(gamma0, gamma0) if s == 2 else gamma0
    stride = group.exp(gamma0, 2 * phi)
    row = [gamma0]
    for _ in range(1, m):
        row.append(group.compose(row[-1], stride))
    giant = []
    for k in range(K):
        for i, x in enumerate(row):
            giant.append((group.hash(x, hash_bits) << idx_bits) | (k * m + i))
        if k < K - 1:
            row = group.batch_compose([(x, delta0) for x in row])

    return _match(group, beta0, plan, baby, giant, idx_bits, ks, s)


def _match(group, beta0, plan, baby, giant, idx_bits, ks, s) -> int:
    m, P = plan.m, plan.P
    K = 2 * plan.phi // s
    shift = np.uint64(idx_bits)
    mask = np.uint64((1 << idx_bits) - 1)
    b_sorted = np.sort(np.array(baby, dtype=np.uint64))
    g_sorted = np.sort(np.array(giant, dtype=np.uint64))
    b_hash = b_sorted >> shift
    g_hash = g_sorted >> shift
    candidates = set()
    for h in np.intersect1d(b_hash, g_hash):
        b_lo, b_hi = np.searchsorted(b_hash, h, "left"), np.searchsorted(b_hash, h, "right")
        g_lo, g_hi = np.searchsorted(g_hash, h, "left"), np.searchsorted(g_hash, h, "right")
        for bidx in (b_sorted[b_lo:b_hi] & mask).tolist():
            j, i = divmod(bidx, m)
            b = P * i + ks[j]
            for gidx in (g_sorted[g_lo:g_hi] & mask).tolist():
                k, i2 = divmod(gidx, m)
                a = m * P * (1 + s * (K * i2 + k))
                if s == 2:
                    candidates.add(a + b)
                if a > b:
                    candidates.add(a - b)
    logging.debug("Primorial steps: %d candidate orders from table matches", len(candidates))
    for N in sorted(candidates):
        if group.is_identity(group.exp(beta0, N)):
            return N
    raise Reject(f"no element order <= B^2 (B={plan.B})")


def order_bounded(group: BlackBoxGroup, alpha, plan: PrimorialPlan) -> int:
    """|alpha| on the condition |alpha| <= B^2, by parallel primorial steps."""
    N, factors = _order_bounded(group, alpha, plan)
    check_order(group, alpha, N, factors)
    return N


# -- group exponent and order ------------------------------------------------


def interval_multiples(m: int, lo: int, hi: int) -> list:
    """Multiples of m in [lo, hi] (at most a handful are ever expected)."""
    first = -(-lo // m) * m
    return list(range(first, hi + 1, m)) if first <= hi else []


def _group_exponent(group, B, c, rng, plan, max_stored, restarts=20) -> tuple:
    E = EasyBound(B).exponent
    N, factors = 1, {}
    for attempt in range(restarts):
        # steps 1-3
        alpha = group.exp(group.random(rng), N)
        with group.phase("exp"):
            beta = group.exp(alpha, E)
        N1, f1 = _order_bounded(group, beta, plan)
        N2, f2 = _order_from_exponent(group, group.exp(alpha, N1), E, max_stored)
        N, factors = N * N1 * N2, _merge(factors, _merge(f1, f2))
        t = 1
        # steps 4-5
        while t < c:
            alpha = group.exp(group.random(rng), N)
            try:
                N3, f3 = _order_from_exponent(group, alpha, E, max_stored)
            except Reject:
                logging.debug("Group exponent: E fails on a random element, back to step 1 (%d)",
                              attempt + 1)
                break
            N, factors = N * N3, _merge(factors, f3)
            t += 1
        else:
            return N, factors
    raise Reject(f"group exponent did not stabilise after {restarts} restarts")


def group_exponent(group: BlackBoxGroup, B: int, c: int = 6, rng: Optional[random.Random] = None,
                   plan: Optional[PrimorialPlan] = None, max_stored: Optional[int] = None) -> int:
    """
    lambda(G) on the condition that it is B-easy: the lcm of the orders of
    at least c random elements. Reject when lambda(G) is B-hard.
    """
    if c < 2:
        raise ValueError(f"confidence count c must be at least 2, got {c}")
    if max_stored is None:
        max_stored = memory_cap(2 * B.bit_length())
    N, _ = _group_exponent(group, B, c, rng or random.Random(0), plan or make_plan(B), max_stored)
    return N


class _DlogTable:
    """Baby-step giant-step discrete logarithms with respect to an independent basis."""

    def __init__(self, group: BlackBoxGroup, basis: Sequence[tuple]):
        self.group = group
        self.sizes = [n for _, n in basis]
        total = math.prod(self.sizes)
        target = math.isqrt(total) + 1
        self.M, acc = [], 1
        for n in self.sizes:
            if acc >= target:
                M = 1
            elif acc * n <= target:
                M = n
            else:
                M = -(-target // acc)
            self.M.append(M)
            acc *= M
        self.K = [-(-n // M) for n, M in zip(self.sizes, self.M)]

        entries = [(group.identity, ())]
        for (h, _), M in zip(basis, self.M):
            grown = []
            for elem, vec in entries:
                x = elem
                for b in range(M):
                    grown.append((x, vec + (b,)))
                    if b + 1 < M:
                        x = group.compose(x, h)
            entries = grown
        self.table = {}
        for elem, vec in entries:
            self.table.setdefault(elem, vec)

        self.giant = []
        for (h, _), M, K in zip(basis, self.M, self.K):
            step = group.exp(h, -M)
            powers = [group.identity]
            for _ in range(1, K):
                powers.append(group.compose(powers[-1], step))
            self.giant.append(powers)

    def solve(self, target) -> Optional[list]:
        return self._search(0, target, ())

    def _search(self, i, elem, avec):
        if i == len(self.K):
            bvec = self.table.get(elem)
            if bvec is None:
                return None
            return [(b + M * a) % n for b, a, M, n in zip(bvec, avec, self.M, self.sizes)]
        powers = self.giant[i]
        for a in range(self.K[i]):
            nxt = elem if a == 0 else self.group.compose(elem, powers[a])
            found = self._search(i + 1, nxt, avec + (a,))
            if found is not None:
                return found
        return None


def bsgs_dlog(group: BlackBoxGroup, basis: Sequence[tuple], target) -> Optional[list]:
    """Exponents c with target = prod g_i^c_i for basis [(g_i, |g_i|)], or None."""
    return _DlogTable(group, basis).solve(target)


def _diagonalize(rows: list) -> tuple:
    """
    Integer row/column reduction of a square relation matrix to diagonal
    form D = U A V. Returns the diagonal and V^-1 (rows give the new
    generators in terms of the old ones).
    """
    A = [list(r) for r in rows]
    n = len(A)
    vinv = [[int(i == j) for j in range(n)] for i in range(n)]
    for t in range(n):
        while True:
            pivot = min(((abs(A[i][j]), i, j) for i in range(t, n) for j in range(t, n) if A[i][j]),
                        default=None)
            if pivot is None:
                raise ArithmeticError("relation matrix is singular")
            _, pi, pj = pivot
            A[t], A[pi] = A[pi], A[t]
            if pj != t:
                for r in A:
                    r[t], r[pj] = r[pj], r[t]
                vinv[t], vinv[pj] = vinv[pj], vinv[t]
            done = True
            for i in range(t + 1, n):
                q = A[i][t] // A[t][t]
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // A[t][t]
                if q:
                    for r in A:
                        r[j] -= q * r[t]
                    vinv[t] = [a + q * b for a, b in zip(vinv[t], vinv[j])]
                if A[t][j]:
                    done = False
            if done:
                break
    return [A[t][t] for t in range(n)], vinv


def _extend_basis(group, basis, x, x_bound, e, coeffs) -> list:
    """Basis of <basis, x> from the relation x^e = prod g_i^coeffs_i."""
    gens = [g for g, _ in basis] + [x]
    bounds = [n for _, n in basis] + [x_bound]
    n = len(gens)
    rows = [[0] * n for _ in range(n)]
    for i, (_, order) in enumerate(basis):
        rows[i][i] = order
    rows[-1] = [-c for c in coeffs] + [e]
    diag, vinv = _diagonalize(rows)
    new_basis = []
    for k, d in enumerate(diag):
        d = abs(d)
        if d == 1:
            continue
        elem = group.identity
        for g, bound, c in zip(gens, bounds, vinv[k]):
            c %= bound
            if c:
                elem = group.compose(elem, group.exp(g, c))
        new_basis.append((elem, d))
    return new_basis


def sylow_structure(group: BlackBoxGroup, p: int, h: int, lam: int, B: Optional[int] = None,
                    rng: Optional[random.Random] = None, confidence_bits: int = 30) -> list:
    """
    Basis [(generator, order)] of the p-Sylow subgroup H_p, where p^h exactly
    divides lambda(G). Random elements of H_p come from exponentiating by
    lambda(G)/p^h; the subgroup generated so far is accepted once enough
    consecutive random elements already lie in it. Reject when |H_p| > B^2.
    """
    rng = rng or random.Random(0)
    cofactor = lam // p ** h
    limit = B * B if B else None
    needed = max(1, math.ceil(confidence_bits / math.log2(p)))
    basis, table, hits = [], _DlogTable(group, []), 0
    while hits < needed:
        x = group.exp(group.random(rng), cofactor)
        y, j = x, 0
        coeffs = table.solve(y)
        while coeffs is None:
            y = group.exp(y, p)
            j += 1
            coeffs = table.solve(y)
        if j == 0:
            hits += 1
            continue
        hits = 0
        basis = _extend_basis(group, basis, x, p ** h, p ** j, coeffs)
        size = math.prod(n for _, n in basis)
        logging.debug("Sylow %d: subgroup of order %d with %d generators", p, size, len(basis))
        if limit is not None and size > limit:
            raise Reject(f"{p}-Sylow subgroup exceeds B^2")
        table = _DlogTable(group, basis)
    return basis


def invariant_factors(orders: Iterable[int]) -> list:
    """Invariant factors d_1 | d_2 | ... from prime-power cyclic factor orders."""
    by_prime = {}
    for n in orders:
        if n == 1:
            continue
        (p, _), = factorint(n).items()
        by_prime.setdefault(p, []).append(n)
    columns = [sorted(v, reverse=True) for v in by_prime.values()]
    rank = max((len(c) for c in columns), default=0)
    inv = [math.prod(c[i] for c in columns if i < len(c)) for i in range(rank)]
    return sorted(inv)


def group_order(group: BlackBoxGroup, B: int, interval: Optional[tuple] = None,
                rng: Optional[random.Random] = None, c: int = 6,
                plan: Optional[PrimorialPlan] = None, sylow: bool = True,
                max_stored: Optional[int] = None) -> tuple:
    """
    (|G|, structure) on the condition that |G| is B-easy. With an interval
    known to contain |G| and a single multiple of lambda(G) inside it, that
    multiple is returned with structure None; otherwise the structure is
    the list of (generator, order) cyclic factors of every Sylow subgroup.
    """
    rng = rng or random.Random(0)
    if max_stored is None:
        max_stored = memory_cap(interval[1].bit_length() if interval else 2 * B.bit_length())
    lam, factors = _group_exponent(group, B, c, rng, plan or make_plan(B), max_stored)
    logging.debug("lambda(G) = %d", lam)
    if interval is not None:
        lo, hi = interval
        multiples = interval_multiples(lam, lo, hi)
        if len(multiples) == 1:
            return multiples[0], None
        if not multiples:
            raise AmbiguousOrder(f"no multiple of lambda = {lam} lies in [{lo}, {hi}]")
        if not sylow:
            raise AmbiguousOrder(f"{len(multiples)} multiples of lambda in the interval")
    structure = []
    for p, h in sorted(factors.items()):
        structure.extend(sylow_structure(group, p, h, lam, B=B, rng=rng))
    order = math.prod(n for _, n in structure)
    if interval is not None and not interval[0] <= order <= interval[1]:
        raise AmbiguousOrder(f"Sylow structure gives {order}, outside [{interval[0]}, {interval[1]}]")
    return order, structure


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def refine_candidates(group: BlackBoxGroup, candidates: Iterable[int], rng: Optional[random.Random] = None,
                      checks: int = 20, sylow: bool = True) -> list:
    """
    Narrow a list of possible values of |G| down to those consistent with
    the group: annihilation of random elements first, then the exponent
    lambda estimated from element orders (|G|/lambda must only involve
    primes dividing lambda), then the Sylow subgroup orders at every prime
    where the survivors disagree. Returns the sorted survivors.
    """
    rng = rng or random.Random(0)
    survivors = sorted(set(candidates))
    for _ in range(checks):
        if len(survivors) <= 1:
            return survivors
        alpha = group.random(rng)
        survivors = [N for N in survivors if group.is_identity(group.exp(alpha, N))]
    if len(survivors) <= 1:
        return survivors

    # orders of elements annihilated by every survivor divide their gcd s
    lam, s, exponent = 1, None, None
    for _ in range(checks):
        if s is None:
            s = math.gcd(survivors[0], *(N - survivors[0] for N in survivors[1:]))
            exponent = FactoredExponent.from_dict(factorint(s))
        alpha = group.random(rng)
        if not group.is_identity(group.exp(alpha, s)):
            survivors = [N for N in survivors if group.is_identity(group.exp(alpha, N))]
            if len(survivors) <= 1:
                return survivors
            s = None
            continue
        lam = math.lcm(lam, order_from_exponent(group, alpha, exponent))
    lam_primes = list(factorint(lam))

    def supported(N):
        if N % lam:
            return False
        r = N // lam
        for p in lam_primes:
            while r % p == 0:
                r //= p
        return r == 1

    survivors = [N for N in survivors if supported(N)]
    logging.debug("Exponent filter: lambda >= %d leaves %d candidates", lam, len(survivors))
    if len(survivors) <= 1 or not sylow:
        return survivors

    L = math.lcm(*survivors)
    for p in lam_primes:
        if len({_valuation(N, p) for N in survivors}) == 1:
            continue
        basis = sylow_structure(group, p, _valuation(L, p), L, rng=rng)
        v = _valuation(math.prod(n for _, n in basis), p)
        survivors = [N for N in survivors if _valuation(N, p) == v]
        if len(survivors) <= 1:
            break
    return survivors
