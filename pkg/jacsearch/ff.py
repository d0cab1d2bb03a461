"""
ff.py

Finite field arithmetic for the Jacobian search: prime fields F_p (p odd, any
size) and the small extensions F_{p^2}, F_{p^3} in a polynomial basis.

Key features:
  - Immutable Field contexts with a dedicated folding reduction for primes of
    the form 2^e - c (c < 2^32), e.g. 2^61-1, 2^89-1 and 2^50-27
  - FieldElement values with canonical coordinates, usable with int operands
  - Montgomery batched inversion (one inversion plus 3(n-1) multiplications)
  - Tonelli-Shanks square roots and canonical non-residues for twisting
  - Dense polynomial helpers over a field and factorisation patterns
    (square-free + distinct-degree factorisation)

Usage example:
  >>> F = field_new(7)
  >>> F(3) * F(5)
  1 (mod 7)
  >>> F.non_residue()
  3 (mod 7)
"""

import itertools
import logging
import random
from typing import Iterator, Optional, Sequence, Union

import gmpy2
from sympy import primerange
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_ddf_zassenhaus,
    gf_from_int_poly,
    gf_irreducible_p,
    gf_monic,
    gf_sqf_list,
)


class CompositeCharacteristic(ValueError):
    pass


class ReduciblePolynomial(ValueError):
    pass


class UnsupportedDegree(ValueError):
    pass


class FieldMismatch(ValueError):
    pass


class ZeroInput(ValueError):
    pass


class ZeroPolynomial(ValueError):
    pass


class DivisionByZero(ZeroDivisionError):
    """Raised when inverting zero; ``index`` locates it inside a batch."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


# First 64 primes, the fixed bases of the strong probable-prime test.
_PRP_BASES = list(primerange(2, 312))[:64]


def is_probable_prime(n: int) -> bool:
    """
    Strong probable-prime test to 64 prime bases followed by a strong
    Lucas-Selfridge test.
    """
    if n < 2:
        return False
    for b in _PRP_BASES:
        if n == b:
            return True
        if n % b == 0:
            return False
    n = gmpy2.mpz(n)
    if not all(gmpy2.is_strong_prp(n, b) for b in _PRP_BASES):
        return False
    return bool(gmpy2.is_strong_selfridge_prp(n))


def _fold_reducer(e: int, c: int):
    mask = (1 << e) - 1
    p = (1 << e) - c

    def reduce(x: int) -> int:
        while x >> e:
            x = (x & mask) + (x >> e) * c
        return x - p if x >= p else x

    return reduce


def _height_order(k: int, start: int = 1) -> Iterator[tuple]:
    """Coordinate vectors ordered by largest coordinate, then lexicographically."""
    h = start
    while True:
        for coords in itertools.product(range(h + 1), repeat=k):
            if max(coords) == h:
                yield coords
        h += 1


class Field:
    """
    F_q with q = p^k, k in {1, 2, 3}. Elements of extensions are coefficient
    tuples (c_0, ..., c_{k-1}) of the basis 1, x, ..., x^{k-1} modulo the
    monic defining polynomial x^k + m_{k-1}x^{k-1} + ... + m_0.
    """

    __slots__ = ("p", "k", "modulus", "order", "width", "_reduce", "_nonresidue")

    def __init__(self, p: int, k: int = 1, modulus: Optional[Sequence[int]] = None):
        self.p = p
        self.k = k
        self.modulus = tuple(modulus) if modulus is not None else None
        self.order = p ** k
        self.width = (p.bit_length() + 7) // 8
        e = p.bit_length()
        c = (1 << e) - p
        if e > 40 and c < (1 << 32):
            self._reduce = _fold_reducer(e, c)
        else:
            self._reduce = None
        self._nonresidue = None

    # -- identity -----------------------------------------------------------
    def _key(self):
        return (self.p, self.k, self.modulus)

    def __eq__(self, other):
        return isinstance(other, Field) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.k == 1:
            return f"Field(p={self.p})"
        return f"Field(p={self.p}, k={self.k}, modulus={list(self.modulus)})"

    # -- raw value arithmetic (ints for k = 1, tuples otherwise) ------------
    def convert(self, value) -> Union[int, tuple]:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch(f"element of {value.field} used in {self}")
            return value.value
        if self.k == 1:
            return int(value) % self.p
        if isinstance(value, int):
            return (value % self.p,) + (0,) * (self.k - 1)
        coords = [int(c) % self.p for c in value]
        if len(coords) > self.k:
            raise UnsupportedDegree(f"{len(coords)} coordinates for a degree-{self.k} field")
        return tuple(coords + [0] * (self.k - len(coords)))

    def _add(self, a, b):
        p = self.p
        if self.k == 1:
            s = a + b
            return s - p if s >= p else s
        return tuple((x + y) % p for x, y in zip(a, b))

    def _sub(self, a, b):
        p = self.p
        if self.k == 1:
            s = a - b
            return s + p if s < 0 else s
        return tuple((x - y) % p for x, y in zip(a, b))

    def _neg(self, a):
        if self.k == 1:
            return self.p - a if a else 0
        return tuple((-x) % self.p for x in a)

    def _mul(self, a, b):
        p = self.p
        if self.k == 1:
            return self._reduce(a * b) if self._reduce else a * b % p
        k = self.k
        if isinstance(b, int):
            return tuple(x * b % p for x in a)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        m = self.modulus
        for d in range(2 * k - 2, k - 1, -1):
            top = prod[d] % p
            if top:
                for i in range(k):
                    prod[d - k + i] -= top * m[i]
        return tuple(x % p for x in prod[:k])

    def _is_zero(self, a) -> bool:
        return a == 0 if self.k == 1 else not any(a)

    def _pow(self, a, e: int):
        if self.k == 1:
            return pow(a, e, self.p)
        if e < 0:
            a, e = self._inv(a), -e
        result = self.convert(1)
        base = a
        while e:
            if e & 1:
                result = self._mul(result, base)
            e >>= 1
            if e:
                base = self._mul(base, base)
        return result

    def _inv(self, a):
        if self._is_zero(a):
            raise DivisionByZero(f"inverse of zero in {self}")
        if self.k == 1:
            return int(gmpy2.invert(a, self.p))
        return self._pow(a, self.order - 2)

    # -- element construction ---------------------------------------------
    def __call__(self, value) -> "FieldElement":
        return FieldElement(self, self.convert(value))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, self.convert(0))

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, self.convert(1))

    def random(self, rng: random.Random) -> "FieldElement":
        if self.k == 1:
            return FieldElement(self, rng.randrange(self.p))
        return FieldElement(self, tuple(rng.randrange(self.p) for _ in range(self.k)))

    def elements(self) -> Iterator["FieldElement"]:
        """All q elements in increasing canonical order (small fields only)."""
        if self.k == 1:
            for a in range(self.p):
                yield FieldElement(self, a)
            return
        for coords in itertools.product(range(self.p), repeat=self.k):
            yield FieldElement(self, tuple(reversed(coords)))

    def non_residue(self) -> "FieldElement":
        """Smallest quadratic non-residue, by coordinate height then lexicographically."""
        if self._nonresidue is None:
            for coords in _height_order(self.k):
                a = self(coords[0] if self.k == 1 else coords)
                if not a.is_qr():
                    self._nonresidue = a.value
                    break
        return FieldElement(self, self._nonresidue)


class FieldElement:
    """An element of a Field in canonical reduced form."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        self.field = field
        self.value = value

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch(f"cannot combine elements of {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return self.field.convert(other)
        return None

    def __add__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field._add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field._sub(self.value, b))

    def __rsub__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field._sub(b, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field._neg(self.value))

    def __mul__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field._mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        return FieldElement(self.field, self.field._mul(self.value, self.field._inv(b)))

    def __pow__(self, e: int):
        if e < 0 and not self:
            raise DivisionByZero(f"negative power of zero in {self.field}")
        return FieldElement(self.field, self.field._pow(self.value, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.convert(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __bool__(self):
        return not self.field._is_zero(self.value)

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})" if self.field.k == 1 else f"{self.value}"

    @property
    def coords(self) -> tuple:
        return (self.value,) if self.field.k == 1 else self.value

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field._inv(self.value))

    def is_qr(self) -> bool:
        return is_qr(self)

    def sqrt(self) -> Optional["FieldElement"]:
        return sqrt(self)

    def serialize(self) -> bytes:
        w = self.field.width
        return b"".join(c.to_bytes(w, "little") for c in self.coords)


def field_new(p: int, k: int = 1, poly: Optional[Sequence[int]] = None) -> Field:
    """
    Validate p and build F_{p^k}. ``poly`` lists the defining polynomial's
    coefficients low-to-high; when absent the smallest irreducible
    x^k + c_{k-1}x^{k-1} + ... + c_0 is found by deterministic search.
    """
    if k not in (1, 2, 3):
        raise UnsupportedDegree(f"extension degree {k} not in (1, 2, 3)")
    if p < 3 or p % 2 == 0 or not is_probable_prime(p):
        raise CompositeCharacteristic(f"{p} is not an odd prime")
    if k == 1:
        return Field(p)
    if poly is not None:
        coeffs = [int(c) % p for c in poly]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) != k + 1:
            raise UnsupportedDegree(f"defining polynomial must have degree {k}")
        lc_inv = pow(coeffs[-1], -1, p)
        coeffs = [c * lc_inv % p for c in coeffs]
        if not gf_irreducible_p([ZZ(c) for c in reversed(coeffs)], p, ZZ):
            raise ReduciblePolynomial(f"{coeffs} is reducible over F_{p}")
        return Field(p, k, coeffs[:k])
    for low in _height_order(k):
        if low[0] == 0:
            continue
        if gf_irreducible_p([ZZ(1)] + [ZZ(c) for c in reversed(low)], p, ZZ):
            logging.debug("Defining polynomial for F_%d^%d: %s", p, k, low)
            return Field(p, k, low)
    raise ReduciblePolynomial(f"no defining polynomial found for F_{p}^{k}")  # unreachable


def batch_inv(values: Sequence[FieldElement]) -> list:
    """Inverse of every entry using a single field inversion."""
    n = len(values)
    if n == 0:
        return []
    field = values[0].field
    prefix = [None] * n
    acc = field.one
    for i, v in enumerate(values):
        if v.field != field:
            raise FieldMismatch(f"batch entry {i} belongs to {v.field}")
        if not v:
            raise DivisionByZero(f"batch entry {i} is zero", index=i)
        prefix[i] = acc
        acc = acc * v
    inv = acc.inv()
    out = [None] * n
    for i in range(n - 1, -1, -1):
        out[i] = inv * prefix[i]
        inv = inv * values[i]
    return out


def is_qr(a: FieldElement) -> bool:
    """Euler's criterion; zero has no quadratic character."""
    if not a:
        raise ZeroInput("quadratic character of zero")
    F = a.field
    if F.k == 1:
        return gmpy2.legendre(a.value, F.p) == 1
    return a ** ((F.order - 1) // 2) == 1


def sqrt(a: FieldElement) -> Optional[FieldElement]:
    """
    Square root by Tonelli-Shanks; returns the root with the smaller
    coordinate vector, or None for a non-residue.
    """
    F = a.field
    if not a:
        return F.zero
    if not is_qr(a):
        return None
    q = F.order
    if q % 4 == 3:
        r = a ** ((q + 1) // 4)
    else:
        s, t = 0, q - 1
        while t % 2 == 0:
            s, t = s + 1, t // 2
        z = F.non_residue()
        c = z ** t
        r = a ** ((t + 1) // 2)
        b = a ** t
        m = s
        while b != 1:
            i, b2 = 0, b
            while b2 != 1:
                b2 = b2 * b2
                i += 1
            c = c ** (1 << (m - i - 1))
            r = r * c
            c = c * c
            b = b * c
            m = i
    other = -r
    return r if r.coords <= other.coords else other


# -- dense polynomials over a Field (coefficient lists, low to high) --------

def poly_trim(a: list) -> list:
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def poly_add(a: list, b: list) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return poly_trim(out)


def poly_sub(a: list, b: list) -> list:
    out = list(a) + [None] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = -c if out[i] is None else out[i] - c
    return poly_trim(out)


def poly_neg(a: list) -> list:
    return [-c for c in a]


def poly_scale(a: list, c: FieldElement) -> list:
    return poly_trim([x * c for x in a]) if c else []


def poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [None] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            t = x * y
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    return poly_trim(out)


def poly_divmod(a: list, b: list, lc_inv: Optional[FieldElement] = None) -> tuple:
    """Quotient and remainder; ``lc_inv`` supplies 1/lc(b) when already known."""
    if not b:
        raise DivisionByZero("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    if len(a) <= db:
        return [], poly_trim(a)
    if lc_inv is None:
        lc_inv = b[-1].inv()
    quot = [None] * (len(a) - db)
    for d in range(len(a) - 1, db - 1, -1):
        c = a[d] * lc_inv
        quot[d - db] = c
        if c:
            for i in range(db):
                a[d - db + i] = a[d - db + i] - c * b[i]
    return poly_trim(quot), poly_trim(a[:db])


def poly_mod(a: list, b: list, lc_inv: Optional[FieldElement] = None) -> list:
    return poly_divmod(a, b, lc_inv)[1]


def poly_monic(a: list) -> list:
    if not a:
        return []
    return poly_scale(a, a[-1].inv())


def poly_gcd(a: list, b: list) -> list:
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_mod(a, b)
    return poly_monic(a)


def poly_xgcd(a: list, b: list) -> tuple:
    """Monic g = gcd(a, b) with s*a + t*b = g."""
    one = (a or b)[0].field.one
    r0, r1 = poly_trim(a), poly_trim(b)
    s0, s1 = [one], []
    t0, t1 = [], [one]
    while r1:
        quot, rem = poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, poly_sub(s0, poly_mul(quot, s1))
        t0, t1 = t1, poly_sub(t0, poly_mul(quot, t1))
    if not r0:
        return [], s0, t0
    c = r0[-1].inv()
    return poly_scale(r0, c), poly_scale(s0, c), poly_scale(t0, c)


def poly_deriv(a: list) -> list:
    return poly_trim([c * i for i, c in enumerate(a)][1:])


def poly_eval(a: list, x: FieldElement) -> FieldElement:
    acc = x.field.zero
    for c in reversed(a):
        acc = acc * x + c
    return acc


def poly_powmod(base: list, e: int, mod: list) -> list:
    one = mod[-1].field.one
    result = [one]
    base = poly_mod(base, mod)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base), mod)
        e >>= 1
        if e:
            base = poly_mod(poly_mul(base, base), mod)
    return result


def as_poly(f: Sequence, F: Field) -> list:
    """Coefficient list (ints or elements, low to high) as trimmed field polynomial."""
    return poly_trim([F(c) for c in f])


# -- factorisation patterns ------------------------------------------------

def _pth_root(a: list) -> list:
    F = a[0].field
    e = F.p ** (F.k - 1)
    return [a[i] ** e for i in range(0, len(a), F.p)]


def _squarefree_parts(f: list) -> list:
    """Square-free decomposition of a monic f as [(factor, multiplicity)]."""
    F = f[0].field
    one = [F.one]
    parts = []
    df = poly_deriv(f)
    if not df:
        return [(g, m * F.p) for g, m in _squarefree_parts(_pth_root(f))]
    c = poly_gcd(f, df)
    w = poly_divmod(f, c)[0]
    i = 1
    while w != one:
        y = poly_gcd(w, c)
        fac = poly_divmod(w, y)[0]
        if len(fac) > 1:
            parts.append((poly_monic(fac), i))
        i += 1
        w, c = y, poly_divmod(c, y)[0]
    if c != one:
        parts.extend((g, m * F.p) for g, m in _squarefree_parts(_pth_root(c)))
    return parts


def _distinct_degree(f: list) -> list:
    """[(degree, count)] for a square-free monic f."""
    F = f[0].field
    x = [F.zero, F.one]
    h = list(x)
    out = []
    d = 1
    while 2 * d <= len(f) - 1:
        h = poly_powmod(h, F.order, f)
        g = poly_gcd(f, poly_sub(h, x))
        if len(g) > 1:
            out.append((d, (len(g) - 1) // d))
            f = poly_divmod(f, g)[0]
            h = poly_mod(h, f)
        d += 1
    if len(f) > 1:
        out.append((len(f) - 1, 1))
    return out


def poly_factor_degrees(f: Sequence, F: Field) -> list:
    """
    Degrees of the irreducible factors of f over F, with multiplicity,
    sorted ascending.
    """
    poly = as_poly(f, F)
    if not poly:
        raise ZeroPolynomial("factorisation pattern of the zero polynomial")
    degrees = []
    if F.k == 1:
        g = gf_from_int_poly([ZZ(c.value) for c in reversed(poly)], F.p)
        _, g = gf_monic(g, F.p, ZZ)
        _, sqf = gf_sqf_list(g, F.p, ZZ)
        for part, mult in sqf:
            for factor, d in gf_ddf_zassenhaus(part, F.p, ZZ):
                degrees.extend([d] * ((len(factor) - 1) // d * mult))
    else:
        for part, mult in _squarefree_parts(poly_monic(poly)):
            for d, count in _distinct_degree(part):
                degrees.extend([d] * (count * mult))
    return sorted(degrees)


def poly_irreducible(f: Sequence, F: Field) -> bool:
    poly = as_poly(f, F)
    if not poly:
        raise ZeroPolynomial("irreducibility of the zero polynomial")
    if len(poly) < 2:
        return False
    if F.k == 1:
        g = gf_from_int_poly([ZZ(c.value) for c in reversed(poly)], F.p)
        _, g = gf_monic(g, F.p, ZZ)
        return bool(gf_irreducible_p(g, F.p, ZZ))
    return poly_factor_degrees(poly, F) == [len(poly) - 1]
