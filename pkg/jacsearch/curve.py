"""
curve.py

Hyperelliptic curves y^2 = f(x) of genus 2 and 3 (f monic of degree 2g+1)
and their Jacobians as black-box groups of reduced Mumford divisors (u, v).

Addition and doubling of two full-degree divisors run an affine explicit
path that needs a single field inversion. The inversion is deferred so a
batch of independent operations shares one Montgomery batch inversion;
everything else (shared roots, low degrees, identity) goes through Cantor's
composition and reduction.

Usage example:
  >>> F = field_new(2**61 - 1)
  >>> C = curve_new(2, F, [816, 1, 7, 2, 0, 1])     # x^5+2x^3+7x^2+x+816
  >>> J = Jacobian(C)
  >>> D = J.random(random.Random(1))
  >>> jac_exp(D, 2) == jac_double(D)
  True
"""

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .ff import (
    Field,
    FieldElement,
    as_poly,
    batch_inv,
    poly_add,
    poly_deriv,
    poly_divmod,
    poly_eval,
    poly_gcd,
    poly_mod,
    poly_mul,
    poly_neg,
    poly_scale,
    poly_sub,
    poly_trim,
    poly_xgcd,
    sqrt,
)
from .genalg import BlackBoxGroup, FactoredExponent


class SingularCurve(ValueError):
    pass


class BadDegree(ValueError):
    pass


class NotMonic(ValueError):
    pass


class CurveMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CurveParams:
    genus: int
    field: Field
    f: tuple  # FieldElement coefficients, low to high

    def coefficients(self) -> list:
        """Coefficients of f as integer coordinate lists (ints for prime fields), low to high."""
        if self.field.k == 1:
            return [c.value for c in self.f]
        return [list(c.coords) for c in self.f]


def curve_new(g: int, field: Field, f_coeffs: Sequence) -> CurveParams:
    """Validate y^2 = f(x) with f given low to high."""
    if g not in (2, 3):
        raise BadDegree(f"genus {g} not supported (2 or 3)")
    f = as_poly(f_coeffs, field)
    if len(f) - 1 != 2 * g + 1:
        raise BadDegree(f"f has degree {len(f) - 1}, expected {2 * g + 1}")
    if f[-1] != 1:
        raise NotMonic(f"leading coefficient {f[-1]} is not 1")
    if len(poly_gcd(f, poly_deriv(f))) > 1:
        raise SingularCurve("f has a repeated root (zero discriminant)")
    return CurveParams(g, field, tuple(f))


def twist(C: CurveParams) -> CurveParams:
    """Quadratic twist y^2 = a^d f(x/a) by the field's canonical non-residue a."""
    alpha = C.field.non_residue()
    d = len(C.f) - 1
    return CurveParams(C.genus, C.field, tuple(c * alpha ** (d - i) for i, c in enumerate(C.f)))


class Divisor:
    """Reduced Mumford pair: u monic, deg v < deg u <= g, u | v^2 - f."""

    __slots__ = ("curve", "u", "v")

    def __init__(self, curve: CurveParams, u: tuple, v: tuple):
        self.curve = curve
        self.u = u
        self.v = v

    def _key(self):
        return tuple(c.value for c in self.u), tuple(c.value for c in self.v)

    def __eq__(self, other):
        if not isinstance(other, Divisor):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Divisor(u={[c.value for c in self.u]}, v={[c.value for c in self.v]})"

    @property
    def degree(self) -> int:
        return len(self.u) - 1

    def is_valid(self) -> bool:
        u, v = list(self.u), list(self.v)
        if not u or u[-1] != 1 or len(v) >= len(u) or len(u) - 1 > self.curve.genus:
            return False
        return not poly_mod(poly_sub(poly_mul(v, v), list(self.curve.f)), u)


class Jacobian(BlackBoxGroup):
    """J(C) as a black box; elements are Divisor values."""

    fast_inverse = True

    def __init__(self, curve: CurveParams):
        super().__init__()
        self.curve = curve
        self.field = curve.field
        self.g = curve.genus
        self.f = list(curve.f)
        self._one = self.field.one
        self._zero = self.field.zero
        self._identity = Divisor(curve, (self._one,), ())

    @property
    def identity(self) -> Divisor:
        return self._identity

    def _check(self, D: Divisor):
        if D.curve is not self.curve and D.curve != self.curve:
            raise CurveMismatch("divisor belongs to a different curve")

    def _make(self, u: list, v: list) -> Divisor:
        return Divisor(self.curve, tuple(u), tuple(v))

    # -- group law ----------------------------------------------------------
    def _op(self, a: Divisor, b: Divisor) -> Divisor:
        return self._op_batch([(a, b)])[0]

    def _op_batch(self, pairs: Sequence[tuple]) -> list:
        results = [None] * len(pairs)
        pending, dets = [], []
        for i, (a, b) in enumerate(pairs):
            self._check(a)
            self._check(b)
            prepared = self._prepare(a, b)
            if prepared is None:
                results[i] = self._cantor(a, b)
            else:
                pending.append((i, prepared[0]))
                dets.append(prepared[1])
        if dets:
            for (i, state), dinv in zip(pending, batch_inv(dets)):
                results[i] = self._finish(state, dinv)
        return results

    def invert(self, D: Divisor) -> Divisor:
        return Divisor(self.curve, D.u, tuple(-c for c in D.v))

    def _prepare(self, D1: Divisor, D2: Divisor):
        """
        Inversion-free part of the explicit formulas. Returns (state, d) where
        the remaining work needs 1/d, or None when Cantor must handle the pair.
        """
        g = self.g
        if len(D1.u) != g + 1 or len(D2.u) != g + 1:
            return None
        u1, v1, u2, v2 = list(D1.u), list(D1.v), list(D2.u), list(D2.v)
        one = self._one
        if D1 == D2:
            if not v1:
                return None
            a = poly_scale(v1, self.field(2))
            k = poly_divmod(poly_sub(self.f, poly_mul(v1, v1)), u1, one)[0]
            target = poly_mod(k, u1, one)
        else:
            if D1.u == D2.u:
                return None
            a = poly_sub(u1, u2)
            target = poly_sub(v2, v1)
        r, adj0 = self._almost_inverse(a, u2)
        s_prime = poly_mod(poly_mul(adj0, target), u2, one)
        s_top = s_prime[g - 1] if len(s_prime) == g else self._zero
        d = r * s_top
        if not d:
            return None
        return (u1, v1, u2, s_prime, r, s_top), d

    def _almost_inverse(self, a: list, u: list) -> tuple:
        """(r, b) with a*b = r mod u and r the resultant-type determinant."""
        g, zero = self.g, self._zero
        col = list(a) + [zero] * (g - len(a))
        cols = [col]
        for _ in range(1, g):
            top = col[g - 1]
            col = [zero] + col[:g - 1]
            if top:
                col = [c - top * ui for c, ui in zip(col, u)]
            cols.append(col)
        m = [[cols[j][i] for j in range(g)] for i in range(g)]
        if g == 2:
            c0, c1 = m[1][1], -m[1][0]
            det = m[0][0] * c0 + m[0][1] * c1
            return det, poly_trim([c0, c1])
        c0 = m[1][1] * m[2][2] - m[1][2] * m[2][1]
        c1 = m[1][2] * m[2][0] - m[1][0] * m[2][2]
        c2 = m[1][0] * m[2][1] - m[1][1] * m[2][0]
        det = m[0][0] * c0 + m[0][1] * c1 + m[0][2] * c2
        return det, poly_trim([c0, c1, c2])

    def _finish(self, state: tuple, dinv: FieldElement) -> Divisor:
        u1, v1, u2, s_prime, r, s_top = state
        g = self.g
        s = poly_scale(s_prime, s_top * dinv)
        top_inv = r * r * dinv
        U = poly_mul(u1, u2)
        V = poly_add(v1, poly_mul(u1, s))
        W = poly_divmod(poly_sub(self.f, poly_mul(V, V)), U, self._one)[0]
        ilc = -(top_inv * top_inv)
        cur_u = W
        cur_v = poly_mod(poly_neg(V), cur_u, ilc)
        while len(cur_u) - 1 > g:
            nxt = poly_divmod(poly_sub(self.f, poly_mul(cur_v, cur_v)), cur_u, ilc)[0]
            ilc = cur_u[-1]
            cur_u = nxt
            cur_v = poly_mod(poly_neg(cur_v), cur_u, ilc)
        return self._make(poly_scale(cur_u, ilc), cur_v)

    def _cantor(self, D1: Divisor, D2: Divisor) -> Divisor:
        """Cantor composition and reduction; handles every input."""
        u1, v1, u2, v2 = list(D1.u), list(D1.v), list(D2.u), list(D2.v)
        d1, e1, e2 = poly_xgcd(u1, u2)
        d, c1, c2 = poly_xgcd(d1, poly_add(v1, v2))
        s1, s2, s3 = poly_mul(c1, e1), poly_mul(c1, e2), c2
        dd = poly_mul(d, d)
        u = poly_divmod(poly_mul(u1, u2), dd)[0]
        num = poly_add(poly_add(poly_mul(poly_mul(s1, u1), v2), poly_mul(poly_mul(s2, u2), v1)),
                       poly_mul(s3, poly_add(poly_mul(v1, v2), self.f)))
        v = poly_mod(poly_divmod(num, d)[0], u)
        while len(u) - 1 > self.g:
            u = poly_divmod(poly_sub(self.f, poly_mul(v, v)), u)[0]
            v = poly_mod(poly_neg(v), u)
        lc_inv = u[-1].inv()
        u = poly_scale(u, lc_inv)
        return self._make(u, poly_mod(v, u, self._one))

    # -- black box plumbing -------------------------------------------------
    def random(self, rng: random.Random) -> Divisor:
        """Sum of g random affine points (random x with f(x) a square, random root sign)."""
        D = self.identity
        for _ in range(self.g):
            while True:
                x = self.field.random(rng)
                y = sqrt(poly_eval(self.f, x))
                if y is not None:
                    break
            if rng.getrandbits(1):
                y = -y
            point = self._make([-x, self._one], [y] if y else [])
            D = self._cantor(D, point)
        return D

    def serialize(self, D: Divisor) -> bytes:
        out = [bytes([len(D.u)])]
        out.extend(c.serialize() for c in D.u)
        out.append(bytes([len(D.v)]))
        out.extend(c.serialize() for c in D.v)
        return b"".join(out)

    def canonical_bytes(self, D: Divisor) -> bytes:
        neg = [-c for c in D.v]
        v = D.v if [c.coords for c in D.v] <= [c.coords for c in neg] else neg
        return self.serialize(Divisor(self.curve, D.u, tuple(v)))


@lru_cache(maxsize=64)
def jacobian(C: CurveParams) -> Jacobian:
    return Jacobian(C)


def jac_add(D1: Divisor, D2: Divisor) -> Divisor:
    if D1.curve != D2.curve:
        raise CurveMismatch("divisors on different curves")
    return jacobian(D1.curve).compose(D1, D2)


def jac_double(D: Divisor) -> Divisor:
    return jacobian(D.curve).compose(D, D)


def jac_neg(D: Divisor) -> Divisor:
    return jacobian(D.curve).invert(D)


def jac_batch(pairs: Sequence[tuple]) -> list:
    if not pairs:
        return []
    J = jacobian(pairs[0][0].curve)
    return J.batch_compose(pairs)


def jac_exp(D: Divisor, e) -> Divisor:
    if isinstance(e, FactoredExponent):
        e = e.value
    if e < 0:
        raise ValueError(f"jac_exp needs e >= 0, got {e}")
    return jacobian(D.curve).exp(D, e)


def jac_random(C: CurveParams, rng: random.Random) -> Divisor:
    return jacobian(C).random(rng)


def jac_hash(D: Divisor, bits: int = 64) -> int:
    """Hash of (u, smaller of +-v); the identity hashes to 0."""
    return jacobian(D.curve).hash(D, bits)
