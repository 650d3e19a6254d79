"""Exact arithmetic in Z[q, q^-1] and its fraction field Q(q).

Laurent polynomials are stored sparsely as exponent -> integer coefficient.
Quantum integers use the balanced convention [k] = q^(k-1) + q^(k-3) + ... + q^(1-k),
and quantum binomials are exact Laurent polynomials (the defining division is exact).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd as int_gcd
from typing import Iterable, Mapping

from .errors import PoleAtValue, ZeroDenominator


class LaurentPoly:
    """An integer-coefficient Laurent polynomial in q.

    >>> (q + one).coeffs
    {1: 1, 0: 1}
    >>> qint(2) * qint(2) == qint(3) + qint(1)
    True
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        d = dict(coeffs.items() if isinstance(coeffs, Mapping) else coeffs)
        self.coeffs = {e: c for e, c in d.items() if c != 0}
        self._hash: int | None = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(c: int) -> LaurentPoly:
        return LaurentPoly({0: c})

    @staticmethod
    def monomial(exp: int, coef: int = 1) -> LaurentPoly:
        return LaurentPoly({exp: coef})

    @staticmethod
    def coerce(x: int | LaurentPoly) -> LaurentPoly:
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, int):
            return LaurentPoly.const(x)
        raise TypeError(f"cannot coerce {x!r} to LaurentPoly")

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs == {0: 1}

    def is_unit_monomial(self) -> bool:
        """True for +-q^k."""
        return len(self.coeffs) == 1 and abs(next(iter(self.coeffs.values()))) == 1

    def degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return max(self.coeffs)

    def valuation(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no valuation")
        return min(self.coeffs)

    def content(self) -> int:
        """Positive gcd of the coefficients (0 for the zero polynomial)."""
        g = 0
        for c in self.coeffs.values():
            g = int_gcd(g, c)
            if g == 1:
                return 1
        return g

    def leading_coefficient(self) -> int:
        return self.coeffs[self.degree()]

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: int | LaurentPoly) -> LaurentPoly:
        other = LaurentPoly.coerce(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            n = out.get(e, 0) + c
            if n:
                out[e] = n
            else:
                out.pop(e, None)
        r = LaurentPoly.__new__(LaurentPoly)
        r.coeffs = out
        r._hash = None
        return r

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        r = LaurentPoly.__new__(LaurentPoly)
        r.coeffs = {e: -c for e, c in self.coeffs.items()}
        r._hash = None
        return r

    def __sub__(self, other: int | LaurentPoly) -> LaurentPoly:
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other: int | LaurentPoly) -> LaurentPoly:
        return (-self) + other

    def __mul__(self, other: int | LaurentPoly) -> LaurentPoly:
        if isinstance(other, int):
            if other == 0:
                return LaurentPoly()
            r = LaurentPoly.__new__(LaurentPoly)
            r.coeffs = {e: c * other for e, c in self.coeffs.items()}
            r._hash = None
            return r
        out: dict[int, int] = {}
        a, b = self.coeffs, other.coeffs
        if len(a) > len(b):
            a, b = b, a
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = e1 + e2
                n = out.get(e, 0) + c1 * c2
                if n:
                    out[e] = n
                else:
                    del out[e]
        r = LaurentPoly.__new__(LaurentPoly)
        r.coeffs = out
        r._hash = None
        return r

    __rmul__ = __mul__

    def __pow__(self, k: int) -> LaurentPoly:
        if k < 0:
            if not self.is_unit_monomial():
                raise ValueError("cannot invert a non-monomial Laurent polynomial")
            e = next(iter(self.coeffs))
            c = self.coeffs[e]
            return LaurentPoly.monomial(e * k, 1 if (c == 1 or k % 2 == 0) else -1)
        out = LaurentPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by q^k."""
        r = LaurentPoly.__new__(LaurentPoly)
        r.coeffs = {e + k: c for e, c in self.coeffs.items()}
        r._hash = None
        return r

    def bar(self) -> LaurentPoly:
        """The bar involution q -> q^-1."""
        r = LaurentPoly.__new__(LaurentPoly)
        r.coeffs = {-e: c for e, c in self.coeffs.items()}
        r._hash = None
        return r

    def evaluate(self, value: Fraction | int) -> Fraction:
        value = Fraction(value)
        if value == 0:
            raise ZeroDivisionError("cannot evaluate a Laurent polynomial at q=0")
        return sum((c * value**e for e, c in self.coeffs.items()), Fraction(0))

    def delta_coefficients(self) -> list[int]:
        """Express a bar-invariant polynomial in the basis delta^i, delta = q + q^-1.

        Returns [c_0, c_1, ...]; raises ValueError when no integer expansion exists.
        """
        p = self
        out: dict[int, int] = {}
        while p:
            d = p.degree()
            if d < 0 or p.valuation() != -d:
                raise ValueError("not expressible in powers of delta")
            c = p.coeffs[d]
            out[d] = c
            p = p - DELTA**d * c
        return [out.get(i, 0) for i in range(max(out, default=-1) + 1)]

    # -- comparisons / hashing -----------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.coeffs.items())))
        return self._hash

    # -- rendering ------------------------------------------------------

    def __repr__(self) -> str:
        return f"LaurentPoly('{self}')"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts: list[str] = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                term = str(mag)
            else:
                var = "q" if e == 1 else f"q^{e}"
                term = var if mag == 1 else f"{mag}*{var}"
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f" {sign} {term}")
        return "".join(parts)

    def to_json(self) -> list[list[int]]:
        return [[e, c] for e, c in sorted(self.coeffs.items())]

    @staticmethod
    def from_json(data: Iterable[Iterable[int]]) -> LaurentPoly:
        return LaurentPoly({int(e): int(c) for e, c in data})


ZERO = LaurentPoly()
one = ONE = LaurentPoly.const(1)
q = Q = LaurentPoly.monomial(1)
DELTA = LaurentPoly({1: 1, -1: 1})


def qint(k: int) -> LaurentPoly:
    """The balanced quantum integer [k]; [0] = 0 and [-k] = -[k]."""
    if k == 0:
        return ZERO
    sign = 1 if k > 0 else -1
    m = abs(k)
    return LaurentPoly({e: sign for e in range(1 - m, m, 2)})


def qfact(k: int) -> LaurentPoly:
    """[k]! = [k][k-1]...[1] for k >= 0."""
    out = ONE
    for i in range(2, k + 1):
        out = out * qint(i)
    return out


def qbinom(m: int, k: int) -> LaurentPoly:
    """The quantum binomial [m choose k], exact in Z[q,q^-1]; 0 for k < 0.

    Well-defined and generally nonzero for m < 0 (the symmetry in k fails there).
    """
    if k < 0:
        return ZERO
    if k == 0:
        return ONE
    num = ONE
    for i in range(k):
        num = num * qint(m - i)
    quot, rem = poly_divmod(num, qfact(k))
    if rem:
        raise ArithmeticError(f"quantum binomial division not exact for ({m},{k})")
    return quot


def poly_divmod(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Division with remainder, num = quot*den + rem, rem of degree < deg(den).

    Powers of q are units, so both arguments are shifted to genuine polynomials
    first. A non-integer quotient is reported as (0, num).
    """
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return ZERO, ZERO
    vn, vd = num.valuation(), den.valuation()
    d = {e - vd: c for e, c in den.coeffs.items()}
    r = {e - vn: c for e, c in num.coeffs.items()}
    ddeg = max(d)
    dlead = d[ddeg]
    ditems = list(d.items())
    quot: dict[int, int] = {}
    while r:
        rdeg = max(r)
        if rdeg < ddeg:
            break
        top = r[rdeg]
        c, rem = divmod(top, dlead)
        if rem:
            return _poly_divmod_fraction(num, den)
        e = rdeg - ddeg
        quot[e] = c
        for de, dc in ditems:
            ne = de + e
            nv = r.get(ne, 0) - c * dc
            if nv:
                r[ne] = nv
            else:
                r.pop(ne, None)
    return (
        LaurentPoly({e + vn - vd: c for e, c in quot.items()}),
        LaurentPoly({e + vn: c for e, c in r.items()}),
    )


def _poly_divmod_fraction(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Fraction fallback for divisions whose leading steps are not integral."""
    vn, vd = num.valuation(), den.valuation()
    d = {e - vd: Fraction(c) for e, c in den.coeffs.items()}
    r = {e - vn: Fraction(c) for e, c in num.coeffs.items()}
    ddeg = max(d)
    dlead = d[ddeg]
    quot: dict[int, Fraction] = {}
    while r and max(r) >= ddeg:
        rdeg = max(r)
        c = r[rdeg] / dlead
        e = rdeg - ddeg
        quot[e] = c
        for de, dc in d.items():
            ne = de + e
            nv = r.get(ne, Fraction(0)) - c * dc
            if nv:
                r[ne] = nv
            else:
                r.pop(ne, None)

    def back(fr: dict[int, Fraction], extra_shift: int) -> LaurentPoly | None:
        out = {}
        for e, c in fr.items():
            if c.denominator != 1:
                return None
            if c:
                out[e + extra_shift] = int(c)
        return LaurentPoly(out)

    qpoly = back(quot, vn - vd)
    rpoly = back(r, vn)
    if qpoly is None or rpoly is None:
        return ZERO, num
    return qpoly, rpoly


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """A gcd in Z[q,q^-1], normalized primitive with positive leading coefficient.

    Powers of q are units and never appear as factors of the result.
    """
    if a.is_zero() and b.is_zero():
        return ZERO
    if a.is_zero():
        return _normalize_gcd(b)
    if b.is_zero():
        return _normalize_gcd(a)
    ca, cb = a.content(), b.content()
    c = int_gcd(ca, cb)
    pa = _primitive_part(a)
    pb = _primitive_part(b)
    while not pb.is_zero():
        pa, pb = pb, _primitive_part(_pseudo_rem(pa, pb))
    g = pa * c
    return _normalize_gcd(g)


def _primitive_part(p: LaurentPoly) -> LaurentPoly:
    if p.is_zero():
        return p
    c = p.content()
    v = p.valuation()
    return LaurentPoly({e - v: cc // c for e, cc in p.coeffs.items()})


def _normalize_gcd(p: LaurentPoly) -> LaurentPoly:
    p = _primitive_part(p)
    if p and p.leading_coefficient() < 0:
        p = -p
    return p


def _pseudo_rem(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Pseudo-remainder of the polynomial parts (valuations already stripped)."""
    da, db = a.degree(), b.degree()
    if da < db:
        return a
    lb = b.leading_coefficient()
    r = a
    while r and r.degree() >= db:
        la = r.leading_coefficient()
        g = int_gcd(la, lb)
        r = r * (lb // g) - b.shift(r.degree() - db) * (la // g)
    return r


def poly_exact_div(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly:
    quot, rem = poly_divmod(num, den)
    if rem:
        raise ArithmeticError("division is not exact")
    return quot


class RatFun:
    """A canonical-form element of Q(q): num/den with den a primitive polynomial
    in q with positive leading coefficient and nonzero constant term.

    Equal values always have identical (num, den) pairs, so equality is structural.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: int | LaurentPoly, den: int | LaurentPoly = 1):
        num = LaurentPoly.coerce(num)
        den = LaurentPoly.coerce(den)
        if den.is_zero():
            raise ZeroDenominator("denominator is zero")
        if num.is_zero():
            self.num, self.den = ZERO, ONE
            return
        # move q-powers out of the denominator
        v = den.valuation()
        if v:
            den = den.shift(-v)
            num = num.shift(-v)
        g = poly_gcd(num, den)
        if not g.is_one():
            num = poly_exact_div(num, g)
            den = poly_exact_div(den, g)
        c = int_gcd(num.content(), den.content())
        if den.leading_coefficient() < 0:
            c = -c
        if c != 1:
            num = LaurentPoly({e: cc // c for e, cc in num.coeffs.items()})
            den = LaurentPoly({e: cc // c for e, cc in den.coeffs.items()})
        self.num, self.den = num, den

    @staticmethod
    def coerce(x: int | LaurentPoly | RatFun) -> RatFun:
        if isinstance(x, RatFun):
            return x
        return RatFun(LaurentPoly.coerce(x))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def __add__(self, other: int | LaurentPoly | RatFun) -> RatFun:
        other = RatFun.coerce(other)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RatFun:
        r = RatFun.__new__(RatFun)
        r.num, r.den = -self.num, self.den
        return r

    def __sub__(self, other: int | LaurentPoly | RatFun) -> RatFun:
        return self + (-RatFun.coerce(other))

    def __rsub__(self, other: int | LaurentPoly | RatFun) -> RatFun:
        return (-self) + other

    def __mul__(self, other: int | LaurentPoly | RatFun) -> RatFun:
        other = RatFun.coerce(other)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: int | LaurentPoly | RatFun) -> RatFun:
        other = RatFun.coerce(other)
        if other.is_zero():
            raise ZeroDenominator("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: int | LaurentPoly | RatFun) -> RatFun:
        return RatFun.coerce(other) / self

    def inverse(self) -> RatFun:
        return RatFun.coerce(1) / self

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, LaurentPoly)):
            other = RatFun.coerce(other)
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RatFun('{self}')"

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def to_json(self) -> dict[str, list[list[int]]]:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @staticmethod
    def from_json(data: Mapping) -> RatFun:
        return RatFun(LaurentPoly.from_json(data["num"]), LaurentPoly.from_json(data["den"]))


def ratfun_normalize(num: LaurentPoly, den: LaurentPoly) -> RatFun:
    """Canonical-form quotient num/den; raises ZeroDenominator when den = 0."""
    return RatFun(num, den)


def specialize(x: RatFun | LaurentPoly, value: Fraction | int) -> Fraction:
    """Exact evaluation at a rational q-value; raises PoleAtValue at a pole."""
    value = Fraction(value)
    if isinstance(x, LaurentPoly):
        return x.evaluate(value)
    d = x.den.evaluate(value)
    if d == 0:
        raise PoleAtValue(f"denominator vanishes at q={value}")
    return x.num.evaluate(value) / d


# ---------------------------------------------------------------------------
# Kronecker-packed polynomial arithmetic.
#
# A Laurent polynomial with exponents in [lo, hi] and coefficients bounded by
# 2^(K-1) packs faithfully into a single integer at q = 2^K (balanced digits).
# Integer multiplication then multiplies polynomials at C speed, which is what
# makes the big idempotent products tractable.
# ---------------------------------------------------------------------------


def pack_poly(p: LaurentPoly, k_bits: int, lo: int) -> int:
    acc = 0
    for e, c in p.coeffs.items():
        acc += c << (k_bits * (e - lo))
    return acc


def unpack_poly(acc: int, k_bits: int, lo: int) -> LaurentPoly:
    coeffs: dict[int, int] = {}
    base = 1 << k_bits
    half = base >> 1
    e = lo
    while acc:
        digit = acc & (base - 1)
        if digit >= half:
            digit -= base
        if digit:
            coeffs[e] = digit
        acc = (acc - digit) >> k_bits
        e += 1
    return LaurentPoly(coeffs)


def _pack_bound(polys: Iterable[LaurentPoly]) -> tuple[int, int, int]:
    """(max |coef|, min exponent, max exponent) over nonzero polys."""
    mx, lo, hi = 0, 0, 0
    seen = False
    for p in polys:
        for e, c in p.coeffs.items():
            if not seen:
                lo = hi = e
                seen = True
            lo = min(lo, e)
            hi = max(hi, e)
            a = -c if c < 0 else c
            if a > mx:
                mx = a
    return mx, lo, hi


def packed_matmul(
    rows_a: dict[int, dict[int, LaurentPoly]],
    rows_b: dict[int, dict[int, LaurentPoly]],
) -> dict[int, dict[int, LaurentPoly]]:
    """Sparse matrix product over Z[q,q^-1] via Kronecker packing.

    Inputs and output are dict-of-rows {i: {j: poly}} with no zero entries.
    """
    if not rows_a or not rows_b:
        return {}
    ma, loa, hia = _pack_bound(v for r in rows_a.values() for v in r.values())
    mb, lob, hib = _pack_bound(v for r in rows_b.values() for v in r.values())
    if ma == 0 or mb == 0:
        return {}
    terms = max(hia - loa, hib - lob) + 1
    inner = max(len(r) for r in rows_a.values())
    bound = ma * mb * terms * inner
    k_bits = bound.bit_length() + 2
    packed_b: dict[int, dict[int, int]] = {
        j: {k: pack_poly(p, k_bits, lob) for k, p in row.items()} for j, row in rows_b.items()
    }
    out: dict[int, dict[int, LaurentPoly]] = {}
    lo = loa + lob
    for i, arow in rows_a.items():
        acc: dict[int, int] = {}
        for j, ap in arow.items():
            brow = packed_b.get(j)
            if not brow:
                continue
            a_packed = pack_poly(ap, k_bits, loa)
            for k, b_packed in brow.items():
                acc[k] = acc.get(k, 0) + a_packed * b_packed
        orow = {}
        for k, v in acc.items():
            if v:
                p = unpack_poly(v, k_bits, lo)
                if p:
                    orow[k] = p
        if orow:
            out[i] = orow
    return out


def naive_matmul(
    rows_a: dict[int, dict[int, LaurentPoly]],
    rows_b: dict[int, dict[int, LaurentPoly]],
) -> dict[int, dict[int, LaurentPoly]]:
    """Reference sparse product used to cross-check packed_matmul."""
    out: dict[int, dict[int, LaurentPoly]] = {}
    for i, arow in rows_a.items():
        acc: dict[int, LaurentPoly] = {}
        for j, ap in arow.items():
            brow = rows_b.get(j)
            if not brow:
                continue
            for k, bp in brow.items():
                cur = acc.get(k)
                acc[k] = ap * bp if cur is None else cur + ap * bp
        orow = {k: v for k, v in acc.items() if v}
        if orow:
            out[i] = orow
    return out
