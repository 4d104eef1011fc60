"""Exact arithmetic in the cyclotomic field Q(zeta_48), zeta = exp(i*pi/24).

Elements are stored as an integer numerator vector over the power basis
1, zeta, ..., zeta^15 together with one positive common denominator, reduced
modulo Phi_48(z) = z^16 - z^8 + 1.  Every constant the toolkit needs (x_c, mu,
cos(pi/8), cos(3pi/8), sqrt 2, sqrt 3, i, and all winding phases) lives here,
so identities are decided by exact zero tests.

Floating point only appears in :func:`approximate` and in the certified
interval evaluation used to order real elements.
"""

from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath

DEGREE = 16
ORDER = 48

__all__ = [
    "CycNum",
    "zeta",
    "constant",
    "winding_phase",
    "approximate",
    "real_sign",
    "compare",
    "CONSTANT_NAMES",
]


def _reduce_poly(c: list[int]) -> list[int]:
    # z^16 = z^8 - 1
    for k in range(len(c) - 1, DEGREE - 1, -1):
        v = c[k]
        if v:
            c[k - 8] += v
            c[k - 16] -= v
    del c[DEGREE:]
    return c


def _normalize(num: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        num = [-v for v in num]
        den = -den
    g = den
    for v in num:
        if v:
            g = gcd(g, v)
            if g == 1:
                break
    if g > 1:
        num = [v // g for v in num]
        den //= g
    if not any(num):
        den = 1
    return tuple(num), den


class CycNum:
    """An element of Q(zeta_48), immutable and hashable."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, value=0, den: int = 1):
        if isinstance(value, CycNum):
            self.num, self.den = value.num, value.den
        elif isinstance(value, (int, Fraction)):
            q = Fraction(value) / den
            num = [0] * DEGREE
            num[0] = q.numerator
            self.num, self.den = _normalize(num, q.denominator)
        else:
            num = list(value)
            if len(num) > DEGREE:
                num = _reduce_poly(num)
            num += [0] * (DEGREE - len(num))
            self.num, self.den = _normalize(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, num: tuple[int, ...], den: int) -> "CycNum":
        obj = cls.__new__(cls)
        obj.num, obj.den = num, den
        obj._hash = None
        return obj

    @classmethod
    def from_coefficients(cls, coeffs) -> "CycNum":
        """Build from 16 rationals (anything Fraction accepts)."""
        fr = [Fraction(c) for c in coeffs]
        if len(fr) != DEGREE:
            raise ValueError(f"expected {DEGREE} coefficients, got {len(fr)}")
        den = 1
        for f in fr:
            den = den * f.denominator // gcd(den, f.denominator)
        return cls([int(f * den) for f in fr], den)

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self.den) for v in self.num)

    # -- arithmetic -----------------------------------------------------

    @staticmethod
    def _coerce(other) -> "CycNum":
        if isinstance(other, CycNum):
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return CycNum([a + b for a, b in zip(self.num, other.num)], self.den)
        d1, d2 = self.den, other.den
        return CycNum([a * d2 + b * d1 for a, b in zip(self.num, other.num)], d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return CycNum._raw(tuple(-v for v in self.num), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycNum([v * other for v in self.num], self.den)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.num, other.num
        c = [0] * (2 * DEGREE - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        c[i + j] += ai * bj
        return CycNum(_reduce_poly(c), self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inv()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        result = CycNum(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inv(self) -> "CycNum":
        """Multiplicative inverse via the extended Euclidean algorithm on Q[z]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_48)")
        a = [Fraction(v, self.den) for v in self.num]
        s = _poly_inverse_mod_phi(a)
        return CycNum.from_coefficients(s + [Fraction(0)] * (DEGREE - len(s)))

    def shift(self, j: int) -> "CycNum":
        """Multiply by zeta**j."""
        j %= ORDER
        if j == 0:
            return self
        c = [0] * (DEGREE + j)
        c[j:j + DEGREE] = self.num
        return CycNum._raw(*_normalize(_reduce_poly(c), self.den))

    def galois(self, j: int) -> "CycNum":
        """Apply the automorphism zeta -> zeta**j (j coprime to 48)."""
        if gcd(j, ORDER) != 1:
            raise ValueError("automorphism exponent must be coprime to 48")
        acc = [0] * DEGREE
        for k, v in enumerate(self.num):
            if v:
                for t, u in enumerate(_zeta_power(k * j).num):
                    acc[t] += v * u
        return CycNum(acc, self.den)

    def conjugate(self) -> "CycNum":
        return self.galois(-1 % ORDER)

    @property
    def real(self) -> "CycNum":
        return (self + self.conjugate()) * Fraction(1, 2)

    @property
    def imag_times_i(self) -> "CycNum":
        """i*Im(self), i.e. (self - conj(self))/2."""
        return (self - self.conjugate()) * Fraction(1, 2)

    def is_real(self) -> bool:
        return self == self.conjugate()

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self.num[0], self.den)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycNum(other)
        if not isinstance(other, CycNum):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        terms = []
        for k, v in enumerate(self.num):
            if v:
                terms.append(f"{v}" if k == 0 else f"{v}*z^{k}")
        body = " + ".join(terms) if terms else "0"
        return f"CycNum(({body})/{self.den})" if self.den != 1 else f"CycNum({body})"

    # -- serialization ----------------------------------------------------

    def to_json(self) -> list[str]:
        out = []
        for f in self.coefficients:
            out.append(f"{f.numerator}/{f.denominator}")
        return out

    @classmethod
    def from_json(cls, data) -> "CycNum":
        return cls.from_coefficients(Fraction(s) for s in data)

    # -- numerics (reporting and certified ordering only) -----------------

    def interval(self, prec: int = 80):
        """Certified (re, im) intervals via mpmath interval arithmetic."""
        return _evaluate_interval(self, prec)

    def __float__(self):
        re, _ = self.interval(64)
        return float(re.mid)

    def __complex__(self):
        re, im = self.interval(64)
        return complex(float(re.mid), float(im.mid))


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_poly_trim(a)) >= len(b):
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, bi in enumerate(b):
            a[shift + i] -= f * bi
        a.pop()
    return _poly_trim(q), a


def _poly_mul(a, b):
    if not a or not b:
        return []
    c = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                c[i + j] += ai * bj
    return _poly_trim(c)


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


_PHI = [Fraction(1)] + [Fraction(0)] * 7 + [Fraction(-1)] + [Fraction(0)] * 7 + [Fraction(1)]


def _poly_inverse_mod_phi(a: list[Fraction]) -> list[Fraction]:
    # extended Euclid: track s with s*a = r (mod phi)
    r0, r1 = list(_PHI), _poly_trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if not r1:
        raise ZeroDivisionError("element is not invertible")
    c = r1[0]
    s = [v / c for v in s1]
    # reduce s modulo phi
    _, rem = _poly_divmod(s, list(_PHI))
    return rem


@lru_cache(maxsize=None)
def _zeta_power(k: int) -> CycNum:
    k %= ORDER
    c = [0] * max(k + 1, DEGREE)
    c[k] = 1
    return CycNum(_reduce_poly(c))


def zeta(k: int = 1) -> CycNum:
    """zeta**k with zeta = exp(i*pi/24)."""
    return _zeta_power(k % ORDER)


CONSTANT_NAMES = ("x_c", "mu", "cos_pi_8", "cos_3pi_8", "cos_pi_4", "sqrt2", "sqrt3", "imag_unit")


@lru_cache(maxsize=None)
def constant(name: str) -> CycNum:
    half = Fraction(1, 2)
    if name == "cos_pi_8":
        return (zeta(3) + zeta(-3)) * half
    if name == "cos_3pi_8":
        return (zeta(9) + zeta(-9)) * half
    if name == "cos_pi_4":
        return (zeta(6) + zeta(-6)) * half
    if name == "sqrt2":
        return zeta(6) + zeta(-6)
    if name == "sqrt3":
        return zeta(4) + zeta(-4)
    if name == "imag_unit":
        return zeta(12)
    if name == "mu":
        return constant("cos_pi_8") * 2
    if name == "x_c":
        return constant("mu").inv()
    raise ValueError(f"unknown constant {name!r}; expected one of {CONSTANT_NAMES}")


def winding_phase(w: int, sigma: Fraction = Fraction(5, 8)) -> CycNum:
    """exp(-i*sigma*w*pi/3) for a winding of w units of pi/3."""
    e = phase_exponent(sigma)
    return zeta(-e * w)


def phase_exponent(sigma) -> int:
    """Integer e with exp(-i*sigma*pi/3) = zeta**(-e); requires 8*sigma integral."""
    s8 = Fraction(sigma) * 8
    if s8.denominator != 1:
        raise ValueError(f"sigma={sigma} gives phases outside Q(zeta_48); 8*sigma must be an integer")
    return int(s8)


# -- certified numerics ----------------------------------------------------

@lru_cache(maxsize=32)
def _zeta_table(prec: int):
    iv = mpmath.iv
    with mpmath.workprec(prec):
        iv.prec = prec
        pi = iv.pi
        return [(iv.cos(pi * k / 24), iv.sin(pi * k / 24)) for k in range(DEGREE)]


def _evaluate_interval(a: CycNum, prec: int):
    iv = mpmath.iv
    old = iv.prec
    iv.prec = prec
    try:
        table = _zeta_table(prec)
        re = iv.mpf(0)
        im = iv.mpf(0)
        for k, v in enumerate(a.num):
            if v:
                c, s = table[k]
                re += c * v
                im += s * v
        den = iv.mpf(a.den)
        return re / den, im / den
    finally:
        iv.prec = old


def real_sign(a: CycNum, max_prec: int = 1 << 14) -> int:
    """Exact sign of Re(a): exact zero test first, then interval escalation."""
    re_exact = a.real
    if re_exact.is_zero():
        return 0
    prec = 64
    while prec <= max_prec:
        re, _ = _evaluate_interval(re_exact, prec)
        if re.a > 0:
            return 1
        if re.b < 0:
            return -1
        prec *= 2
    raise ArithmeticError("could not certify sign; precision budget exhausted")


def compare(a, b) -> int:
    """Sign of Re(a) - Re(b), decided exactly."""
    return real_sign(CycNum._coerce(a) - CycNum._coerce(b))


def approximate(a: CycNum, digits: int = 12) -> tuple[str, str]:
    """Decimal strings (re, im) with absolute error below 10**-digits."""
    if digits < 1:
        raise ValueError("digits must be positive")
    mag = (sum(abs(v) for v in a.num) // a.den + 1).bit_length()
    bits = int(digits * 3.33) + 40 + mag
    re, im = _evaluate_interval(a, bits)
    return _fmt(re, digits, bits), _fmt(im, digits, bits)


def _fmt(x, digits: int, bits: int) -> str:
    iv = mpmath.iv
    old = iv.prec
    iv.prec = bits
    try:
        with mpmath.workprec(bits):
            mid = mpmath.mpf(x.mid)
    finally:
        iv.prec = old
    with mpmath.workprec(bits):
        s = mpmath.nstr(mid, int(bits / 3.3) + 10, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
    with localcontext() as ctx:
        ctx.prec = len(s) + digits + 10
        d = Decimal(s).quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN)
    if d == 0:
        d = abs(d)
    return format(d, "f")
