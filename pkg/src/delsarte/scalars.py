"""Scalar arithmetic backends: exact rationals, real cyclotomic fields, floats.

Every solver component is generic over a *scalar context*.  A context knows how
to build, compare and serialize the numbers it owns; the numbers themselves
support ordinary Python arithmetic operators.  Three families exist:

* ``RationalContext`` -- exact rationals (gmpy2.mpq when available).
* ``CyclotomicContext(n)`` -- the real cyclotomic field Q(2*cos(2*pi/n)),
  represented in the power basis of ``c = 2*cos(2*pi/n)`` modulo its integer
  minimal polynomial.  Needed so that cosine grids stay exact for every n,
  not only the five orders with rational cosines.
* ``FloatContext`` -- double precision with a pivot tolerance.

Sign determination for cyclotomic numbers is done by an exact zero test on the
coordinate vector followed by numeric evaluation with a rigorous forward error
bound, escalating precision through mpmath until the sign is certain.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache

import mpmath

try:
    from gmpy2 import mpq as _mpq

    _HAVE_GMPY = True
except ImportError:  # pragma: no cover - gmpy2 is a hard dependency normally
    _mpq = Fraction
    _HAVE_GMPY = False

_EPS = 2.220446049250313e-16
_TINY = 2.2250738585072014e-308


def rational(a, b=None):
    """Exact rational from ints, strings, Fractions or another rational."""
    if b is None:
        if isinstance(a, float):
            # floats enter exact arithmetic only through explicit user input;
            # take the exact binary value rather than a decimal reparse
            return _mpq(Fraction(a))
        return _mpq(a)
    return _mpq(a, b)


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction)) or type(x) is type(_mpq(0))


# ---------------------------------------------------------------------------
# integer polynomial helpers (ascending coefficient lists)
# ---------------------------------------------------------------------------


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _poly_divexact(num, den):
    """Divide integer polynomials exactly (den monic); raises if not exact."""
    num = list(num)
    dd = len(den) - 1
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    out = [0] * (len(num) - dd)
    for k in range(len(out) - 1, -1, -1):
        q = num[dd + k]
        out[k] = q
        if q:
            for j, dj in enumerate(den):
                num[k + j] -= q * dj
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return out


def _poly_sqrt_monic(h):
    """Integer square root of a monic integer polynomial, h = g*g."""
    if (len(h) - 1) % 2:
        raise ValueError("odd degree has no polynomial square root")
    m = (len(h) - 1) // 2
    g = [0] * (m + 1)
    g[m] = 1
    for j in range(1, m + 1):
        acc = h[2 * m - j]
        for a in range(m - j + 1, m):
            b = 2 * m - j - a
            if 0 <= b <= m:
                acc -= g[a] * g[b]
        if acc % 2:
            raise ArithmeticError("polynomial is not a perfect square")
        g[m - j] = acc // 2
    if _poly_mul(g, g) != list(h):
        raise ArithmeticError("polynomial square root failed")
    return g


def _dickson(n):
    """B_n with B_0 = 2, B_1 = x, B_{k+1} = x*B_k - B_{k-1}; B_n(2cos t) = 2cos(nt)."""
    if n == 0:
        return [2]
    prev, cur = [2], [0, 1]
    for _ in range(n - 1):
        nxt = [0] + cur
        for i, p in enumerate(prev):
            nxt[i] -= p
        prev, cur = cur, nxt
    return cur


@lru_cache(maxsize=None)
def cos_minimal_polynomial(n: int):
    """Monic integer minimal polynomial of 2*cos(2*pi/n), ascending coeffs.

    Uses the factorisation of prod_{j<n} (x - 2cos(2pi j/n)) = B_n(x) - 2
    into the minimal polynomials of the 2cos(2pi/d) for d | n, where the
    primitive factors for d >= 3 appear squared.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return (-2, 1)
    if n == 2:
        return (2, 1)
    q = _dickson(n)
    q[0] -= 2
    for d in sorted(_divisors(n)):
        if d == n:
            continue
        psi = list(cos_minimal_polynomial(d))
        mult = 1 if d <= 2 else 2
        for _ in range(mult):
            q = _poly_divexact(q, psi)
    return tuple(_poly_sqrt_monic(q))


def _divisors(n):
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return out


def euler_phi(n: int) -> int:
    out, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


# ---------------------------------------------------------------------------
# contexts
# ---------------------------------------------------------------------------


class ScalarContext:
    """Interface shared by all scalar backends."""

    exact = True
    name = "abstract"

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def coerce(self, v):
        raise NotImplementedError

    def sign(self, x) -> int:
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        return self.sign(x) == 0

    def eq(self, x, y) -> bool:
        return self.is_zero(self.coerce(x) - self.coerce(y))

    def to_float(self, x) -> float:
        return float(x)

    def serialize(self, x) -> str:
        raise NotImplementedError

    def parse(self, s: str):
        raise NotImplementedError

    def cos_two_pi(self, j: int, n: int):
        """Exact cos(2*pi*j/n) if this context can represent it."""
        raise NotImplementedError(f"{self.name} context has no exact cosines")


def _serialize_rational(q) -> str:
    s = str(q)
    return s


_RAT_RE = re.compile(r"^-?\d+(/\d+)?$")


class RationalContext(ScalarContext):
    """Plain exact rationals."""

    exact = True
    name = "rational"

    def coerce(self, v):
        if isinstance(v, CycNum):
            if not v.is_rational():
                raise ValueError("cannot coerce an irrational cyclotomic to Q")
            return v.coords[0]
        if isinstance(v, float):
            return rational(v)
        return _mpq(v)

    def sign(self, x):
        if x > 0:
            return 1
        if x < 0:
            return -1
        return 0

    def serialize(self, x):
        return _serialize_rational(x)

    def parse(self, s):
        if not _RAT_RE.match(s.strip()):
            raise ValueError(f"not a rational literal: {s!r}")
        return _mpq(s.strip())

    def cos_two_pi(self, j, n):
        # delegated to the degree-1 cyclotomic table when cosines are rational
        c2 = _rational_cos_table(n)
        if c2 is None:
            raise ValueError(f"cos(2*pi/{n}) is irrational; use CyclotomicContext")
        return c2[j % n]


@lru_cache(maxsize=None)
def _rational_cos_table(n):
    if euler_phi(n) > 2:
        return None
    vals = {1: 1, 2: -1, 3: _mpq(-1, 2), 4: 0, 6: _mpq(1, 2)}
    c = _mpq(2) * vals[n] if n in vals else None
    if c is None:
        return None
    # cos(2 pi j / n) = B_j(c)/2 evaluated at the rational c
    table = []
    for j in range(n):
        b = _dickson(j % n)
        acc = _mpq(0)
        for k in range(len(b) - 1, -1, -1):
            acc = acc * c + b[k]
        table.append(acc / 2)
    return tuple(table)


class CyclotomicContext(ScalarContext):
    """The real subfield Q(2cos(2pi/n)) in the power basis of c = 2cos(2pi/n)."""

    exact = True

    def __init__(self, n: int):
        self.n = n
        self.name = f"cyc{n}"
        psi = cos_minimal_polynomial(n)
        self.degree = len(psi) - 1
        self.minpoly = tuple(_mpq(a) for a in psi)
        m = self.degree
        # reduction rows: c^(m+j) = sum_i red[j][i] c^i, j = 0 .. m-2
        red = []
        head = [-a for a in self.minpoly[:m]]  # c^m
        red.append(list(head))
        for _ in range(1, m - 1):
            prev = red[-1]
            row = [_mpq(0)] + prev[: m - 1]
            top = prev[m - 1]
            if top:
                for i in range(m):
                    row[i] += top * head[i]
            red.append(row)
        self._red = tuple(tuple(r) for r in red)
        self._czero = (_mpq(0),) * m
        self._cfloat = 2.0 * math.cos(2.0 * math.pi / n)
        self._cpow_f = tuple(self._cfloat**i for i in range(m))
        self._cos_cache = {}
        self._zero = CycNum(self, self._czero)
        self._one = CycNum(self, (_mpq(1),) + (_mpq(0),) * (m - 1))

    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    def coerce(self, v):
        if isinstance(v, CycNum):
            if v.ctx is self:
                return v
            if v.is_rational():
                return self.from_rational(v.coords[0])
            if v.ctx.n == self.n:
                return CycNum(self, v.coords)
            raise ValueError(f"cannot mix {v.ctx.name} with {self.name}")
        if isinstance(v, float):
            return self.from_rational(rational(v))
        return self.from_rational(_mpq(v))

    def from_rational(self, q):
        m = self.degree
        return CycNum(self, (_mpq(q),) + (_mpq(0),) * (m - 1))

    def from_coords(self, coords):
        m = self.degree
        cs = [_mpq(c) for c in coords]
        if len(cs) > m:
            raise ValueError("too many coordinates")
        cs += [_mpq(0)] * (m - len(cs))
        return CycNum(self, tuple(cs))

    def _reduce(self, raw):
        """Reduce a product list of length <= 2m-1 modulo the minimal polynomial."""
        m = self.degree
        out = list(raw[:m]) + [_mpq(0)] * (m - min(m, len(raw)))
        for j in range(m, len(raw)):
            coef = raw[j]
            if coef:
                row = self._red[j - m]
                for i in range(m):
                    if row[i]:
                        out[i] += coef * row[i]
        return tuple(out)

    def cos_two_pi(self, j, n):
        if n != self.n:
            if self.n % n == 0:
                j = j * (self.n // n)
                n = self.n
            else:
                raise ValueError(f"context is for order {self.n}, not {n}")
        j = j % n
        j = min(j, n - j)
        hit = self._cos_cache.get(j)
        if hit is not None:
            return hit
        b = _dickson(j)
        m = self.degree
        if m == 1:
            c = self.from_rational(-self.minpoly[0])
        else:
            c = CycNum(self, (_mpq(0), _mpq(1)) + (_mpq(0),) * (m - 2))
        # Horner in the field: cos(2 pi j / n) = B_j(c) / 2
        accn = self.zero
        for k in range(len(b) - 1, -1, -1):
            accn = accn * c
            if b[k]:
                accn = accn + self.from_rational(b[k])
        res = accn / self.from_rational(2)
        self._cos_cache[j] = res
        return res

    def sign(self, x):
        return self.coerce(x).sign()

    def is_zero(self, x):
        return all(c == 0 for c in self.coerce(x).coords)

    def to_float(self, x):
        return float(self.coerce(x))

    def serialize(self, x):
        x = self.coerce(x)
        if x.is_rational():
            return _serialize_rational(x.coords[0])
        return f"cyc{self.n}:" + ",".join(_serialize_rational(c) for c in x.coords)

    def parse(self, s):
        s = s.strip()
        if _RAT_RE.match(s):
            return self.from_rational(_mpq(s))
        m = re.match(r"^cyc(\d+):(.*)$", s)
        if not m:
            raise ValueError(f"not a {self.name} literal: {s!r}")
        if int(m.group(1)) != self.n:
            raise ValueError(f"literal for cyc{m.group(1)} in {self.name} context")
        parts = m.group(2).split(",")
        return self.from_coords([_mpq(p) for p in parts])


class CycNum:
    """Element of a real cyclotomic field; immutable, supports arithmetic."""

    __slots__ = ("ctx", "coords", "_sgn")

    def __init__(self, ctx, coords):
        self.ctx = ctx
        self.coords = coords
        self._sgn = None

    def is_rational(self):
        return all(c == 0 for c in self.coords[1:])

    def _co(self, other):
        if isinstance(other, CycNum):
            if other.ctx is not self.ctx and other.ctx.n != self.ctx.n:
                raise ValueError("mixed cyclotomic fields")
            return other
        if isinstance(other, float):
            raise TypeError("refusing implicit float -> exact coercion")
        return self.ctx.from_rational(_mpq(other))

    def __add__(self, other):
        o = self._co(other)
        return CycNum(self.ctx, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._co(other)
        return CycNum(self.ctx, tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        o = self._co(other)
        return CycNum(self.ctx, tuple(b - a for a, b in zip(self.coords, o.coords)))

    def __neg__(self):
        return CycNum(self.ctx, tuple(-a for a in self.coords))

    def __mul__(self, other):
        o = self._co(other)
        a, b = self.coords, o.coords
        m = self.ctx.degree
        if m == 1:
            return CycNum(self.ctx, (a[0] * b[0],))
        raw = [_mpq(0)] * (2 * m - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        raw[i + j] += ai * bj
        return CycNum(self.ctx, self.ctx._reduce(raw))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._co(other)
        return self * o._inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        return o * self._inverse()

    def _inverse(self):
        if self.is_rational():
            q = self.coords[0]
            if q == 0:
                raise ZeroDivisionError("division by zero in cyclotomic field")
            m = self.ctx.degree
            return CycNum(self.ctx, (1 / _mpq(q),) + (_mpq(0),) * (m - 1))
        # extended Euclid over Q[x]: u*self + v*minpoly = 1
        a = list(self.coords)
        while a and a[-1] == 0:
            a.pop()
        b = list(self.ctx.minpoly)
        # invariants: a = ua * self (mod psi), b = ub * self (mod psi)
        ua = [_mpq(1)]
        ub = [_mpq(0)]
        while True:
            if len(a) == 1:
                if a[0] == 0:
                    raise ZeroDivisionError("division by zero in cyclotomic field")
                inv = 1 / a[0]
                m = self.ctx.degree
                co = [u * inv for u in ua] + [_mpq(0)] * m
                return CycNum(self.ctx, self.ctx._reduce(co[: 2 * m - 1]))
            # b = q*a + r
            r = list(b)
            q = [_mpq(0)] * (len(b) - len(a) + 1)
            for k in range(len(b) - len(a), -1, -1):
                f = r[len(a) - 1 + k] / a[-1]
                q[k] = f
                if f:
                    for j, aj in enumerate(a):
                        r[j + k] -= f * aj
            while r and r[-1] == 0:
                r.pop()
            if not r:
                r = [_mpq(0)]
            # ur = ub - q*ua
            qua = [_mpq(0)] * (len(q) + len(ua) - 1)
            for i, qi in enumerate(q):
                if qi:
                    for j, uj in enumerate(ua):
                        qua[i + j] += qi * uj
            ur = list(ub) + [_mpq(0)] * max(0, len(qua) - len(ub))
            for i, v in enumerate(qua):
                ur[i] -= v
            while len(ur) > 1 and ur[-1] == 0:
                ur.pop()
            a, b, ua, ub = r, a, ur, ua

    def sign(self):
        if self._sgn is not None:
            return self._sgn
        if all(c == 0 for c in self.coords):
            self._sgn = 0
            return 0
        s = self._sign_float()
        if s is None:
            s = self._sign_mpmath()
        self._sgn = s
        return s

    def _sign_float(self):
        ctx = self.ctx
        val = 0.0
        scale = _TINY
        for i, a in enumerate(self.coords):
            if a:
                af = float(a)
                val += af * ctx._cpow_f[i]
                scale += abs(af) * abs(ctx._cpow_f[i])
        bound = (3 * ctx.degree + 8) * _EPS * scale
        if abs(val) > bound:
            return 1 if val > 0 else -1
        return None

    def _sign_mpmath(self):
        ctx = self.ctx
        dps = 60
        while dps <= 4000:
            with mpmath.workdps(dps):
                c = 2 * mpmath.cos(2 * mpmath.pi / ctx.n)
                val = mpmath.mpf(0)
                scale = mpmath.mpf(0)
                cp = mpmath.mpf(1)
                for a in self.coords:
                    if a:
                        af = mpmath.mpf(a.numerator) / mpmath.mpf(a.denominator)
                        val += af * cp
                        scale += abs(af) * abs(cp)
                    cp *= c
                bound = scale * mpmath.mpf(10) ** (4 - dps)
                if abs(val) > bound:
                    return 1 if val > 0 else -1
            dps *= 4
        raise ArithmeticError("could not determine sign of cyclotomic number")

    def __float__(self):
        return math.fsum(
            float(a) * p for a, p in zip(self.coords, self.ctx._cpow_f) if a
        )

    def __eq__(self, other):
        try:
            o = self._co(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        return hash((self.ctx.n, self.coords))

    def _cmp(self, other):
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __repr__(self):
        return f"<{self.ctx.serialize(self)} ~ {float(self):.6g}>"


class FloatContext(ScalarContext):
    """Double precision with a configurable zero/pivot threshold."""

    exact = False
    name = "float"

    def __init__(self, tol: float = 1e-12):
        self.tol = tol

    def coerce(self, v):
        return float(v)

    def sign(self, x):
        if x > self.tol:
            return 1
        if x < -self.tol:
            return -1
        return 0

    def serialize(self, x):
        return repr(float(x))

    def parse(self, s):
        return float(s)

    def cos_two_pi(self, j, n):
        return math.cos(2.0 * math.pi * (j % n) / n)


@lru_cache(maxsize=None)
def exact_cosine_context(n: int) -> ScalarContext:
    """Exact context able to represent cos(2*pi*j/n) for all j."""
    if n < 1:
        raise ValueError("order must be positive")
    if euler_phi(n) <= 2:
        return RationalCosineContext(n)
    return CyclotomicContext(n)


class RationalCosineContext(RationalContext):
    """Rational context for the five orders with rational cosines."""

    def __init__(self, n: int):
        self.n = n
        self.name = "rational"
        self._table = _rational_cos_table(n)
        if self._table is None:
            raise ValueError(f"cosines for order {n} are not rational")

    def cos_two_pi(self, j, n):
        if n != self.n:
            if n >= 1 and self.n % n == 0:
                j, n = j * (self.n // n), self.n
            else:
                raise ValueError(f"context is for order {self.n}, not {n}")
        return self._table[j % n]


RATIONALS = RationalContext()
