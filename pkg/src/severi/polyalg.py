"""Exact univariate and Weierstrass-polynomial arithmetic over the rationals.

Polynomials in the base coordinate ``z`` are :class:`RationalPoly` values
(dense, lowest degree first).  A curve of degree ``d`` over the base is a
:class:`WeierstrassPoly` ``sum_i a_i(z) w0^(d-i) w1^i``; in the affine chart
``w = w0/w1`` this reads ``a_0 w^d + a_1 w^(d-1) + ... + a_d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction]


class PolyError(ValueError):
    """Raised for undefined polynomial operations (division by zero, ...)."""


class VerticalComponentError(PolyError):
    """The leading coefficient ``a_0`` vanishes identically."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


class RationalPoly:
    """Dense polynomial in ``z`` with :class:`~fractions.Fraction` coefficients.

    ``coeffs[i]`` is the coefficient of ``z**i``.  The zero polynomial has an
    empty coefficient tuple and degree ``-1`` (use :attr:`is_zero` rather than
    comparing degrees).
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._hash = None

    # construction helpers

    @classmethod
    def const(cls, c) -> "RationalPoly":
        return cls([c])

    @classmethod
    def z(cls) -> "RationalPoly":
        return cls([0, 1])

    @classmethod
    def monomial(cls, n: int, c=1) -> "RationalPoly":
        return cls([0] * n + [c])

    @classmethod
    def linear_root(cls, z0) -> "RationalPoly":
        """The monic factor ``z - z0``."""
        return cls([-_frac(z0), 1])

    # basic properties

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPoly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __repr__(self) -> str:
        return f"RationalPoly({self})"

    def __str__(self) -> str:
        return format_poly(self, "z")

    # arithmetic

    def __neg__(self) -> "RationalPoly":
        return RationalPoly([-c for c in self.coeffs])

    def __add__(self, other) -> "RationalPoly":
        other = as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPoly([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __sub__(self, other) -> "RationalPoly":
        return self + (-as_poly(other))

    def __rsub__(self, other) -> "RationalPoly":
        return as_poly(other) - self

    def __mul__(self, other) -> "RationalPoly":
        other = as_poly(other)
        if self.is_zero or other.is_zero:
            return ZERO
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RationalPoly":
        if n < 0:
            raise PolyError("negative power of a polynomial")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "RationalPoly":
        c = _frac(c)
        return RationalPoly([c * x for x in self.coeffs])

    def __divmod__(self, other) -> tuple["RationalPoly", "RationalPoly"]:
        return divrem(self, as_poly(other))

    def __floordiv__(self, other) -> "RationalPoly":
        return divrem(self, as_poly(other))[0]

    def __mod__(self, other) -> "RationalPoly":
        return divrem(self, as_poly(other))[1]

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a number or a :class:`RationalPoly`."""
        if isinstance(x, RationalPoly):
            acc = ZERO
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        x = _frac(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "RationalPoly":
        return RationalPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "RationalPoly":
        if self.is_zero:
            return self
        return self.scale(1 / self.lc)

    def shift(self, c) -> "RationalPoly":
        """Return ``p(z + c)``."""
        c = _frac(c)
        if c == 0 or self.is_constant():
            return self
        out = [Fraction(0)] * len(self.coeffs)
        for n, a in enumerate(self.coeffs):
            if a == 0:
                continue
            cp = Fraction(1)
            for k in range(n, -1, -1):
                out[k] += a * comb(n, k) * cp
                cp *= c
        return RationalPoly(out)

    def substitute_power(self, m: int) -> "RationalPoly":
        """Return ``p(z**m)``."""
        if m < 1:
            raise PolyError("power must be positive")
        out = [Fraction(0)] * (m * self.degree + 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            out[m * i] = c
        return RationalPoly(out)

    def low_order(self) -> int:
        """Index of the lowest nonzero coefficient."""
        if self.is_zero:
            raise PolyError("order undefined for the zero polynomial")
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        raise AssertionError("unreachable")

    def truncate(self, n: int) -> "RationalPoly":
        """Keep terms of degree < n."""
        return RationalPoly(self.coeffs[:max(n, 0)])

    def primitive_integer(self) -> list[int]:
        """Integer coefficient list proportional to ``self`` (content removed)."""
        if self.is_zero:
            return []
        den = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = _igcd(g, v)
        return [v // g for v in ints]

    # serialization

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "RationalPoly":
        if not isinstance(data, (list, tuple)):
            raise PolyError(f"polynomial must be a JSON array, got {type(data).__name__}")
        try:
            return cls([_frac(x) for x in data])
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise PolyError(f"bad coefficient in {data!r}: {exc}") from None


def _igcd(a: int, b: int) -> int:
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


ZERO = RationalPoly()
ONE = RationalPoly([1])


def as_poly(x) -> RationalPoly:
    if isinstance(x, RationalPoly):
        return x
    if isinstance(x, (int, Fraction, str)):
        return RationalPoly([x])
    return RationalPoly(x)


def format_poly(p: RationalPoly, var: str = "z") -> str:
    if p.is_zero:
        return "0"
    terms = []
    for i in range(len(p.coeffs) - 1, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = str(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if a == 1 else f"{a}*{mono}"
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# univariate operations


def divrem(p: RationalPoly, q: RationalPoly) -> tuple[RationalPoly, RationalPoly]:
    """Euclidean division: ``p = quot*q + rem`` with ``deg rem < deg q``."""
    if q.is_zero:
        raise PolyError("division by the zero polynomial")
    if p.degree < q.degree:
        return ZERO, p
    rem = list(p.coeffs)
    dq = q.degree
    inv = 1 / q.lc
    quot = [Fraction(0)] * (p.degree - dq + 1)
    for k in range(p.degree - dq, -1, -1):
        c = rem[k + dq] * inv
        quot[k] = c
        if c:
            for j in range(dq + 1):
                rem[k + j] -= c * q.coeffs[j]
    return RationalPoly(quot), RationalPoly(rem[:dq])


def exact_div(p: RationalPoly, q: RationalPoly) -> RationalPoly:
    quot, rem = divrem(p, q)
    if not rem.is_zero:
        raise PolyError(f"{q} does not divide {p}")
    return quot


def poly_gcd(p: RationalPoly, q: RationalPoly) -> RationalPoly:
    """Monic gcd; ``gcd(0, 0) = 0``."""
    a, b = p, q
    while not b.is_zero:
        a, b = b, divrem(a, b)[1]
    return a.monic()


def poly_xgcd(p: RationalPoly, q: RationalPoly) -> tuple[RationalPoly, RationalPoly, RationalPoly]:
    """Return ``(g, s, t)`` with ``s*p + t*q = g`` and ``g`` monic."""
    r0, r1 = p, q
    s0, s1 = ONE, ZERO
    t0, t1 = ZERO, ONE
    while not r1.is_zero:
        quot, rem = divrem(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quot * s1
        t0, t1 = t1, t0 - quot * t1
    if r0.is_zero:
        return ZERO, ZERO, ZERO
    inv = 1 / r0.lc
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def poly_arith(p: RationalPoly, q: RationalPoly, op: str):
    """Dispatch ``add``, ``sub``, ``mul``, ``divrem`` or ``gcd``."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "divrem":
        return divrem(p, q)
    if op == "gcd":
        return poly_gcd(p, q)
    raise ValueError(f"unknown polynomial operation {op!r}")


def ord_at(p: RationalPoly, z0) -> int:
    """Multiplicity of ``z0`` as a root of ``p`` (0 when ``p(z0) != 0``)."""
    if p.is_zero:
        raise PolyError("order undefined for the zero polynomial")
    z0 = _frac(z0)
    n = 0
    cur = list(p.coeffs)
    while len(cur) > 1:
        # synthetic division by (z - z0)
        acc = Fraction(0)
        quot = [Fraction(0)] * (len(cur) - 1)
        for i in range(len(cur) - 1, 0, -1):
            acc = acc * z0 + cur[i]
            quot[i - 1] = acc
        if acc * z0 + cur[0] != 0:
            break
        n += 1
        cur = quot
    return n


def squarefree_decomposition(p: RationalPoly) -> list[tuple[int, RationalPoly]]:
    """Yun's algorithm: ``p = lc * prod s_i**i`` with pairwise coprime squarefree ``s_i``.

    Returns ``[(i, s_i), ...]`` for the non-constant factors, ``s_i`` monic.
    """
    if p.is_zero:
        raise PolyError("square-free decomposition of the zero polynomial")
    if p.degree < 1:
        return []
    f = p.monic()
    df = f.derivative()
    a = poly_gcd(f, df)
    b = exact_div(f, a)
    d = exact_div(df, a) - b.derivative()
    out = []
    i = 1
    while b.degree >= 1:
        g = poly_gcd(b, d)
        if g.degree >= 1:
            out.append((i, g))
        b = exact_div(b, g)
        d = exact_div(d, g) - b.derivative()
        i += 1
    return out


def squarefree_part(p: RationalPoly) -> RationalPoly:
    if p.degree < 1:
        return ONE
    return exact_div(p.monic(), poly_gcd(p, p.derivative()))


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def rational_roots(p: RationalPoly) -> list[Fraction]:
    """Distinct rational roots of ``p`` in increasing order (rational root test)."""
    if p.is_zero:
        raise PolyError("roots of the zero polynomial")
    roots: list[Fraction] = []
    q = squarefree_part(p)
    if q.degree < 1:
        return roots
    k = q.low_order()
    if k:
        roots.append(Fraction(0))
        q = RationalPoly(q.coeffs[k:])
    ints = q.primitive_integer()
    if len(ints) > 1:
        a0, an = ints[0], ints[-1]
        cands = set()
        for num in _divisors(a0):
            for den in _divisors(an):
                cands.add(Fraction(num, den))
                cands.add(Fraction(-num, den))
        for r in cands:
            if q(r) == 0:
                roots.append(r)
    return sorted(roots)


def linear_factor_split(p: RationalPoly) -> tuple[list[tuple[Fraction, int]], RationalPoly]:
    """Split ``p`` into rational linear factors with multiplicity and a remainder.

    Returns ``([(root, multiplicity), ...], rest)`` where ``rest`` is monic and
    has no rational root.
    """
    rest = p.monic()
    found = []
    for r in rational_roots(p):
        n = ord_at(rest, r)
        rest = exact_div(rest, RationalPoly.linear_root(r) ** n)
        found.append((r, n))
    return found, rest


# ---------------------------------------------------------------------------
# resultants


def _pack(coeffs: Sequence[int], bits: int) -> int:
    """Kronecker substitution: evaluate an integer polynomial at ``2**bits``."""
    out = 0
    for c in reversed(coeffs):
        out = (out << bits) + c
    return out


def _unpack(value: int, bits: int) -> list[int]:
    """Inverse of :func:`_pack` for coefficients of absolute value below ``2**(bits-1)``."""
    out = []
    half, full, mask = 1 << (bits - 1), 1 << bits, (1 << bits) - 1
    while value:
        c = value & mask
        if c >= half:
            c -= full
        out.append(c)
        value = (value - c) >> bits
    return out


def _det_bareiss(mat: list[list[RationalPoly]]) -> RationalPoly:
    """Fraction-free Gaussian elimination over Z[z].

    Rows are cleared of denominators, entries are packed into big integers
    by Kronecker substitution, and Bareiss elimination runs on those
    integers (its divisions are exact in Z[z], hence exact on the packed
    values).  The packing width comes from the bound
    ``||minor||_1 <= prod of row 1-norms``, squared for the
    intermediate products.
    """
    n = len(mat)
    if n == 0:
        return ONE
    scale = Fraction(1)
    rows = []
    bound = 1
    for row in mat:
        den = 1
        for e in row:
            for c in e.coeffs:
                den = den * c.denominator // _igcd(den, c.denominator)
        scale /= den
        int_row = [[int(c * den) for c in e.coeffs] for e in row]
        bound *= max(1, sum(abs(c) for e in int_row for c in e))
        rows.append(int_row)
    bits = 2 * bound.bit_length() + 4
    m = [[_pack(e, bits) for e in row] for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return ZERO
        pivot = m[k][k]
        row_k = m[k]
        for i in range(k + 1, n):
            row_i = m[i]
            mik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    det = RationalPoly(_unpack(m[n - 1][n - 1], bits)).scale(scale)
    return -det if sign < 0 else det


def sylvester_matrix(p: Sequence[RationalPoly], q: Sequence[RationalPoly]) -> list[list[RationalPoly]]:
    """Sylvester matrix of ``p`` and ``q`` given as ascending coefficient lists in ``w``.

    The formal degrees are ``len(p) - 1`` and ``len(q) - 1``; rows built from
    ``q`` sit below the rows built from ``p``.
    """
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    pd = list(reversed(p))  # descending
    qd = list(reversed(q))
    rows = []
    for i in range(n):
        row = [ZERO] * size
        for j, c in enumerate(pd):
            row[i + j] = as_poly(c)
        rows.append(row)
    for i in range(m):
        row = [ZERO] * size
        for j, c in enumerate(qd):
            row[i + j] = as_poly(c)
        rows.append(row)
    return rows


@dataclass(frozen=True)
class ResultantValue:
    value: RationalPoly
    degenerate: bool = False  # both inputs of formal degree 0


def resultant(p: Sequence[RationalPoly], q: Sequence[RationalPoly]) -> RationalPoly:
    """``Res_w(p, q)`` for polynomials in ``w`` with coefficients in Q[z].

    ``p`` and ``q`` are ascending lists (``p[i]`` multiplies ``w**i``); the list
    length fixes the formal degree, so a leading coefficient that vanishes at
    isolated ``z`` is still honoured.  When both have formal degree 0 the
    elimination is empty and 1 is returned (see :func:`resultant_flagged`).
    """
    return resultant_flagged(p, q).value


def resultant_flagged(p: Sequence[RationalPoly], q: Sequence[RationalPoly]) -> ResultantValue:
    p = [as_poly(c) for c in p]
    q = [as_poly(c) for c in q]
    if not p or not q:
        raise PolyError("resultant of an empty coefficient list")
    if all(c.is_zero for c in p) or all(c.is_zero for c in q):
        raise PolyError("resultant with the zero polynomial")
    if len(p) == 1 and len(q) == 1:
        return ResultantValue(ONE, degenerate=True)
    return ResultantValue(_det_bareiss(sylvester_matrix(p, q)))


# ---------------------------------------------------------------------------
# Weierstrass polynomials


@dataclass(frozen=True)
class WeierstrassPoly:
    """``P = sum_i a[i](z) * w0^(d-i) * w1^i``."""

    d: int
    a: tuple[RationalPoly, ...]

    def __post_init__(self):
        a = tuple(as_poly(c) for c in self.a)
        object.__setattr__(self, "a", a)
        if self.d < 0:
            raise PolyError("degree must be nonnegative")
        if len(a) != self.d + 1:
            raise PolyError(f"need d+1 = {self.d + 1} coefficients, got {len(a)}")
        if all(c.is_zero for c in a):
            raise PolyError("Weierstrass polynomial is identically zero")

    @classmethod
    def from_coeffs(cls, coeffs: Sequence) -> "WeierstrassPoly":
        a = tuple(as_poly(c) for c in coeffs)
        return cls(len(a) - 1, a)

    def w_coeffs(self) -> list[RationalPoly]:
        """Ascending coefficients in the affine fibre variable ``w = w0/w1``."""
        return list(reversed(self.a))

    @classmethod
    def from_w_coeffs(cls, coeffs: Sequence) -> "WeierstrassPoly":
        return cls.from_coeffs(list(reversed([as_poly(c) for c in coeffs])))

    def __mul__(self, other) -> "WeierstrassPoly":
        if isinstance(other, WeierstrassPoly):
            out = [ZERO] * (self.d + other.d + 1)
            for i, x in enumerate(self.a):
                for j, y in enumerate(other.a):
                    out[i + j] = out[i + j] + x * y
            return WeierstrassPoly(self.d + other.d, tuple(out))
        c = as_poly(other)
        return WeierstrassPoly(self.d, tuple(x * c for x in self.a))

    __rmul__ = __mul__

    def derivative_w(self) -> list[RationalPoly]:
        """Ascending coefficients of ``dP/dw`` with formal degree ``d - 1``."""
        wc = self.w_coeffs()
        return [wc[i].scale(i) for i in range(1, len(wc))]

    def evaluate(self, z, w):
        """Evaluate in the affine chart; arguments may be numbers or polynomials."""
        acc = ZERO if isinstance(z, RationalPoly) or isinstance(w, RationalPoly) else Fraction(0)
        for c in self.a:
            acc = acc * w + (c(z))
        return acc

    def max_coeff_degree(self) -> int:
        return max(c.degree for c in self.a)

    def to_json(self) -> dict:
        return {"d": self.d, "a": [c.to_json() for c in self.a]}

    @classmethod
    def from_json(cls, data) -> "WeierstrassPoly":
        if not isinstance(data, dict) or "d" not in data or "a" not in data:
            raise PolyError('Weierstrass polynomial JSON needs keys "d" and "a"')
        d = data["d"]
        if not isinstance(d, int) or isinstance(d, bool):
            raise PolyError('"d" must be an integer')
        return cls(d, tuple(RationalPoly.from_json(c) for c in data["a"]))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.a):
            if c.is_zero:
                continue
            k = self.d - i
            mono = "" if k == 0 else ("w" if k == 1 else f"w^{k}")
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(terms) if terms else "0"


def discriminant(P: WeierstrassPoly) -> RationalPoly:
    """``(-1)^(d(d-1)/2) * Res_w(P, dP/dw) / a_0``; equals ``a1^2 - 4 a0 a2`` for d = 2."""
    if P.a[0].is_zero:
        raise VerticalComponentError(
            "leading coefficient a_0 is identically zero (vertical leading component); "
            "factor out vertical lines with factor_vertical first"
        )
    if P.d <= 1:
        return ONE
    res = resultant(P.w_coeffs(), P.derivative_w())
    disc = exact_div(res, P.a[0])
    if (P.d * (P.d - 1) // 2) % 2:
        disc = -disc
    return disc


def factor_vertical(P: WeierstrassPoly) -> tuple[RationalPoly, WeierstrassPoly]:
    """Split off the vertical-line divisor: ``P = vertical * rest`` coefficientwise."""
    g = ZERO
    for c in P.a:
        g = poly_gcd(g, c)
    if g.is_zero:
        raise PolyError("Weierstrass polynomial is identically zero")
    return g, WeierstrassPoly(P.d, tuple(exact_div(c, g) for c in P.a))


@dataclass(frozen=True)
class GL2PolyMatrix:
    g00: RationalPoly
    g01: RationalPoly
    g10: RationalPoly
    g11: RationalPoly
    det: RationalPoly = field(init=False)

    def __post_init__(self):
        for name in ("g00", "g01", "g10", "g11"):
            object.__setattr__(self, name, as_poly(getattr(self, name)))
        det = self.g00 * self.g11 - self.g01 * self.g10
        if det.is_zero:
            raise PolyError("matrix determinant is the zero polynomial")
        object.__setattr__(self, "det", det)

    @classmethod
    def identity(cls) -> "GL2PolyMatrix":
        return cls(ONE, ZERO, ZERO, ONE)


def _binary_power(lin: tuple[RationalPoly, RationalPoly], n: int) -> list[RationalPoly]:
    """Coefficients of ``(x*w0 + y*w1)^n`` indexed by the power of ``w1``."""
    out = [ONE]
    for _ in range(n):
        nxt = [ZERO] * (len(out) + 1)
        for j, c in enumerate(out):
            nxt[j] = nxt[j] + c * lin[0]
            nxt[j + 1] = nxt[j + 1] + c * lin[1]
        out = nxt
    return out


def gl2_act(P: WeierstrassPoly, g: GL2PolyMatrix) -> WeierstrassPoly:
    """``sum a_i (g00 w0 + g01 w1)^(d-i) (g10 w0 + g11 w1)^i``, re-expanded in ``w0, w1``."""
    d = P.d
    first = (g.g00, g.g01)
    second = (g.g10, g.g11)
    pow1 = [_binary_power(first, n) for n in range(d + 1)]
    pow2 = [_binary_power(second, n) for n in range(d + 1)]
    out = [ZERO] * (d + 1)
    for i, ai in enumerate(P.a):
        if ai.is_zero:
            continue
        u, v = pow1[d - i], pow2[i]
        for j, x in enumerate(u):
            if x.is_zero:
                continue
            for k, y in enumerate(v):
                if not y.is_zero:
                    out[j + k] = out[j + k] + ai * x * y
    return WeierstrassPoly(d, tuple(out))
