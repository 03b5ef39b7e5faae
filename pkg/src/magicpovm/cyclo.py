"""Exact arithmetic in cyclotomic fields Q(zeta_n).

An element is stored as an integer numerator vector in the power basis
1, z, ..., z^(phi(n)-1) (reduced modulo the n-th cyclotomic polynomial)
together with a positive common denominator.  Elements of different
conductors are embedded into Q(zeta_lcm) before arithmetic, so callers
never manage fields by hand.
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence

__all__ = [
    "Cyclotomic",
    "make_cyclotomic",
    "zeta",
    "root_of_unity",
    "field_norm",
    "galois_apply",
    "conj",
    "embed",
    "to_float",
    "parse_cyclo",
    "format_cyclo",
    "euler_phi",
    "cyclotomic_polynomial",
]


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # Exact division of integer polynomials (low-to-high coefficients), den monic.
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for k in range(len(q) - 1, -1, -1):
        c = num[k + len(den) - 1]
        q[k] = c
        if c:
            for t, dc in enumerate(den):
                num[k + t] -= c * dc
    if any(num):
        raise ArithmeticError("polynomial division is not exact")
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("conductor must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


class _Field:
    """Per-conductor tables: reductions of x^k mod Phi_n for 0 <= k < n."""

    __slots__ = ("n", "phi", "red", "units")

    def __init__(self, n: int):
        self.n = n
        phi = euler_phi(n)
        self.phi = phi
        poly = cyclotomic_polynomial(n)
        red = []
        cur = [0] * phi
        cur[0] = 1
        for _ in range(max(n, 1)):
            red.append(tuple(cur))
            # multiply by x and reduce the overflow with the monic relation
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for t in range(phi):
                    cur[t] -= top * poly[t]
        self.red = tuple(red)
        self.units = tuple(k for k in range(1, n + 1) if math.gcd(k, n) == 1) if n > 1 else (1,)


@lru_cache(maxsize=None)
def _field(n: int) -> _Field:
    return _Field(n)


def _normalize(num: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        num = [-c for c in num]
        den = -den
    g = math.gcd(den, *num)
    if g > 1:
        num = [c // g for c in num]
        den //= g
    if not any(num):
        den = 1
    return tuple(num), den


def _reduce_raw(n: int, raw: Sequence[int]) -> list[int]:
    # raw[k] is the integer coefficient of x^k for arbitrary k >= 0
    f = _field(n)
    phi = f.phi
    out = list(raw[:phi]) + [0] * max(0, phi - len(raw))
    red = f.red
    for k in range(phi, len(raw)):
        c = raw[k]
        if c:
            row = red[k % n]
            for t in range(phi):
                out[t] += c * row[t]
    return out


class Cyclotomic:
    """An exact element of Q(zeta_n).

    Instances are immutable.  Equality is value equality across
    conductors; hashing goes through the minimal-conductor form so
    that it agrees with equality.
    """

    __slots__ = ("n", "num", "den", "_canon", "_hash")

    def __init__(self, n: int, num: Sequence[int], den: int = 1, *, _trusted: bool = False):
        if _trusted:
            self.n, self.num, self.den = n, num, den
        else:
            if n < 1:
                raise ValueError("conductor must be positive")
            phi = _field(n).phi
            if len(num) != phi:
                raise ValueError(f"expected {phi} coefficients for conductor {n}, got {len(num)}")
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            self.n = n
            self.num, self.den = _normalize([int(c) for c in num], int(den))
        self._canon = None
        self._hash = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def rational(cls, value, n: int = 1) -> "Cyclotomic":
        q = Fraction(value)
        phi = _field(n).phi
        num, den = _normalize([q.numerator] + [0] * (phi - 1), q.denominator)
        return cls(n, num, den, _trusted=True)

    @classmethod
    def zero(cls, n: int = 1) -> "Cyclotomic":
        return cls(n, (0,) * _field(n).phi, 1, _trusted=True)

    @classmethod
    def one(cls, n: int = 1) -> "Cyclotomic":
        return cls.rational(1, n)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    @property
    def degree(self) -> int:
        return _field(self.n).phi

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def __bool__(self) -> bool:
        return any(self.num)

    # -- conductor handling -----------------------------------------------------

    def embed(self, m: int) -> "Cyclotomic":
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError(f"conductor {self.n} does not divide {m}")
        step = m // self.n
        raw = [0] * (step * (len(self.num) - 1) + 1)
        for e, c in enumerate(self.num):
            raw[e * step] = c
        num = _reduce_raw(m, raw)
        return Cyclotomic(m, tuple(num), self.den, _trusted=True)

    def canonical(self) -> "Cyclotomic":
        """Same number written at the smallest conductor containing it."""
        if self._canon is None:
            self._canon = _descend(self)
        return self._canon

    # -- arithmetic ---------------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Cyclotomic | None":
        if isinstance(other, Cyclotomic):
            return other
        if isinstance(other, (int, Rational)):
            return Cyclotomic.rational(other)
        return None

    @staticmethod
    def _common(a: "Cyclotomic", b: "Cyclotomic") -> tuple["Cyclotomic", "Cyclotomic"]:
        if a.n == b.n:
            return a, b
        if b.is_rational():
            return a, Cyclotomic.rational(Fraction(b.num[0], b.den), a.n)
        if a.is_rational():
            return Cyclotomic.rational(Fraction(a.num[0], a.den), b.n), b
        m = math.lcm(a.n, b.n)
        return a.embed(m), b.embed(m)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._common(self, o)
        if a.den == b.den:
            num = [x + y for x, y in zip(a.num, b.num)]
            den = a.den
        else:
            num = [x * b.den + y * a.den for x, y in zip(a.num, b.num)]
            den = a.den * b.den
        num, den = _normalize(num, den)
        return Cyclotomic(a.n, num, den, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.n, tuple(-c for c in self.num), self.den, _trusted=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._common(self, o)
        n = a.n
        if b.is_rational():
            a, b = b, a
        if a.is_rational():
            s = a.num[0]
            num, den = _normalize([s * c for c in b.num], a.den * b.den)
            return Cyclotomic(n, num, den, _trusted=True)
        f = _field(n)
        phi = f.phi
        an, bn = a.num, b.num
        raw = [0] * (2 * phi - 1)
        for i, x in enumerate(an):
            if x:
                for j, y in enumerate(bn):
                    if y:
                        raw[i + j] += x * y
        out = raw[:phi]
        red = f.red
        for k in range(phi, 2 * phi - 1):
            c = raw[k]
            if c:
                row = red[k % n]
                for t in range(phi):
                    out[t] += c * row[t]
        num, den = _normalize(out, a.den * b.den)
        return Cyclotomic(n, num, den, _trusted=True)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if not self:
            raise ZeroDivisionError("division by zero in cyclotomic field")
        if self.is_rational():
            return Cyclotomic.rational(Fraction(self.den, self.num[0]), self.n)
        others = Cyclotomic.one(self.n)
        for k in _field(self.n).units:
            if k != 1:
                others = others * self.galois(k)
        norm = (others * self).to_fraction()
        return others * Cyclotomic.rational(1 / norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = Cyclotomic.one(self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- Galois structure -------------------------------------------------------

    def galois(self, k: int) -> "Cyclotomic":
        n = self.n
        if math.gcd(k, n) != 1:
            raise ValueError(f"{k} is not coprime to the conductor {n}")
        k %= n
        raw = [0] * n
        for e, c in enumerate(self.num):
            if c:
                raw[(e * k) % n] += c
        return Cyclotomic(n, tuple(_reduce_raw(n, raw)), self.den, _trusted=True)

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1) if self.n > 2 else self

    def norm(self) -> Fraction:
        """Field norm down to Q, taken at this element's conductor."""
        result = Cyclotomic.one(self.n)
        for k in _field(self.n).units:
            result = result * self.galois(k)
        if not result.is_rational():
            raise ArithmeticError("field norm did not land in Q")
        return result.to_fraction()

    def is_real(self) -> bool:
        return self == self.conjugate()

    # -- comparison, hashing, display -------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.n == o.n:
            return self.den == o.den and self.num == o.num
        a, b = self._common(self, o)
        return a.den == b.den and a.num == b.num

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self.num[0], self.den))
            else:
                c = self.canonical()
                self._hash = hash((c.n, c.num, c.den))
        return self._hash

    def key(self) -> tuple:
        """Exact key valid for comparisons between elements of one conductor."""
        return (self.n, self.num, self.den)

    def __complex__(self) -> complex:
        n = self.n
        total = 0j
        for e, c in enumerate(self.num):
            if c:
                total += c * cmath.exp(2j * math.pi * e / n)
        return total / self.den

    def __float__(self) -> float:
        return complex(self).real

    def __repr__(self) -> str:
        return f"Cyclotomic({format_cyclo(self)!r})"

    def __str__(self) -> str:
        return format_cyclo(self)


# -- descent to the minimal conductor --------------------------------------------


@lru_cache(maxsize=None)
def _left_inverse(n: int, m: int):
    """Integer left inverse (matrix, denominator) of the embedding Q(z_m) -> Q(z_n)."""
    pm, pn = euler_phi(m), euler_phi(n)
    cols = [Cyclotomic(m, tuple(int(i == e) for i in range(pm)), 1, _trusted=True).embed(n).num
            for e in range(pm)]
    # rows of E are coordinates at conductor n; pick pm independent rows
    E = [[Fraction(cols[e][r]) for e in range(pm)] for r in range(pn)]
    chosen, basis = [], []
    for r in range(pn):
        trial = basis + [E[r]]
        if _frac_rank(trial) == len(trial):
            basis.append(E[r])
            chosen.append(r)
        if len(chosen) == pm:
            break
    inv = _frac_inverse(basis)
    den = math.lcm(*(x.denominator for row in inv for x in row)) if pm else 1
    L = [[0] * pn for _ in range(pm)]
    for i in range(pm):
        for j, r in enumerate(chosen):
            L[i][r] = int(inv[i][j] * den)
    return L, den


def _frac_rank(rows):
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, len(m)):
            if m[r][c]:
                f = m[r][c] / m[rank][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def _frac_inverse(rows):
    k = len(rows)
    m = [list(r) + [Fraction(int(i == j)) for j in range(k)] for i, r in enumerate(rows)]
    for c in range(k):
        piv = next(r for r in range(c, k) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(k):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[k:] for row in m]


def _descend(a: Cyclotomic) -> Cyclotomic:
    n = a.n
    if a.is_rational():
        return Cyclotomic.rational(Fraction(a.num[0], a.den))
    for m in range(2, n):
        if n % m or m % 4 == 2:
            continue
        L, lden = _left_inverse(n, m)
        x = [sum(l * c for l, c in zip(row, a.num)) for row in L]
        num, den = _normalize(x, lden * a.den)
        cand = Cyclotomic(m, num, den, _trusted=True)
        if cand.embed(n) == a:
            return cand
    return a


# -- functional API ----------------------------------------------------------------


def make_cyclotomic(n: int, raw: Iterable) -> Cyclotomic:
    """Canonical element from rational coefficients of z^0, z^1, ... (any length)."""
    if n < 1:
        raise ValueError("conductor must be positive")
    vals = [Fraction(x) for x in raw]
    den = math.lcm(*(v.denominator for v in vals)) if vals else 1
    ints = [int(v * den) for v in vals]
    return Cyclotomic(n, tuple(_reduce_raw(n, ints)), den)


def zeta(n: int) -> Cyclotomic:
    return root_of_unity(n, 1)


def root_of_unity(n: int, k: int) -> Cyclotomic:
    """zeta_n ** k."""
    k %= n
    raw = [0] * n
    raw[k] = 1
    return Cyclotomic(n, tuple(_reduce_raw(n, raw)), 1, _trusted=True)


def conj(a: Cyclotomic) -> Cyclotomic:
    return a.conjugate()


def galois_apply(a: Cyclotomic, k: int) -> Cyclotomic:
    return a.galois(k)


def field_norm(a: Cyclotomic) -> Fraction:
    return a.norm()


def embed(a: Cyclotomic, m: int) -> Cyclotomic:
    return a.embed(m)


def to_float(a: Cyclotomic) -> complex:
    return complex(a)


# -- text literals -----------------------------------------------------------------


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_cyclo(a: Cyclotomic) -> str:
    """Canonical literal: polynomial in z<m> at the minimal conductor m."""
    c = a.canonical()
    if not c:
        return "0"
    parts = []
    for e, q in enumerate(c.coeffs):
        if not q:
            continue
        mono = "" if e == 0 else (f"z{c.n}" if e == 1 else f"z{c.n}^{e}")
        mag = abs(q)
        if mono:
            body = mono if mag == 1 else f"{_fmt_rat(mag)}*{mono}"
        else:
            body = _fmt_rat(mag)
        if not parts:
            parts.append(("-" if q < 0 else "") + body)
        else:
            parts.append((" - " if q < 0 else " + ") + body)
    return "".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|([zw])(\d+)|(i)\b|(\*\*|[-+*/^()]))")


class _Parser:
    # expr := term (('+'|'-') term)* ; term := unary (('*'|'/'|juxtaposition) unary)*
    # unary := ('-'|'+') unary | power ; power := atom ('^' int)?
    def __init__(self, text: str):
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse cyclotomic literal {text!r} at {pos}")
            pos = m.end()
            if m.group(1):
                self.toks.append(("int", int(m.group(1))))
            elif m.group(2):
                self.toks.append(("z", int(m.group(3))))
            elif m.group(4):
                self.toks.append(("z", 4))
            else:
                op = m.group(5)
                self.toks.append(("op", "^" if op == "**" else op))
        self.i = 0
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> Cyclotomic:
        if not self.toks:
            raise ValueError("empty cyclotomic literal")
        v = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input in {self.text!r}")
        return v

    def expr(self):
        v = self.term()
        while (t := self.peek()) in (("op", "+"), ("op", "-")):
            self.take()
            w = self.term()
            v = v + w if t[1] == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while True:
            t = self.peek()
            if t in (("op", "*"), ("op", "/")):
                self.take()
                w = self.unary()
                v = v * w if t[1] == "*" else v / w
            elif t is not None and (t[0] in ("int", "z") or t == ("op", "(")):
                v = v * self.unary()
            else:
                return v

    def unary(self):
        t = self.peek()
        if t == ("op", "-"):
            self.take()
            return -self.unary()
        if t == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            neg = False
            if self.peek() == ("op", "-"):
                self.take()
                neg = True
            t = self.take()
            if t is None or t[0] != "int":
                raise ValueError(f"exponent must be an integer in {self.text!r}")
            v = v ** (-t[1] if neg else t[1])
        return v

    def atom(self):
        t = self.take()
        if t is None:
            raise ValueError(f"unexpected end of {self.text!r}")
        if t[0] == "int":
            return Cyclotomic.rational(t[1])
        if t[0] == "z":
            if t[1] < 1:
                raise ValueError("conductor must be positive")
            return zeta(t[1])
        if t == ("op", "("):
            v = self.expr()
            if self.take() != ("op", ")"):
                raise ValueError(f"unbalanced parentheses in {self.text!r}")
            return v
        raise ValueError(f"unexpected token {t[1]!r} in {self.text!r}")


def parse_cyclo(text: str) -> Cyclotomic:
    """Parse a literal such as ``"-1 - z3"``, ``"1/4"`` or ``"z12^2 - 1"``.

    ``w<n>`` is accepted as a synonym of ``z<n>`` and ``i`` as ``z4``.
    """
    return _Parser(str(text)).parse()
