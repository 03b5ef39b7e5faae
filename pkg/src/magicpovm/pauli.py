"""Generalized (multi-qudit) Pauli / Heisenberg-Weyl operators.

Every Weyl operator is a monomial matrix: a translation of the
computational basis with a root-of-unity phase on each column.  Products
are computed by composing those monomial matrices exactly, which is the
dense matrix product restricted to its nonzero pattern.

Two matrix conventions are supported.  ``"ket"`` is X|k> = |k+1>,
Z|k> = w^k |k>.  ``"row"`` realizes X as the transpose, i.e. the
permutation matrix read as acting on row vectors (X|k> = |k-1> on
columns); phases of operator products come out complex-conjugated
relative to ``"ket"``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from .cyclo import Cyclotomic, format_cyclo, parse_cyclo, root_of_unity
from .linalg import ExactMatrix, ExactVector

__all__ = [
    "PauliSpec",
    "WeylOperator",
    "shift_clock",
    "weyl",
    "cosets",
    "product_phase",
    "parse_label",
    "default_spec",
]

CONVENTIONS = ("ket", "row")


@dataclass(frozen=True)
class PauliSpec:
    factors: tuple[int, ...]
    convention: str = "ket"

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(f) for f in self.factors))
        if not self.factors or any(f < 2 for f in self.factors):
            raise ValueError(f"every qudit factor must be >= 2, got {self.factors}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown matrix convention {self.convention!r}")

    @property
    def d(self) -> int:
        return math.prod(self.factors)

    @property
    def phase_order(self) -> int:
        """Order of the root of unity needed for all coset phases and entries."""
        n = math.lcm(*self.factors)
        if 2 in self.factors:
            n = math.lcm(n, 4)
        return n

    @property
    def strides(self) -> tuple[int, ...]:
        out, s = [], 1
        for f in reversed(self.factors):
            out.append(s)
            s *= f
        return tuple(reversed(out))

    def digits(self, k: int) -> tuple[int, ...]:
        return tuple((k // s) % f for s, f in zip(self.strides, self.factors))

    def index(self, digits: Sequence[int]) -> int:
        return sum((x % f) * s for x, f, s in zip(digits, self.factors, self.strides))

    def to_json(self) -> dict:
        return {"factors": list(self.factors), "convention": self.convention}

    @classmethod
    def from_json(cls, obj) -> "PauliSpec":
        if isinstance(obj, (list, tuple)):
            return cls(tuple(obj))
        return cls(tuple(obj["factors"]), obj.get("convention", "ket"))


def default_spec(d: int) -> PauliSpec:
    """Factorization used for dimension d: multi-qubit/qutrit where the presets use it."""
    table = {4: (2, 2), 6: (6,), 8: (2, 2, 2), 9: (3, 3), 12: (2, 2, 3)}
    if d in table:
        return PauliSpec(table[d])
    fs, m, p = [], d, 2
    while p * p <= m:
        while m % p == 0:
            fs.append(p)
            m //= p
        p += 1
    if m > 1:
        fs.append(m)
    return PauliSpec(tuple(sorted(fs)))


# -- monomial matrices -------------------------------------------------------------
# (targets, phases, order): column k maps to row targets[k] with phase
# zeta_order ** phases[k].


def _bare_monomial(spec: PauliSpec, exps: tuple[tuple[int, int], ...], order: int):
    sign = 1 if spec.convention == "ket" else -1
    d = spec.d
    targets = [0] * d
    phases = [0] * d
    for k in range(d):
        dig = spec.digits(k)
        tdig = []
        ph = Fraction(0)
        for (m, j), kf, f in zip(exps, dig, spec.factors):
            t = (kf + sign * j) % f
            tdig.append(t)
            ph += Fraction(m * t, f)
        targets[k] = spec.index(tdig)
        phases[k] = int(ph * order) % order
    return targets, phases


def _compose(a, b, order):
    # (A @ B) for monomials given at a common phase order
    ta, pa = a
    tb, pb = b
    return [ta[t] for t in tb], [(pb[k] + pa[tb[k]]) % order for k in range(len(tb))]


@dataclass(frozen=True)
class WeylOperator:
    """phase * (Z^m1 X^j1) (x) (Z^m2 X^j2) (x) ...; phase stored in turns (exp(2 pi i t))."""

    spec: PauliSpec
    exps: tuple[tuple[int, int], ...]
    phase: Fraction = Fraction(0)

    def __post_init__(self):
        if len(self.exps) != len(self.spec.factors):
            raise ValueError("one (m, j) pair per qudit factor is required")
        exps = tuple((int(m) % f, int(j) % f) for (m, j), f in zip(self.exps, self.spec.factors))
        object.__setattr__(self, "exps", exps)
        object.__setattr__(self, "phase", Fraction(self.phase) % 1)

    @property
    def order(self) -> int:
        return math.lcm(self.spec.phase_order, self.phase.denominator)

    def monomial(self, order: int | None = None):
        order = order or self.order
        t, p = _bare_monomial_cached(self.spec, self.exps, order)
        shift = int(self.phase * order)
        return list(t), [(x + shift) % order for x in p]

    @property
    def phase_value(self) -> Cyclotomic:
        return root_of_unity(self.phase.denominator, self.phase.numerator)

    def bare(self) -> "WeylOperator":
        return WeylOperator(self.spec, self.exps)

    def is_identity_class(self) -> bool:
        return all(m == 0 and j == 0 for m, j in self.exps)

    def matrix(self) -> ExactMatrix:
        order = self.order
        targets, phases = self.monomial(order)
        d = self.spec.d
        zero = Cyclotomic.zero()
        rows = [[zero] * d for _ in range(d)]
        for k, (t, p) in enumerate(zip(targets, phases)):
            rows[t][k] = root_of_unity(order, p)
        return ExactMatrix(rows)

    def apply(self, v: ExactVector) -> ExactVector:
        order = self.order
        targets, phases = self.monomial(order)
        out = [None] * len(v)
        for k, x in enumerate(v.entries):
            out[targets[k]] = x * root_of_unity(order, phases[k]) if phases[k] else x
        return ExactVector(out)

    def __matmul__(self, other: "WeylOperator") -> "WeylOperator":
        if not isinstance(other, WeylOperator):
            return NotImplemented
        return _from_monomial(self.spec, *_product_monomial([self, other]))

    def adjoint(self) -> "WeylOperator":
        order = self.order
        t, p = self.monomial(order)
        inv_t = [0] * len(t)
        inv_p = [0] * len(t)
        for k, (tk, pk) in enumerate(zip(t, p)):
            inv_t[tk] = k
            inv_p[tk] = (-pk) % order
        return _from_monomial(self.spec, (inv_t, inv_p), order)

    def commutes_with(self, other: "WeylOperator") -> bool:
        ab = _product_monomial([self, other])
        ba = _product_monomial([other, self])
        return ab == ba

    def label(self, with_phase: bool = True) -> str:
        parts = []
        for m, j in self.exps:
            if m == 0 and j == 0:
                parts.append("I")
                continue
            s = ""
            if m:
                s += "Z" + _exp_str(m)
            if j:
                s += "X" + _exp_str(j)
            parts.append(s)
        body = " x ".join(parts)
        if with_phase and self.phase:
            return f"[{format_cyclo(self.phase_value)}] {body}"
        return body

    def __str__(self):
        return self.label()


def _exp_str(e: int) -> str:
    if e == 1:
        return ""
    return str(e) if e < 10 else f"^{e}"


@lru_cache(maxsize=4096)
def _bare_monomial_cached(spec, exps, order):
    t, p = _bare_monomial(spec, exps, order)
    return tuple(t), tuple(p)


def _product_monomial(ops: Sequence[WeylOperator]):
    order = math.lcm(*(op.order for op in ops))
    acc = ops[0].monomial(order)
    for op in ops[1:]:
        acc = _compose(acc, op.monomial(order), order)
    return acc, order


def _from_monomial(spec: PauliSpec, mono, order: int) -> WeylOperator:
    targets, phases = mono
    sign = 1 if spec.convention == "ket" else -1
    t0 = spec.digits(targets[0])
    js = [(sign * x) % f for x, f in zip(t0, spec.factors)]
    ms = []
    for f_idx, f in enumerate(spec.factors):
        unit = [0] * len(spec.factors)
        unit[f_idx] = 1
        k = spec.index(unit)
        delta = Fraction(phases[k] - phases[0], order)
        m = delta * f
        if m.denominator != 1:
            raise ValueError("matrix is not a Weyl operator")
        ms.append(int(m) % f)
    exps = tuple(zip(ms, js))
    bt, bp = _bare_monomial_cached(spec, exps, order)
    shift = (phases[0] - bp[0]) % order
    if list(bt) != list(targets) or any((x + shift) % order != y for x, y in zip(bp, phases)):
        raise ValueError("matrix is not a Weyl operator")
    return WeylOperator(spec, exps, Fraction(shift, order))


def shift_clock(d: int, convention: str = "ket") -> tuple[ExactMatrix, ExactMatrix]:
    """(X, Z) for one qudit of dimension d."""
    if d < 2:
        raise ValueError("qudit dimension must be >= 2")
    spec = PauliSpec((d,), convention)
    return WeylOperator(spec, ((0, 1),)).matrix(), WeylOperator(spec, ((1, 0),)).matrix()


def _factor_phase(f: int, m: int, j: int) -> Fraction:
    if f == 2:
        return Fraction(j * m, 4)
    if f % 2 == 1:
        half = pow(2, -1, f)
        return Fraction((-j * m * half) % f, f)
    raise ValueError(f"no half-exponent phase rule for even qudit dimension {f}")


def weyl(spec: PauliSpec, exps: Sequence[tuple[int, int]], phased: bool = True) -> WeylOperator:
    """T_(m,j): i^(jm) Z^m X^j for qubits, w^(-jm/2) Z^m X^j for odd qudits.

    ``exps`` holds one (m, j) pair per factor; the multipartite operator is
    the Kronecker product.  Even factors above 2 have no half-exponent rule
    and are rejected unless ``phased`` is False.
    """
    exps = tuple((int(m), int(j)) for m, j in exps)
    if len(exps) != len(spec.factors):
        raise ValueError("one (m, j) pair per qudit factor is required")
    for (m, j), f in zip(exps, spec.factors):
        if not (0 <= m < f and 0 <= j < f):
            raise ValueError(f"exponents {(m, j)} out of range for qudit dimension {f}")
    phase = Fraction(0)
    if phased:
        for (m, j), f in zip(exps, spec.factors):
            phase += _factor_phase(f, m, j)
    return WeylOperator(spec, exps, phase)


def cosets(spec: PauliSpec, phased: bool = True) -> list[WeylOperator]:
    """d^2 coset representatives in lexicographic exponent order.

    Factors with a phase rule get it; even factors above 2 stay bare.
    """
    per_factor = [[(m, j) for m in range(f) for j in range(f)] for f in spec.factors]
    out = []
    for exps in itertools.product(*per_factor):
        phase = Fraction(0)
        if phased:
            for (m, j), f in zip(exps, spec.factors):
                if f == 2 or f % 2 == 1:
                    phase += _factor_phase(f, m, j)
        out.append(WeylOperator(spec, exps, phase))
    return out


def product_phase(ops: Sequence[WeylOperator]) -> Cyclotomic | None:
    """lambda if ops[0] @ ops[1] @ ... == lambda * I, else None."""
    if not ops:
        raise ValueError("empty operator list")
    spec = ops[0].spec
    if any(op.spec != spec for op in ops):
        raise ValueError("operators belong to different Pauli specs")
    (targets, phases), order = _product_monomial(ops)
    if any(t != k for k, t in enumerate(targets)):
        return None
    p0 = phases[0]
    if any(p != p0 for p in phases):
        return None
    return root_of_unity(order, p0)


def product_phase_turns(ops: Sequence[WeylOperator]) -> Fraction | None:
    (targets, phases), order = _product_monomial(ops)
    if any(t != k for k, t in enumerate(targets)):
        return None
    p0 = phases[0]
    if any(p != p0 for p in phases):
        return None
    return Fraction(p0, order)


# -- label grammar -----------------------------------------------------------------
# factor word: items of I, X, Z or (word), each optionally followed by an
# exponent written as digits or ^digits; factors joined by " x " or the
# tensor sign; optional scalar prefix in square brackets.

_ITEM = re.compile(r"\s*(?:([IXZ])|(\()|(\)))(?:\^?(\d+))?")


def _parse_word(word: str, f: int, convention: str) -> WeylOperator:
    spec = PauliSpec((f,), convention)
    ident = WeylOperator(spec, ((0, 0),))
    pos = 0
    word = word.strip()

    def parse_seq(depth):
        nonlocal pos
        acc = ident
        while pos < len(word):
            if word[pos].isspace():
                pos += 1
                continue
            if word[pos] == ")":
                if depth == 0:
                    raise ValueError(f"unbalanced ')' in operator word {word!r}")
                return acc
            m = _ITEM.match(word, pos)
            if not m:
                raise ValueError(f"cannot parse operator word {word!r} at {pos}")
            if m.group(1):
                letter = m.group(1)
                op = {"I": ident,
                      "X": WeylOperator(spec, ((0, 1),)),
                      "Z": WeylOperator(spec, ((1, 0),))}[letter]
                pos = m.end()
                e = int(m.group(4)) if m.group(4) else 1
            elif m.group(2):
                pos = m.start(2) + 1
                op = parse_seq(depth + 1)
                if pos >= len(word) or word[pos] != ")":
                    raise ValueError(f"unbalanced '(' in operator word {word!r}")
                pos += 1
                em = re.match(r"\^?(\d+)", word[pos:])
                e = 1
                if em:
                    e = int(em.group(1))
                    pos += em.end()
            else:
                raise ValueError(f"unbalanced ')' in operator word {word!r}")
            for _ in range(e):
                acc = acc @ op
        if depth:
            raise ValueError(f"unbalanced '(' in operator word {word!r}")
        return acc

    return parse_seq(0)


def parse_label(label: str, spec: PauliSpec) -> WeylOperator:
    """Parse ``"Z2 x (XZ)2"``-style labels into a normalized operator.

    Each factor word is multiplied out left to right as matrices under the
    spec's convention, so ``"XZ"`` normalizes to a phase times ``ZX``.
    """
    text = label.strip()
    scalar = Fraction(0)
    if text.startswith("["):
        end = text.index("]")
        val = parse_cyclo(text[1:end])
        scalar = _root_turns(val)
        text = text[end + 1:]
    words = re.split(r"\s+x\s+|\s*⊗\s*", text.strip())
    if len(words) != len(spec.factors):
        raise ValueError(f"label {label!r} has {len(words)} factors, spec has {len(spec.factors)}")
    exps, phase = [], scalar
    for w, f in zip(words, spec.factors):
        op = _parse_word(w, f, spec.convention)
        exps.append(op.exps[0])
        phase += op.phase
    return WeylOperator(spec, tuple(exps), phase)


def _root_turns(val: Cyclotomic) -> Fraction:
    c = val.canonical()
    n = c.n if c.n % 4 != 2 else c.n
    n = math.lcm(n, 2)
    for k in range(n):
        if root_of_unity(n, k) == val:
            return Fraction(k, n)
    raise ValueError(f"operator phase {format_cyclo(val)} is not a root of unity")
