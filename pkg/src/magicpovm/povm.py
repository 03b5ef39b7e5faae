"""Pauli-covariant rank-1 POVMs built from a fiducial state.

Projectors are kept as unnormalized vectors v_i = T_i v together with the
common squared norm, so nothing leaves the cyclotomic field: every
trace of a product of projectors is a ratio of inner products.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .cyclo import Cyclotomic, euler_phi, format_cyclo, parse_cyclo
from .linalg import ExactMatrix, ExactVector, as_cyclo, common_conductor, exact_rank, inner
from .pauli import PauliSpec, WeylOperator, cosets

__all__ = [
    "Fiducial",
    "Povm",
    "build_povm",
    "parse_vector",
    "format_vector",
    "exact_root",
    "born",
    "reconstruct",
]


def parse_vector(text: str) -> ExactVector:
    """``"(0, 1, -w6, w6 - 1)"`` -> ExactVector; commas at parenthesis depth 1 separate entries."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    parts.append("".join(cur))
    if any(not p.strip() for p in parts):
        raise ValueError(f"empty entry in vector literal {text!r}")
    return ExactVector(parse_cyclo(p) for p in parts)


def format_vector(v: ExactVector) -> str:
    return "(" + ", ".join(format_cyclo(x) for x in v.entries) + ")"


def exact_root(q: Fraction, k: int) -> Fraction | None:
    """The non-negative rational k-th root of q >= 0 when it exists."""
    if q < 0:
        return None
    roots = []
    for part in (q.numerator, q.denominator):
        r = round(part ** (1.0 / k)) if part else 0
        hit = next((c for c in (r - 1, r, r + 1) if c >= 0 and c**k == part), None)
        if hit is None:
            r = _int_root(part, k)
            if r**k != part:
                return None
            hit = r
        roots.append(hit)
    return Fraction(roots[0], roots[1])


def _int_root(x: int, k: int) -> int:
    lo, hi = 0, 1 << (x.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= x:
            lo = mid
        else:
            hi = mid - 1
    return lo


@dataclass(frozen=True)
class Fiducial:
    """Fiducial state as an unnormalized vector, optionally given by its projector."""

    vector: ExactVector
    spec: PauliSpec
    name: str = ""
    projector_form: bool = False

    def __post_init__(self):
        if len(self.vector) != self.spec.d:
            raise ValueError(f"fiducial has dimension {len(self.vector)}, Pauli spec has {self.spec.d}")
        if not self.vector.norm_sq():
            raise ValueError("fiducial vector is zero")

    @classmethod
    def from_projector(cls, p: ExactMatrix, spec: PauliSpec, name: str = "") -> "Fiducial":
        """Column of a rank-1 projector with nonzero diagonal entry, as the state vector."""
        r, c = p.shape
        if r != c or r != spec.d:
            raise ValueError("projector shape does not match the Pauli spec")
        if not p.is_hermitian() or p.trace() != 1 or p @ p != p:
            raise ValueError("matrix is not a trace-1 Hermitian projector")
        col = next(k for k in range(r) if p[k, k])
        v = ExactVector(p[k, col] for k in range(r))
        if ExactMatrix.outer(v, v).scale(v.norm_sq().inverse()) != p:
            raise ValueError("projector does not have rank 1")
        return cls(v, spec, name, projector_form=True)

    @property
    def projector(self) -> ExactMatrix:
        return ExactMatrix.outer(self.vector, self.vector).scale(self.vector.norm_sq().inverse())

    def literal(self) -> str:
        return format_vector(self.vector)


def _group_values(values) -> list[tuple[Cyclotomic, int]]:
    counts = Counter(values)
    return sorted(counts.items(), key=lambda kv: (-float(kv[0]), format_cyclo(kv[0])))


@dataclass(frozen=True)
class PairValue:
    value: Cyclotomic
    multiplicity: int

    def to_json(self) -> dict:
        return {"value_exact": format_cyclo(self.value), "value_float": float(self.value),
                "multiplicity": self.multiplicity}


@dataclass(frozen=True)
class AngleValue:
    norm: Fraction
    angle_sq_exact: Fraction | None
    angle_sq_float: float
    multiplicity: int
    traces: tuple[Cyclotomic, ...]

    @property
    def angle_float(self) -> float:
        return math.sqrt(self.angle_sq_float)

    def to_json(self) -> dict:
        return {
            "norm_exact": str(self.norm),
            "angle_sq_exact": str(self.angle_sq_exact) if self.angle_sq_exact is not None else None,
            "angle_sq_float": self.angle_sq_float,
            "angle_float": self.angle_float,
            "multiplicity": self.multiplicity,
            "trace_values": [format_cyclo(t) for t in self.traces],
        }


class Povm:
    """The d^2 projectors T_i P T_i^dagger of a fiducial P, i over the coset representatives."""

    def __init__(self, fiducial: Fiducial, conductor: int | None = None):
        self.fiducial = fiducial
        self.spec = fiducial.spec
        self.d = self.spec.d
        self.ops: list[WeylOperator] = cosets(self.spec, phased=False)
        raw = fiducial.vector.entries
        natural = math.lcm(common_conductor(raw), self.spec.phase_order)
        if conductor is not None and conductor % natural:
            raise ValueError(f"conductor {conductor} does not contain the entries (need a multiple of {natural})")
        self.conductor = conductor or natural
        n = self.conductor
        v = ExactVector(x.canonical().embed(n) for x in raw)
        self.vectors: list[ExactVector] = [op.apply(v) for op in self.ops]
        self.norm_sq: Cyclotomic = v.norm_sq()

    def __len__(self):
        return len(self.vectors)

    @property
    def deg(self) -> int:
        return euler_phi(self.conductor)

    def labels(self) -> list[str]:
        return [op.label(with_phase=False) for op in self.ops]

    def projector(self, i: int) -> ExactMatrix:
        v = self.vectors[i]
        return ExactMatrix.outer(v, v).scale(self.norm_sq.inverse())

    @cached_property
    def overlaps(self) -> list[list[Cyclotomic]]:
        """S[i][j] = <v_i, v_j> (unnormalized)."""
        m = len(self.vectors)
        S = [[None] * m for _ in range(m)]
        for i in range(m):
            S[i][i] = self.norm_sq
            for j in range(i + 1, m):
                s = inner(self.vectors[i], self.vectors[j])
                S[i][j] = s
                S[j][i] = s.conjugate()
        return S

    @cached_property
    def overlaps_float(self) -> np.ndarray:
        V = np.array([v.to_complex() for v in self.vectors])
        return V.conj() @ V.T / complex(self.norm_sq).real

    def pair_trace(self, i: int, j: int) -> Cyclotomic:
        if i == j:
            return Cyclotomic.one()
        s = self.overlaps[i][j]
        return (s * s.conjugate() / (self.norm_sq * self.norm_sq)).canonical()

    def hermitian_angle(self, i: int, j: int) -> tuple[Fraction, float]:
        """(r, |<psi_i|psi_j>|) with r = N(s conj s) / N(|v_i|^2 |v_j|^2), s = <v_i, v_j>.

        N is the field norm at the working conductor; the angle is r^(1/(2 deg)).
        """
        if i == j:
            raise ValueError("angle needs two distinct projectors")
        r = self._norm_of(self.pair_trace(i, j))
        return r, float(r) ** (1.0 / (2 * self.deg))

    def _norm_of(self, t: Cyclotomic) -> Fraction:
        return t.canonical().embed(self.conductor).norm()

    @cached_property
    def is_povm(self) -> bool:
        """Sum of projectors equals d * I (exact)."""
        d = self.d
        acc = [[Cyclotomic.zero()] * d for _ in range(d)]
        for v in self.vectors:
            e = v.entries
            for a in range(d):
                if not e[a]:
                    continue
                for b in range(d):
                    if e[b]:
                        acc[a][b] = acc[a][b] + e[a] * e[b].conjugate()
        target = self.norm_sq * d
        return all(acc[a][b] == (target if a == b else 0) for a in range(d) for b in range(d))

    @cached_property
    def gram(self) -> ExactMatrix:
        m = len(self.vectors)
        return ExactMatrix([[self.pair_trace(i, j) for j in range(m)] for i in range(m)])

    @cached_property
    def rank(self) -> int:
        return exact_rank(self.gram)

    @property
    def is_ic(self) -> bool:
        return self.rank == self.d**2

    @cached_property
    def pair_spectrum(self) -> list[PairValue]:
        m = len(self.vectors)
        vals = (self.pair_trace(i, j) for i in range(m) for j in range(i + 1, m))
        return [PairValue(v, k) for v, k in _group_values(vals)]

    @cached_property
    def angle_spectrum(self) -> list[AngleValue]:
        groups: dict[Fraction, list] = {}
        for pv in self.pair_spectrum:
            r = self._norm_of(pv.value)
            groups.setdefault(r, []).append(pv)
        out = []
        for r, pvs in groups.items():
            root = exact_root(r, self.deg)
            out.append(AngleValue(
                norm=r,
                angle_sq_exact=root,
                angle_sq_float=float(root) if root is not None else float(r) ** (1.0 / self.deg),
                multiplicity=sum(p.multiplicity for p in pvs),
                traces=tuple(p.value for p in pvs),
            ))
        return sorted(out, key=lambda a: -a.angle_sq_float)

    @cached_property
    def classification(self) -> str:
        return classify(self)

    def report(self) -> dict:
        return {
            "dimension": self.d,
            "factors": list(self.spec.factors),
            "convention": self.spec.convention,
            "conductor": self.conductor,
            "deg": self.deg,
            "fiducial": self.fiducial.literal(),
            "fiducial_name": self.fiducial.name,
            "povm_valid": self.is_povm,
            "gram_rank": self.rank,
            "classification": self.classification,
            "pair_spectrum": [p.to_json() for p in self.pair_spectrum],
            "angle_spectrum": [a.to_json() for a in self.angle_spectrum],
        }


def build_povm(f: Fiducial, conductor: int | None = None) -> Povm:
    return Povm(f, conductor)


def classify(p: Povm) -> str:
    """SIC, equiangular_by_norm, dichotomic, multivalued(k), not_povm or not_ic.

    Angles are counted by their field norms, so a spectrum whose trace values
    are Galois conjugates of one another counts as a single angle.
    """
    if not p.is_povm:
        return "not_povm"
    if p.rank < p.d**2:
        return "not_ic"
    sic = Fraction(1, p.d + 1)
    traces = [pv.value for pv in p.pair_spectrum]
    if traces == [sic]:
        return "SIC"
    k = len(p.angle_spectrum)
    if k == 1:
        return "equiangular_by_norm"
    if k == 2:
        return "dichotomic"
    return f"multivalued({k})"


def born(rho: ExactMatrix, p: Povm) -> list[Cyclotomic]:
    """p(i) = tr(rho Pi_i) / d."""
    if rho.shape != (p.d, p.d):
        raise ValueError("density matrix dimension differs from the POVM")
    if rho.trace() != 1:
        raise ValueError("density matrix must have trace 1")
    scale = (p.norm_sq * p.d).inverse()
    out = []
    for v in p.vectors:
        w = rho @ v
        out.append((inner(v, w) * scale).canonical())
    return out


def reconstruct(p: Povm, probs: Sequence) -> ExactMatrix:
    """rho = sum_i ((d+1) p_i - 1/d) Pi_i for a SIC."""
    if p.classification != "SIC":
        raise ValueError(f"reconstruction needs a SIC, POVM is {p.classification}")
    probs = [as_cyclo(x) for x in probs]
    if len(probs) != len(p):
        raise ValueError("one probability per POVM element is required")
    if sum(probs, Cyclotomic.zero()) != 1:
        raise ValueError("probabilities must sum to 1")
    d = p.d
    acc = [[Cyclotomic.zero()] * d for _ in range(d)]
    inv = p.norm_sq.inverse()
    for q, v in zip(probs, p.vectors):
        c = (q * (d + 1) - Fraction(1, d)) * inv
        if not c:
            continue
        e = v.entries
        for a in range(d):
            if e[a]:
                ca = c * e[a]
                for b in range(d):
                    if e[b]:
                        acc[a][b] = acc[a][b] + ca * e[b].conjugate()
    return ExactMatrix([[x.canonical() for x in row] for row in acc])
