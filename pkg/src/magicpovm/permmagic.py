"""Permutation gates, magic groups, and the magic states they carry."""

from __future__ import annotations

import random
import re
import warnings
from collections import Counter, deque
from dataclasses import dataclass
from math import lcm
from typing import Iterable, Sequence

from .cyclo import Cyclotomic, root_of_unity
from .linalg import ExactMatrix, ExactVector, inner
from .pauli import PauliSpec, cosets, default_spec

__all__ = [
    "PermGate",
    "MagicGroup",
    "CandidateState",
    "parse_perm",
    "is_magic_gate",
    "generate_group",
    "eigenstates",
    "candidate_states",
    "is_stabilizer_state",
    "projective_key",
    "search_magic_groups",
    "random_magic_gate",
    "magic_gates",
    "stabilizer_count",
    "GroupTooLarge",
]


@dataclass(frozen=True)
class PermGate:
    """Permutation of {0..d-1}; the gate sends basis vector e_k to e_image[k]."""

    image: tuple[int, ...]

    def __post_init__(self):
        img = tuple(int(x) for x in self.image)
        if sorted(img) != list(range(len(img))):
            raise ValueError(f"not a permutation: {img}")
        object.__setattr__(self, "image", img)

    @property
    def degree(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, d: int) -> "PermGate":
        return cls(tuple(range(d)))

    @classmethod
    def parse(cls, text: str, degree: int) -> "PermGate":
        return parse_perm(text, degree)

    def __matmul__(self, other: "PermGate") -> "PermGate":
        # apply other first, then self
        return PermGate(tuple(self.image[k] for k in other.image))

    def inverse(self) -> "PermGate":
        inv = [0] * self.degree
        for k, t in enumerate(self.image):
            inv[t] = k
        return PermGate(tuple(inv))

    def fixed_points(self) -> list[int]:
        return [k for k, t in enumerate(self.image) if k == t]

    def cycles(self, include_fixed: bool = True) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(self.degree):
            if start in seen:
                continue
            cyc, k = [], start
            while k not in seen:
                seen.add(k)
                cyc.append(k)
                k = self.image[k]
            if include_fixed or len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return lcm(*(len(c) for c in self.cycles()))

    def matrix(self) -> ExactMatrix:
        d = self.degree
        rows = [[0] * d for _ in range(d)]
        for k, t in enumerate(self.image):
            rows[t][k] = 1
        return ExactMatrix(rows)

    def apply(self, v: ExactVector) -> ExactVector:
        out = [None] * self.degree
        for k, t in enumerate(self.image):
            out[t] = v.entries[k]
        return ExactVector(out)

    def cycle_string(self) -> str:
        cyc = self.cycles(include_fixed=False)
        if not cyc:
            return "()"
        return "".join("(" + ",".join(str(k + 1) for k in c) + ")" for c in cyc)

    def __str__(self):
        return self.cycle_string()


_GROUP = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, degree: int) -> PermGate:
    """Parse 1-indexed permutation text.

    ``"(1,2)(3,4)"`` is cycle notation.  A single group listing all of
    1..d in non-sorted order, such as ``"(2,3,1)"``, is one-line notation
    (image of 1, image of 2, ...); ``"(1,2,...,d)"`` stays a d-cycle.
    """
    text = text.strip()
    if text in ("", "()", "id", "e"):
        return PermGate.identity(degree)
    groups = _GROUP.findall(text)
    if not groups or _GROUP.sub("", text).strip():
        raise ValueError(f"cannot parse permutation {text!r}")
    parsed = []
    for g in groups:
        items = [s for s in re.split(r"[,\s]+", g.strip()) if s]
        parsed.append([int(s) - 1 for s in items])
    if (len(parsed) == 1 and len(parsed[0]) == degree
            and sorted(parsed[0]) == list(range(degree)) and parsed[0] != list(range(degree))):
        return PermGate(tuple(parsed[0]))
    return _from_cycles(parsed, degree)


def _from_cycles(cycles: Iterable[Sequence[int]], degree: int) -> PermGate:
    img = list(range(degree))
    seen = set()
    for cyc in cycles:
        for k in cyc:
            if not 0 <= k < degree:
                raise ValueError(f"point {k + 1} out of range for degree {degree}")
            if k in seen:
                raise ValueError(f"point {k + 1} repeated in cycle notation")
            seen.add(k)
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]] if cyc else []):
            img[a] = b
    return PermGate(tuple(img))


def is_magic_gate(p: PermGate) -> bool:
    return len(p.fixed_points()) == 1


@dataclass(frozen=True)
class MagicGroup:
    degree: int
    generators: tuple[PermGate, PermGate]
    elements: tuple[PermGate, ...]
    relaxed: bool = False

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def fingerprint(self) -> tuple[int, dict[int, int]]:
        return self.order, dict(sorted(Counter(e.order() for e in self.elements).items()))

    def to_json(self) -> dict:
        order, hist = self.fingerprint
        return {
            "degree": self.degree,
            "generators": [g.cycle_string() for g in self.generators],
            "order": order,
            "element_orders": {str(k): v for k, v in hist.items()},
            "relaxed": self.relaxed,
        }


class GroupTooLarge(ValueError):
    pass


def generate_group(g1: PermGate, g2: PermGate, cap: int = 100_000, relaxed: bool = False) -> MagicGroup:
    """Breadth-first closure of <g1, g2>; raises GroupTooLarge past ``cap`` elements."""
    if g1.degree != g2.degree:
        raise ValueError("generators have different degrees")
    if cap < 1:
        raise ValueError("cap must be positive")
    if not relaxed and not (is_magic_gate(g1) and is_magic_gate(g2)):
        warnings.warn("generator is not a magic gate (exactly one fixed point expected)", stacklevel=2)
    e = PermGate.identity(g1.degree)
    seen = {e.image: e}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in (g1, g2):
            y = x @ g
            if y.image not in seen:
                if len(seen) >= cap:
                    raise GroupTooLarge(f"group order exceeds cap {cap}")
                seen[y.image] = y
                queue.append(y)
    elements = tuple(sorted(seen.values(), key=lambda p: p.image))
    return MagicGroup(g1.degree, (g1, g2), elements, relaxed)


def eigenstates(p: PermGate) -> list[tuple[Cyclotomic, list[ExactVector]]]:
    """Eigenvalues with eigenspace bases read off the cycle decomposition."""
    d = p.degree
    spaces: dict[Cyclotomic, list[ExactVector]] = {}
    for cyc in p.cycles():
        k = len(cyc)
        for t in range(k):
            entries = [0] * d
            for s, c in enumerate(cyc):
                entries[c] = root_of_unity(k, -t * s)
            lam = root_of_unity(k, t).canonical()
            spaces.setdefault(lam, []).append(ExactVector(entries))
    return list(spaces.items())


def projective_key(v: ExactVector) -> tuple:
    """Hashable key equal for vectors that differ by a nonzero scalar."""
    for x in v.entries:
        if x:
            inv = x.inverse()
            return tuple((y * inv).canonical().key() if y else None for y in v.entries)
    raise ValueError("zero vector has no projective class")


@dataclass(frozen=True)
class CandidateState:
    vector: ExactVector
    norm_sq: Cyclotomic
    source: str

    @classmethod
    def of(cls, v: ExactVector, source: str = "") -> "CandidateState":
        n = inner(v, v)
        if not n:
            raise ValueError("zero vector")
        return cls(v, n, source)


def _combos(basis: list[ExactVector], depth: int) -> Iterable[tuple[ExactVector, str]]:
    for i, b in enumerate(basis):
        yield b, f"b{i}"
    if depth >= 1:
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                yield basis[i] + basis[j], f"b{i}+b{j}"
                yield basis[i] - basis[j], f"b{i}-b{j}"


def candidate_states(group: MagicGroup, combo_depth: int = 0, spec: PauliSpec | None = None) -> list[CandidateState]:
    """Eigenvectors (and depth-1 combinations) of every group element, minus stabilizer states."""
    if combo_depth not in (0, 1):
        raise ValueError("combo_depth must be 0 or 1")
    spec = spec or default_spec(group.degree)
    if spec.d != group.degree:
        raise ValueError("Pauli spec dimension differs from the group degree")
    seen: set = set()
    out = []
    for elem in group.elements:
        for lam, basis in eigenstates(elem):
            for v, how in _combos(basis, combo_depth):
                if all(not x for x in v.entries):
                    continue
                key = projective_key(v)
                if key in seen:
                    continue
                seen.add(key)
                cand = CandidateState.of(v, f"{elem.cycle_string()} eigenvalue {lam} {how}")
                if not is_stabilizer_state(cand, spec):
                    out.append(cand)
    return out


def stabilizer_count(v: ExactVector, spec: PauliSpec) -> int:
    if spec.d != len(v):
        raise ValueError("Pauli spec dimension differs from the vector dimension")
    pivot = next(i for i, x in enumerate(v.entries) if x)
    count = 0
    for op in cosets(spec, phased=False):
        w = op.apply(v)
        if not w.entries[pivot]:
            continue
        lam = w.entries[pivot] / v.entries[pivot]
        if all(a == lam * b for a, b in zip(w.entries, v.entries)):
            count += 1
    return count


def is_stabilizer_state(v: CandidateState | ExactVector, spec: PauliSpec) -> bool:
    """True when exactly d coset representatives fix the ray of v."""
    vec = v.vector if isinstance(v, CandidateState) else v
    return stabilizer_count(vec, spec) == spec.d


def random_magic_gate(d: int, rng: random.Random) -> PermGate:
    while True:
        img = list(range(d))
        rng.shuffle(img)
        p = PermGate(tuple(img))
        if is_magic_gate(p):
            return p


def magic_gates(d: int) -> list[PermGate]:
    from itertools import permutations

    return [PermGate(p) for p in permutations(range(d)) if sum(k == t for k, t in enumerate(p)) == 1]


def search_magic_groups(d: int, *, samples: int = 200, seed: int = 0, cap: int = 5000,
                        exhaustive: bool = False) -> list[MagicGroup]:
    """Distinct groups generated by pairs of magic gates.

    Exhaustive enumeration walks every ordered pair (only sensible for small
    d); otherwise ``samples`` random pairs are drawn from a seeded generator.
    Groups larger than ``cap`` are skipped.
    """
    if exhaustive:
        gates = magic_gates(d)
        pairs = ((a, b) for a in gates for b in gates)
    else:
        rng = random.Random(seed)
        pairs = ((random_magic_gate(d, rng), random_magic_gate(d, rng)) for _ in range(samples))
    found: dict[frozenset, MagicGroup] = {}
    for a, b in pairs:
        try:
            g = generate_group(a, b, cap=cap, relaxed=True)
        except GroupTooLarge:
            continue
        key = frozenset(e.image for e in g.elements)
        if key not in found:
            found[key] = g
    return sorted(found.values(), key=lambda g: (g.order, [e.image for e in g.generators]))
