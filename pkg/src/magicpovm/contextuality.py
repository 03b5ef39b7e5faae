"""Operator-based Kochen-Specker certificates.

A certificate lists labeled Weyl operators (points) and ordered lines whose
operator products are scalar multiples of the identity.  A non-contextual
assignment nu of value_group_order-th roots of unity obeying the product
rule on every line would force the product of all line scalars to equal
the product of nu(O)^(multiplicity of O), which is 1 whenever every
multiplicity is a multiple of value_group_order.  A line-scalar product
different from 1 is then a contradiction.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cyclo import Cyclotomic, format_cyclo, parse_cyclo, root_of_unity
from .pauli import PauliSpec, WeylOperator, _product_monomial, cosets, parse_label, product_phase

__all__ = [
    "KSCertificate",
    "KSVerdict",
    "MalformedCertificate",
    "verify",
    "certificate_from_geometry",
]


class MalformedCertificate(ValueError):
    pass


@dataclass(frozen=True)
class KSLine:
    order: tuple[str, ...]
    expected_phase: Cyclotomic | None = None


@dataclass(frozen=True)
class KSCertificate:
    spec: PauliSpec
    points: dict[str, WeylOperator]
    lines: tuple[KSLine, ...]
    value_group_order: int

    @classmethod
    def from_json(cls, obj: dict) -> "KSCertificate":
        spec = PauliSpec.from_json(obj["spec"])
        points = {}
        for p in obj["points"]:
            label = str(p["label"])
            if label in points:
                raise MalformedCertificate(f"point label {label!r} repeated")
            points[label] = parse_label(p["operator"], spec)
        lines = []
        for ln in obj["lines"]:
            order = tuple(str(x) for x in ln["order"])
            missing = [x for x in order if x not in points]
            if missing:
                raise MalformedCertificate(f"line refers to unknown points {missing}")
            exp = ln.get("expected_phase")
            lines.append(KSLine(order, parse_cyclo(exp) if exp is not None else None))
        vgo = int(obj.get("value_group_order") or math.lcm(*spec.factors))
        return cls(spec, points, tuple(lines), vgo)

    @classmethod
    def load(cls, path: str) -> "KSCertificate":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "points": [{"label": k, "operator": v.label()} for k, v in self.points.items()],
            "lines": [
                {"order": list(ln.order),
                 "expected_phase": format_cyclo(ln.expected_phase) if ln.expected_phase is not None else None}
                for ln in self.lines
            ],
            "value_group_order": self.value_group_order,
        }


@dataclass(frozen=True)
class KSVerdict:
    line_phases: tuple[Cyclotomic, ...]
    line_commuting: tuple[bool, ...]
    phase_mismatches: tuple[int, ...]
    operator_product: Cyclotomic
    value_product: Cyclotomic
    multiplicities: dict[str, int]
    multiplicities_divisible: bool
    contradiction: bool
    proof_strength: str

    @property
    def ok(self) -> bool:
        return self.contradiction and not self.phase_mismatches

    def to_json(self) -> dict:
        return {
            "line_phases": [format_cyclo(x) for x in self.line_phases],
            "line_commuting": list(self.line_commuting),
            "phase_mismatches": list(self.phase_mismatches),
            "operator_product": format_cyclo(self.operator_product),
            "value_product": format_cyclo(self.value_product),
            "multiplicities": self.multiplicities,
            "multiplicities_divisible": self.multiplicities_divisible,
            "contradiction": self.contradiction,
            "proof_strength": self.proof_strength,
        }


def verify(c: KSCertificate) -> KSVerdict:
    phases, commuting, mismatches = [], [], []
    for i, ln in enumerate(c.lines):
        ops = [c.points[x] for x in ln.order]
        lam = product_phase(ops)
        if lam is None:
            raise MalformedCertificate(f"line {i} {list(ln.order)} is not proportional to the identity")
        phases.append(lam.canonical())
        commuting.append(all(a.commutes_with(b) for a, b in itertools.combinations(ops, 2)))
        if ln.expected_phase is not None and lam != ln.expected_phase:
            mismatches.append(i)
    total = Cyclotomic.one()
    for lam in phases:
        total = total * lam
    mult = Counter(x for ln in c.lines for x in ln.order)
    mult_all = {label: mult.get(label, 0) for label in c.points}
    divisible = all(m % c.value_group_order == 0 for m in mult_all.values())
    contradiction = total != 1 and divisible
    # with non-commuting operators on a line the argument only constrains
    # operator products, not joint outcomes of observables
    strength = "observable_level" if all(commuting) else "operator_level"
    return KSVerdict(
        line_phases=tuple(phases),
        line_commuting=tuple(commuting),
        phase_mismatches=tuple(mismatches),
        operator_product=total.canonical(),
        value_product=Cyclotomic.one(),
        multiplicities=mult_all,
        multiplicities_divisible=divisible,
        contradiction=contradiction,
        proof_strength=strength,
    )


def _orientation_options(ops: Sequence[WeylOperator], block) -> list[tuple[tuple[int, ...], Fraction]]:
    """Distinct (ordering, scalar) pairs of a block, one per scalar, lexicographic first."""
    seen = {}
    for order in itertools.permutations(block.order if block.order is not None else block.indices):
        (tg, ph), n = _product_monomial([ops[i] for i in order])
        if any(t != j for j, t in enumerate(tg)) or any(x != ph[0] for x in ph):
            continue
        turn = Fraction(ph[0], n)
        seen.setdefault(turn, order)
    return [(o, t) for t, o in seen.items()]


def certificate_from_geometry(structure, spec: PauliSpec, *, ops: Sequence[WeylOperator] | None = None,
                              value_group_order: int | None = None, search_limit: int = 1 << 14) -> KSCertificate:
    """Package witnessed blocks as a certificate.

    Every block must carry a witnessing ordering.  When lines admit several
    scalars (non-commuting operators, different orientations) the orderings
    are chosen, by exhaustive search over at most ``search_limit``
    combinations, so that the line-scalar product differs from 1 if that is
    possible at all; otherwise the recorded witnesses are kept.
    """
    ops = list(ops) if ops is not None else cosets(spec, phased=True)
    blocks = [b for b in structure.blocks]
    if any(b is None or b.order is None for b in blocks):
        raise MalformedCertificate("every block needs a witnessing operator ordering")
    options = [_orientation_options(ops, b) for b in blocks]
    chosen = [(b.order, b.op_phase) for b in blocks]
    if math.prod(len(o) for o in options) <= search_limit:
        for combo in itertools.product(*options):
            if sum(t for _, t in combo) % 1 != 0:
                chosen = list(combo)
                break
    points = {}
    for b in blocks:
        for i in b.indices:
            label = ops[i].label()
            points[label] = ops[i]
    lines = tuple(
        KSLine(tuple(ops[i].label() for i in order), root_of_unity(t.denominator, t.numerator))
        for order, t in chosen
    )
    vgo = value_group_order or math.lcm(*spec.factors)
    return KSCertificate(spec, dict(sorted(points.items())), lines, vgo)
