"""Preset catalog and the end-to-end signature checks run by ``table1``.

Every expected number lives in ``data/presets.json``; this module only
knows how to compute each named signature and how to compare it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Any

from .contextuality import KSCertificate, certificate_from_geometry, verify
from .cyclo import Cyclotomic, format_cyclo, parse_cyclo
from .geometry import (
    IncidenceStructure,
    find_blocks,
    is_pasch,
    named_detections,
    spectrum_report,
)
from .linalg import ExactMatrix
from .pauli import PauliSpec
from .permmagic import generate_group, is_stabilizer_state, parse_perm
from .povm import Fiducial, Povm, parse_vector

__all__ = ["Preset", "load_presets", "get_preset", "geometry_report", "evaluate", "load_certificate"]


def _data(name: str) -> str:
    return resources.files("magicpovm").joinpath("data", name).read_text()


def load_certificate(name: str) -> KSCertificate:
    return KSCertificate.from_json(json.loads(_data(name)))


@dataclass(frozen=True)
class Preset:
    raw: dict

    @property
    def name(self) -> str:
        return self.raw["name"]

    @property
    def spec(self) -> PauliSpec:
        return PauliSpec(tuple(self.raw["factors"]), self.raw.get("convention", "ket"))

    def fiducial(self) -> Fiducial:
        f = self.raw["fiducial"]
        if "vector" in f:
            return Fiducial(parse_vector(f["vector"]), self.spec, self.name)
        m = ExactMatrix([[parse_cyclo(x) for x in row] for row in f["projector"]])
        return Fiducial.from_projector(m, self.spec, self.name)

    def povm(self) -> Povm:
        return Povm(self.fiducial())

    def group(self):
        gens = self.raw.get("generators")
        if not gens:
            return None
        d = self.spec.d
        g1, g2 = (parse_perm(g, d) for g in gens)
        return generate_group(g1, g2, relaxed=bool(self.raw.get("relaxed")))


def load_presets() -> dict[str, Preset]:
    data = json.loads(_data("presets.json"))
    return {p["name"]: Preset(p) for p in data["presets"]}


def get_preset(name: str) -> Preset:
    presets = load_presets()
    if name not in presets:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(presets)}")
    return presets[name]


# -- geometry ------------------------------------------------------------------------


def geometry_report(p: Povm, k: int, trace, *, signed: bool = False, phases: str | None = None,
                    threads: int = 1, spectra: bool = False, cliques: bool = False,
                    petersen: bool = False, ks: bool = False,
                    claimed_spectrum: dict | None = None) -> dict:
    tv = parse_cyclo(trace) if isinstance(trace, str) else Cyclotomic.rational(trace)
    blocks = find_blocks(p, k, tv, phases=phases, signed=signed, threads=threads)
    labels = p.labels()
    s = IncidenceStructure(blocks, labels)
    comps = s.components() if blocks else []
    summary: dict[str, Any] = {
        "blocks": len(blocks),
        "config": list(s.config_type()) if s.config_type() else None,
        "structure": s.config_summary() if blocks else None,
        "detections": named_detections(s) if blocks else [],
        "components": len(comps),
        "component_points": sorted(len(c.points) for c in comps),
        "component_list": [
            {
                "points": [labels[x] for x in c.points],
                "lines": len(c.lines),
                "config": list(c.config_type()) if c.config_type() else None,
                "detections": named_detections(c),
                "pair_values": [format_cyclo(v) for v in c.pair_values(p)],
            }
            for c in comps
        ],
    }
    if petersen:
        g2 = s.intersection_graph(2)
        g1 = s.intersection_graph(1)
        parts = g2.component_sets()
        summary["shared2_components"] = len(parts)
        summary["shared2_component_sizes"] = sorted(len(c) for c in parts)
        # inside each two-point class, the one-point intersections form the graph to test
        summary["petersen_components"] = sum(g1.induced(c).is_petersen() for c in parts)
    if spectra:
        summary["collinearity_spectrum"] = spectrum_report(s.collinearity_graph(), claimed_spectrum)
        summary["line_graph_spectrum"] = spectrum_report(s.line_graph(), claimed_spectrum)
        inc = s.incidence_graph()
        extra = set()
        if claimed_spectrum:
            extra = {-int(x) for x in claimed_spectrum}
        summary["incidence_spectrum"] = spectrum_report(inc, claimed_spectrum, extra)
    if cliques:
        g = s.line_graph()
        cl = g.maximal_cliques()
        counts: dict[int, int] = {}
        for c in cl:
            counts[len(c)] = counts.get(len(c), 0) + 1
        summary["clique_counts"] = {str(k_): v for k_, v in sorted(counts.items())}
        summary["pasch_cliques"] = sum(1 for c in cl if len(c) == 4 and is_pasch(s.sub(c)))
    if ks:
        cert = certificate_from_geometry(s, p.spec)
        v = verify(cert)
        summary["ks_certificate"] = cert.to_json()
        summary["ks_verdict"] = v.to_json()
        summary["ks_operator_product"] = format_cyclo(v.operator_product)
        summary["ks_contradiction"] = v.contradiction
    return {
        "k": k,
        "trace": format_cyclo(tv),
        "signed": signed,
        "phases": phases,
        "blocks": [b.to_json(labels) for b in blocks],
        "summary": summary,
    }


# -- signature checks ---------------------------------------------------------------


def _cyclo_set(values) -> set:
    return {parse_cyclo(v) if isinstance(v, str) else v for v in values}


def _povm_signature(key: str, p: Povm, preset: Preset):
    if key == "povm_valid":
        return p.is_povm
    if key == "gram_rank":
        return p.rank
    if key == "classification":
        return p.classification
    if key == "pair_values":
        return [format_cyclo(v.value) for v in p.pair_spectrum]
    if key == "pair_value_count":
        return len(p.pair_spectrum)
    if key == "angle_sq":
        return [str(a.angle_sq_exact) if a.angle_sq_exact is not None else a.angle_sq_float
                for a in p.angle_spectrum]
    if key == "group_order":
        return preset.group().order
    if key == "group_element_orders":
        return {str(k): v for k, v in preset.group().fingerprint[1].items()}
    if key == "stabilizer":
        return is_stabilizer_state(p.fiducial.vector, p.spec)
    raise KeyError(f"unknown signature {key!r}")


def _geometry_signature(key: str, summary: dict):
    if key in ("collinearity_spectrum", "line_graph_spectrum", "incidence_spectrum"):
        return summary[key]["computed"]
    if key == "component_labels":
        return [c["points"] for c in summary["component_list"]]
    if key == "component_detections":
        return [c["detections"] for c in summary["component_list"]]
    if key == "component_pair_values_within":
        vals = set()
        for c in summary["component_list"]:
            vals |= set(c["pair_values"])
        return sorted(vals)
    return summary[key]


def _agree(key: str, expected, computed) -> bool:
    if key in ("pair_values", "component_pair_values_within"):
        exp, got = _cyclo_set(expected), _cyclo_set(computed)
        return got <= exp if key == "component_pair_values_within" else got == exp
    if key == "angle_sq":
        return {Fraction(x) for x in expected} == {Fraction(str(x)) for x in computed}
    if key == "component_labels":
        return {frozenset(x) for x in expected} == {frozenset(x) for x in computed}
    if key == "detections":
        return set(expected) <= set(computed)
    if key == "component_detections":
        return bool(computed) and all(set(expected) <= set(c) for c in computed)
    if key == "clique_counts":
        return all(computed.get(k) == v for k, v in expected.items())
    if key in ("ks_operator_product",):
        return parse_cyclo(expected) == parse_cyclo(computed)
    if key == "line_phases":
        return [parse_cyclo(x) for x in expected] == [parse_cyclo(x) for x in computed]
    return expected == computed


def _check(key, spec_entry, computed) -> dict:
    ok = _agree(key, spec_entry["value"], computed)
    return {"key": key, "expected": spec_entry["value"], "computed": computed,
            "basis": spec_entry["basis"], "pass": ok}


def _claim(key, claim, computed) -> dict:
    return {"key": key, "claimed": claim["claimed"], "computed": computed,
            "agrees": _agree(key, claim["claimed"], computed), "note": claim.get("note", "")}


def evaluate(preset: Preset, threads: int = 1) -> dict:
    """Run every catalog check for one preset."""
    p = preset.povm()
    checks, claims = [], []
    for key, entry in preset.raw.get("expected", {}).items():
        checks.append(_check(key, entry, _povm_signature(key, p, preset)))
    for claim in preset.raw.get("claims", []):
        claims.append(_claim(claim["key"], claim, _povm_signature(claim["key"], p, preset)))
    for task in preset.raw.get("geometry", []):
        rep = geometry_report(
            p, task["k"], task["trace"], signed=task.get("signed", False), phases=task.get("phases"),
            threads=threads, spectra=task.get("spectra", False), cliques=task.get("cliques", False),
            petersen=task.get("petersen", False), ks=task.get("ks", False),
            claimed_spectrum={int(k): v for k, v in task["claimed_spectrum"].items()}
            if task.get("claimed_spectrum") else None,
        )
        tag = f"k={task['k']} trace={task['trace']}" + (" signed" if task.get("signed") else "") + (
            f" phases={task['phases']}" if task.get("phases") else "")
        for key, entry in task.get("expect", {}).items():
            c = _check(key, entry, _geometry_signature(key, rep["summary"]))
            c["task"] = tag
            checks.append(c)
        for claim in task.get("claims", []):
            c = _claim(claim["key"], claim, _geometry_signature(claim["key"], rep["summary"]))
            c["task"] = tag
            claims.append(c)
    if preset.raw.get("ks_certificate"):
        v = verify(load_certificate(preset.raw["ks_certificate"]))
        got = {"line_phases": [format_cyclo(x) for x in v.line_phases], "contradiction": v.contradiction}
        for key, entry in preset.raw.get("ks_expect", {}).items():
            c = _check(key, entry, got[key])
            c["task"] = "ks certificate"
            checks.append(c)
    return {
        "preset": preset.name,
        "dimension": p.d,
        "factors": list(p.spec.factors),
        "classification": p.classification,
        "passed": all(c["pass"] for c in checks),
        "checks": checks,
        "claims": claims,
    }
