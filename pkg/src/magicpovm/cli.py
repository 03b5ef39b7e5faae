"""Command-line front end.

Exit codes: 0 success (IC confirmed / checks passed), 1 verification
failed, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .catalog import evaluate, geometry_report, get_preset, load_certificate, load_presets
from .contextuality import KSCertificate, MalformedCertificate, verify
from .cyclo import parse_cyclo
from .geometry import IncidenceStructure, find_blocks
from .linalg import ExactMatrix
from .pauli import PauliSpec, default_spec
from .permmagic import candidate_states, search_magic_groups
from .povm import Fiducial, Povm, format_vector, parse_vector

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _spec_from_args(args, d: int | None) -> PauliSpec:
    convention = getattr(args, "convention", None) or "ket"
    if args.factors:
        try:
            factors = tuple(int(x) for x in args.factors.split(","))
        except ValueError:
            raise InputError(f"bad --factors {args.factors!r}")
        spec = PauliSpec(factors, convention)
        if d is not None and spec.d != d:
            raise InputError(f"--factors multiply to {spec.d}, dimension is {d}")
        return spec
    if d is None:
        raise InputError("dimension unknown: give --dim or --factors")
    return PauliSpec(default_spec(d).factors, convention)


def _load_state(text: str):
    """Vector literal, or a JSON file holding {"vector": ...} / {"projector": [[...]]}."""
    if text.endswith(".json") and os.path.exists(text):
        with open(text) as fh:
            obj = json.load(fh)
        if "vector" in obj:
            return parse_vector(obj["vector"]), obj
        if "projector" in obj:
            return ExactMatrix([[parse_cyclo(x) for x in row] for row in obj["projector"]]), obj
        raise InputError(f"{text}: expected a 'vector' or 'projector' entry")
    return parse_vector(text), {}


def _povm_from_args(args) -> Povm:
    try:
        if args.preset:
            preset = get_preset(args.preset)
            fid = preset.fiducial()
        elif args.state:
            state, meta = _load_state(args.state)
            if "factors" in meta and not args.factors:
                args.factors = ",".join(str(f) for f in meta["factors"])
            d = len(state) if not isinstance(state, ExactMatrix) else state.shape[0]
            if args.dim is not None and args.dim != d:
                raise InputError(f"state has dimension {d}, --dim is {args.dim}")
            spec = _spec_from_args(args, d)
            if isinstance(state, ExactMatrix):
                fid = Fiducial.from_projector(state, spec)
            else:
                fid = Fiducial(state, spec)
        else:
            raise InputError("give --preset or --state")
        return Povm(fid, args.conductor)
    except (KeyError, ValueError, SyntaxError, ZeroDivisionError) as e:
        raise InputError(str(e).strip("'\""))


def _emit(obj, as_json: bool, text_lines: Sequence[str]):
    if as_json:
        print(json.dumps(obj, indent=2, ensure_ascii=False))
    else:
        for line in text_lines:
            print(line)


def cmd_analyze(args) -> int:
    p = _povm_from_args(args)
    rep = p.report()
    lines = [
        f"dimension {rep['dimension']} factors {rep['factors']} conductor {rep['conductor']} (deg {rep['deg']})",
        f"fiducial {rep['fiducial']}",
        f"POVM (sum = d I): {rep['povm_valid']}",
        f"Gram rank: {rep['gram_rank']} of {p.d ** 2}",
        f"classification: {rep['classification']}",
        "pair traces:",
        *(f"  {x['value_exact']}  ({x['value_float']:.6g})  x{x['multiplicity']}" for x in rep["pair_spectrum"]),
        "field-norm angles^2:",
        *(f"  {a['angle_sq_exact'] or a['angle_sq_float']}  x{a['multiplicity']}" for a in rep["angle_spectrum"]),
    ]
    _emit(rep, args.json, lines)
    return EXIT_OK if (rep["povm_valid"] and rep["gram_rank"] == p.d ** 2) else EXIT_FAIL


def cmd_geometry(args) -> int:
    p = _povm_from_args(args)
    if not p.is_povm:
        print("not a POVM", file=sys.stderr)
        return EXIT_FAIL
    if args.k not in (3, 4):
        raise InputError("--k must be 3 or 4")
    try:
        parse_cyclo(args.trace)
    except (ValueError, SyntaxError) as e:
        raise InputError(f"bad --trace: {e}")
    phases = None if args.phases in (None, "none") else args.phases
    rep = geometry_report(p, args.k, args.trace, signed=args.signed, phases=phases, threads=args.threads,
                          spectra=args.spectra, cliques=args.cliques, petersen=args.petersen, ks=args.ks)
    if args.export_dot or args.export_edges:
        s = IncidenceStructure(find_blocks(p, args.k, parse_cyclo(args.trace), phases=phases,
                                           signed=args.signed, threads=args.threads), p.labels())
        graphs = {"collinearity": s.collinearity_graph(), "lines": s.line_graph()}
        for name, g in graphs.items():
            if args.export_dot:
                with open(f"{args.export_dot}.{name}.dot", "w") as fh:
                    fh.write(g.to_dot(name))
            if args.export_edges:
                with open(f"{args.export_edges}.{name}.txt", "w") as fh:
                    fh.write(g.to_edge_list())
    s = rep["summary"]
    lines = [
        f"k={rep['k']} trace={rep['trace']}{' (+/-)' if rep['signed'] else ''} phases={rep['phases'] or 'none'}",
        f"blocks: {s['blocks']}",
        f"configuration: {_config_text(s['structure'])}",
        f"detections: {', '.join(s['detections']) or '-'}",
        f"components: {s['components']} with point counts {s['component_points']}",
    ]
    for c in s["component_list"][:12]:
        lines.append(f"  {c['config']} {', '.join(c['detections'])}: {' | '.join(c['points'])}")
    for key in ("shared2_components", "petersen_components", "clique_counts", "pasch_cliques",
                "ks_operator_product", "ks_contradiction"):
        if key in s:
            lines.append(f"{key}: {s[key]}")
    for key in ("collinearity_spectrum", "line_graph_spectrum", "incidence_spectrum"):
        if key in s:
            lines.append(f"{key}: {s[key]}")
    _emit(rep, args.json, lines)
    if args.ks and not s["ks_contradiction"]:
        return EXIT_FAIL
    return EXIT_OK


def _config_text(c) -> str:
    if not c:
        return "-"
    if c.get("uniform"):
        return (f"{c['points']} points on {c['lines_per_point']} lines each, "
                f"{c['lines']} lines of {c['points_per_line']} points")
    return ", ".join(f"{k}={v}" for k, v in c.items())


def cmd_search(args) -> int:
    if args.dim < 3:
        raise InputError("search needs --dim >= 3")
    spec = _spec_from_args(args, args.dim)
    groups = search_magic_groups(args.dim, samples=args.samples, seed=args.seed, cap=args.order_cap,
                                 exhaustive=args.exhaustive)
    out = []
    lines = []
    for g in groups[: args.max_groups]:
        entry = g.to_json()
        cands = []
        for c in candidate_states(g, args.combo_depth, spec):
            p = Povm(Fiducial(c.vector, spec))
            cands.append({
                "state": format_vector(c.vector),
                "source": c.source,
                "povm_valid": p.is_povm,
                "gram_rank": p.rank,
                "ic": p.is_ic,
                "classification": p.classification,
            })
        entry["candidates"] = cands
        out.append(entry)
        ic = [c for c in cands if c["ic"]]
        lines.append(f"group order {g.order} generators {' '.join(entry['generators'])}: "
                     f"{len(cands)} magic candidates, {len(ic)} IC")
        for c in ic:
            lines.append(f"  {c['state']}  {c['classification']}")
    _emit({"dimension": args.dim, "factors": list(spec.factors), "groups": out}, args.json, lines)
    return EXIT_OK


def cmd_table1(args) -> int:
    presets = load_presets()
    names = args.only.split(",") if args.only else list(presets)
    rows = []
    for name in names:
        if name not in presets:
            raise InputError(f"unknown preset {name!r}")
        rows.append(evaluate(presets[name], threads=args.threads))
    lines = []
    for r in rows:
        status = "PASS" if r["passed"] else "FAIL"
        lines.append(f"{status}  {r['preset']:<15} d={r['dimension']:<3} {r['classification']}")
        for c in r["checks"]:
            if not c["pass"]:
                lines.append(f"      check {c['key']}: expected {c['expected']} computed {c['computed']}")
        for c in r["claims"]:
            if not c["agrees"]:
                lines.append(f"      differs from published {c['key']}: {c['note']}")
    _emit({"rows": rows, "passed": all(r["passed"] for r in rows)}, args.json, lines)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_FAIL


def cmd_ks(args) -> int:
    try:
        if args.preset:
            preset = get_preset(args.preset)
            if not preset.raw.get("ks_certificate"):
                raise InputError(f"preset {args.preset!r} has no stored certificate; "
                                 "use 'geometry --ks' to build one")
            cert = load_certificate(preset.raw["ks_certificate"])
        elif args.file:
            cert = KSCertificate.load(args.file)
        else:
            raise InputError("give a certificate file or --preset")
    except (KeyError, OSError, ValueError, json.JSONDecodeError) as e:
        raise InputError(str(e))
    try:
        v = verify(cert)
    except MalformedCertificate as e:
        print(f"malformed certificate: {e}", file=sys.stderr)
        return EXIT_FAIL
    rep = v.to_json()
    lines = [f"line {i + 1}: {' '.join(ln.order)} -> {ph}" for i, (ln, ph) in
             enumerate(zip(cert.lines, rep["line_phases"]))]
    lines += [
        f"operator-side product: {rep['operator_product']}",
        f"every point on a multiple of {cert.value_group_order} lines: {rep['multiplicities_divisible']}",
        f"contradiction: {rep['contradiction']} ({rep['proof_strength']})",
    ]
    if rep["phase_mismatches"]:
        lines.append(f"lines with unexpected phase: {rep['phase_mismatches']}")
    _emit(rep, args.json, lines)
    return EXIT_OK if v.ok else EXIT_FAIL


def _add_state_flags(sp):
    sp.add_argument("--preset")
    sp.add_argument("--state", help="vector literal such as '(0,1,-w6,w6-1)' or a JSON file")
    sp.add_argument("--dim", type=int)
    sp.add_argument("--factors", help="qudit factors, e.g. 2,2,3")
    sp.add_argument("--convention", choices=("ket", "row"))
    sp.add_argument("--conductor", type=int)


def _add_common(sp):
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magicpovm", description="Exact IC-POVMs from permutation magic states.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="POVM, Gram rank, trace and angle spectra")
    _add_state_flags(a)
    _add_common(a)
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("geometry", help="k-tuple trace geometry")
    _add_state_flags(g)
    _add_common(g)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--trace", required=True, help="exact value, e.g. -1/27")
    g.add_argument("--signed", action="store_true", help="accept the negated trace too")
    g.add_argument("--phases", choices=("pm1", "omega3", "any", "none"))
    g.add_argument("--spectra", action="store_true")
    g.add_argument("--cliques", action="store_true")
    g.add_argument("--petersen", action="store_true")
    g.add_argument("--ks", action="store_true", help="build and verify a certificate from the blocks")
    g.add_argument("--export-dot", metavar="PREFIX")
    g.add_argument("--export-edges", metavar="PREFIX")
    g.set_defaults(func=cmd_geometry)

    s = sub.add_parser("search", help="magic groups and their IC magic states")
    _add_common(s)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--factors")
    s.add_argument("--convention", choices=("ket", "row"))
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--order-cap", type=int, default=5000)
    s.add_argument("--combo-depth", type=int, default=0, choices=(0, 1))
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--max-groups", type=int, default=20)
    s.set_defaults(func=cmd_search)

    t = sub.add_parser("table1", help="run every preset against the catalog")
    _add_common(t)
    t.add_argument("--only", help="comma-separated preset names")
    t.set_defaults(func=cmd_table1)

    k = sub.add_parser("ks", help="Kochen-Specker certificates")
    ksub = k.add_subparsers(dest="ks_command", required=True)
    kv = ksub.add_parser("verify")
    kv.add_argument("file", nargs="?")
    kv.add_argument("--preset")
    _add_common(kv)
    kv.set_defaults(func=cmd_ks)

    sub.add_parser("presets", help="list catalog presets").set_defaults(func=cmd_presets, json=False)
    return parser


def cmd_presets(args) -> int:
    for name, p in load_presets().items():
        f = p.raw["fiducial"]
        print(f"{name:<15} factors {p.raw['factors']}  {f.get('vector', 'projector form')}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
