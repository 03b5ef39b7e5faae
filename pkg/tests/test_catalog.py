import json

import pytest

from magicpovm.catalog import _data, evaluate, load_presets
from magicpovm.cyclo import parse_cyclo
from magicpovm.pauli import PauliSpec

# heavy presets are exercised by the acceptance suite
FAST = ["T-qubit", "H-qubit", "hesse-minus", "hesse-plus", "mermin", "d4-0111", "d5-equi-a", "d5-equi-b",
        "d5-dich", "d5-s5", "d6", "d9"]


def test_catalog_schema():
    raw = json.loads(_data("presets.json"))
    names = [p["name"] for p in raw["presets"]]
    assert len(names) == len(set(names))
    for p in raw["presets"]:
        PauliSpec(tuple(p["factors"]), p.get("convention", "ket"))
        entries = list(p.get("expected", {}).values())
        for task in p.get("geometry", []):
            parse_cyclo(task["trace"])
            entries += list(task.get("expect", {}).values())
        entries += list(p.get("ks_expect", {}).values())
        for e in entries:
            assert set(e) == {"value", "basis"}
            assert e["basis"] in ("published", "computed")
        for c in p.get("claims", []):
            assert {"key", "claimed"} <= set(c)


def test_every_fast_preset_is_listed():
    assert set(FAST) <= set(load_presets())


@pytest.mark.parametrize("name", FAST)
def test_preset_passes(name):
    r = evaluate(load_presets()[name], threads=2)
    failed = [c for c in r["checks"] if not c["pass"]]
    assert r["passed"], failed


def test_flagged_claims():
    presets = load_presets()
    flagged = {name: [c["key"] for c in evaluate(presets[name])["claims"] if not c["agrees"]]
               for name in ("H-qubit", "hesse-minus", "d5-dich", "d6")}
    assert flagged == {
        "H-qubit": ["classification"],
        "hesse-minus": ["blocks"],
        "d5-dich": ["angle_sq"],
        "d6": ["component_labels"],
    }
