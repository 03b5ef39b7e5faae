import random

import pytest
from sympy.combinatorics import Permutation, PermutationGroup

from magicpovm.catalog import load_presets
from magicpovm.linalg import ExactVector
from magicpovm.pauli import PauliSpec, default_spec
from magicpovm.permmagic import (
    GroupTooLarge,
    PermGate,
    candidate_states,
    eigenstates,
    generate_group,
    is_magic_gate,
    is_stabilizer_state,
    magic_gates,
    parse_perm,
    projective_key,
    random_magic_gate,
    search_magic_groups,
    stabilizer_count,
)


def sympy_order(gens, d):
    return PermutationGroup([Permutation(list(g.image), size=d) for g in gens]).order()


def test_parse_cycle_and_one_line():
    g = parse_perm("(1,2,3)", 4)
    assert g.image == (1, 2, 0, 3)
    assert g.fixed_points() == [3]
    assert is_magic_gate(g)
    assert parse_perm("(1 2 3)(4)", 4) == g
    assert parse_perm("(2,3,1,4)", 4) == g  # one-line notation
    assert g.cycle_string() == "(1,2,3)"
    assert parse_perm(g.cycle_string(), 4) == g


@pytest.mark.parametrize("bad", ["(1,2,2)", "(0,1)", "(1,9)", "(1,2", "1,1,2,3"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_perm(bad, 4)


def test_composition_matches_matrices():
    rng = random.Random(3)
    for _ in range(20):
        a, b = random_magic_gate(6, rng), random_magic_gate(6, rng)
        assert (a @ b).matrix() == a.matrix() @ b.matrix()
        assert (a @ a.inverse()) == PermGate.identity(6)
        assert is_magic_gate(a)


def test_magic_gate_count():
    # permutations of d points with exactly one fixed point: d * derangements(d-1)
    assert len(magic_gates(4)) == 4 * 2
    assert len(magic_gates(5)) == 5 * 9


@pytest.mark.parametrize("name", ["mermin", "d5-equi-a", "d6", "d7", "d9"])
def test_preset_groups_match_sympy(name):
    preset = load_presets()[name]
    G = preset.group()
    assert G.order == sympy_order(G.generators, G.degree)
    assert G.order == preset.raw["expected"]["group_order"]["value"]


@pytest.mark.parametrize("name", ["mermin", "d5-equi-a", "d7", "d9"])
def test_preset_state_is_a_group_eigenvector(name):
    preset = load_presets()[name]
    G = preset.group()
    keys = {projective_key(c.vector) for c in candidate_states(G, 0, preset.spec)}
    assert projective_key(preset.fiducial().vector) in keys


def test_eigenstates_are_eigenvectors():
    g = parse_perm("(1,2,3)(4,5)", 6)
    total = 0
    for lam, basis in eigenstates(g):
        for v in basis:
            w = g.apply(v)
            assert all(a == lam * b for a, b in zip(w.entries, v.entries))
            total += 1
    assert total == 6


def test_group_cap_and_relaxed():
    a, b = parse_perm("(1,2)", 5), parse_perm("(1,2,3,4,5)", 5)
    with pytest.raises(GroupTooLarge):
        generate_group(a, b, cap=50, relaxed=True)
    assert generate_group(a, b, relaxed=True).order == 120
    with pytest.warns(UserWarning):
        generate_group(a, b)


def test_stabilizer_counts():
    spec = PauliSpec((3,))
    assert stabilizer_count(ExactVector([1, 0, 0]), spec) == 3
    assert is_stabilizer_state(ExactVector([1, 1, 1]), spec)
    assert not is_stabilizer_state(ExactVector([0, 1, -1]), spec)
    assert is_stabilizer_state(ExactVector([1, 0, 0, 0]), default_spec(4))


def test_candidates_exclude_stabilizer_states():
    G = generate_group(parse_perm("(2,4,3)", 4), parse_perm("(1,2,3)", 4))
    cands = candidate_states(G, 0)
    assert cands
    assert not any(is_stabilizer_state(c, default_spec(4)) for c in cands)
    assert len({projective_key(c.vector) for c in cands}) == len(cands)


def test_search_is_seeded():
    a = [g.fingerprint for g in search_magic_groups(5, samples=30, seed=7)]
    b = [g.fingerprint for g in search_magic_groups(5, samples=30, seed=7)]
    assert a == b
    ex = search_magic_groups(4, exhaustive=True)
    assert max(g.order for g in ex) == 12
