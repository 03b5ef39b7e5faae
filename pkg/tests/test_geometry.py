import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from magicpovm.cyclo import Cyclotomic
from magicpovm.geometry import (
    HESSE_LINES,
    PAPPUS_LINES,
    IncidenceStructure,
    SimpleGraph,
    filter_blocks,
    find_blocks,
    is_hesse,
    is_mermin_grid,
    is_pappus,
    is_pasch,
    named_detections,
    spectrum_report,
    tuple_traces,
)
from magicpovm.pauli import cosets, product_phase_turns


def to_nx(g: SimpleGraph):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def from_nx(h):
    h = nx.convert_node_labels_to_integers(h)
    return SimpleGraph(h.number_of_nodes(), h.edges())


def relabel(lines, n, seed):
    perm = list(range(n))
    random.Random(seed).shuffle(perm)
    out = [sorted(perm[x] for x in ln) for ln in lines]
    random.Random(seed + 1).shuffle(out)
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 14), st.floats(0.1, 0.9), st.integers(0, 10**6))
def test_maximal_cliques_match_networkx(n, density, seed):
    h = nx.gnp_random_graph(n, density, seed=seed)
    g = from_nx(h)
    ours = sorted(sorted(c) for c in g.maximal_cliques())
    ref = sorted(sorted(c) for c in nx.find_cliques(h))
    assert ours == ref


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 20), st.floats(0.0, 0.4), st.integers(0, 10**6))
def test_components_match_networkx(n, density, seed):
    h = nx.gnp_random_graph(n, density, seed=seed)
    ours = sorted(sorted(c) for c in from_nx(h).component_sets())
    ref = sorted(sorted(c) for c in nx.connected_components(h))
    assert ours == ref


def test_petersen_recognition():
    assert from_nx(nx.petersen_graph()).is_petersen()
    # same degree sequence, different spectrum
    assert not from_nx(nx.circulant_graph(10, [1, 5])).is_petersen()
    assert not from_nx(nx.complete_graph(4)).is_petersen()
    h = nx.relabel_nodes(nx.petersen_graph(), dict(zip(range(10), random.Random(2).sample(range(10), 10))))
    assert from_nx(h).is_petersen()


def test_spectrum_report_flags_inconsistent_claim():
    g = from_nx(nx.petersen_graph())
    rep = spectrum_report(g, {3: 1, 1: 6, -2: 4})
    assert rep["computed"] == {"3": 1, "1": 5, "-2": 4}
    assert rep["claimed_multiplicity_sum"] == 11
    assert rep["claim_consistent_with_size"] is False
    assert rep["claim_matches"] is False


def test_hesse_and_pappus_tables():
    h = IncidenceStructure(HESSE_LINES)
    assert h.config_type() == (9, 4, 12, 3)
    assert is_hesse(h)
    p = IncidenceStructure(PAPPUS_LINES)
    assert p.config_type() == (9, 3, 9, 3)
    assert is_pappus(p)
    assert not is_hesse(p)
    for seed in range(5):
        assert is_hesse(IncidenceStructure(relabel(HESSE_LINES, 9, seed)))
        assert is_pappus(IncidenceStructure(relabel(PAPPUS_LINES, 9, seed)))


def test_pappus_rejects_other_93():
    # the cyclic (9_3) configuration is not Pappus
    cyclic = [sorted({i, (i + 1) % 9, (i + 3) % 9}) for i in range(9)]
    s = IncidenceStructure(cyclic)
    assert s.config_type() == (9, 3, 9, 3)
    assert not is_pappus(s)


def test_pasch_and_mermin():
    pasch = [[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]]
    assert is_pasch(IncidenceStructure(pasch))
    assert not is_pasch(IncidenceStructure([[0, 1, 2], [0, 3, 4], [1, 3, 5], [6, 7, 8]]))
    grid = [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8]]
    assert is_mermin_grid(IncidenceStructure(grid))
    assert "Mermin square" in named_detections(IncidenceStructure(grid))


def test_graph_constructions():
    s = IncidenceStructure([[0, 1, 2], [2, 3, 4], [4, 5, 0]])
    assert s.collinearity_graph().degrees() == [4, 2, 4, 2, 4, 2]
    assert len(s.line_graph().edges) == 3
    inc = s.incidence_graph()
    assert inc.n == 9 and len(inc.edges) == 9
    assert len(s.components()) == 1


def test_exports_are_deterministic():
    g = from_nx(nx.petersen_graph())
    assert g.to_dot("P") == g.to_dot("P")
    assert g.to_dot("P").startswith("graph P")
    assert len(g.to_edge_list().strip().splitlines()) == 15


def matrix_trace(p, idx):
    # independent route: product of explicit projector matrices
    M = p.projector(idx[0])
    for i in idx[1:]:
        M = M @ p.projector(i)
    return M.trace()


def test_shortcut_equals_matrix_product_k4(povm_of):
    p = povm_of("mermin")
    blocks = tuple_traces(p, 4, None, prescreen=False)
    for b in blocks[::97]:
        assert b.trace in (matrix_trace(p, b.arrangement), matrix_trace(p, b.arrangement).conjugate())


def test_prescreen_and_threads_do_not_change_results(povm_of):
    p = povm_of("hesse-plus")
    t = [Cyclotomic.rational(x) for x in ("1/8", "-1/8")]
    a = tuple_traces(p, 3, t, threads=1, prescreen=True)
    b = tuple_traces(p, 3, t, threads=4, prescreen=False)
    assert [(x.indices, x.trace) for x in a] == [(x.indices, x.trace) for x in b]
    assert len(a) == 12


def test_hesse_geometry(povm_of):
    p = povm_of("hesse-minus")
    blocks = find_blocks(p, 3, Cyclotomic.rational(-1) / 8)
    s = IncidenceStructure(blocks, p.labels())
    assert len(blocks) == 12 and is_hesse(s)
    assert find_blocks(p, 3, Cyclotomic.rational(1) / 8) == []


def test_phase_witnesses_are_correct(povm_of):
    p = povm_of("mermin")
    ops = cosets(p.spec, phased=True)
    blocks = find_blocks(p, 3, Cyclotomic.rational(1) / 27, phases="pm1", signed=True)
    assert len(blocks) == 6
    for b in blocks:
        t = product_phase_turns([ops[i] for i in b.order])
        assert t == b.op_phase and t in (0, 0.5)
    unfiltered = find_blocks(p, 3, Cyclotomic.rational(1) / 27, signed=True)
    assert len(unfiltered) > len(blocks)
    again = filter_blocks(unfiltered, Cyclotomic.rational(1) / 27, povm=p, phases="pm1", signed=True)
    assert [b.indices for b in again] == [b.indices for b in blocks]


def test_k_must_be_3_or_4(povm_of):
    with pytest.raises(ValueError):
        tuple_traces(povm_of("T-qubit"), 5)
