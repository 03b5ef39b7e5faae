import random
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from magicpovm.cyclo import euler_phi, make_cyclotomic, root_of_unity
from magicpovm.linalg import ExactMatrix, ExactVector, exact_rank, inner, integer_rank, integer_spectrum, kron


def regular_rep(a: ExactMatrix, n: int) -> sympy.Matrix:
    # each entry becomes the rational matrix of multiplication on the power basis
    k = euler_phi(n)
    R, C = a.shape
    out = sympy.zeros(R * k, C * k)
    for r in range(R):
        for c in range(C):
            x = a.data[r][c]
            for j in range(k):
                y = (x * root_of_unity(n, j)).canonical().embed(n)
                for i, v in enumerate(y.num):
                    out[r * k + i, c * k + j] = sympy.Rational(v, y.den)
    return out


def random_cyclo_matrix(rng, rows, cols, n, rank):
    def entry():
        return make_cyclotomic(n, [rng.randint(-3, 3) for _ in range(euler_phi(n))])
    A = ExactMatrix([[entry() for _ in range(rank)] for _ in range(rows)])
    B = ExactMatrix([[entry() for _ in range(cols)] for _ in range(rank)])
    return A @ B


@pytest.mark.parametrize("n", [3, 4, 5, 8, 12])
def test_rank_matches_rational_regular_representation(n):
    rng = random.Random(n)
    for rows, cols, r in [(4, 4, 2), (5, 3, 3), (4, 6, 1), (3, 3, 3)]:
        M = random_cyclo_matrix(rng, rows, cols, n, r)
        expected = regular_rep(M, n).rank() // euler_phi(n)
        assert exact_rank(M) == expected


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=5, max_size=5), min_size=1, max_size=6))
def test_integer_rank_matches_sympy(rows):
    assert integer_rank(rows) == sympy.Matrix(rows).rank()


def test_rational_matrix_rank_with_fractions():
    M = ExactMatrix([[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), 1]])
    assert exact_rank(M) == 1
    assert exact_rank(ExactMatrix.identity(5)) == 5
    assert exact_rank(ExactMatrix.zeros(3, 4)) == 0


def test_matrix_ops():
    i = root_of_unity(4, 1)
    A = ExactMatrix([[1, i], [0, 2]])
    assert (A @ ExactMatrix.identity(2)) == A
    assert A.adjoint().data[0][1] == 0 and A.adjoint().data[1][0] == -i
    assert A.trace() == 3
    assert kron(A, ExactMatrix.identity(2)).shape == (4, 4)
    assert ExactMatrix.identity(3, 2).scalar_multiple_of_identity() == 2
    assert A.scalar_multiple_of_identity() is None
    u = ExactVector([1, i])
    assert inner(u, u) == 2
    assert ExactMatrix.outer(u, u).is_hermitian()


def test_bad_shapes():
    with pytest.raises(ValueError):
        ExactMatrix([[1, 2], [3]])
    with pytest.raises(ValueError):
        integer_spectrum([[0, 1], [0, 0]], [0])


def graphs():
    yield nx.petersen_graph()
    yield nx.complete_graph(6)
    yield nx.cycle_graph(6)
    yield nx.hypercube_graph(3)
    yield nx.complete_bipartite_graph(3, 4)
    yield nx.path_graph(5)


@pytest.mark.parametrize("g", list(graphs()), ids=lambda g: f"n{g.number_of_nodes()}m{g.number_of_edges()}")
def test_integer_spectrum_matches_numpy(g):
    A = nx.to_numpy_array(g, dtype=int)
    ev = np.linalg.eigvalsh(A)
    rep = integer_spectrum(A.tolist(), range(-10, 11))
    ints = {}
    for x in ev:
        if abs(x - round(x)) < 1e-8:
            ints[int(round(x))] = ints.get(int(round(x)), 0) + 1
    assert rep["multiplicities"] == ints
    assert rep["residual"] == len(ev) - sum(ints.values())


def test_petersen_spectrum():
    rep = integer_spectrum(nx.to_numpy_array(nx.petersen_graph(), dtype=int).tolist(), [3, 1, -2, 0, 2])
    assert rep["multiplicities"] == {3: 1, 1: 5, -2: 4}
