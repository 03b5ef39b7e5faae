import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from magicpovm.cyclo import root_of_unity
from magicpovm.linalg import ExactMatrix
from magicpovm.pauli import (
    PauliSpec,
    WeylOperator,
    cosets,
    default_spec,
    parse_label,
    product_phase,
    shift_clock,
    weyl,
)


def test_default_factorisations():
    assert default_spec(4).factors == (2, 2)
    assert default_spec(6).factors == (6,)
    assert default_spec(12).factors == (2, 2, 3)
    assert default_spec(5).factors == (5,)
    assert default_spec(10).factors == (2, 5)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("convention", ["ket", "row"])
def test_shift_clock_relation(d, convention):
    X, Z = shift_clock(d, convention)
    w = root_of_unity(d, 1)
    # ket: Z X = w X Z ; row shifts the other way
    lhs, rhs = Z @ X, (X @ Z).scale(w if convention == "ket" else w.conjugate())
    assert lhs == rhs
    target = 1 if convention == "ket" else d - 1
    assert X.data[target][0] == 1


def test_qubit_cosets_and_y():
    spec = PauliSpec((2,))
    labels = [op.label() for op in cosets(spec)]
    assert labels == ["I", "X", "Z", "[z4] ZX"]
    Y = cosets(spec)[3].matrix()
    i = root_of_unity(4, 1)
    # i^(jm) Z^m X^j with (m, j) = (1, 1) gives i ZX = -Y
    assert Y == ExactMatrix([[0, i], [-i, 0]])
    assert Y.is_hermitian()
    assert Y @ Y == ExactMatrix.identity(2)


@pytest.mark.parametrize("factors", [(2,), (3,), (5,), (2, 2), (2, 3), (3, 3)])
def test_phased_operators_have_factor_order(factors):
    # the symmetric phase makes T^f = I for odd f and qubits
    spec = PauliSpec(factors)
    for op in cosets(spec):
        M = op.matrix()
        P = ExactMatrix.identity(spec.d)
        for _ in range(max(factors) * 2 if 2 in factors else max(factors)):
            P = P @ M
        assert P == ExactMatrix.identity(spec.d)


@pytest.mark.parametrize("factors", [(3,), (2, 2), (6,), (2, 3)])
def test_product_agrees_with_matrices(factors):
    spec = PauliSpec(factors)
    ops = cosets(spec)
    rng = random.Random(1)
    for _ in range(40):
        a, b = rng.choice(ops), rng.choice(ops)
        assert (a @ b).matrix() == a.matrix() @ b.matrix()
        assert a.adjoint().matrix() == a.matrix().adjoint()
        assert a.commutes_with(b) == (a.matrix() @ b.matrix() == b.matrix() @ a.matrix())


def test_cosets_are_orthogonal():
    spec = PauliSpec((2, 3))
    ops = cosets(spec, phased=False)
    assert len(ops) == 36
    for a, b in itertools.combinations(ops, 2):
        assert (a.matrix().adjoint() @ b.matrix()).trace() == 0


def test_even_factor_rejects_phase():
    with pytest.raises(ValueError):
        weyl(PauliSpec((6,)), [(1, 1)])
    assert weyl(PauliSpec((6,)), [(1, 1)], phased=False).phase == 0


def test_product_phase_examples():
    spec = PauliSpec((2,))
    X, Z = cosets(spec)[1], cosets(spec)[2]
    assert product_phase([X, X]) == 1
    assert product_phase([X, Z]) is None
    assert (X @ Z).label() == "[-1] ZX"
    q = PauliSpec((2, 2))
    ops = [parse_label(s, q) for s in ("X x X", "Z x Z", "[-1] ZX x ZX")]
    assert product_phase(ops) == -1


@pytest.mark.parametrize("factors", [(2,), (3,), (2, 2), (3, 3), (2, 2, 3), (7,)])
def test_label_roundtrip(factors):
    spec = PauliSpec(factors)
    for op in cosets(spec):
        assert parse_label(op.label(), spec) == op


def test_parse_label_words_and_errors():
    spec = PauliSpec((3,))
    assert parse_label("X X", spec) == parse_label("X2", spec)
    assert parse_label("(ZX)^3", spec).is_identity_class()
    for bad in ["Q", "X x X", "[z3 X"]:
        with pytest.raises((ValueError, SyntaxError)):
            parse_label(bad, spec)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_weyl_commutation_phase_d4(m1, j1, m2, j2):
    spec = PauliSpec((4,))
    a = WeylOperator(spec, ((m1, j1),))
    b = WeylOperator(spec, ((m2, j2),))
    # a b = w^(m1 j2 - m2 j1) b a in the ket convention
    w = root_of_unity(4, (m1 * j2 - m2 * j1) % 4)
    assert a.matrix() @ b.matrix() == (b.matrix() @ a.matrix()).scale(w)
