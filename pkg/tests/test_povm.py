import random
from fractions import Fraction

import numpy as np
import pytest

from magicpovm.cyclo import format_cyclo, parse_cyclo, root_of_unity
from magicpovm.linalg import ExactMatrix, ExactVector
from magicpovm.pauli import PauliSpec
from magicpovm.povm import Fiducial, Povm, born, exact_root, format_vector, parse_vector, reconstruct


def float_pair_traces(p: Povm):
    # independent float route: explicit projectors from numpy vectors
    V = [np.array(v.to_complex()) for v in p.vectors]
    P = [np.outer(v, v.conj()) / np.vdot(v, v).real for v in V]
    return np.array([[np.trace(a @ b).real for b in P] for a in P])


def test_vector_literal_roundtrip():
    v = parse_vector("(0, 1, -w6, w6 - 1)")
    assert len(v) == 4
    assert parse_vector(format_vector(v)) == v
    assert parse_vector("(1, i)").entries[1] == root_of_unity(4, 1)
    with pytest.raises((ValueError, SyntaxError)):
        parse_vector("(1, 2")


def test_exact_root():
    assert exact_root(Fraction(1, 16), 2) == Fraction(1, 4)
    assert exact_root(Fraction(27, 8), 3) == Fraction(3, 2)
    assert exact_root(Fraction(2), 2) is None
    assert exact_root(Fraction(3 ** 40, 7 ** 20), 20) == Fraction(9, 7)
    assert exact_root(Fraction(-1), 3) is None


def test_qubit_t_state(povm_of):
    p = povm_of("T-qubit")
    assert p.is_povm and p.rank == 4 and p.classification == "SIC"
    for i in range(4):
        for j in range(4):
            assert p.pair_trace(i, j) == (1 if i == j else Fraction(1, 3))
    assert np.allclose(float_pair_traces(p), [[1 if i == j else 1 / 3 for j in range(4)] for i in range(4)])


def test_qubit_h_state_is_not_ic(povm_of):
    p = povm_of("H-qubit")
    assert p.is_povm
    assert p.rank == 3
    assert p.classification == "not_ic"


@pytest.mark.parametrize("name", ["hesse-minus", "mermin", "d5-equi-a", "d5-dich", "d6"])
def test_pair_traces_match_float(name, povm_of):
    p = povm_of(name)
    F = float_pair_traces(p)
    for i in range(len(p)):
        for j in range(len(p)):
            assert abs(float(p.pair_trace(i, j)) - F[i, j]) < 1e-10


def test_projector_form_matches_vector_form():
    v = parse_vector("(1, 1 + i)")
    spec = PauliSpec((2,))
    a = Povm(Fiducial(v, spec))
    b = Povm(Fiducial.from_projector(Fiducial(v, spec).projector, spec))
    assert [x.value for x in a.pair_spectrum] == [x.value for x in b.pair_spectrum]


def test_from_projector_rejects():
    spec = PauliSpec((2,))
    with pytest.raises(ValueError):
        Fiducial.from_projector(ExactMatrix.identity(2), spec)
    with pytest.raises(ValueError):
        Fiducial.from_projector(ExactMatrix([[1, 1], [0, 0]]), spec)


def test_fiducial_rejects():
    with pytest.raises(ValueError):
        Fiducial(ExactVector([0, 0, 0]), PauliSpec((3,)))
    with pytest.raises(ValueError):
        Fiducial(ExactVector([1, 0]), PauliSpec((3,)))


def test_conductor_choice(povm_of):
    v = parse_vector("(0, 1, -1)")
    spec = PauliSpec((3,))
    assert Povm(Fiducial(v, spec)).conductor == 3
    p = Povm(Fiducial(v, spec), conductor=12)
    assert p.conductor == 12 and p.classification == "SIC"
    with pytest.raises(ValueError):
        Povm(Fiducial(v, spec), conductor=4)


def test_equiangular_by_norm_d5(povm_of):
    p = povm_of("d5-equi-a")
    assert p.classification == "equiangular_by_norm"
    assert [a.angle_sq_exact for a in p.angle_spectrum] == [Fraction(1, 16)]
    assert len(p.pair_spectrum) == 3
    r, ang = p.hermitian_angle(0, 1)
    assert abs(ang - 0.25) < 1e-12


def test_dichotomic_d5(povm_of):
    p = povm_of("d5-dich")
    assert p.classification == "dichotomic"
    assert {a.angle_sq_exact for a in p.angle_spectrum} == {Fraction(9, 16), Fraction(1, 16)}


def test_basis_state_is_not_ic():
    p = Povm(Fiducial(parse_vector("(1, 0, 0)"), PauliSpec((3,))))
    assert p.is_povm  # every fiducial gives a POVM under the full Weyl orbit
    assert p.rank == 3 and p.classification == "not_ic"


def random_density(rng, d, n):
    # rho = A A^dagger / tr with A over Z[zeta_n]
    A = ExactMatrix([[sum((rng.randint(-2, 2) * root_of_unity(n, k) for k in range(2)), parse_cyclo("0"))
                      for _ in range(d)] for _ in range(d)])
    M = A @ A.adjoint()
    t = M.trace()
    if not t:
        return random_density(rng, d, n)
    return M.scale(t.inverse())


@pytest.mark.parametrize("name", ["T-qubit", "hesse-minus"])
def test_reconstruction_roundtrip(name, povm_of):
    p = povm_of(name)
    rng = random.Random(5)
    for _ in range(5):
        rho = random_density(rng, p.d, 4)
        probs = born(rho, p)
        assert sum(probs, parse_cyclo("0")) == 1
        assert reconstruct(p, probs) == rho


def test_reconstruct_rejects(povm_of):
    with pytest.raises(ValueError):
        reconstruct(povm_of("mermin"), [Fraction(1, 16)] * 16)
    p = povm_of("T-qubit")
    with pytest.raises(ValueError):
        reconstruct(p, [Fraction(1, 4)] * 3)
    with pytest.raises(ValueError):
        reconstruct(p, [Fraction(1, 2)] * 4)


@pytest.mark.parametrize("name", ["hesse-minus", "mermin", "d5-equi-a"])
def test_covariance_of_pair_spectrum(name, povm_of):
    p = povm_of(name)
    base = [(x.value, x.multiplicity) for x in p.pair_spectrum]
    for k in (1, len(p) // 2, len(p) - 1):
        q = Povm(Fiducial(p.vectors[k], p.spec))
        assert [(x.value, x.multiplicity) for x in q.pair_spectrum] == base
        # every row of the pair-trace table carries the same multiset
        row = sorted(format_cyclo(p.pair_trace(k, j)) for j in range(len(p)))
        assert row == sorted(format_cyclo(p.pair_trace(0, j)) for j in range(len(p)))


def test_report_is_json_stable(povm_of):
    import json
    a = json.dumps(povm_of("mermin").report(), sort_keys=True)
    b = json.dumps(Povm(povm_of("mermin").fiducial).report(), sort_keys=True)
    assert a == b
