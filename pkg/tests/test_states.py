import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohfreeze.errors import NotDensityMatrix, NotPSD
from cohfreeze.linalg import herm_eigenvalues
from cohfreeze.measures import c_l1
from cohfreeze.states import (
    StateTag,
    bell_admissible,
    bell_diagonal,
    classify,
    in_omega,
    in_omega_x,
    maximally_coherent,
    random_in_omega,
    random_state,
    random_x_state,
    state_from_dict,
    state_to_dict,
    support_connected,
    support_set,
    validate_density_matrix,
)


def qubit(p, r):
    return np.array([[p, r], [np.conj(r), 1 - p]], dtype=complex)


def qutrit_x(a=0.4, b=0.2, r=0.3):
    return np.array([[a, 0, r], [0, b, 0], [r, 0, 1 - a - b]], dtype=complex)


def test_support_incoherent():
    assert support_set(np.diag([1.0, 0.0])) == frozenset()


def test_support_qubit():
    assert support_set(qubit(0.5, 0.3)) == {(1, 2), (2, 1)}


def test_support_qutrit_x():
    assert support_set(qutrit_x()) == {(1, 3), (3, 1)}


def test_classify_qubit_omega():
    cls = classify(qubit(0.6, 0.4))
    assert cls.in_omega and cls.in_omega_x
    assert not cls.incoherent


def test_classify_qubit_without_population_not_x():
    rho = np.array([[1.0, 0], [0, 0]])
    assert classify(rho).tags == {StateTag.INCOHERENT}


def test_classify_qutrit_x_not_omega():
    cls = classify(qutrit_x())
    assert cls.in_omega_x and not cls.in_omega


def test_classify_full_qutrit_omega():
    rho = np.full((3, 3), 0.1) + np.diag([0.2, 0.2, 0.2])
    rho /= np.trace(rho)
    assert classify(rho).in_omega


def test_classify_other_coherent():
    rho = np.array([[0.3, 0.1, 0], [0.1, 0.3, 0], [0, 0, 0.4]])
    cls = classify(rho)
    assert cls.tags == {StateTag.OTHER_COHERENT}
    assert "[3]" in cls.detail


def test_omega_needs_neighbour():
    # a perfect matching {1,2},{3,4} covers every index but no pair has a witness
    rho = np.diag([0.25] * 4).astype(complex)
    rho[0, 1] = rho[1, 0] = 0.1
    rho[2, 3] = rho[3, 2] = 0.1
    assert not in_omega(rho)
    rho[1, 2] = rho[2, 1] = 0.05
    assert in_omega(rho)


def test_omega_and_incoherent_exclusive(rng):
    for d in range(2, 7):
        cls = classify(random_state(d, rng))
        assert not (cls.in_omega and cls.incoherent)


def test_support_connected_two_triangles():
    rho = np.zeros((6, 6))
    rho[:3, :3] = rho[3:, 3:] = 0.05
    np.fill_diagonal(rho, 1 / 6)
    assert in_omega(rho)
    assert not support_connected(rho)


def test_bell_diagonal_origin():
    rho = bell_diagonal(0, 0, 0)
    assert np.allclose(rho, np.eye(4) / 4)
    assert classify(rho).incoherent


def test_bell_diagonal_example():
    rho = bell_diagonal(0.6, -0.3, 0.5)
    assert np.allclose(sorted(herm_eigenvalues(rho)), sorted([0.05, 0.15, 0.6, 0.2]), atol=1e-12)
    assert abs(c_l1(rho) - 0.6) <= 1e-12


def test_bell_diagonal_matches_pauli_sum():
    s = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    c = (0.3, -0.2, 0.1)
    ref = (np.eye(4) + sum(cj * np.kron(sj, sj) for cj, sj in zip(c, s))) / 4
    assert np.allclose(bell_diagonal(*c), ref)


def test_bell_diagonal_boundary():
    w = herm_eigenvalues(bell_diagonal(1, -1, 1))
    assert abs(w[0] - 1) <= 1e-12 and np.all(np.abs(w[1:]) <= 1e-12)


def test_bell_diagonal_rejects_inadmissible():
    assert not bell_admissible(1, 1, 1)
    with pytest.raises(NotPSD):
        bell_diagonal(1, 1, 1)


def test_maximally_coherent():
    rho = maximally_coherent(4)
    assert abs(c_l1(rho) - 3) <= 1e-12
    validate_density_matrix(rho)


def test_random_qubit_coherent():
    for seed in range(20):
        assert abs(random_state(2, seed)[0, 1]) > 0


def test_random_state_deterministic():
    assert np.array_equal(random_state(4, 11), random_state(4, 11))
    assert not np.array_equal(random_state(4, 11), random_state(4, 12))


def test_random_x_state_classifies():
    for seed in range(10):
        assert classify(random_x_state(5, seed)).in_omega_x


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_random_states_are_valid(d, seed):
    for rho in (random_state(d, seed), random_x_state(d, seed)):
        validate_density_matrix(rho)
    if d >= 3:
        assert in_omega(random_in_omega(d, seed))
    assert in_omega_x(random_x_state(d, seed))


@pytest.mark.parametrize(
    "bad",
    [
        np.array([[0.5, 0.1], [0.2, 0.5]]),  # not Hermitian
        np.diag([0.6, 0.6]),  # trace
        np.array([[0.5, 0.6], [0.6, 0.5]]),  # negative eigenvalue
        np.ones((2, 3)) / 3,  # not square
    ],
)
def test_validate_rejects(bad):
    with pytest.raises(NotDensityMatrix):
        validate_density_matrix(bad)


def test_state_json_round_trip(rng):
    rho = random_state(3, rng)
    text = json.dumps(state_to_dict(rho))
    assert np.array_equal(state_from_dict(json.loads(text)), rho)


def test_state_from_dict_wrong_length():
    with pytest.raises(NotDensityMatrix):
        state_from_dict({"dim": 2, "entries": [[1, 0]] * 3})


def test_state_from_dict_missing_key():
    with pytest.raises(NotDensityMatrix):
        state_from_dict({"entries": []})
