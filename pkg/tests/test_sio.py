import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohfreeze.errors import DimMismatch, EmptyKraus, NotComplete, NotGeneralizedPermutation, OutOfRange
from cohfreeze.generators import random_sio
from cohfreeze.linalg import Permutation, perm_matrix
from cohfreeze.sio import (
    SioChannel,
    SioKraus,
    apply,
    channel_from_dict,
    channel_to_dict,
    compose,
    identity_channel,
    local_bit_flip,
    qubit_freeze_channel,
    unitary_channel,
    validate_sio,
)
from cohfreeze.states import bell_diagonal, random_state, validate_density_matrix
from cohfreeze.xfreeze import pairing_permutation

X = np.array([[0, 1], [1, 0]])
I2 = np.eye(2)


def dense_apply(mats, rho):
    return sum(k @ rho @ k.conj().T for k in mats)


def test_identity_valid(rng):
    phi = validate_sio([np.eye(3)])
    rho = random_state(3, rng)
    assert np.allclose(apply(phi, rho), rho)


def test_hadamard_rejected():
    with pytest.raises(NotGeneralizedPermutation) as exc:
        validate_sio([np.array([[1, 1], [1, -1]]) / np.sqrt(2)])
    assert exc.value.name == "NotGeneralizedPermutation"


def test_incomplete_rejected():
    with pytest.raises(NotComplete):
        validate_sio([0.5 * np.eye(2)])


def test_empty_and_zero_rejected():
    with pytest.raises(EmptyKraus):
        validate_sio([])
    with pytest.raises(EmptyKraus):
        validate_sio([np.eye(2), np.zeros((2, 2))])


def test_shape_mismatch_rejected():
    with pytest.raises(DimMismatch):
        validate_sio([np.eye(2), np.eye(3)])


def test_qutrit_forms_valid():
    t1, t2 = 0.4, 1.3
    d11, d21 = np.sqrt(0.3), np.sqrt(0.7)
    d13, d23, d33, d43 = 0.5, 0.5, 0.5, 0.5
    paired = [
        np.array([[d11 * np.exp(1j * t1), 0, 0], [0, d11, 0], [0, 0, d13]]),
        np.array([[0, d21, 0], [d21 * np.exp(1j * t2), 0, 0], [0, 0, d23]]),
        np.array([[0, 0, d33], [0, 0, 0], [0, 0, 0]]),
        np.array([[0, 0, 0], [0, 0, d43], [0, 0, 0]]),
    ]
    p = perm_matrix(pairing_permutation(3))
    phi = validate_sio([p.T @ k @ p for k in paired])
    assert len(phi) == 4
    assert phi.completeness_residual() <= 1e-12


def test_swap_on_diagonal():
    phi = unitary_channel(Permutation((2, 1)), [0, 0])
    assert np.allclose(apply(phi, np.diag([0.7, 0.3])), np.diag([0.3, 0.7]))


def test_local_bit_flip_output_valid():
    sigma = apply(local_bit_flip(0.5), bell_diagonal(0.6, -0.3, 0.5))
    validate_density_matrix(sigma)


@pytest.mark.parametrize("variant", ["display", "standard"])
def test_local_bit_flip_zero_is_identity(variant):
    phi = local_bit_flip(0.0, variant)
    rho = bell_diagonal(0.6, -0.3, 0.5)
    assert len(phi) == 1
    assert np.allclose(apply(phi, rho), rho)


@pytest.mark.parametrize("variant", ["display", "standard"])
def test_local_bit_flip_full_strength_complete(variant):
    assert local_bit_flip(1.0, variant).completeness_residual() <= 1e-12


@pytest.mark.parametrize("variant", ["display", "standard"])
def test_local_bit_flip_dense_validates(variant):
    phi = local_bit_flip(0.5, variant)
    again = validate_sio(phi.matrices())
    assert len(again) == 4


def test_local_bit_flip_operators():
    q = 0.3
    s = np.sqrt(q / 2 * (1 - q / 2))
    display = [(1 - q / 2) * np.eye(4), s * np.kron(X, I2), s * np.kron(X, X), q / 2 * np.kron(I2, X)]
    standard = [(1 - q / 2) * np.eye(4), s * np.kron(I2, X), s * np.kron(X, I2), q / 2 * np.kron(X, X)]
    for variant, ref in (("display", display), ("standard", standard)):
        mats = local_bit_flip(q, variant).matrices()
        assert all(np.allclose(a, b) for a, b in zip(mats, ref))


def test_local_bit_flip_out_of_range():
    with pytest.raises(OutOfRange):
        local_bit_flip(1.5)


def test_qubit_freeze_channel_special_cases():
    rho = np.array([[0.6, 0.3 - 0.1j], [0.3 + 0.1j, 0.4]])
    bit_flip = [np.sqrt(0.5) * I2, np.sqrt(0.5) * X]
    bit_phase = [np.sqrt(0.5) * I2, np.sqrt(0.5) * np.array([[0, 1], [-1, 0]])]
    assert np.allclose(apply(qubit_freeze_channel(0.5, 0, 0), rho), dense_apply(bit_flip, rho))
    assert np.allclose(apply(qubit_freeze_channel(0.5, 0, np.pi), rho), dense_apply(bit_phase, rho))


def test_qubit_freeze_channel_validates():
    phi = qubit_freeze_channel(0.3, np.pi / 2, 5 * np.pi / 6)
    assert len(validate_sio(phi.matrices())) == 2
    with pytest.raises(OutOfRange):
        qubit_freeze_channel(1.0, 0, 0)


def test_kraus_zero_columns_completed():
    k = validate_sio([np.diag([1, 0]), np.array([[0, 0], [0, 1]])]).kraus[0]
    assert k.perm.map == (1, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_apply_matches_dense(d, seed):
    rng = np.random.default_rng(seed)
    phi = random_sio(d, rng)
    rho = random_state(d, rng)
    assert np.max(np.abs(apply(phi, rho) - dense_apply(phi.matrices(), rho))) <= 1e-12
    assert phi.completeness_residual() <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_compose_matches_sequential(d, seed):
    rng = np.random.default_rng(seed)
    phi, psi = random_sio(d, rng), random_sio(d, rng)
    rho = random_state(d, rng)
    assert np.allclose(apply(compose(phi, psi), rho), apply(phi, apply(psi, rho)), atol=1e-12)


def test_channel_json_round_trip(rng):
    phi = random_sio(4, rng)
    back = channel_from_dict(json.loads(json.dumps(channel_to_dict(phi))))
    assert all(np.allclose(a, b) for a, b in zip(phi.matrices(), back.matrices()))


def test_channel_from_dense_json():
    obj = {"dim": 2, "kraus_dense": [[[[0, 0], [1, 0]], [[1, 0], [0, 0]]]]}
    phi = channel_from_dict(obj)
    assert phi.kraus[0].perm.map == (2, 1)


def test_channel_from_dict_dim_mismatch():
    obj = channel_to_dict(identity_channel(3))
    obj["dim"] = 2
    with pytest.raises(DimMismatch):
        channel_from_dict(obj)


def test_apply_dim_mismatch():
    with pytest.raises(DimMismatch):
        apply(identity_channel(3), np.eye(2) / 2)


def test_kraus_coeffs_read_only():
    k = SioKraus(Permutation.identity(2), [1, 1])
    with pytest.raises(ValueError):
        k.coeffs[0] = 2


def test_channel_rejects_incomplete_parsed_form():
    with pytest.raises(NotComplete):
        SioChannel((SioKraus(Permutation.identity(2), [1, 0.5]),))
