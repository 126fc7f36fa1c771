import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohfreeze.errors import HypothesisNotMet, NotXState
from cohfreeze.generators import X_MODES, equal_block_x_state, random_block_channel
from cohfreeze.linalg import Permutation, perm_matrix
from cohfreeze.measures import c_l1, c_re
from cohfreeze.sio import SioChannel, SioKraus, apply, local_bit_flip, validate_sio
from cohfreeze.states import bell_admissible, bell_diagonal, in_omega, in_omega_x, random_state, random_x_state
from cohfreeze.xfreeze import (
    decompose_x,
    from_paired,
    kraus_from_paired,
    kraus_to_paired,
    omega_invariance_probe,
    pairing_permutation,
    parse_block_form,
    qutrit_form_channel,
    to_paired,
    x_state_from_blocks,
    x_structural_check,
)


def pair_preserving_unitary(d, rng):
    """Strictly incoherent unitary that permutes pairs and may swap inside them."""
    pi = pairing_permutation(d)
    nb = d // 2
    targets = rng.permutation(nb)
    images = []
    for m in targets:
        lo, hi = 2 * m, 2 * m + 1
        images += [hi, lo] if rng.random() < 0.5 else [lo, hi]
    if d % 2:
        images.append(d - 1)
    pk = SioKraus(Permutation.from_zero_based(images), np.exp(1j * rng.uniform(0, 2 * np.pi, d)))
    return SioChannel((kraus_from_paired(pk, pi),))


def test_pairing_d2():
    assert pairing_permutation(2).is_identity()


def test_pairing_d4():
    assert pairing_permutation(4).map == (1, 3, 4, 2)


def test_pairing_d5():
    assert pairing_permutation(5).map == (1, 3, 5, 4, 2)


@pytest.mark.parametrize("d", range(2, 10))
def test_pairing_block_diagonalizes(rng, d):
    paired = to_paired(random_x_state(d, rng))
    mask = np.zeros((d, d), dtype=bool)
    for m in range(d // 2):
        mask[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = True
    mask[d - 1, d - 1] = True
    assert np.all(paired[~mask] == 0)


def test_paired_round_trip(rng):
    m = random_state(5, rng)
    assert np.allclose(from_paired(to_paired(m)), m)


def test_decompose_qubit():
    rho = np.array([[0.6, 0.2j], [-0.2j, 0.4]])
    dec = decompose_x(rho)
    assert np.allclose(dec.lambdas, [1.0])
    assert np.allclose(dec.blocks[0], rho)
    assert dec.tail is None


def test_decompose_bell_diagonal():
    c1, c2, c3 = 0.6, -0.3, 0.5
    dec = decompose_x(bell_diagonal(c1, c2, c3))
    # pair {1,4} carries (1 + c3)/2 of the weight, pair {2,3} the rest
    assert np.allclose(dec.lambdas, [(1 + c3) / 2, (1 - c3) / 2])
    assert np.isclose(dec.blocks[0][0, 1], (c1 - c2) / (2 + 2 * c3))
    assert np.isclose(dec.blocks[1][0, 1], (c1 + c2) / (2 - 2 * c3))
    assert np.isclose(dec.lambdas[0] * dec.blocks[0][0, 1], (c1 - c2) / 4)


def test_decompose_d5_has_tail(rng):
    dec = decompose_x(random_x_state(5, rng))
    assert len(dec.blocks) == 2 and dec.tail is not None
    assert abs(dec.lambdas.sum() + dec.tail - 1) <= 1e-10


def test_decompose_rejects_non_x(rng):
    with pytest.raises(NotXState):
        decompose_x(random_state(4, rng))


@pytest.mark.parametrize("d", range(2, 10))
def test_reassembly(d):
    for seed in range(100):
        rho = random_x_state(d, seed)
        dec = decompose_x(rho)
        assert np.max(np.abs(dec.reassemble() - rho)) <= 1e-10
        assert np.max(np.abs(x_state_from_blocks(dec.lambdas, dec.blocks, dec.tail) - rho)) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_block_additivity(d, seed):
    rho = random_x_state(d, seed)
    dec = decompose_x(rho)
    assert abs(c_l1(rho) - sum(l * c_l1(b) for l, b in zip(dec.lambdas, dec.blocks))) <= 1e-12
    assert abs(c_re(rho) - sum(l * c_re(b) for l, b in zip(dec.lambdas, dec.blocks))) <= 1e-7


def test_bit_flip_block_forms():
    pi = pairing_permutation(4)
    forms = [parse_block_form(k, pi) for k in local_bit_flip(0.4).kraus]
    assert all(f is not None for f in forms)
    assert [f.pair_map for f in forms] == [(1, 2), (2, 1), (1, 2), (2, 1)]
    # K3 = s1 (x) s1 is blockdiag(s1, s1): exchanges inside both pairs
    assert forms[2].swaps == (True, True)


def test_bit_flip_paired_matrices():
    x = np.array([[0, 1], [1, 0]])
    z = np.zeros((2, 2))
    p = perm_matrix(pairing_permutation(4))
    i2 = np.eye(2)
    expected = {
        (2, 1): np.block([[z, x], [x, z]]),  # s1 (x) I
        (4, 3): np.block([[x, z], [z, x]]),  # s1 (x) s1
        (3, 4): np.block([[z, i2], [i2, z]]),  # I (x) s1
    }
    for perm_map, paired in [((3, 4, 1, 2), expected[(2, 1)]), ((4, 3, 2, 1), expected[(4, 3)]), ((2, 1, 4, 3), expected[(3, 4)])]:
        k = perm_matrix(Permutation(perm_map))
        assert np.allclose(p @ k @ p.T, paired)


def test_qutrit_forms_parse():
    phi = qutrit_form_channel(np.sqrt(0.3), np.sqrt(0.7), 0.5, 0.5, 0.5, 0.5, 0.2, 0.9)
    forms = [parse_block_form(k) for k in phi.kraus]
    assert all(f is not None for f in forms)
    assert [f.odd_kind for f in forms] == ["DiagonalTail", "DiagonalTail", "RankOne", "RankOne"]
    assert [f.tail.target for f in forms[2:]] == [1, 2]


def test_unequal_moduli_rejected():
    pk = SioKraus(Permutation.identity(4), [0.9, 0.5, 1, 1])
    assert parse_block_form(kraus_from_paired(pk, pairing_permutation(4))) is None


def test_non_pair_routing_rejected():
    # sends paired column 1 to row 1 and column 2 to row 3: breaks the pair
    pk = SioKraus(Permutation((1, 3, 2, 4)), np.ones(4))
    assert parse_block_form(kraus_from_paired(pk, pairing_permutation(4))) is None


@pytest.mark.parametrize("d", range(2, 9))
def test_block_form_round_trip(rng, d):
    for mode in ("random", "nonuniform", "unitary"):
        phi = random_block_channel(max(d, 2), rng, mode) if d >= 2 else None
        for k in phi.kraus:
            form = parse_block_form(k)
            if mode == "nonuniform" and form is None:
                continue
            assert np.max(np.abs(form.kraus().matrix() - k.matrix())) <= 1e-10


def test_kraus_paired_round_trip(rng):
    pi = pairing_permutation(5)
    k = SioKraus(Permutation.from_zero_based(rng.permutation(5)), rng.standard_normal(5))
    back = kraus_from_paired(kraus_to_paired(k, pi), pi)
    assert np.allclose(back.matrix(), k.matrix())
    p = perm_matrix(pi)
    assert np.allclose(kraus_to_paired(k, pi).matrix(), p @ k.matrix() @ p.T)


@pytest.mark.parametrize("variant", ["display", "standard"])
def test_bell_freezing_law(variant):
    grid = [k / 10 for k in range(-10, 11)]
    checked = 0
    for c1 in grid:
        for c3 in grid:
            c2 = -c1 * c3
            if not bell_admissible(c1, c2, c3):
                continue
            rho = bell_diagonal(c1, c2, c3)
            if not in_omega_x(rho):
                continue
            for q in [k / 10 for k in range(11)]:
                phi = local_bit_flip(q, variant)
                if not in_omega_x(apply(phi, rho)):
                    continue
                res = x_structural_check(phi, rho, "re")
                assert res.verdict and res.operational_frozen
                checked += 1
    assert checked > 100


def test_bell_off_law_decreases():
    rho = bell_diagonal(0.6, -0.2, 0.5)
    res = x_structural_check(local_bit_flip(0.5), rho, "re")
    assert not res.verdict
    assert res.c_after < res.c_before - 1e-7


def test_pair_preserving_unitary_d6(rng):
    rho = random_x_state(6, rng)
    phi = pair_preserving_unitary(6, rng)
    for m in ("l1", "re"):
        res = x_structural_check(phi, rho, m)
        assert res.verdict and res.operational_frozen


def test_other_unitary_leaves_x_states(rng):
    rho = random_x_state(6, rng)
    phi = SioChannel((SioKraus(Permutation((2, 1, 3, 4, 5, 6)), np.ones(6)),))
    with pytest.raises(HypothesisNotMet):
        x_structural_check(phi, rho, "l1")


@pytest.mark.parametrize("mode", X_MODES)
@pytest.mark.parametrize("measure", ["l1", "re"])
def test_structural_matches_operational(rng, mode, measure):
    for d in range(3, 9):
        rho = equal_block_x_state(d, rng) if mode == "equal_blocks" else random_x_state(d, rng)
        phi = random_block_channel(d, rng, mode, rho)
        if not in_omega_x(apply(phi, rho)):
            continue
        res = x_structural_check(phi, rho, measure)
        assert res.agrees


def test_per_source_reading_is_narrower(rng):
    # two routes into each target with independent phases: each source alone is
    # aligned, the aggregate is not
    rho = random_x_state(4, rng)
    pi = pairing_permutation(4)
    a = np.sqrt(0.5)
    k1 = SioKraus(Permutation((1, 2, 3, 4)), a * np.exp(1j * np.array([0.0, 0.0, 0.0, 0.0])))
    k2 = SioKraus(Permutation((3, 4, 1, 2)), a * np.exp(1j * np.array([1.0, 0.0, 2.0, 0.0])))
    phi = SioChannel((kraus_from_paired(k1, pi), kraus_from_paired(k2, pi)))
    narrow = x_structural_check(phi, rho, "l1", reading="per_source")
    wide = x_structural_check(phi, rho, "l1", strict=False)
    assert narrow.verdict and not narrow.operational_frozen
    assert not wide.verdict and wide.agrees


def test_probe_si_unitary_omega(rng):
    phi = pair_preserving_unitary(3, rng)
    rep = omega_invariance_probe(phi, samples=200, seed=1)
    assert rep.skipped == 0 and rep.retained == 400
    assert rep.omega_checked > 0 and rep.all_preserved


def test_probe_qutrit_forms_aligned():
    theta = 0.7
    states = []
    rng = np.random.default_rng(5)
    for _ in range(50):
        a = rng.uniform(0.2, 0.4)
        b = 1 - 2 * a
        r = rng.uniform(0.05, a) * np.exp(1j * theta)
        states.append(np.array([[a, 0, r], [0, b, 0], [np.conj(r), 0, a]]))
    phi = qutrit_form_channel(np.sqrt(0.3), np.sqrt(0.7), np.sqrt(0.5), np.sqrt(0.5), 0, 0, 0.3, -0.3 - 2 * theta)
    rep = omega_invariance_probe(phi, samples=0, states=states)
    assert rep.x_checked == 50 and rep.x_preserved == 50


def test_probe_dephasing_skips():
    phi = validate_sio([np.diag(e) for e in np.eye(3)])
    rep = omega_invariance_probe(phi, samples=50, seed=0)
    assert rep.retained == 0 and rep.skipped == 100
