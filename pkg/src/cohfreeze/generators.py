"""Random channel and state families for the randomized suites.

Every function takes a ``numpy.random.Generator`` (or a seed) and is
deterministic given it.
"""

from __future__ import annotations

import math

import numpy as np

from .freeze import MixedUnitaryForm, MixedUnitaryTerm
from .linalg import Permutation
from .sio import SioChannel, SioKraus
from .states import _rng, in_omega, random_state
from .xfreeze import kraus_from_paired, pairing_permutation, to_paired, x_state_from_blocks


def random_permutation(d: int, rng) -> Permutation:
    return Permutation.from_zero_based(_rng(rng).permutation(d))


def random_si_unitary(d: int, rng) -> tuple[Permutation, np.ndarray]:
    rng = _rng(rng)
    return random_permutation(d, rng), rng.uniform(0, 2 * np.pi, d)


def si_unitary_channel(d: int, rng) -> SioChannel:
    perm, thetas = random_si_unitary(d, rng)
    return SioChannel((SioKraus(perm, np.exp(1j * thetas)),))


def _column_weights(n: int, d: int, rng) -> np.ndarray:
    """``(n, d)`` array whose columns are probability vectors."""
    w = rng.exponential(size=(n, d))
    return w / w.sum(axis=0)


def random_sio(d: int, rng, n_kraus: int | None = None) -> SioChannel:
    """Random generalized-permutation Kraus family with independent column weights."""
    rng = _rng(rng)
    n = n_kraus or int(rng.integers(1, 5))
    amps = np.sqrt(_column_weights(n, d, rng))
    kraus = []
    for a in range(n):
        phases = rng.uniform(0, 2 * np.pi, d)
        kraus.append(SioKraus(random_permutation(d, rng), amps[a] * np.exp(1j * phases)))
    return SioChannel(tuple(kraus))


def modulus_spread(phi: SioChannel) -> float:
    return max(float(np.ptp(np.abs(k.coeffs))) for k in phi.kraus)


def random_nonuniform_sio(d: int, rng, spread: float = 0.05) -> SioChannel:
    """Random SIO with at least one Kraus operator whose moduli differ by ``spread``."""
    rng = _rng(rng)
    while True:
        phi = random_sio(d, rng, int(rng.integers(2, 5)))
        if modulus_spread(phi) >= spread:
            return phi


def random_mixed_unitary(d: int, rng, n_terms: int | None = None, distinct: bool = True) -> MixedUnitaryForm:
    rng = _rng(rng)
    n = n_terms or int(rng.integers(2, 4))
    if distinct:
        n = min(n, math.factorial(d))
    deltas = rng.dirichlet(np.ones(n))
    perms = []
    while len(perms) < n:
        p = random_permutation(d, rng)
        if not distinct or p not in perms:
            perms.append(p)
    return MixedUnitaryForm(
        tuple(MixedUnitaryTerm(float(w), p, rng.uniform(0, 2 * np.pi, d)) for w, p in zip(deltas, perms))
    )


def two_permutation_mixture(d: int, rng, low: float = 0.2) -> MixedUnitaryForm:
    """Mixture of two strictly incoherent unitaries with distinct permutations."""
    rng = _rng(rng)
    p1 = random_permutation(d, rng)
    p2 = p1
    while p2 == p1:
        p2 = random_permutation(d, rng)
    w = rng.uniform(low, 1 - low)
    return MixedUnitaryForm(
        (
            MixedUnitaryTerm(w, p1, rng.uniform(0, 2 * np.pi, d)),
            MixedUnitaryTerm(1 - w, p2, rng.uniform(0, 2 * np.pi, d)),
        )
    )


def gauge_phase_state(d: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """State ``D R D^dag`` with entrywise-positive ``R`` and diagonal phases ``psi``.

    Every off-diagonal phase is ``psi_i - psi_j``, which is what lets
    mixtures of distinct permutations be phase aligned on it.
    """
    rng = _rng(rng)
    g = np.abs(rng.standard_normal((d, d))) + 0.05
    r = g @ g.T
    r /= np.trace(r)
    psi = rng.uniform(0, 2 * np.pi, d)
    ph = np.exp(1j * psi)
    return np.outer(ph, ph.conj()) * r, psi


def aligned_mixed_unitary_pair(d: int, rng) -> tuple[MixedUnitaryForm, np.ndarray]:
    """A state in Omega and a mixture of unitaries that is phase aligned on it.

    Half the draws use distinct permutations on a gauge-phase state; the
    other half share one permutation and phase differences on a generic state.
    """
    rng = _rng(rng)
    n = int(rng.integers(2, 5))
    deltas = rng.dirichlet(np.ones(n))
    if rng.random() < 0.5:
        rho, psi = gauge_phase_state(d, rng)
        chi = rng.uniform(0, 2 * np.pi, d)
        terms = []
        for w in deltas:
            p = random_permutation(d, rng)
            thetas = chi[p.zero_based] - psi + rng.uniform(0, 2 * np.pi)
            terms.append(MixedUnitaryTerm(float(w), p, thetas))
    else:
        while True:
            rho = random_state(d, rng)
            if in_omega(rho):
                break
        p = random_permutation(d, rng)
        base = rng.uniform(0, 2 * np.pi, d)
        terms = [MixedUnitaryTerm(float(w), p, base + rng.uniform(0, 2 * np.pi)) for w in deltas]
    return MixedUnitaryForm(tuple(terms)), rho


# --- X-state channel families -------------------------------------------------


def equal_block_x_state(d: int, rng) -> np.ndarray:
    """X state whose normalized 2x2 blocks are all the same state."""
    rng = _rng(rng)
    while True:
        block = random_state(2, rng)
        if abs(block[0, 1]) > 0.05 and min(block[0, 0].real, block[1, 1].real) > 0.05:
            break
    nb = d // 2
    weights = rng.dirichlet(np.ones(nb + d % 2)) * 0.9 + 0.1 / (nb + d % 2)
    tail = float(weights[-1]) if d % 2 else None
    return x_state_from_blocks(weights[:nb], [block] * nb, tail)


def _assemble(d: int, routes: list[dict]) -> SioChannel:
    """Build a channel from per-Kraus ``{paired column: (paired row, coeff)}`` maps."""
    pi = pairing_permutation(d)
    kraus = []
    for route in routes:
        images = [-1] * d
        coeffs = np.zeros(d, dtype=np.complex128)
        for col, (row, c) in route.items():
            images[col] = row
            coeffs[col] = c
        used = {x for x in images if x >= 0}
        free = iter(r for r in range(d) if r not in used)
        images = [x if x >= 0 else next(free) for x in images]
        pk = SioKraus(Permutation.from_zero_based(images), coeffs)
        if not pk.is_zero():
            kraus.append(kraus_from_paired(pk, pi))
    return SioChannel(tuple(kraus))


X_MODES = ("random", "aligned", "unitary", "equal_blocks", "nonuniform", "rank_one")


def random_block_channel(d: int, rng, mode: str = "random", rho=None) -> SioChannel:
    """Random channel mapping X states to X states.

    Modes: ``random`` block forms with random phases; ``aligned`` block
    forms phase aligned on ``rho``; ``unitary`` one shared routing and
    shared phase differences (a block unitary up to per-Kraus phases);
    ``equal_blocks`` per-target consistent exchange and phase difference,
    which keeps coherence on :func:`equal_block_x_state` inputs;
    ``nonuniform`` pair routing with unequal moduli inside blocks;
    ``rank_one`` aligned blocks plus rank-one tail deposits (odd ``d``).
    """
    if mode not in X_MODES:
        raise ValueError(f"unknown mode {mode!r}")
    rng = _rng(rng)
    nb = d // 2
    odd = d % 2 == 1
    n = int(rng.integers(1, 4)) if mode == "unitary" else int(rng.integers(2, 5))
    per_column = mode == "nonuniform"
    w = _column_weights(n, 2 * nb, rng)
    if not per_column:
        w[:, 1::2] = w[:, 0::2]
    amps = np.sqrt(w)
    if mode == "unitary":
        shared_map = rng.permutation(nb)
        shared_swaps = rng.random(nb) < 0.5
        maps = [shared_map] * n
        swaps = [shared_swaps] * n
    elif mode == "equal_blocks":
        target_swap = rng.random(nb) < 0.5
        maps = [rng.permutation(nb) for _ in range(n)]
        swaps = [target_swap[mp] for mp in maps]
    else:
        maps = [rng.permutation(nb) for _ in range(n)]
        swaps = [rng.random(nb) < 0.5 for _ in range(n)]

    phases = rng.uniform(0, 2 * np.pi, (n, 2 * nb))
    if mode == "unitary":
        diff = rng.uniform(0, 2 * np.pi, nb)
        phases[:, 1::2] = phases[:, 0::2] - diff
    elif mode == "equal_blocks":
        diff = rng.uniform(0, 2 * np.pi, nb)  # per target
        for a in range(n):
            phases[a, 1::2] = phases[a, 0::2] - diff[maps[a]]
    elif mode in ("aligned", "rank_one"):
        if rho is None:
            raise ValueError(f"mode {mode!r} needs the X state to align on")
        paired = to_paired(rho)
        arg_r = np.angle([paired[2 * i, 2 * i + 1] for i in range(nb)])
        chi = rng.uniform(0, 2 * np.pi, nb)
        for a in range(n):
            sign = np.where(swaps[a], 1.0, -1.0)
            phases[a, 1::2] = phases[a, 0::2] + arg_r + sign * chi[maps[a]]

    routes = []
    for a in range(n):
        route = {}
        for i in range(nb):
            m = maps[a][i]
            lo, hi = (2 * m + 1, 2 * m) if swaps[a][i] else (2 * m, 2 * m + 1)
            for col, row in ((2 * i, lo), (2 * i + 1, hi)):
                if amps[a, col] > 0:
                    route[col] = (row, amps[a, col] * np.exp(1j * phases[a, col]))
        routes.append(route)
    if odd:
        n_rank = int(rng.integers(1, 3)) if mode == "rank_one" else 0
        tail_w = rng.dirichlet(np.ones(n + n_rank))
        for a in range(n):
            routes[a][d - 1] = (d - 1, np.sqrt(tail_w[a]) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        for r in range(n_rank):
            target = int(rng.integers(0, d - 1))
            routes.append({d - 1: (target, np.sqrt(tail_w[n + r]))})
    return _assemble(d, routes)
