"""Freezing structure on X states.

The pairing permutation sends index ``i`` to ``2i-1`` and ``d+1-i`` to
``2i``, so an X state becomes a direct sum of 2x2 blocks on the pairs
``(2m-1, 2m)`` (plus a 1x1 tail at index ``d`` when ``d`` is odd). All
routing below is expressed in these paired coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import HypothesisNotMet, NotXState
from .freeze import STRUCT_TOL, StructuralResult, operational, raise_if_disagree
from .linalg import Permutation
from .measures import Measure, c_re
from .sio import COEFF_ZERO, SioChannel, SioKraus, apply
from .states import ZERO_TOL, _rng, in_omega, in_omega_x, random_state, random_x_state

_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


def pairing_permutation(d: int) -> Permutation:
    if d < 2:
        raise ValueError("d must be >= 2")
    images = [0] * d
    h = d // 2
    for i in range(1, h + 1):
        images[i - 1] = 2 * i - 1
        images[d - i] = 2 * i
    if d % 2:
        images[h] = d
    return Permutation(tuple(images))


def to_paired(m, pi: Permutation | None = None) -> np.ndarray:
    """``P_pi m P_pi^dag``."""
    m = np.asarray(m, dtype=np.complex128)
    pi = pi or pairing_permutation(m.shape[0])
    p = pi.zero_based
    out = np.empty_like(m)
    out[np.ix_(p, p)] = m
    return out


def from_paired(m, pi: Permutation | None = None) -> np.ndarray:
    """``P_pi^dag m P_pi``."""
    m = np.asarray(m, dtype=np.complex128)
    pi = pi or pairing_permutation(m.shape[0])
    p = pi.zero_based
    return m[np.ix_(p, p)].copy()


def kraus_to_paired(k: SioKraus, pi: Permutation) -> SioKraus:
    """Permutation form of ``P_pi K P_pi^dag``: ``f -> pi o f o pi^-1``."""
    perm = pi.compose(k.perm).compose(pi.inverse())
    coeffs = np.empty_like(k.coeffs)
    coeffs[pi.zero_based] = k.coeffs
    return SioKraus(perm, coeffs)


def kraus_from_paired(k: SioKraus, pi: Permutation) -> SioKraus:
    perm = pi.inverse().compose(k.perm).compose(pi)
    return SioKraus(perm, k.coeffs[pi.zero_based])


@dataclass(frozen=True, eq=False)
class XDecomposition:
    pi: Permutation
    lambdas: np.ndarray
    blocks: tuple[np.ndarray, ...]
    tail: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.pi.dim

    def reassemble(self) -> np.ndarray:
        d = self.dim
        paired = np.zeros((d, d), dtype=np.complex128)
        for m, (lam, block) in enumerate(zip(self.lambdas, self.blocks)):
            paired[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = lam * block
        if self.tail is not None:
            paired[d - 1, d - 1] = self.tail
        return from_paired(paired, self.pi)


def decompose_x(rho, zero_tol: float = ZERO_TOL) -> XDecomposition:
    rho = np.asarray(rho, dtype=np.complex128)
    if not in_omega_x(rho, zero_tol):
        raise NotXState("state is not an X state with all diagonal and anti-diagonal entries nonzero")
    d = rho.shape[0]
    lambdas, blocks = [], []
    for i in range(d // 2):
        j = d - 1 - i
        lam = float((rho[i, i] + rho[j, j]).real)
        lambdas.append(lam)
        blocks.append(np.array([[rho[i, i], rho[i, j]], [rho[j, i], rho[j, j]]]) / lam)
    tail = float(rho[d // 2, d // 2].real) if d % 2 else None
    return XDecomposition(pairing_permutation(d), np.array(lambdas), tuple(blocks), tail)


def x_state_from_blocks(lambdas: Sequence[float], blocks: Sequence, tail: float | None = None) -> np.ndarray:
    """Inverse of :func:`decompose_x`."""
    d = 2 * len(blocks) + (1 if tail is not None else 0)
    dec = XDecomposition(
        pairing_permutation(d),
        np.asarray(lambdas, dtype=float),
        tuple(np.asarray(b, dtype=np.complex128) for b in blocks),
        tail,
    )
    return dec.reassemble()


@dataclass(frozen=True)
class TailTerm:
    """Coefficient on column ``d`` (odd ``d``), routed to paired row ``target``."""

    target: int
    coeff: complex

    def kind(self, d: int) -> str:
        return "DiagonalTail" if self.target == d else "RankOne"


@dataclass(frozen=True, eq=False)
class BlockKrausForm:
    """Paired-coordinate Kraus operator ``P_f (+)_i delta_i U_i`` (+ tail term).

    Block ``i`` (1-based) sits on paired indices ``(2i-1, 2i)``. It is sent
    to block ``pair_map[i-1]``, with its two indices exchanged when
    ``swaps[i-1]``; ``U_i = diag(exp(i phases[i-1]))``. Blocks with
    ``delta = 0`` carry no routing information and are listed with the
    unused targets in ascending order.
    """

    dim: int
    pair_map: tuple[int, ...]
    swaps: tuple[bool, ...]
    deltas: np.ndarray
    phases: np.ndarray
    tail: Optional[TailTerm] = None

    @property
    def n_blocks(self) -> int:
        return self.dim // 2

    @property
    def odd_kind(self) -> Optional[str]:
        return None if self.tail is None else self.tail.kind(self.dim)

    def pair_permutation(self) -> Permutation:
        return Permutation(self.pair_map)

    def paired_kraus(self) -> SioKraus:
        d = self.dim
        images = [-1] * d
        coeffs = np.zeros(d, dtype=np.complex128)
        for i in range(self.n_blocks):
            if self.deltas[i] <= COEFF_ZERO:
                continue
            m = self.pair_map[i] - 1
            lo, hi = 2 * m, 2 * m + 1
            if self.swaps[i]:
                lo, hi = hi, lo
            images[2 * i], images[2 * i + 1] = lo, hi
            coeffs[2 * i] = self.deltas[i] * np.exp(1j * self.phases[i, 0])
            coeffs[2 * i + 1] = self.deltas[i] * np.exp(1j * self.phases[i, 1])
        if self.tail is not None:
            images[d - 1] = self.tail.target - 1
            coeffs[d - 1] = self.tail.coeff
        used = set(x for x in images if x >= 0)
        if len(used) != sum(1 for x in images if x >= 0):
            raise ValueError("block form routes two columns to the same row")
        free = iter(r for r in range(d) if r not in used)
        images = [x if x >= 0 else next(free) for x in images]
        return SioKraus(Permutation.from_zero_based(images), coeffs)

    def paired_matrix(self) -> np.ndarray:
        return self.paired_kraus().matrix()

    def kraus(self, pi: Permutation | None = None) -> SioKraus:
        """The Kraus operator in the original (unpaired) coordinates."""
        return kraus_from_paired(self.paired_kraus(), pi or pairing_permutation(self.dim))

    def to_dict(self) -> dict:
        out = {
            "pair_map": list(self.pair_map),
            "swaps": list(self.swaps),
            "deltas": [float(x) for x in self.deltas],
            "phases": [[float(a), float(b)] for a, b in self.phases],
            "odd_kind": self.odd_kind,
        }
        if self.tail is not None:
            out["tail"] = {"target": self.tail.target, "coeff": [self.tail.coeff.real, self.tail.coeff.imag]}
        return out


def parse_block_form(
    k: SioKraus,
    pi: Permutation | None = None,
    tol: float = STRUCT_TOL,
    zero_tol: float = COEFF_ZERO,
) -> Optional[BlockKrausForm]:
    """Recognize ``P_pi K P_pi^dag`` as a pair-permutation of diagonal-phase blocks.

    A within-pair exchange is folded into the routing (``swaps``) so the
    per-block factor is always diagonal. For odd ``d`` the last column may
    be routed anywhere not already taken by a nonzero block: to ``d``
    itself (diagonal tail) or into a pair slot (rank-one deposit).
    Returns ``None`` on any structural mismatch.
    """
    d = k.dim
    pi = pi or pairing_permutation(d)
    pk = kraus_to_paired(k, pi)
    f = pk.perm.zero_based
    c = pk.coeffs
    nb = d // 2
    pair_map: list[int | None] = [None] * nb
    swaps = [False] * nb
    deltas = np.zeros(nb)
    phases = np.zeros((nb, 2))
    for i in range(nb):
        a, b = c[2 * i], c[2 * i + 1]
        ma, mb = abs(a), abs(b)
        if ma <= zero_tol and mb <= zero_tol:
            continue
        if abs(ma - mb) > tol:
            return None
        ta, tb = int(f[2 * i]), int(f[2 * i + 1])
        lo, hi = min(ta, tb), max(ta, tb)
        if lo % 2 or hi != lo + 1 or hi >= 2 * nb:
            return None
        pair_map[i] = lo // 2 + 1
        swaps[i] = ta > tb
        deltas[i] = 0.5 * (ma + mb)
        phases[i] = np.angle(a), np.angle(b)
    tail = None
    if d % 2 and abs(c[d - 1]) > zero_tol:
        tail = TailTerm(int(f[d - 1]) + 1, complex(c[d - 1]))
    taken = {m for m in pair_map if m is not None}
    spare = iter(m for m in range(1, nb + 1) if m not in taken)
    full_map = tuple(m if m is not None else next(spare) for m in pair_map)
    return BlockKrausForm(d, full_map, tuple(swaps), deltas, phases, tail)


def _rotated_block(block: np.ndarray, form: BlockKrausForm, i: int) -> np.ndarray:
    """Image of a normalized 2x2 source block in its target's coordinates."""
    u = np.diag(np.exp(1j * form.phases[i]))
    out = u @ block @ u.conj().T
    if form.swaps[i]:
        out = _SIGMA_X @ out @ _SIGMA_X
    return out


def _routing(forms: list[BlockKrausForm], paired_rho: np.ndarray, blocks):
    """Contributions per target block: (alpha, source, offdiag value, rotated block)."""
    routed: dict[int, list] = {}
    for a, form in enumerate(forms):
        for i in range(form.n_blocks):
            if form.deltas[i] <= COEFF_ZERO:
                continue
            ph = np.exp(1j * form.phases[i])
            val = form.deltas[i] ** 2 * ph[0] * ph[1].conjugate() * paired_rho[2 * i, 2 * i + 1]
            if form.swaps[i]:
                val = val.conjugate()
            routed.setdefault(form.pair_map[i], []).append((a, i + 1, val, _rotated_block(blocks[i], form, i)))
    return routed


def x_structural_check(
    phi: SioChannel,
    rho,
    measure,
    *,
    reading: str = "aggregate",
    tol: float | None = None,
    struct_tol: float = STRUCT_TOL,
    zero_tol: float = ZERO_TOL,
    strict: bool = True,
) -> StructuralResult:
    """Structural freezing verdict for input and output X states.

    l1: every Kraus operator must parse as a block form, each block must be
    complete, and the off-diagonal contributions arriving at each target
    block must be phase aligned (``reading="aggregate"``) or aligned per
    source block (``reading="per_source"``, a narrower diagnostic reading
    that can disagree with the operational verdict).

    Relative entropy: the l1 conditions, every normalized block arriving at
    the same target must be identical after its phase rotation and
    exchange, and no odd-``d`` tail weight may be deposited into a pair slot.
    """
    if reading not in ("aggregate", "per_source"):
        raise ValueError(f"unknown reading {reading!r}")
    m = Measure.parse(measure)
    rho = np.asarray(rho, dtype=np.complex128)
    sigma, before, after, frozen = operational(phi, rho, m, tol)
    if not in_omega_x(rho, zero_tol):
        raise HypothesisNotMet("input state is not an X state")
    if not in_omega_x(sigma, zero_tol):
        raise HypothesisNotMet("output state is not an X state")
    d = rho.shape[0]
    pi = pairing_permutation(d)
    dec = decompose_x(rho, zero_tol)
    paired = to_paired(rho, pi)

    def done(verdict: bool, reason: str, witness=None) -> StructuralResult:
        res = StructuralResult(m, verdict, witness, before, after, frozen, reason)
        raise_if_disagree(res, "x_state", phi, rho, strict and reading == "aggregate")
        return res

    forms = []
    for a, k in enumerate(phi.kraus):
        form = parse_block_form(k, pi, struct_tol)
        if form is None:
            return done(False, f"Kraus operator {a + 1} is not a block form")
        forms.append(form)
    witness = {"forms": [f.to_dict() for f in forms]}
    weights = np.sum([f.deltas**2 for f in forms], axis=0)
    if np.max(np.abs(weights - 1.0)) > struct_tol:
        return done(False, "a block is not complete across Kraus operators", witness)
    routed = _routing(forms, paired, dec.blocks)
    for target, items in sorted(routed.items()):
        groups = [items] if reading == "aggregate" else [
            [x for x in items if x[1] == src] for src in sorted({x[1] for x in items})
        ]
        for group in groups:
            vals = np.array([x[2] for x in group])
            gap = float(np.sum(np.abs(vals)) - abs(vals.sum()))
            if gap > struct_tol:
                return done(False, f"contributions to target block {target} are not phase aligned (gap {gap:.3e})", witness)
    if m is Measure.L1:
        return done(True, "block forms with aligned phases", witness)
    for a, f in enumerate(forms):
        if f.tail is not None and f.tail.target != d:
            return done(False, f"Kraus operator {a + 1} deposits tail weight into a pair slot", witness)
    for target, items in sorted(routed.items()):
        ref = items[0][3]
        for _, src, _, img in items[1:]:
            if np.max(np.abs(img - ref)) > struct_tol:
                return done(False, f"blocks routed to target {target} differ after rotation", witness)
    return done(True, "block forms with identical rotated blocks per target", witness)


@dataclass
class ProbeReport:
    retained: int = 0
    skipped: int = 0
    omega_checked: int = 0
    omega_preserved: int = 0
    x_checked: int = 0
    x_preserved: int = 0

    @property
    def all_preserved(self) -> bool:
        return self.omega_preserved == self.omega_checked and self.x_preserved == self.x_checked

    def to_dict(self) -> dict:
        return {**self.__dict__, "all_preserved": self.all_preserved}


def omega_invariance_probe(
    phi: SioChannel,
    samples: int = 200,
    seed=0,
    states: Sequence | None = None,
    tol_re: float = 1e-7,
    zero_tol: float = ZERO_TOL,
) -> ProbeReport:
    """Check that a channel which freezes relative-entropy coherence keeps Omega and Omega_X.

    Samples ``samples`` generic states and ``samples`` X states (plus any
    ``states`` given). Samples on which the channel does not freeze the
    relative entropy of coherence are skipped and counted.
    """
    rng = _rng(seed)
    d = phi.dim
    pool = list(states or [])
    pool += [random_state(d, rng) for _ in range(samples)]
    pool += [random_x_state(d, rng) for _ in range(samples)]
    report = ProbeReport()
    for rho in pool:
        sigma = apply(phi, rho)
        if abs(c_re(rho) - c_re(sigma)) > tol_re:
            report.skipped += 1
            continue
        report.retained += 1
        if in_omega(rho, zero_tol):
            report.omega_checked += 1
            report.omega_preserved += in_omega(sigma, zero_tol)
        if in_omega_x(rho, zero_tol):
            report.x_checked += 1
            report.x_preserved += in_omega_x(sigma, zero_tol)
    return report


def qutrit_form_channel(
    d11: complex,
    d21: complex,
    d13: complex,
    d23: complex,
    d33: complex,
    d43: complex,
    theta1: float,
    theta2: float,
) -> SioChannel:
    """Channel built from the four admissible paired-coordinate shapes for ``d = 3``.

    (1) ``diag(d11 e^{i theta1}, d11, d13)``; (2) block exchange with
    ``d21 e^{i theta2}`` below and ``d21`` above, plus ``d23`` on the tail;
    (3) ``d33 |1><3|``; (4) ``d43 |2><3|``. Zero operators are dropped.
    """
    pi = pairing_permutation(3)
    shapes = [
        (Permutation((1, 2, 3)), [d11 * np.exp(1j * theta1), d11, d13]),
        (Permutation((2, 1, 3)), [d21 * np.exp(1j * theta2), d21, d23]),
        (Permutation((2, 3, 1)), [0, 0, d33]),
        (Permutation((1, 3, 2)), [0, 0, d43]),
    ]
    kraus = []
    for perm, coeffs in shapes:
        pk = SioKraus(perm, np.array(coeffs, dtype=np.complex128))
        if not pk.is_zero():
            kraus.append(kraus_from_paired(pk, pi))
    return SioChannel(tuple(kraus))

