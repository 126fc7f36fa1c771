"""Freezing structure on Omega states.

On a state whose off-diagonal support covers every index and has no
isolated pair, the l1-norm of coherence survives a strictly incoherent
operation exactly when the operation is a mixture of strictly incoherent
unitaries whose contributions to each output entry are phase aligned. The
relative entropy of coherence survives exactly when the output is a single
strictly incoherent unitary image of the input.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DimTooLarge,
    HypothesisNotMet,
    NotProbabilityVector,
    TheoremViolation,
)
from .linalg import Permutation, perm_matrix, phase_diag
from .measures import Measure, coherence
from .sio import SioChannel, SioKraus, apply, channel_to_dict
from .states import ZERO_TOL, classify, state_to_dict

log = logging.getLogger(__name__)

STRUCT_TOL = 1e-9
MAX_SEARCH_DIM = 8


@dataclass(frozen=True, eq=False)
class MixedUnitaryTerm:
    delta: float
    perm: Permutation
    thetas: np.ndarray

    def kraus(self) -> SioKraus:
        return SioKraus(self.perm, np.sqrt(self.delta) * np.exp(1j * np.asarray(self.thetas)))

    def unitary(self) -> np.ndarray:
        return perm_matrix(self.perm) @ phase_diag(self.thetas)

    def to_dict(self) -> dict:
        return {
            "delta": float(self.delta),
            "perm": list(self.perm.map),
            "thetas": [float(t) for t in self.thetas],
        }


@dataclass(frozen=True, eq=False)
class MixedUnitaryForm:
    """``Phi(rho) = sum_a delta_a U_a rho U_a^dag`` with strictly incoherent ``U_a``."""

    terms: tuple[MixedUnitaryTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        total = sum(t.delta for t in self.terms)
        if abs(total - 1.0) > STRUCT_TOL:
            raise ValueError(f"weights sum to {total}, expected 1")
        if any(t.delta <= 0 for t in self.terms):
            raise ValueError("weights must be positive")

    @property
    def dim(self) -> int:
        return self.terms[0].perm.dim

    def to_channel(self) -> SioChannel:
        return SioChannel(tuple(t.kraus() for t in self.terms))

    def to_dict(self) -> dict:
        return {"terms": [t.to_dict() for t in self.terms]}


def decompose_mixed_unitary(phi: SioChannel, tol: float = STRUCT_TOL) -> Optional[MixedUnitaryForm]:
    """Rewrite ``phi`` as a mixture of strictly incoherent unitaries.

    Returns ``None`` unless every Kraus operator has coefficients of a
    single modulus.
    """
    terms = []
    for k in phi.kraus:
        mod = np.abs(k.coeffs)
        if mod.max() - mod.min() > tol:
            return None
        terms.append(MixedUnitaryTerm(float(mod[0] ** 2), k.perm, np.angle(k.coeffs)))
    total = sum(t.delta for t in terms)
    # renormalize the rounding left over from |c|^2
    terms = [MixedUnitaryTerm(t.delta / total, t.perm, t.thetas) for t in terms]
    return MixedUnitaryForm(tuple(terms))


def _routed_sums(form: MixedUnitaryForm, rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per output entry: the complex sum of routed contributions and the sum of their moduli.

    ``rho`` may carry leading batch axes.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    total = np.zeros_like(rho)
    moduli = np.zeros(rho.shape, dtype=float)
    for t in form.terms:
        f = np.asarray(t.perm.zero_based)
        ph = np.exp(1j * np.asarray(t.thetas))
        contrib = t.delta * np.outer(ph, ph.conj()) * rho
        total[..., f[:, None], f[None, :]] += contrib
        moduli[..., f[:, None], f[None, :]] += np.abs(contrib)
    return total, moduli


def alignment_gaps(form: MixedUnitaryForm, rho) -> np.ndarray:
    """``sum |c| - |sum c|`` over the contributions routed to each output entry.

    Diagonal entries are zeroed; every off-diagonal gap is nonnegative and
    the gaps sum to ``C_l1(rho) - C_l1(Phi(rho))``. Works on a stack of states.
    """
    total, moduli = _routed_sums(form, rho)
    gaps = moduli - np.abs(total)
    d = gaps.shape[-1]
    gaps[..., np.arange(d), np.arange(d)] = 0.0
    return gaps


def phase_alignment_l1(form: MixedUnitaryForm, rho, tol: float = STRUCT_TOL) -> bool:
    """Triangle equality for every output entry ``(m, n)``, ``m != n``."""
    return float(alignment_gaps(form, rho).max()) <= tol


def bistochastic_of(form: MixedUnitaryForm) -> np.ndarray:
    """``D[m, n] = sum of delta_a over terms with f_a(n) = m``."""
    d = form.dim
    out = np.zeros((d, d))
    for t in form.terms:
        out[t.perm.zero_based, np.arange(d)] += t.delta
    return out


def is_bistochastic(D, tol: float = STRUCT_TOL) -> bool:
    D = np.asarray(D, dtype=float)
    return bool(
        D.ndim == 2
        and D.shape[0] == D.shape[1]
        and D.min() >= -tol
        and np.all(np.abs(D.sum(axis=0) - 1) <= tol)
        and np.all(np.abs(D.sum(axis=1) - 1) <= tol)
    )


def _probability_vector(v, tol: float) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size == 0 or abs(v.sum() - 1.0) > tol or v.min() < -tol:
        raise NotProbabilityVector(f"{v.tolist()} is not a probability vector")
    return v


def majorizes(y, x, tol: float = STRUCT_TOL) -> bool:
    """True iff ``x`` is majorized by ``y``."""
    y = _probability_vector(y, tol)
    x = _probability_vector(x, tol)
    if x.size != y.size:
        raise NotProbabilityVector(f"length mismatch {x.size} vs {y.size}")
    px = np.cumsum(np.sort(x)[::-1])
    py = np.cumsum(np.sort(y)[::-1])
    return bool(np.all(px <= py + tol) and abs(px[-1] - py[-1]) <= tol)


def _candidate_perms(rho: np.ndarray, sigma: np.ndarray, tol: float):
    """Lexicographic DFS over permutations consistent with diagonals and moduli."""
    d = rho.shape[0]
    a_rho, a_sig = np.abs(rho), np.abs(sigma)
    diag_r, diag_s = np.real(np.diag(rho)), np.real(np.diag(sigma))
    images: list[int] = []
    used = [False] * d

    def extend(i):
        if i == d:
            yield list(images)
            return
        for t in range(d):
            if used[t] or abs(diag_s[t] - diag_r[i]) > tol:
                continue
            if any(abs(a_sig[t, images[k]] - a_rho[i, k]) > tol for k in range(i)):
                continue
            used[t] = True
            images.append(t)
            yield from extend(i + 1)
            images.pop()
            used[t] = False

    yield from extend(0)


def _recover_phases(rho: np.ndarray, sigma: np.ndarray, images: list[int]) -> np.ndarray:
    d = rho.shape[0]
    thetas = np.zeros(d)
    seen = [False] * d
    support = np.abs(rho) > ZERO_TOL
    for root in range(d):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(support[i]):
                if j == i or seen[j]:
                    continue
                # (U rho U^dag)[pi(i), pi(j)] = exp(i(theta_i - theta_j)) rho_ij
                ratio = sigma[images[i], images[j]] / rho[i, j]
                thetas[j] = thetas[i] - np.angle(ratio)
                seen[j] = True
                stack.append(j)
    return thetas


def find_freezing_unitary(rho, sigma, tol: float = STRUCT_TOL) -> Optional[tuple[Permutation, np.ndarray]]:
    """Find ``U = P_pi diag(exp(i theta))`` with ``U rho U^dag = sigma``.

    The first phase of each connected support component is fixed to 0 and
    the lexicographically smallest matching ``pi`` is returned.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    sigma = np.asarray(sigma, dtype=np.complex128)
    d = rho.shape[0]
    if d > MAX_SEARCH_DIM:
        raise DimTooLarge(f"exhaustive permutation search limited to d <= {MAX_SEARCH_DIM}, got {d}")
    if sigma.shape != rho.shape:
        return None
    for images in _candidate_perms(rho, sigma, tol):
        thetas = _recover_phases(rho, sigma, images)
        perm = Permutation.from_zero_based(images)
        u = perm_matrix(perm) @ phase_diag(thetas)
        if np.max(np.abs(u @ rho @ u.conj().T - sigma)) <= tol:
            return perm, thetas
    return None


@dataclass
class StructuralResult:
    """Outcome of a structural check together with the operational comparison."""

    measure: Measure
    verdict: bool
    witness: Optional[dict]
    c_before: float
    c_after: float
    operational_frozen: bool
    reason: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def agrees(self) -> bool:
        return self.verdict == self.operational_frozen


def raise_if_disagree(result: StructuralResult, kind: str, phi: SioChannel, rho, strict: bool):
    if result.agrees or not strict:
        return
    witness = {
        "check": kind,
        "measure": result.measure.value,
        "structural_frozen": result.verdict,
        "operational_frozen": result.operational_frozen,
        "c_before": result.c_before,
        "c_after": result.c_after,
        "reason": result.reason,
        "state": state_to_dict(rho),
        "channel": channel_to_dict(phi),
    }
    log.error("structural/operational disagreement: %s", witness)
    raise TheoremViolation(
        f"{kind} structural verdict {result.verdict} but operational verdict {result.operational_frozen}",
        witness,
    )


def operational(phi: SioChannel, rho, measure, tol: float | None = None):
    m = Measure.parse(measure)
    tol = m.default_tol if tol is None else tol
    sigma = apply(phi, rho)
    before = coherence(rho, m)
    after = coherence(sigma, m)
    return sigma, before, after, abs(before - after) <= tol


def omega_structural_check(
    phi: SioChannel,
    rho,
    measure,
    *,
    tol: float | None = None,
    struct_tol: float = STRUCT_TOL,
    zero_tol: float = ZERO_TOL,
    strict: bool = True,
) -> StructuralResult:
    """Structural freezing verdict for input and output states in Omega.

    l1: the channel must be a mixture of strictly incoherent unitaries that
    is phase aligned on ``rho``. Relative entropy: ``Phi(rho)`` must be a
    strictly incoherent unitary image of ``rho``. With ``strict`` a
    disagreement with the operational verdict raises ``TheoremViolation``.
    """
    m = Measure.parse(measure)
    rho = np.asarray(rho, dtype=np.complex128)
    sigma, before, after, frozen = operational(phi, rho, m, tol)
    if not classify(rho, zero_tol).in_omega:
        raise HypothesisNotMet("input state is not in Omega")
    if not classify(sigma, zero_tol).in_omega:
        raise HypothesisNotMet("output state is not in Omega")
    if m is Measure.L1:
        form = decompose_mixed_unitary(phi, struct_tol)
        if form is None:
            verdict, witness, reason = False, None, "a Kraus operator has coefficients of unequal modulus"
        else:
            gaps = alignment_gaps(form, rho)
            verdict = float(gaps.max()) <= struct_tol
            witness = form.to_dict()
            reason = "phase aligned" if verdict else f"misaligned output entry, max gap {gaps.max():.3e}"
    else:
        found = find_freezing_unitary(rho, sigma, struct_tol)
        verdict = found is not None
        if found is None:
            witness, reason = None, "output is not a strictly incoherent unitary image of the input"
        else:
            perm, thetas = found
            witness = {"perm": list(perm.map), "thetas": [float(t) for t in thetas]}
            reason = "strictly incoherent unitary found"
    result = StructuralResult(m, verdict, witness, before, after, frozen, reason)
    raise_if_disagree(result, "omega", phi, rho, strict)
    return result
