"""Density matrices, the incoherent set, and the classes Omega and Omega_X.

Indices in every public return value (support pairs, messages) are 1-based.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NotDensityMatrix, NotPSD, SamplingExhausted
from .linalg import ATOL, as_cmatrix, herm_eigh, is_hermitian, max_abs

ZERO_TOL = 1e-12
PSD_TOL = 1e-9
MAX_REJECTIONS = 1000


def validate_density_matrix(rho, atol: float = ATOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return a complex copy."""
    try:
        rho = as_cmatrix(rho)
    except ValueError as exc:
        raise NotDensityMatrix(str(exc)) from None
    if not is_hermitian(rho, atol):
        raise NotDensityMatrix(f"not Hermitian: ||rho - rho^dag||_max = {max_abs(rho - rho.conj().T):.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > atol:
        raise NotDensityMatrix(f"trace is {tr.real:.12g}, expected 1")
    lmin = herm_eigh(rho, atol)[0][-1]
    if lmin < -PSD_TOL:
        raise NotDensityMatrix(f"smallest eigenvalue {lmin:.3e} < 0")
    return rho


def support_set(rho, zero_tol: float = ZERO_TOL) -> frozenset[tuple[int, int]]:
    """All 1-based ``(i, j)``, ``i != j``, with ``|rho_ij| > zero_tol``."""
    rho = np.asarray(rho)
    mask = np.abs(rho) > zero_tol
    np.fill_diagonal(mask, False)
    rows, cols = np.nonzero(mask)
    return frozenset((int(i) + 1, int(j) + 1) for i, j in zip(rows, cols))


def in_omega(rho, zero_tol: float = ZERO_TOL) -> bool:
    d = np.asarray(rho).shape[0]
    pairs = support_set(rho, zero_tol)
    if d == 2:
        return (1, 2) in pairs
    covered = {i for pair in pairs for i in pair}
    if covered != set(range(1, d + 1)):
        return False
    degree = {i: 0 for i in range(1, d + 1)}
    for i, _ in pairs:
        degree[i] += 1
    # (i, j) has a witness k iff i or j touches some other index
    return all(degree[i] >= 2 or degree[j] >= 2 for i, j in pairs)


def in_omega_x(rho, zero_tol: float = ZERO_TOL) -> bool:
    rho = np.asarray(rho)
    d = rho.shape[0]
    idx = np.arange(d)
    anti = d - 1 - idx
    mask = np.ones((d, d), dtype=bool)
    mask[idx, idx] = False
    mask[idx, anti] = False
    if np.any(np.abs(rho[mask]) > zero_tol):
        return False
    if np.any(np.abs(np.diag(rho)) <= zero_tol):
        return False
    off = idx != anti
    return bool(np.all(np.abs(rho[idx[off], anti[off]]) > zero_tol))


def support_connected(rho, zero_tol: float = ZERO_TOL) -> bool:
    """Whether the graph on ``1..d`` with edges ``rho^#`` is connected."""
    d = np.asarray(rho).shape[0]
    adj = {i: set() for i in range(1, d + 1)}
    for i, j in support_set(rho, zero_tol):
        adj[i].add(j)
    seen = {1}
    stack = [1]
    while stack:
        for k in adj[stack.pop()] - seen:
            seen.add(k)
            stack.append(k)
    return len(seen) == d


class StateTag(str, enum.Enum):
    IN_OMEGA = "InOmega"
    IN_OMEGA_X = "InOmegaX"
    INCOHERENT = "Incoherent"
    OTHER_COHERENT = "OtherCoherent"


@dataclass(frozen=True)
class StateClass:
    tags: frozenset[StateTag]
    detail: str

    @property
    def in_omega(self) -> bool:
        return StateTag.IN_OMEGA in self.tags

    @property
    def in_omega_x(self) -> bool:
        return StateTag.IN_OMEGA_X in self.tags

    @property
    def incoherent(self) -> bool:
        return StateTag.INCOHERENT in self.tags

    def names(self) -> list[str]:
        order = list(StateTag)
        return [t.value for t in sorted(self.tags, key=order.index)]


def classify(rho, zero_tol: float = ZERO_TOL) -> StateClass:
    rho = np.asarray(rho)
    d = rho.shape[0]
    pairs = support_set(rho, zero_tol)
    if not pairs:
        return StateClass(frozenset({StateTag.INCOHERENT}), "no nonzero off-diagonal entry")
    tags = set()
    reasons = []
    if in_omega(rho, zero_tol):
        tags.add(StateTag.IN_OMEGA)
        reasons.append("support covers all indices and every pair has a neighbour")
    if in_omega_x(rho, zero_tol):
        tags.add(StateTag.IN_OMEGA_X)
        reasons.append("nonzero only on diagonal and anti-diagonal, all of them nonzero")
    if not tags:
        tags.add(StateTag.OTHER_COHERENT)
        covered = {i for p in pairs for i in p}
        missing = sorted(set(range(1, d + 1)) - covered)
        if missing:
            reasons.append(f"indices {missing} carry no coherence")
        else:
            lonely = sorted((i, j) for i, j in pairs if i < j)
            reasons.append(f"support pairs {lonely} fail the neighbour condition")
    return StateClass(frozenset(tags), "; ".join(reasons))


def bell_diagonal(c1: float, c2: float, c3: float) -> np.ndarray:
    """``(I + sum_j c_j sigma_j (x) sigma_j) / 4`` in the computational basis."""
    eig = np.array([1 - c1 - c2 - c3, 1 - c1 + c2 + c3, 1 + c1 - c2 + c3, 1 + c1 + c2 - c3]) / 4
    if eig.min() < -1e-12:
        raise NotPSD(f"Bell-diagonal parameters give eigenvalue {eig.min():.6g}")
    a, b = (c1 - c2) / 4, (c1 + c2) / 4
    p, m = (1 + c3) / 4, (1 - c3) / 4
    return np.array(
        [
            [p, 0, 0, a],
            [0, m, b, 0],
            [0, b, m, 0],
            [a, 0, 0, p],
        ],
        dtype=np.complex128,
    )


def bell_admissible(c1: float, c2: float, c3: float, tol: float = 1e-12) -> bool:
    eig = np.array([1 - c1 - c2 - c3, 1 - c1 + c2 + c3, 1 + c1 - c2 + c3, 1 + c1 + c2 - c3]) / 4
    return bool(eig.min() >= -tol)


def maximally_coherent(d: int) -> np.ndarray:
    return np.full((d, d), 1.0 / d, dtype=np.complex128)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _wishart(d: int, rng: np.random.Generator) -> np.ndarray:
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state(d: int, seed=None) -> np.ndarray:
    """``G G^dag / Tr`` with i.i.d. standard complex Gaussian ``G``.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    return _wishart(d, _rng(seed))


def random_in_omega(d: int, seed=None, zero_tol: float = ZERO_TOL) -> np.ndarray:
    rng = _rng(seed)
    for _ in range(MAX_REJECTIONS):
        rho = random_state(d, rng)
        if in_omega(rho, zero_tol):
            return rho
    raise SamplingExhausted(f"no Omega state after {MAX_REJECTIONS} draws (d={d})")


def x_pattern_mask(d: int) -> np.ndarray:
    idx = np.arange(d)
    mask = np.zeros((d, d), dtype=bool)
    mask[idx, idx] = True
    mask[idx, d - 1 - idx] = True
    return mask


def random_x_state(d: int, seed=None, zero_tol: float = ZERO_TOL) -> np.ndarray:
    """Random state restricted to the X pattern, retried until it lies in Omega_X."""
    if d < 2:
        raise ValueError("d must be >= 2")
    rng = _rng(seed)
    mask = x_pattern_mask(d)
    for _ in range(MAX_REJECTIONS):
        rho = np.where(mask, random_state(d, rng), 0)
        rho /= np.trace(rho).real
        w, v = herm_eigh(rho)
        w = np.clip(w, 0.0, None)
        rho = (v * w) @ v.conj().T
        rho /= np.trace(rho).real
        rho = np.where(mask, rho, 0)
        if in_omega_x(rho, zero_tol):
            return rho
    raise SamplingExhausted(f"no X state after {MAX_REJECTIONS} draws (d={d})")


def state_to_dict(rho) -> dict:
    rho = np.asarray(rho, dtype=np.complex128)
    return {
        "dim": int(rho.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in rho.ravel()],
    }


def state_from_dict(obj: dict, validate: bool = True) -> np.ndarray:
    try:
        d = int(obj["dim"])
        entries = obj["entries"]
        if len(entries) != d * d:
            raise NotDensityMatrix(f"expected {d * d} entries, got {len(entries)}")
        flat = np.array([complex(float(re), float(im)) for re, im in entries])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, NotDensityMatrix):
            raise
        raise NotDensityMatrix(f"malformed state object: {exc}") from None
    rho = flat.reshape(d, d)
    return validate_density_matrix(rho) if validate else rho
