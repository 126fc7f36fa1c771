"""Dense complex linear algebra helpers and 1-based permutations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NotHermitian, NotPermutation, NotUnitary

ATOL = 1e-10


def as_cmatrix(m) -> np.ndarray:
    """Return ``m`` as a square complex128 array (copy)."""
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"expected a nonempty square matrix, got shape {arr.shape}")
    return arr


def max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def allclose(a: np.ndarray, b: np.ndarray, atol: float = ATOL) -> bool:
    """Entrywise comparison against an absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and max_abs(a - b) <= atol


def is_hermitian(m: np.ndarray, atol: float = ATOL) -> bool:
    return max_abs(m - m.conj().T) <= atol


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    d = u.shape[0]
    return max_abs(u.conj().T @ u - np.eye(d)) <= atol


def herm_eigh(m, atol: float = ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a Hermitian matrix, eigenvalues in descending order.

    Column ``k`` of the returned vector array belongs to eigenvalue ``k``.
    """
    m = as_cmatrix(m)
    if not is_hermitian(m, atol):
        raise NotHermitian(f"||m - m^dag||_max = {max_abs(m - m.conj().T):.3e}")
    # symmetrize so LAPACK sees exactly Hermitian input
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w[::-1].copy(), v[:, ::-1].copy()


def herm_eigenvalues(m, atol: float = ATOL) -> np.ndarray:
    """Descending eigenvalues of a Hermitian matrix."""
    return herm_eigh(m, atol)[0]


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``{1, ..., d}`` stored as its 1-based image list.

    ``p(i)`` evaluates the map on a 1-based index.
    """

    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.map)
        object.__setattr__(self, "map", m)
        if sorted(m) != list(range(1, len(m) + 1)):
            raise NotPermutation(f"{list(m)} is not a bijection of 1..{len(m)}")

    @classmethod
    def identity(cls, d: int) -> Permutation:
        return cls(tuple(range(1, d + 1)))

    @classmethod
    def from_zero_based(cls, images: Iterable[int]) -> Permutation:
        return cls(tuple(int(x) + 1 for x in images))

    @property
    def dim(self) -> int:
        return len(self.map)

    @property
    def zero_based(self) -> np.ndarray:
        return np.array(self.map, dtype=np.intp) - 1

    def __call__(self, i: int) -> int:
        return self.map[i - 1]

    def compose(self, other: Permutation) -> Permutation:
        """``(self o other)(i) = self(other(i))``."""
        if other.dim != self.dim:
            raise NotPermutation("cannot compose permutations of different size")
        return Permutation(tuple(self(other(i)) for i in range(1, self.dim + 1)))

    def inverse(self) -> Permutation:
        inv = [0] * self.dim
        for i, j in enumerate(self.map, start=1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.map == tuple(range(1, self.dim + 1))

    def __str__(self) -> str:
        return "(" + " ".join(f"{i}->{j}" for i, j in enumerate(self.map, 1)) + ")"


def perm_matrix(p: Permutation) -> np.ndarray:
    """Matrix with ``result[p(i), i] = 1`` (1-based), zeros elsewhere."""
    d = p.dim
    out = np.zeros((d, d), dtype=np.complex128)
    out[p.zero_based, np.arange(d)] = 1.0
    return out


def phase_diag(thetas: Sequence[float]) -> np.ndarray:
    return np.diag(np.exp(1j * np.asarray(thetas, dtype=float)))


def conjugate(m, u, atol: float = ATOL) -> np.ndarray:
    """Return ``u m u^dag`` for unitary ``u``."""
    m = as_cmatrix(m)
    u = as_cmatrix(u)
    if u.shape != m.shape:
        raise ValueError(f"shape mismatch {u.shape} vs {m.shape}")
    if not is_unitary(u, atol):
        raise NotUnitary(f"||u^dag u - I||_max = {max_abs(u.conj().T @ u - np.eye(len(u))):.3e}")
    return u @ m @ u.conj().T
