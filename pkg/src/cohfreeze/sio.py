"""Strictly incoherent operations in generalized-permutation Kraus form.

A Kraus operator is stored as a permutation ``f`` plus coefficients ``c`` so
that ``K = sum_i c_i |f(i)><i|``. Channels are always in this parsed form;
raw matrices enter through :func:`validate_sio`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimMismatch,
    EmptyKraus,
    NotComplete,
    NotGeneralizedPermutation,
    OutOfRange,
)
from .linalg import Permutation, as_cmatrix

COEFF_ZERO = 1e-12
COMPLETENESS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SioKraus:
    perm: Permutation
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if c.shape[0] != self.perm.dim:
            raise DimMismatch(f"{c.shape[0]} coefficients for a permutation of {self.perm.dim}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.perm.dim

    def matrix(self) -> np.ndarray:
        d = self.dim
        out = np.zeros((d, d), dtype=np.complex128)
        out[self.perm.zero_based, np.arange(d)] = self.coeffs
        return out

    def is_zero(self, tol: float = COEFF_ZERO) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def active(self, tol: float = COEFF_ZERO) -> np.ndarray:
        """Boolean mask of columns with a nonzero coefficient."""
        return np.abs(self.coeffs) > tol


def kraus_from_matrix(m, index: int = 0, tol: float = COEFF_ZERO) -> SioKraus:
    """Parse one generalized-permutation matrix.

    Columns that are entirely zero are mapped onto the unused rows in
    ascending order, so the returned permutation is deterministic.
    """
    m = as_cmatrix(m)
    d = m.shape[0]
    nz = np.abs(m) > tol
    for j in range(d):
        if nz[:, j].sum() > 1:
            raise NotGeneralizedPermutation(index, "column", j + 1)
    for i in range(d):
        if nz[i, :].sum() > 1:
            raise NotGeneralizedPermutation(index, "row", i + 1)
    images = [-1] * d
    coeffs = np.zeros(d, dtype=np.complex128)
    used = set()
    for j in range(d):
        rows = np.flatnonzero(nz[:, j])
        if rows.size:
            images[j] = int(rows[0])
            coeffs[j] = m[rows[0], j]
            used.add(int(rows[0]))
    free = iter(r for r in range(d) if r not in used)
    for j in range(d):
        if images[j] < 0:
            images[j] = next(free)
    return SioKraus(Permutation.from_zero_based(images), coeffs)


@dataclass(frozen=True, eq=False)
class SioChannel:
    """A strictly incoherent operation. Construction enforces completeness."""

    kraus: tuple[SioKraus, ...]

    def __post_init__(self):
        ks = tuple(self.kraus)
        object.__setattr__(self, "kraus", ks)
        if not ks:
            raise EmptyKraus("a channel needs at least one Kraus operator")
        d = ks[0].dim
        for a, k in enumerate(ks):
            if k.dim != d:
                raise DimMismatch(f"Kraus operator {a} has dimension {k.dim}, expected {d}")
            if k.is_zero():
                raise EmptyKraus(f"Kraus operator {a} is zero")
        residual = float(np.max(np.abs(self.column_weights() - 1.0)))
        if residual > COMPLETENESS_TOL:
            raise NotComplete(residual)

    @property
    def dim(self) -> int:
        return self.kraus[0].dim

    def __len__(self) -> int:
        return len(self.kraus)

    def column_weights(self) -> np.ndarray:
        """``sum_a |c_{a,i}|^2``; this is the diagonal of ``sum K^dag K``."""
        return np.sum([np.abs(k.coeffs) ** 2 for k in self.kraus], axis=0)

    def matrices(self) -> list[np.ndarray]:
        return [k.matrix() for k in self.kraus]

    def completeness_residual(self) -> float:
        d = self.dim
        total = sum(m.conj().T @ m for m in self.matrices())
        return float(np.max(np.abs(total - np.eye(d))))


def validate_sio(kraus_matrices: Sequence) -> SioChannel:
    """Parse raw Kraus matrices, rejecting anything that is not an SIO."""
    mats = [as_cmatrix(m) for m in kraus_matrices]
    if not mats:
        raise EmptyKraus("no Kraus operators given")
    d = mats[0].shape[0]
    for a, m in enumerate(mats):
        if m.shape != (d, d):
            raise DimMismatch(f"Kraus operator {a} has shape {m.shape}, expected {(d, d)}")
    kraus = [kraus_from_matrix(m, a) for a, m in enumerate(mats)]
    for a, k in enumerate(kraus):
        if k.is_zero():
            raise EmptyKraus(f"Kraus operator {a} is zero")
    total = sum(m.conj().T @ m for m in mats)
    residual = float(np.max(np.abs(total - np.eye(d))))
    if residual > COMPLETENESS_TOL:
        raise NotComplete(residual)
    return SioChannel(tuple(kraus))


def apply(phi: SioChannel, rho) -> np.ndarray:
    """``sum_a K_a rho K_a^dag`` computed from the permutation form."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (phi.dim, phi.dim):
        raise DimMismatch(f"state is {rho.shape[0]}-dimensional, channel is {phi.dim}-dimensional")
    out = np.zeros_like(rho)
    for k in phi.kraus:
        f = k.perm.zero_based
        out[np.ix_(f, f)] += np.outer(k.coeffs, k.coeffs.conj()) * rho
    return out


def compose(phi: SioChannel, psi: SioChannel) -> SioChannel:
    """Kraus family of ``phi o psi`` (apply ``psi`` first); zero products are dropped."""
    if phi.dim != psi.dim:
        raise DimMismatch("cannot compose channels of different dimension")
    out = []
    for k in phi.kraus:
        for l in psi.kraus:
            perm = k.perm.compose(l.perm)
            coeffs = l.coeffs * k.coeffs[l.perm.zero_based]
            prod = SioKraus(perm, coeffs)
            if not prod.is_zero():
                out.append(prod)
    return SioChannel(tuple(out))


def identity_channel(d: int) -> SioChannel:
    return SioChannel((SioKraus(Permutation.identity(d), np.ones(d)),))


def unitary_channel(perm: Permutation, thetas) -> SioChannel:
    """Single Kraus operator ``P_perm diag(exp(i thetas))``."""
    return SioChannel((SioKraus(perm, np.exp(1j * np.asarray(thetas, dtype=float))),))


def _drop_zero(kraus) -> tuple[SioKraus, ...]:
    return tuple(k for k in kraus if not k.is_zero())


# two-qubit basis order |00>, |01>, |10>, |11>
_FLIP_SECOND = Permutation((2, 1, 4, 3))  # I (x) sigma_1
_FLIP_FIRST = Permutation((3, 4, 1, 2))  # sigma_1 (x) I
_FLIP_BOTH = Permutation((4, 3, 2, 1))  # sigma_1 (x) sigma_1


def local_bit_flip(q: float, variant: str = "display") -> SioChannel:
    """Two-qubit local bit-flip noise of strength ``q``.

    ``variant="display"`` uses ``K2 ~ s1 (x) I``, ``K3 ~ s1 (x) s1``,
    ``K4 ~ I (x) s1``; ``variant="standard"`` uses the independent per-qubit
    flip ``K2 ~ I (x) s1``, ``K3 ~ s1 (x) I``, ``K4 ~ s1 (x) s1``. Both are
    complete and agree on which Bell-diagonal states keep their coherence.
    Zero Kraus operators (``q = 0``) are omitted.
    """
    if not 0.0 <= q <= 1.0:
        raise OutOfRange(f"q = {q} outside [0, 1]")
    a = 1 - q / 2
    s = np.sqrt(q / 2 * (1 - q / 2))
    b = q / 2
    ones = np.ones(4)
    if variant == "display":
        perms = (_FLIP_FIRST, _FLIP_BOTH, _FLIP_SECOND)
    elif variant == "standard":
        perms = (_FLIP_SECOND, _FLIP_FIRST, _FLIP_BOTH)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    kraus = (
        SioKraus(Permutation.identity(4), a * ones),
        SioKraus(perms[0], s * ones),
        SioKraus(perms[1], s * ones),
        SioKraus(perms[2], b * ones),
    )
    return SioChannel(_drop_zero(kraus))


def qubit_freeze_channel(delta: float, theta1: float, theta2: float) -> SioChannel:
    """``delta U1 . U1^dag + (1 - delta) U2 . U2^dag`` with
    ``U1 = diag(e^{i theta1}, 1)`` and ``U2 = [[0, 1], [e^{i theta2}, 0]]``."""
    if not 0.0 < delta < 1.0:
        raise OutOfRange(f"delta = {delta} outside (0, 1)")
    u1 = SioKraus(Permutation((1, 2)), np.sqrt(delta) * np.array([np.exp(1j * theta1), 1.0]))
    u2 = SioKraus(Permutation((2, 1)), np.sqrt(1 - delta) * np.array([np.exp(1j * theta2), 1.0]))
    return SioChannel((u1, u2))


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def channel_to_dict(phi: SioChannel) -> dict:
    return {
        "dim": phi.dim,
        "kraus": [
            {"perm": list(k.perm.map), "coeffs": [_pair(c) for c in k.coeffs]}
            for k in phi.kraus
        ],
    }


def _matrix_from_json(obj, d: int | None) -> np.ndarray:
    # a dense matrix is either a d x d nest of [re, im] pairs or the state-style flat list
    if isinstance(obj, dict):
        d = int(obj["dim"])
        flat = np.array([complex(re, im) for re, im in obj["entries"]])
        return flat.reshape(d, d)
    arr = np.array(obj, dtype=float)
    if arr.ndim == 3 and arr.shape[2] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2 and d is not None and arr.shape == (d * d, 2):
        return (arr[:, 0] + 1j * arr[:, 1]).reshape(d, d)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return arr.astype(np.complex128)
    raise ValueError(f"cannot read a dense matrix of shape {arr.shape}")


def channel_from_dict(obj: dict) -> SioChannel:
    """Read the permutation form, or ``kraus_dense`` matrices routed through :func:`validate_sio`."""
    d = obj.get("dim")
    if "kraus_dense" in obj:
        try:
            mats = [_matrix_from_json(m, d) for m in obj["kraus_dense"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise DimMismatch(f"malformed dense Kraus operator: {exc}") from None
        return validate_sio(mats)
    try:
        kraus = []
        for entry in obj["kraus"]:
            coeffs = [complex(float(re), float(im)) for re, im in entry["coeffs"]]
            kraus.append(SioKraus(Permutation(tuple(entry["perm"])), np.array(coeffs)))
    except (KeyError, TypeError) as exc:
        raise DimMismatch(f"malformed channel object: {exc}") from None
    phi = SioChannel(tuple(kraus))
    if d is not None and int(d) != phi.dim:
        raise DimMismatch(f"declared dim {d} but Kraus operators are {phi.dim}-dimensional")
    return phi
