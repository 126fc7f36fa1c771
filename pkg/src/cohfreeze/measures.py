"""Von Neumann entropy, dephasing, and the l1 / relative-entropy coherence measures.

Entropy is ``S(rho) = -Tr rho log2 rho`` (bits) and the relative entropy of
coherence is ``S(dephase(rho)) - S(rho)``, the sign choice that keeps both
quantities nonnegative.
"""

from __future__ import annotations

import enum

import numpy as np

from .linalg import herm_eigenvalues

EIG_ZERO = 1e-12
TOL_L1 = 1e-9
TOL_RE = 1e-7


class Measure(str, enum.Enum):
    L1 = "l1"
    RE = "re"

    @classmethod
    def parse(cls, value) -> "Measure":
        if isinstance(value, cls):
            return value
        key = str(value).lower()
        aliases = {"l1": cls.L1, "re": cls.RE, "relent": cls.RE, "rel_ent": cls.RE}
        if key not in aliases:
            raise ValueError(f"unknown measure {value!r}; use 'l1' or 're'")
        return aliases[key]

    @property
    def default_tol(self) -> float:
        return TOL_L1 if self is Measure.L1 else TOL_RE


def dephase(rho) -> np.ndarray:
    rho = np.asarray(rho)
    return np.diag(np.diag(rho)).astype(np.complex128)


def shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > EIG_ZERO]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def entropy(rho) -> float:
    """Von Neumann entropy in bits."""
    return shannon_bits(herm_eigenvalues(rho))


def c_l1(rho) -> float:
    rho = np.asarray(rho)
    return float(np.sum(np.abs(rho)) - np.sum(np.abs(np.diag(rho))))


def c_re(rho) -> float:
    diag = np.real(np.diag(np.asarray(rho)))
    value = shannon_bits(diag) - entropy(rho)
    # eigensolver noise can push the difference a hair below zero
    return value if value > 0 else 0.0


def coherence(rho, measure) -> float:
    return c_l1(rho) if Measure.parse(measure) is Measure.L1 else c_re(rho)
