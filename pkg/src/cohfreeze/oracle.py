"""Brute-force cross-checks that share nothing with the analytic checkers but
dense matrix arithmetic."""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimTooLarge
from .freeze import STRUCT_TOL, alignment_gaps, decompose_mixed_unitary
from .linalg import Permutation, perm_matrix
from .measures import c_re
from .sio import apply, local_bit_flip, qubit_freeze_channel
from .states import bell_admissible, bell_diagonal, in_omega_x

MAX_ORACLE_DIM = 4


def exhaustive_unitary_oracle(rho, sigma, phase_grid_n: int = 64, diag_tol: float = 1e-9) -> bool:
    """Search every permutation and a phase grid for ``U rho U^dag = sigma``.

    Phases run over ``2 pi k / n``; the first phase is pinned to 0 because a
    global phase cancels. A candidate is accepted when diagonals agree to
    ``diag_tol`` (they do not depend on the phases) and every entry agrees to
    ``10 / n``.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    sigma = np.asarray(sigma, dtype=np.complex128)
    d = rho.shape[0]
    if d > MAX_ORACLE_DIM:
        raise DimTooLarge(f"oracle limited to d <= {MAX_ORACLE_DIM}")
    if phase_grid_n < 8:
        raise ValueError("phase_grid_n must be >= 8")
    tol = 10.0 / phase_grid_n
    grid = np.exp(2j * np.pi * np.arange(phase_grid_n) / phase_grid_n)
    # all phase vectors at once: shape (n^(d-1), d)
    combos = np.array(list(itertools.product(range(phase_grid_n), repeat=d - 1)), dtype=int).reshape(-1, d - 1)
    phases = np.concatenate([np.ones((len(combos), 1)), grid[combos]], axis=1)
    outer = phases[:, :, None] * phases[:, None, :].conj()
    for images in itertools.permutations(range(d)):
        p = perm_matrix(Permutation.from_zero_based(images))
        target = p.T @ sigma @ p  # pull sigma back: need D rho D^dag == P^dag sigma P
        if np.max(np.abs(np.diag(target) - np.diag(rho))) > diag_tol:
            continue
        err = np.max(np.abs(outer * rho - target), axis=(1, 2))
        if err.min() <= tol:
            return True
    return False


def _wrap(x: float) -> float:
    """Distance of ``x`` to the nearest multiple of ``2 pi``."""
    r = np.mod(x, 2 * np.pi)
    return float(min(r, 2 * np.pi - r))


@dataclass
class SweepResult:
    description: dict
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    agreements: int = 0
    disagreements: list[dict] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([f"{x:.12g}" if isinstance(x, float) else x for x in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "points": len(self.rows),
            "agreements": self.agreements,
            "disagreements": self.disagreements,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _qubit_kraus(delta: float, theta1: float, theta2: float) -> list[np.ndarray]:
    u1 = np.array([[np.exp(1j * theta1), 0], [0, 1]])
    u2 = np.array([[0, 1], [np.exp(1j * theta2), 0]])
    return [np.sqrt(delta) * u1, np.sqrt(1 - delta) * u2]


def qubit_condition_sweep(
    grid_n: int = 32,
    deltas=(0.25, 0.5, 0.75),
    p: float = 0.6,
    r: float = 0.4,
    tol: float = 1e-9,
    structural: bool = True,
) -> SweepResult:
    """Sweep ``(theta1, theta2, theta)`` over a ``grid_n``-point grid of ``[0, 2 pi)``.

    The state is ``[[p, r e^{i theta}], [r e^{-i theta}, 1 - p]]`` and the
    channel mixes ``diag(e^{i theta1}, 1)`` with weight ``delta`` and
    ``[[0, 1], [e^{i theta2}, 0]]``. A point is frozen (l1 changes by at most
    ``tol``) iff ``theta1 + theta2 + 2 theta`` is a multiple of ``2 pi``.
    Disagreements with that law, and with the structural checker when
    ``structural`` is set, are collected with a full witness.
    """
    if grid_n < 16:
        raise ValueError("grid_n must be >= 16")

    angles = 2 * np.pi * np.arange(grid_n) / grid_n
    result = SweepResult(
        {"grid_n": grid_n, "deltas": list(deltas), "p": p, "r": r, "tol": tol},
        ["delta", "theta1", "theta2", "theta", "c_l1_before", "c_l1_after", "frozen", "on_manifold", "structural"],
    )
    # batch of states over theta
    rhos = np.zeros((grid_n, 2, 2), dtype=np.complex128)
    rhos[:, 0, 0], rhos[:, 1, 1] = p, 1 - p
    rhos[:, 0, 1] = r * np.exp(1j * angles)
    rhos[:, 1, 0] = r * np.exp(-1j * angles)
    c_before = 2 * r
    for delta in deltas:
        for t1 in angles:
            for t2 in angles:
                ks = _qubit_kraus(delta, t1, t2)
                sig = sum(k @ rhos @ k.conj().T for k in ks)
                c_after = 2 * np.abs(sig[:, 0, 1])
                verdicts = [None] * grid_n
                if structural:
                    form = decompose_mixed_unitary(qubit_freeze_channel(delta, t1, t2))
                    if form is None:
                        aligned = np.zeros(grid_n, dtype=bool)
                    else:
                        aligned = alignment_gaps(form, rhos).max(axis=(1, 2)) <= STRUCT_TOL
                    # the structural claim needs the output coherent as well
                    coherent = np.abs(sig[:, 0, 1]) > 1e-12
                    verdicts = [bool(a) if c else None for a, c in zip(aligned, coherent)]
                for t, ca, verdict in zip(angles, c_after, verdicts):
                    frozen = bool(abs(c_before - ca) <= tol)
                    on = _wrap(t1 + t2 + 2 * t) <= 1e-9
                    ok = frozen == on and (verdict is None or verdict == frozen)
                    row = [delta, float(t1), float(t2), float(t), c_before, float(ca), frozen, on, verdict]
                    result.rows.append(row)
                    if ok:
                        result.agreements += 1
                    else:
                        result.disagreements.append(dict(zip(result.columns, row)))
    return result


def bell_sweep(grid: int = 21, qs=(0.1, 0.5, 0.9), tol_re: float = 1e-7, cond_tol: float = 1e-9,
               variant: str = "display", structural: bool = True) -> SweepResult:
    """Local bit-flip noise on the admissible Bell-diagonal grid.

    ``c_j`` run over ``grid`` evenly spaced values in ``[-1, 1]``. A point
    agrees when "relative entropy of coherence frozen" coincides with
    ``|c2 + c1 c3| <= cond_tol`` and, for X-state inputs and outputs, with
    the structural verdict.
    """
    from .xfreeze import x_structural_check

    half = (grid - 1) / 2
    values = [k / half - 1 if grid % 2 == 0 else (k - half) / half for k in range(grid)]
    result = SweepResult(
        {"grid": grid, "qs": list(qs), "tol_re": tol_re, "cond_tol": cond_tol, "variant": variant},
        ["c1", "c2", "c3", "q", "c_re_before", "c_re_after", "frozen", "structural_verdict"],
    )
    channels = {q: local_bit_flip(q, variant) for q in qs}
    for c1 in values:
        for c2 in values:
            for c3 in values:
                if not bell_admissible(c1, c2, c3):
                    continue
                rho = bell_diagonal(c1, c2, c3)
                before = c_re(rho)
                cond = abs(c2 + c1 * c3) <= cond_tol
                for q in qs:
                    phi = channels[q]
                    sigma = apply(phi, rho)
                    after = c_re(sigma)
                    frozen = abs(before - after) <= tol_re
                    verdict = None
                    if structural and in_omega_x(rho) and in_omega_x(sigma):
                        verdict = x_structural_check(phi, rho, "re", tol=tol_re, strict=False).verdict
                    row = [c1, c2, c3, q, before, after, frozen, verdict]
                    result.rows.append(row)
                    if frozen == cond and (verdict is None or verdict == frozen):
                        result.agreements += 1
                    else:
                        result.disagreements.append(dict(zip(result.columns, row)))
    return result
