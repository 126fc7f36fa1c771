"""Operational freeze check, with the matching structural verdict when one applies."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimMismatch
from .freeze import STRUCT_TOL, omega_structural_check
from .measures import Measure, coherence
from .sio import SioChannel, apply
from .states import ZERO_TOL, classify
from .xfreeze import x_structural_check


@dataclass
class FreezeReport:
    measure: Measure
    c_before: float
    c_after: float
    operational_frozen: bool
    hypothesis_ok: bool
    domain: Optional[str] = None  # "omega" or "x_state" when hypothesis_ok
    structural_frozen: Optional[bool] = None
    agreement: Optional[bool] = None
    reason: str = ""
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "measure": self.measure.value,
            "c_before": self.c_before,
            "c_after": self.c_after,
            "operational_frozen": self.operational_frozen,
            "hypothesis_ok": self.hypothesis_ok,
            "domain": self.domain,
            "structural_frozen": self.structural_frozen,
            "agreement": self.agreement,
            "reason": self.reason,
            "witness": self.witness,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def check_frozen(
    phi: SioChannel,
    rho,
    measure,
    *,
    tol: float | None = None,
    struct_tol: float = STRUCT_TOL,
    zero_tol: float = ZERO_TOL,
    strict: bool = True,
) -> FreezeReport:
    """Compare ``C(rho)`` with ``C(Phi(rho))`` and run the structural check.

    Omega takes precedence when both input and output lie in Omega; the X
    state check runs when both lie in Omega_X. Otherwise no structural claim
    is made and ``hypothesis_ok`` is False. With ``strict`` a structural /
    operational disagreement raises ``TheoremViolation``.
    """
    m = Measure.parse(measure)
    tol = m.default_tol if tol is None else tol
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (phi.dim, phi.dim):
        raise DimMismatch(f"state is {rho.shape[0]}-dimensional, channel is {phi.dim}-dimensional")
    sigma = apply(phi, rho)
    before, after = coherence(rho, m), coherence(sigma, m)
    report = FreezeReport(m, before, after, abs(before - after) <= tol, hypothesis_ok=False)
    cls_in, cls_out = classify(rho, zero_tol), classify(sigma, zero_tol)
    kwargs = dict(tol=tol, struct_tol=struct_tol, zero_tol=zero_tol, strict=strict)
    if cls_in.in_omega and cls_out.in_omega:
        res = omega_structural_check(phi, rho, m, **kwargs)
        report.domain = "omega"
    elif cls_in.in_omega_x and cls_out.in_omega_x:
        res = x_structural_check(phi, rho, m, **kwargs)
        report.domain = "x_state"
    else:
        report.reason = f"no structural claim: input {cls_in.names()}, output {cls_out.names()}"
        return report
    report.hypothesis_ok = True
    report.structural_frozen = res.verdict
    report.agreement = res.agrees
    report.reason = res.reason
    report.witness = res.witness
    return report
