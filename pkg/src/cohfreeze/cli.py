"""Command-line front end.

Exit codes: 0 on success, 2 on invalid input (bad flags, malformed JSON,
rejected state or channel), 3 when a structural checker disagrees with the
operational verdict.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .checks import check_frozen
from .errors import CoherenceError, TheoremViolation
from .freeze import bistochastic_of, decompose_mixed_unitary
from .generators import (
    X_MODES,
    aligned_mixed_unitary_pair,
    equal_block_x_state,
    random_block_channel,
    random_nonuniform_sio,
    si_unitary_channel,
    two_permutation_mixture,
)
from .measures import TOL_L1, TOL_RE, Measure, c_l1, c_re
from .oracle import bell_sweep, qubit_condition_sweep
from .sio import apply, channel_from_dict
from .states import classify, random_in_omega, random_x_state, state_from_dict, state_to_dict
from .xfreeze import decompose_x, pairing_permutation, parse_block_form, qutrit_form_channel


class InputError(Exception):
    """Unreadable input file; reported with exit code 2."""


def _load_json(path: str):
    try:
        with open(path) as f:
            text = f.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"MalformedJSON: {path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _need(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise InputError(f"--{name} is required for {args.command}")
    return value


def _state(args) -> np.ndarray:
    return state_from_dict(_load_json(_need(args, "state")))


def _channel(args):
    return channel_from_dict(_load_json(_need(args, "channel")))


def _tol(args, m: Measure) -> float:
    return args.tol_l1 if m is Measure.L1 else args.tol_re


def _pair(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


# --- commands -----------------------------------------------------------------
# each returns (report dict, csv rows or None)


def cmd_measure(args):
    rho = _state(args)
    out = {"dim": int(rho.shape[0]), "class": classify(rho).names()}
    if args.measure in (None, "l1"):
        out["c_l1"] = c_l1(rho)
    if args.measure in (None, "re"):
        out["c_re"] = c_re(rho)
    return out, None


def cmd_apply(args):
    sigma = apply(_channel(args), _state(args))
    return state_to_dict(sigma), None


def cmd_check_freeze(args):
    m = Measure.parse(_need(args, "measure"))
    report = check_frozen(_channel(args), _state(args), m, tol=_tol(args, m))
    return report.to_dict(), None


def cmd_classify_sio(args):
    phi = _channel(args)
    form = decompose_mixed_unitary(phi)
    out = {
        "dim": phi.dim,
        "n_kraus": len(phi.kraus),
        "kraus": [
            {
                "perm": list(k.perm.map),
                "moduli": [float(x) for x in np.abs(k.coeffs)],
                "uniform_modulus": bool(np.ptp(np.abs(k.coeffs)) <= 1e-9),
            }
            for k in phi.kraus
        ],
        "mixed_unitary": form.to_dict() if form is not None else None,
        "bistochastic": bistochastic_of(form).tolist() if form is not None else None,
    }
    if phi.dim >= 2:
        pi = pairing_permutation(phi.dim)
        forms = [parse_block_form(k, pi) for k in phi.kraus]
        out["block_forms"] = [f.to_dict() for f in forms] if all(f is not None for f in forms) else None
    return out, None


def cmd_x_decompose(args):
    rho = _state(args)
    dec = decompose_x(rho)
    out = {
        "dim": dec.dim,
        "pairing": list(dec.pi.map),
        "lambdas": [float(x) for x in dec.lambdas],
        "blocks": [[_pair(z) for z in b.ravel()] for b in dec.blocks],
        "tail": dec.tail,
        "reassembly_error": float(np.max(np.abs(dec.reassemble() - rho))),
    }
    return out, None


def _sweep_output(result):
    if result.disagreements:
        raise TheoremViolation(
            f"{len(result.disagreements)} sweep points disagree with the freezing law",
            result.disagreements[0],
        )
    return result.to_dict(), [result.columns] + result.rows


def cmd_reproduce(args):
    if args.which == "qubit":
        return _sweep_output(qubit_condition_sweep(args.grid or 32, tol=args.tol_l1))
    if args.which == "bell":
        qs = tuple(args.q) if args.q else (0.1, 0.5, 0.9)
        return _sweep_output(bell_sweep(args.grid or 21, qs, tol_re=args.tol_re, variant=args.variant))
    return _qutrit_report(args)


QUTRIT_FORMS = [
    "(1) diag(d11 e^{i theta1}, d11, d13)",
    "(2) [[0, d21, 0], [d21 e^{i theta2}, 0, 0], [0, 0, d23]]",
    "(3) d33 |1><3|",
    "(4) d43 |2><3|",
]


def _qutrit_report(args):
    """Forms (1) and (2) on an X state with ``theta = arg rho_13``."""
    theta = 0.7
    rho = np.array(
        [[0.4, 0, 0.3 * np.exp(1j * theta)], [0, 0.2, 0], [0.3 * np.exp(-1j * theta), 0, 0.4]]
    )
    theta1 = 0.3
    rows = [["theta1", "theta2", "theta1+theta2+2theta", "measure", "c_before", "c_after", "frozen", "structural"]]
    instances = []
    for theta2 in (-theta1 - 2 * theta, -theta1 - 2 * theta + 2 * np.pi, 1.0):
        phi = qutrit_form_channel(np.sqrt(0.3), np.sqrt(0.7), np.sqrt(0.5), np.sqrt(0.5), 0, 0, theta1, theta2)
        for m in (Measure.L1, Measure.RE):
            r = check_frozen(phi, rho, m, tol=_tol(args, m))
            rows.append([theta1, theta2, theta1 + theta2 + 2 * theta, m.value, r.c_before, r.c_after,
                         r.operational_frozen, r.structural_frozen])
            instances.append(dict(zip(rows[0], rows[-1])))
    out = {
        "forms": QUTRIT_FORMS,
        "paired_coordinates": list(pairing_permutation(3).map),
        "state": state_to_dict(rho),
        "theta": theta,
        "instances": instances,
    }
    return out, rows


SUITE_FAMILIES = ("aligned_mixture", "nonuniform", "si_unitary", "two_permutation", "x_block")


def _suite_trial(index: int, seed: int, dims: list[int], args) -> list[dict]:
    rng = np.random.default_rng([seed, index])
    d = dims[index % len(dims)]
    family = SUITE_FAMILIES[index % len(SUITE_FAMILIES)]
    if family == "aligned_mixture":
        form, rho = aligned_mixed_unitary_pair(d, rng)
        phi = form.to_channel()
    elif family == "nonuniform":
        rho, phi = random_in_omega(d, rng), random_nonuniform_sio(d, rng)
    elif family == "si_unitary":
        rho, phi = random_in_omega(d, rng), si_unitary_channel(d, rng)
    elif family == "two_permutation":
        rho, phi = random_in_omega(d, rng), two_permutation_mixture(d, rng).to_channel()
    else:
        d = max(d, 3)
        mode = X_MODES[(index // len(SUITE_FAMILIES)) % len(X_MODES)]
        rho = equal_block_x_state(d, rng) if mode == "equal_blocks" else random_x_state(d, rng)
        phi = random_block_channel(d, rng, mode, rho)
        family = f"x_block:{mode}"
    rows = []
    for m in (Measure.L1, Measure.RE):
        r = check_frozen(phi, rho, m, tol=_tol(args, m))
        rows.append({
            "trial": index,
            "dim": d,
            "family": family,
            "measure": m.value,
            "c_before": r.c_before,
            "c_after": r.c_after,
            "operational_frozen": r.operational_frozen,
            "domain": r.domain,
            "structural_frozen": r.structural_frozen,
            "agreement": r.agreement,
        })
    return rows


def cmd_random_suite(args):
    seed = 0 if args.seed is None else args.seed
    trials = 100 if args.trials is None else args.trials
    dims = args.dims or [2, 3, 4, 5, 6]
    records = []
    for i in range(trials):
        records += _suite_trial(i, seed, dims, args)
    checked = [r for r in records if r["domain"] is not None]
    out = {
        "seed": seed,
        "trials": trials,
        "dims": dims,
        "checks": len(records),
        "structural_checks": len(checked),
        "agreements": sum(bool(r["agreement"]) for r in checked),
        "records": records,
    }
    cols = list(records[0]) if records else []
    return out, [cols] + [[r[c] for c in cols] for r in records]


# --- output -------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _render(report: dict, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        if rows is None:
            rows = [list(report), [json.dumps(v) if isinstance(v, (list, dict)) else v for v in report.values()]]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in rows:
            w.writerow([_fmt(x) for x in row])
        return buf.getvalue()
    lines = []
    for key, value in report.items():
        if key in ("records", "instances") and isinstance(value, list):
            lines.append(f"{key}: {len(value)}")
            for item in value:
                lines.append("  " + "  ".join(f"{k}={_fmt(v)}" for k, v in item.items()))
        elif isinstance(value, (list, dict)):
            lines.append(f"{key}: {json.dumps(value)}")
        else:
            lines.append(f"{key}: {_fmt(value)}")
    return "\n".join(lines) + "\n"


COMMANDS = {
    "measure": cmd_measure,
    "apply": cmd_apply,
    "check-freeze": cmd_check_freeze,
    "classify-sio": cmd_classify_sio,
    "x-decompose": cmd_x_decompose,
    "reproduce": cmd_reproduce,
    "random-suite": cmd_random_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", help="state JSON file")
    common.add_argument("--channel", help="channel JSON file")
    common.add_argument("--measure", choices=["l1", "re"])
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--format", choices=["json", "csv", "table"])
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--tol-l1", type=float, default=TOL_L1)
    common.add_argument("--tol-re", type=float, default=TOL_RE)

    parser = argparse.ArgumentParser(prog="cohfreeze", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("measure", parents=[common], help="coherence of a state")
    sub.add_parser("apply", parents=[common], help="apply a channel to a state")
    sub.add_parser("check-freeze", parents=[common], help="operational and structural freeze check")
    sub.add_parser("classify-sio", parents=[common], help="mixed-unitary and block-form structure of a channel")
    sub.add_parser("x-decompose", parents=[common], help="block decomposition of an X state")
    rep = sub.add_parser("reproduce", parents=[common], help="worked examples")
    rep.add_argument("which", choices=["qubit", "qutrit", "bell"])
    rep.add_argument("--grid", type=int, help="grid points per axis")
    rep.add_argument("--q", type=float, action="append", help="bit-flip strength (repeatable)")
    rep.add_argument("--variant", choices=["display", "standard"], default="display")
    suite = sub.add_parser("random-suite", parents=[common], help="randomized structural/operational agreement suite")
    suite.add_argument("--dims", type=int, nargs="+")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, rows = COMMANDS[args.command](args)
    except TheoremViolation as exc:
        print(f"error: TheoremViolation: {exc}", file=sys.stderr)
        print(json.dumps(exc.witness, default=str), file=sys.stderr)
        return 3
    except CoherenceError as exc:
        print(f"error: {exc.name}: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fmt = args.format or ("csv" if args.command == "reproduce" and args.which != "qutrit" else "table")
    text = _render(report, rows, fmt)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
