"""Command-line front end: file formats, the capacity test, sweeps, bounds.

Verbs: choi, test, sweep-isotropic, param, verify-paper. States and
channels travel as JSON with [re, im] pairs in row-major nested arrays;
sweeps produce CSV. Exit codes: 0 = certified feasible (zero one-way
capacity), 1 = not certified, 2 = input error. Code 1 makes no claim of
positive capacity; the test is one-sided.
"""

import argparse
import json
import sys

import numpy as np

from .extend import (
    FEASIBLE,
    ExtensionProblem,
    run_isotropic_sweep,
    solve_extension,
    test_channel,
)
from .param import bound_report
from .quantum import ChoiState, DensityMatrix, KrausChannel, choi_from_kraus

__all__ = [
    "encode_matrix",
    "decode_matrix",
    "state_to_payload",
    "state_from_payload",
    "channel_from_payload",
    "main",
]


class InputError(Exception):
    """Raised for malformed or invariant-violating input files."""


def encode_matrix(m) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m)]


def decode_matrix(payload, field: str) -> np.ndarray:
    try:
        arr = np.array(
            [[complex(cell[0], cell[1]) for cell in row] for row in payload]
        )
    except (TypeError, IndexError, ValueError) as exc:
        raise InputError(f"field '{field}' is not a nested [re, im] array: {exc}")
    return arr


def state_to_payload(state: DensityMatrix, metadata=None) -> dict:
    payload = {"dims": list(state.dims), "matrix": encode_matrix(state.matrix)}
    if metadata:
        payload["metadata"] = metadata
    return payload


def state_from_payload(payload) -> DensityMatrix:
    if not isinstance(payload, dict):
        raise InputError("state file must contain a JSON object")
    for field in ("dims", "matrix"):
        if field not in payload:
            raise InputError(f"state file is missing required field '{field}'")
    try:
        dims = tuple(int(d) for d in payload["dims"])
    except (TypeError, ValueError) as exc:
        raise InputError(f"field 'dims' must be a list of integers: {exc}")
    matrix = decode_matrix(payload["matrix"], "matrix")
    try:
        return DensityMatrix(matrix, dims)
    except ValueError as exc:
        raise InputError(f"field 'matrix' violates a state invariant: {exc}")


def channel_from_payload(payload) -> KrausChannel:
    if not isinstance(payload, dict):
        raise InputError("channel file must contain a JSON object")
    for field in ("d_in", "d_out", "kraus"):
        if field not in payload:
            raise InputError(f"channel file is missing required field '{field}'")
    try:
        d_in, d_out = int(payload["d_in"]), int(payload["d_out"])
    except (TypeError, ValueError) as exc:
        raise InputError(f"fields 'd_in'/'d_out' must be integers: {exc}")
    if not isinstance(payload["kraus"], list) or not payload["kraus"]:
        raise InputError("field 'kraus' must be a non-empty list of matrices")
    ops = [decode_matrix(k, f"kraus[{i}]") for i, k in enumerate(payload["kraus"])]
    try:
        return KrausChannel(d_in, d_out, tuple(ops))
    except ValueError as exc:
        raise InputError(f"field 'kraus' violates the channel invariant: {exc}")


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read '{path}': {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"'{path}' is not valid JSON: {exc}")


def _load_state_or_channel(path: str):
    payload = _load_json(path)
    if isinstance(payload, dict) and "kraus" in payload:
        return channel_from_payload(payload)
    return state_from_payload(payload)


def _write_json(path: str, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def cmd_choi(args) -> int:
    ch = channel_from_payload(_load_json(args.channel_file))
    choi = choi_from_kraus(ch)
    _write_json(args.out_file, state_to_payload(choi.state, {"name": "choi"}))
    print(f"wrote Choi state ({choi.d_in} x {choi.d_out}) to {args.out_file}")
    return 0


def cmd_test(args) -> int:
    loaded = _load_state_or_channel(args.input_file)
    if isinstance(loaded, KrausChannel):
        result = test_channel(loaded, tol=args.tol, max_iter=args.max_iter)
        cert = result.certificate
        state = result.choi
        capacity = result.message
    else:
        state = loaded
        cert = solve_extension(
            ExtensionProblem(target=state, tol=args.tol, max_iter=args.max_iter)
        )
        if cert.verdict == FEASIBLE:
            capacity = "one-way capacity Q-> = 0 (certified by symmetric extension)"
        else:
            capacity = "test inconclusive for capacity"
    report = {
        "verdict": cert.verdict,
        "psd_residual": cert.psd_residual,
        "swap_residual": cert.swap_residual,
        "pt_residual": cert.pt_residual,
        "iterations": cert.iterations,
        "capacity": capacity,
    }
    if cert.verdict == FEASIBLE:
        d_a, d_b = state.dims
        report["extension"] = {
            "dims": [d_a, d_b, d_b],
            "matrix": encode_matrix(cert.candidate),
        }
    if args.out_report:
        _write_json(args.out_report, report)
    print(f"verdict: {cert.verdict} ({cert.iterations} iterations)")
    print(
        f"residuals: psd={cert.psd_residual:.3e} swap={cert.swap_residual:.3e} "
        f"pt={cert.pt_residual:.3e}"
    )
    print(capacity)
    return 0 if cert.verdict == FEASIBLE else 1


def cmd_sweep_isotropic(args) -> int:
    if not 2 <= args.d <= 4:
        raise InputError(f"sweep supports dimensions 2..4, got {args.d}")
    if not (0.0 <= args.f_min <= args.f_max <= 1.0) or args.steps < 1:
        raise InputError(
            f"bad sweep range: f in [{args.f_min}, {args.f_max}], steps={args.steps}"
        )
    result = run_isotropic_sweep(
        args.d,
        args.f_min,
        args.f_max,
        args.steps,
        tol=args.tol,
        max_iter=args.max_iter,
        parallel=args.parallel,
    )
    with open(args.out_csv, "w") as fh:
        fh.write("F,verdict,psd_res,swap_res,pt_res,iters\n")
        for row in result.rows:
            fh.write(
                f"{row.fidelity!r},{row.verdict},{row.psd_residual!r},"
                f"{row.swap_residual!r},{row.pt_residual!r},{row.iterations}\n"
            )
        if result.boundary is not None:
            fh.write(f"# boundary_estimate = {result.boundary!r}\n")
    if result.boundary is not None:
        print(f"boundary estimate: {result.boundary}")
    print(f"wrote {len(result.rows)} rows to {args.out_csv}")
    return 0


def cmd_param(args) -> int:
    state = state_from_payload(_load_json(args.state_file))
    report = bound_report(
        state,
        tol=args.tol,
        max_iter=args.max_iter,
        fw_max_iter=args.fw_max_iter,
        gap_tol=args.gap_tol,
    )
    payload = {
        "lower_hashing": report.lower,
        "hashing_raw": report.hashing_raw,
        "upper": report.upper,
        "extendible": report.extendible,
        "negativity": report.negativity,
        "distance_estimate": report.parameter.value,
        "fw_gap": report.parameter.fw_gap,
        "certified_zero": report.certified_zero,
    }
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"hashing lower bound: {report.lower:.6f} (raw {report.hashing_raw:.6f})")
        print(
            f"distance estimate: {report.parameter.value:.6f} "
            f"(fw_gap {report.parameter.fw_gap:.2e})"
        )
        print(f"extendibility: {report.extendible}; negativity: {report.negativity:.6f}")
        if report.certified_zero:
            print("D-> = 0 certified (symmetric extension found); "
                  f"upper bound {report.upper:.6f}")
        else:
            print(f"upper bound (single copy): {report.upper:.6f}")
    return 0 if report.certified_zero else 1


def cmd_verify_paper(args) -> int:
    from .acceptance import run_checks

    checks = run_checks(only=args.only, seed=args.seed)
    if not checks:
        print(f"no checks match filter {args.only!r}")
        return 2
    width = max(len(c.name) for c in checks)
    all_ok = True
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        all_ok &= c.passed
        print(
            f"{status}  {c.name:<{width}}  target={c.target}  "
            f"measured={c.measured}  tol={c.tolerance}  ({c.seconds:.1f}s)"
        )
    print("all checks passed" if all_ok else "SOME CHECKS FAILED")
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symext",
        description="symmetric-extendibility tests for quantum channels and states",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("choi", help="convert a Kraus channel file to its Choi state")
    p.add_argument("channel_file")
    p.add_argument("out_file")
    p.set_defaults(func=cmd_choi)

    p = sub.add_parser("test", help="test a state or channel for symmetric extendibility")
    p.add_argument("input_file")
    p.add_argument("out_report", nargs="?", default=None)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=20000)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("sweep-isotropic", help="grid the isotropic family")
    p.add_argument("out_csv")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--f-min", type=float, required=True)
    p.add_argument("--f-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_sweep_isotropic)

    p = sub.add_parser("param", help="bounds on one-way distillable entanglement")
    p.add_argument("state_file")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--fw-max-iter", type=int, default=2000)
    p.add_argument("--gap-tol", type=float, default=1e-5)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_param)

    p = sub.add_parser("verify-paper", help="run the acceptance battery")
    p.add_argument("--only", default=None, help="substring filter on check names")
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_verify_paper)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - exit codes must stay in {0,1,2}
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
