"""
Command-line interface: lattice generation/validation, exact values,
estimation, dense emulation, and method comparison.

Structured results go to stdout as one JSON document per line (schema
"colorz/result/v1"); human-readable summaries go to stderr.  Runs are
reproducible: the seed is always echoed in the output document, and
re-running with the echoed seed and configuration reproduces identical
numeric fields.

Exit codes: 0 success, 2 usage error, 3 file not found, 4 parse error,
5 validation failure, 6 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import secrets
import sys
from typing import Optional

import numpy as np

from . import __version__
from .colex import (
    Colex,
    ColexFormatError,
    ColexValidationError,
    derived_quantities,
    generate_hexagonal,
    generate_square_octagon,
    load_colex,
    save_colex,
    validate,
)
from .estimator import (
    compare_methods,
    estimate_expectation,
    plan_samples,
    plan_with_sample_count,
)
from .gf2 import DEFAULT_ENUM_CAP, CapExceededError
from .ising import (
    IsingModel,
    exact_overlap,
    gamma,
    load_couplings,
    log_Z_spin_enumeration,
    log_expectation_codeword_sum,
)
from .qsim import DEFAULT_QUBIT_CAP, emulate_quantum_protocol

SCHEMA = "colorz/result/v1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_PARSE = 4
EXIT_VALIDATION = 5
EXIT_CAP = 6


def _parse_dims(text: str) -> tuple[int, int]:
    try:
        r, c = text.lower().split("x")
        return int(r), int(c)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got {text!r}") from exc


def _parse_grid(text: str) -> list[float]:
    try:
        start, stop, steps = text.split(":")
        values = np.linspace(float(start), float(stop), int(steps))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected START:STOP:STEPS, got {text!r}") from exc
    return [float(b) for b in values]


def _add_lattice_args(p: argparse.ArgumentParser, generator_only: bool = False) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--hex", type=_parse_dims, metavar="RxC", help="hexagonal torus, RxC unit cells")
    g.add_argument(
        "--squareoct", type=_parse_dims, metavar="RxC", help="square-octagon torus, RxC unit cells"
    )
    if not generator_only:
        g.add_argument("--colex", metavar="FILE", help="colex JSON file (validated on load)")


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta", type=float, help="inverse temperature (>= 0)")
    p.add_argument(
        "--beta-grid", type=_parse_grid, metavar="START:STOP:STEPS", help="sweep: one document per point"
    )
    p.add_argument("--uniform-j", type=float, help="same coupling J at every vertex")
    p.add_argument("--couplings", metavar="FILE", help='couplings JSON: {"beta":..,"couplings":[..]}')


def _add_sampling_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=0.1, help="additive error target (0, 2]")
    p.add_argument("--confidence", type=float, default=0.95, help="success probability (0, 1)")
    p.add_argument("--samples", type=int, help="override the planned sample count K")
    p.add_argument("--seed", type=int, help="RNG seed (random and echoed when omitted)")
    p.add_argument("--threads", type=int, default=1, help="sampling worker threads")


def _resolve_lattice(args) -> tuple[Colex, str]:
    if args.hex is not None:
        r, c = args.hex
        return generate_hexagonal(r, c), f"hex:{r}x{c}"
    if args.squareoct is not None:
        r, c = args.squareoct
        return generate_square_octagon(r, c), f"squareoct:{r}x{c}"
    return load_colex(args.colex), f"file:{args.colex}"


def _lattice_summary(colex: Colex, source: str) -> dict:
    d = derived_quantities(colex)
    return {
        "source": source,
        "vertices": d.vertices,
        "edges": d.edges,
        "faces": d.faces,
        "chi": d.chi,
        "genus": d.genus,
        "encoded_qubits": d.encoded_qubits,
    }


def _resolve_betas_and_couplings(args, colex: Colex) -> tuple[list[float], tuple[float, ...]]:
    if args.uniform_j is not None and args.couplings is not None:
        raise ValueError("give either --uniform-j or --couplings, not both")
    file_beta: Optional[float] = None
    if args.couplings is not None:
        file_beta, couplings = load_couplings(args.couplings, colex.vertex_count)
    else:
        j = args.uniform_j if args.uniform_j is not None else 1.0
        couplings = (float(j),) * colex.vertex_count
    if args.beta_grid is not None:
        betas = args.beta_grid
    elif args.beta is not None:
        betas = [args.beta]
    elif file_beta is not None:
        betas = [file_beta]
    else:
        raise ValueError("no inverse temperature: give --beta, --beta-grid, or a couplings file")
    return betas, couplings


def _resolve_seed(args) -> int:
    return args.seed if args.seed is not None else secrets.randbits(62)


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")
    sys.stdout.flush()


def _say(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _json_float(x: float):
    return x if math.isfinite(x) else repr(x)


def _model_summary(model: IsingModel) -> dict:
    return {"beta": model.beta, "couplings": list(model.couplings)}


def cmd_generate(args) -> int:
    colex, source = _resolve_lattice(args)
    if args.out:
        save_colex(colex, args.out)
        _emit(
            {
                "schema": SCHEMA,
                "command": "generate",
                "lattice": _lattice_summary(colex, source),
                "out": args.out,
            }
        )
        _say(f"wrote {source} to {args.out}")
    else:
        sys.stdout.write(json.dumps(colex.to_dict()) + "\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    # load without the loader's validation so the report lands in our output
    if args.colex is not None:
        try:
            colex, source = _resolve_lattice(args)
            report = validate(colex)
        except ColexValidationError as exc:
            colex, source, report = None, f"file:{args.colex}", exc.report
    else:
        colex, source = _resolve_lattice(args)
        report = validate(colex)
    doc = {
        "schema": SCHEMA,
        "command": "validate",
        "ok": report.ok,
        "violations": [{"code": v.code, "message": v.message} for v in report.violations],
    }
    if colex is not None and report.ok:
        doc["lattice"] = _lattice_summary(colex, source)
    _emit(doc)
    if not report.ok:
        _say(f"{source} failed validation:")
        for v in report.violations:
            _say(f"  {v}")
        return EXIT_VALIDATION
    _say(f"{source}: ok")
    return EXIT_OK


def cmd_exact(args) -> int:
    colex, source = _resolve_lattice(args)
    betas, couplings = _resolve_betas_and_couplings(args, colex)
    for beta in betas:
        model = IsingModel(colex, beta, couplings)
        log_e = log_expectation_codeword_sum(model, cap=args.enum_cap)
        log_z = gamma(model).log - (colex.face_count - 2) / 2 * math.log(2.0) + log_e
        values = {
            "log_z": log_z,
            "z": _json_float(math.exp(log_z) if log_z < 709 else math.inf),
            "expectation": math.exp(log_e),
            "overlap": exact_overlap(model, cap=args.enum_cap),
            "log_gamma": gamma(model).log,
        }
        if args.cross_check:
            log_z_spin = log_Z_spin_enumeration(model, cap=args.enum_cap)
            values["log_z_spin_enumeration"] = log_z_spin
            values["log_z_relative_gap"] = abs(log_z_spin - log_z)
        _emit(
            {
                "schema": SCHEMA,
                "command": "exact",
                "lattice": _lattice_summary(colex, source),
                "model": _model_summary(model),
                "method": "codeword-sum",
                "values": values,
            }
        )
        _say(f"beta={beta:g}: ln Z = {log_z:.12g}")
    return EXIT_OK


def _sampling_plan(args):
    if args.samples is not None:
        return plan_with_sample_count(args.samples, args.confidence)
    return plan_samples(args.epsilon, args.confidence)


def cmd_estimate(args) -> int:
    colex, source = _resolve_lattice(args)
    betas, couplings = _resolve_betas_and_couplings(args, colex)
    seed = _resolve_seed(args)
    plan = _sampling_plan(args)
    for beta in betas:
        model = IsingModel(colex, beta, couplings)
        result = estimate_expectation(
            model, plan, seed, sampler=args.sampler, threads=args.threads
        )
        _emit(
            {
                "schema": SCHEMA,
                "command": "estimate",
                "lattice": _lattice_summary(colex, source),
                "model": _model_summary(model),
                "plan": {"epsilon": plan.epsilon, "confidence": plan.confidence},
                "values": result.to_dict(),
                "seed": seed,
                "wall_time_s": result.wall_time_s,
            }
        )
        _say(
            f"beta={beta:g}: Z_est = {result.z_estimate:.6g} "
            f"(ln|Z| = {result.log_abs_z_estimate:.6g}, K = {result.samples_used}, seed = {seed})"
        )
    return EXIT_OK


def cmd_qsim(args) -> int:
    colex, source = _resolve_lattice(args)
    betas, couplings = _resolve_betas_and_couplings(args, colex)
    seed = _resolve_seed(args)
    plan = _sampling_plan(args)
    for beta in betas:
        model = IsingModel(colex, beta, couplings)
        result = emulate_quantum_protocol(model, plan, seed, cap=args.qubit_cap)
        _emit(
            {
                "schema": SCHEMA,
                "command": "qsim",
                "lattice": _lattice_summary(colex, source),
                "model": _model_summary(model),
                "plan": {"epsilon": plan.epsilon, "confidence": plan.confidence},
                "values": result.to_dict(),
                "seed": seed,
                "wall_time_s": result.wall_time_s,
            }
        )
        _say(f"beta={beta:g}: Z_est = {result.z_estimate:.6g} (dense emulation, seed = {seed})")
    return EXIT_OK


def cmd_compare(args) -> int:
    colex, source = _resolve_lattice(args)
    betas, couplings = _resolve_betas_and_couplings(args, colex)
    seed = _resolve_seed(args)
    for beta in betas:
        model = IsingModel(colex, beta, couplings)
        report = compare_methods(
            model, args.epsilon, args.confidence, seed,
            enum_cap=args.enum_cap, threads=args.threads,
        )
        doc = {
            "schema": SCHEMA,
            "command": "compare",
            "lattice": _lattice_summary(colex, source),
            "model": _model_summary(model),
            "seed": seed,
            "wall_time_s": report.main.wall_time_s + report.baseline.wall_time_s,
        }
        doc.update(report.to_dict())
        _emit(doc)
        _say(
            f"beta={beta:g}: |err| main = {report.abs_error_main:.4g} "
            f"(bound {report.bound_new:.4g}), baseline = {report.abs_error_baseline:.4g} "
            f"(bound {report.bound_old:.4g}), bound ratio = {report.bound_ratio:.4g}"
        )
        if report.baseline_bound_exceeds_exact:
            _say("  note: the overlap-approach bound exceeds Z itself (no information)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="colorz",
        description="Partition functions of 3-body Ising models on color-code lattices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a lattice and write its JSON document")
    _add_lattice_args(p, generator_only=True)
    p.add_argument("--out", metavar="FILE", help="write the colex here (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="check every 2-colex invariant")
    _add_lattice_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("exact", help="exact partition function (enumeration oracles)")
    _add_lattice_args(p)
    _add_model_args(p)
    p.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP, help="enumeration size cap")
    p.add_argument(
        "--cross-check",
        action="store_true",
        help="also run the 2**F spin enumeration and report the gap",
    )
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("estimate", help="stabilizer-sampling estimator")
    _add_lattice_args(p)
    _add_model_args(p)
    _add_sampling_args(p)
    p.add_argument(
        "--sampler",
        choices=("affine", "chp"),
        default="affine",
        help="sampling backend (identical distribution)",
    )
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("qsim", help="dense-statevector emulation of the measurement protocol")
    _add_lattice_args(p)
    _add_model_args(p)
    _add_sampling_args(p)
    p.add_argument("--qubit-cap", type=int, default=DEFAULT_QUBIT_CAP, help="dense register cap")
    p.set_defaults(func=cmd_qsim)

    p = sub.add_parser("compare", help="estimator vs overlap baseline on an oracle-checkable model")
    _add_lattice_args(p)
    _add_model_args(p)
    _add_sampling_args(p)
    p.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP, help="enumeration size cap")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        _say(f"error: file not found: {exc.filename or exc}")
        return EXIT_NOT_FOUND
    except (ColexFormatError, json.JSONDecodeError) as exc:
        _say(f"error: cannot parse input: {exc}")
        return EXIT_PARSE
    except ColexValidationError as exc:
        _say(str(exc))
        return EXIT_VALIDATION
    except CapExceededError as exc:
        _say(f"error: {exc} (raise the cap flag to override)")
        return EXIT_CAP
    except ValueError as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
