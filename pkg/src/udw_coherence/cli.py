"""Command-line interface: eval, sweep, infer-mass, verify.

Physical inputs are dimensionless groups given as repeated
``--set group=value`` flags (or raw parameters behind ``--raw``); sweeps
are described by a JSON spec file.  Exit codes: 0 success, 1 evaluation
or verification failure, 2 usage error, 3 sweep completed with failed
points.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .channel import cohering_power, decohering_power, remaining_coherence
from .field import (
    Coherent,
    FieldConfig,
    NonMonotoneError,
    TargetOutOfRangeError,
    infer_mass,
    kernel_coherent,
    kernel_thermal,
)
from .oracle import DEFAULT_SEED
from .sweep import (
    SweepSpec,
    UsageError,
    require_groups,
    resolve_groups,
    run_sweep,
    write_csv,
    write_json,
)
from .verify import run_checks

_EVAL_THETA_POINTS = 25


def _parse_sets(pairs: Optional[list[str]]) -> dict[str, float]:
    groups: dict[str, float] = {}
    for pair in pairs or []:
        key, sep, raw_value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"--set expects group=value, got {pair!r}")
        try:
            value = float(raw_value)
        except ValueError:
            raise UsageError(f"--set {key}: {raw_value!r} is not a number") from None
        if key in groups:
            raise UsageError(f"group {key} given more than once")
        groups[key] = value
    return groups


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text)


def _json_record(record: dict) -> str:
    return json.dumps(record, indent=2)


def cmd_eval(ns: argparse.Namespace) -> int:
    groups = _parse_sets(ns.set)
    if not ns.raw:
        require_groups(groups, "eval")
    point = resolve_groups(groups, raw=ns.raw)
    config = point.field_config()
    if isinstance(config.state, Coherent):
        kernel = kernel_coherent(point.detector(), config, ns.tol)
    else:
        kernel = kernel_thermal(point.detector(), config, ns.tol)
    thetas = kernel.phase + np.linspace(0.0, 2.0 * math.pi, _EVAL_THETA_POINTS)
    record = {
        "groups": groups,
        "z": {"re": kernel.z.real, "im": kernel.z.imag},
        "phase": kernel.phase,
        "cohering": cohering_power(kernel),
        "decohering": decohering_power(kernel),
        "remaining": {
            "theta": [float(t) for t in thetas],
            "coherence": [remaining_coherence(kernel, float(t)) for t in thetas],
        },
    }
    _emit(_json_record(record), ns.out)
    return 0


def cmd_sweep(ns: argparse.Namespace) -> int:
    try:
        text = Path(ns.spec).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read sweep spec: {exc}") from exc
    spec = SweepSpec.from_json(text)
    if ns.out is not None:
        spec = dataclasses.replace(spec, output=ns.out)
    if ns.format is not None:
        spec = dataclasses.replace(spec, format=ns.format)
    rows = run_sweep(spec, workers=ns.workers, rel_tol=ns.tol)
    rendered = write_csv(spec, rows) if spec.format == "csv" else write_json(spec, rows)
    _emit(rendered, spec.output)
    if ns.plot is not None:
        plot_path = ns.plot
        if plot_path == "":
            if spec.output is None:
                raise UsageError("give --plot a path when the sweep writes to stdout")
            plot_path = str(Path(spec.output).with_suffix(".png"))
        from .plotting import render_sweep_figure

        render_sweep_figure(spec, rows, plot_path)
    return 3 if any(row.error is not None for row in rows) else 0


def cmd_infer_mass(ns: argparse.Namespace) -> int:
    groups = _parse_sets(ns.set)
    forbidden = set(groups) & {
        "m_over_omega",
        "e_over_m",
        "r_over_compton",
        "lam_over_compton",
        "beta_omega",
    }
    if forbidden:
        raise UsageError(
            "mass inference needs mass-free coherent groups (r_omega, lam_omega, "
            f"e_over_omega); got: {', '.join(sorted(forbidden))}"
        )
    require_groups(groups, "cohering-coherent")
    point = resolve_groups(groups)
    lo, hi = ns.bracket
    record: dict = {"mass": None, "residual": None, "monotone_check": None}
    try:
        mass = infer_mass(ns.target, point.detector(), point.energy, lo, hi, rel_tol=ns.tol)
    except NonMonotoneError as exc:
        record["monotone_check"] = False
        record["error"] = str(exc)
        _emit(_json_record(record), ns.out)
        return 1
    except (TargetOutOfRangeError, ValueError) as exc:
        record["monotone_check"] = True
        record["error"] = str(exc)
        _emit(_json_record(record), ns.out)
        return 1
    kernel = kernel_coherent(
        point.detector(), FieldConfig(mass, Coherent(point.energy)), ns.tol
    )
    record.update(
        mass=mass,
        residual=abs(cohering_power(kernel) - ns.target),
        monotone_check=True,
    )
    _emit(_json_record(record), ns.out)
    return 0


def cmd_verify(ns: argparse.Namespace) -> int:
    results = run_checks(level=ns.level, seed=ns.seed, tol_scale=ns.tol_scale)
    width = max(len(result.name) for result in results)
    failed = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        failed += not result.passed
        print(
            f"{status}  {result.name:<{width}}  deviation={result.deviation: .3e}"
            f"  tol={result.tolerance:.1e}  {result.seconds:6.2f}s"
        )
    print(f"{len(results)} checks, {failed} failed")
    return 1 if failed else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udw-coherence",
        description=(
            "Cohering and decohering power of the qubit channel induced by an "
            "instantaneously coupled scalar field"
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--set",
        action="append",
        metavar="GROUP=VALUE",
        help="set a dimensionless group (repeatable)",
    )
    shared.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    shared.add_argument(
        "--tol", type=float, default=1e-10, metavar="REL", help="quadrature relative tolerance"
    )

    p_eval = sub.add_parser("eval", parents=[shared], help="evaluate one parameter point")
    p_eval.add_argument(
        "--raw", action="store_true", help="interpret --set keys as raw physical parameters"
    )
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", parents=[shared], help="run a sweep from a JSON spec")
    p_sweep.add_argument("--spec", required=True, metavar="FILE", help="sweep spec JSON file")
    p_sweep.add_argument("--format", choices=("csv", "json"), help="override output format")
    p_sweep.add_argument(
        "--workers", type=int, default=1, metavar="N", help="parallel evaluation processes"
    )
    p_sweep.add_argument(
        "--seed",
        type=int,
        default=DEFAULT_SEED,
        help="accepted for interface uniformity; sweeps are deterministic",
    )
    p_sweep.add_argument(
        "--plot",
        nargs="?",
        const="",
        default=None,
        metavar="PATH",
        help="also render a figure (default: next to the output file)",
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_infer = sub.add_parser(
        "infer-mass", parents=[shared], help="invert cohering power to a field mass"
    )
    p_infer.add_argument(
        "--target", type=float, required=True, metavar="C", help="measured cohering power"
    )
    p_infer.add_argument(
        "--bracket",
        type=float,
        nargs=2,
        required=True,
        metavar=("LO", "HI"),
        help="mass bracket in units of omega",
    )
    p_infer.set_defaults(func=cmd_infer_mass)

    p_verify = sub.add_parser("verify", help="run the self-verification battery")
    p_verify.add_argument("--level", choices=("fast", "full"), default="fast")
    p_verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_verify.add_argument("--tol-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    ns = _build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
