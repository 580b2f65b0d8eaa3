"""Command-line interface.

    bsvsim run <scenario.toml> [--out DIR]
    bsvsim sweep <scenario.toml> --param PATH --values SPEC
                 [--frozen] [--jobs N] [--out DIR]
    bsvsim period <medium> <pump-nm>
    bsvsim validate <scenario.toml>

``--values`` is either a comma list ("1,5,13") or "start:stop:num" for a
linear grid.  Exit codes: 0 success, 1 validation failure, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import NumericalError, ValidationError
from .reports import write_report, write_sweep_csv
from .scenario import (
    SweepSpec,
    analytic_period,
    load_scenario,
    run_scenario,
    run_sweep,
    validate_config,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _parse_values(spec: str):
    import numpy as np

    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValidationError(f"--values range must be start:stop:num, got {spec!r}")
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        if num < 1:
            raise ValidationError("--values range needs num >= 1")
        return tuple(float(x) for x in np.linspace(start, stop, num))
    try:
        return tuple(float(x) for x in spec.split(","))
    except ValueError as exc:
        raise ValidationError(f"cannot parse --values {spec!r}: {exc}") from exc


def _cmd_run(args):
    config = load_scenario(args.scenario)
    result = run_scenario(config)
    path = write_report(result, args.out)
    for g in result.per_gain:
        line = (
            f"G={g.gain:g}: K={g.schmidt_number:.4f} g2={g.g2:.4f} "
            f"photons={g.total_photons:.4g}"
        )
        if g.width is not None:
            line += f" fwhm={g.width.fwhm_nm:.3f}nm@{g.width.position_nm:.2f}nm"
        if g.nrf_value is not None:
            line += f" nrf={g.nrf_value:.3e}"
        print(line)
    print(f"report: {path}")
    return EXIT_OK


def _cmd_sweep(args):
    config = load_scenario(args.scenario)
    spec = SweepSpec(
        parameter=args.param,
        values=_parse_values(args.values),
        relock=not args.frozen,
        jobs=args.jobs,
    )
    rows = run_sweep(config, spec)
    path = write_sweep_csv(rows, f"{args.out}/sweep.csv")
    failures = [r for r in rows if r.error]
    print(f"sweep: {len(rows)} rows ({len(failures)} failed) -> {path}")
    for r in failures:
        print(f"  value {r.value}: {r.error}", file=sys.stderr)
    return EXIT_OK


def _cmd_period(args):
    period_um = analytic_period(args.medium, 2.0 * args.pump_nm)
    print(f"{period_um:.6f}")
    return EXIT_OK


def _cmd_validate(args):
    with open(args.scenario, "r", encoding="utf-8") as fh:
        text = fh.read()
    config, errors = validate_config(text)
    if errors:
        for e in errors:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"ok: {args.scenario} (hash {config.config_hash()[:16]})")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="bsvsim",
        description="Frequency Schmidt-mode simulator for bright squeezed vacuum",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write report + spectra")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default="out")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter of a scenario")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--param", required=True, help="dotted path, e.g. interferometer.gvd_length_cm")
    p_sweep.add_argument("--values", required=True, help="comma list or start:stop:num")
    p_sweep.add_argument("--frozen", action="store_true",
                         help="freeze pump path, lock phase and grid at the base scenario")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--out", default="out")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_period = sub.add_parser("period", help="analytic amplification-fringe period (um)")
    p_period.add_argument("medium", help="GVD material name, e.g. sf6")
    p_period.add_argument("pump_nm", type=float, help="pump wavelength (nm)")
    p_period.set_defaults(func=_cmd_period)

    p_val = sub.add_parser("validate", help="validate a scenario file")
    p_val.add_argument("scenario")
    p_val.set_defaults(func=_cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
