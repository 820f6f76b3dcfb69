"""Command-line interface.

Subcommands emit figure data (CSV), fits and verification reports (JSON).
All output is deterministic given the flags (plus the seed for stochastic
estimators), files are written atomically, and numbers carry 15
significant digits with LF line endings.

Exit codes: 0 success, 2 usage or input error, 3 degenerate fit,
4 truncation infeasible, 5 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from .analysis import Spacing, SweepSpec, estimate_phi, fit_inverse_law, sweep_ratios
from .errors import (
    DegenerateFitError,
    DomainError,
    FringeCoverageError,
    OpaHbtError,
    TruncationError,
    UnsupportedConfigurationError,
)
from .oracle_checks import DEFAULT_G_GRID, DEFAULT_N_GRID, run_oracle_checks

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE_FIT = 3
EXIT_TRUNCATION = 4
EXIT_NOT_CONVERGED = 5

_SENSITIVITY_RANGES = ((0.15, 20.0), (0.1, 10.0), (0.3, 30.0), (0.5, 50.0), (1.0, 100.0))


def format_float(value: float) -> str:
    """15-significant-digit decimal rendering with an explicit decimal point."""
    text = f"{value:.15g}"
    if not any(ch in text for ch in ".eE") and text not in ("nan", "inf", "-inf"):
        text += ".0"
    return text


def _write_output(path: str, payload: str) -> None:
    """Write text to ``path`` atomically, or to stdout for '-'.

    Non-regular targets (pipes, devices) are written directly; the
    temp-file-plus-rename step only applies to regular files.
    """
    if path == "-":
        sys.stdout.write(payload)
        return
    if os.path.exists(path) and not os.path.isfile(path):
        with open(path, "w", newline="\n") as handle:
            handle.write(payload)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".opahbt-", text=True)
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(payload)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _json_payload(document: dict | list) -> str:
    return json.dumps(document, indent=2) + "\n"


def _add_sweep_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--g", type=float, default=2.0, help="amplifier gain (default 2)")
    parser.add_argument("--n-min", type=float, default=0.15, help="grid lower bound")
    parser.add_argument("--n-max", type=float, default=20.0, help="grid upper bound")
    parser.add_argument("--points", type=int, default=200, help="grid size (default 200)")
    parser.add_argument(
        "--spacing", choices=("log", "linear"), default="log", help="grid spacing"
    )
    parser.add_argument(
        "--m-bar",
        type=float,
        default=None,
        help="hold the companion source at this mean instead of equal sources",
    )


def _add_out_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out", "-o", default="-", help="output path ('-' for stdout, the default)"
    )


def _sweep_spec(args) -> SweepSpec:
    return SweepSpec(
        g=args.g,
        n_min=args.n_min,
        n_max=args.n_max,
        points=args.points,
        spacing=Spacing.LOG if args.spacing == "log" else Spacing.LINEAR,
        equal_sources=args.m_bar is None,
        m_bar=args.m_bar,
    )


def _cmd_figure(args, column: str) -> int:
    table = sweep_ratios(_sweep_spec(args))
    values = getattr(table, column)
    if args.format == "csv":
        lines = ["n_bar,ratio"]
        lines += [
            f"{format_float(n)},{format_float(v)}"
            for n, v in zip(table.n_bar, values)
        ]
        payload = "\n".join(lines) + "\n"
    else:
        payload = _json_payload(
            [
                {"n_bar": float(n), "ratio": float(v)}
                for n, v in zip(table.n_bar, values)
            ]
        )
    _write_output(args.out, payload)
    return EXIT_OK


def _cmd_fit(args) -> int:
    spec = _sweep_spec(args)
    fit = fit_inverse_law(sweep_ratios(spec))
    sensitivity = []
    seen = set()
    for n_min, n_max in ((spec.n_min, spec.n_max),) + _SENSITIVITY_RANGES:
        if (n_min, n_max) in seen:
            continue
        seen.add((n_min, n_max))
        alt_spec = SweepSpec(
            g=spec.g,
            n_min=n_min,
            n_max=n_max,
            points=spec.points,
            spacing=spec.spacing,
            equal_sources=spec.equal_sources,
            m_bar=spec.m_bar,
        )
        alt = fit_inverse_law(sweep_ratios(alt_spec))
        sensitivity.append(
            {"n_min": n_min, "n_max": n_max, "A": alt.A, "B": alt.B, "rss": alt.rss}
        )
    document = {
        "A": fit.A,
        "B": fit.B,
        "rss": fit.rss,
        "n_min": spec.n_min,
        "n_max": spec.n_max,
        "points": spec.points,
        "spacing": spec.spacing.value,
        "g": spec.g,
        "sensitivity": sensitivity,
    }
    _write_output(args.out, _json_payload(document))
    return EXIT_OK


def _parse_grid(text: str, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise DomainError(f"{flag} expects comma-separated numbers, got {text!r}") from exc
    if not values:
        raise DomainError(f"{flag} must name at least one value")
    return values


def _cmd_oracle_check(args) -> int:
    report = run_oracle_checks(
        n_grid=_parse_grid(args.n_grid, "--n-grid"),
        g_grid=_parse_grid(args.g_grid, "--g-grid"),
        tail=args.tail,
        gain_for_noise=args.g_noise,
    )
    _write_output(args.out, _json_payload(report))
    return EXIT_OK if report["all_expected_pass_ok"] else 1


def _read_scan_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    baselines, values = [], []
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise DomainError(f"cannot read scan file {path!r}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise DomainError(
                f"{path}: line {lineno}: expected two comma-separated columns, "
                f"got {raw.rstrip()!r}"
            )
        try:
            baselines.append(float(parts[0]))
            values.append(float(parts[1]))
        except ValueError:
            if lineno == 1:
                continue  # header row
            raise DomainError(
                f"{path}: line {lineno}: non-numeric value in {raw.rstrip()!r}"
            ) from None
    if not baselines:
        raise DomainError(f"{path}: no numeric rows found")
    return np.asarray(baselines), np.asarray(values)


def _cmd_estimate_phi(args) -> int:
    r0, values = _read_scan_csv(args.scan)
    estimate = estimate_phi(
        r0,
        values,
        k=args.k,
        amplitude_known=args.amplitude,
        seed=args.seed,
    )
    document = {
        "phi": estimate.phi,
        "stderr": estimate.stderr,
        "converged": estimate.converged,
        "iterations": estimate.iterations,
        "amplitude": estimate.amplitude,
        "seed": args.seed,
    }
    _write_output(args.out, _json_payload(document))
    return EXIT_OK if estimate.converged else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opahbt",
        description=(
            "Correlation, noise and SNR laws of the amplified intensity "
            "interferometer, with first-principles verification suites."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fig4 = sub.add_parser("fig4", help="signal-ratio sweep as CSV (n_bar,ratio)")
    _add_sweep_flags(fig4)
    _add_out_flag(fig4)
    fig4.add_argument("--format", choices=("csv", "json"), default="csv")

    fig5 = sub.add_parser("fig5", help="SNR-ratio sweep as CSV (n_bar,ratio)")
    _add_sweep_flags(fig5)
    _add_out_flag(fig5)
    fig5.add_argument("--format", choices=("csv", "json"), default="csv")

    fit = sub.add_parser("fit", help="fit A + B/n_bar to the SNR-ratio sweep (JSON)")
    _add_sweep_flags(fit)
    _add_out_flag(fit)

    oracle = sub.add_parser(
        "oracle-check", help="run the verification suites and report (JSON)"
    )
    oracle.add_argument(
        "--n-grid",
        default=",".join(str(x) for x in DEFAULT_N_GRID),
        help="comma-separated thermal means",
    )
    oracle.add_argument(
        "--g-grid",
        default=",".join(str(x) for x in DEFAULT_G_GRID),
        help="comma-separated gains for the Fock-space suites",
    )
    oracle.add_argument(
        "--tail", type=float, default=1e-12, help="thermal tail used to size truncation"
    )
    oracle.add_argument(
        "--g-noise",
        type=float,
        default=2.0,
        help="gain for the noise-law consistency checks",
    )
    _add_out_flag(oracle)

    phi = sub.add_parser(
        "estimate-phi", help="recover the angular size from a baseline scan CSV"
    )
    phi.add_argument("scan", help="CSV file with columns (baseline, correlation)")
    phi.add_argument("--k", type=float, required=True, help="wavenumber in rad per length")
    phi.add_argument("--seed", type=int, default=0, help="seed for retry perturbations")
    phi.add_argument(
        "--amplitude", type=float, default=None, help="hold the amplitude fixed"
    )
    _add_out_flag(phi)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0,) else 0
    handlers = {
        "fig4": lambda a: _cmd_figure(a, "signal_ratio"),
        "fig5": lambda a: _cmd_figure(a, "snr_ratio"),
        "fit": _cmd_fit,
        "oracle-check": _cmd_oracle_check,
        "estimate-phi": _cmd_estimate_phi,
    }
    try:
        return handlers[args.command](args)
    except DegenerateFitError as exc:
        print(f"opahbt: degenerate fit: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE_FIT
    except TruncationError as exc:
        print(f"opahbt: truncation infeasible: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (FringeCoverageError, DomainError, UnsupportedConfigurationError) as exc:
        print(f"opahbt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OpaHbtError as exc:
        print(f"opahbt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"opahbt: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())
