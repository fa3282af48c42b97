"""Command-line front end.

::

    viag chi|transmission|diffraction|first-order [options]
    viag figure fig2..fig8|all [options]
    viag validate [options]

Tables go to ``--out`` as ``.csv`` with a ``#`` metadata header; ``--plot``
adds one SVG per table. On failure a single JSON error line is written to
stderr, files written by the failed run are removed and the exit status is
non-zero.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import experiments
from ._parallel import default_jobs
from .config import parse_config
from .errors import ConfigError, DomainError, ViagError

SUBCOMMANDS = ("chi", "transmission", "diffraction", "first-order", "figure", "validate")


@dataclass
class RunManifest:
    subcommand: str
    config_path: str | None = None
    out_dir: str = "out"
    figure: str | None = None
    plot: bool = False
    log_scale: bool = False
    deterministic: bool = False
    jobs: int | None = None
    overrides: list = field(default_factory=list)  # "key=value", applied after the file
    quadrature: dict = field(default_factory=dict)  # quad_tol / quad_min_panels / quad_max_panels


def _common(parser):
    parser.add_argument("--config", dest="config_path", help="flat key = value configuration file")
    parser.add_argument("--out", dest="out_dir", default="out", help="output directory (default: ./out)")
    parser.add_argument("--plot", action="store_true", help="also write one SVG per table")
    parser.add_argument("--log", dest="log_scale", action="store_true", help="log-scale plot intensities")
    parser.add_argument("--deterministic", action="store_true", help="byte-identical plots (no timestamps)")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="override a config key"
    )
    parser.add_argument("--quad-tol", type=float, default=None)
    parser.add_argument("--quad-min-panels", type=int, default=None)
    parser.add_argument("--quad-max-panels", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="viag", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    helps = {
        "chi": "susceptibility vs probe detuning at the configured position",
        "transmission": "|T| and phase vs position over two periods",
        "diffraction": "Fraunhofer intensity vs sin(theta)",
        "first-order": "first-order intensity (over the configured sweep, if any)",
        "validate": "closed form vs linear-response vs Lindblad oracle report",
    }
    for name in SUBCOMMANDS:
        if name == "figure":
            p = sub.add_parser("figure", help="reproduce a figure's data")
            p.add_argument("figure", choices=sorted(experiments.FIGURES) + ["all"])
        else:
            p = sub.add_parser(name, help=helps[name])
        _common(p)
    return parser


def manifest_from_args(args) -> RunManifest:
    quad = {
        k: v
        for k, v in (
            ("quad_tol", args.quad_tol),
            ("quad_min_panels", args.quad_min_panels),
            ("quad_max_panels", args.quad_max_panels),
        )
        if v is not None
    }
    return RunManifest(
        subcommand=args.subcommand,
        config_path=args.config_path,
        out_dir=args.out_dir,
        figure=getattr(args, "figure", None),
        plot=args.plot,
        log_scale=args.log_scale,
        deterministic=args.deterministic,
        jobs=args.jobs,
        overrides=list(args.overrides),
        quadrature=quad,
    )


def _load_config(manifest):
    text = ""
    if manifest.config_path:
        text = Path(manifest.config_path).read_text()
    overrides = list(manifest.overrides) + [f"{k}={v}" for k, v in manifest.quadrature.items()]
    return parse_config(text, overrides)


def _tables(manifest, cfg, jobs):
    sub = manifest.subcommand
    if sub == "chi":
        return [experiments.chi_spectrum(cfg)]
    if sub == "transmission":
        return [experiments.transmission_table(cfg)]
    if sub == "diffraction":
        return [experiments.diffraction_table(cfg)]
    if sub == "first-order":
        return experiments.run_sweep(cfg, jobs)
    if sub == "figure":
        names = sorted(experiments.FIGURES) if manifest.figure == "all" else [manifest.figure]
        out = []
        for name in names:
            out.extend(experiments.run_figure(name, cfg, jobs))
        return out
    raise ValueError(f"unknown subcommand {sub!r}")


def _error_line(exc):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    key = getattr(exc, "key", None) or getattr(exc, "param", None)
    if key:
        payload["key"] = key
    for attr in ("line", "column"):
        if getattr(exc, attr, None) is not None:
            payload[attr] = getattr(exc, attr)
    return json.dumps(payload, sort_keys=True)


def dispatch(manifest: RunManifest, stdout=None, stderr=None) -> int:
    """Run one subcommand; return the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if manifest.subcommand not in SUBCOMMANDS:
        build_parser().print_usage(stderr)
        stderr.write(_error_line(ValueError(f"unknown subcommand {manifest.subcommand!r}")) + "\n")
        return 2

    written: list[Path] = []
    try:
        cfg = _load_config(manifest)
        jobs = manifest.jobs if manifest.jobs is not None else default_jobs()
        if jobs < 1:
            raise ConfigError("--jobs must be >= 1", key="jobs")
        out_dir = Path(manifest.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

        if manifest.subcommand == "validate":
            report = experiments.run_validation(cfg, jobs=jobs)
            path = out_dir / "validate_report.jsonl"
            path.write_text(report.to_jsonl())
            written.append(path)
            stdout.write(f"{path}\n")
            summary = report.summary()
            stdout.write(json.dumps(summary, sort_keys=True) + "\n")
            if not report.ok:
                stderr.write(
                    json.dumps({"error": "ValidationFailed", "failing": summary["failing"]}, sort_keys=True) + "\n"
                )
                return 1
            return 0

        tables = _tables(manifest, cfg, jobs)
        for table in tables:
            path = out_dir / table.filename
            path.write_text(table.to_csv())
            written.append(path)
            stdout.write(f"{path}\n")
        if manifest.plot:
            from .plotting import render

            for table in tables:
                path = out_dir / table.filename.replace(".csv", ".svg")
                written.append(path)
                render(table, path, manifest.log_scale, manifest.deterministic)
                stdout.write(f"{path}\n")
        return 0
    except (ViagError, DomainError, ValueError, OSError, ArithmeticError) as exc:
        for path in written:
            try:
                path.unlink()
            except FileNotFoundError:
                pass
        stderr.write(_error_line(exc) + "\n")
        return 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    np.seterr(all="ignore")
    return dispatch(manifest_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
