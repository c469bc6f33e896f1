"""Command line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 diverged run,
3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import CONFIG_KEYS, load_config
from .errors import ConfigError, DivergedError, IoError
from .io import emit_heatmap, emit_snapshot
from .models import MODELS
from .stability import StabilityQuery, is_stable, kappa_threshold, stability_map
from .studies import spatial_study, temporal_study
from .stepping import run

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _ensure_dir(path):
    try:
        Path(path).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {path}: {exc}") from exc


def _write_text(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def cmd_run(args, out):
    cfg = load_config(args.config)
    _ensure_dir(cfg.output_dir)
    model = cfg.build_model()
    names = ("u", "v")[: model.arity]

    def sink(t, n, fields):
        for name, f in zip(names, fields):
            stem = Path(cfg.output_dir) / f"{name}_{n:06d}"
            emit_snapshot(f, f"{stem}.snap", t)
            if cfg.heatmap:
                emit_heatmap(f, f"{stem}.pgm", cfg.heatmap_range, cfg.heatmap_crop)

    diverged = None
    try:
        summary = run(model, cfg.initial_fields(), cfg.stepper(), sink)
    except DivergedError as exc:
        summary, diverged = exc.summary, exc
    info = {
        "model": cfg.model,
        "steps": summary.steps,
        "final_time": summary.final_time,
        "max_abs": summary.max_abs,
        "diverged": summary.diverged,
        "diverged_step": summary.diverged_step,
        "snapshots": [list(s) for s in summary.snapshots],
    }
    _write_text(Path(cfg.output_dir) / "summary.json", json.dumps(info, indent=2, sort_keys=True) + "\n")
    if diverged is not None:
        print(f"diverged: {diverged}", file=sys.stderr)
        return EXIT_DIVERGED
    print(f"{cfg.model}: {summary.steps} steps to t={summary.final_time:g}, max|u|={summary.max_abs:.6g}", file=out)
    return EXIT_OK


def _study(args, out, study, name):
    cfg = load_config(args.config)
    table = study(cfg)
    csv = table.to_csv()
    if args.output:
        _write_text(args.output, csv)
    else:
        _ensure_dir(cfg.output_dir)
        _write_text(Path(cfg.output_dir) / f"{name}.csv", csv)
    out.write(csv)
    return EXIT_OK


def cmd_stability(args, out):
    if args.map:
        mus = args.mu if args.mu else [0.0]
        smap = stability_map(mus, args.rho, args.tau_range, args.kappa_range, (args.resolution, args.resolution))
        out.write(smap.to_csv())
        return EXIT_OK
    if args.kappa is None or args.tau is None:
        raise ConfigError("stability needs --kappa and --tau (or --map)")
    mus = args.mu if args.mu else [0.0]
    worst = max((is_stable(StabilityQuery(m, args.rho, args.kappa, args.tau)) for m in mus), key=lambda r: r.max_modulus)
    print(worst.verdict, file=out)
    if args.verbose:
        print(f"max_modulus={worst.max_modulus:.17g}", file=out)
        print(f"kappa_threshold={kappa_threshold(min(mus), args.rho, args.tau):.17g}", file=out)
    return EXIT_OK


def cmd_models(args, out):
    for name, entry in MODELS.items():
        params = ", ".join(f"{k}={v:g}" for k, v in entry.defaults.items())
        print(f"{name}: {entry.description}", file=out)
        print(f"    defaults: {params or '-'}; initial condition: {entry.default_ic or 'exact solution'}", file=out)
    print(f"config keys: {', '.join(CONFIG_KEYS)}", file=out)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="fracrd", description="Fractional reaction-diffusion solver and reproduction harness")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    r = sub.add_parser("run", help="simulate a configuration and write snapshots")
    r.add_argument("config")
    r.set_defaults(func=cmd_run)

    for name, study in (("converge-time", temporal_study), ("converge-space", spatial_study)):
        c = sub.add_parser(name, help=f"{name.split('-')[1]} refinement study as CSV")
        c.add_argument("config")
        c.add_argument("-o", "--output", help="CSV path (default <output_dir>/<command>.csv)")
        c.set_defaults(func=lambda a, o, s=study, n=name: _study(a, o, s, n))

    s = sub.add_parser("stability", help="linear stability verdict or map")
    s.add_argument("--rho", type=float, required=True)
    s.add_argument("--kappa", type=float)
    s.add_argument("--tau", type=float)
    s.add_argument("--mu", type=float, action="append", help="mode symbol; repeat for several")
    s.add_argument("--map", action="store_true", help="print a verdict map as CSV")
    s.add_argument("--tau-range", type=float, nargs=2, default=(0.1, 1.0))
    s.add_argument("--kappa-range", type=float, nargs=2, default=(0.0, 8.0))
    s.add_argument("--resolution", type=int, default=20)
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_stability)

    m = sub.add_parser("models", help="list built-in models")
    m.set_defaults(func=cmd_models)
    return p


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergedError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (IoError, OSError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
