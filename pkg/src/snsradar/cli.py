"""Command-line entry point.

    snsradar run <config|preset> [--out DIR] [--no-plots] [--no-csv]
    snsradar sweep <config|preset> [--over L=2,4,8,16 | --over code=16x1,4x4]
    snsradar presets
    snsradar validate <config|preset>

Exit codes: 0 success, 1 config error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .params import CodeConfig
from .harness import (
    PRESET_NOTES,
    PRESETS,
    ConfigError,
    load_config,
    run_experiment,
    run_sweep,
    validate_config,
)


def parse_over(spec: str) -> list[CodeConfig]:
    """Parse --over: 'L=2,4,8,16' (fold factors, time code count 1) or
    'code=16x1,8x2,4x4' ((l_c)x(l_s) pairs)."""
    key, _, values = spec.partition("=")
    key, values = key.strip(), values.strip()
    if not values:
        raise ConfigError([f"--over: expected key=values, got {spec!r}"])
    points = []
    if key == "L":
        for item in values.split(","):
            try:
                points.append(CodeConfig(l_c=int(item), l_s=1))
            except ValueError as exc:
                raise ConfigError([f"--over: bad fold factor {item!r}: {exc}"]) from exc
    elif key == "code":
        for item in values.split(","):
            try:
                lc, _, ls = item.lower().partition("x")
                points.append(CodeConfig(l_c=int(lc), l_s=int(ls)))
            except ValueError as exc:
                raise ConfigError([f"--over: bad code spec {item!r} (want LCxLS)"]) from exc
    else:
        raise ConfigError([f"--over: unknown sweep key {key!r} (use L= or code=)"])
    return points


def _apply_overrides(cfg, args):
    changes = {}
    if getattr(args, "out", None):
        changes["output_dir"] = args.out
    if getattr(args, "no_plots", False):
        changes["emit_plots"] = False
    if getattr(args, "no_csv", False):
        changes["emit_csv"] = False
    if getattr(args, "seed", None) is not None:
        changes["symbol_seed"] = args.seed
    if getattr(args, "noise_seed", None) is not None:
        changes["scenario"] = replace(cfg.scenario, noise_seed=args.noise_seed)
    return replace(cfg, **changes) if changes else cfg


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="snsradar", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment from a config file or preset")
    run_p.add_argument("config", help="YAML config path or preset name")
    run_p.add_argument("--out", help="override output directory")
    run_p.add_argument("--seed", type=int, help="override the symbol seed")
    run_p.add_argument("--noise-seed", type=int, dest="noise_seed", help="override the noise seed")
    run_p.add_argument("--no-plots", action="store_true", help="skip SVG plot output")
    run_p.add_argument("--no-csv", action="store_true", help="skip CSV output")

    sweep_p = sub.add_parser("sweep", help="run the experiment once per code config")
    sweep_p.add_argument("config", help="YAML config path or preset name")
    sweep_p.add_argument("--over", help="sweep points: L=2,4,8,16 or code=16x1,8x2,4x4")
    sweep_p.add_argument("--out", help="override output directory")
    sweep_p.add_argument("--workers", type=int, help="parallel worker processes")
    sweep_p.add_argument("--no-plots", action="store_true", help="skip SVG plot output")

    sub.add_parser("presets", help="list built-in presets")

    val_p = sub.add_parser("validate", help="validate a config and exit")
    val_p.add_argument("config", help="YAML config path or preset name")

    args = ap.parse_args(argv)
    try:
        if args.command == "presets":
            for name in sorted(PRESETS):
                print(f"{name}: {PRESET_NOTES[name]}")
            return 0

        cfg = load_config(args.config)
        if args.command == "validate":
            errors = validate_config(cfg)
            if errors:
                for e in errors:
                    print(f"error: {e}", file=sys.stderr)
                return 1
            print("ok")
            return 0

        cfg = _apply_overrides(cfg, args)
        if args.command == "run":
            report = run_experiment(cfg)
            peaks = report.peaks
            print(f"mode {cfg.mode}, L={cfg.code.l} (l_c={cfg.code.l_c}, l_s={cfg.code.l_s})")
            print(f"r_u = {report.r_u:.4g} m, v_u = +/-{report.v_u:.6g} m/s")
            print(f"{len(peaks.peaks)} peak(s) above {peaks.detection_threshold_db:g} dB; "
                  f"noise floor {peaks.noise_floor_db:.2f} dB")
            for path in sorted(report.files.values()):
                print(f"  wrote {path}")
            return 0

        if args.command == "sweep":
            points = parse_over(args.over) if args.over else None
            sweep = run_sweep(cfg, points, workers=args.workers)
            cols = ("label", "noise_floor_db", "r_u_m", "v_u_mps", "n_peaks")
            print(",".join(cols))
            for row in sweep.rows:
                print(",".join(f"{row[c]:.4f}" if isinstance(row[c], float) else str(row[c]) for c in cols))
            for path in sorted(sweep.files.values()):
                print(f"  wrote {path}")
            return 0
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
