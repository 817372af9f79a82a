"""Config-driven experiment runner.

Wires the whole pipeline (symbols -> frame -> channel -> fold -> unfold ->
map -> peaks) from a single YAML config, writes CSV/JSON/SVG artifacts,
and runs code-config sweeps with per-point isolation. Everything is
deterministic under fixed seeds; CSV and JSON floats are printed with
%.17g / repr so reruns are byte-identical.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .params import (
    SPEED_OF_LIGHT,
    CodeConfig,
    RadarMetrics,
    RadarParams,
    derive_metrics,
    unambiguous_limits,
)
from .waveform import (
    QAM16,
    QPSK,
    assemble_pc_frame,
    assemble_sns_frame,
    gen_symbols,
    make_code_set,
)
from .channel import Target, TargetScenario, apply_channel
from .receiver import FULL, MODES, PC_SNS, SNS, fold_frequency, unfold
from .rdproc import (
    PeakReport,
    RangeDopplerMap,
    detect_peaks,
    export_map_binary,
    export_map_csv,
    predict_ambiguities,
    range_doppler_map,
)

SCHEMA_VERSION = 1
CONSTELLATIONS = (QPSK, QAM16)


class ConfigError(ValueError):
    """Validation failure; .errors lists one message per offending field."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class ExperimentConfig:
    params: RadarParams
    mode: str
    code: CodeConfig
    scenario: TargetScenario
    constellation: str = QPSK
    symbol_seed: int = 0
    window: str = "none"
    threshold_db: float = -15.0
    guard_bins: int = 3
    speed_of_light: float = SPEED_OF_LIGHT
    output_dir: str = "runs/out"
    emit_csv: bool = True
    emit_plots: bool = True
    emit_report: bool = True
    sweep: tuple[CodeConfig, ...] = ()
    schema_version: int = SCHEMA_VERSION


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    metrics: RadarMetrics
    rdmap: RangeDopplerMap
    peaks: PeakReport
    r_u: float
    v_u: float
    files: dict[str, str] = field(default_factory=dict)

    def summary_row(self) -> dict:
        top = self.peaks.peaks[0].power_db if self.peaks.peaks else float("nan")
        return {
            "mode": self.config.mode,
            "l": self.config.code.l,
            "l_c": self.config.code.l_c,
            "l_s": self.config.code.l_s,
            "r_u_m": self.r_u,
            "v_u_mps": self.v_u,
            "noise_floor_db": self.peaks.noise_floor_db,
            "n_peaks": len(self.peaks.peaks),
            "top_peak_db": top,
            "output_dir": self.config.output_dir,
        }


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[dict, ...]
    files: dict[str, str]


def validate_config(cfg: ExperimentConfig) -> list[str]:
    """Collect precise per-field diagnostics; empty list means valid."""
    errors: list[str] = []
    if cfg.schema_version != SCHEMA_VERSION:
        errors.append(f"schema_version: expected {SCHEMA_VERSION}, got {cfg.schema_version}")
    if cfg.mode not in MODES:
        errors.append(f"mode: {cfg.mode!r} is not one of {MODES}")
    if cfg.constellation not in CONSTELLATIONS:
        errors.append(f"constellation: {cfg.constellation!r} is not one of {CONSTELLATIONS}")
    if cfg.window not in ("none", "hann"):
        errors.append(f"window: {cfg.window!r} is not one of ('none', 'hann')")
    if cfg.threshold_db >= 0:
        errors.append(f"threshold_db: must be < 0 (relative to map max), got {cfg.threshold_db}")
    if cfg.guard_bins < 0:
        errors.append(f"guard_bins: must be >= 0, got {cfg.guard_bins}")
    if cfg.speed_of_light <= 0:
        errors.append(f"speed_of_light: must be > 0, got {cfg.speed_of_light}")
    if not cfg.scenario.targets:
        errors.append("scenario.targets: must contain at least one target")
    if cfg.mode == FULL and cfg.code.l != 1:
        errors.append(f"code: FULL mode means no folding, so L must be 1 (got {cfg.code.l})")
    if cfg.mode == SNS and cfg.code.l_s != 1:
        errors.append(
            f"code: SNS has no time codes; give the fold factor as l or l_c (got l_s={cfg.code.l_s})"
        )
    try:
        cfg.code.validate_for(cfg.params)
    except ValueError as exc:
        errors.append(f"code: {exc}")
    return errors


def _require_valid(cfg: ExperimentConfig) -> None:
    errors = validate_config(cfg)
    if errors:
        raise ConfigError(errors)


# ---------------------------------------------------------------- config io

def _parse_amplitude(value) -> complex:
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return complex(float(value), 0.0)


def _emit_amplitude(value: complex):
    return float(value.real) if value.imag == 0 else [float(value.real), float(value.imag)]


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from a parsed YAML mapping."""
    try:
        p = raw["params"]
        params = RadarParams(
            n_subcarriers=int(p["n_subcarriers"]),
            n_symbols=int(p["n_symbols"]),
            subcarrier_spacing=float(p["subcarrier_spacing"]),
            carrier_freq=float(p["carrier_freq"]),
            cp_duration=float(p.get("cp_duration", 0.0)),
        )
        c = raw.get("code", {})
        if "l" in c and ("l_c" in c or "l_s" in c):
            raise ValueError("code: give either l or (l_c, l_s), not both")
        code = CodeConfig(l_c=int(c.get("l_c", c.get("l", 1))), l_s=int(c.get("l_s", 1)))
        sc = raw["scenario"]
        targets = tuple(
            Target(
                range_m=float(t["range"]),
                velocity_mps=float(t.get("velocity", 0.0)),
                amplitude=_parse_amplitude(t.get("amplitude", 1.0)),
            )
            for t in sc["targets"]
        )
        scenario = TargetScenario(
            targets=targets,
            noise_power=float(sc.get("noise_power", 0.0)),
            noise_seed=int(sc.get("noise_seed", 0)),
        )
        det = raw.get("detection", {})
        emit = raw.get("emit", {})
        sweep = tuple(
            CodeConfig(l_c=int(s.get("l_c", s.get("l", 1))), l_s=int(s.get("l_s", 1)))
            for s in raw.get("sweep", [])
        )
        return ExperimentConfig(
            params=params,
            mode=str(raw.get("mode", FULL)),
            code=code,
            scenario=scenario,
            constellation=str(raw.get("constellation", QPSK)),
            symbol_seed=int(raw.get("symbol_seed", 0)),
            window=str(raw.get("window", "none")),
            threshold_db=float(det.get("threshold_db", -15.0)),
            guard_bins=int(det.get("guard_bins", 3)),
            speed_of_light=float(raw.get("speed_of_light", SPEED_OF_LIGHT)),
            output_dir=str(raw.get("output_dir", "runs/out")),
            emit_csv=bool(emit.get("csv", True)),
            emit_plots=bool(emit.get("plots", True)),
            emit_report=bool(emit.get("report", True)),
            sweep=sweep,
            schema_version=int(raw.get("schema_version", SCHEMA_VERSION)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, KeyError):
            raise ConfigError([f"missing required config field: {exc.args[0]}"]) from exc
        raise ConfigError([str(exc)]) from exc


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out = {
        "schema_version": cfg.schema_version,
        "params": {
            "n_subcarriers": cfg.params.n_subcarriers,
            "n_symbols": cfg.params.n_symbols,
            "subcarrier_spacing": cfg.params.subcarrier_spacing,
            "carrier_freq": cfg.params.carrier_freq,
            "cp_duration": cfg.params.cp_duration,
        },
        "mode": cfg.mode,
        "code": {"l_c": cfg.code.l_c, "l_s": cfg.code.l_s},
        "constellation": cfg.constellation,
        "symbol_seed": cfg.symbol_seed,
        "scenario": {
            "targets": [
                {
                    "range": t.range_m,
                    "velocity": t.velocity_mps,
                    "amplitude": _emit_amplitude(t.amplitude),
                }
                for t in cfg.scenario.targets
            ],
            "noise_power": cfg.scenario.noise_power,
            "noise_seed": cfg.scenario.noise_seed,
        },
        "window": cfg.window,
        "detection": {"threshold_db": cfg.threshold_db, "guard_bins": cfg.guard_bins},
        "speed_of_light": cfg.speed_of_light,
        "output_dir": cfg.output_dir,
        "emit": {"csv": cfg.emit_csv, "plots": cfg.emit_plots, "report": cfg.emit_report},
    }
    if cfg.sweep:
        out["sweep"] = [{"l_c": s.l_c, "l_s": s.l_s} for s in cfg.sweep]
    return out


def parse_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ConfigError([f"{path}: top level must be a mapping"])
    return config_from_dict(raw)


def emit_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)


# ------------------------------------------------------------------ presets

def _preset_table1() -> ExperimentConfig:
    """Full-rate baseline on the 77 GHz numerology, single aligned target."""
    return ExperimentConfig(
        params=_default_params(),
        mode=FULL,
        code=CodeConfig(1, 1),
        scenario=TargetScenario(
            targets=(Target(range_m=16.2, velocity_mps=11.89),),
            noise_power=0.15,
            noise_seed=0,
        ),
        speed_of_light=3.0e8,
        output_dir="runs/table1-sim",
    )


def _preset_fig7() -> ExperimentConfig:
    """PC-SNS L=16 (4x4 codes), single target, moderate noise.

    The target sits at 16.2 m: range bin 108, an integer multiple of l_c,
    so the 16 coded replicas are exact equal-power copies (at ranges whose
    bin is not a multiple of l_c the division-based unfolding splits the
    velocity replicas and the clean 4x4 grid degrades).
    """
    return ExperimentConfig(
        params=_default_params(),
        mode=PC_SNS,
        code=CodeConfig(4, 4),
        scenario=TargetScenario(
            targets=(Target(range_m=16.2, velocity_mps=10.0),),
            noise_power=0.15,
            noise_seed=0,
        ),
        speed_of_light=3.0e8,
        output_dir="runs/fig7-scenario",
    )


def _preset_lsweep() -> ExperimentConfig:
    """SNS fold-factor sweep: the hardware L-sweep redone as simulation."""
    return ExperimentConfig(
        params=_default_params(),
        mode=SNS,
        code=CodeConfig(2, 1),
        scenario=TargetScenario(
            targets=(Target(range_m=16.2, velocity_mps=11.89),),
            noise_power=0.15,
            noise_seed=0,
        ),
        speed_of_light=3.0e8,
        output_dir="runs/lsweep-sim",
        sweep=(CodeConfig(2, 1), CodeConfig(4, 1), CodeConfig(8, 1), CodeConfig(16, 1)),
    )


def _default_params() -> RadarParams:
    from .params import default_params

    return default_params()


PRESETS = {
    "table1-sim": _preset_table1,
    "fig7-scenario": _preset_fig7,
    "lsweep-sim": _preset_lsweep,
}

PRESET_NOTES = {
    "table1-sim": "full-rate OFDM baseline, 2048x256 @ 77 GHz, one target, sigma^2 = 0.15",
    "fig7-scenario": "PC-SNS L=16 (l_c=l_s=4), one target at (16.2 m, 10 m/s), sigma^2 = 0.15",
    "lsweep-sim": "SNS noise-floor sweep over L in {2,4,8,16} (use the sweep subcommand)",
}


def load_config(name_or_path: str) -> ExperimentConfig:
    """Resolve a preset name or a YAML config path."""
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]()
    if not os.path.exists(name_or_path):
        raise ConfigError(
            [f"{name_or_path!r} is neither a preset ({', '.join(sorted(PRESETS))}) nor a config file"]
        )
    return parse_config(name_or_path)


# ----------------------------------------------------------------- pipeline

def build_transmit_frame(cfg: ExperimentConfig) -> np.ndarray:
    if cfg.mode == PC_SNS:
        codes = make_code_set(cfg.code, cfg.params)
        c_sub = gen_symbols(
            cfg.symbol_seed,
            cfg.constellation,
            cfg.params.n_subcarriers // cfg.code.l,
            cfg.params.n_symbols,
        )
        return assemble_pc_frame(c_sub, codes)
    # FULL and SNS both transmit independent symbols on every subcarrier
    return assemble_sns_frame(cfg.symbol_seed, cfg.constellation, cfg.params, cfg.code.l)


def run_pipeline(cfg: ExperimentConfig) -> tuple[RangeDopplerMap, PeakReport, RadarMetrics]:
    """The numeric pipeline without any file output."""
    metrics = derive_metrics(cfg.params, cfg.speed_of_light)
    tx = build_transmit_frame(cfg)
    s = apply_channel(tx, cfg.scenario, cfg.params, metrics)
    z = fold_frequency(s, cfg.code.l, cfg.mode)
    d = unfold(z, tx, cfg.mode)
    rdmap = range_doppler_map(d, cfg.params, cfg.window, metrics)
    report = detect_peaks(rdmap, cfg.threshold_db, cfg.guard_bins)
    return rdmap, report, metrics


def _db(power: np.ndarray, norm: float) -> np.ndarray:
    return 10.0 * np.log10(np.maximum(power / norm, 1e-40))


def _write_profile(path: str, axis: np.ndarray, values_db: np.ndarray, axis_name: str) -> None:
    data = np.column_stack([axis, values_db])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=f"{axis_name},power_db", comments="")


def _write_peaks_csv(path: str, peaks) -> None:
    header = "range_bin,velocity_bin,range_m,velocity_mps,power_db"
    lines = [header]
    for p in peaks:
        lines.append(
            f"{p.range_bin:d},{p.velocity_bin:d},{p.range_m:.17g},{p.velocity_mps:.17g},{p.power_db:.17g}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run the pipeline and emit the configured artifacts.

    Writes into cfg.output_dir: map.csv / map.rdm (full map), range and
    Doppler profile CSVs sliced at the strongest peak, peaks.csv,
    summary.json, and SVG plots. Reruns with the same config are
    byte-identical on the CSV/JSON side.
    """
    _require_valid(cfg)
    rdmap, report, metrics = run_pipeline(cfg)
    if cfg.mode == PC_SNS:
        r_u, v_u = unambiguous_limits(metrics, cfg.code)
    else:
        r_u, v_u = metrics.r_max, metrics.v_max

    files: dict[str, str] = {}
    out = cfg.output_dir
    os.makedirs(out, exist_ok=True)

    top = report.peaks[0] if report.peaks else None
    if cfg.emit_csv:
        files["map_csv"] = os.path.join(out, "map.csv")
        export_map_csv(rdmap, files["map_csv"])
        files["map_bin"] = os.path.join(out, "map.rdm")
        export_map_binary(rdmap, files["map_bin"])
        if top is not None:
            db = _db(rdmap.power, rdmap.normalization)
            files["range_profile"] = os.path.join(out, "range_profile.csv")
            _write_profile(files["range_profile"], rdmap.range_axis, db[:, top.velocity_bin], "range_m")
            files["doppler_profile"] = os.path.join(out, "doppler_profile.csv")
            _write_profile(
                files["doppler_profile"], rdmap.velocity_axis, db[top.range_bin, :], "velocity_mps"
            )
        files["peaks"] = os.path.join(out, "peaks.csv")
        _write_peaks_csv(files["peaks"], report.peaks)

    if cfg.emit_report:
        summary = {
            "schema_version": cfg.schema_version,
            "mode": cfg.mode,
            "code": {"l_c": cfg.code.l_c, "l_s": cfg.code.l_s, "l": cfg.code.l},
            "constellation": cfg.constellation,
            "symbol_seed": cfg.symbol_seed,
            "noise_seed": cfg.scenario.noise_seed,
            "noise_power": cfg.scenario.noise_power,
            "speed_of_light": cfg.speed_of_light,
            "metrics": {
                "bandwidth_hz": metrics.bandwidth,
                "range_resolution_m": metrics.range_resolution,
                "r_max_m": metrics.r_max,
                "velocity_resolution_mps": metrics.velocity_resolution,
                "v_max_mps": metrics.v_max,
                "wavelength_m": metrics.wavelength,
            },
            "r_u_m": r_u,
            "v_u_mps": v_u,
            "detection": {
                "threshold_db": report.detection_threshold_db,
                "guard_bins": report.guard_bins,
            },
            "noise_floor_db": report.noise_floor_db,
            "peaks": [
                {
                    "range_bin": p.range_bin,
                    "velocity_bin": p.velocity_bin,
                    "range_m": p.range_m,
                    "velocity_mps": p.velocity_mps,
                    "power_db": p.power_db,
                }
                for p in report.peaks
            ],
        }
        if cfg.mode == PC_SNS:
            summary["predicted_ambiguities"] = [
                [{"range_m": r, "velocity_mps": v} for r, v in predict_ambiguities(t, cfg.code, metrics)]
                for t in cfg.scenario.targets
            ]
        files["summary"] = os.path.join(out, "summary.json")
        with open(files["summary"], "w", encoding="utf-8", newline="\n") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")

    rep = ExperimentReport(
        config=cfg, metrics=metrics, rdmap=rdmap, peaks=report, r_u=r_u, v_u=v_u, files=files
    )
    if cfg.emit_plots:
        files.update(emit_plots(rep))
    return rep


def emit_plots(report: ExperimentReport) -> dict[str, str]:
    """Write range profile, Doppler profile, and heatmap as SVG files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "snsradar"
    meta = {"Date": None}
    out = report.config.output_dir
    os.makedirs(out, exist_ok=True)
    rdmap = report.rdmap
    db = _db(rdmap.power, rdmap.normalization)
    top = report.peaks.peaks[0] if report.peaks.peaks else None
    vbin = top.velocity_bin if top else rdmap.power.shape[1] // 2
    rbin = top.range_bin if top else 0
    floor = report.peaks.noise_floor_db
    files: dict[str, str] = {}

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(rdmap.range_axis, db[:, vbin], lw=0.8)
    ax.set_xlabel("range [m]")
    ax.set_ylabel("power [dB]")
    ax.set_title(f"range profile at {rdmap.velocity_axis[vbin]:.2f} m/s")
    ax.grid(True, alpha=0.3)
    files["plot_range"] = os.path.join(out, "range_profile.svg")
    fig.savefig(files["plot_range"], metadata=meta)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(rdmap.velocity_axis, db[rbin, :], lw=0.8)
    ax.set_xlabel("velocity [m/s]")
    ax.set_ylabel("power [dB]")
    ax.set_title(f"Doppler profile at {rdmap.range_axis[rbin]:.2f} m")
    ax.grid(True, alpha=0.3)
    files["plot_doppler"] = os.path.join(out, "doppler_profile.svg")
    fig.savefig(files["plot_doppler"], metadata=meta)
    plt.close(fig)

    vmin = floor - 5.0 if np.isfinite(floor) else db.min()
    fig, ax = plt.subplots(figsize=(7, 5))
    im = ax.imshow(
        db,
        origin="lower",
        aspect="auto",
        vmin=vmin,
        vmax=0.0,
        extent=[
            rdmap.velocity_axis[0],
            rdmap.velocity_axis[-1],
            rdmap.range_axis[0],
            rdmap.range_axis[-1],
        ],
        cmap="viridis",
    )
    ax.set_xlabel("velocity [m/s]")
    ax.set_ylabel("range [m]")
    ax.set_title(f"range-Doppler map ({report.config.mode}, L={report.config.code.l})")
    fig.colorbar(im, ax=ax, label="dB rel. peak")
    files["plot_map"] = os.path.join(out, "map.svg")
    fig.savefig(files["plot_map"], metadata=meta)
    plt.close(fig)
    return files


# -------------------------------------------------------------------- sweep

def _sweep_point(cfg: ExperimentConfig) -> dict:
    return run_experiment(cfg).summary_row()


def run_sweep(
    base: ExperimentConfig,
    points: list[CodeConfig] | None = None,
    workers: int | None = None,
) -> SweepReport:
    """Run the base experiment once per code config, plus a comparison table.

    All points are validated before any computation starts; one bad point
    aborts the whole sweep. Each point runs in its own subdirectory of the
    base output_dir with the base seeds (matched seeds keep the per-point
    noise floors comparable).
    """
    pts = list(points) if points is not None else list(base.sweep)
    if not pts:
        raise ConfigError(["sweep: empty sweep list (give --over or a sweep section)"])

    cfgs = []
    errors = []
    for pt in pts:
        label = f"L{pt.l}_lc{pt.l_c}_ls{pt.l_s}"
        cfg = replace(
            base,
            code=pt,
            output_dir=os.path.join(base.output_dir, label),
            sweep=(),
        )
        errs = validate_config(cfg)
        errors.extend(f"sweep point {label}: {e}" for e in errs)
        cfgs.append((label, cfg))
    if errors:
        raise ConfigError(errors)

    if workers is None:
        workers = min(len(cfgs), os.cpu_count() or 1)
    if workers <= 1:
        rows = [run_experiment(cfg).summary_row() for _, cfg in cfgs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, [cfg for _, cfg in cfgs]))
    for (label, _), row in zip(cfgs, rows):
        row["label"] = label

    os.makedirs(base.output_dir, exist_ok=True)
    files = {"sweep_csv": os.path.join(base.output_dir, "sweep_summary.csv")}
    cols = ["label", "mode", "l", "l_c", "l_s", "r_u_m", "v_u_mps", "noise_floor_db", "n_peaks", "top_peak_db"]
    lines = [",".join(cols)]
    for row in rows:
        lines.append(
            ",".join(
                format(row[c], ".17g") if isinstance(row[c], float) else str(row[c]) for c in cols
            )
        )
    with open(files["sweep_csv"], "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    files["sweep_json"] = os.path.join(base.output_dir, "sweep_summary.json")
    with open(files["sweep_json"], "w", encoding="utf-8", newline="\n") as fh:
        json.dump(rows, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return SweepReport(rows=tuple(rows), files=files)
