import json
import os
from dataclasses import replace

import numpy as np
import pytest

from snsradar import (
    PRESETS,
    CodeConfig,
    ConfigError,
    ExperimentConfig,
    RadarParams,
    Target,
    TargetScenario,
    emit_config,
    load_config,
    parse_config,
    run_experiment,
    run_sweep,
    validate_config,
)
from snsradar.cli import main, parse_over
from snsradar.harness import config_from_dict, config_to_dict


def _small_cfg(tmp_path, **kw):
    base = dict(
        params=RadarParams(256, 32, 1.0e6, 77.0e9),
        mode="PC-SNS",
        code=CodeConfig(2, 2),
        scenario=TargetScenario(targets=(Target(30.0, 8.0),), noise_power=0.1, noise_seed=1),
        speed_of_light=3.0e8,
        output_dir=str(tmp_path / "out"),
        emit_plots=False,
    )
    base.update(kw)
    return ExperimentConfig(**base)


# ------------------------------------------------------------ config i/o

@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_round_trips_through_yaml(name, tmp_path):
    cfg = load_config(name)
    path = tmp_path / "cfg.yaml"
    path.write_text(emit_config(cfg), encoding="utf-8")
    assert parse_config(str(path)) == cfg


def test_config_round_trip_preserves_every_field(tmp_path):
    cfg = _small_cfg(
        tmp_path,
        constellation="QAM16",
        window="hann",
        threshold_db=-12.5,
        guard_bins=2,
        symbol_seed=9,
        emit_csv=False,
        sweep=(CodeConfig(2, 1), CodeConfig(4, 1)),
        scenario=TargetScenario(
            targets=(Target(30.0, 8.0, 0.5 - 0.25j), Target(45.0, -3.0, 2.0)),
            noise_power=0.05,
            noise_seed=77,
        ),
    )
    assert config_from_dict(config_to_dict(cfg)) == cfg


def test_parse_config_from_yaml(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(
        "\n".join(
            [
                "params:",
                "  n_subcarriers: 256",
                "  n_symbols: 32",
                "  subcarrier_spacing: 1000000.0",
                "  carrier_freq: 77000000000.0",
                "mode: SNS",
                "code: {l: 4}",
                "scenario:",
                "  targets:",
                "    - {range: 25.0, velocity: 3.0}",
                "  noise_power: 0.1",
                "speed_of_light: 300000000.0",
            ]
        ),
        encoding="utf-8",
    )
    cfg = parse_config(str(path))
    assert cfg.mode == "SNS"
    assert cfg.code == CodeConfig(4, 1)
    assert cfg.scenario.targets[0].range_m == 25.0
    assert validate_config(cfg) == []


def test_config_rejects_l_together_with_lc(tmp_path):
    raw = config_to_dict(_small_cfg(tmp_path))
    raw["code"] = {"l": 4, "l_c": 2}
    with pytest.raises(ConfigError):
        config_from_dict(raw)


def test_config_missing_section():
    with pytest.raises(ConfigError) as ei:
        config_from_dict({"mode": "FULL"})
    assert "params" in str(ei.value)


def test_load_config_unknown_name():
    with pytest.raises(ConfigError):
        load_config("no-such-preset")


# ---------------------------------------------------------- validation

def test_validate_full_requires_l1(tmp_path):
    errs = validate_config(_small_cfg(tmp_path, mode="FULL", code=CodeConfig(2, 1)))
    assert len(errs) == 1 and "L must be 1" in errs[0]


def test_validate_sns_rejects_time_codes(tmp_path):
    errs = validate_config(_small_cfg(tmp_path, mode="SNS"))
    assert errs and "time codes" in errs[0]


def test_validate_code_divisibility(tmp_path):
    errs = validate_config(_small_cfg(tmp_path, code=CodeConfig(3, 1)))
    assert errs and "divide" in errs[0]


def test_validate_empty_targets(tmp_path):
    errs = validate_config(_small_cfg(tmp_path, scenario=TargetScenario(targets=())))
    assert any("at least one target" in e for e in errs)


def test_validate_collects_all_diagnostics(tmp_path):
    cfg = _small_cfg(tmp_path, mode="XXX", window="boxcar", threshold_db=1.0)
    assert len(validate_config(cfg)) >= 3


def test_run_experiment_rejects_invalid(tmp_path):
    with pytest.raises(ConfigError):
        run_experiment(_small_cfg(tmp_path, mode="XXX"))


# ----------------------------------------------------------- artifacts

def test_run_experiment_artifacts(tmp_path):
    cfg = _small_cfg(tmp_path)
    rep = run_experiment(cfg)
    names = ("map.csv", "map.rdm", "range_profile.csv", "doppler_profile.csv", "peaks.csv", "summary.json")
    for name in names:
        assert os.path.exists(os.path.join(cfg.output_dir, name))
    with open(os.path.join(cfg.output_dir, "summary.json"), encoding="utf-8") as fh:
        summary = json.load(fh)
    assert summary["mode"] == "PC-SNS"
    assert summary["code"] == {"l": 4, "l_c": 2, "l_s": 2}
    assert summary["noise_floor_db"] == rep.peaks.noise_floor_db
    assert summary["r_u_m"] == rep.r_u
    assert len(summary["peaks"]) == len(rep.peaks.peaks)
    assert summary["predicted_ambiguities"]  # replica grid rides along for coded runs


def test_written_map_matches_report(tmp_path):
    cfg = _small_cfg(tmp_path)
    rep = run_experiment(cfg)
    data = np.loadtxt(os.path.join(cfg.output_dir, "map.csv"), delimiter=",", skiprows=1)
    assert np.array_equal(data[:, 1:], rep.rdmap.power)


def test_limits_reported_per_mode(tmp_path):
    pc = run_experiment(_small_cfg(tmp_path, output_dir=str(tmp_path / "a")))
    assert pc.r_u == pytest.approx(pc.metrics.r_max / 2.0, rel=1e-12)
    assert pc.v_u == pytest.approx(pc.metrics.v_max / 2.0, rel=1e-12)
    sns = run_experiment(
        _small_cfg(tmp_path, mode="SNS", code=CodeConfig(4, 1), output_dir=str(tmp_path / "b"))
    )
    # uncoded folding keeps the full spans; the cost is the raised floor
    assert sns.r_u == sns.metrics.r_max
    assert sns.v_u == sns.metrics.v_max


def test_rerun_is_byte_identical(tmp_path):
    run_experiment(_small_cfg(tmp_path, output_dir=str(tmp_path / "a")))
    run_experiment(_small_cfg(tmp_path, output_dir=str(tmp_path / "b")))
    for name in ("map.csv", "peaks.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_emit_toggles(tmp_path):
    cfg = _small_cfg(tmp_path, emit_csv=False, emit_report=False)
    rep = run_experiment(cfg)
    assert not os.path.exists(os.path.join(cfg.output_dir, "map.csv"))
    assert not os.path.exists(os.path.join(cfg.output_dir, "summary.json"))
    assert rep.peaks.peaks  # numeric results are still produced


def test_plot_artifacts(tmp_path):
    rep = run_experiment(_small_cfg(tmp_path, emit_plots=True))
    for key in ("plot_range", "plot_doppler", "plot_map"):
        assert rep.files[key].endswith(".svg")
        assert os.path.getsize(rep.files[key]) > 0


# --------------------------------------------------------------- sweeps

def test_sweep_trades_span_for_fold_factor(tmp_path):
    base = _small_cfg(tmp_path)
    points = [CodeConfig(16, 1), CodeConfig(8, 2), CodeConfig(4, 4), CodeConfig(2, 8), CodeConfig(1, 16)]
    rep = run_sweep(base, points=points, workers=1)
    r_max = 3.0e8 / (2.0 * 1.0e6)
    assert [row["r_u_m"] for row in rep.rows] == pytest.approx([r_max / c.l_c for c in points], rel=1e-12)
    v = [row["v_u_mps"] for row in rep.rows]
    assert v[0] == pytest.approx(16 * v[-1], rel=1e-9)
    with open(rep.files["sweep_csv"], encoding="utf-8") as fh:
        header = fh.readline().strip()
    assert header.startswith("label,mode,l,l_c,l_s,r_u_m,v_u_mps,noise_floor_db")
    assert rep.rows[0]["label"] == "L16_lc16_ls1"


def test_sweep_empty_rejected(tmp_path):
    with pytest.raises(ConfigError, match="empty sweep"):
        run_sweep(_small_cfg(tmp_path), points=[])


def test_sweep_invalid_point_aborts_everything(tmp_path):
    base = _small_cfg(tmp_path)
    with pytest.raises(ConfigError) as ei:
        run_sweep(base, points=[CodeConfig(2, 1), CodeConfig(3, 1)], workers=1)
    assert "L3_lc3_ls1" in str(ei.value)
    # the valid point must not have run either
    assert not os.path.exists(os.path.join(base.output_dir, "L2_lc2_ls1"))


def test_sns_floor_rises_with_fold_factor(tmp_path):
    base = _small_cfg(tmp_path, mode="SNS", code=CodeConfig(2, 1))
    rep = run_sweep(base, points=[CodeConfig(l, 1) for l in (2, 4, 8, 16)], workers=1)
    floors = [row["noise_floor_db"] for row in rep.rows]
    assert floors == sorted(floors)
    assert floors[-1] > floors[0] + 6.0


def test_sweep_parallel_matches_serial(tmp_path):
    base = _small_cfg(tmp_path, mode="SNS", code=CodeConfig(2, 1))
    pts = [CodeConfig(2, 1), CodeConfig(4, 1)]
    a = run_sweep(replace(base, output_dir=str(tmp_path / "ser")), points=pts, workers=1)
    b = run_sweep(replace(base, output_dir=str(tmp_path / "par")), points=pts, workers=2)
    strip = lambda rows: [{k: v for k, v in r.items() if k != "output_dir"} for r in rows]
    assert strip(a.rows) == strip(b.rows)


# ------------------------------------------------------------------ cli

def test_cli_presets(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in PRESETS:
        assert name in out


def test_cli_validate_preset():
    assert main(["validate", "table1-sim"]) == 0


def test_cli_validate_bad_config(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text(emit_config(_small_cfg(tmp_path, mode="FULL", code=CodeConfig(2, 1))), encoding="utf-8")
    assert main(["validate", str(path)]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_run_writes_outputs(tmp_path, capsys):
    cfg_path = tmp_path / "exp.yaml"
    cfg_path.write_text(emit_config(_small_cfg(tmp_path)), encoding="utf-8")
    out = tmp_path / "cli_out"
    assert main(["run", str(cfg_path), "--out", str(out)]) == 0
    assert (out / "summary.json").exists()
    assert "noise floor" in capsys.readouterr().out


def test_cli_seed_overrides_are_deterministic(tmp_path):
    cfg_path = tmp_path / "exp.yaml"
    cfg_path.write_text(emit_config(_small_cfg(tmp_path)), encoding="utf-8")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(cfg_path), "--out", str(a), "--seed", "5", "--noise-seed", "9"]) == 0
    assert main(["run", str(cfg_path), "--out", str(b), "--seed", "5", "--noise-seed", "9"]) == 0
    assert (a / "map.csv").read_bytes() == (b / "map.csv").read_bytes()
    with open(a / "summary.json", encoding="utf-8") as fh:
        assert json.load(fh)["symbol_seed"] == 5


def test_cli_unknown_config_is_a_config_error(capsys):
    assert main(["run", "definitely-not-a-preset"]) == 1
    assert "config error" in capsys.readouterr().err


def test_cli_runtime_failure_exit_code(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("x", encoding="utf-8")
    cfg_path = tmp_path / "exp.yaml"
    cfg_path.write_text(
        emit_config(_small_cfg(tmp_path, output_dir=str(blocker / "sub"))), encoding="utf-8"
    )
    assert main(["run", str(cfg_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_sweep(tmp_path, capsys):
    cfg_path = tmp_path / "exp.yaml"
    cfg_path.write_text(emit_config(_small_cfg(tmp_path, mode="SNS", code=CodeConfig(2, 1))), encoding="utf-8")
    out = tmp_path / "sw"
    rc = main(["sweep", str(cfg_path), "--over", "L=2,4", "--out", str(out), "--workers", "1", "--no-plots"])
    assert rc == 0
    assert (out / "sweep_summary.csv").exists()
    assert (out / "L4_lc4_ls1" / "summary.json").exists()
    assert "noise_floor_db" in capsys.readouterr().out


def test_parse_over_forms():
    assert parse_over("L=2,4") == [CodeConfig(2, 1), CodeConfig(4, 1)]
    assert parse_over("code=4x4,16x1") == [CodeConfig(4, 4), CodeConfig(16, 1)]
    with pytest.raises(ConfigError):
        parse_over("L=")
    with pytest.raises(ConfigError):
        parse_over("bogus=1")
    with pytest.raises(ConfigError):
        parse_over("code=4y4")
