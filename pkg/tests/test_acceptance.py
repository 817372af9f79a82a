"""End-to-end checks of every promised behavior on the full numerology.

Run with -v for a one-line verdict per item. Everything here uses the
2048 x 256 design point at c = 3e8 unless a check is explicitly about
scale-independence.
"""
import cmath
from dataclasses import replace

import numpy as np
import pytest

from snsradar import (
    FULL,
    PC_SNS,
    PRESETS,
    QPSK,
    SNS,
    CodeConfig,
    ExperimentConfig,
    RadarParams,
    Target,
    TargetScenario,
    apply_channel,
    code_interference_matrix,
    cp_sample_count,
    default_params,
    derive_metrics,
    fold_frequency,
    fold_time,
    gen_symbols,
    make_code_set,
    predict_ambiguities,
    run_experiment,
    run_sweep,
    synth_time_domain,
    time_channel,
    unambiguous_limits,
)
from snsradar.harness import run_pipeline

C = 3.0e8
P2048 = default_params()
M2048 = derive_metrics(P2048, C)

# range bin 108 = 27 * l_c for the 4x4 code, so all 16 replicas are exact
# equal-power copies; velocity may sit between bins without harm
REPLICA_TARGET = Target(16.2, 10.0)
# fully on-grid variant for floor measurements: velocity on Doppler bin 4
ALIGNED_TARGET = Target(16.2, 4 * M2048.velocity_resolution)
NOISE_POWER = 0.15


def _floor_db(mode, code, symbol_seed, noise_seed):
    cfg = ExperimentConfig(
        params=P2048,
        mode=mode,
        code=code,
        scenario=TargetScenario(
            targets=(ALIGNED_TARGET,), noise_power=NOISE_POWER, noise_seed=noise_seed
        ),
        symbol_seed=symbol_seed,
        speed_of_light=C,
    )
    return run_pipeline(cfg)[1].noise_floor_db


def test_01_metrics_hit_the_design_point():
    assert abs(M2048.range_resolution - 0.15) <= 1e-6
    assert abs(M2048.r_max - 307.2) <= 1e-3
    assert abs(M2048.v_max - 380.5) <= 0.1
    assert 2.96 <= M2048.velocity_resolution <= 2.98
    assert M2048.bandwidth == pytest.approx(1.0e9, rel=1e-12)


def test_02_code_limited_spans():
    r_u, v_u = unambiguous_limits(M2048, CodeConfig(4, 4))
    assert r_u == 76.8
    assert v_u == M2048.v_max / 4.0
    assert abs(v_u - 95.125) <= 0.025


def test_03_noiseless_replica_grid():
    cfg = ExperimentConfig(
        params=P2048,
        mode=PC_SNS,
        code=CodeConfig(4, 4),
        scenario=TargetScenario(targets=(REPLICA_TARGET,), noise_power=0.0, noise_seed=0),
        symbol_seed=0,
        threshold_db=-3.0,
        speed_of_light=C,
    )
    rdmap, report, metrics = run_pipeline(cfg)
    assert len(report.peaks) == 16
    powers = [p.power_db for p in report.peaks]
    spread = max(powers) - min(powers)
    assert spread <= 0.1

    predicted = predict_ambiguities(REPLICA_TARGET, cfg.code, metrics)
    assert len(predicted) == 16
    n_c, n_s = P2048.n_subcarriers, P2048.n_symbols
    taken = set()
    for r, v in predicted:
        pr = round(r / metrics.range_resolution) % n_c
        pv = (round(v / metrics.velocity_resolution) + n_s // 2) % n_s
        match = [
            k
            for k, p in enumerate(report.peaks)
            if k not in taken
            and min(abs(p.range_bin - pr), n_c - abs(p.range_bin - pr)) <= 1
            and min(abs(p.velocity_bin - pv), n_s - abs(p.velocity_bin - pv)) <= 1
        ]
        assert match, f"no detected peak within one bin of predicted ({r:.2f} m, {v:.2f} m/s)"
        taken.add(match[0])
    assert len(taken) == 16
    print(f"\n16/16 replicas matched, power spread {spread:.3f} dB")


def test_04_sns_to_pc_sns_floor_gap():
    gaps = [
        _floor_db(SNS, CodeConfig(16, 1), 80 + s, 300 + s)
        - _floor_db(PC_SNS, CodeConfig(4, 4), 80 + s, 300 + s)
        for s in range(5)
    ]
    mean = float(np.mean(gaps))
    assert 7.0 <= mean <= 10.0
    assert abs(mean - 8.4) <= 2.0
    print(f"\nSNS floor minus PC-SNS floor: {mean:+.2f} dB over 5 seed pairs")


def test_05_folding_penalty_is_10log10_l():
    full = [_floor_db(FULL, CodeConfig(1, 1), 60 + s, 500 + s) for s in range(5)]
    lines = []
    for l in (2, 4, 8, 16):
        deltas = [_floor_db(PC_SNS, CodeConfig(l, 1), 60 + s, 500 + s) - full[s] for s in range(5)]
        mean = float(np.mean(deltas))
        ideal = 10.0 * np.log10(l)
        assert abs(mean - ideal) <= 0.7, f"L={l}: measured {mean:.2f} dB vs {ideal:.2f} dB"
        lines.append(f"L={l}: {mean:.2f} dB")
    print("\nfloor penalty vs full rate: " + ", ".join(lines))


def test_06_time_and_frequency_folding_agree():
    rng = np.random.default_rng(2026)
    cases = [
        (RadarParams(64, 8, 1.0e6, 77.0e9, 2.5e-7), (2, 4, 8)),
        (P2048, (2, 4, 8, 16)),
    ]
    for params, folds in cases:
        metrics = derive_metrics(params, C)
        d2r = C / (2.0 * params.bandwidth)
        cp = cp_sample_count(params)
        for trial in range(10):
            k = int(rng.integers(1, 4))
            delays = rng.choice(np.arange(1, cp + 1), size=k, replace=False)
            amps = rng.standard_normal(k) + 1j * rng.standard_normal(k)
            sc = TargetScenario(
                targets=tuple(
                    Target(float(d) * d2r, 0.0, complex(a)) for d, a in zip(delays, amps)
                )
            )
            tx = gen_symbols(1000 + trial, QPSK, params.n_subcarriers, params.n_symbols)
            l = int(rng.choice(folds))
            zt = fold_time(
                time_channel(synth_time_domain(tx, params), sc, params, metrics), l, params
            )
            zf = fold_frequency(apply_channel(tx, sc, params, metrics), l)
            err = np.linalg.norm(zt.entries - zf.entries) / np.linalg.norm(zf.entries)
            assert err <= 1e-6, f"N_c={params.n_subcarriers} trial {trial}: rel err {err:.2e}"


def _scalar_interference(cfg, params, a, b):
    rows = params.n_subcarriers // cfg.l

    def entry(p, q, m, n):
        ramp = cmath.exp(2j * cmath.pi * p * m / cfg.l_c)
        phi = cmath.exp(2j * cmath.pi * p * rows / cfg.l_c) ** (q - 1)
        return ramp * phi * cmath.exp(2j * cmath.pi * q * n / cfg.l_s)

    out = np.empty((rows, params.n_symbols), dtype=complex)
    for i in range(rows):
        for j in range(params.n_symbols):
            den = entry(a, b, i + 1, j + 1)
            out[i, j] = sum(
                entry(p, q, i + 1, j + 1) / den
                for p in range(1, cfg.l_c + 1)
                for q in range(1, cfg.l_s + 1)
            )
    return out


def test_07_interference_pattern_is_block_independent():
    params = RadarParams(64, 8, 1.0e6, 77.0e9)
    checked, degenerate = 0, []
    for l_c in (1, 2, 4, 8, 16):
        for l_s in (1, 2, 4, 8):
            cfg = CodeConfig(l_c, l_s)
            if cfg.l > 16 or params.n_subcarriers % cfg.l or params.n_symbols % l_s:
                continue
            try:
                codes = make_code_set(cfg, params)
            except ValueError:
                degenerate.append((l_c, l_s))
                continue
            ref = code_interference_matrix(codes, 1, 1)
            for a in range(1, l_c + 1):
                for b in range(1, l_s + 1):
                    dev = np.max(np.abs(code_interference_matrix(codes, a, b) - ref))
                    assert dev <= 1e-9, f"(l_c={l_c}, l_s={l_s}) block ({a},{b}): {dev:.2e}"
            assert np.max(np.abs(ref - _scalar_interference(cfg, params, 1, 1))) <= 1e-9
            checked += 1
    # the one factorization whose frequency code cannot complete a period
    # inside a sub-band is rejected up front rather than silently degrading
    assert degenerate == [(8, 2)]
    assert checked >= 12
    print(f"\n{checked} code configs verified block-independent")


def test_08_replica_count_and_floor_against_uncoded_folding():
    base = PRESETS["fig7-scenario"]()
    pc = run_pipeline(base)[1]
    sns = run_pipeline(replace(base, mode=SNS, code=CodeConfig(16, 1)))[1]
    assert len(pc.peaks) == 16  # l_c * l_s coded replicas
    assert len(sns.peaks) == 1  # one target, mismatch energy stays diffuse
    gap = sns.noise_floor_db - pc.noise_floor_db
    assert gap >= 3.0
    print(
        f"\nfloors: SNS {sns.noise_floor_db:.2f} dB (1 peak) vs "
        f"PC-SNS {pc.noise_floor_db:.2f} dB (16 peaks), gap {gap:+.2f} dB"
    )


def test_09_preset_reruns_are_byte_identical(tmp_path):
    for name in sorted(PRESETS):
        outputs = {}
        for tag in ("a", "b"):
            out = tmp_path / name / tag
            cfg = replace(PRESETS[name](), output_dir=str(out), emit_plots=False)
            if cfg.sweep:
                run_sweep(cfg, workers=1)
            else:
                run_experiment(cfg)
            outputs[tag] = {
                str(p.relative_to(out)): p.read_bytes() for p in sorted(out.rglob("*.csv"))
            }
        assert outputs["a"], f"{name}: no CSV artifacts written"
        assert outputs["a"].keys() == outputs["b"].keys()
        for key in outputs["a"]:
            assert outputs["a"][key] == outputs["b"][key], f"{name}/{key} differs between reruns"
