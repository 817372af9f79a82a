"""Full-rate OFDM radar baseline: two targets, moderate noise, one map.

Walks the plain (no folding) pipeline end to end and prints the numbers
that matter: the derived performance metrics, the detected peaks, and how
far the measured noise floor sits from the matched-filter prediction.
"""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from snsradar import (
    QPSK,
    Target,
    TargetScenario,
    apply_channel,
    default_params,
    derive_metrics,
    detect_peaks,
    fold_frequency,
    gen_symbols,
    range_doppler_map,
    thermal_floor_db,
    unfold,
)

OUT = os.path.join(os.path.dirname(__file__), "out")


def main():
    params = default_params()
    metrics = derive_metrics(params, speed_of_light=3.0e8)

    print("77 GHz automotive numerology")
    print(f"  bandwidth            {metrics.bandwidth / 1e9:.3f} GHz")
    print(f"  range resolution     {metrics.range_resolution:.3f} m")
    print(f"  unambiguous range    {metrics.r_max:.1f} m")
    print(f"  velocity resolution  {metrics.velocity_resolution:.3f} m/s")
    print(f"  unambiguous velocity +/- {metrics.v_max:.1f} m/s")

    scenario = TargetScenario(
        targets=(
            Target(range_m=42.3, velocity_mps=-12.0),
            Target(range_m=117.0, velocity_mps=31.5, amplitude=0.35),
        ),
        noise_power=0.15,
        noise_seed=4,
    )

    tx = gen_symbols(0, QPSK, params.n_subcarriers, params.n_symbols)
    rx = apply_channel(tx, scenario, params, metrics)
    # L = 1: the "fold" is a no-op and unfolding is plain symbol division
    d = unfold(fold_frequency(rx, 1), tx)
    rdmap = range_doppler_map(d, params, metrics=metrics)
    report = detect_peaks(rdmap, threshold_db=-20.0)

    print(f"\ndetected {len(report.peaks)} peaks above -20 dB:")
    for p in report.peaks:
        print(f"  {p.range_m:7.2f} m  {p.velocity_mps:+8.2f} m/s  {p.power_db:7.2f} dB")
    predicted = thermal_floor_db(1, scenario.noise_power, params)
    print(f"\nnoise floor {report.noise_floor_db:.2f} dB (prediction {predicted:.2f} dB)")

    os.makedirs(OUT, exist_ok=True)
    db = 10.0 * np.log10(np.maximum(rdmap.power / rdmap.normalization, 1e-12))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    im = ax1.imshow(
        db,
        origin="lower",
        aspect="auto",
        vmin=report.noise_floor_db - 5,
        vmax=0,
        extent=[rdmap.velocity_axis[0], rdmap.velocity_axis[-1], 0, metrics.r_max],
    )
    ax1.set_xlabel("velocity [m/s]")
    ax1.set_ylabel("range [m]")
    ax1.set_title("range-Doppler map")
    fig.colorbar(im, ax=ax1, label="dB")
    vbin = report.peaks[0].velocity_bin
    ax2.plot(rdmap.range_axis, db[:, vbin], lw=0.8)
    ax2.axhline(report.noise_floor_db, color="gray", ls="--", lw=0.8, label="noise floor")
    ax2.set_xlabel("range [m]")
    ax2.set_ylabel("power [dB]")
    ax2.set_title(f"range cut at {rdmap.velocity_axis[vbin]:.1f} m/s")
    ax2.legend()
    fig.tight_layout()
    path = os.path.join(OUT, "full_rate_basics.svg")
    fig.savefig(path)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
