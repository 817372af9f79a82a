"""Range-Doppler processing: maps, peaks, ambiguity prediction, floors.

Transform conventions are fixed so that a unit-amplitude target processed
at full rate peaks at exactly N_c * N_s in amplitude (the processing gain):
inverse DFT along subcarriers with an N_c prefactor, forward DFT along
symbols, both unnormalized sums. All dB figures are relative to the map
maximum, matching normalized radar plots that put the strongest peak at
0 dB.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .params import CodeConfig, RadarMetrics, RadarParams, derive_metrics
from .channel import Target
from .receiver import UnfoldedFrame

WINDOWS = ("none", "hann")

DB_FLOOR = -400.0
"""Clip for log of exact zeros; far below anything physical."""


@dataclass(frozen=True)
class RangeDopplerMap:
    """Linear power surface with physical axes.

    range_axis[i] = i * range_resolution (periodic at r_max);
    velocity_axis is FFT-shifted to the signed span [-v_max, +v_max).
    normalization is the peak linear power used as the 0 dB reference.
    """

    power: np.ndarray
    range_axis: np.ndarray
    velocity_axis: np.ndarray
    normalization: float


@dataclass(frozen=True)
class Peak:
    range_bin: int
    velocity_bin: int
    range_m: float
    velocity_mps: float
    power_db: float


@dataclass(frozen=True)
class PeakReport:
    """Detected peaks (descending power) plus the guarded noise floor."""

    peaks: tuple[Peak, ...]
    noise_floor_db: float
    detection_threshold_db: float
    guard_bins: int


def range_doppler_map(
    d: UnfoldedFrame | np.ndarray,
    params: RadarParams,
    window: str = "none",
    metrics: RadarMetrics | None = None,
) -> RangeDopplerMap:
    """2-D periodogram of an unfolded frame.

    Range lives on the subcarrier phase slope (inverse DFT down the rows),
    velocity on the symbol phase slope (forward DFT across the columns).
    """
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {WINDOWS}")
    if metrics is None:
        metrics = derive_metrics(params)
    entries = d.entries if isinstance(d, UnfoldedFrame) else d
    n_c, n_s = params.n_subcarriers, params.n_symbols
    if entries.shape != (n_c, n_s):
        raise ValueError(f"frame shape {entries.shape} does not match ({n_c}, {n_s})")
    if window == "hann":
        entries = entries * np.hanning(n_c)[:, None] * np.hanning(n_s)[None, :]
    amp = np.fft.fft(np.fft.ifft(entries, axis=0) * n_c, axis=1)
    power = np.fft.fftshift(np.abs(amp) ** 2, axes=1)
    return RangeDopplerMap(
        power=power,
        range_axis=np.arange(n_c) * metrics.range_resolution,
        velocity_axis=(np.arange(n_s) - n_s // 2) * metrics.velocity_resolution,
        normalization=float(power.max()),
    )


def predict_ambiguities(
    target: Target, code: CodeConfig, metrics: RadarMetrics
) -> list[tuple[float, float]]:
    """Grid of code-replica positions for one target.

    Replicas appear every r_max/l_c in range (wrapped into [0, r_max)) and
    every 2*v_max/l_s in velocity (wrapped into the signed span
    [-v_max, +v_max)). The true target is the first entry (p = q = 0).
    """
    span = 2.0 * metrics.v_max
    out = []
    for p in range(code.l_c):
        r = (target.range_m + p * metrics.r_max / code.l_c) % metrics.r_max
        for q in range(code.l_s):
            v = (target.velocity_mps + metrics.v_max + q * span / code.l_s) % span - metrics.v_max
            out.append((r, v))
    return out


def _circ_near(a: int, b: int, n: int, guard: int) -> bool:
    d = abs(a - b)
    return min(d, n - d) <= guard


def detect_peaks(rdmap: RangeDopplerMap, threshold_db: float = -15.0, guard: int = 3) -> PeakReport:
    """Greedy non-maximum suppression above a relative threshold.

    Candidate bins above threshold are claimed strongest-first; a candidate
    inside the (2*guard+1)^2 circular neighborhood of an accepted peak is
    suppressed. The noise floor is the mean linear power over all bins
    outside every accepted peak's guard region, in dB relative to the map
    maximum.
    """
    if threshold_db >= 0:
        raise ValueError("threshold_db is relative to the map max and must be < 0")
    if guard < 0:
        raise ValueError("guard must be >= 0")
    power = rdmap.power
    n_c, n_s = power.shape
    if rdmap.normalization <= 0:
        raise ValueError("empty map: no nonzero power to detect against")
    level = rdmap.normalization * 10.0 ** (threshold_db / 10.0)
    cand = np.flatnonzero(power >= level)
    order = cand[np.argsort(power.ravel()[cand], kind="stable")[::-1]]
    accepted: list[tuple[int, int]] = []
    for idx in order:
        r, c = divmod(int(idx), n_s)
        if any(
            _circ_near(r, r0, n_c, guard) and _circ_near(c, c0, n_s, guard)
            for r0, c0 in accepted
        ):
            continue
        accepted.append((r, c))

    mask = np.ones(power.shape, dtype=bool)
    for r0, c0 in accepted:
        rr = np.abs((np.arange(n_c) - r0 + n_c // 2) % n_c - n_c // 2)
        cc = np.abs((np.arange(n_s) - c0 + n_s // 2) % n_s - n_s // 2)
        mask &= ~((rr[:, None] <= guard) & (cc[None, :] <= guard))
    if mask.any():
        floor = 10.0 * np.log10(max(power[mask].mean() / rdmap.normalization, 10.0 ** (DB_FLOOR / 10.0)))
    else:
        floor = float("nan")

    peaks = tuple(
        Peak(
            range_bin=r,
            velocity_bin=c,
            range_m=float(rdmap.range_axis[r]),
            velocity_mps=float(rdmap.velocity_axis[c]),
            power_db=float(10.0 * np.log10(power[r, c] / rdmap.normalization)),
        )
        for r, c in accepted
    )
    return PeakReport(
        peaks=peaks,
        noise_floor_db=float(floor),
        detection_threshold_db=threshold_db,
        guard_bins=guard,
    )


def compare_noise_floors(a: PeakReport, b: PeakReport) -> float:
    """noise_floor_db(a) - noise_floor_db(b), in dB."""
    return a.noise_floor_db - b.noise_floor_db


def sns_mismatch_floor_db(l: int, params: RadarParams) -> float:
    """Predicted SNS symbol-mismatch floor relative to the peak, noiseless.

    Each unfolded entry carries L-1 unit-variance mismatch terms (the other
    blocks' symbols divided by this block's) that the 2-D transform spreads
    white, against a coherent peak gain of N_c*N_s:
    10*log10((L-1)/(N_c*N_s)).
    """
    if l < 2:
        raise ValueError("mismatch noise needs L >= 2")
    return 10.0 * np.log10((l - 1) / (params.n_subcarriers * params.n_symbols))


def thermal_floor_db(l: int, noise_power: float, params: RadarParams, amplitude: float = 1.0) -> float:
    """Predicted thermal floor relative to the peak of a unit target.

    Folding sums L independent noise blocks, so the unfolded per-entry
    noise variance is L*sigma^2 (division by unit-modulus symbols preserves
    it): 10*log10(L*sigma^2 / (N_c*N_s*|alpha|^2)).
    """
    if noise_power <= 0:
        raise ValueError("noise_power must be > 0")
    gain = params.n_subcarriers * params.n_symbols * amplitude**2
    return 10.0 * np.log10(l * noise_power / gain)


_MAGIC = b"SNSRDM\x00\x01"


def export_map_csv(rdmap: RangeDopplerMap, path: str) -> None:
    """Write the map as CSV: header row of velocities, range in column 0.

    Cell (i, j) holds linear power at range_axis[i], velocity_axis[j].
    %.17g keeps float64 round-trip exact, so identical maps produce
    byte-identical files.
    """
    header = "range_m," + ",".join(format(v, ".17g") for v in rdmap.velocity_axis)
    data = np.hstack([rdmap.range_axis[:, None], rdmap.power])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=header, comments="")


def export_map_binary(rdmap: RangeDopplerMap, path: str) -> None:
    """Compact dump: magic, dims, axis parameters, row-major float64 LE."""
    n_c, n_s = rdmap.power.shape
    dr = float(rdmap.range_axis[1] - rdmap.range_axis[0]) if n_c > 1 else 0.0
    dv = float(rdmap.velocity_axis[1] - rdmap.velocity_axis[0]) if n_s > 1 else 0.0
    head = _MAGIC + struct.pack(
        "<IIdddd", n_c, n_s, dr, float(rdmap.velocity_axis[0]), dv, rdmap.normalization
    )
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(np.ascontiguousarray(rdmap.power, dtype="<f8").tobytes())


def load_map_binary(path: str) -> RangeDopplerMap:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"{path} is not a range-Doppler map dump")
        n_c, n_s, dr, v0, dv, norm = struct.unpack("<IIdddd", fh.read(8 + 32))
        power = np.frombuffer(fh.read(8 * n_c * n_s), dtype="<f8").reshape(n_c, n_s)
    return RangeDopplerMap(
        power=power.copy(),
        range_axis=np.arange(n_c) * dr,
        velocity_axis=v0 + np.arange(n_s) * dv,
        normalization=norm,
    )
