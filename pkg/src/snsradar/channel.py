"""Delay/Doppler/attenuation channel and additive noise.

The primary simulation path is frequency-domain: a target at range r and
velocity v multiplies subcarrier m / symbol n by
e^{-j 2 pi m df tau} * e^{+j 2 pi n f_D T_s} with tau = 2r/c and
f_D = 2v/lambda. Range migration and inter-carrier interference are
outside the model (phases are constant per entry), which is also why
Doppler is a per-symbol constant, not a per-sample ramp.

A time-domain path (synth_time_domain + time_channel) exists solely to
demonstrate that physically decimating the ADC stream folds the sub-bands;
it supports integer sample delays at zero Doppler, noiseless. Fractional
delays belong to the frequency-domain path.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import RadarMetrics, RadarParams, derive_metrics


@dataclass(frozen=True)
class Target:
    range_m: float
    velocity_mps: float
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        if self.range_m < 0:
            raise ValueError("range must be >= 0")
        if abs(self.amplitude) == 0:
            raise ValueError("amplitude must be nonzero")


@dataclass(frozen=True)
class TargetScenario:
    targets: tuple[Target, ...]
    noise_power: float = 0.0
    noise_seed: int = 0

    def __post_init__(self) -> None:
        if self.noise_power < 0:
            raise ValueError("noise_power must be >= 0")
        object.__setattr__(self, "targets", tuple(self.targets))


@dataclass(frozen=True)
class SampleStream:
    """Full-rate time-domain frame: N_s symbols of (cp + body) samples."""

    samples: np.ndarray
    sample_rate: float
    cp_samples: int
    body_samples: int
    n_symbols: int

    def __post_init__(self) -> None:
        expect = self.n_symbols * (self.cp_samples + self.body_samples)
        if self.samples.shape != (expect,):
            raise ValueError(f"stream length {self.samples.shape} != {expect}")


def target_matrix(
    scenario: TargetScenario, params: RadarParams, metrics: RadarMetrics | None = None
) -> np.ndarray:
    """Sum of per-target phase ramps, shape (N_c, N_s).

    X[m, n] = sum_k alpha_k e^{-j 2 pi m df tau_k} e^{+j 2 pi n f_D,k T_s}
    with m = 1..N_c down the rows and n = 1..N_s across the columns.
    """
    if metrics is None:
        metrics = derive_metrics(params)
    m = np.arange(1, params.n_subcarriers + 1)[:, None]
    n = np.arange(1, params.n_symbols + 1)[None, :]
    x = np.zeros((params.n_subcarriers, params.n_symbols), dtype=complex)
    for t in scenario.targets:
        tau = 2.0 * t.range_m / metrics.speed_of_light
        f_d = 2.0 * t.velocity_mps / metrics.wavelength
        x += t.amplitude * np.exp(-2j * np.pi * m * params.subcarrier_spacing * tau) * np.exp(
            2j * np.pi * n * f_d * params.total_symbol_duration
        )
    return x


def noise_matrix(scenario: TargetScenario, params: RadarParams) -> np.ndarray:
    """Circular complex Gaussian noise, variance noise_power per entry."""
    rng = np.random.default_rng(scenario.noise_seed)
    scale = np.sqrt(scenario.noise_power / 2.0)
    shape = (params.n_subcarriers, params.n_symbols)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def apply_channel(
    tx: np.ndarray,
    scenario: TargetScenario,
    params: RadarParams,
    metrics: RadarMetrics | None = None,
) -> np.ndarray:
    """Received frame S = tx * X + W (elementwise product plus noise)."""
    shape = (params.n_subcarriers, params.n_symbols)
    if tx.shape != shape:
        raise ValueError(f"tx shape {tx.shape} does not match frame shape {shape}")
    s = tx * target_matrix(scenario, params, metrics)
    if scenario.noise_power > 0:
        s = s + noise_matrix(scenario, params)
    return s


def cp_sample_count(params: RadarParams) -> int:
    """Cyclic prefix length in samples at the full rate B; must be integral."""
    exact = params.cp_duration * params.bandwidth
    cp = round(exact)
    if abs(exact - cp) > 1e-9:
        raise ValueError(f"cp_duration * bandwidth = {exact} is not an integer sample count")
    return cp


def synth_time_domain(tx: np.ndarray, params: RadarParams) -> SampleStream:
    """Full-rate OFDM synthesis of a frame: per-symbol IDFT plus cyclic prefix.

    Unnormalized inverse-sum convention, body[k] = sum_m tx[m] e^{+j2pi k m/N_c}
    with subcarrier m = 1..N_c living on DFT bin m mod N_c. Under this mapping
    an integer sample delay of d in time equals the frequency-domain ramp
    e^{-j 2 pi m df tau} exactly (tau = d/B), per target, which is what the
    fold-path equivalence tests rely on.
    """
    n_c, n_s = params.n_subcarriers, params.n_symbols
    if tx.shape != (n_c, n_s):
        raise ValueError(f"tx shape {tx.shape} does not match ({n_c}, {n_s})")
    cp = cp_sample_count(params)
    # subcarrier m=1..N_c -> DFT bin m mod N_c: one-bin roll of each column
    coef = np.roll(tx, 1, axis=0)
    bodies = np.fft.ifft(coef, axis=0) * n_c
    syms = np.concatenate([bodies[-cp:, :], bodies], axis=0) if cp else bodies
    return SampleStream(
        samples=syms.T.reshape(-1).copy(),
        sample_rate=params.bandwidth,
        cp_samples=cp,
        body_samples=n_c,
        n_symbols=n_s,
    )


def delay_stream(stream: SampleStream, delay_samples: int, amplitude: complex = 1.0) -> SampleStream:
    """Delay a stream by an integer number of full-rate samples.

    The head that has no past signal is zeroed; as long as the delay fits
    inside the cyclic prefix those samples are discarded at demodulation.
    """
    if delay_samples < 0:
        raise ValueError("delay_samples must be >= 0")
    if delay_samples > stream.cp_samples:
        raise ValueError(
            f"delay of {delay_samples} samples exceeds the cyclic prefix "
            f"({stream.cp_samples} samples); the channel is no longer circular"
        )
    shifted = np.roll(stream.samples, delay_samples)
    if delay_samples:
        shifted[:delay_samples] = 0.0
    return SampleStream(
        samples=amplitude * shifted,
        sample_rate=stream.sample_rate,
        cp_samples=stream.cp_samples,
        body_samples=stream.body_samples,
        n_symbols=stream.n_symbols,
    )


def time_channel(
    stream: SampleStream,
    scenario: TargetScenario,
    params: RadarParams,
    metrics: RadarMetrics | None = None,
) -> SampleStream:
    """Multi-target channel acting on the full-rate stream.

    Restricted to what the time-domain model can represent exactly:
    integer sample delays, zero Doppler, no noise. Anything else raises.
    """
    if metrics is None:
        metrics = derive_metrics(params)
    if scenario.noise_power != 0:
        raise ValueError("time-domain path is noiseless; inject noise in the frequency domain")
    total = np.zeros_like(stream.samples)
    for t in scenario.targets:
        if t.velocity_mps != 0:
            raise ValueError("time-domain path supports zero Doppler only")
        exact = 2.0 * t.range_m / metrics.speed_of_light * stream.sample_rate
        d = round(exact)
        if abs(exact - d) > 1e-6:
            raise ValueError(
                f"target at {t.range_m} m needs a fractional delay ({exact} samples); "
                "use the frequency-domain path"
            )
        total = total + delay_stream(stream, d, t.amplitude).samples
    return SampleStream(
        samples=total,
        sample_rate=stream.sample_rate,
        cp_samples=stream.cp_samples,
        body_samples=stream.body_samples,
        n_symbols=stream.n_symbols,
    )
