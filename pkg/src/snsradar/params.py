"""OFDM numerology and derived radar performance metrics.

Everything downstream (waveform synthesis, channel, range-Doppler
processing) pulls its dimensions and scale factors from the two frozen
dataclasses defined here. All quantities are SI.
"""
from __future__ import annotations

from dataclasses import dataclass, field

SPEED_OF_LIGHT = 299_792_458.0
"""Default propagation speed (m/s). Experiments that want the textbook
round numbers (0.15 m resolution at 1 GHz bandwidth) pass c = 3e8."""


@dataclass(frozen=True)
class RadarParams:
    """OFDM frame numerology.

    ``symbol_duration`` is derived (1/subcarrier_spacing) and not a free
    field; the constructor fills it in and refuses inconsistent overrides.
    """

    n_subcarriers: int
    n_symbols: int
    subcarrier_spacing: float
    carrier_freq: float
    cp_duration: float = 0.0
    symbol_duration: float = field(init=False)
    total_symbol_duration: float = field(init=False)

    def __post_init__(self) -> None:
        if self.n_subcarriers < 2:
            raise ValueError("n_subcarriers must be >= 2")
        if self.n_symbols < 1:
            raise ValueError("n_symbols must be >= 1")
        if self.subcarrier_spacing <= 0:
            raise ValueError("subcarrier_spacing must be > 0")
        if self.carrier_freq <= 0:
            raise ValueError("carrier_freq must be > 0")
        if self.cp_duration < 0:
            raise ValueError("cp_duration must be >= 0")
        t_sym = 1.0 / self.subcarrier_spacing
        object.__setattr__(self, "symbol_duration", t_sym)
        object.__setattr__(self, "total_symbol_duration", t_sym + self.cp_duration)

    @property
    def bandwidth(self) -> float:
        return self.n_subcarriers * self.subcarrier_spacing


@dataclass(frozen=True)
class RadarMetrics:
    """Performance figures derived from a :class:`RadarParams`.

    ``v_max`` is a signed half-span: the Doppler axis is periodic with full
    span 2*v_max and is reported as +/- v_max.
    """

    bandwidth: float
    range_resolution: float
    r_max: float
    velocity_resolution: float
    v_max: float
    wavelength: float
    speed_of_light: float


@dataclass(frozen=True)
class CodeConfig:
    """Factorization of the fold factor L into frequency/time code counts.

    l_c codes separate sub-bands along frequency, l_s along time;
    l = l_c * l_s is the total fold factor of the sub-Nyquist ADC.
    """

    l_c: int = 1
    l_s: int = 1

    def __post_init__(self) -> None:
        if self.l_c < 1 or self.l_s < 1:
            raise ValueError("code counts must be >= 1")

    @property
    def l(self) -> int:
        return self.l_c * self.l_s

    def validate_for(self, params: RadarParams) -> None:
        """Check divisibility against a frame numerology.

        l must divide n_subcarriers (whole sub-band blocks) and l_s must
        divide n_symbols (time codes complete whole periods across the
        frame; partial periods break code orthogonality along symbols).
        When time codes are present (l_s > 1) the frequency code must also
        complete whole periods inside one sub-band, i.e. l_c must divide
        n_subcarriers/l; otherwise the unfolding interference pattern
        differs from sub-band to sub-band and the coded replicas are no
        longer clean copies (see waveform.code_interference_matrix).
        """
        n_c, n_s = params.n_subcarriers, params.n_symbols
        if n_c % self.l:
            raise ValueError(f"fold factor L={self.l} must divide n_subcarriers={n_c}")
        if n_s % self.l_s:
            raise ValueError(f"l_s={self.l_s} must divide n_symbols={n_s}")
        if self.l_s > 1 and (n_c // self.l) % self.l_c:
            raise ValueError(
                f"l_c={self.l_c} must divide the sub-band height "
                f"n_subcarriers/L={n_c // self.l} when l_s>1; this (l_c, l_s) "
                "breaks block-independent unfolding on this numerology"
            )


def derive_metrics(params: RadarParams, speed_of_light: float = SPEED_OF_LIGHT) -> RadarMetrics:
    """Compute bandwidth, resolutions, and unambiguous spans.

    range_resolution = c/(2B), r_max = c/(2*delta_f) = N_c * range_resolution,
    velocity_resolution = lambda/(2*N_s*T_s), v_max = lambda/(4*T_s) so that
    2*v_max = N_s * velocity_resolution.
    """
    b = params.bandwidth
    lam = speed_of_light / params.carrier_freq
    t_s = params.total_symbol_duration
    return RadarMetrics(
        bandwidth=b,
        range_resolution=speed_of_light / (2.0 * b),
        r_max=speed_of_light / (2.0 * params.subcarrier_spacing),
        velocity_resolution=lam / (2.0 * params.n_symbols * t_s),
        v_max=lam / (4.0 * t_s),
        wavelength=lam,
        speed_of_light=speed_of_light,
    )


def unambiguous_limits(metrics: RadarMetrics, code: CodeConfig) -> tuple[float, float]:
    """Unambiguous range/velocity left after phase coding.

    The coded replicas tile the map every r_max/l_c in range and every
    2*v_max/l_s in velocity, shrinking the usable spans to
    r_u = r_max/l_c and v_u = +/- v_max/l_s.
    """
    return metrics.r_max / code.l_c, metrics.v_max / code.l_s


def default_params() -> RadarParams:
    """77 GHz automotive numerology used by the built-in presets.

    2048 subcarriers at 488.28125 kHz (1 GHz bandwidth), 256 symbols,
    0.512 us cyclic prefix: 0.15 m range resolution and 307.2 m maximum
    range at c = 3e8.
    """
    return RadarParams(
        n_subcarriers=2048,
        n_symbols=256,
        subcarrier_spacing=488_281.25,
        carrier_freq=77.0e9,
        cp_duration=0.512e-6,
    )
