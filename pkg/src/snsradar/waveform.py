"""Symbol generation, phase codes, and transmit frame assembly.

A transmit frame is an N_c x N_s complex ndarray: one row per subcarrier,
one column per OFDM symbol. Sub-Nyquist operation splits the frame into L
stacked sub-band blocks of N_c/L rows each. In SNS mode the blocks carry
independent random symbols; in PC-SNS mode every block carries the same
random payload multiplied by a per-block phase code that separates the
blocks again after folding.

Code index conventions follow the defining phase formulas: code indices
p (frequency) and q (time), subcarrier m and symbol n all start at 1.
Storage is 0-based; the 1-based indices appear only inside exponents.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import CodeConfig, RadarParams

QPSK = "QPSK"
QAM16 = "QAM16"

_QAM16_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0]) / np.sqrt(10.0)


def gen_symbols(seed: int, constellation: str, rows: int, cols: int) -> np.ndarray:
    """Deterministic pseudo-random symbol matrix.

    Uses ``np.random.default_rng(seed)`` (PCG64) drawing one uniform
    constellation index per entry, so the same seed reproduces the matrix
    bit-for-bit on any platform. QPSK points are e^{j(pi/4 + k*pi/2)};
    QAM16 uses levels {-3,-1,1,3}/sqrt(10) per axis (unit average power).
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    rng = np.random.default_rng(seed)
    if constellation == QPSK:
        k = rng.integers(0, 4, size=(rows, cols))
        return np.exp(1j * (np.pi / 4 + np.pi / 2 * k))
    if constellation == QAM16:
        k = rng.integers(0, 16, size=(rows, cols))
        return _QAM16_LEVELS[k % 4] + 1j * _QAM16_LEVELS[k // 4]
    raise ValueError(f"unknown constellation {constellation!r}")


def time_code(q: int, cfg: CodeConfig, params: RadarParams) -> np.ndarray:
    """Time-domain phase code Q_q, shape (N_c/L, N_s).

    Entry at symbol n (1-based) is e^{j 2 pi q n / l_s}, constant down the
    rows of a sub-band block. Indices beyond l_s wrap: Q_{q+l_s} = Q_q by
    construction of the exponent.
    """
    if q < 1:
        raise ValueError(f"time code index q={q} out of range (q >= 1)")
    rows = params.n_subcarriers // cfg.l
    n = np.arange(1, params.n_symbols + 1)
    return np.tile(np.exp(2j * np.pi * q * n / cfg.l_s), (rows, 1))


def freq_code_block(p: int, q: int, cfg: CodeConfig, params: RadarParams) -> np.ndarray:
    """Frequency-domain phase code block P_p^(q), shape (N_c/L, N_s).

    The first block P_p^(1) ramps e^{j 2 pi p m / l_c} down its rows
    (m = 1..N_c/L, constant across columns). Later blocks continue the same
    ramp through the offset phi_p = e^{j 2 pi p (N_c/L) / l_c}:
    P_p^(q) = phi_p^(q-1) * P_p^(1), so stacking q = 1..l_s yields one
    continuous ramp over the N_c/l_c rows owned by code p. Indices beyond
    l_c wrap: P_{p+l_c} = P_p by construction of the exponent.
    """
    if p < 1:
        raise ValueError(f"freq code index p={p} out of range (p >= 1)")
    if q < 1:
        raise ValueError(f"time index q={q} out of range (q >= 1)")
    rows = params.n_subcarriers // cfg.l
    m = np.arange(1, rows + 1)
    ramp = np.exp(2j * np.pi * p * m / cfg.l_c)
    phi = np.exp(2j * np.pi * p * rows / cfg.l_c)
    return (phi ** (q - 1)) * np.tile(ramp[:, None], (1, params.n_symbols))


@dataclass(frozen=True)
class PhaseCodeSet:
    """All phase-code matrices for one (CodeConfig, RadarParams) pair.

    time_codes[q-1] is Q_q with shape (N_c/L, N_s). freq_codes[p-1] stacks
    P_p^(1)..P_p^(l_s) into an (N_c/l_c, N_s) continuous ramp.
    """

    code_config: CodeConfig
    params: RadarParams
    time_codes: tuple[np.ndarray, ...]
    freq_codes: tuple[np.ndarray, ...]

    def block_rows(self) -> int:
        return self.params.n_subcarriers // self.code_config.l

    def block_code(self, p: int, q: int) -> np.ndarray:
        """Combined code P_p^(q) * Q_q of sub-band block (p, q).

        Indices wrap with the code periods l_c and l_s.
        """
        cfg = self.code_config
        rows = self.block_rows()
        p = (p - 1) % cfg.l_c
        q = (q - 1) % cfg.l_s
        return self.freq_codes[p][q * rows : (q + 1) * rows] * self.time_codes[q]


def make_code_set(cfg: CodeConfig, params: RadarParams) -> PhaseCodeSet:
    """Build the PhaseCodeSet, validating the config against the numerology."""
    cfg.validate_for(params)
    tc = tuple(time_code(q, cfg, params) for q in range(1, cfg.l_s + 1))
    fc = tuple(
        np.vstack([freq_code_block(p, q, cfg, params) for q in range(1, cfg.l_s + 1)])
        for p in range(1, cfg.l_c + 1)
    )
    return PhaseCodeSet(code_config=cfg, params=params, time_codes=tc, freq_codes=fc)


def assemble_pc_frame(c_sub: np.ndarray, codes: PhaseCodeSet) -> np.ndarray:
    """Stack the coded sub-band blocks C_pq = c_sub * P_p^(q) * Q_q.

    q runs fastest: block order C_11, C_12, ..., C_1ls, C_21, ... downwards.
    This fixes which physical sub-band carries which code.
    """
    cfg = codes.code_config
    rows = codes.block_rows()
    if c_sub.shape != (rows, codes.params.n_symbols):
        raise ValueError(
            f"c_sub shape {c_sub.shape} does not match sub-band shape "
            f"({rows}, {codes.params.n_symbols})"
        )
    blocks = [
        c_sub * codes.block_code(p, q)
        for p in range(1, cfg.l_c + 1)
        for q in range(1, cfg.l_s + 1)
    ]
    return np.vstack(blocks)


def assemble_sns_frame(seed: int, constellation: str, params: RadarParams, l: int) -> np.ndarray:
    """Full-rate frame of independent random symbols (no code structure).

    The L sub-band blocks share nothing, which is what produces symbol
    mismatch noise when the folded frame is divided blockwise. L = 1 is a
    conventional OFDM frame.
    """
    if l < 1 or params.n_subcarriers % l:
        raise ValueError(f"fold factor L={l} must be a positive divisor of n_subcarriers")
    return gen_symbols(seed, constellation, params.n_subcarriers, params.n_symbols)


def code_interference_matrix(codes: PhaseCodeSet, a: int, b: int) -> np.ndarray:
    """Literal sum over (p, q) of block-code ratios against block (a, b).

    Returns sum_{p,q} (P_p^(q) * Q_q) / (P_a^(b) * Q_b), shape (N_c/L, N_s).
    For every valid config this is the same matrix for all (a, b) and equals
    sum_{p,q} P_p^(q) * Q_q: after division-based unfolding each sub-band
    block sees one identical interference pattern, so a target reappears as
    clean equal-amplitude replicas instead of block-dependent smear. That
    block-independence is exactly what CodeConfig.validate_for guards.
    """
    cfg = codes.code_config
    denom = codes.block_code(a, b)
    total = np.zeros_like(denom)
    for p in range(1, cfg.l_c + 1):
        for q in range(1, cfg.l_s + 1):
            total = total + codes.block_code(p, q) / denom
    return total
