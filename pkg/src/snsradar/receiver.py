"""Sub-Nyquist folding and division-based unfolding.

Sampling the full-band OFDM signal at B/L makes the L sub-band blocks of
the frame alias onto one another: the folded (N_c/L) x N_s frame is the
literal sum of the stacked blocks. Unfolding divides the folded frame by
each sub-band's known transmit block and re-stacks, restoring a full-size
frame estimate whose extra terms are either symbol-mismatch noise (SNS) or
the controlled code-replica pattern (PC-SNS).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SampleStream
from .params import RadarParams

FULL = "FULL"
SNS = "SNS"
PC_SNS = "PC-SNS"
MODES = (FULL, SNS, PC_SNS)

MIN_DIVISOR = 1e-6
"""Unfolding rejects transmit frames with any |entry| below this; QAM16's
smallest point (sqrt(2/10)) clears it by five orders of magnitude."""


@dataclass(frozen=True)
class FoldedFrame:
    """ADC output in the frequency domain: (N_c/L) x N_s, one fold factor."""

    entries: np.ndarray
    l: int
    mode: str

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.l < 1:
            raise ValueError("fold factor must be >= 1")


@dataclass(frozen=True)
class UnfoldedFrame:
    entries: np.ndarray
    mode: str

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


def _default_mode(l: int, mode: str | None) -> str:
    if mode is None:
        return FULL if l == 1 else PC_SNS
    return mode


def fold_frequency(s: np.ndarray, l: int, mode: str | None = None) -> FoldedFrame:
    """Sum the L stacked row-blocks of a full-size frame.

    The mode argument is a provenance label only; folding is the same
    physical aliasing regardless of what the blocks carry.
    """
    n_c = s.shape[0]
    if l < 1 or n_c % l:
        raise ValueError(f"fold factor L={l} must be a positive divisor of {n_c} rows")
    z = s.reshape(l, n_c // l, s.shape[1]).sum(axis=0)
    return FoldedFrame(entries=z, l=l, mode=_default_mode(l, mode))


def fold_time(stream: SampleStream, l: int, params: RadarParams, mode: str | None = None) -> FoldedFrame:
    """Demodulate a decimated stream: the physical route to the same fold.

    Per symbol: strip the cyclic prefix, keep every L-th sample (an ADC at
    rate B/L), forward DFT of length N_c/L. The result is scaled by L/N_c
    and rolled one bin so that L = 1 is the exact demodulation inverse of
    synth_time_domain and the rows realize the literal block sum of
    fold_frequency (the decimated DFT natively yields the block average
    under the synthesis convention's 1/N_c).
    """
    n_c, n_s = params.n_subcarriers, params.n_symbols
    if l < 1 or n_c % l:
        raise ValueError(f"fold factor L={l} must be a positive divisor of N_c={n_c}")
    if stream.body_samples != n_c or stream.n_symbols != n_s:
        raise ValueError("stream layout does not match params")
    per = stream.cp_samples + stream.body_samples
    bodies = stream.samples.reshape(n_s, per)[:, stream.cp_samples :]
    decimated = bodies[:, ::l]
    spectra = np.fft.fft(decimated, axis=1) * (l / n_c)
    # DFT bin m mod N' carries subcarrier row m: undo the one-bin offset
    z = np.roll(spectra, -1, axis=1).T
    return FoldedFrame(entries=z, l=l, mode=_default_mode(l, mode))


def unfold(z: FoldedFrame, tx: np.ndarray, mode: str | None = None) -> UnfoldedFrame:
    """Divide the folded frame by each transmit sub-band block and re-stack.

    Block i of the output is z / tx_block_i, stacked in transmit order, so
    the output has the full N_c rows again. Identical arithmetic for SNS
    and PC-SNS; the transmit frame's structure decides what the cross terms
    become. Blocks are independent, so this is trivially parallel.
    """
    mode = mode or z.mode
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    n_c = tx.shape[0]
    if n_c != z.l * z.entries.shape[0] or tx.shape[1] != z.entries.shape[1]:
        raise ValueError(f"tx shape {tx.shape} does not match folded frame {z.entries.shape} x L={z.l}")
    if mode == FULL and z.l != 1:
        raise ValueError("FULL mode means no folding (L = 1)")
    low = np.min(np.abs(tx))
    if low < MIN_DIVISOR:
        raise ValueError(f"transmit frame has |entry| = {low:.3g} < {MIN_DIVISOR}; unfolding would blow up")
    blocks = tx.reshape(z.l, z.entries.shape[0], z.entries.shape[1])
    d = (z.entries[None, :, :] / blocks).reshape(n_c, z.entries.shape[1])
    return UnfoldedFrame(entries=d, mode=mode)
