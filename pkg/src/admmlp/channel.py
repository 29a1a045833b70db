"""BPSK over AWGN: seeded per-frame noise streams, LLRs, and output saturation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

Saturation = Literal["output", "sigma"]


@dataclass(frozen=True)
class ChannelConfig:
    """AWGN channel at ``ebn0_db`` for a code of rate ``rate``.

    ``saturation`` selects how ``saturate`` clamps the channel output:
    ``"output"`` clamps ``y`` to the signal amplitude plus one noise
    standard deviation, ``±(1 + sigma)``; ``"sigma"`` clamps ``y`` to ``±sigma``.
    """

    ebn0_db: float
    rate: float
    saturate: bool = True
    saturation: Saturation = "output"

    def __post_init__(self):
        if not 0.0 < self.rate < 1.0:
            raise ValueError("code rate must lie in (0, 1)")
        if self.saturation not in ("output", "sigma"):
            raise ValueError(f"unknown saturation mode {self.saturation!r}")

    @property
    def sigma(self) -> float:
        if math.isinf(self.ebn0_db) and self.ebn0_db > 0:
            return 0.0
        return math.sqrt(1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0)))

    @property
    def clamp_level(self) -> float:
        return 1.0 + self.sigma if self.saturation == "output" else self.sigma

    @property
    def fixed_scale(self) -> float:
        """Factor taking saturated LLRs ``2y/sigma^2`` into ``[-1, 1]``."""
        return self.sigma ** 2 / (2.0 * self.clamp_level)


def frame_rng(seed: int, frame_index: int) -> np.random.Generator:
    """Independent counter-based stream for one frame.

    Frame ``k`` always sees the same numbers for a given seed, however the
    frames are split across workers.
    """
    if seed < 0 or frame_index < 0:
        raise ValueError("seed and frame index must be non-negative")
    key = ((int(seed) & (2**64 - 1)) << 64) | int(frame_index)
    return np.random.Generator(np.random.Philox(key=key))


def bpsk(codeword) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(codeword, dtype=np.float64)


def transmit(codeword, cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    s = bpsk(codeword)
    noise = rng.standard_normal(s.shape[0])
    return s + cfg.sigma * noise


def llr(y, cfg: ChannelConfig, fixed_scale: bool = False) -> np.ndarray:
    """Channel LLRs ``2y/sigma^2``, optionally saturated and scaled to ``[-1, 1]``."""
    sigma = cfg.sigma
    if not sigma > 0:
        raise ValueError("LLRs need a positive noise standard deviation")
    y = np.asarray(y, dtype=np.float64)
    if cfg.saturate:
        c = cfg.clamp_level
        y = np.clip(y, -c, c)
    gamma = 2.0 * y / sigma ** 2
    if fixed_scale:
        gamma = gamma * cfg.fixed_scale
    return gamma
