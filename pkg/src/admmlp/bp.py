"""Flooding sum-product belief propagation baseline.

Check messages use the exact pairwise box-plus in a log-domain form that
stays finite for any input magnitude, so no clamp is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .admm import Decoding, graph_of
from .code_model import ParityCheckMatrix


@dataclass(frozen=True)
class BpConfig:
    max_iterations: int = 500
    llr_clamp: float | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.llr_clamp is not None and not self.llr_clamp > 0:
            raise ValueError("llr_clamp must be positive when given")


def boxplus(a: float, b: float) -> float:
    return float(_kernels.boxplus(float(a), float(b)))


def bp_decode(H: ParityCheckMatrix, gamma, cfg: BpConfig = BpConfig()) -> Decoding:
    """Sum-product decoding; stops as soon as the hard decision satisfies every check.

    The returned ``x`` is the hard decision as floats. ``ml_certificate`` is
    always False since BP offers none.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    if gamma.shape != (H.n,):
        raise ValueError(f"expected {H.n} LLRs, got shape {gamma.shape}")
    if not np.all(np.isfinite(gamma)):
        raise ValueError("LLR vector contains non-finite values")
    g = graph_of(H)
    hard = np.zeros(H.n, dtype=np.uint8)
    post = np.empty(H.n)
    c2v = np.empty(g.num_edges)
    clamp = -1.0 if cfg.llr_clamp is None else float(cfg.llr_clamp)
    iters, ok = _kernels.bp_float(g.cptr, g.cvar, g.vptr, g.vedge, gamma, cfg.max_iterations,
                                  clamp, hard, post, c2v)
    return Decoding(hard.astype(np.float64), hard, int(iters), bool(ok), True, False)
