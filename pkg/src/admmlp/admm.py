"""Double-precision ADMM-LP decoding.

The decoder alternates a variable sweep (average incoming check messages
with the channel LLR, clip to [0, 1]) and a check sweep (project onto the
parity polytope, update the per-check dual vector, emit messages). The
ADMM penalty is fixed at 1; rescale the LLRs through ``llr_scale`` instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .code_model import ParityCheckMatrix, syndrome_ok
from .polytope import project_pp


@dataclass(frozen=True)
class DecoderConfig:
    max_iterations: int = 500
    early_termination: bool = True
    integrality_tolerance: float = 1e-6
    llr_scale: float = 1.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.integrality_tolerance < 0.5:
            raise ValueError("integrality_tolerance must lie in (0, 0.5)")
        if not self.llr_scale > 0:
            raise ValueError("llr_scale must be positive")


@dataclass(frozen=True, eq=False)
class Decoding:
    x: np.ndarray
    hard: np.ndarray
    iterations_used: int
    converged: bool
    integral: bool
    ml_certificate: bool

    def __eq__(self, other):
        if not isinstance(other, Decoding):
            return NotImplemented
        return (np.array_equal(self.x, other.x) and np.array_equal(self.hard, other.hard)
                and (self.iterations_used, self.converged, self.integral, self.ml_certificate)
                == (other.iterations_used, other.converged, other.integral, other.ml_certificate))


def make_decoding(H: ParityCheckMatrix, x: np.ndarray, iterations: int, converged: bool,
                  tol: float) -> Decoding:
    hard = (x > 0.5).astype(np.uint8)
    integral = bool(np.all(np.minimum(x, 1.0 - x) <= tol))
    valid = syndrome_ok(H, hard)
    ml = integral and valid
    return Decoding(x, hard, int(iterations), bool(converged) or ml, integral, ml)


@dataclass(frozen=True)
class Graph:
    """Edge layout shared by all kernels (check-major edge numbering)."""

    cptr: np.ndarray
    cvar: np.ndarray
    vptr: np.ndarray
    vedge: np.ndarray

    @property
    def num_edges(self) -> int:
        return self.cvar.shape[0]


@lru_cache(maxsize=32)
def graph_of(H: ParityCheckMatrix) -> Graph:
    cptr, cvar, _ = H.edge_arrays
    order = np.argsort(cvar, kind="stable")
    vptr = np.zeros(H.n + 1, dtype=np.int64)
    vptr[1:] = np.cumsum(np.bincount(cvar, minlength=H.n))
    return Graph(cptr, cvar, vptr, order.astype(np.int64))


def _check_inputs(H: ParityCheckMatrix, gamma) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=np.float64)
    if gamma.shape != (H.n,):
        raise ValueError(f"expected {H.n} LLRs, got shape {gamma.shape}")
    if not np.all(np.isfinite(gamma)):
        raise ValueError("LLR vector contains non-finite values")
    if int(H.check_degrees.min()) < 2:
        raise ValueError("degree-1 checks are not supported by ADMM-LP decoding")
    return gamma


def variable_update(incoming, gamma_i: float) -> float:
    incoming = np.asarray(incoming, dtype=np.float64)
    if incoming.size == 0:
        raise ValueError("variable has no neighbouring checks")
    return float(np.clip((incoming.sum() - gamma_i) / incoming.size, 0.0, 1.0))


def check_update(x_neigh, lambda_j):
    """Return ``(z, lambda_new, m_out)`` for one check."""
    x_neigh = np.asarray(x_neigh, dtype=np.float64)
    lambda_j = np.asarray(lambda_j, dtype=np.float64)
    if x_neigh.shape != lambda_j.shape or x_neigh.ndim != 1:
        raise ValueError("x_neigh and lambda_j must be vectors of equal length")
    v = x_neigh + lambda_j
    z = project_pp(v).z
    lam = v - z
    return z, lam, z - lam


class AdmmState:
    """Step-by-step ADMM-LP decoder built on :func:`variable_update`/:func:`check_update`.

    Slow; meant for inspection and for checking the compiled kernel.
    """

    def __init__(self, H: ParityCheckMatrix, gamma):
        self.H = H
        self.gamma = _check_inputs(H, gamma)
        self.graph = graph_of(H)
        E = self.graph.num_edges
        self.x = np.zeros(H.n)
        self.lam = np.zeros(E)
        self.msg = np.full(E, 0.5)
        self.z = np.zeros(E)
        self.iteration = 0

    def variable_sweep(self):
        g = self.graph
        for i in range(self.H.n):
            edges = g.vedge[g.vptr[i]:g.vptr[i + 1]]
            self.x[i] = variable_update(self.msg[edges], self.gamma[i])

    def check_sweep(self):
        g = self.graph
        for j in range(self.H.m):
            sl = slice(g.cptr[j], g.cptr[j + 1])
            z, lam, m_out = check_update(self.x[g.cvar[sl]], self.lam[sl])
            self.z[sl], self.lam[sl], self.msg[sl] = z, lam, m_out

    def step(self):
        self.variable_sweep()
        self.check_sweep()
        self.iteration += 1


def decode(H: ParityCheckMatrix, gamma, cfg: DecoderConfig = DecoderConfig()) -> Decoding:
    gamma = _check_inputs(H, gamma) * cfg.llr_scale
    g = graph_of(H)
    x = np.empty(H.n)
    lam = np.empty(g.num_edges)
    msg = np.empty(g.num_edges)
    iters, early = _kernels.admm_float(g.cptr, g.cvar, g.vptr, g.vedge, gamma, cfg.max_iterations,
                                       cfg.integrality_tolerance, cfg.early_termination, x, lam, msg)
    return make_decoding(H, x, iters, early, cfg.integrality_tolerance)
