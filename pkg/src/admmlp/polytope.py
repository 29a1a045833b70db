"""Euclidean projection onto the parity polytope.

The parity polytope of dimension ``d`` is the convex hull of the even-weight
vertices of ``[0, 1]^d``. Projection works in three steps: find the single
odd-set facet that the cube-clipped point may violate (cut search), mirror
the coordinates in that facet's odd set so the facet becomes ``sum(w) = 1``,
project onto the probability simplex, then mirror back.

All functions accept a single vector of shape ``(d,)`` or a batch of shape
``(k, d)``; batches are processed row-wise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def _as_batch(v) -> tuple[np.ndarray, bool]:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim not in (1, 2):
        raise ValueError("expected a vector or a 2-D batch of vectors")
    if not np.all(np.isfinite(v)):
        raise ValueError("input contains non-finite entries")
    return np.atleast_2d(v), v.ndim == 1


def _check_dim(d: int) -> None:
    if d < 2:
        raise ValueError(f"parity polytope projection needs d >= 2, got d={d}")


def clip_cube(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError("input contains non-finite entries")
    return np.clip(v, 0.0, 1.0)


def cut_search(v) -> tuple[np.ndarray, np.ndarray | bool]:
    """Odd-set facet indicator for ``v`` and whether clip(v) violates it.

    Clipped coordinates are rounded (0.5 rounds down). If the rounded vertex
    has even weight, the coordinate closest to 0.5 is flipped, lowest index
    first on ties.
    """
    V, single = _as_batch(v)
    _check_dim(V.shape[1])
    c = np.clip(V, 0.0, 1.0)
    f = c > 0.5
    even = (f.sum(axis=1) % 2) == 0
    if np.any(even):
        rows = np.flatnonzero(even)
        k = np.argmin(np.abs(c[rows] - 0.5), axis=1)
        f[rows, k] = ~f[rows, k]
    size = f.sum(axis=1)
    lhs = np.where(f, c, -c).sum(axis=1)
    violated = lhs > size - 1
    if single:
        return f[0].astype(np.uint8), bool(violated[0])
    return f.astype(np.uint8), violated


def project_simplex(u) -> np.ndarray:
    """Projection onto ``{w >= 0, sum(w) = 1}`` by the sort-and-threshold rule."""
    U, single = _as_batch(u)
    d = U.shape[1]
    s = -np.sort(-U, axis=1)
    css = np.cumsum(s, axis=1) - 1.0
    j = np.arange(1, d + 1)
    cond = s - css / j > 0
    # cond holds for j=1 always; rho is its last true position
    rho = d - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(U.shape[0]), rho - 1] / rho
    W = np.maximum(U - theta[:, None], 0.0)
    return W[0] if single else W


@dataclass(frozen=True)
class ProjectionResult:
    z: np.ndarray
    used_simplex: np.ndarray | bool
    facet: np.ndarray


def project_pp(v) -> ProjectionResult:
    V, single = _as_batch(v)
    _check_dim(V.shape[1])
    f, violated = cut_search(V)
    Z = np.clip(V, 0.0, 1.0)
    if np.any(violated):
        rows = np.flatnonzero(violated)
        S = f[rows].astype(bool)
        t = np.where(S, 1.0 - V[rows], V[rows])
        w = project_simplex(t)
        Z[rows] = np.where(S, 1.0 - w, w)
    if single:
        return ProjectionResult(Z[0], bool(violated[0]), f[0])
    return ProjectionResult(Z, violated, f)


# --- independent checks -----------------------------------------------------

@lru_cache(maxsize=None)
def odd_facets(d: int) -> tuple[np.ndarray, np.ndarray]:
    """All facet inequalities ``A z <= b`` for odd subsets S of ``{0..d-1}``.

    Row for S has +1 on S and -1 elsewhere; ``b = |S| - 1``.
    """
    rows = []
    for bits in itertools.product((0, 1), repeat=d):
        if sum(bits) % 2 == 1:
            rows.append(bits)
    S = np.array(rows, dtype=np.float64)
    A = 2.0 * S - 1.0
    b = S.sum(axis=1) - 1.0
    A.setflags(write=False)
    b.setflags(write=False)
    return A, b


@lru_cache(maxsize=None)
def even_vertices(d: int) -> np.ndarray:
    verts = np.array([bits for bits in itertools.product((0, 1), repeat=d) if sum(bits) % 2 == 0],
                     dtype=np.float64)
    verts.setflags(write=False)
    return verts


def pp_violation(z) -> np.ndarray:
    """Largest violation of any facet or box inequality (<= 0 means inside)."""
    Z, single = _as_batch(z)
    A, b = odd_facets(Z.shape[1])
    facet = (Z @ A.T - b).max(axis=1)
    box = np.maximum(-Z, Z - 1.0).max(axis=1)
    out = np.maximum(facet, box)
    return out[0] if single else out


class OracleNotConverged(RuntimeError):
    pass


def oracle_project_pp(v, iterations: int = 20000, tol: float = 1e-13) -> np.ndarray:
    """Projection onto the parity polytope by Dykstra's algorithm.

    Cycles over every odd-set facet halfspace plus the unit box (projected
    onto exactly by clipping). Stops once a full cycle moves no coordinate
    by more than ``tol``; raises :class:`OracleNotConverged` if that does not
    happen within ``iterations`` cycles. Only practical for ``d <= 12``.
    """
    V, single = _as_batch(v)
    d = V.shape[1]
    _check_dim(d)
    if d > 12:
        raise ValueError("oracle enumerates 2^(d-1) facets; d must be <= 12")
    A, b = odd_facets(d)
    nrm2 = float(d)  # every facet normal is +-1 in each coordinate
    x = V.copy()
    k = len(b)
    inc_facets = np.zeros((k,) + x.shape)
    inc_box = np.zeros_like(x)
    active = np.arange(x.shape[0])
    for _ in range(iterations):
        xa = x[active]
        prev = xa.copy()
        for s in range(k):
            y = xa + inc_facets[s, active]
            excess = y @ A[s] - b[s]
            step = np.where(excess > 0, excess / nrm2, 0.0)
            new = y - step[:, None] * A[s]
            inc_facets[s, active] = y - new
            xa = new
        y = xa + inc_box[active]
        new = np.clip(y, 0.0, 1.0)
        inc_box[active] = y - new
        xa = new
        x[active] = xa
        moved = np.abs(xa - prev).max(axis=1)
        active = active[moved > tol]
        if active.size == 0:
            break
    else:
        raise OracleNotConverged(
            f"{active.size} point(s) still moving after {iterations} Dykstra cycles")
    return x[0] if single else x


def simplex_bisection(u, tol: float = 1e-14) -> np.ndarray:
    """Simplex projection by bisecting on the threshold ``theta`` directly."""
    u = np.asarray(u, dtype=np.float64)
    lo, hi = u.min() - 1.0, u.max()
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if np.maximum(u - mid, 0.0).sum() > 1.0:
            lo = mid
        else:
            hi = mid
        if mid == lo == hi:
            break
    return np.maximum(u - 0.5 * (lo + hi), 0.0)

