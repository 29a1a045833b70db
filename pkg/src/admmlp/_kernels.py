"""Compiled per-frame decoding kernels.

Edges are laid out check-major: check ``j`` owns edges
``cptr[j]:cptr[j+1]`` and edge ``e`` touches variable ``cvar[e]``. The
variable side reaches its edges through ``vptr``/``vedge``.

The bit-accurate integer kernel lives in :mod:`admmlp._fixed_core`.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# --- double precision -------------------------------------------------------

@njit(cache=True)
def project_pp_float(v, z, t, srt):
    """Project ``v`` onto the parity polytope into ``z``; returns True if the facet path ran."""
    d = v.shape[0]
    weight = 0
    best = 0
    best_dist = 2.0
    for k in range(d):
        c = min(1.0, max(0.0, v[k]))
        z[k] = c
        t[k] = 1.0 if c > 0.5 else 0.0
        if t[k] > 0.0:
            weight += 1
        dist = abs(c - 0.5)
        if dist < best_dist:
            best_dist = dist
            best = k
    if weight % 2 == 0:
        if t[best] > 0.0:
            t[best] = 0.0
            weight -= 1
        else:
            t[best] = 1.0
            weight += 1
    lhs = 0.0
    for k in range(d):
        lhs += z[k] if t[k] > 0.0 else -z[k]
    if not lhs > weight - 1:
        return False
    # mirror, then simplex projection of the mirrored point
    for k in range(d):
        srt[k] = 1.0 - v[k] if t[k] > 0.0 else v[k]
    s = np.sort(srt[:d])
    css = -1.0
    theta = 0.0
    for j in range(d):
        u = s[d - 1 - j]
        css += u
        if u - css / (j + 1) > 0:
            theta = css / (j + 1)
    for k in range(d):
        w = (1.0 - v[k] if t[k] > 0.0 else v[k]) - theta
        if w < 0.0:
            w = 0.0
        z[k] = 1.0 - w if t[k] > 0.0 else w
    return True


@njit(cache=True)
def _hard_ok_float(x, cptr, cvar, tol):
    for i in range(x.shape[0]):
        if x[i] > tol and x[i] < 1.0 - tol:
            return False
    for j in range(cptr.shape[0] - 1):
        par = 0
        for e in range(cptr[j], cptr[j + 1]):
            if x[cvar[e]] > 0.5:
                par ^= 1
        if par:
            return False
    return True


@njit(cache=True)
def admm_float(cptr, cvar, vptr, vedge, gamma, max_iter, tol, early, x, lam, msg):
    """Flooding ADMM-LP decoding of one frame. Returns (iterations, terminated_early)."""
    n = x.shape[0]
    m = cptr.shape[0] - 1
    dmax = 0
    for j in range(m):
        dmax = max(dmax, cptr[j + 1] - cptr[j])
    v = np.empty(dmax)
    z = np.empty(dmax)
    t = np.empty(dmax)
    srt = np.empty(dmax)
    for e in range(lam.shape[0]):
        lam[e] = 0.0
        msg[e] = 0.5
    for it in range(max_iter):
        for i in range(n):
            acc = 0.0
            for k in range(vptr[i], vptr[i + 1]):
                acc += msg[vedge[k]]
            xi = (acc - gamma[i]) / (vptr[i + 1] - vptr[i])
            x[i] = min(1.0, max(0.0, xi))
        if early and _hard_ok_float(x, cptr, cvar, tol):
            return it + 1, True
        for j in range(m):
            lo = cptr[j]
            d = cptr[j + 1] - lo
            for k in range(d):
                v[k] = x[cvar[lo + k]] + lam[lo + k]
            project_pp_float(v[:d], z[:d], t[:d], srt[:d])
            for k in range(d):
                lam[lo + k] = v[k] - z[k]
                msg[lo + k] = z[k] - lam[lo + k]
    return max_iter, False


# --- sum-product belief propagation ------------------------------------------

@njit(cache=True)
def boxplus(a, b):
    """Exact ``2 atanh(tanh(a/2) tanh(b/2))`` without overflow for any magnitude."""
    s = 1.0 if (a >= 0) == (b >= 0) else -1.0
    mag = min(abs(a), abs(b))
    return s * mag + np.log1p(np.exp(-abs(a + b))) - np.log1p(np.exp(-abs(a - b)))


@njit(cache=True)
def bp_float(cptr, cvar, vptr, vedge, gamma, max_iter, clamp, hard, post, c2v):
    """Flooding sum-product; ``clamp <= 0`` disables any magnitude limit."""
    n = gamma.shape[0]
    m = cptr.shape[0] - 1
    E = cvar.shape[0]
    v2c = np.empty(E)
    dmax = 0
    for j in range(m):
        dmax = max(dmax, cptr[j + 1] - cptr[j])
    fwd = np.empty(dmax + 1)
    bwd = np.empty(dmax + 1)
    for e in range(E):
        v2c[e] = gamma[cvar[e]]
        c2v[e] = 0.0
    for it in range(max_iter):
        for j in range(m):
            lo = cptr[j]
            d = cptr[j + 1] - lo
            # forward/backward partial box-plus sums for extrinsic outputs
            for k in range(d):
                a = v2c[lo + k]
                fwd[k + 1] = a if k == 0 else boxplus(fwd[k], a)
            for k in range(d - 1, -1, -1):
                a = v2c[lo + k]
                bwd[k] = a if k == d - 1 else boxplus(bwd[k + 1], a)
            for k in range(d):
                if d == 1:
                    out = np.inf
                elif k == 0:
                    out = bwd[1]
                elif k == d - 1:
                    out = fwd[d - 1]
                else:
                    out = boxplus(fwd[k], bwd[k + 1])
                if clamp > 0:
                    out = min(clamp, max(-clamp, out))
                c2v[lo + k] = out
        for i in range(n):
            tot = gamma[i]
            for k in range(vptr[i], vptr[i + 1]):
                tot += c2v[vedge[k]]
            post[i] = tot
            hard[i] = 1 if tot < 0 else 0
            for k in range(vptr[i], vptr[i + 1]):
                e = vedge[k]
                out = tot - c2v[e]
                if clamp > 0:
                    out = min(clamp, max(-clamp, out))
                v2c[e] = out
        ok = True
        for j in range(m):
            par = 0
            for e in range(cptr[j], cptr[j + 1]):
                par ^= hard[cvar[e]]
            if par:
                ok = False
                break
        if ok:
            return it + 1, True
    return max_iter, False
