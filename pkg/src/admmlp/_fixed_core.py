"""Integer kernel of the bit-accurate fixed-point ADMM-LP decoder.

Written against plain integer arithmetic only. The module is imported once
normally (compiled, int64) and once more as a pure-Python copy via
:func:`load_pure_python`, which runs the identical source on object arrays
of Python ints when configured widths would overflow 64 bits.
"""

from __future__ import annotations

import importlib.util

import numpy as np
from numba import njit

ROUND_FLOOR = 0
ROUND_HALF_EVEN = 1

_PURE = globals().get("_PURE_PYTHON", False)


def _jit(fn):
    return fn if _PURE else njit(cache=True)(fn)


def load_pure_python():
    """Fresh uncompiled copy of this module."""
    spec = importlib.util.spec_from_file_location(__name__ + "_py", __file__)
    mod = importlib.util.module_from_spec(spec)
    mod._PURE_PYTHON = True
    spec.loader.exec_module(mod)
    return mod


@_jit
def round_div(num, den, mode):
    """``num / den`` rounded to an integer (floor or round-half-even); ``den > 0``."""
    q = num // den
    if mode == ROUND_HALF_EVEN:
        r2 = 2 * (num - q * den)
        if r2 > den or (r2 == den and q % 2 != 0):
            q += 1
    return q


@_jit
def saturate(code, lo, hi):
    if code < lo:
        return lo
    if code > hi:
        return hi
    return code


@_jit
def project_pp_exact(V, one, Zn, t, flag):
    """Exact projection of the grid point ``V / one``.

    Writes numerators ``Zn`` such that ``z = Zn / (rho * one)`` and returns
    ``rho`` (1 when no facet is violated).
    """
    d = V.shape[0]
    weight = 0
    best = 0
    best_dist = 2 * one + 1
    for k in range(d):
        c = V[k]
        if c < 0:
            c = 0 * c
        if c > one:
            c = one
        Zn[k] = c
        flag[k] = 1 if 2 * c > one else 0
        weight += flag[k]
        dist = abs(2 * c - one)
        if dist < best_dist:
            best_dist = dist
            best = k
    if weight % 2 == 0:
        flag[best] = 1 - flag[best]
        weight += 1 if flag[best] else -1
    lhs = 0 * one
    for k in range(d):
        lhs += Zn[k] if flag[k] else -Zn[k]
    if not lhs > (weight - 1) * one:
        return 1
    for k in range(d):
        t[k] = one - V[k] if flag[k] else V[k]
    s = np.sort(t)
    css = -one
    rho = 1
    thr = 0 * one
    for j in range(d):
        u = s[d - 1 - j]
        css += u
        if u * (j + 1) - css > 0:
            rho = j + 1
            thr = css
    for k in range(d):
        w = rho * t[k] - thr
        if w < 0:
            w = 0 * w
        Zn[k] = rho * one - w if flag[k] else w
    return rho


@_jit
def admm_fixed(cptr, cvar, vptr, vedge, G, recip, fmt, max_iter, tol_code, early, mode, centered,
               X, L, M, V, Zn, T, flag):
    """Bit-accurate ADMM-LP decoding of one frame on integer codes.

    ``fmt`` holds ``(f_est, lo_est, hi_est, f_cn, lo_cn, hi_cn, f_st, lo_st, hi_st)``.
    ``G`` is the LLR at ``f_cn`` fraction bits, ``recip[i]`` the reciprocal of
    variable ``i``'s degree at ``f_est`` bits. ``X`` receives uncentred
    estimates at ``f_est`` bits. ``M`` stores check-to-variable messages at
    ``f_cn`` bits, offset by -1/2 when ``centered``. Returns (iterations, terminated_early).
    """
    f_est, lo_est, hi_est = fmt[0], fmt[1], fmt[2]
    f_cn, lo_cn, hi_cn = fmt[3], fmt[4], fmt[5]
    f_st, lo_st, hi_st = fmt[6], fmt[7], fmt[8]
    n = X.shape[0]
    m = cptr.shape[0] - 1
    one = X[0] * 0 + 1
    ONE = one << f_est
    HALF = one << (f_est - 1)
    half_cn = one << (f_cn - 1)
    st_shift = one << (f_est - f_st)
    cn_unit = one << f_cn
    for e in range(L.shape[0]):
        L[e] = 0 * one
        M[e] = 0 * one if centered else half_cn
    for it in range(max_iter):
        for i in range(n):
            acc = -G[i]
            for k in range(vptr[i], vptr[i + 1]):
                acc += M[vedge[k]]
            xq = saturate(round_div(acc * recip[i], cn_unit, mode), lo_est, hi_est)
            if centered:
                xq = min(HALF, max(-HALF, xq)) + HALF
            else:
                xq = min(ONE, max(0 * one, xq))
            X[i] = xq
        if early:
            ok = True
            for i in range(n):
                if X[i] > tol_code and X[i] < ONE - tol_code:
                    ok = False
                    break
            if ok:
                for j in range(m):
                    par = 0
                    for e in range(cptr[j], cptr[j + 1]):
                        if 2 * X[cvar[e]] > ONE:
                            par ^= 1
                    if par:
                        ok = False
                        break
            if ok:
                return it + 1, True
        for j in range(m):
            lo = cptr[j]
            d = cptr[j + 1] - lo
            for k in range(d):
                V[k] = X[cvar[lo + k]] + L[lo + k] * st_shift
            rho = project_pp_exact(V[:d], ONE, Zn[:d], T[:d], flag[:d])
            den_cn = rho * (one << (f_est - f_cn))
            den_st = rho * st_shift
            for k in range(d):
                rv = rho * V[k]
                mnum = 2 * Zn[k] - rv
                if centered:
                    mnum -= rho * HALF
                M[lo + k] = saturate(round_div(mnum, den_cn, mode), lo_cn, hi_cn)
                L[lo + k] = saturate(round_div(rv - Zn[k], den_st, mode), lo_st, hi_st)
    return max_iter, False
