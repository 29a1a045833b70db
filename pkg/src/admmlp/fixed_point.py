"""Bit-accurate fixed-point model of the ADMM-LP decoder.

Values are two's-complement codes with one sign bit, ``integer_bits`` and
``fraction_bits``; overflow saturates. Quantization happens where the
hardware writes to memory: variable estimates after the reciprocal-multiply
normalization, check-to-variable messages, and check state. Projection
arithmetic in between is exact (rational) and rounded once at its outputs.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from . import _fixed_core
from .admm import DecoderConfig, Decoding, _check_inputs, graph_of, make_decoding
from .code_model import ParityCheckMatrix

Rounding = Literal["truncate", "round_half_even"]
_MODES = {"truncate": _fixed_core.ROUND_FLOOR, "round_half_even": _fixed_core.ROUND_HALF_EVEN}


@dataclass(frozen=True)
class FixedPointFormat:
    integer_bits: int
    fraction_bits: int
    rounding: Rounding = "truncate"
    overflow: Literal["saturate"] = "saturate"

    def __post_init__(self):
        if self.integer_bits < 0 or self.fraction_bits < 0:
            raise ValueError("bit counts must be non-negative")
        if self.rounding not in _MODES:
            raise ValueError(f"unknown rounding mode {self.rounding!r}")
        if self.overflow != "saturate":
            raise ValueError("only saturating overflow is modelled")

    sign_bits = 1

    @property
    def width(self) -> int:
        return 1 + self.integer_bits + self.fraction_bits

    @property
    def min_code(self) -> int:
        return -(1 << (self.integer_bits + self.fraction_bits))

    @property
    def max_code(self) -> int:
        return (1 << (self.integer_bits + self.fraction_bits)) - 1

    @property
    def lsb(self) -> float:
        return 2.0 ** -self.fraction_bits

    @property
    def range(self) -> tuple[float, float]:
        return self.min_code * self.lsb, self.max_code * self.lsb

    def __str__(self):
        return f"1/{self.integer_bits}/{self.fraction_bits}"


@dataclass(frozen=True)
class FixedValue:
    """Integer code(s) together with their format."""

    code: int | np.ndarray
    fmt: FixedPointFormat

    @property
    def value(self):
        return np.ldexp(np.asarray(self.code, dtype=np.float64), -self.fmt.fraction_bits) \
            if isinstance(self.code, np.ndarray) else self.code * self.fmt.lsb


def quantize(value, fmt: FixedPointFormat) -> FixedValue:
    """Quantize a real scalar or array to ``fmt``.

    Scaling by a power of two and flooring are exact in float64, so the
    code is exact whenever ``fmt.width <= 53``.
    """
    v = np.asarray(value, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot quantize non-finite values")
    scaled = np.ldexp(v, fmt.fraction_bits)
    code = np.floor(scaled) if fmt.rounding == "truncate" else np.rint(scaled)
    code = np.clip(code, fmt.min_code, fmt.max_code).astype(np.int64)
    if code.ndim == 0:
        return FixedValue(int(code), fmt)
    return FixedValue(code, fmt)


@dataclass(frozen=True)
class FormatPlan:
    llr_fmt: FixedPointFormat
    estimate_fmt: FixedPointFormat
    cn_to_vn_fmt: FixedPointFormat
    check_state_fmt: FixedPointFormat
    centered: bool = False
    w_llr: int | None = field(default=None, compare=False)
    w_msg: int | None = field(default=None, compare=False)

    @property
    def rounding(self) -> Rounding:
        return self.estimate_fmt.rounding

    def to_dict(self) -> dict:
        if self.w_llr is None:
            return {k: (asdict(v) if isinstance(v, FixedPointFormat) else v)
                    for k, v in asdict(self).items() if k not in ("w_llr", "w_msg")}
        return {"w_llr": self.w_llr, "w_msg": self.w_msg, "rounding": self.rounding,
                "centered": self.centered}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "FormatPlan":
        if "w_llr" in doc:
            return make_format_plan(int(doc["w_llr"]), int(doc["w_msg"]),
                                    doc.get("rounding", "truncate"), bool(doc.get("centered", False)))
        fmts = {k: FixedPointFormat(**doc[k])
                for k in ("llr_fmt", "estimate_fmt", "cn_to_vn_fmt", "check_state_fmt")}
        return cls(**fmts, centered=bool(doc.get("centered", False)))


def make_format_plan(w_llr: int, w_msg: int, rounding: Rounding = "truncate",
                     centered: bool = False) -> FormatPlan:
    """Bit allocation for ``w_llr``-bit LLRs and ``w_msg``-bit messages.

    LLRs get no integer bits. Estimates and variable-to-check messages lie
    in the unit cube: one integer bit, the rest fraction. Check-to-variable
    messages and check state keep the LLR fraction bits and spend the rest
    on integer range.
    """
    if w_llr < 2:
        raise ValueError("w_llr must be at least 2 (sign plus one fraction bit)")
    if w_msg < w_llr + 1:
        raise ValueError(f"w_msg must exceed w_llr (got w_llr={w_llr}, w_msg={w_msg})")
    f_llr = w_llr - 1
    llr = FixedPointFormat(0, f_llr, rounding)
    est = FixedPointFormat(1, w_msg - 2, rounding)
    cn = FixedPointFormat(w_msg - 1 - f_llr, f_llr, rounding)
    return FormatPlan(llr, est, cn, cn, centered, w_llr, w_msg)


def wide_plan(integer_bits: int = 8, fraction_bits: int = 40,
              rounding: Rounding = "round_half_even") -> FormatPlan:
    """Uniform very wide plan; approximates double precision."""
    fmt = FixedPointFormat(integer_bits, fraction_bits, rounding)
    return FormatPlan(fmt, fmt, fmt, fmt)


def llr_top_code_scale(plan: FormatPlan) -> float:
    """Factor mapping a unit-magnitude LLR onto the top LLR code, symmetrically."""
    f = plan.llr_fmt
    return f.max_code * f.lsb / 2.0 ** f.integer_bits


def quantize_llr(gamma_unit, plan: FormatPlan) -> FixedValue:
    """Quantize LLRs already scaled to ``|gamma| <= 2**integer_bits`` into the LLR format."""
    return quantize(np.asarray(gamma_unit, dtype=np.float64) * llr_top_code_scale(plan), plan.llr_fmt)


def _bits(x: int) -> int:
    return int(x).bit_length()


def _needs_bigint(plan: FormatPlan, max_var_deg: int, max_chk_deg: int) -> bool:
    est, cn, st = plan.estimate_fmt, plan.cn_to_vn_fmt, plan.check_state_fmt
    acc = _bits(cn.max_code) + _bits(max_var_deg + 1) + 1
    prod = acc + est.fraction_bits + 2
    v = max(_bits(est.max_code), _bits(st.max_code) + est.fraction_bits - st.fraction_bits) + 1
    proj = v + _bits(max_chk_deg) + 3
    return max(prod, proj) > 62


@lru_cache(maxsize=1)
def _pure_core():
    return _fixed_core.load_pure_python()


def decode_fixed(H: ParityCheckMatrix, gamma_q, cfg: DecoderConfig = DecoderConfig(),
                 plan: FormatPlan | None = None) -> Decoding:
    """Decode quantized LLRs with the bit-accurate fixed-point ADMM-LP model.

    ``gamma_q`` is a :class:`FixedValue` in ``plan.llr_fmt`` (or its raw
    integer codes). ``cfg.llr_scale`` is ignored: scaling is fixed by the
    LLR format.
    """
    if plan is None:
        plan = make_format_plan(8, 11)
    if isinstance(gamma_q, FixedValue):
        if gamma_q.fmt != plan.llr_fmt:
            raise ValueError(f"LLR format {gamma_q.fmt} does not match plan format {plan.llr_fmt}")
        codes = np.asarray(gamma_q.code)
    else:
        codes = np.asarray(gamma_q)
        if codes.dtype.kind not in "iu":
            raise ValueError("gamma_q must be integer LLR codes or a FixedValue")
    _check_inputs(H, codes.astype(np.float64))
    llr, est, cn, st = plan.llr_fmt, plan.estimate_fmt, plan.cn_to_vn_fmt, plan.check_state_fmt
    if cn.fraction_bits != llr.fraction_bits:
        raise ValueError("format mismatch: check-to-variable messages must share the LLR fraction bits")
    if not (1 <= cn.fraction_bits <= est.fraction_bits and st.fraction_bits <= est.fraction_bits):
        raise ValueError("format mismatch: estimate format must carry the most fraction bits")
    if np.any(codes < llr.min_code) or np.any(codes > llr.max_code):
        raise ValueError("LLR codes outside the LLR format range")
    mode = _MODES[plan.rounding]
    g = graph_of(H)
    deg = H.variable_degrees
    recip_by_deg = {d: quantize(1.0 / d, est).code for d in np.unique(deg).tolist()}
    fmt = [est.fraction_bits, est.min_code, est.max_code,
           cn.fraction_bits, cn.min_code, cn.max_code,
           st.fraction_bits, st.min_code, st.max_code]
    tol_code = int(np.floor(cfg.integrality_tolerance * 2.0 ** est.fraction_bits))
    dmax = int(H.check_degrees.max())
    E = g.num_edges
    if _needs_bigint(plan, int(deg.max()), dmax):
        kernel, dt, fmt_arg = _pure_core().admm_fixed, object, [int(f) for f in fmt]
    else:
        kernel, dt, fmt_arg = _fixed_core.admm_fixed, np.int64, np.array(fmt, dtype=np.int64)
    G = np.array([int(c) for c in codes], dtype=dt)
    recip = np.array([recip_by_deg[d] for d in deg.tolist()], dtype=dt)
    X = np.zeros(H.n, dtype=dt)
    L = np.zeros(E, dtype=dt)
    M = np.zeros(E, dtype=dt)
    V = np.zeros(dmax, dtype=dt)
    Zn = np.zeros(dmax, dtype=dt)
    T = np.zeros(dmax, dtype=dt)
    flag = np.zeros(dmax, dtype=dt)
    iters, early = kernel(g.cptr, g.cvar, g.vptr, g.vedge, G, recip, fmt_arg,
                          cfg.max_iterations, tol_code, cfg.early_termination, mode,
                          plan.centered, X, L, M, V, Zn, T, flag)
    x = np.array([float(c) for c in X]) * est.lsb
    return make_decoding(H, x, iters, early, cfg.integrality_tolerance)
