"""Monte Carlo frame-error-rate simulation.

Every frame index ``k`` owns its own RNG stream (codeword and noise), so a
frame is simulated identically by every decoder in a sweep and by any
number of workers. Frames are grouped into fixed-size batches that workers
evaluate; results are folded in frame order and the count stops at the exact
frame where the ``min_frame_errors``-th error occurs.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .admm import DecoderConfig, decode
from .bp import BpConfig, bp_decode
from .channel import ChannelConfig, frame_rng, llr, transmit
from .code_model import (CodewordSampler, ParityCheckMatrix, high_weight_codeword, load_code,
                         syndrome_ok)
from .fixed_point import FormatPlan, decode_fixed, llr_top_code_scale, make_format_plan, quantize_llr

log = logging.getLogger(__name__)

SEED_ENV = "ADMMLP_SEED"
DEFAULT_FIXED_TOLERANCE = 1.0 / 64

DECODER_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["admm_double", "admm_fixed", "bp"]},
        "llr_scale": {"anyOf": [{"const": "unit"}, {"type": "number", "exclusiveMinimum": 0}]},
        "w_llr": {"type": "integer", "minimum": 2},
        "w_msg": {"type": "integer", "minimum": 3},
        "rounding": {"enum": ["truncate", "round_half_even"]},
        "centered": {"type": "boolean"},
        "integrality_tolerance": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.5},
        "llr_clamp": {"type": ["number", "null"], "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

SWEEP_SCHEMA = {
    "type": "object",
    "required": ["code", "decoders", "ebn0_db"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "code": {"type": "string", "minLength": 1},
        "codeword_source": {"enum": ["all_zeros", "fixed_file", "random_per_frame", "high_weight"]},
        "codeword_file": {"type": "string"},
        "decoders": {"type": "array", "items": DECODER_SCHEMA, "minItems": 1},
        "ebn0_db": {"type": "array", "items": {"type": "number"}},
        "min_frame_errors": {"type": "integer", "minimum": 1},
        "max_frames": {"type": "integer", "minimum": 1},
        "max_iterations": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "saturate": {"type": "boolean"},
        "saturation": {"enum": ["output", "sigma"]},
        "batch_size": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class DecoderSpec:
    type: str
    llr_scale: Any = "unit"
    w_llr: int = 8
    w_msg: int = 11
    rounding: str = "truncate"
    centered: bool = False
    integrality_tolerance: float | None = None
    llr_clamp: float | None = None

    @property
    def id(self) -> str:
        if self.type == "admm_fixed":
            extra = ",centered" if self.centered else ""
            return f"admm_fixed({self.w_llr},{self.w_msg},{self.rounding}{extra})"
        if self.type == "admm_double" and self.llr_scale != "unit":
            return f"admm_double(scale={self.llr_scale})"
        return self.type

    def plan(self) -> FormatPlan:
        return make_format_plan(self.w_llr, self.w_msg, self.rounding, self.centered)

    def to_dict(self) -> dict:
        d = {"type": self.type}
        if self.type == "admm_double":
            d["llr_scale"] = self.llr_scale
        elif self.type == "admm_fixed":
            d.update(self.plan().to_dict())
        elif self.llr_clamp is not None:
            d["llr_clamp"] = self.llr_clamp
        if self.type != "bp" and self.integrality_tolerance is not None:
            d["integrality_tolerance"] = self.integrality_tolerance
        return d


@dataclass(frozen=True)
class SweepSpec:
    code: str
    decoders: tuple[DecoderSpec, ...]
    ebn0_db: tuple[float, ...]
    codeword_source: str = "random_per_frame"
    codeword_file: str | None = None
    min_frame_errors: int = 100
    max_frames: int = 1_000_000
    max_iterations: int = 500
    seed: int = 0
    saturate: bool = True
    saturation: str = "output"
    batch_size: int = 64
    name: str = "sweep"

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepSpec":
        try:
            jsonschema.validate(doc, SWEEP_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = ".".join(str(p) for p in exc.absolute_path) or "<root>"
            raise SpecError(f"invalid sweep spec at '{where}': {exc.message}") from None
        doc = dict(doc)
        if "seed" not in doc:
            doc["seed"] = int(os.environ.get(SEED_ENV, "0"))
        if doc.get("codeword_source") == "fixed_file" and "codeword_file" not in doc:
            raise SpecError("invalid sweep spec at 'codeword_file': required for codeword_source 'fixed_file'")
        doc["decoders"] = tuple(DecoderSpec(**d) for d in doc["decoders"])
        doc["ebn0_db"] = tuple(float(e) for e in doc["ebn0_db"])
        for d in doc["decoders"]:
            if d.type == "admm_fixed":
                try:
                    d.plan()
                except ValueError as exc:
                    raise SpecError(f"invalid sweep spec at 'decoders': {exc}") from None
        return cls(**doc)

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"sweep spec is not valid JSON: {exc}") from None
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["decoders"] = [dec.to_dict() for dec in self.decoders]
        d["ebn0_db"] = list(self.ebn0_db)
        if d["codeword_file"] is None:
            del d["codeword_file"]
        return d


@dataclass
class FerPoint:
    ebn0_db: float
    decoder_id: str
    seed: int
    frames: int = 0
    frame_errors: int = 0
    bit_errors: int = 0
    iterations_total: int = 0
    max_iterations_used: int = 0
    nonconverged: int = 0
    censored: bool = False
    frames_discarded: int = field(default=0, compare=False)
    error_frames: list[int] = field(default_factory=list, repr=False)
    llr_prescale: float | None = None
    wallclock_s: float = field(default=0.0, compare=False)

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else math.nan

    @property
    def ber(self) -> float:
        return self.bit_errors / self.frames if self.frames else math.nan

    @property
    def mean_iterations(self) -> float:
        return self.iterations_total / self.frames if self.frames else math.nan

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(fer=self.fer, mean_iterations=self.mean_iterations)
        return d


# --- frame simulation --------------------------------------------------------

class FrameSimulator:
    """Simulates frames of one sweep for one decoder at one Eb/N0."""

    def __init__(self, spec: SweepSpec, decoder: DecoderSpec, ebn0_db: float,
                 H: ParityCheckMatrix | None = None):
        self.spec = spec
        self.decoder = decoder
        self.H = H if H is not None else load_code(spec.code)
        rate = self.H.dimension / self.H.n
        self.channel = ChannelConfig(ebn0_db, rate, spec.saturate, spec.saturation)
        self.sampler = None
        self.fixed_codeword = None
        if spec.codeword_source == "random_per_frame":
            self.sampler = CodewordSampler(self.H)
        elif spec.codeword_source == "all_zeros":
            self.fixed_codeword = np.zeros(self.H.n, dtype=np.uint8)
        elif spec.codeword_source == "high_weight":
            self.fixed_codeword = high_weight_codeword(self.H, spec.seed)
        else:
            self.fixed_codeword = read_codeword(spec.codeword_file, self.H)
        if decoder.type == "admm_fixed":
            self.plan = decoder.plan()
            tol = decoder.integrality_tolerance or DEFAULT_FIXED_TOLERANCE
            self.cfg = DecoderConfig(spec.max_iterations, integrality_tolerance=tol)
        elif decoder.type == "admm_double":
            scale = self.channel.fixed_scale if decoder.llr_scale == "unit" else float(decoder.llr_scale)
            tol = decoder.integrality_tolerance or DecoderConfig.integrality_tolerance
            self.cfg = DecoderConfig(spec.max_iterations, integrality_tolerance=tol, llr_scale=scale)
        else:
            self.cfg = BpConfig(spec.max_iterations, decoder.llr_clamp)

    @property
    def llr_prescale(self) -> float | None:
        if self.decoder.type == "admm_fixed":
            return self.channel.fixed_scale * llr_top_code_scale(self.plan)
        if self.decoder.type == "admm_double":
            return self.cfg.llr_scale
        return None

    def frame(self, k: int):
        """Transmitted codeword and decoding of frame ``k``."""
        rng = frame_rng(self.spec.seed, k)
        c = self.sampler.sample(rng) if self.sampler is not None else self.fixed_codeword
        y = transmit(c, self.channel, rng)
        kind = self.decoder.type
        if kind == "admm_fixed":
            g = quantize_llr(llr(y, self.channel, fixed_scale=True), self.plan)
            d = decode_fixed(self.H, g, self.cfg, self.plan)
        elif kind == "admm_double":
            d = decode(self.H, llr(y, self.channel), self.cfg)
        else:
            d = bp_decode(self.H, llr(y, self.channel), self.cfg)
        return c, d

    def run_batch(self, start: int, stop: int) -> np.ndarray:
        """Per-frame rows ``(bit_errors, iterations, converged)`` for frames ``start..stop-1``."""
        out = np.zeros((stop - start, 3), dtype=np.int64)
        for r, k in enumerate(range(start, stop)):
            c, d = self.frame(k)
            out[r] = (int(np.count_nonzero(d.hard != c)), d.iterations_used, int(d.converged))
        return out


def read_codeword(path: str | None, H: ParityCheckMatrix) -> np.ndarray:
    text = Path(path).read_text()
    bits = np.array([int(ch) for ch in text if ch in "01"], dtype=np.uint8)
    if bits.shape != (H.n,) or not syndrome_ok(H, bits):
        raise SpecError(f"codeword file {path} does not hold a codeword of length {H.n}")
    return bits


_WORKER: dict = {}


def _worker_batch(args):
    spec, dec, ebn0, start, stop = args
    key = (spec, dec, ebn0)
    sim = _WORKER.get(key)
    if sim is None:
        _WORKER.clear()
        sim = _WORKER[key] = FrameSimulator(spec, dec, ebn0)
    return sim.run_batch(start, stop)


def run_point(spec: SweepSpec, ebn0_db: float, decoder: DecoderSpec | None = None,
              workers: int = 1, H: ParityCheckMatrix | None = None,
              pool: ProcessPoolExecutor | None = None) -> FerPoint:
    """Simulate until ``min_frame_errors`` errors or ``max_frames`` frames.

    The returned point is identical for any ``workers``; only
    ``frames_discarded`` (work done past the stopping frame) and
    ``wallclock_s`` may differ.
    """
    decoder = decoder or spec.decoders[0]
    t0 = time.perf_counter()
    sim = FrameSimulator(spec, decoder, ebn0_db, H)
    pt = FerPoint(ebn0_db, decoder.id, spec.seed, llr_prescale=sim.llr_prescale)
    B = spec.batch_size
    own_pool = None
    if workers > 1 and pool is None:
        pool = own_pool = ProcessPoolExecutor(workers)
    try:
        next_start = 0
        done = False
        while not done and next_start < spec.max_frames:
            wave = []
            for _ in range(max(1, workers)):
                if next_start >= spec.max_frames:
                    break
                stop = min(next_start + B, spec.max_frames)
                wave.append((next_start, stop))
                next_start = stop
            if pool is None:
                results = (sim.run_batch(a, b) for a, b in wave)
            else:
                results = pool.map(_worker_batch, [(spec, decoder, ebn0_db, a, b) for a, b in wave])
            for (a, b), rows in zip(wave, results):
                if done:
                    pt.frames_discarded += b - a
                    continue
                for r, (bit_err, iters, conv) in enumerate(rows):
                    pt.frames += 1
                    pt.iterations_total += int(iters)
                    pt.max_iterations_used = max(pt.max_iterations_used, int(iters))
                    pt.nonconverged += int(not conv)
                    if bit_err:
                        pt.frame_errors += 1
                        pt.bit_errors += int(bit_err)
                        pt.error_frames.append(a + r)
                        if pt.frame_errors >= spec.min_frame_errors:
                            done = True
                            pt.frames_discarded += len(rows) - r - 1
                            break
            log.info("%s @ %.2f dB: %d frames, %d errors", decoder.id, ebn0_db, pt.frames,
                     pt.frame_errors)
    finally:
        if own_pool is not None:
            own_pool.shutdown()
    pt.censored = pt.frame_errors < spec.min_frame_errors
    pt.wallclock_s = time.perf_counter() - t0
    return pt


def run_sweep(spec: SweepSpec, out_dir: str | Path | None = None, workers: int = 1,
              progress=None) -> list[FerPoint]:
    """Run every decoder at every Eb/N0 (ascending) and optionally persist the results."""
    if not spec.ebn0_db:
        return []
    H = load_code(spec.code)
    points = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for ebn0 in sorted(spec.ebn0_db):
            for dec in spec.decoders:
                pt = run_point(spec, ebn0, dec, workers, H, pool)
                points.append(pt)
                if progress is not None:
                    progress(pt)
    finally:
        if pool is not None:
            pool.shutdown()
    if out_dir is not None:
        write_results(spec, points, out_dir)
    return points


CSV_FIELDS = ["ebn0_db", "decoder", "frames", "frame_errors", "fer", "mean_iters"]


def write_results(spec: SweepSpec, points: list[FerPoint], out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {"config": spec.to_dict(), "points": [p.to_dict() for p in points]}
    json_path = out / f"{spec.name}.json"
    json_path.write_text(json.dumps(doc, indent=2))
    with open(out / "results.jsonl", "a") as fh:
        fh.write(json.dumps(doc) + "\n")
    csv_path = out / f"{spec.name}.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_FIELDS)
        for p in points:
            w.writerow([p.ebn0_db, p.decoder_id, p.frames, p.frame_errors, repr(p.fer),
                        repr(p.mean_iterations)])
    return json_path, csv_path


# --- statistics --------------------------------------------------------------

def two_proportion_z(e1: int, n1: int, e2: int, n2: int) -> float:
    """Pooled two-proportion z statistic for ``e1/n1 - e2/n2``."""
    p = (e1 + e2) / (n1 + n2)
    se = math.sqrt(p * (1 - p) * (1 / n1 + 1 / n2))
    return 0.0 if se == 0 else (e1 / n1 - e2 / n2) / se


def wilson_interval(errors: int, n: int, z: float = 1.959964) -> tuple[float, float]:
    p = errors / n
    den = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, centre - half), min(1.0, centre + half)
