"""Parity-check matrices, quasi-cyclic descriptions, file I/O and GF(2) helpers."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np


class CodeFormatError(ValueError):
    """Raised for malformed alist / QC JSON input."""


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """Sparse binary parity-check matrix stored as check/variable neighbourhoods.

    Indices are 0-based. ``check_neighborhoods[j]`` lists the variables in
    check ``j`` and ``variable_neighborhoods[i]`` the checks touching
    variable ``i``; both are sorted and duplicate free.
    """

    m: int
    n: int
    check_neighborhoods: tuple[tuple[int, ...], ...]
    variable_neighborhoods: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.check_neighborhoods) != self.m or len(self.variable_neighborhoods) != self.n:
            raise CodeFormatError("neighbourhood list lengths do not match (m, n)")
        edges = set()
        for j, row in enumerate(self.check_neighborhoods):
            if not row:
                raise CodeFormatError(f"check {j} has degree 0")
            if list(row) != sorted(set(row)):
                raise CodeFormatError(f"check {j} neighbourhood not sorted/unique")
            for i in row:
                if not 0 <= i < self.n:
                    raise CodeFormatError(f"check {j} references variable {i} outside [0, {self.n})")
                edges.add((j, i))
        col_edges = set()
        for i, col in enumerate(self.variable_neighborhoods):
            if not col:
                raise CodeFormatError(f"variable {i} has degree 0")
            if list(col) != sorted(set(col)):
                raise CodeFormatError(f"variable {i} neighbourhood not sorted/unique")
            col_edges.update((j, i) for j in col)
        if edges != col_edges:
            raise CodeFormatError("check and variable neighbourhoods disagree")

    @classmethod
    def from_check_lists(cls, n: int, rows: Iterable[Iterable[int]]) -> "ParityCheckMatrix":
        rows = [tuple(sorted(set(int(i) for i in r))) for r in rows]
        cols: list[list[int]] = [[] for _ in range(n)]
        for j, r in enumerate(rows):
            for i in r:
                if not 0 <= i < n:
                    raise CodeFormatError(f"check {j} references variable {i} outside [0, {n})")
                cols[i].append(j)
        return cls(len(rows), n, tuple(rows), tuple(tuple(c) for c in cols))

    @classmethod
    def from_dense(cls, H: np.ndarray) -> "ParityCheckMatrix":
        H = np.asarray(H) % 2
        if H.ndim != 2:
            raise CodeFormatError("dense parity-check matrix must be 2-D")
        return cls.from_check_lists(H.shape[1], (np.flatnonzero(row) for row in H))

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for j, row in enumerate(self.check_neighborhoods):
            H[j, list(row)] = 1
        return H

    @property
    def num_edges(self) -> int:
        return sum(len(r) for r in self.check_neighborhoods)

    @cached_property
    def check_degrees(self) -> np.ndarray:
        return np.array([len(r) for r in self.check_neighborhoods], dtype=np.int64)

    @cached_property
    def variable_degrees(self) -> np.ndarray:
        return np.array([len(c) for c in self.variable_neighborhoods], dtype=np.int64)

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Check-major edge layout ``(check_ptr, edge_var, edge_chk)`` used by the kernels."""
        ptr = np.zeros(self.m + 1, dtype=np.int64)
        ptr[1:] = np.cumsum(self.check_degrees)
        var = np.fromiter((i for r in self.check_neighborhoods for i in r), dtype=np.int64,
                          count=int(ptr[-1]))
        chk = np.repeat(np.arange(self.m, dtype=np.int64), self.check_degrees)
        return ptr, var, chk

    def rank(self) -> int:
        return gf2_rank(self.to_dense())

    @property
    def dimension(self) -> int:
        return self.n - self.rank()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return self.n == other.n and self.check_neighborhoods == other.check_neighborhoods

    def __hash__(self) -> int:
        return hash((self.n, self.check_neighborhoods))


@dataclass(frozen=True)
class QcStructure:
    """Proto-matrix of circulant shift sets with lifting size ``p``.

    ``tiles[a][b]`` is a tuple of distinct shifts; an empty tuple is the
    all-zeros tile.
    """

    p: int
    tiles: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self) -> None:
        if self.p < 1:
            raise CodeFormatError("circulant size p must be positive")
        widths = {len(row) for row in self.tiles}
        if len(widths) > 1:
            raise CodeFormatError("proto-matrix rows have unequal length")
        for a, row in enumerate(self.tiles):
            for b, shifts in enumerate(row):
                if len(set(shifts)) != len(shifts):
                    raise CodeFormatError(f"tile ({a}, {b}) repeats a shift value")
                for s in shifts:
                    if not 0 <= s < self.p:
                        raise CodeFormatError(f"tile ({a}, {b}) shift {s} outside [0, {self.p})")

    @classmethod
    def from_shifts(cls, p: int, shifts: Sequence[Sequence[Iterable[int]]]) -> "QcStructure":
        return cls(int(p), tuple(tuple(tuple(int(s) for s in tile) for tile in row) for row in shifts))

    @property
    def proto_rows(self) -> int:
        return len(self.tiles)

    @property
    def proto_cols(self) -> int:
        return len(self.tiles[0]) if self.tiles else 0

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "shifts": [[list(t) for t in row] for row in self.tiles]})


def expand_qc(qc: QcStructure) -> ParityCheckMatrix:
    """Expand a QC description; shift ``s`` in tile ``(a, b)`` sets ``H[a*p + (t+s) % p, b*p + t]``."""
    p = qc.p
    H = np.zeros((qc.proto_rows * p, qc.proto_cols * p), dtype=np.uint8)
    t = np.arange(p)
    for a, row in enumerate(qc.tiles):
        for b, shifts in enumerate(row):
            for s in shifts:
                H[a * p + (t + s) % p, b * p + t] ^= 1
    return ParityCheckMatrix.from_dense(H)


def detect_qc(H: ParityCheckMatrix, p: int) -> QcStructure:
    """Recover the tile shifts of ``H`` for circulant size ``p``.

    Raises :class:`CodeFormatError` if ``H`` is not quasi-cyclic with that ``p``.
    """
    if H.m % p or H.n % p:
        raise CodeFormatError(f"matrix shape {H.m}x{H.n} is not a multiple of p={p}")
    dense = H.to_dense()
    tiles = []
    for a in range(H.m // p):
        row = []
        for b in range(H.n // p):
            block = dense[a * p:(a + 1) * p, b * p:(b + 1) * p]
            row.append(tuple(int(s) for s in np.flatnonzero(block[:, 0])))
        tiles.append(tuple(row))
    qc = QcStructure(p, tuple(tiles))
    if not np.array_equal(expand_qc(qc).to_dense(), dense):
        raise CodeFormatError(f"matrix is not quasi-cyclic with p={p}")
    return qc


def _read_text(source: str | Path | TextIO) -> str:
    if hasattr(source, "read"):
        return source.read()
    return Path(source).read_text()


def load_alist(source: str | Path | TextIO) -> ParityCheckMatrix:
    """Parse a MacKay alist file (1-based indices, zero padding allowed)."""
    tokens = _read_text(source).split()
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise CodeFormatError(f"non-integer token in alist: {exc}") from None
    pos = 0

    def take(k: int) -> list[int]:
        nonlocal pos
        if pos + k > len(values):
            raise CodeFormatError("alist ended prematurely")
        out = values[pos:pos + k]
        pos += k
        return out

    n, m = take(2)
    if n < 1 or m < 1:
        raise CodeFormatError(f"bad alist header n={n} m={m}")
    max_col, max_row = take(2)
    col_deg = take(n)
    row_deg = take(m)
    if any(d > max_col or d < 1 for d in col_deg) or any(d > max_row or d < 1 for d in row_deg):
        raise CodeFormatError("declared degrees inconsistent with the maximum degrees")

    def adjacency(count: int, degrees: list[int], width: int, limit: int, what: str) -> list[list[int]]:
        lists = []
        for k in range(count):
            entries = [e for e in take(width) if e != 0]
            if len(entries) != degrees[k]:
                raise CodeFormatError(
                    f"{what} {k + 1}: {len(entries)} entries but degree {degrees[k]} declared")
            for e in entries:
                if not 1 <= e <= limit:
                    raise CodeFormatError(f"{what} {k + 1}: index {e} out of range 1..{limit}")
            lists.append([e - 1 for e in entries])
        return lists

    # Some writers omit zero padding; fall back to degree-exact lists.
    start = pos
    try:
        cols = adjacency(n, col_deg, max_col, m, "column")
        rows = adjacency(m, row_deg, max_row, n, "row")
        if pos != len(values):
            raise CodeFormatError("trailing data")
    except CodeFormatError:
        pos = start
        cols = []
        for k in range(n):
            entries = take(col_deg[k])
            if any(not 1 <= e <= m for e in entries):
                raise CodeFormatError(f"column {k + 1}: index out of range 1..{m}") from None
            cols.append([e - 1 for e in entries])
        rows = []
        for k in range(m):
            entries = take(row_deg[k])
            if any(not 1 <= e <= n for e in entries):
                raise CodeFormatError(f"row {k + 1}: index out of range 1..{n}") from None
            rows.append([e - 1 for e in entries])
        if pos != len(values):
            raise CodeFormatError("trailing data after adjacency lists")
    H = ParityCheckMatrix.from_check_lists(n, rows)
    if {(j, i) for i, c in enumerate(cols) for j in c} != {(j, i) for j, r in enumerate(rows) for i in r}:
        raise CodeFormatError("row and column adjacency lists disagree")
    return H


def dump_alist(H: ParityCheckMatrix) -> str:
    out = io.StringIO()
    max_col = int(H.variable_degrees.max())
    max_row = int(H.check_degrees.max())
    print(H.n, H.m, file=out)
    print(max_col, max_row, file=out)
    print(*H.variable_degrees.tolist(), file=out)
    print(*H.check_degrees.tolist(), file=out)
    for col in H.variable_neighborhoods:
        print(*([j + 1 for j in col] + [0] * (max_col - len(col))), file=out)
    for row in H.check_neighborhoods:
        print(*([i + 1 for i in row] + [0] * (max_row - len(row))), file=out)
    return out.getvalue()


def load_qc_json(source: str | Path | TextIO) -> QcStructure:
    try:
        doc = json.loads(_read_text(source))
    except json.JSONDecodeError as exc:
        raise CodeFormatError(f"invalid QC JSON: {exc}") from None
    if not isinstance(doc, dict) or "p" not in doc or "shifts" not in doc:
        raise CodeFormatError("QC JSON needs fields 'p' and 'shifts'")
    shifts = doc["shifts"]
    if not isinstance(shifts, list) or not all(isinstance(r, list) for r in shifts):
        raise CodeFormatError("'shifts' must be an array of arrays")
    # accept -1 / null / a bare integer as shorthand for a tile
    norm = []
    for row in shifts:
        nrow = []
        for t in row:
            if t is None or t == -1:
                t = []
            elif isinstance(t, int):
                t = [t]
            nrow.append(t)
        norm.append(nrow)
    return QcStructure.from_shifts(doc["p"], norm)


BUILTIN_CODES = {
    "hamming74": "hamming74.alist",
    "tanner": "tanner_155_64.json",
    "wigig": "wigig_672_r13_16.json",
}


def load_code(ref: str | Path) -> ParityCheckMatrix:
    """Load a code by builtin name (``hamming74``, ``tanner``, ``wigig``) or file path.

    ``.json`` files are QC descriptions, anything else is parsed as alist.
    """
    ref_s = str(ref)
    if ref_s in BUILTIN_CODES:
        text = resources.files("admmlp.data").joinpath(BUILTIN_CODES[ref_s]).read_text()
        name = BUILTIN_CODES[ref_s]
    else:
        path = Path(ref)
        if not path.is_file():
            raise FileNotFoundError(f"code file not found: {ref}")
        text = path.read_text()
        name = path.name
    if name.endswith(".json"):
        return expand_qc(load_qc_json(io.StringIO(text)))
    return load_alist(io.StringIO(text))


def syndrome_ok(H: ParityCheckMatrix, bits: Sequence[int] | np.ndarray) -> bool:
    bits = np.asarray(bits)
    if bits.shape != (H.n,):
        raise ValueError(f"expected {H.n} bits, got shape {bits.shape}")
    b = bits.astype(np.int64) & 1
    ptr, var, _ = H.edge_arrays
    return not np.any(np.add.reduceat(b[var], ptr[:-1]) & 1)


# --- GF(2) linear algebra -------------------------------------------------

def gf2_rref(A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2), pivoting in column order."""
    R = (np.asarray(A) % 2).astype(bool)
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(R[r:, c])
        if hits.size == 0:
            continue
        k = r + hits[0]
        if k != r:
            R[[r, k]] = R[[k, r]]
        mask = R[:, c].copy()
        mask[r] = False
        R[mask] ^= R[r]
        pivots.append(c)
        r += 1
    return R[:r].astype(np.uint8), pivots


def gf2_rank(A: np.ndarray) -> int:
    return len(gf2_rref(A)[1])


def null_space_basis(H: ParityCheckMatrix | np.ndarray) -> np.ndarray:
    """Rows of the returned ``(k, n)`` array span the GF(2) null space of ``H``."""
    dense = H.to_dense() if isinstance(H, ParityCheckMatrix) else np.asarray(H) % 2
    R, pivots = gf2_rref(dense)
    n = dense.shape[1]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, pc in enumerate(pivots):
            basis[k, pc] = R[r, f]
    return basis


class CodewordSampler:
    """Uniform codeword sampler backed by a cached null-space basis."""

    def __init__(self, H: ParityCheckMatrix):
        self.H = H
        self.basis = null_space_basis(H)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        k = self.basis.shape[0]
        if k == 0:
            return np.zeros(self.H.n, dtype=np.uint8)
        coeffs = rng.integers(0, 2, size=k, dtype=np.uint8)
        return ((coeffs.astype(np.int64) @ self.basis) & 1).astype(np.uint8)


def random_codeword(H: ParityCheckMatrix, rng_seed: int) -> np.ndarray:
    return CodewordSampler(H).sample(np.random.default_rng(rng_seed))


def high_weight_codeword(H: ParityCheckMatrix, seed: int = 0, trials: int = 2000) -> np.ndarray:
    """Heaviest of ``trials`` uniformly drawn codewords (first one wins ties)."""
    sampler = CodewordSampler(H)
    rng = np.random.default_rng(seed)
    best = np.zeros(H.n, dtype=np.uint8)
    for _ in range(trials):
        c = sampler.sample(rng)
        if c.sum() > best.sum():
            best = c
    return best
