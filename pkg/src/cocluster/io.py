"""Dataset loading, result persistence, and format conversions.

Three matrix formats: dense delimited text, whitespace triplets with an
optional "%%dims R C" header (and "%%base 0|1" index origin), and
Matrix Market coordinate files. Values are written with 17 significant
digits, so export -> import round-trips are exact for 64-bit floats.
Run results persist as one JSON document per run plus a flat CSV for
parameter sweeps; writers never append, so concurrent restarts cannot
contend on a file.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import (
    IndexOutOfDeclaredRange,
    NegativeEntry,
    NonFinite,
    ParseError,
    RaggedRows,
    UnsupportedHeader,
)

SWEEP_HEADER = (
    "beta,seed,final_cost_bits,map_row,map_col,"
    "n_nonempty_row_clusters,n_nonempty_col_clusters,wall_ms"
)

_FMT = "%.17g"


def _parse_float(token: str, line_no: int, col_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", line=line_no, col=col_no) from None
    if not np.isfinite(value):
        raise NonFinite((line_no, col_no), value)
    return value


def load_dense_csv(path, delimiter: str = ",") -> np.ndarray:
    """Read a rectangular numeric table; no normalization is applied."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = [t.strip() for t in stripped.split(delimiter)]
            if width is None:
                width = len(tokens)
            elif len(tokens) != width:
                raise RaggedRows(
                    f"row has {len(tokens)} fields, expected {width}", line=line_no
                )
            parsed = []
            for col_no, token in enumerate(tokens, start=1):
                value = _parse_float(token, line_no, col_no)
                if value < 0.0:
                    raise NegativeEntry((len(rows), col_no - 1), value)
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise ParseError("file contains no data rows", line=1)
    return np.asarray(rows, dtype=float)


def load_triplets(path) -> np.ndarray:
    """Read (row, col, value) lines into a matrix; duplicate cells sum.

    Directive lines: "%%dims R C" declares the shape (entries outside it
    are rejected), "%%base 0" or "%%base 1" sets the index origin
    (default 0). Other %-prefixed lines are comments. Cells never
    mentioned stay absent (zero).
    """
    declared = None
    base = 0
    entries = []
    max_r = -1
    max_c = -1
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("%%dims"):
                parts = stripped.split()
                if len(parts) != 3:
                    raise ParseError("%%dims needs two integers", line=line_no)
                try:
                    declared = (int(parts[1]), int(parts[2]))
                except ValueError:
                    raise ParseError("%%dims needs two integers", line=line_no) from None
                continue
            if stripped.startswith("%%base"):
                parts = stripped.split()
                if len(parts) != 2 or parts[1] not in ("0", "1"):
                    raise ParseError("%%base must be 0 or 1", line=line_no)
                base = int(parts[1])
                continue
            if stripped.startswith("%"):
                continue
            tokens = stripped.split()
            if len(tokens) != 3:
                raise ParseError(
                    f"expected 'row col value', got {len(tokens)} fields", line=line_no
                )
            try:
                r = int(tokens[0]) - base
                c = int(tokens[1]) - base
            except ValueError:
                raise ParseError(f"bad indices {tokens[:2]}", line=line_no) from None
            value = _parse_float(tokens[2], line_no, 3)
            if value < 0.0:
                raise NegativeEntry((r, c), value)
            if r < 0 or c < 0:
                raise IndexOutOfDeclaredRange(
                    f"index ({r + base}, {c + base}) below base {base}", line=line_no
                )
            if declared is not None and (r >= declared[0] or c >= declared[1]):
                raise IndexOutOfDeclaredRange(
                    f"entry ({r + base}, {c + base}) outside declared "
                    f"{declared[0]}x{declared[1]}",
                    line=line_no,
                )
            entries.append((r, c, value))
            max_r = max(max_r, r)
            max_c = max(max_c, c)
    if not entries:
        raise ParseError("file contains no entries", line=1)
    shape = declared if declared is not None else (max_r + 1, max_c + 1)
    out = np.zeros(shape)
    for r, c, value in entries:
        out[r, c] += value
    return out


def load_matrix_market(path) -> np.ndarray:
    """Read a Matrix Market coordinate file (real or integer, general)."""
    with open(path, "r", encoding="utf-8") as handle:
        banner = handle.readline()
        if not banner.startswith("%%MatrixMarket"):
            raise UnsupportedHeader("missing %%MatrixMarket banner", line=1)
        fields = banner.strip().lower().split()
        if len(fields) != 5 or fields[1] != "matrix":
            raise UnsupportedHeader(f"unrecognized banner {banner.strip()!r}", line=1)
        _, _, layout, valuetype, symmetry = fields
        if layout != "coordinate":
            raise UnsupportedHeader(f"unsupported layout {layout!r}", line=1)
        if valuetype not in ("real", "integer"):
            raise UnsupportedHeader(f"unsupported value type {valuetype!r}", line=1)
        if symmetry != "general":
            raise UnsupportedHeader(f"unsupported symmetry {symmetry!r}", line=1)

        size_line = None
        line_no = 1
        for line in handle:
            line_no += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            size_line = (stripped, line_no)
            break
        if size_line is None:
            raise ParseError("missing size line", line=line_no)
        parts = size_line[0].split()
        if len(parts) != 3:
            raise ParseError("size line needs 'rows cols nnz'", line=size_line[1])
        try:
            n_rows, n_cols, nnz = (int(p) for p in parts)
        except ValueError:
            raise ParseError("size line needs integers", line=size_line[1]) from None

        out = np.zeros((n_rows, n_cols))
        seen = 0
        for line in handle:
            line_no += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            tokens = stripped.split()
            if len(tokens) != 3:
                raise ParseError(
                    f"expected 'row col value', got {len(tokens)} fields", line=line_no
                )
            try:
                r = int(tokens[0]) - 1
                c = int(tokens[1]) - 1
            except ValueError:
                raise ParseError(f"bad indices {tokens[:2]}", line=line_no) from None
            value = _parse_float(tokens[2], line_no, 3)
            if value < 0.0:
                raise NegativeEntry((r, c), value)
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise IndexOutOfDeclaredRange(
                    f"entry ({r + 1}, {c + 1}) outside {n_rows}x{n_cols}", line=line_no
                )
            out[r, c] += value
            seen += 1
        if seen != nnz:
            raise ParseError(f"declared {nnz} entries, found {seen}", line=line_no)
    return out


def write_dense_csv(matrix, path, delimiter: str = ",") -> None:
    mat = np.asarray(matrix, dtype=float)
    with open(path, "w", encoding="utf-8") as handle:
        for row in mat:
            handle.write(delimiter.join(_FMT % v for v in row) + "\n")


def write_triplets(matrix, path, base: int = 0) -> None:
    mat = np.asarray(matrix, dtype=float)
    rows, cols = np.nonzero(mat)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"%%dims {mat.shape[0]} {mat.shape[1]}\n")
        handle.write(f"%%base {base}\n")
        for r, c in zip(rows, cols):
            handle.write(f"{r + base} {c + base} {_FMT % mat[r, c]}\n")


def write_matrix_market(matrix, path) -> None:
    mat = np.asarray(matrix, dtype=float)
    rows, cols = np.nonzero(mat)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("%%MatrixMarket matrix coordinate real general\n")
        handle.write(f"{mat.shape[0]} {mat.shape[1]} {rows.size}\n")
        for r, c in zip(rows, cols):
            handle.write(f"{r + 1} {c + 1} {_FMT % mat[r, c]}\n")


def content_hash(matrix) -> str:
    """SHA-256 over shape and nonzero triplets at full float precision."""
    mat = np.asarray(matrix, dtype=float)
    digest = hashlib.sha256()
    digest.update(f"{mat.shape[0]} {mat.shape[1]}\n".encode())
    rows, cols = np.nonzero(mat)
    for r, c in zip(rows, cols):
        digest.update((f"{r} {c} " + _FMT % mat[r, c] + "\n").encode())
    return digest.hexdigest()


@dataclasses.dataclass
class RunRecord:
    """Everything needed to reproduce and evaluate one optimization run."""

    dataset_id: str
    content_hash: str
    config: dict
    beta: float
    seed: int
    final_cost_bits: float
    cost_breakdown: dict
    phi: list
    psi: list
    n_nonempty_row_clusters: int
    n_nonempty_col_clusters: int
    map_row: float | None = None
    map_col: float | None = None
    n_stages: int = 1
    total_moves: int = 0
    wall_ms: float = 0.0
    created_at: str = ""

    def __post_init__(self):
        if not self.created_at:
            self.created_at = datetime.now(timezone.utc).isoformat()


def write_run(record: RunRecord, path) -> Path:
    """Persist one run as a JSON document; returns the written path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(dataclasses.asdict(record), handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def read_run(path) -> RunRecord:
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    return RunRecord(**payload)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return _FMT % value
    return str(value)


def write_sweep(records, path) -> Path:
    """Flat CSV over runs: one row per (beta, seed), fixed column order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(SWEEP_HEADER + "\n")
        for rec in records:
            handle.write(
                ",".join(
                    [
                        _cell(rec.beta),
                        _cell(rec.seed),
                        _cell(rec.final_cost_bits),
                        _cell(rec.map_row),
                        _cell(rec.map_col),
                        _cell(rec.n_nonempty_row_clusters),
                        _cell(rec.n_nonempty_col_clusters),
                        _cell(rec.wall_ms),
                    ]
                )
                + "\n"
            )
    return path


def read_sweep(path) -> list[dict]:
    """Rows of a sweep CSV as dicts with floats where applicable."""
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().strip()
        if header != SWEEP_HEADER:
            raise ParseError(f"unexpected sweep header {header!r}", line=1)
        names = header.split(",")
        rows = []
        for line_no, line in enumerate(handle, start=2):
            stripped = line.strip()
            if not stripped:
                continue
            cells = stripped.split(",")
            if len(cells) != len(names):
                raise RaggedRows(
                    f"row has {len(cells)} fields, expected {len(names)}", line=line_no
                )
            row = {}
            for name, cell in zip(names, cells):
                row[name] = None if cell == "" else float(cell)
            rows.append(row)
    return rows
