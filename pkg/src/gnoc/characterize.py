"""Segment characterization tables: build, persist, and query.

One table per (src, dst) pair of active block kinds -- 9 in total -- with L
input-slew rows and K load columns (0..K-1 intervening wire blocks), each cell
holding delay and output slew at the MIN and MAX corners.  Building the set
evaluates the golden oracle once per (pair, row, col) and corner; afterwards
any segment costs a single lookup.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum
from itertools import product

import numpy as np

from .errors import (CornerOrderError, DigestMismatch, FormatError,
                     MonotonicityError, NotOnGrid, SegmentTooLong, SlewOutOfRange)
from .golden import Corner, StageResult, golden_segment
from .techlib import ACTIVE_KINDS, BlockKind, TechConfig

FILE_MAGIC = "HASTA-TABLES"
FILE_VERSION = "v1"

TABLE_CORNERS = (Corner.MIN, Corner.MAX)


class LookupMode(Enum):
    EXACT = "exact"
    PESSIMISTIC = "pessimistic"
    INTERPOLATE = "interpolate"


class LookupPurpose(Enum):
    SETUP_MAX = "setup_max"   # worst-case delay, MAX corner
    HOLD_MIN = "hold_min"     # best-case delay, MIN corner

    @property
    def corner(self) -> Corner:
        return Corner.MAX if self is LookupPurpose.SETUP_MAX else Corner.MIN


@dataclass
class SegmentTable:
    src_kind: BlockKind
    dst_kind: BlockKind
    rows: np.ndarray                      # L ascending slew grid values
    delay: dict = field(default_factory=dict)     # Corner -> (L, K) array
    slew_out: dict = field(default_factory=dict)  # Corner -> (L, K) array

    def __post_init__(self):
        # plain-list mirrors keep single-cell lookups cheap on long links
        self._rows = [float(x) for x in self.rows]
        self._delay = {c: a.tolist() for c, a in self.delay.items()}
        self._slew = {c: a.tolist() for c, a in self.slew_out.items()}

    @property
    def L(self) -> int:
        return len(self.rows)

    @property
    def K(self) -> int:
        return self.delay[Corner.MAX].shape[1]


@dataclass(frozen=True)
class TableSet:
    tables: dict                 # (src, dst) -> SegmentTable
    cfg_digest: str
    K: int
    L: int

    @property
    def cell_count(self) -> int:
        """Distinct (pair, row, col) cells; each is stored at both corners."""
        return len(self.tables) * self.L * self.K


def slew_grid(cfg: TechConfig) -> np.ndarray:
    return np.linspace(cfg.slew_grid_min, cfg.slew_grid_max, cfg.L)


def build_tables(cfg: TechConfig) -> TableSet:
    """Characterize all 9 segment types over the full slew x load grid."""
    rows = slew_grid(cfg)
    tables = {}
    for src, dst in product(ACTIVE_KINDS, ACTIVE_KINDS):
        delay = {c: np.empty((cfg.L, cfg.K)) for c in TABLE_CORNERS}
        slew = {c: np.empty((cfg.L, cfg.K)) for c in TABLE_CORNERS}
        for (i, s), n, corner in product(enumerate(rows), range(cfg.K), TABLE_CORNERS):
            res = golden_segment(src, dst, n, float(s), corner, cfg)
            delay[corner][i, n] = res.delay
            slew[corner][i, n] = res.slew_out
        tables[(src, dst)] = SegmentTable(src, dst, rows.copy(), delay, slew)
    return TableSet(tables=tables, cfg_digest=cfg.digest(), K=cfg.K, L=cfg.L)


def _fmt(x: float) -> str:
    return format(x, ".12g")


def save_tables(ts: TableSet, destination) -> None:
    """Write the table file (text stream or path)."""
    if hasattr(destination, "write"):
        _write(ts, destination)
    else:
        with open(destination, "w", newline="") as fh:
            _write(ts, fh)


def _write(ts: TableSet, fh) -> None:
    fh.write(f"{FILE_MAGIC} {FILE_VERSION} cfg={ts.cfg_digest} K={ts.K} L={ts.L}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["src", "dst", "corner", "row_index", "col_index",
                     "slew_in", "delay", "slew_out"])
    for (src, dst), table in sorted(ts.tables.items(),
                                    key=lambda kv: (kv[0][0].value, kv[0][1].value)):
        for corner in sorted(table.delay, key=lambda c: c.value):
            for i in range(table.L):
                for n in range(table.K):
                    writer.writerow([src.value, dst.value, corner.value, i, n,
                                     _fmt(table.rows[i]),
                                     _fmt(table.delay[corner][i, n]),
                                     _fmt(table.slew_out[corner][i, n])])


def load_tables(source, expect_digest: str | None = None) -> TableSet:
    """Read and validate a table file; strict digest check when requested."""
    if hasattr(source, "read"):
        return _read(source, expect_digest)
    with open(source, newline="") as fh:
        return _read(fh, expect_digest)


def _read(fh, expect_digest) -> TableSet:
    header = fh.readline().strip()
    words = header.split()
    if len(words) != 5 or words[0] != FILE_MAGIC:
        raise FormatError(f"not a table file (header {header!r})")
    if words[1] != FILE_VERSION:
        raise FormatError(f"unsupported table file version {words[1]!r}")
    try:
        fields = dict(w.split("=", 1) for w in words[2:])
        digest = fields["cfg"]
        K, L = int(fields["K"]), int(fields["L"])
    except (ValueError, KeyError) as exc:
        raise FormatError(f"malformed table header {header!r}") from exc
    if expect_digest is not None and digest != expect_digest:
        raise DigestMismatch(f"tables built for cfg {digest}, expected {expect_digest}")

    reader = csv.reader(fh)
    head = next(reader, None)
    if head != ["src", "dst", "corner", "row_index", "col_index",
                "slew_in", "delay", "slew_out"]:
        raise FormatError(f"bad CSV column header {head!r}")

    rows_by_pair: dict = {}
    data: dict = {}
    for rec in reader:
        if not rec:
            continue
        try:
            src, dst = BlockKind(rec[0]), BlockKind(rec[1])
            corner = Corner(rec[2])
            i, n = int(rec[3]), int(rec[4])
            slew_in, delay, slew_out = map(float, rec[5:8])
        except (ValueError, IndexError) as exc:
            raise FormatError(f"malformed table record {rec!r}") from exc
        if not (0 <= i < L and 0 <= n < K):
            raise FormatError(f"cell index out of range in record {rec!r}")
        pair = (src, dst)
        entry = data.setdefault((pair, corner),
                                {"delay": np.full((L, K), np.nan),
                                 "slew": np.full((L, K), np.nan)})
        entry["delay"][i, n] = delay
        entry["slew"][i, n] = slew_out
        rows = rows_by_pair.setdefault(pair, np.full(L, np.nan))
        if not np.isnan(rows[i]) and rows[i] != slew_in:
            raise FormatError(f"inconsistent row slew for {src}->{dst} row {i}")
        rows[i] = slew_in

    pairs = set(product(ACTIVE_KINDS, ACTIVE_KINDS))
    tables = {}
    for pair in sorted(pairs, key=lambda p: (p[0].value, p[1].value)):
        rows = rows_by_pair.get(pair)
        if rows is None or np.isnan(rows).any():
            raise FormatError(f"table {pair[0]}->{pair[1]} missing or incomplete")
        delay, slew = {}, {}
        for corner in TABLE_CORNERS:
            entry = data.get((pair, corner))
            if entry is None or np.isnan(entry["delay"]).any():
                raise FormatError(f"table {pair[0]}->{pair[1]} missing corner "
                                  f"{corner.value}")
            delay[corner] = entry["delay"]
            slew[corner] = entry["slew"]
        tables[pair] = SegmentTable(pair[0], pair[1], rows, delay, slew)

    ts = TableSet(tables=tables, cfg_digest=digest, K=K, L=L)
    validate_tables(ts)
    return ts


def validate_tables(ts: TableSet) -> None:
    """Enforce structural invariants: ascending rows, corner order, monotonicity."""
    for (src, dst), t in ts.tables.items():
        name = f"{src}->{dst}"
        if not np.all(np.diff(t.rows) > 0):
            raise MonotonicityError(f"{name}: slew rows not strictly ascending")
        dmin, dmax = t.delay[Corner.MIN], t.delay[Corner.MAX]
        bad = np.argwhere(dmax < dmin)
        if bad.size:
            i, n = bad[0]
            raise CornerOrderError(f"{name}: MAX delay < MIN delay at cell "
                                   f"(row {i}, col {n})")
        for corner in TABLE_CORNERS:
            d = t.delay[corner]
            if np.any(np.diff(d, axis=0) < 0):
                raise MonotonicityError(f"{name}/{corner.value}: delay decreases "
                                        f"along slew rows")
            if np.any(np.diff(d, axis=1) < 0):
                raise MonotonicityError(f"{name}/{corner.value}: delay decreases "
                                        f"along load columns")


def tables_equal(a: TableSet, b: TableSet, rtol: float = 0.0) -> bool:
    """Structural comparison; rtol > 0 tolerates file-precision rounding."""
    if (a.cfg_digest, a.K, a.L) != (b.cfg_digest, b.K, b.L):
        return False
    if set(a.tables) != set(b.tables):
        return False
    for pair, ta in a.tables.items():
        tb = b.tables[pair]
        if not np.allclose(ta.rows, tb.rows, rtol=rtol, atol=0.0):
            return False
        for corner in TABLE_CORNERS:
            if not np.allclose(ta.delay[corner], tb.delay[corner], rtol=rtol, atol=0.0):
                return False
            if not np.allclose(ta.slew_out[corner], tb.slew_out[corner],
                               rtol=rtol, atol=0.0):
                return False
    return True


def table_lookup(ts: TableSet, src: BlockKind, dst: BlockKind, n_wires: int,
                 slew_in: float, mode: LookupMode,
                 purpose: LookupPurpose) -> StageResult:
    """One segment lookup: pick the table, the column by wire count, the row by slew.

    Off-grid slews resolve per mode: EXACT refuses, PESSIMISTIC takes the
    conservative bracketing row for the given purpose, INTERPOLATE blends the
    two bracketing rows linearly.  Slews below the grid clamp to the first row
    (flagged); slews above it are a hard error.
    """
    if n_wires > ts.K - 1:
        raise SegmentTooLong(f"{n_wires} intervening wires exceeds table range "
                             f"0..{ts.K - 1}")
    if n_wires < 0:
        raise SegmentTooLong(f"n_wires must be >= 0, got {n_wires}")
    table = ts.tables[(src, dst)]
    corner = purpose.corner
    rows = table._rows
    delay = table._delay[corner]
    slew = table._slew[corner]

    clamped = False
    if slew_in < rows[0]:
        slew_in = rows[0]
        clamped = True
    if slew_in > rows[-1]:
        raise SlewOutOfRange(f"input slew {slew_in} above table grid max {rows[-1]}")

    hi = bisect_left(rows, slew_in)
    on_grid = hi < len(rows) and _close(rows[hi], slew_in)
    if not on_grid and hi > 0 and _close(rows[hi - 1], slew_in):
        hi -= 1
        on_grid = True

    if on_grid:
        return StageResult(delay[hi][n_wires], slew[hi][n_wires], clamped=clamped)
    if mode is LookupMode.EXACT:
        raise NotOnGrid(f"slew {slew_in} is not a grid row (EXACT mode)")

    lo = hi - 1
    if mode is LookupMode.PESSIMISTIC:
        if purpose is LookupPurpose.SETUP_MAX:
            pick = hi if delay[hi][n_wires] >= delay[lo][n_wires] else lo
        else:
            pick = lo if delay[lo][n_wires] <= delay[hi][n_wires] else hi
        return StageResult(delay[pick][n_wires], slew[pick][n_wires],
                           clamped=clamped)

    frac = (slew_in - rows[lo]) / (rows[hi] - rows[lo])
    d = (1.0 - frac) * delay[lo][n_wires] + frac * delay[hi][n_wires]
    s = (1.0 - frac) * slew[lo][n_wires] + frac * slew[hi][n_wires]
    return StageResult(d, s, clamped=clamped)


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-9 * max(abs(a), abs(b), 1.0)


def reconstruct_lookup(ts: TableSet, src: BlockKind, dst: BlockKind,
                       n_wires: int, slew_in: float,
                       purpose: LookupPurpose) -> StageResult:
    """Quantization-free lookup at an arbitrary in-range slew, from table data only.

    Per column the tabulated delay is linear in input slew and the squared
    output slew is quadratic in it, so two-row linear (delay) plus three-row
    quadratic (slew^2) reconstruction recovers the characterized values
    exactly between grid rows.  This is what EXACT-mode path chaining uses
    once slews leave the grid.
    """
    if n_wires > ts.K - 1 or n_wires < 0:
        raise SegmentTooLong(f"{n_wires} intervening wires exceeds table range "
                             f"0..{ts.K - 1}")
    table = ts.tables[(src, dst)]
    rows = table._rows
    delay = table._delay[purpose.corner]
    slew = table._slew[purpose.corner]

    clamped = False
    if slew_in < rows[0]:
        slew_in = rows[0]
        clamped = True
    if slew_in > rows[-1]:
        raise SlewOutOfRange(f"input slew {slew_in} above table grid max {rows[-1]}")

    hi = bisect_left(rows, slew_in)
    if hi < len(rows) and _close(rows[hi], slew_in):
        return StageResult(delay[hi][n_wires], slew[hi][n_wires], clamped=clamped)
    if hi > 0 and _close(rows[hi - 1], slew_in):
        hi -= 1
        return StageResult(delay[hi][n_wires], slew[hi][n_wires], clamped=clamped)

    lo = hi - 1
    frac = (slew_in - rows[lo]) / (rows[hi] - rows[lo])
    d = (1.0 - frac) * delay[lo][n_wires] + frac * delay[hi][n_wires]

    # three adjacent rows pin the quadratic in slew^2
    i0 = min(max(lo - 1, 0), len(rows) - 3)
    xs = rows[i0:i0 + 3]
    ys = [slew[i0 + j][n_wires] ** 2 for j in range(3)]
    s2 = 0.0
    for j in range(3):
        term = ys[j]
        for m in range(3):
            if m != j:
                term *= (slew_in - xs[m]) / (xs[j] - xs[m])
        s2 += term
    return StageResult(d, math.sqrt(max(s2, 0.0)), clamped=clamped)
