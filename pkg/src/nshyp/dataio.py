"""CSV ingestion, row-wise policy application, and sanitized output.

Tables keep their cells as the original strings: only the cells the policy
actually rewrites are re-rendered (with round-trip float precision), so
untouched columns and rows pass through byte-identical.  Rows with missing
mapped values are never imputed; they pass through unchanged and are
counted.  The policy map is total, so rows outside the declared domain box
are transformed as well, but they are counted separately because the
epsilon certificate only speaks for the box.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import _core
from .privacy import StripPolicy


class DataError(ValueError):
    """Unusable input data or inconsistent table/policy combination."""


def parse_cell(cell: str) -> float | None:
    """Numeric value of a CSV cell, or None when empty/unparseable."""
    text = cell.strip()
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _check_column_map(column_map: dict[str, int]) -> None:
    if not column_map:
        raise DataError("column map must not be empty")
    coords = sorted(column_map.values())
    if coords != list(range(1, len(coords) + 1)):
        raise DataError(
            f"column map must cover coordinates 1..{len(coords)} exactly once, "
            f"got {coords}")


@dataclass
class DataTable:
    """A CSV table with selected columns mapped to policy coordinates."""

    columns: list[str]
    rows: list[list[str]]
    column_map: dict[str, int]

    def __post_init__(self):
        _check_column_map(self.column_map)
        for name in self.column_map:
            if name not in self.columns:
                raise DataError(f"mapped column {name!r} not present in the table")

    @property
    def dim(self) -> int:
        return len(self.column_map)

    @property
    def coord_columns(self) -> list[int]:
        """Column positions ordered by coordinate (x1 first)."""
        by_coord = {coord: name for name, coord in self.column_map.items()}
        return [self.columns.index(by_coord[c]) for c in range(1, self.dim + 1)]

    def point(self, row_index: int) -> tuple[float, ...] | None:
        """Mapped coordinates of one row, or None if any cell is missing."""
        vals = []
        for col in self.coord_columns:
            v = parse_cell(self.rows[row_index][col])
            if v is None:
                return None
            vals.append(v)
        return tuple(vals)

    def complete_points(self) -> tuple[list[int], np.ndarray]:
        """Row indices with all mapped cells present, plus their point matrix."""
        idx = []
        pts = []
        for k in range(len(self.rows)):
            p = self.point(k)
            if p is not None:
                idx.append(k)
                pts.append(p)
        return idx, np.asarray(pts, dtype=np.float64).reshape(len(idx), self.dim)


@dataclass(frozen=True)
class SanitizationReport:
    """Per-run accounting of a table sanitization."""

    rows_total: int
    rows_modified: int
    rows_skipped_missing: int
    rows_outside_box: int
    max_perturbation: float
    rho: float
    epsilon: float | None = None

    @property
    def rows_unmodified(self) -> int:
        return self.rows_total - self.rows_modified - self.rows_skipped_missing

    def with_epsilon(self, epsilon: float) -> SanitizationReport:
        return replace(self, epsilon=epsilon)

    def to_json_dict(self) -> dict:
        return {"rows_total": self.rows_total,
                "rows_modified": self.rows_modified,
                "rows_skipped_missing": self.rows_skipped_missing,
                "rows_outside_box": self.rows_outside_box,
                "max_perturbation": self.max_perturbation,
                "rho": self.rho,
                "epsilon": self.epsilon}


def load_csv(path: str, column_map: dict[str, int],
             missing_policy: str = "skip") -> DataTable:
    """Read a CSV file with a header row.

    Cells of mapped columns that fail to parse as numbers count as missing.
    missing_policy: "skip" keeps such rows (the sanitizer passes them
    through), "fail" raises on the first one.

    Raises DataError for an unreadable file, an absent mapped column, or a
    table with zero usable (fully numeric) rows.
    """
    if missing_policy not in ("skip", "fail"):
        raise DataError(f"missing_policy must be 'skip' or 'fail', got {missing_policy!r}")
    _check_column_map(column_map)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: empty file, expected a header row") from None
            rows = [row for row in reader]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    for name in column_map:
        if name not in header:
            raise DataError(f"{path}: column {name!r} not found in header {header}")
    width = len(header)
    rows = [row + [""] * (width - len(row)) if len(row) < width else row[:width]
            for row in rows]
    table = DataTable(columns=header, rows=rows, column_map=dict(column_map))

    usable = 0
    for k in range(len(rows)):
        if table.point(k) is None:
            if missing_policy == "fail":
                raise DataError(f"{path}: row {k + 1} has a missing mapped value")
        else:
            usable += 1
    if usable == 0:
        raise DataError(f"{path}: no usable rows (all rows have missing mapped values)")
    return table


def write_csv(table: DataTable, path: str) -> None:
    """Write the table atomically (temp file + rename) with a header row."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(table.columns)
            writer.writerows(table.rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def generate_fixture(seed: int, n: int, missing_rate: float = 0.005) -> DataTable:
    """Deterministic synthetic table with plausible weight/height marginals.

    All generated values land inside the box [0, 200] x [0, 250]; a small
    seeded fraction of cells is blanked to exercise the missing-value path.
    """
    if n < 1:
        raise DataError("fixture must have at least one row")
    rng = np.random.default_rng(seed)
    height = np.clip(rng.normal(172.0, 10.0, size=n), 150.0, 205.0)
    bmi = np.clip(rng.normal(23.5, 3.5, size=n), 16.0, 40.0)
    weight = np.clip(bmi * (height / 100.0) ** 2, 35.0, 170.0)

    rows = [[str(k + 1), repr(float(w)), repr(float(h))]
            for k, (w, h) in enumerate(zip(weight, height))]
    n_missing = int(round(missing_rate * n))
    if n_missing:
        blanked = rng.choice(n, size=n_missing, replace=False)
        for j, k in enumerate(sorted(blanked)):
            rows[k][1 + (j % 2)] = ""
    return DataTable(columns=["Id", "Weight", "Height"], rows=rows,
                     column_map={"Weight": 1, "Height": 2})


def sanitize_table(table: DataTable, policy: StripPolicy
                   ) -> tuple[DataTable, SanitizationReport]:
    """Apply the policy to every complete row of the table.

    Only the protected coordinate's cells can change; modified cells are
    rendered with round-trip precision.  Returns the sanitized table and the
    run report (epsilon left unset; certify separately).
    """
    if table.dim != policy.dim:
        raise DataError(
            f"column map has dimension {table.dim}, policy has {policy.dim}")
    idx, pts = table.complete_points()
    prog = policy._program
    i = policy.protected_index - 1
    hull = policy.domain_box.hull()

    out_rows = [list(row) for row in table.rows]
    modified = 0
    outside = 0
    max_pert = 0.0

    if idx:
        g = _core.eval_program_many(prog.codes, prog.operands, pts)
        bad = np.nonzero(~np.isfinite(g))[0]
        if bad.size:
            raise DataError(
                f"boundary evaluation produced a non-finite value at data row "
                f"{idx[int(bad[0])] + 1}")
        xi = pts[:, i]
        inside_strip = (g - policy.half_width <= xi) & (xi <= g + policy.half_width)
        in_box = np.all((pts >= [s[0] for s in hull]) & (pts <= [s[1] for s in hull]),
                        axis=1)
        outside = int(np.sum(~in_box))
        target_col = table.coord_columns[i]
        for k, row_index in enumerate(idx):
            if inside_strip[k]:
                value = float(g[k])
                out_rows[row_index][target_col] = repr(value)
                modified += 1
                max_pert = max(max_pert, abs(float(xi[k]) - value))

    report = SanitizationReport(
        rows_total=len(table.rows),
        rows_modified=modified,
        rows_skipped_missing=len(table.rows) - len(idx),
        rows_outside_box=outside,
        max_perturbation=max_pert,
        rho=policy.rho)
    sanitized = DataTable(columns=list(table.columns), rows=out_rows,
                          column_map=dict(table.column_map))
    return sanitized, report
