"""Dimensionless datasets: positive-valued tables of (Pi, Pi_1..Pi_l) rows
with cached natural logarithms and a retained/scaling column partition.

CSV format: one header row naming the columns (first column is the target
Pi), '#'-prefixed comment lines ignored. The partition is not stored in
the file; it is supplied by whoever loads the data.
"""

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDataset, IdentifiabilityError, ParseError, SimlawError

logger = logging.getLogger(__name__)

# Rows with any entry at or below this are rejected at ingestion: the
# learner works on logarithms.
POSITIVITY_FLOOR = 1e-12


@dataclass(frozen=True)
class DimensionlessDataset:
    columns: tuple
    values: np.ndarray
    logs: np.ndarray = field(repr=False)
    n_retained: int
    n_rejected: int = 0

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def n_quantities(self):
        """Number of dimensionless arguments l (excludes the target column)."""
        return self.values.shape[1] - 1

    @property
    def n_scaling(self):
        return self.n_quantities - self.n_retained

    @property
    def log_target(self):
        return self.logs[:, 0]

    @property
    def log_retained(self):
        return self.logs[:, 1 : 1 + self.n_retained]

    @property
    def log_scaling(self):
        return self.logs[:, 1 + self.n_retained :]

    def with_partition(self, n_retained):
        return make_dataset(self.columns, self.values, n_retained)


def make_dataset(columns, values, n_retained, already_filtered=False):
    """Validate and assemble a dataset; filters non-positive rows.

    Raises EmptyDataset when nothing survives and IdentifiabilityError when
    a scaling column is constant (its exponent would be unidentifiable).
    """
    columns = tuple(columns)
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] != len(columns):
        raise SimlawError(
            f"values must be rows of {len(columns)} entries, got shape {values.shape}"
        )
    l = len(columns) - 1
    if l < 1:
        raise SimlawError("need the target column plus at least one argument column")
    n_retained = int(n_retained)
    if not 0 <= n_retained < l:
        raise SimlawError(f"n_retained must be in [0, {l}), got {n_retained}")

    n_rejected = 0
    if not already_filtered:
        keep = np.all(np.isfinite(values), axis=1) & np.all(values > POSITIVITY_FLOOR, axis=1)
        n_rejected = int(values.shape[0] - keep.sum())
        if n_rejected:
            logger.info("rejected %d non-positive rows at ingestion", n_rejected)
        values = values[keep]
    if values.shape[0] == 0:
        raise EmptyDataset("no rows left after positivity filtering")

    for j in range(1 + n_retained, 1 + l):
        if np.unique(values[:, j]).size < 2:
            raise IdentifiabilityError(
                f"scaling column {columns[j]!r} is constant; its similarity "
                "exponent cannot be identified"
            )

    values = np.ascontiguousarray(values)
    values.flags.writeable = False
    logs = np.log(values)
    logs.flags.writeable = False
    return DimensionlessDataset(columns, values, logs, n_retained, n_rejected)


def read_table(path):
    """Read a CSV table: (column names, float array). '#' lines ignored."""
    columns = None
    rows = []
    with open(path, newline="") as handle:
        for lineno, record in enumerate(csv.reader(handle), start=1):
            if not record or (record[0].lstrip().startswith("#")):
                continue
            if columns is None:
                columns = tuple(name.strip() for name in record)
                continue
            if len(record) != len(columns):
                raise ParseError(
                    f"line {lineno}: expected {len(columns)} fields, got {len(record)}",
                    line=lineno,
                )
            try:
                rows.append([float(x) for x in record])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}", line=lineno) from exc
    if columns is None:
        raise ParseError("file has no header row", line=0)
    if not rows:
        raise EmptyDataset(f"{path}: no data rows")
    return columns, np.array(rows, dtype=float)


def read_csv(path, n_retained):
    columns, values = read_table(path)
    return make_dataset(columns, values, n_retained)


def write_table(path, columns, values):
    """Write a CSV table with shortest-roundtrip float formatting, so that
    rewriting identical data is byte-identical."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in np.asarray(values):
            writer.writerow([repr(float(x)) for x in row])


def write_csv(dataset, path):
    write_table(path, dataset.columns, dataset.values)
