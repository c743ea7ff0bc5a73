"""Experiment records and their append-only CSV store.

One record per (loss weight, levels, seed) run. Appends write the whole line
in a single flushed system call so concurrent runs from separate processes
cannot interleave partial rows; resuming a sweep just skips keys that already
have a row.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from pathlib import Path

CSV_COLUMNS = ("lambda", "L", "rate_bits", "mse_train", "nll_train",
               "mse_test", "nll_test", "acc_test", "seed")


@dataclass(frozen=True)
class ExperimentRecord:
    lam: float
    levels: int
    rate_bits: float
    mse_train: float
    nll_train: float
    mse_test: float
    nll_test: float
    acc_test: float
    epochs: int
    seed: int

    def __post_init__(self):
        expected = 3 * math.log2(self.levels)
        if abs(self.rate_bits - expected) > 1e-9:
            raise ValueError(f"rate_bits {self.rate_bits} != 3*log2({self.levels})")
        for name in ("mse_train", "nll_train", "mse_test", "nll_test"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def csv_row(self) -> list[str]:
        return [repr(float(self.lam)), str(self.levels), repr(float(self.rate_bits)),
                repr(float(self.mse_train)), repr(float(self.nll_train)),
                repr(float(self.mse_test)), repr(float(self.nll_test)),
                repr(float(self.acc_test)), str(self.seed)]

    @property
    def key(self) -> tuple:
        return (float(self.lam), int(self.levels), int(self.seed))


def append_record(path, record: ExperimentRecord) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if not path.exists():
        writer.writerow(CSV_COLUMNS)
    writer.writerow(record.csv_row())
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)
    try:
        os.write(fd, buf.getvalue().encode())
        os.fsync(fd)
    finally:
        os.close(fd)


def load_records(path, epochs: int = 30) -> list[ExperimentRecord]:
    path = Path(path)
    if not path.exists():
        return []
    with open(path) as fh:
        rows = list(csv.reader(fh))
    if not rows:
        return []
    if tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected records header {rows[0]!r}")
    records = []
    for row in rows[1:]:
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"{path}: malformed row {row!r}")
        records.append(ExperimentRecord(
            lam=float(row[0]), levels=int(row[1]), rate_bits=float(row[2]),
            mse_train=float(row[3]), nll_train=float(row[4]),
            mse_test=float(row[5]), nll_test=float(row[6]),
            acc_test=float(row[7]), epochs=epochs, seed=int(row[8])))
    return records


def existing_keys(path) -> set:
    return {rec.key for rec in load_records(path)}
