"""Surfaces of solved operating points: property checks and import/export.

A surface tabulates one solved point per (distortion bound, error bound) grid
cell. The checks verify, report-style, that the tabulated minimum rate is
non-increasing in both bounds and midpoint-convex across sampled cell pairs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._fmt import fmt9, from_jsonable_number, json_dumps

CSV_COLUMNS = ("d_bound", "e_bound", "rate_bits", "distortion", "class_error",
               "lambda_d", "lambda_e", "iterations", "converged")


@dataclass(eq=False)
class RdcSurface:
    """Grid of solved points; points[i][j] matches (d_grid[i], e_grid[j])."""

    d_grid: np.ndarray
    e_grid: np.ndarray
    points: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.d_grid = np.asarray(self.d_grid, dtype=float)
        self.e_grid = np.asarray(self.e_grid, dtype=float)
        if len(self.points) != self.d_grid.size:
            raise ValueError("points row count must match d_grid")
        if any(len(row) != self.e_grid.size for row in self.points):
            raise ValueError("points column count must match e_grid")

    def feasible_cells(self) -> list:
        return [(i, j)
                for i in range(self.d_grid.size)
                for j in range(self.e_grid.size)
                if self.points[i][j].feasible]


def check_monotone(surface: RdcSurface, tol: float = 1e-4) -> dict:
    """Flag adjacent grid pairs where the rate increases by more than tol bits.

    The tabulated rate must be non-increasing along growing distortion bounds
    (fixed error bound) and along growing error bounds (fixed distortion
    bound). Pairs touching an infeasible cell are skipped. An empty violations
    list is a pass.
    """
    violations = []
    checked = skipped = 0
    nd, ne = surface.d_grid.size, surface.e_grid.size
    for axis, pairs in (
        ("d", [((i, j), (i + 1, j)) for i in range(nd - 1) for j in range(ne)]),
        ("e", [((i, j), (i, j + 1)) for i in range(nd) for j in range(ne - 1)]),
    ):
        for (i1, j1), (i2, j2) in pairs:
            a, b = surface.points[i1][j1], surface.points[i2][j2]
            if not (a.feasible and b.feasible):
                skipped += 1
                continue
            checked += 1
            increase = b.rate_bits - a.rate_bits
            if increase > tol:
                violations.append({
                    "axis": axis,
                    "from": [i1, j1],
                    "to": [i2, j2],
                    "rate_from": a.rate_bits,
                    "rate_to": b.rate_bits,
                    "increase": increase,
                })
    return {
        "check": "monotonicity",
        "tol_bits": tol,
        "pairs_checked": checked,
        "pairs_skipped": skipped,
        "violations": violations,
    }


def _grid_index(grid: np.ndarray, value: float) -> int | None:
    for idx, g in enumerate(grid):
        if g == value:
            return idx
        if math.isfinite(g) and math.isfinite(value) and abs(g - value) <= 1e-9 * max(1.0, abs(value)):
            return idx
    return None


def check_convexity(surface: RdcSurface, n_pairs: int = 200, tol: float = 1e-3,
                    seed: int = 0, midpoint_solver=None) -> dict:
    """Midpoint-convexity over sampled pairs of feasible cells.

    For cells a, b the rate at the bound midpoint must not exceed the average
    of their rates by more than tol bits. Midpoints landing on the grid reuse
    the tabulated point; otherwise ``midpoint_solver(d, e) -> point | None``
    solves on demand (None marks an infeasible or unavailable midpoint, and
    the pair is skipped). Sampling is deterministic in ``seed``.
    """
    rng = np.random.default_rng(seed)
    cells = surface.feasible_cells()
    violations = []
    checked = skipped = 0
    if len(cells) >= 2:
        for _ in range(n_pairs):
            ia, ib = rng.integers(len(cells)), rng.integers(len(cells))
            tries = 0
            while ib == ia and tries < 16:
                ib = rng.integers(len(cells))
                tries += 1
            if ia == ib:
                skipped += 1
                continue
            (i1, j1), (i2, j2) = cells[ia], cells[ib]
            a, b = surface.points[i1][j1], surface.points[i2][j2]
            mid_d = 0.5 * (surface.d_grid[i1] + surface.d_grid[i2])
            mid_e = 0.5 * (surface.e_grid[j1] + surface.e_grid[j2])
            gi, gj = _grid_index(surface.d_grid, mid_d), _grid_index(surface.e_grid, mid_e)
            if gi is not None and gj is not None:
                mid = surface.points[gi][gj]
                if not mid.feasible:
                    skipped += 1
                    continue
            elif midpoint_solver is not None:
                mid = midpoint_solver(float(mid_d), float(mid_e))
                if mid is None or not mid.feasible:
                    skipped += 1
                    continue
            else:
                skipped += 1
                continue
            checked += 1
            excess = mid.rate_bits - 0.5 * (a.rate_bits + b.rate_bits)
            if excess > tol:
                violations.append({
                    "a": [int(i1), int(j1)],
                    "b": [int(i2), int(j2)],
                    "mid_d": float(mid_d),
                    "mid_e": float(mid_e),
                    "rate_a": a.rate_bits,
                    "rate_b": b.rate_bits,
                    "rate_mid": mid.rate_bits,
                    "excess": excess,
                })
    return {
        "check": "midpoint-convexity",
        "tol_bits": tol,
        "seed": seed,
        "pairs_checked": checked,
        "pairs_skipped": skipped,
        "violations": violations,
    }


def _csv_text(surface: RdcSurface) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for i, d in enumerate(surface.d_grid):
        for j, e in enumerate(surface.e_grid):
            pt = surface.points[i][j]
            writer.writerow([
                fmt9(d), fmt9(e), fmt9(pt.rate_bits), fmt9(pt.distortion),
                fmt9(pt.class_error), fmt9(pt.lambda_d), fmt9(pt.lambda_e),
                str(int(pt.iterations)), "true" if pt.converged else "false",
            ])
    return buf.getvalue()


def _json_payload(surface: RdcSurface, include_meta: bool) -> dict:
    payload = {
        "d_grid": [float(x) for x in surface.d_grid],
        "e_grid": [float(x) for x in surface.e_grid],
        "points": [[pt.to_dict() for pt in row] for row in surface.points],
    }
    if include_meta and surface.metadata:
        payload["metadata"] = surface.metadata
    return payload


def export_surface(surface: RdcSurface, path, fmt: str | None = None,
                   include_meta: bool = True) -> None:
    """Write a surface as CSV (data only) or JSON (full record structure)."""
    path = str(path)
    if fmt is None:
        fmt = "json" if path.endswith(".json") else "csv"
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown surface format: {fmt!r}")
    text = _csv_text(surface) if fmt == "csv" else json_dumps(_json_payload(surface, include_meta))
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write surface to {path}: {exc}") from exc


def _point_from_fields(fields: dict):
    from .solver import RdcPoint  # deferred: solver imports this module

    return RdcPoint(
        rate_bits=from_jsonable_number(fields["rate_bits"]),
        distortion=from_jsonable_number(fields["distortion"]),
        class_error=from_jsonable_number(fields["class_error"]),
        lambda_d=from_jsonable_number(fields["lambda_d"]),
        lambda_e=from_jsonable_number(fields["lambda_e"]),
        iterations=int(fields["iterations"]),
        converged=fields["converged"] if isinstance(fields["converged"], bool)
        else {"true": True, "false": False}[str(fields["converged"]).lower()],
        channel=None,
    )


def _read_csv(text: str, path: str) -> RdcSurface:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected CSV header")
    d_vals: list[float] = []
    e_vals: list[float] = []
    records = []
    for row in rows[1:]:
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"{path}: malformed CSV row: {row!r}")
        d, e = float(row[0]), float(row[1])
        if not d_vals or d != d_vals[-1]:
            d_vals.append(d)
        if len(d_vals) == 1:
            e_vals.append(e)
        records.append((d, e, dict(zip(CSV_COLUMNS[2:], row[2:]))))
    ne = len(e_vals)
    if ne == 0:
        return RdcSurface(d_grid=np.array([]), e_grid=np.array([]), points=[], metadata={})
    if len(records) != len(d_vals) * ne:
        raise ValueError(f"{path}: rows do not form a complete row-major grid")
    points = []
    for i, d in enumerate(d_vals):
        row_pts = []
        for j, e in enumerate(e_vals):
            rd, re_, fields = records[i * ne + j]
            if rd != d or re_ != e:
                raise ValueError(f"{path}: rows are not in row-major grid order")
            row_pts.append(_point_from_fields(fields))
        points.append(row_pts)
    return RdcSurface(d_grid=np.array(d_vals), e_grid=np.array(e_vals),
                      points=points, metadata={})


def _read_json(text: str, path: str) -> RdcSurface:
    import json

    data = json.loads(text)
    try:
        d_grid = [from_jsonable_number(x) for x in data["d_grid"]]
        e_grid = [from_jsonable_number(x) for x in data["e_grid"]]
        points = [[_point_from_fields(cell) for cell in row] for row in data["points"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed surface JSON: {exc}") from exc
    return RdcSurface(d_grid=np.array(d_grid), e_grid=np.array(e_grid),
                      points=points, metadata=data.get("metadata", {}))


def read_surface(path) -> RdcSurface:
    """Load a surface previously written by export_surface (CSV or JSON)."""
    path = str(path)
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read surface from {path}: {exc}") from exc
    if text.lstrip().startswith("{"):
        return _read_json(text, path)
    return _read_csv(text, path)
