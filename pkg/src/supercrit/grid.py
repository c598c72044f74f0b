"""Uniform radial grid, sampled fields and the three-level solver state."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

# boundary samples below this are treated as truncation-clean and zeroed
BOUNDARY_ZERO_TOL = 1e-14


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    dr: float
    n_cells: int

    @property
    def n_points(self) -> int:
        return self.n_cells + 1

    @property
    def r_max(self) -> float:
        return self.n_cells * self.dr

    @cached_property
    def r(self) -> np.ndarray:
        r = np.arange(self.n_points) * self.dr
        r.flags.writeable = False
        return r

    @classmethod
    def from_config(cls, cfg) -> "RadialGrid":
        return cls(dr=cfg.dr, n_cells=cfg.n_cells)


@dataclass(frozen=True, eq=False)
class RadialField:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.grid.n_points,):
            raise GridError(f"expected {self.grid.n_points} values, got shape {self.values.shape}")

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.values.copy())

    def __neg__(self) -> "RadialField":
        return RadialField(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class SolverState:
    """Levels n-1 and n, plus n+1 once it has been computed.

    ``u_next`` is ``None`` right after a step; diagnostics that need the
    centred time difference (energy, velocity norms) require it.
    """

    u_prev: RadialField
    u_curr: RadialField
    n: int
    dt: float
    u_next: RadialField | None = None

    def __post_init__(self) -> None:
        g = self.u_curr.grid
        others = [self.u_prev] + ([self.u_next] if self.u_next is not None else [])
        if any(f.grid != g for f in others):
            raise GridError("state levels live on different grids")

    @property
    def grid(self) -> RadialGrid:
        return self.u_curr.grid

    @property
    def t(self) -> float:
        return self.n * self.dt

    def velocity(self) -> np.ndarray:
        """Centred time difference (U^{n+1} - U^{n-1}) / (2 dt)."""
        if self.u_next is None:
            raise GridError("velocity needs level n+1")
        return (self.u_next.values - self.u_prev.values) / (2 * self.dt)


def sample(analytic: Callable[[np.ndarray], np.ndarray], grid: RadialGrid) -> RadialField:
    """Evaluate ``analytic`` on the grid nodes.

    The function must handle r = 0 itself (the case library supplies closed
    forms with the analytic limit). The last node is set to zero if the sample
    there is negligible; anything larger means the domain is too small.
    """
    values = np.asarray(analytic(grid.r), dtype=float)
    if values.shape == ():
        values = np.full(grid.n_points, float(values))
    else:
        values = values.copy()
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise GridError(f"non-finite sample at r = {grid.r[bad]}")
    if abs(values[-1]) >= BOUNDARY_ZERO_TOL:
        raise GridError(
            f"|u(r_max)| = {abs(values[-1]):.3g} is not negligible; "
            "the Dirichlet truncation would be wrong"
        )
    values[-1] = 0.0
    return RadialField(grid, values)


def linf_of_field(f: RadialField) -> float:
    return float(np.max(np.abs(f.values)))


def snapshot_csv(f: RadialField, stride: int = 1) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "u"])
    for r, u in zip(f.grid.r[::stride], f.values[::stride]):
        w.writerow([f"{r:.17g}", f"{u:.17g}"])
    return buf.getvalue()


def read_snapshot_csv(text: str) -> tuple[np.ndarray, np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    if rows[0] != ["r", "u"]:
        raise GridError(f"unexpected snapshot header {rows[0]}")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    return data[:, 0], data[:, 1]


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
