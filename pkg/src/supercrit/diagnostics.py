"""Diagnostics series, scaled decay, and the verification studies.

The studies mirror how the scheme is checked: self-convergence against a
fine-mesh run, robustness to the truncation radius, and windowed flatness of
the norms and of the scaled decay quantities.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import os
from typing import Sequence

import numpy as np

from .config import SimulationConfig, critical_exponent
from .energy import discrete_energy
from .grid import RadialField, RadialGrid, SolverState
from .solver import DEFAULT_BACKEND, BlowupError, FirstStep, run
from .spectral import (
    TAIL_TOL,
    ResolutionError,
    WavenumberGrid,
    default_stride,
    lebesgue_norms,
    norms_of_state,
)

log = logging.getLogger(__name__)

COLUMNS = (
    "t",
    "sobolev_u",
    "sobolev_ut",
    "besov_u",
    "besov_ut",
    "lp2",
    "linf",
    "energy",
    "relative_drift",
    "scaled_lp2",
    "scaled_linf",
    "besov_ratio",
)


@dataclass(frozen=True)
class DiagnosticsRow:
    t: float
    sobolev_u: float
    sobolev_ut: float
    besov_u: float
    besov_ut: float
    lp2: float
    linf: float
    energy: float
    relative_drift: float
    scaled_lp2: float
    scaled_linf: float
    besov_ratio: float


@dataclass
class DiagnosticsSeries:
    d: int
    p: float
    rows: list[DiagnosticsRow] = field(default_factory=list)
    # sample times whose spectra were cut off above the tail tolerance
    unresolved: list[float] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    def window(self, t_a: float, t_b: float) -> "DiagnosticsSeries":
        return DiagnosticsSeries(self.d, self.p, [r for r in self.rows if t_a <= r.t <= t_b])

    def at(self, t: float) -> DiagnosticsRow:
        """Row closest to time t."""
        return min(self.rows, key=lambda r: abs(r.t - t))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in self.rows:
            w.writerow([f"{getattr(row, c):.17g}" for c in COLUMNS])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, d: int, p: float) -> "DiagnosticsSeries":
        reader = csv.reader(io.StringIO(text))
        header = tuple(next(reader))
        if header != COLUMNS:
            raise ValueError(f"unexpected series header {header}")
        rows = [DiagnosticsRow(*(float(x) for x in line)) for line in reader if line]
        return cls(d, p, rows)


def scaled_decay(row: DiagnosticsRow, d: int, p: float) -> tuple[float, float]:
    """(1+t)^{(d-1)p/(2(p+2))} ||u||_{p+2} and t^{(d-1)/2} ||u||_inf."""
    e = critical_exponent(d, p)
    if row.t < 0:
        raise ValueError("negative time")
    return (1 + row.t) ** e.lp_decay_exponent * row.lp2, row.t ** e.linf_decay_exponent * row.linf


def besov_sobolev_ratio(row: DiagnosticsRow) -> float:
    num = math.hypot(row.besov_u, row.besov_ut)
    den = math.hypot(row.sobolev_u, row.sobolev_ut)
    if den == 0:
        raise ZeroDivisionError("both Sobolev norms vanish")
    return num / den


class SeriesObserver:
    """Solver observer that turns state triplets into diagnostics rows."""

    def __init__(self, cfg: SimulationConfig, kgrid: WavenumberGrid | None = None,
                 stride: int | None = None, spectral: bool = True, tail_tol: float = TAIL_TOL):
        self.cfg = cfg
        self.kgrid = kgrid or WavenumberGrid.for_grid(RadialGrid.from_config(cfg))
        self.stride = stride
        self.spectral = spectral
        self.tail_tol = tail_tol
        self.exponents = critical_exponent(cfg.d, cfg.p)
        self.series = DiagnosticsSeries(cfg.d, cfg.p)
        self._e0: float | None = None

    def __call__(self, state: SolverState) -> None:
        cfg = self.cfg
        energy = discrete_energy(state, cfg)
        if self._e0 is None:
            self._e0 = energy
        drift = abs(energy - self._e0) / abs(self._e0) if self._e0 else 0.0
        if self.spectral:
            if self.stride is None:
                self.stride = default_stride(state.grid, self.kgrid)
            try:
                ub, vb = norms_of_state(state, cfg, self.exponents, self.kgrid, self.stride, self.tail_tol)
            except ResolutionError as exc:
                if not self.series.unresolved:
                    log.warning("t = %.4g: %s (further samples counted, not logged)", state.t, exc)
                self.series.unresolved.append(state.t)
                ub, vb = norms_of_state(state, cfg, self.exponents, self.kgrid, self.stride, math.inf)
            sob_u, sob_ut, bes_u, bes_ut, lp2, linf = ub.sobolev, vb.sobolev, ub.besov, vb.besov, ub.lp2, ub.linf
        else:
            sob_u = sob_ut = bes_u = bes_ut = math.nan
            lp2, linf = lebesgue_norms(state.u_curr, cfg.d, cfg.p)
        partial = DiagnosticsRow(state.t, sob_u, sob_ut, bes_u, bes_ut, lp2, linf, energy, drift,
                                 0.0, 0.0, math.nan)
        s_lp2, s_linf = scaled_decay(partial, cfg.d, cfg.p)
        ratio = besov_sobolev_ratio(partial) if self.spectral and (sob_u or sob_ut) else math.nan
        self.series.rows.append(DiagnosticsRow(state.t, sob_u, sob_ut, bes_u, bes_ut, lp2, linf, energy,
                                               drift, s_lp2, s_linf, ratio))


def simulate(cfg: SimulationConfig, case=None, first_step_mode: FirstStep | str = FirstStep.PAPER,
             spectral: bool = True, kgrid: WavenumberGrid | None = None, stride: int | None = None,
             tail_tol: float = TAIL_TOL, backend: str = DEFAULT_BACKEND):
    """Run with a diagnostics observer; returns (series, RunResult).

    On blowup the partial series is attached to the raised error.
    """
    from .cases import case_from_config

    case = case or case_from_config(cfg)
    obs = SeriesObserver(cfg, kgrid, stride, spectral, tail_tol)
    try:
        result = run(cfg, case, [obs], first_step_mode=first_step_mode, backend=backend)
    except BlowupError as exc:
        exc.partial = obs.series
        raise
    return obs.series, result


# -- boundedness ---------------------------------------------------------------

@dataclass(frozen=True)
class FluctuationStats:
    mean: float
    max_deviation: float
    relative: float


@dataclass(frozen=True)
class BoundednessReport:
    window: tuple[float, float]
    n_samples: int
    stats: dict
    tolerance: float

    @property
    def bounded(self) -> bool:
        return all(s.relative < self.tolerance for s in self.stats.values())

    @property
    def verdict(self) -> str:
        return "bounded" if self.bounded else "unbounded"


def fluctuation(values: Sequence[float]) -> FluctuationStats:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("empty window")
    mean = float(v.mean())
    dev = float(np.max(np.abs(v - mean)))
    return FluctuationStats(mean, dev, dev / abs(mean) if mean else (0.0 if dev == 0 else math.inf))


def boundedness_verdict(series: DiagnosticsSeries, window: tuple[float, float],
                        columns: Sequence[str] = ("sobolev_u", "sobolev_ut"),
                        tolerance: float = 0.05, min_samples: int = 20) -> BoundednessReport:
    """Relative fluctuation (max |x - mean| / |mean|) of each column in the window."""
    t_a, t_b = window
    sub = series.window(t_a, t_b)
    if not sub.rows:
        raise ValueError(f"no samples in window [{t_a}, {t_b}]")
    if len(sub.rows) < min_samples:
        raise ValueError(f"only {len(sub.rows)} samples in window, need {min_samples}")
    stats = {c: fluctuation(sub.column(c)) for c in columns}
    return BoundednessReport((t_a, t_b), len(sub.rows), stats, tolerance)


# -- convergence -----------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceLevel:
    dr: float
    dt: float
    l2_error: float


@dataclass(frozen=True)
class ConvergenceReport:
    levels: tuple[ConvergenceLevel, ...]
    order: float
    reference: tuple[float, float]
    t_eval: float

    def to_csv(self) -> str:
        lines = ["dr,dt,l2_error"] + [f"{l.dr:.17g},{l.dt:.17g},{l.l2_error:.17g}" for l in self.levels]
        return "\n".join(lines) + "\n"

    def error_at(self, dr: float) -> float:
        return min(self.levels, key=lambda l: abs(l.dr - dr)).l2_error


def fitted_order(drs: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(dr)."""
    x, y = np.log(np.asarray(drs, float)), np.log(np.asarray(errors, float))
    return float(np.polyfit(x, y, 1)[0])


def landing_dt(dr: float, t_eval: float, ratio: float = 0.25) -> float:
    """Time step close to ratio*dr that lands exactly on t_eval."""
    return t_eval / math.ceil(t_eval / (ratio * dr) - 1e-9)


def _final_profile(args):
    cfg, case, mode, backend = args
    res = run(cfg, case, first_step_mode=mode, backend=backend)
    return res.final.u_curr.values


def discrete_l2(e: np.ndarray, dr: float) -> float:
    """sqrt(dr * sum e_j^2): the grid analogue of the L^2(0, r_max) norm."""
    return float(math.sqrt(dr * np.sum(np.square(e))))


def convergence_study(base: SimulationConfig, case, t_eval: float, levels: Sequence[float],
                      reference: tuple[float, float] | None = None,
                      first_step_mode: FirstStep | str = FirstStep.SECOND_ORDER,
                      workers: int | None = None, backend: str = DEFAULT_BACKEND) -> ConvergenceReport:
    """Self-convergence at t_eval against a fine-mesh run of the same scheme.

    Every level uses dt ~ dr/4 (nudged so t_eval is hit exactly); the error is
    the discrete L^2 difference sampled on the coarse nodes. ``reference``
    defaults to 4x finer than the finest level.
    """
    if t_eval <= 0:
        raise ValueError("t_eval must be positive")
    levels = sorted(levels, reverse=True)
    if reference is None:
        dr_ref = levels[-1] / 4
        reference = (dr_ref, landing_dt(dr_ref, t_eval))
    dr_ref, dt_ref = reference
    if dr_ref > min(levels):
        raise ValueError("reference mesh is coarser than a level")
    if abs(t_eval / dt_ref - round(t_eval / dt_ref)) > 1e-6:
        raise ValueError("reference time step does not land on t_eval")

    def cfg_for(dr, dt):
        return base.replace(dr=dr, dt=dt, t_final=t_eval, snapshot_times=())

    jobs = [cfg_for(dr_ref, dt_ref)] + [cfg_for(dr, landing_dt(dr, t_eval)) for dr in levels]
    for c in jobs[1:]:
        ratio = c.dr / dr_ref
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError(f"level dr = {c.dr} is not a multiple of the reference mesh")
    args = [(c, case, FirstStep(first_step_mode), backend) for c in jobs]
    profiles = _map_runs(_final_profile, args, case, workers)

    ref = profiles[0]
    out = []
    for c, prof in zip(jobs[1:], profiles[1:]):
        stride = round(c.dr / dr_ref)
        out.append(ConvergenceLevel(c.dr, c.dt, discrete_l2(prof - ref[::stride], c.dr)))
    out.sort(key=lambda l: l.dr)
    order = fitted_order([l.dr for l in out], [l.l2_error for l in out]) if len(out) > 1 else math.nan
    return ConvergenceReport(tuple(out), order, (dr_ref, dt_ref), t_eval)


def _map_runs(fn, jobs, case, workers):
    """Map over independent runs, in a process pool when that is possible."""
    workers = min(workers or worker_count(), len(jobs))
    if workers > 1 and getattr(case, "origin", None) is None:
        log.info("case has no picklable origin; running %d jobs serially", len(jobs))
        workers = 1
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def worker_count() -> int:
    env = os.environ.get("SUPERCRIT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# -- truncation ------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationRow:
    r_max: float
    t: float
    probes: dict
    max_u: float
    max_abs_u: float


@dataclass(frozen=True)
class TruncationTable:
    rows: tuple[TruncationRow, ...]
    agree_tol: float
    boundary_tol: float
    boundary_probe: float

    def column(self, t: float) -> list[TruncationRow]:
        return [r for r in self.rows if r.t == t]

    @property
    def columns_agree(self) -> bool:
        for t in sorted({r.t for r in self.rows}):
            col = self.column(t)
            base = col[0]
            for other in col[1:]:
                vals = [(base.max_u, other.max_u), (base.max_abs_u, other.max_abs_u)]
                vals += [(base.probes[k], other.probes[k]) for k in base.probes]
                if any(abs(a - b) > self.agree_tol for a, b in vals):
                    return False
        return True

    @property
    def boundary_clean(self) -> bool:
        return all(abs(r.probes[self.boundary_probe]) <= self.boundary_tol for r in self.rows)

    @property
    def truncation_clean(self) -> bool:
        return self.columns_agree and self.boundary_clean

    def to_csv(self) -> str:
        probes = sorted(self.rows[0].probes)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "r_max"] + [f"u(r={p:g})" for p in probes] + ["max_u", "max_abs_u"])
        for r in sorted(self.rows, key=lambda r: (r.t, r.r_max)):
            w.writerow([f"{r.t:g}", f"{r.r_max:g}"] + [f"{r.probes[p]:.17g}" for p in probes]
                       + [f"{r.max_u:.17g}", f"{r.max_abs_u:.17g}"])
        return buf.getvalue()


def _probe(field: RadialField, r: float) -> float:
    j = round(r / field.grid.dr)
    if abs(j * field.grid.dr - r) > 1e-9 * max(1.0, r):
        # off-node probes use linear interpolation
        return float(np.interp(r, field.grid.r, field.values))
    return float(field.values[j])


def _truncation_run(args):
    cfg, case, mode, backend = args
    return cfg.r_max, run(cfg, case, first_step_mode=mode, backend=backend).snapshots


def truncation_study(cfg: SimulationConfig, case, rmax_list: Sequence[float], probe_times: Sequence[float],
                     probe_radii: Sequence[float], agree_tol: float = 1e-6, boundary_tol: float = 1e-8,
                     first_step_mode: FirstStep | str = FirstStep.PAPER, workers: int | None = None,
                     backend: str = DEFAULT_BACKEND) -> TruncationTable:
    """Probe values and maxima for several truncation radii.

    The largest probe radius is the near-boundary probe that must stay at
    zero; the other probes and the maxima must agree across radii.
    """
    if not probe_radii:
        raise ValueError("need at least one probe radius")
    if max(probe_radii) >= min(rmax_list) or min(probe_radii) < 0:
        raise ValueError("probe outside the computational domain")
    if max(probe_times) > cfg.t_final:
        raise ValueError("probe time after t_final")
    jobs = [(cfg.replace(r_max=rm, snapshot_times=tuple(probe_times)), case, FirstStep(first_step_mode), backend)
            for rm in rmax_list]
    results = _map_runs(_truncation_run, jobs, case, workers)
    rows = []
    for rm, snaps in sorted(results, key=lambda x: x[0]):
        for t in sorted(probe_times):
            f = snaps[t]
            rows.append(TruncationRow(rm, t, {r: _probe(f, r) for r in probe_radii},
                                      float(f.values.max()), float(np.abs(f.values).max())))
    rows.sort(key=lambda r: (r.t, r.r_max))
    return TruncationTable(tuple(rows), agree_tol, boundary_tol, max(probe_radii))
