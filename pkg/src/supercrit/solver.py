"""Explicit three-level finite-difference integrator for the radial NLW.

Interior nodes use the flux-form stencil with weights ((r_j +- dr/2)/r_j)^(d-1);
the origin uses the ghost value U_{-1} = U_1, which turns the Laplacian into
2d (U_1 - U_0)/dr^2. The last node is held at zero.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .config import SimulationConfig
from .grid import GridError, RadialField, RadialGrid, SolverState, sample

log = logging.getLogger(__name__)

BLOWUP_THRESHOLD = 1e12

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


class BlowupError(RuntimeError):
    """The solution became non-finite or exceeded the blowup threshold.

    ``t`` is the time of the first bad level; ``partial`` is filled in by
    whoever assembled diagnostics before the failure.
    """

    def __init__(self, t: float, n: int, partial=None):
        super().__init__(f"solution blew up at t = {t:.6g} (step {n})")
        self.t = t
        self.n = n
        self.partial = partial


class FirstStep(str, enum.Enum):
    PAPER = "paper"  # U^1 = U^0 + dt u1
    SECOND_ORDER = "second"  # adds dt^2/2 (Lap U^0 - mu |U^0|^p U^0)


@dataclass(frozen=True, eq=False)
class StencilCoefficients:
    """Precomputed radial weights; index 0 is unused (origin has its own rule)."""

    eta_plus: np.ndarray
    eta_minus: np.ndarray
    origin_factor: float
    dr: float
    d: int

    @classmethod
    def build(cls, grid: RadialGrid, d: int) -> "StencilCoefficients":
        r = grid.r
        ep = np.zeros(grid.n_points)
        em = np.zeros(grid.n_points)
        h = grid.dr
        ep[1:] = ((r[1:] + h / 2) / r[1:]) ** (d - 1)
        em[1:] = ((r[1:] - h / 2) / r[1:]) ** (d - 1)
        return cls(ep, em, 2 * d / h**2, h, d)


def _nonlinear_power(p: float):
    # integral powers take numba's repeated-multiplication path (much faster
    # than pow) and are exact to the same rounding in numpy
    return int(p) if float(p).is_integer() else float(p)


def laplacian(u: np.ndarray, coeffs: StencilCoefficients) -> np.ndarray:
    """Discrete radial Laplacian; zero at the Dirichlet node."""
    out = np.zeros_like(u)
    inv = 1.0 / coeffs.dr**2
    out[0] = coeffs.origin_factor * (u[1] - u[0])
    ep, em = coeffs.eta_plus[1:-1], coeffs.eta_minus[1:-1]
    out[1:-1] = (ep * (u[2:] - u[1:-1]) + em * (u[:-2] - u[1:-1])) * inv
    return out


def _advance_numpy(up, uc, un, ap, am, lam2, c0, dt2mu, p, nsteps):
    """Reference kernel; same arithmetic as the compiled one, vectorised."""
    a, b = ap[1:-1], am[1:-1]
    done = 0
    for _ in range(nsteps):
        x = uc
        un[0] = 2.0 * x[0] - up[0] + lam2 * c0 * (x[1] - x[0]) - dt2mu * np.abs(x[0]) ** p * x[0]
        xi = x[1:-1]
        un[1:-1] = (
            2.0 * xi
            - up[1:-1]
            + lam2 * (a * (x[2:] - xi) + b * (x[:-2] - xi))
            - dt2mu * np.abs(xi) ** p * xi
        )
        un[-1] = 0.0
        up, uc, un = uc, un, up
        done += 1
        if not np.all(np.abs(uc) <= BLOWUP_THRESHOLD):
            return up, uc, un, done, True
    return up, uc, un, done, False


if numba is not None:

    @numba.njit(cache=True)
    def _advance_numba(up, uc, un, ap, am, lam2, c0, dt2mu, p, nsteps):
        n = uc.size - 1
        for s in range(nsteps):
            bad = False
            x = uc[0]
            v = 2.0 * x - up[0] + lam2 * c0 * (uc[1] - x) - dt2mu * abs(x) ** p * x
            un[0] = v
            if not abs(v) <= BLOWUP_THRESHOLD:
                bad = True
            for j in range(1, n):
                x = uc[j]
                v = (
                    2.0 * x
                    - up[j]
                    + lam2 * (ap[j] * (uc[j + 1] - x) + am[j] * (uc[j - 1] - x))
                    - dt2mu * abs(x) ** p * x
                )
                un[j] = v
                if not abs(v) <= BLOWUP_THRESHOLD:
                    bad = True
            un[n] = 0.0
            up, uc, un = uc, un, up
            if bad:
                return up, uc, un, s + 1, True
        return up, uc, un, nsteps, False

    DEFAULT_BACKEND = "numba"
else:  # pragma: no cover
    _advance_numba = None
    DEFAULT_BACKEND = "numpy"


def _kernel(backend: str):
    if backend == "numba":
        if _advance_numba is None:
            raise RuntimeError("numba backend requested but numba is not installed")
        return _advance_numba
    if backend == "numpy":
        return _advance_numpy
    raise ValueError(f"unknown backend {backend!r}")


def first_step(
    u0: RadialField,
    u1: RadialField,
    cfg: SimulationConfig,
    mode: FirstStep | str = FirstStep.PAPER,
    coeffs: StencilCoefficients | None = None,
) -> SolverState:
    mode = FirstStep(mode)
    if u0.grid != u1.grid or u0.grid.n_cells != cfg.n_cells or u0.grid.dr != cfg.dr:
        raise GridError("initial fields do not live on the configured grid")
    if u0.values[-1] != 0.0:
        raise GridError("u0 must vanish at r_max")
    dt = cfg.dt
    v1 = u0.values + dt * u1.values
    if mode is FirstStep.SECOND_ORDER:
        coeffs = coeffs or StencilCoefficients.build(u0.grid, cfg.d)
        x = u0.values
        v1 = v1 + 0.5 * dt**2 * (laplacian(x, coeffs) - cfg.mu * np.abs(x) ** _nonlinear_power(cfg.p) * x)
    v1[-1] = 0.0
    return SolverState(u_prev=u0.copy(), u_curr=RadialField(u0.grid, v1), n=1, dt=dt)


def _advance(state_arrays, coeffs, cfg, nsteps, backend):
    up, uc, un = state_arrays
    lam2 = cfg.dt**2 / cfg.dr**2
    return _kernel(backend)(
        up, uc, un, coeffs.eta_plus, coeffs.eta_minus, lam2, 2.0 * cfg.d,
        cfg.dt**2 * cfg.mu, _nonlinear_power(cfg.p), nsteps,
    )


def step(
    state: SolverState,
    coeffs: StencilCoefficients,
    cfg: SimulationConfig,
    backend: str = DEFAULT_BACKEND,
) -> SolverState:
    """Advance one level. Returns a fresh state; the input is untouched."""
    if state.n < 1:
        raise ValueError("step needs two completed levels (n >= 1)")
    up = state.u_prev.values.copy()
    uc = state.u_curr.values.copy()
    un = np.empty_like(uc)
    up, uc, un, _, bad = _advance((up, uc, un), coeffs, cfg, 1, backend)
    if bad:
        raise BlowupError((state.n + 1) * cfg.dt, state.n + 1)
    g = state.grid
    return SolverState(u_prev=RadialField(g, up), u_curr=RadialField(g, uc), n=state.n + 1, dt=cfg.dt)


def step_backward(state: SolverState, coeffs, cfg, nsteps: int, backend: str = DEFAULT_BACKEND):
    """Run the scheme in reverse by swapping the two levels and stepping.

    Returns ``(U^m, U^{m+1})`` with ``m = n - 1 - nsteps``.
    """
    up = state.u_curr.values.copy()
    uc = state.u_prev.values.copy()
    un = np.empty_like(uc)
    up, uc, un, _, bad = _advance((up, uc, un), coeffs, cfg, nsteps, backend)
    if bad:
        raise BlowupError(state.t, state.n)
    g = state.grid
    return RadialField(g, uc), RadialField(g, up)


def diagnostic_levels(cfg: SimulationConfig) -> list[int]:
    """Time indices at which observers fire: n = 1, then every diag_interval."""
    n_final = cfg.n_steps
    out = {1}
    k = 1
    while True:
        n = round(k * cfg.diag_interval / cfg.dt)
        if n > n_final:
            break
        out.add(n)
        k += 1
    return sorted(n for n in out if 1 <= n <= n_final)


@dataclass
class RunResult:
    snapshots: dict[float, RadialField]
    final: SolverState
    wall_time: float = 0.0
    diag_levels: list[int] = field(default_factory=list)


Observer = Callable[[SolverState], None]


def run(
    cfg: SimulationConfig,
    case,
    observers: Iterable[Observer] = (),
    first_step_mode: FirstStep | str = FirstStep.PAPER,
    snapshot_times: Iterable[float] | None = None,
    diag_levels: Iterable[int] | None = None,
    backend: str = DEFAULT_BACKEND,
) -> RunResult:
    """Integrate from t = 0 to t_final.

    Observers are called with a full state triplet (levels n-1, n, n+1) at
    every diagnostic level. The arrays are views into the solver's buffers and
    are only valid during the call. Snapshots are copies, keyed by the
    requested time.
    """
    import time

    t_start = time.perf_counter()
    observers = list(observers)
    grid = RadialGrid.from_config(cfg)
    coeffs = StencilCoefficients.build(grid, cfg.d)
    u0 = sample(case.u0, grid)
    u1 = sample(case.u1, grid)
    st = first_step(u0, u1, cfg, first_step_mode, coeffs)

    n_final = cfg.n_steps
    times = cfg.snapshot_times if snapshot_times is None else tuple(snapshot_times)
    levels = diagnostic_levels(cfg) if diag_levels is None else sorted(set(diag_levels))
    if observers and levels and levels[0] < 1:
        raise ValueError("diagnostic levels must be >= 1")

    # (level that must exist, order, kind, payload)
    events = [(n + 1, 1, "diag", n) for n in levels] if observers else []
    for t in times:
        events.append((round(t / cfg.dt), 0, "snap", t))
    events.append((n_final, 2, "end", None))
    events.sort(key=lambda e: (e[0], e[1]))

    snapshots: dict[float, RadialField] = {}
    a = st.u_prev.values.copy()  # level current-1
    b = st.u_curr.values.copy()  # level current
    c = np.zeros_like(b)  # scratch; holds level current-2 once current >= 2
    current = 1

    def view(arr):
        v = arr.view()
        v.flags.writeable = False
        return RadialField(grid, v)

    for need, _, kind, payload in events:
        if need > current:
            a, b, c, done, bad = _advance((a, b, c), coeffs, cfg, need - current, backend)
            current += done
            if bad:
                raise BlowupError(current * cfg.dt, current)
        if kind == "snap":
            if need == current:
                snapshots[payload] = RadialField(grid, b.copy())
            elif need == current - 1:
                snapshots[payload] = RadialField(grid, a.copy())
            else:
                snapshots[payload] = RadialField(grid, u0.values.copy())
        elif kind == "diag":
            n = payload
            s = SolverState(u_prev=view(c), u_curr=view(a), u_next=view(b), n=n, dt=cfg.dt)
            if current != n + 1:
                raise AssertionError("diagnostic level bookkeeping is off")
            for obs in observers:
                obs(s)

    # a diagnostic at n_final needs level n_final + 1; report level n_final regardless
    lo, hi = (c, a) if current == n_final + 1 else (a, b)
    final = SolverState(
        u_prev=RadialField(grid, lo.copy()), u_curr=RadialField(grid, hi.copy()), n=n_final, dt=cfg.dt
    )
    return RunResult(snapshots, final, time.perf_counter() - t_start, levels)
