"""Discrete energy of a state triplet and its drift over a run.

The energy follows the scheme's own radial convention: a plain integral
against r^(d-1) dr with no surface-area factor of the unit sphere. The
spectral and Lebesgue norms elsewhere in the package do include that factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .config import SimulationConfig
from .grid import SolverState


@dataclass(frozen=True)
class EnergyRecord:
    t: float
    energy: float
    relative_drift: float


def discrete_energy(state: SolverState, cfg: SimulationConfig) -> float:
    """E^n with centred differences in t and r; U_{N+1} is taken as 0."""
    if state.n < 1 or state.u_next is None:
        raise ValueError("discrete energy needs levels n-1, n, n+1 with n >= 1")
    u = state.u_curr.values
    r = state.grid.r
    kinetic = ((state.u_next.values[1:] - state.u_prev.values[1:]) / (2 * cfg.dt)) ** 2
    right = np.append(u[2:], 0.0)
    gradient = ((right - u[:-1]) / (2 * cfg.dr)) ** 2
    potential = (2 * cfg.mu / (cfg.p + 2)) * np.abs(u[1:]) ** (cfg.p + 2)
    density = (kinetic + gradient + potential) * r[1:] ** (cfg.d - 1)
    return float(cfg.dr / 2 * np.sum(density))


def energy_drift(series: Sequence[EnergyRecord]) -> float:
    """Largest |E(t) - E(0)| / |E(0)| over the records."""
    if not series:
        raise ValueError("empty energy series")
    e0 = series[0].energy
    if e0 == 0:
        raise ValueError("E(0) = 0; relative drift undefined")
    return max(abs(rec.energy - e0) / abs(e0) for rec in series)


def records_from(times, energies) -> list[EnergyRecord]:
    e0 = energies[0]
    return [EnergyRecord(float(t), float(e), abs(e - e0) / abs(e0) if e0 else 0.0) for t, e in zip(times, energies)]


def initial_energy_integral(case, d: int, p: float, mu: float = 1.0, r_max: float = 20.0) -> float:
    """Continuous energy of the initial data by adaptive quadrature.

    Same radial convention as :func:`discrete_energy`.
    """
    du0 = case.du0
    if du0 is None:
        raise ValueError("case has no closed-form derivative")

    def density(r):
        ra = np.array([r])
        u0 = case.u0(ra)[0]
        return (0.5 * case.u1(ra)[0] ** 2 + 0.5 * du0(ra)[0] ** 2 + mu / (p + 2) * abs(u0) ** (p + 2)) * r ** (d - 1)

    # the profiles are Gaussian-type; split where they still oscillate
    pieces = [(0.0, 2.0), (2.0, 5.0), (5.0, r_max)]
    return float(sum(integrate.quad(density, a, b, limit=200, epsabs=0, epsrel=1e-12)[0] for a, b in pieces))
