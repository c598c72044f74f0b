"""Run parameters for the radial NLW solver.

A :class:`SimulationConfig` is the single source of truth for a run. It is
validated on construction (stability, integer number of cells, schedule), so a
config that violates the time-step bound never exists.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field, fields

log = logging.getLogger(__name__)

DEFAULT_DIAG_INTERVAL = 0.05


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


class StabilityError(ConfigError):
    """Time step exceeds the explicit-scheme stability bound."""


class CaseId(str, enum.Enum):
    GAUSSIAN = "Gaussian"
    RING = "Ring"
    INCOMING_RING = "IncomingRing"
    OSC_GAUSSIAN = "OscGaussian"
    INCOMING_OSC_GAUSSIAN = "IncomingOscGaussian"
    CUSTOM = "Custom"

    @classmethod
    def from_number(cls, n: int) -> "CaseId":
        """Library cases are numbered 1..5 in the order listed above."""
        library = list(cls)[:5]
        if not 1 <= n <= len(library):
            raise ConfigError(f"case number must be in 1..5, got {n}")
        return library[n - 1]


@dataclass(frozen=True)
class CriticalExponents:
    s_c: float
    s_c_minus_1: float
    lp_decay_exponent: float
    linf_decay_exponent: float


def critical_exponent(d: int, p: float) -> CriticalExponents:
    """Scaling-critical regularity and the linear decay exponents.

    ``s_c = d/2 - 2/p``; the L^{p+2} norm of a linear wave decays like
    ``t^{-(d-1)p/(2(p+2))}`` and the sup norm like ``t^{-(d-1)/2}``.
    """
    if d < 1:
        raise ConfigError(f"dimension must be >= 1, got {d}")
    if not p > 0:
        raise ConfigError(f"nonlinearity power must be positive, got {p}")
    s_c = d / 2 - 2 / p
    return CriticalExponents(
        s_c=s_c,
        s_c_minus_1=s_c - 1,
        lp_decay_exponent=(d - 1) * p / (2 * (p + 2)),
        linf_decay_exponent=(d - 1) / 2,
    )


def stability_limit(d: int, dr: float) -> float:
    """Largest admissible time step for mesh size ``dr``."""
    if d < 2:
        raise ConfigError(f"dimension must be >= 2, got {d}")
    if not dr > 0:
        raise ConfigError(f"mesh size must be positive, got {dr}")
    return dr * math.sqrt(2 ** (d - 1) / (1 + 3 ** (d - 1)))


def _cell_count(r_max: float, dr: float) -> int:
    ratio = r_max / dr
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 1e-9 * max(n, 1):
        raise ConfigError(f"r_max/dr = {ratio!r} is not a positive integer")
    return n


@dataclass(frozen=True)
class SimulationConfig:
    d: int
    p: float
    r_max: float
    dr: float
    dt: float
    t_final: float
    case_id: CaseId = CaseId.GAUSSIAN
    mu: float = 1.0
    diag_interval: float = DEFAULT_DIAG_INTERVAL
    snapshot_times: tuple[float, ...] = ()
    # expression strings, only for case_id == Custom
    u0_expr: str | None = None
    u1_expr: str | None = None
    n_cells: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "case_id", CaseId(self.case_id))
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))
        if int(self.d) != self.d:
            raise ConfigError(f"dimension must be an integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))

        if self.d < 3:
            raise ConfigError(f"dimension must be >= 3, got {self.d}")
        if self.case_id is not CaseId.CUSTOM and self.d not in (3, 5):
            raise ConfigError(f"library cases are defined for d in {{3, 5}}, got {self.d}")
        if not self.p > 0:
            raise ConfigError(f"p must be positive, got {self.p}")
        for name in ("r_max", "dr", "dt", "t_final", "diag_interval"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {v!r}")
        if not math.isfinite(self.mu):
            raise ConfigError("mu must be finite")
        object.__setattr__(self, "n_cells", _cell_count(self.r_max, self.dr))

        limit = stability_limit(self.d, self.dr)
        if self.dt > limit:
            raise StabilityError(
                f"dt = {self.dt:g} exceeds the stability limit {limit:.6g} for d={self.d}, dr={self.dr:g}"
            )
        for t in self.snapshot_times:
            if not 0 <= t <= self.t_final:
                raise ConfigError(f"snapshot time {t} outside [0, {self.t_final}]")

        if self.case_id is CaseId.CUSTOM:
            if not self.u0_expr:
                raise ConfigError("custom case needs a u0 expression")
        elif self.u0_expr is not None or self.u1_expr is not None:
            raise ConfigError("u0/u1 expressions are only accepted for case_id 'Custom'")

        if self.mu < 0:
            log.warning("mu = %g < 0: focusing nonlinearity, solutions may blow up", self.mu)

    @property
    def exponents(self) -> CriticalExponents:
        return critical_exponent(self.d, self.p)

    @property
    def n_steps(self) -> int:
        return round(self.t_final / self.dt)

    def replace(self, **changes) -> "SimulationConfig":
        kw = {f.name: getattr(self, f.name) for f in fields(self) if f.init}
        kw.update(changes)
        return SimulationConfig(**kw)

    def to_dict(self) -> dict:
        out = {
            "d": self.d,
            "p": self.p,
            "mu": self.mu,
            "r_max": self.r_max,
            "dr": self.dr,
            "dt": self.dt,
            "t_final": self.t_final,
            "case_id": self.case_id.value,
            "diag_interval": self.diag_interval,
            "snapshot_times": list(self.snapshot_times),
        }
        if self.case_id is CaseId.CUSTOM:
            out["u0"] = self.u0_expr
            out["u1"] = self.u1_expr
        return out


_REQUIRED = ("d", "p", "r_max", "dr", "dt", "t_final", "case_id")
_OPTIONAL = ("mu", "diag_interval", "snapshot_times", "u0", "u1")


def load_config(text: str) -> SimulationConfig:
    """Parse and validate a JSON configuration document.

    Unknown keys are rejected. ``u0``/``u1`` carry expression strings and are
    only valid together with ``"case_id": "Custom"``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - set(_REQUIRED) - set(_OPTIONAL)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = [k for k in _REQUIRED if k not in doc]
    if missing:
        raise ConfigError(f"missing config keys: {missing}")
    try:
        case_id = CaseId(doc["case_id"])
    except ValueError:
        raise ConfigError(f"unknown case_id {doc['case_id']!r}") from None
    return SimulationConfig(
        d=doc["d"],
        p=float(doc["p"]),
        r_max=float(doc["r_max"]),
        dr=float(doc["dr"]),
        dt=float(doc["dt"]),
        t_final=float(doc["t_final"]),
        case_id=case_id,
        mu=float(doc.get("mu", 1.0)),
        diag_interval=float(doc.get("diag_interval", DEFAULT_DIAG_INTERVAL)),
        snapshot_times=tuple(doc.get("snapshot_times", ())),
        u0_expr=doc.get("u0"),
        u1_expr=doc.get("u1"),
    )


def dump_config(cfg: SimulationConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2)
