#!/usr/bin/env python3
"""Initial energy and maximal relative drift for all library cases.

E(0) is reported three ways: discrete (as the solver sees it), by adaptive
quadrature of the continuous data, and the published value.
"""
import argparse
import time

from supercrit.cases import make_case
from supercrit.config import CaseId, SimulationConfig
from supercrit.diagnostics import simulate
from supercrit.energy import initial_energy_integral
from supercrit.reference import DEFAULT_POWER, DESK_RESOLUTION, ENERGY_TABLE, PAPER_RESOLUTION


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", choices=["paper", "desk"], default="desk")
    ap.add_argument("--dims", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--cases", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    ap.add_argument("--tfinal", type=float, help="shorter horizon for a quick look")
    args = ap.parse_args()

    res = dict(PAPER_RESOLUTION if args.budget == "paper" else DESK_RESOLUTION)
    if args.tfinal:
        res["t_final"] = args.tfinal
    print(f"{'d':>2} {'case':>4} {'E0 discrete':>14} {'E0 quad':>14} {'E0 ref':>10} "
          f"{'drift':>11} {'drift ref':>11} {'sec':>6}")
    for d in args.dims:
        for n in args.cases:
            cfg = SimulationConfig(d=d, p=DEFAULT_POWER[d], case_id=CaseId.from_number(n), diag_interval=0.01, **res)
            case = make_case(n, d)
            t0 = time.perf_counter()
            series, _ = simulate(cfg, case, spectral=False)
            wall = time.perf_counter() - t0
            quad = initial_energy_integral(case, d, cfg.p, cfg.mu, cfg.r_max)
            e_ref, drift_ref = ENERGY_TABLE[(n, d)]
            print(f"{d:2d} {n:4d} {series.rows[0].energy:14.6f} {quad:14.6f} {e_ref:10g} "
                  f"{series.column('relative_drift').max():11.4e} {drift_ref:11.4e} {wall:6.1f}", flush=True)


if __name__ == "__main__":
    main()
