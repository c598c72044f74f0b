#!/usr/bin/env python3
"""Run every library case in d = 3 and d = 5 and tabulate the long-time checks.

For each run: Sobolev flatness on [10, 15], u / u_t agreement at 15, scaled
decay fluctuation, the Besov-to-Sobolev ratio at 15 relative to 0, and the
maximal energy drift. Desk resolution takes about 20 s per run.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor

from supercrit.config import CaseId, SimulationConfig
from supercrit.diagnostics import fluctuation, simulate, worker_count
from supercrit.reference import DEFAULT_POWER, DESK_RESOLUTION


def one(job):
    n, d, dr = job
    res = dict(DESK_RESOLUTION, dr=dr, dt=dr / 4)
    cfg = SimulationConfig(d=d, p=DEFAULT_POWER[d], case_id=CaseId.from_number(n), **res)
    s, _ = simulate(cfg)
    w = s.window(10.0, 15.0)
    r15 = s.at(15.0)
    return dict(
        d=d, case=n,
        sob=max(fluctuation(w.column(c)).relative for c in ("sobolev_u", "sobolev_ut")),
        agree=abs(r15.sobolev_u - r15.sobolev_ut) / max(r15.sobolev_u, r15.sobolev_ut),
        lp=fluctuation(w.column("scaled_lp2")).relative,
        linf=fluctuation(w.column("scaled_linf")).relative,
        ratio=r15.besov_ratio / s.rows[0].besov_ratio,
        drift=s.column("relative_drift").max(),
        unresolved=len(s.unresolved),
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dr", type=float, default=DESK_RESOLUTION["dr"])
    args = ap.parse_args()
    jobs = [(n, d, args.dr) for d in (3, 5) for n in range(1, 6)]
    with ProcessPoolExecutor(max(1, worker_count())) as ex:
        rows = list(ex.map(one, jobs))
    print(f"{'d':>2} {'case':>4} {'sob fl':>8} {'agree':>8} {'Lp fl':>7} {'Linf fl':>7} "
          f"{'ratio':>6} {'drift':>9} {'unres':>5}")
    for r in rows:
        print(f"{r['d']:2d} {r['case']:4d} {r['sob']:8.2e} {r['agree']:8.2e} {r['lp']:7.3f} {r['linf']:7.3f} "
              f"{r['ratio']:6.3f} {r['drift']:9.2e} {r['unresolved']:5d}")
    print("targets: sob fl < 0.05, agree < 0.05, Lp/Linf fl < 0.1, ratio < 0.8")


if __name__ == "__main__":
    main()
