#!/usr/bin/env python3
"""Self-convergence of Case 1 at t = 2 in d = 3 and d = 5, as CSV and SVG."""
import argparse
from pathlib import Path

from supercrit.cases import make_case
from supercrit.config import SimulationConfig
from supercrit.diagnostics import convergence_study
from supercrit.grid import atomic_write
from supercrit.reference import CONVERGENCE_POINT, DEFAULT_POWER
from supercrit.svg import Curve, PlotSpec, emit_svg

LEVELS = {3: (20 / 2048, 20 / 4096, 20 / 8192), 5: (20 / 1024, 20 / 2048, 20 / 4096)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/convergence"))
    ap.add_argument("--paper", action="store_true", help="use a 2^-12 / 2^-14 reference mesh (slow)")
    args = ap.parse_args()

    curves, lines = [], ["d,dr,dt,l2_error"]
    for d in (3, 5):
        base = SimulationConfig(d=d, p=DEFAULT_POWER[d], r_max=20, dr=20 / 2048, dt=20 / 8192, t_final=2.0)
        ref = (2.0**-12, 2.0**-14) if args.paper else None
        rep = convergence_study(base, make_case(1, d), 2.0, LEVELS[d], reference=ref)
        for lvl in rep.levels:
            lines.append(f"{d},{lvl.dr:.17g},{lvl.dt:.17g},{lvl.l2_error:.17g}")
        curves.append(Curve(f"d = {d}", [l.dr for l in rep.levels], [l.l2_error for l in rep.levels]))
        pub = CONVERGENCE_POINT[d]
        print(f"d={d}: order {rep.order:.3f}, error at dr=0.0098 {rep.error_at(CONVERGENCE_POINT['dr']):.3e} "
              f"(published {pub:.3g})")
    atomic_write(args.out.with_suffix(".csv"), "\n".join(lines) + "\n")
    spec = PlotSpec("Self-convergence at t = 2", "dr", "l2 error", logx=True, logy=True, guide_order=2)
    atomic_write(args.out.with_suffix(".svg"), emit_svg(curves, spec))
    print(f"wrote {args.out.with_suffix('.csv')} and {args.out.with_suffix('.svg')}")


if __name__ == "__main__":
    main()
