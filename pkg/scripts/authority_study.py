"""Terminal position error as the position-correction gains vary.

The position channel can only push the vessel with authority about
``rho / mu``; this sweeps ``rho`` and ``M`` on the monohull scenario and
tabulates the terminal errors next to that ratio.  Gain sets that violate a
hard constraint show up as rejected rows.
"""
import argparse
import itertools
import logging

from vesseltrack.scenario_io import load_scenario
from vesseltrack.sim import prepare, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--horizon", type=float, default=200.0)
    ap.add_argument("--rho", nargs="+", default=["a1/8", "a1/4", "0.45*a1"])
    ap.add_argument("--M", nargs="+", type=float, default=[0.1, 1.0])
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.ERROR)

    base = load_scenario("paper-monohull").with_overrides(horizon=args.horizon)
    combos = list(itertools.product(args.rho, args.M))
    grid = [{"rho": rho, "gains": {**base.gains, "M": M}} for rho, M in combos]
    res = sweep(base, grid, max_workers=args.workers, keep_records=args.workers == 1)
    print(f"{'rho':>8} {'M':>6} {'rho/mu':>8} {'status':>14} {'|e_xy|':>10} {'|e_uv|':>10}")
    for (rho, M), changes, row, rec in zip(combos, grid, res.rows, res.records):
        try:
            setup = prepare(base.with_overrides(**changes))
            ratio = f"{setup.gains.rho / setup.gains.mu:8.4f}"
        except ValueError:
            ratio = f"{'-':>8}"
        if rec is not None:
            te = rec.terminal_errors()
            errs = f"{te['position']:10.4g} {te['velocity']:10.4g}"
        else:
            errs = f"{row.terminal_error_norm:10.4g} {'':>10}  {row.detail}"
        print(f"{rho:>8} {M:6g} {ratio} {row.status:>14} {errs}")


if __name__ == "__main__":
    main()
