"""Run the bundled monohull scenario and write its CSV and the six figures."""
import argparse
import logging
from pathlib import Path

from vesseltrack.plots import plot_run
from vesseltrack.scenario_io import load_scenario
from vesseltrack.sim import run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="paper-monohull")
    ap.add_argument("--out", type=Path, default=Path("out/figures"))
    ap.add_argument("--horizon", type=float, help="override the scenario horizon")
    ap.add_argument("--every", type=int, default=10, help="CSV row decimation")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    scenario = load_scenario(args.scenario)
    if args.horizon is not None:
        scenario = scenario.with_overrides(horizon=args.horizon)
    rec = run(scenario)
    args.out.mkdir(parents=True, exist_ok=True)
    rec.to_csv(args.out / f"{scenario.name}.csv", every=args.every)
    for path in plot_run(rec.data, args.out, rec.sp.d):
        print(path)
    print("saturation exit at s =", rec.sat_exit_time)
    for name, value in rec.terminal_errors().items():
        print(f"terminal {name:9s} {value:.6g}")


if __name__ == "__main__":
    main()
