"""Run the desk-scale sweep (3 filters x 2 scenarios) and print a summary table.

    python scripts/run_acceptance_sweep.py --trials 20 --workers 4

Artifacts land in results/acceptance/<scenario>_<filter>/.
"""

import argparse
import dataclasses
import os
import time
from pathlib import Path

from mdglmb.harness import load_config, run_experiment, write_outputs

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--scans", type=int, default=200)
    ap.add_argument("--workers", type=int, default=min(4, os.cpu_count() or 1))
    ap.add_argument("--scenarios", nargs="+", default=["radar1", "toa3"])
    ap.add_argument("--filters", nargs="+", default=["mdglmb", "dglmb", "lmb"])
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "acceptance")
    args = ap.parse_args()

    t0 = time.perf_counter()
    print(f"{'scenario':8} {'filter':7} {'ospa':>7} {'loc':>7} {'card':>7} {'n err':>6} {'hyps':>7} {'s':>6}")
    for scen in args.scenarios:
        base = load_config(ROOT / "configs" / f"{scen}.json")
        for name in args.filters:
            cfg = dataclasses.replace(
                base, filter=name, trials=args.trials, n_scans=args.scans, workers=args.workers
            )
            res = run_experiment(cfg)
            write_outputs(res, args.out / f"{scen}_{name}")
            a = res.summary()["aggregates"][name]
            print(
                f"{scen:8} {name:7} {a['mean_ospa']:7.1f} {a['mean_ospa_loc']:7.1f} {a['mean_ospa_card']:7.1f} "
                f"{a['mean_est_n_40_160'] - a['mean_true_n_40_160']:+6.2f} {a['mean_hyp_count']:7.1f} "
                f"{res.runtime_s:6.0f}",
                flush=True,
            )
    print(f"total {time.perf_counter() - t0:.0f}s")


if __name__ == "__main__":
    main()
