"""Print a per-scan trace of one trial: cardinality, OSPA and hypothesis counts.

    python scripts/trace_trial.py configs/toa3.json --filter dglmb --trial 0 --every 5
"""

import argparse
import dataclasses

from mdglmb.harness import load_config, run_trial
from mdglmb.scenario import generate_truth


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--filter", choices=["mdglmb", "dglmb", "lmb"])
    ap.add_argument("--trial", type=int, default=0)
    ap.add_argument("--every", type=int, default=1)
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.filter:
        cfg = dataclasses.replace(cfg, filter=args.filter)
    truth = generate_truth(cfg.scenario_config(), cfg.seed)
    res = run_trial(cfg, truth, args.trial)
    if res.failed:
        raise SystemExit(res.error)
    print("scan true est ospa loc card hyps predicted ms")
    for k, row in enumerate(res.rows()):
        if k % args.every == 0:
            _, t, e, o, l, c, h, p = row
            print(f"{k:4d} {t:4d} {e:3d} {o:6.1f} {l:6.1f} {c:6.1f} {h:5d} {p:5d} {res.wall_ms[k]:7.1f}")
    print(f"mean ospa {res.ospa[:, 0].mean():.1f}, total {res.wall_ms.sum() / 1e3:.1f}s")


if __name__ == "__main__":
    main()
