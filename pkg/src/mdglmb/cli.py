"""Command-line entry point: ``mdglmb run --config cfg.json [overrides]``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .harness import ConfigError, check_writable, load_config, run_experiment, write_outputs


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mdglmb", description="Labeled RFS multi-target tracking experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a Monte-Carlo experiment from a JSON config")
    run.add_argument("--config", required=True, help="path to the JSON experiment config")
    run.add_argument("--filter", choices=["mdglmb", "dglmb", "lmb"], help="override the filter")
    run.add_argument("--trials", type=int, help="override the number of trials")
    run.add_argument("--seed", type=int, help="override the master seed")
    run.add_argument("--out", help="override the output directory")
    run.add_argument("--workers", type=int, help="override the number of worker processes")
    run.add_argument("--keep-trials", action="store_true", help="also write trial_<t>.csv files")
    return ap


def _fail(kind: str, message: str, code: int, **extra) -> int:
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        overrides = {k: v for k in ("filter", "trials", "seed", "out", "workers") if (v := getattr(args, k)) is not None}
        if args.keep_trials:
            overrides["keep_trials"] = True
        cfg = dataclasses.replace(cfg, **overrides)
    except ConfigError as e:
        return _fail("config", e.message, 2, field=e.path)
    try:
        out = check_writable(cfg.out)
    except OSError as e:
        return _fail("io", f"output directory {cfg.out!r} is not writable: {e.strerror or e}", 3)
    try:
        result = run_experiment(cfg)
        if not result.succeeded:
            return _fail("run", "every trial failed", 4, failed_trials=[t.error for t in result.trials])
        write_outputs(result, out)
    except OSError as e:
        return _fail("io", str(e), 3)
    print(json.dumps({"out": str(out), "trials_ok": len(result.succeeded), "trials_failed": len(result.failed)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
