"""Shared argument handling for the experiment scripts."""

import argparse
import logging
import os
from pathlib import Path

from risnull.config import parse_config
from risnull.experiments import write_outputs


def parser(description, trials):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    return p


def setup(args, command, extra=()):
    logging.basicConfig(level="INFO", format="%(levelname)s %(name)s: %(message)s")
    overrides = [*extra, f"sweep.trials={args.trials}", f"sweep.base_seed={args.seed}", *args.overrides]
    return parse_config(None, overrides, command=command)


def finish(result, cfg, command, out, traces=False):
    result.config = {"command": command, **cfg.to_dict()}
    write_outputs(result, out, per_trial=True, traces=traces)


def table(rows, cols):
    print("  ".join(f"{c:>14}" for c in cols))
    for r in rows:
        print("  ".join(f"{r[c]:>14.4g}" if isinstance(r[c], float) else f"{str(r[c]):>14}" for c in cols))
