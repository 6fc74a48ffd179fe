"""Command-line entry point: ``risnull <command> [--config FILE] [--set key=value ...]``.

Every run writes ``results.csv`` and ``summary.json`` to ``--out``; both
carry the resolved configuration and seed. On failure a one-line JSON error
record goes to standard error (and ``error.json`` when the output directory
is usable) and the exit status is nonzero.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .channel import ChannelError, load_fixture
from .config import ConfigError, parse_config
from .experiments import (
    ExperimentResult,
    convergence_trace_experiment,
    direct_path_study,
    min_rate_sweep,
    nulling_sweep,
    phase_transition_grid,
    sum_rate_sweep,
    write_outputs,
)
from .nulling import (
    InfeasibleAffineError,
    NullingProblem,
    alternating_projection,
    eigen_initialize,
    max_isr_db,
    projected_gradient_baseline,
    random_torus_point,
)
from .utility import link_rates, min_rate_subgradient, two_stage_sum_rate

log = logging.getLogger("risnull")

COMMANDS = ("null", "sumrate", "minrate", "phase-transition", "convergence", "direct-study", "solve-one")

EXIT_CODES = {"internal": 1, "config": 2, "solver": 3, "io": 4}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="risnull", description="RIS interference nulling experiments")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="YAML configuration file")
    p.add_argument("--seed", type=int, help="base seed (overrides sweep.base_seed)")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--fixture", type=Path, help="channel fixture for solve-one")
    p.add_argument("--per-trial", action="store_true", help="also write trials.csv")
    p.add_argument("--traces", action="store_true", help="also write trace_<trial>.csv")
    p.add_argument("--log-level", default="INFO")
    return p


def _solve_one(cfg, seed):
    path = cfg.experiment.fixture
    if path is None:
        raise ConfigError("experiment.fixture", "solve-one needs a channel fixture")
    real, _ = load_fixture(path)
    net, sol = cfg.network, cfg.solver
    K, N = real.num_users, real.num_elements
    budget = net.budget(K)
    rng = np.random.default_rng(seed)
    problem = NullingProblem.from_realization(real)
    init = eigen_initialize(real, rng) if sol.init_mode == "eigen" else random_torus_point(N, rng)
    method = cfg.experiment.method
    if method == "ap":
        rep = alternating_projection(problem, init, real, budget.powers, sol.ap_max_iters, sol.isr_threshold_db, rng, sol.isr_weighted)
    elif method == "pgd":
        rep = projected_gradient_baseline(
            problem, init, real, budget.powers, sol.pgd_max_iters, sol.pgd_alpha, sol.pgd_beta, sol.isr_threshold_db, rng, sol.isr_weighted
        )
    elif method == "two-stage":
        rep = two_stage_sum_rate(real, budget, sol.init_mode, rng, sol.ap_max_iters, sol.isr_threshold_db, sol.rcg_max_iters, sol.rcg_tol, problem)
    else:
        rep = min_rate_subgradient(
            real, budget, init, sol.subgradient_max_iters, sol.subgradient_step, sol.subgradient_patience, rng
        )
    rates = link_rates(real, rep.solution, budget)
    isr = max_isr_db(real, rep.solution, budget.powers)
    rows = [{"link": k, "rate_bits": float(r)} for k, r in enumerate(rates)]
    summary = {
        "fixture": str(path),
        "method": method,
        "max_isr_db": isr,
        "rates_bits": rates.tolist(),
        "sum_rate_bits": float(rates.sum()),
        "min_rate_bits": float(rates.min()),
        "report": rep.to_dict(include_traces=False),
    }
    traces = {0: {s.method or f"stage{i}": s for i, s in enumerate(rep.stages or [rep])}}
    return ExperimentResult("solve-one", rows, [], summary, {}, seed, traces)


def _dispatch(command, cfg, seed, jobs):
    net, sol, sweep, ex = cfg.network, cfg.solver, cfg.sweep, cfg.experiment
    if command == "null":
        return nulling_sweep(net, sol, sweep, jobs)
    if command == "sumrate":
        return sum_rate_sweep(net, sol, sweep, jobs)
    if command == "minrate":
        return min_rate_sweep(net, sol, sweep, ex.sides, jobs)
    if command == "phase-transition":
        return phase_transition_grid(net, sol, ex.K_list, ex.N_list, sweep.trials, seed, jobs, net.direct_pathloss_db)
    if command == "convergence":
        return convergence_trace_experiment(net, sol, sweep.trials, ex.methods, ex.trace_threshold_db, seed, jobs)
    if command == "direct-study":
        return direct_path_study(net, sol, net.K, ex.N_list, ex.pathloss_list, sweep.trials, seed, jobs)
    return _solve_one(cfg, seed)


def _emit_error(category, exc, out_dir):
    record = {"error": {"category": category, "type": type(exc).__name__, "message": str(exc)}}
    if isinstance(exc, ConfigError):
        record["error"]["key"] = exc.key
    line = json.dumps(record, sort_keys=True)
    print(line, file=sys.stderr)
    try:
        if out_dir is not None and Path(out_dir).is_dir():
            (Path(out_dir) / "error.json").write_text(line + "\n")
    except OSError:
        pass
    return EXIT_CODES[category]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        stale = args.out / "error.json"
        if stale.exists():
            stale.unlink()
        overrides = list(args.overrides)
        if args.seed is not None:
            overrides.append(f"sweep.base_seed={args.seed}")
        if args.fixture is not None:
            overrides.append(f"experiment.fixture={args.fixture}")
        cfg = parse_config(args.config, overrides, command=args.command)
        seed = cfg.sweep.base_seed
        log.info("running %s (seed %d, %d jobs) -> %s", args.command, seed, args.jobs, args.out)
        result = _dispatch(args.command, cfg, seed, args.jobs)
        result.config = {"command": args.command, **cfg.to_dict()}
        write_outputs(result, args.out, per_trial=args.per_trial, traces=args.traces)
    except (ConfigError, ChannelError) as exc:
        return _emit_error("config", exc, args.out)
    except InfeasibleAffineError as exc:
        return _emit_error("solver", exc, args.out)
    except (OSError, json.JSONDecodeError) as exc:
        return _emit_error("io", exc, args.out)
    except Exception as exc:  # noqa: BLE001 - every failure must leave an error record
        log.exception("unexpected failure")
        return _emit_error("internal", exc, args.out)
    log.info("wrote results to %s", args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
