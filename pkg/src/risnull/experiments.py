"""Seeded Monte-Carlo campaigns: nulling grids, convergence traces, rate sweeps.

Every trial draws its randomness from ``trial_seed(base_seed, key, trial,
stream)`` where ``key`` holds only the parameters that change the channel
(K and the array shape). Points that differ only in transmit power or in
direct-path strength therefore reuse the same realizations, which makes
the comparisons across such points paired.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import stats

from .channel import (
    ChannelRealization,
    RisGeometry,
    UserPlacement,
    direct_cascaded_ratio,
    sample_channel,
    sample_direct,
    sample_placement,
)
from .config import ConfigError, NetworkConfig, SolverConfig, SweepSpec, jsonable
from .nulling import (
    NullingProblem,
    alternating_projection,
    alternating_projection_batch,
    eigen_initialize,
    max_isr_db,
    necessary_condition_direct,
    projected_gradient_baseline,
)
from .units import db_to_amplitude
from .utility import link_rates, min_rate_subgradient, rcg_sum_rate

__all__ = [
    "STREAMS",
    "trial_seed",
    "TrialDraw",
    "draw_trial",
    "SweepPoint",
    "sweep_points",
    "ExperimentResult",
    "nulling_sweep",
    "phase_transition_grid",
    "convergence_trace_experiment",
    "sum_rate_sweep",
    "min_rate_sweep",
    "direct_path_study",
    "write_outputs",
]

log = logging.getLogger("risnull")

STREAMS = {"placement": 0, "channel": 1, "init": 2, "direct": 3, "solver": 4}


def trial_seed(base_seed: int, key, trial: int, stream: str) -> np.random.SeedSequence:
    """Independent seed for one (point key, trial, stream) triple."""
    return np.random.SeedSequence(entropy=int(base_seed), spawn_key=(*map(int, key), int(trial), STREAMS[stream]))


def _rng(base_seed, key, trial, stream):
    return np.random.default_rng(trial_seed(base_seed, key, trial, stream))


@dataclass(frozen=True)
class TrialDraw:
    """All random inputs of one trial; the direct channel is kept at unit scale."""

    realization: ChannelRealization
    placement: UserPlacement
    init: np.ndarray
    direct_unit: np.ndarray
    solver_seed: np.random.SeedSequence

    def with_pathloss(self, direct_pathloss_db=None) -> ChannelRealization:
        if direct_pathloss_db is None:
            return self.realization
        return self.realization.with_direct(db_to_amplitude(direct_pathloss_db) * self.direct_unit)


def draw_trial(network: NetworkConfig, K: int, geometry: RisGeometry, trial: int, base_seed: int) -> TrialDraw:
    key = (K, geometry.n1, geometry.n2)
    placement = sample_placement(K, _rng(base_seed, key, trial, "placement"), **network.placement_kwargs())
    real = sample_channel(geometry, placement, network.channel_spec(), _rng(base_seed, key, trial, "channel"))
    init = np.exp(1j * _rng(base_seed, key, trial, "init").uniform(-np.pi, np.pi, geometry.n))
    unit = sample_direct(placement, 0.0, _rng(base_seed, key, trial, "direct"))
    return TrialDraw(real, placement, init, unit, trial_seed(base_seed, key, trial, "solver"))


@dataclass(frozen=True)
class SweepPoint:
    value: float
    K: int
    n1: int
    n2: int
    tx_power_dbm: float
    direct_pathloss_db: float | None

    @property
    def N(self) -> int:
        return self.n1 * self.n2


def sweep_points(network: NetworkConfig, sweep: SweepSpec) -> list:
    """Expand the swept parameter. ``N`` keeps ``n1`` columns and varies the rows."""
    points = []
    for value in sweep.values:
        K, n1, n2 = network.K, network.n1, network.n2
        power, pl = network.tx_power_dbm, network.direct_pathloss_db
        if sweep.parameter == "N":
            n = int(value)
            if n != value or n < 1 or n % n1:
                raise ConfigError("sweep.values", f"N={value} is not a multiple of n1={n1}")
            n2 = n // n1
        elif sweep.parameter == "K":
            K = int(value)
            if K != value or K < 1:
                raise ConfigError("sweep.values", f"K={value} is not a positive integer")
        elif sweep.parameter == "tx_power_dbm":
            power = float(value)
        else:
            pl = float(value)
        points.append(SweepPoint(float(value), K, n1, n2, power, pl))
    return points


def _map(fn, tasks, jobs):
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _mean(x):
    x = np.asarray([t for t in x if t is not None], float)
    return float(x.mean()) if x.size else math.nan


def _stderr(x):
    x = np.asarray([t for t in x if t is not None], float)
    return float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else math.nan


@dataclass
class ExperimentResult:
    """Aggregated rows (one per point and scheme), raw per-trial rows and a summary."""

    name: str
    rows: list
    trials: list
    summary: dict
    config: dict
    seed: int
    traces: dict = field(default_factory=dict)

    def column(self, name, **where):
        return [r[name] for r in self.rows if all(r.get(k) == v for k, v in where.items())]

    def summary_dict(self) -> dict:
        return jsonable({"experiment": self.name, "seed": self.seed, "config": self.config, **self.summary, "rows": self.rows})


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _provenance(name, seed, config):
    return [
        f"# experiment={name} seed={seed}",
        "# config=" + json.dumps(jsonable(config), sort_keys=True, separators=(",", ":")),
    ]


def table_csv(rows, header_lines=()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(line + "\n")
    if rows:
        cols = list(rows[0])
        for r in rows[1:]:
            cols += [c for c in r if c not in cols]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()


def write_outputs(result: ExperimentResult, out_dir, per_trial=False, traces=False) -> list:
    """Write results.csv, summary.json and optionally trials.csv and trace_<trial>.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    head = _provenance(result.name, result.seed, result.config)
    written = [out / "results.csv", out / "summary.json"]
    written[0].write_text(table_csv(result.rows, head))
    written[1].write_text(json.dumps(result.summary_dict(), indent=1, sort_keys=True) + "\n")
    if per_trial:
        p = out / "trials.csv"
        p.write_text(table_csv(result.trials, head))
        written.append(p)
    if traces:
        for trial, reports in sorted(result.traces.items()):
            rows = []
            for method, rep in reports.items():
                cols = {
                    "residual": rep.residual_trace,
                    "max_isr_db": rep.isr_trace,
                    "sum_rate_bits": rep.sum_rate_trace,
                    "min_rate_bits": rep.min_rate_trace,
                    "grad_norm": rep.grad_norm_trace,
                }
                for i in range(rep.iterations):
                    row = {"iter": i + 1, "method": method}
                    row.update({k: (float(c[i]) if len(c) else None) for k, c in cols.items()})
                    rows.append(row)
            p = out / f"trace_{trial}.csv"
            p.write_text(table_csv(rows, head))
            written.append(p)
    return written


def _config_dict(network, solver, sweep=None, **extra):
    from dataclasses import asdict

    d = {"network": asdict(network), "solver": asdict(solver)}
    if sweep is not None:
        d["sweep"] = asdict(sweep)
    d.update(extra)
    return d


# ---------------------------------------------------------------------------
# nulling grids (batched over trials)


@dataclass(frozen=True)
class _NullTask:
    network: NetworkConfig
    solver: SolverConfig
    K: int
    n1: int
    n2: int
    trials: int
    base_seed: int
    pathlosses: tuple
    schemes: tuple


def _null_point(task: _NullTask):
    net, sol = task.network, task.solver
    geometry = net.geometry(task.n1, task.n2)
    draws = [draw_trial(net, task.K, geometry, t, task.base_seed) for t in range(task.trials)]
    powers = np.full(task.K, net.power_w)
    out = []
    for pl in task.pathlosses:
        reals = [d.with_pathloss(pl) for d in draws]
        problems = [NullingProblem.from_realization(r) for r in reals]
        ok = [p.consistent for p in problems]
        idx = [t for t in range(task.trials) if ok[t]]
        etas = [direct_cascaded_ratio(r) for r in reals]
        nec = [necessary_condition_direct(r)[1] for r in reals]
        for scheme in task.schemes:
            reports = {}
            if scheme in ("ap-random", "ap-eigen"):
                inits = [
                    draws[t].init if scheme == "ap-random" else eigen_initialize(reals[t], draws[t].solver_seed)
                    for t in idx
                ]
                batch = alternating_projection_batch(
                    [problems[t] for t in idx],
                    inits,
                    [reals[t] for t in idx],
                    powers,
                    sol.ap_max_iters,
                    sol.isr_threshold_db,
                    [draws[t].solver_seed for t in idx],
                    sol.isr_weighted,
                )
                reports = dict(zip(idx, batch))
            elif scheme == "pgd-random":
                for t in idx:
                    reports[t] = projected_gradient_baseline(
                        problems[t],
                        draws[t].init,
                        reals[t],
                        powers,
                        sol.pgd_max_iters,
                        sol.pgd_alpha,
                        sol.pgd_beta,
                        sol.isr_threshold_db,
                        draws[t].solver_seed,
                        sol.isr_weighted,
                    )
            else:
                raise ConfigError("sweep.schemes", f"{scheme!r} is not a nulling scheme")
            for t in range(task.trials):
                rep = reports.get(t)
                v = draws[t].init if rep is None else rep.solution
                out.append(
                    {
                        "K": task.K,
                        "N": geometry.n,
                        "direct_pathloss_db": pl,
                        "scheme": scheme,
                        "trial": t,
                        "success": bool(rep is not None and rep.converged),
                        "terminated": rep.terminated if rep is not None else "infeasible_affine",
                        "iterations": rep.iterations if rep is not None else 0,
                        "final_isr_db": max_isr_db(reals[t], v, powers, weighted=sol.isr_weighted),
                        "eta": etas[t],
                        "necessary_condition": nec[t],
                    }
                )
    log.info("nulling point K=%d N=%d done (%d trials)", task.K, geometry.n, task.trials)
    return out


def _aggregate_null(records, keys):
    groups = {}
    for r in records:
        groups.setdefault(tuple(r[k] for k in keys), []).append(r)
    rows = []
    for gk, rs in groups.items():
        succ = [r["success"] for r in rs]
        rows.append(
            {
                **dict(zip(keys, gk)),
                "trials": len(rs),
                "successes": int(sum(succ)),
                "success_probability": float(np.mean(succ)),
                "mean_iterations": _mean([r["iterations"] for r in rs]),
                "median_final_isr_db": float(np.median([r["final_isr_db"] for r in rs])),
                "mean_eta": _mean([r["eta"] for r in rs]),
                "stderr_eta": _stderr([r["eta"] for r in rs]),
                "necessary_condition_fraction": float(np.mean([r["necessary_condition"] for r in rs])),
            }
        )
    return rows


def transition_points(N_list, success_probability):
    """``(N0, N95)``: largest N without any success and smallest N with >= 95% success."""
    N0 = max((n for n, p in zip(N_list, success_probability) if p == 0), default=None)
    N95 = min((n for n, p in zip(N_list, success_probability) if p >= 0.95), default=None)
    return N0, N95


def phase_transition_grid(
    network: NetworkConfig,
    solver: SolverConfig,
    K_list,
    N_list,
    trials: int = 100,
    base_seed: int = 0,
    jobs: int = 1,
    direct_pathloss_db=None,
) -> ExperimentResult:
    """Interference-nulling probability per (K, N) on a linear array, AP from random starts.

    The array is a single column (``n1 = 1``), so N steps by one element.
    """
    tasks = [
        _NullTask(network, solver, K, 1, int(N), trials, base_seed, (direct_pathloss_db,), ("ap-random",))
        for K in K_list
        for N in N_list
    ]
    records = [r for chunk in _map(_null_point, tasks, jobs) for r in chunk]
    rows = _aggregate_null(records, ("K", "N"))
    transitions = {}
    for K in K_list:
        sub = [r for r in rows if r["K"] == K]
        N0, N95 = transition_points([r["N"] for r in sub], [r["success_probability"] for r in sub])
        transitions[str(K)] = {"N0": N0, "N95": N95, "dof_bound": 2 * K * (K - 1)}
    cfg = _config_dict(
        network,
        solver,
        experiment={"K_list": list(K_list), "N_list": list(N_list), "trials": trials, "direct_pathloss_db": direct_pathloss_db},
    )
    return ExperimentResult("phase-transition", rows, records, {"transitions": transitions}, cfg, base_seed)


def nulling_sweep(network: NetworkConfig, solver: SolverConfig, sweep: SweepSpec, jobs: int = 1) -> ExperimentResult:
    """Success probability and iteration counts of the nulling solvers over a sweep."""
    tasks = [
        _NullTask(network, solver, pt.K, pt.n1, pt.n2, sweep.trials, sweep.base_seed, (pt.direct_pathloss_db,), tuple(sweep.schemes))
        for pt in sweep_points(network, sweep)
    ]
    records = []
    for pt, chunk in zip(sweep_points(network, sweep), _map(_null_point, tasks, jobs)):
        for r in chunk:
            r["value"] = pt.value
        records += chunk
    rows = _aggregate_null(records, ("value", "scheme", "K", "N"))
    rows = [{"parameter": sweep.parameter, **r} for r in rows]
    return ExperimentResult("null", rows, records, {}, _config_dict(network, solver, sweep), sweep.base_seed)


def direct_path_study(
    network: NetworkConfig,
    solver: SolverConfig,
    K: int,
    N_list,
    pathloss_list,
    trials: int = 100,
    base_seed: int = 0,
    jobs: int = 1,
) -> ExperimentResult:
    """Nulling probability and mean eta per (N, direct path loss) on a linear array.

    A path loss of ``-inf`` gives exactly zero direct gains and so the same
    outcome as the blocked grid for the same seeds.
    """
    pls = tuple(float(p) for p in pathloss_list)
    tasks = [_NullTask(network, solver, K, 1, int(N), trials, base_seed, pls, ("ap-random",)) for N in N_list]
    records = [r for chunk in _map(_null_point, tasks, jobs) for r in chunk]
    rows = _aggregate_null(records, ("K", "N", "direct_pathloss_db"))
    cfg = _config_dict(
        network, solver, experiment={"K": K, "N_list": list(N_list), "pathloss_list": list(pls), "trials": trials}
    )
    curves = {}
    for N in N_list:
        sub = [r for r in rows if r["N"] == N]
        eta = [r["mean_eta"] for r in sub]
        succ = [r["success_probability"] for r in sub]
        varied = len(sub) > 2 and np.ptp(eta) > 0 and np.ptp(succ) > 0
        rho = float(stats.spearmanr(eta, succ)[0]) if varied else math.nan
        curves[str(N)] = {"spearman_eta_success": rho}
    return ExperimentResult("direct-study", rows, records, {"curves": curves}, cfg, base_seed)


# ---------------------------------------------------------------------------
# convergence traces


@dataclass(frozen=True)
class _ConvTask:
    network: NetworkConfig
    solver: SolverConfig
    trial: int
    base_seed: int
    methods: tuple
    threshold_db: float


def _conv_trial(task: _ConvTask):
    net, sol = task.network, task.solver
    geometry = net.geometry()
    draw = draw_trial(net, net.K, geometry, task.trial, task.base_seed)
    real = draw.with_pathloss(net.direct_pathloss_db)
    problem = NullingProblem.from_realization(real)
    powers = np.full(net.K, net.power_w)
    reports = {}
    for m in task.methods:
        if m == "ap":
            reports[m] = alternating_projection(
                problem, draw.init, real, powers, sol.ap_max_iters, task.threshold_db, draw.solver_seed, sol.isr_weighted
            )
        else:
            reports[m] = projected_gradient_baseline(
                problem,
                draw.init,
                real,
                powers,
                sol.pgd_max_iters,
                sol.pgd_alpha,
                sol.pgd_beta,
                task.threshold_db,
                draw.solver_seed,
                sol.isr_weighted,
            )
    log.info("convergence trial %d done", task.trial)
    return reports


def convergence_trace_experiment(
    network: NetworkConfig,
    solver: SolverConfig,
    trials: int = 100,
    methods=("ap", "pgd"),
    threshold_db: float = -50.0,
    base_seed: int = 0,
    jobs: int = 1,
) -> ExperimentResult:
    """Max-ISR traces of AP and PGD from shared random starts, run until ``threshold_db``.

    Iterations to threshold are ``inf`` for runs that never reach it.
    """
    tasks = [_ConvTask(network, solver, t, base_seed, tuple(methods), threshold_db) for t in range(trials)]
    all_reports = _map(_conv_trial, tasks, jobs)
    records = []
    for t, reps in enumerate(all_reports):
        for m, rep in reps.items():
            hit = 0 if rep.iterations == 0 and rep.converged else rep.first_iteration_below(threshold_db)
            records.append(
                {
                    "trial": t,
                    "method": m,
                    "iterations_to_threshold": math.inf if hit is None else hit,
                    "terminated": rep.terminated,
                    "final_isr_db": rep.final_isr_db,
                }
            )
    rows = []
    for m in methods:
        its = np.array([r["iterations_to_threshold"] for r in records if r["method"] == m], float)
        rows.append(
            {
                "method": m,
                "trials": int(its.size),
                "threshold_db": threshold_db,
                "reached_fraction": float(np.isfinite(its).mean()),
                "within_1000_fraction": float((its <= 1000).mean()),
                "median_iterations": float(np.median(its)),
                "mean_iterations_reached": _mean(its[np.isfinite(its)]),
            }
        )
    cfg = _config_dict(network, solver, experiment={"trials": trials, "methods": list(methods), "threshold_db": threshold_db})
    traces = {t: reps for t, reps in enumerate(all_reports)}
    return ExperimentResult("convergence", rows, records, {}, cfg, base_seed, traces)


# ---------------------------------------------------------------------------
# utility sweeps (one task per trial so AP stages are shared across power points)


@dataclass(frozen=True)
class _RateTask:
    network: NetworkConfig
    solver: SolverConfig
    points: tuple
    trial: int
    base_seed: int
    schemes: tuple


def _ap_stage(cache, key, draw, real, mode, sol, powers):
    if key not in cache:
        problem = NullingProblem.from_realization(real)
        if not problem.consistent:
            cache[key] = None
        else:
            init = draw.init if mode == "random" else eigen_initialize(real, draw.solver_seed)
            cache[key] = alternating_projection(
                problem, init, real, powers, sol.ap_max_iters, sol.isr_threshold_db, draw.solver_seed, sol.isr_weighted
            )
    return cache[key]


def _rate_trial(task: _RateTask):
    net, sol = task.network, task.solver
    draws, aps, out = {}, {}, []
    for pt in task.points:
        gkey = (pt.K, pt.n1, pt.n2)
        if gkey not in draws:
            draws[gkey] = draw_trial(net, pt.K, net.geometry(pt.n1, pt.n2), task.trial, task.base_seed)
        draw = draws[gkey]
        real = draw.with_pathloss(pt.direct_pathloss_db)
        budget = net.budget(pt.K, pt.tx_power_dbm)
        # equal powers cancel in the ISR, so the AP stage does not depend on the power level
        unit = np.ones(pt.K)
        for scheme in task.schemes:
            ap_iters, ap_ok, extra = 0, None, {}
            if scheme in ("ap-random", "ap-eigen", "ap-random+rcg", "ap-eigen+rcg", "zf"):
                mode = "random" if scheme.startswith("ap-random") else "eigen"
                ap = _ap_stage(aps, (gkey, pt.direct_pathloss_db, mode), draw, real, mode, sol, unit)
                start = draw.init if ap is None else ap.solution
                ap_iters, ap_ok = (0, False) if ap is None else (ap.iterations, ap.converged)
            else:
                start = draw.init
            if "rcg" in scheme:
                rep = rcg_sum_rate(real, budget, start, sol.rcg_max_iters, sol.rcg_tol)
                v, iters = rep.solution, ap_iters + rep.iterations
            elif scheme == "subgradient":
                rep = min_rate_subgradient(
                    real, budget, start, sol.subgradient_max_iters, sol.subgradient_step, sol.subgradient_patience, draw.solver_seed
                )
                v, iters = rep.solution, rep.iterations
                best = rep.min_rate_trace
                extra["best_trace_nondecreasing"] = bool(np.all(np.diff(best) >= 0)) if best.size else True
            else:
                v, iters = start, ap_iters
            rates = link_rates(real, v, budget)
            isr = max_isr_db(real, v, budget.for_users(pt.K))
            out.append(
                {
                    "value": pt.value,
                    "scheme": scheme,
                    "K": pt.K,
                    "N": pt.N,
                    "tx_power_dbm": pt.tx_power_dbm,
                    "direct_pathloss_db": pt.direct_pathloss_db,
                    "trial": task.trial,
                    "sum_rate": float(rates.sum()),
                    "min_rate": float(rates.min()),
                    "iterations": iters,
                    "ap_converged": ap_ok,
                    "final_isr_db": isr,
                    "success": bool(isr <= sol.isr_threshold_db),
                    "eta": direct_cascaded_ratio(real),
                    **extra,
                }
            )
    log.info("rate trial %d done", task.trial)
    return out


def _paired_stats(records, points, schemes):
    """One-sided paired t statistics for every ordered scheme pair at every point."""
    out = []
    for value in points:
        by = {
            s: {r["trial"]: r for r in records if r["value"] == value and r["scheme"] == s}
            for s in schemes
        }
        for a in schemes:
            for b in schemes:
                if a == b:
                    continue
                trials = sorted(set(by[a]) & set(by[b]))
                for metric in ("sum_rate", "min_rate"):
                    d = np.array([by[a][t][metric] - by[b][t][metric] for t in trials])
                    if d.size < 2:
                        continue
                    se = d.std(ddof=1) / np.sqrt(d.size)
                    lower = d.mean() - stats.t.ppf(0.95, d.size - 1) * se if se > 0 else d.mean()
                    out.append(
                        {
                            "value": value,
                            "metric": metric,
                            "a": a,
                            "b": b,
                            "mean_diff": float(d.mean()),
                            "stderr_diff": float(se),
                            "lower95": float(lower),
                            "a_wins_fraction": float(np.mean(d > 0)),
                        }
                    )
    return out


def _aggregate_rates(records, keys):
    groups = {}
    for r in records:
        groups.setdefault(tuple(r[k] for k in keys), []).append(r)
    rows = []
    for gk, rs in groups.items():
        rows.append(
            {
                **dict(zip(keys, gk)),
                "trials": len(rs),
                "success_probability": float(np.mean([r["success"] for r in rs])),
                "mean_sum_rate": _mean([r["sum_rate"] for r in rs]),
                "stderr_sum_rate": _stderr([r["sum_rate"] for r in rs]),
                "mean_min_rate": _mean([r["min_rate"] for r in rs]),
                "stderr_min_rate": _stderr([r["min_rate"] for r in rs]),
                "mean_iterations": _mean([r["iterations"] for r in rs]),
                "mean_eta": _mean([r["eta"] for r in rs]),
            }
        )
    return rows


def _rate_campaign(network, solver, sweep, jobs):
    points = tuple(sweep_points(network, sweep))
    tasks = [_RateTask(network, solver, points, t, sweep.base_seed, tuple(sweep.schemes)) for t in range(sweep.trials)]
    records = [r for chunk in _map(_rate_trial, tasks, jobs) for r in chunk]
    records.sort(key=lambda r: (sweep.values.index(r["value"]), sweep.schemes.index(r["scheme"]), r["trial"]))
    return records


def sum_rate_sweep(network: NetworkConfig, solver: SolverConfig, sweep: SweepSpec, jobs: int = 1) -> ExperimentResult:
    """Mean sum rate per point and scheme, with paired comparisons between schemes."""
    records = _rate_campaign(network, solver, sweep, jobs)
    rows = [{"parameter": sweep.parameter, **r} for r in _aggregate_rates(records, ("value", "scheme", "K", "N"))]
    paired = _paired_stats(records, sweep.values, list(sweep.schemes))
    return ExperimentResult("sumrate", rows, records, {"paired": paired}, _config_dict(network, solver, sweep), sweep.base_seed)


def min_rate_sweep(
    network: NetworkConfig, solver: SolverConfig, sweep: SweepSpec, sides=None, jobs: int = 1
) -> ExperimentResult:
    """Mean minimum rate for zero-forcing only and for the subgradient method.

    ``sides`` lists square array sizes (4 gives N = 16); ``None`` uses the
    network's own array.
    """
    records, paired = [], []
    nets = [network] if not sides else [replace(network, n1=s, n2=s) for s in sides]
    for net in nets:
        recs = _rate_campaign(net, solver, sweep, jobs)
        records += recs
        for p in _paired_stats(recs, sweep.values, list(sweep.schemes)):
            paired.append({"N": net.N, **p})
    rows = [{"parameter": sweep.parameter, **r} for r in _aggregate_rates(records, ("N", "value", "scheme", "K"))]
    cfg = _config_dict(network, solver, sweep, experiment={"sides": list(sides) if sides else None})
    return ExperimentResult("minrate", rows, records, {"paired": paired}, cfg, sweep.base_seed)
