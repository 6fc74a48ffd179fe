import json
import math

import numpy as np
import pytest

from risnull.config import ConfigError, NetworkConfig, SolverConfig, SweepSpec
from risnull.experiments import (
    convergence_trace_experiment,
    direct_path_study,
    draw_trial,
    min_rate_sweep,
    nulling_sweep,
    phase_transition_grid,
    sum_rate_sweep,
    sweep_points,
    transition_points,
    trial_seed,
    write_outputs,
)

NET = NetworkConfig()
SOL = SolverConfig()


def test_trial_seeds_are_distinct_and_stable():
    seeds = {
        tuple(trial_seed(0, (2, 1, 4), t, s).generate_state(2))
        for t in range(5)
        for s in ("placement", "channel", "init", "direct", "solver")
    }
    assert len(seeds) == 25
    a = np.random.default_rng(trial_seed(3, (2, 1, 4), 1, "init")).random()
    b = np.random.default_rng(trial_seed(3, (2, 1, 4), 1, "init")).random()
    assert a == b
    assert a != np.random.default_rng(trial_seed(4, (2, 1, 4), 1, "init")).random()


def test_draw_shares_channel_across_direct_strengths():
    d = draw_trial(NET, 3, NET.geometry(1, 12), 0, 0)
    weak, strong = d.with_pathloss(-140.0), d.with_pathloss(-120.0)
    np.testing.assert_array_equal(weak.h_t, strong.h_t)
    np.testing.assert_allclose(strong.direct, 10 * weak.direct)
    np.testing.assert_array_equal(d.with_pathloss(-math.inf).direct, 0)
    assert d.with_pathloss(None) is d.realization


def test_transition_points():
    assert transition_points([1, 2, 3, 4], [0, 0, 0.5, 1.0]) == (2, 4)
    assert transition_points([1, 2], [0.1, 0.2]) == (None, None)


def test_phase_transition_small_grid():
    res = phase_transition_grid(NET, SOL, [2], [3, 4, 8], trials=20)
    p = {r["N"]: r["success_probability"] for r in res.rows}
    assert p[3] == 0 and p[4] == 0 and p[8] == 1.0
    assert res.summary["transitions"]["2"] == {"N0": 4, "N95": 8, "dof_bound": 4}
    assert len(res.trials) == 60
    assert all(0 <= r["success_probability"] <= 1 for r in res.rows)


def test_far_above_transition_always_succeeds():
    res = phase_transition_grid(NET, SOL, [4], [100], trials=100)
    assert res.rows[0]["success_probability"] == 1.0


def test_parallelism_does_not_change_results():
    a = phase_transition_grid(NET, SOL, [2], [4, 5, 6], trials=8, base_seed=3, jobs=1)
    b = phase_transition_grid(NET, SOL, [2], [4, 5, 6], trials=8, base_seed=3, jobs=2)
    assert a.rows == b.rows and a.trials == b.trials


def test_blocked_direct_reproduces_grid():
    grid = phase_transition_grid(NET, SOL, [3], [12, 14], trials=10)
    zero = direct_path_study(NET, SOL, 3, [12, 14], [-math.inf], trials=10)
    key = lambda r: (r["N"], r["trial"], r["success"], r["iterations"], r["final_isr_db"])  # noqa: E731
    assert [key(r) for r in zero.trials] == [key(r) for r in grid.trials]


def test_direct_study_eta_grows_with_pathloss():
    res = direct_path_study(NET, SOL, 2, [8], [-140.0, -120.0], trials=10)
    eta = [r["mean_eta"] for r in res.rows]
    assert eta[1] == pytest.approx(10 * eta[0])


def test_sweep_points():
    pts = sweep_points(NetworkConfig(n1=10), SweepSpec(parameter="N", values=[50, 60]))
    assert [(p.n1, p.n2, p.N) for p in pts] == [(10, 5, 50), (10, 6, 60)]
    with pytest.raises(ConfigError):
        sweep_points(NetworkConfig(n1=10), SweepSpec(parameter="N", values=[55]))
    pts = sweep_points(NET, SweepSpec(parameter="direct_pathloss_db", values=[-130]))
    assert pts[0].direct_pathloss_db == -130.0


def test_sum_rate_sweep_structure_and_pairing():
    net = NetworkConfig(K=2, n1=3, n2=3)
    sweep = SweepSpec(values=[10.0, 30.0], trials=3, schemes=["ap-random", "ap-eigen+rcg", "rcg-random"])
    sol = SolverConfig(rcg_max_iters=50)
    res = sum_rate_sweep(net, sol, sweep)
    assert len(res.rows) == 6 and len(res.trials) == 18
    assert all(r["trials"] == 3 for r in res.rows)
    # power points share the channel and the AP stage
    for t in range(3):
        ap = [r for r in res.trials if r["scheme"] == "ap-random" and r["trial"] == t]
        assert ap[0]["iterations"] == ap[1]["iterations"]
        assert ap[0]["final_isr_db"] == pytest.approx(ap[1]["final_isr_db"])
    pairs = {(p["a"], p["b"]): p for p in res.summary["paired"] if p["metric"] == "sum_rate"}
    assert len(pairs) == 6
    fwd, rev = pairs[("ap-random", "ap-eigen+rcg")], pairs[("ap-eigen+rcg", "ap-random")]
    assert fwd["mean_diff"] == pytest.approx(-rev["mean_diff"])


def test_min_rate_sweep_below_transition_still_positive():
    sweep = SweepSpec(values=[30.0], trials=3, schemes=["zf", "subgradient"])
    sol = SolverConfig(subgradient_max_iters=500, subgradient_patience=100)
    res = min_rate_sweep(NetworkConfig(K=4), sol, sweep, sides=[4])
    sub = [r for r in res.trials if r["scheme"] == "subgradient"]
    assert all(r["N"] == 16 and r["min_rate"] > 0 for r in sub)
    assert all(r["best_trace_nondecreasing"] for r in sub)


def test_nulling_sweep_schemes():
    net = NetworkConfig(K=2, n1=4, n2=2)
    sweep = SweepSpec(parameter="N", values=[8], trials=4, schemes=["ap-random", "ap-eigen", "pgd-random"])
    res = nulling_sweep(net, SOL, sweep)
    assert [r["scheme"] for r in res.rows] == ["ap-random", "ap-eigen", "pgd-random"]
    assert all(r["parameter"] == "N" for r in res.rows)


def test_convergence_experiment_records_traces():
    net = NetworkConfig(K=2, n1=3, n2=3)
    res = convergence_trace_experiment(net, SolverConfig(pgd_max_iters=2000), trials=3, threshold_db=-50.0)
    assert {r["method"] for r in res.rows} == {"ap", "pgd"}
    assert set(res.traces) == {0, 1, 2}
    for reps in res.traces.values():
        ap = reps["ap"]
        if ap.converged and ap.iterations:
            assert ap.isr_trace[-1] <= -50.0


def test_write_outputs_embed_provenance(tmp_path):
    res = phase_transition_grid(NET, SOL, [2], [4, 5], trials=3, base_seed=11)
    conv = convergence_trace_experiment(NetworkConfig(K=2, n1=3, n2=2), SOL, trials=1)
    files = write_outputs(res, tmp_path / "a", per_trial=True) + write_outputs(conv, tmp_path / "b", traces=True)
    assert any(f.name == "trace_0.csv" for f in files)
    for f in files:
        text = f.read_text()
        if f.suffix == ".csv":
            head = text.splitlines()
            assert head[0].startswith("# experiment=") and "seed=" in head[0]
            json.loads(head[1][len("# config=") :])
        else:
            d = json.loads(text)
            assert "config" in d and "seed" in d
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["seed"] == 11
    assert summary["transitions"]["2"]["dof_bound"] == 4


def test_stderr_shrinks_with_more_trials():
    net = NetworkConfig(K=2, n1=2, n2=2)
    sol = SolverConfig(rcg_max_iters=20)
    se = []
    for trials in (40, 160):
        res = sum_rate_sweep(net, sol, SweepSpec(values=[20.0], trials=trials, schemes=["ap-random"]))
        se.append(res.rows[0]["stderr_sum_rate"])
    assert 0.35 < se[1] / se[0] < 0.7
