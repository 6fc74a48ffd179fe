"""Nulling probability versus N on a linear array for K = 2, 3, 4 and the chosen channel model."""

from _common import finish, parser, setup, table

from risnull.experiments import phase_transition_grid

if __name__ == "__main__":
    args = parser(__doc__, trials=1000).parse_args()
    cfg = setup(args, "phase-transition")
    ex = cfg.experiment
    res = phase_transition_grid(cfg.network, cfg.solver, ex.K_list, ex.N_list, args.trials, args.seed, args.jobs)
    finish(res, cfg, "phase-transition", args.out)
    for K, t in res.summary["transitions"].items():
        print(f"K={K}: N0={t['N0']} N95={t['N95']} 2K(K-1)={t['dof_bound']}")
    table(res.rows, ["K", "N", "success_probability"])
