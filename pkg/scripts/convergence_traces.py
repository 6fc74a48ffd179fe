"""Max-ISR traces of AP and PGD on a 12x12 surface with K=8, shared random starts."""

from _common import finish, parser, setup, table

from risnull.experiments import convergence_trace_experiment

if __name__ == "__main__":
    args = parser(__doc__, trials=100).parse_args()
    cfg = setup(args, "convergence")
    res = convergence_trace_experiment(
        cfg.network, cfg.solver, args.trials, cfg.experiment.methods, cfg.experiment.trace_threshold_db, args.seed, args.jobs
    )
    finish(res, cfg, "convergence", args.out, traces=True)
    table(res.rows, ["method", "within_1000_fraction", "median_iterations", "mean_iterations_reached"])
