"""Minimum rate of zero-forcing alone and of the subgradient method, K=4, N = 16 and 36."""

from _common import finish, parser, setup, table

from risnull.experiments import min_rate_sweep

if __name__ == "__main__":
    args = parser(__doc__, trials=500).parse_args()
    cfg = setup(args, "minrate")
    res = min_rate_sweep(cfg.network, cfg.solver, cfg.sweep, cfg.experiment.sides, args.jobs)
    finish(res, cfg, "minrate", args.out)
    table(res.rows, ["N", "value", "scheme", "mean_min_rate", "stderr_min_rate"])
