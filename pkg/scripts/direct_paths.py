"""Nulling with direct links.

``--mode n`` sweeps N for K=7 at direct path losses -inf, -130, -123 and -120 dB.
``--mode eta`` fixes N and sweeps the -120 + 10 log10(x) dB ladder for K=8,
reporting success probability against the mean direct-to-cascaded ratio.
"""

from _common import finish, parser, setup, table

from risnull.experiments import direct_path_study

if __name__ == "__main__":
    p = parser(__doc__, trials=1000)
    p.add_argument("--mode", choices=["n", "eta"], default="eta")
    args = p.parse_args()
    extra = []
    if args.mode == "n":
        extra = ["network.K=7", "experiment.N_list=[84, 88, 92, 96, 100, 104, 108, 112, 116, 120, 124]"]
        extra += ["experiment.pathloss_list=[-.inf, -130, -123, -120]"]
    cfg = setup(args, "direct-study", extra)
    ex = cfg.experiment
    res = direct_path_study(cfg.network, cfg.solver, cfg.network.K, ex.N_list, ex.pathloss_list, args.trials, args.seed, args.jobs)
    finish(res, cfg, "direct-study", args.out)
    table(res.rows, ["N", "direct_pathloss_db", "mean_eta", "success_probability"])
    for N, c in res.summary["curves"].items():
        print(f"N={N}: Spearman(eta, success) = {c['spearman_eta_success']:.3f}")
