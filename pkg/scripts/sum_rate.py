"""Sum rate of the five schemes versus transmit power (K=8, 12x12) or versus N (K=6, 35 dBm).

Use ``--versus N`` for the second sweep; N grows in rows of 10 elements.
"""

from _common import finish, parser, setup, table

from risnull.experiments import sum_rate_sweep

if __name__ == "__main__":
    p = parser(__doc__, trials=500)
    p.add_argument("--versus", choices=["power", "N"], default="power")
    args = p.parse_args()
    extra = []
    if args.versus == "N":
        extra = ["network.K=6", "network.n1=10", "network.tx_power_dbm=35", "sweep.parameter=N"]
        extra += ["sweep.values=[20, 30, 40, 50, 60, 70, 80, 90, 100]"]
    cfg = setup(args, "sumrate", extra)
    res = sum_rate_sweep(cfg.network, cfg.solver, cfg.sweep, args.jobs)
    finish(res, cfg, "sumrate", args.out)
    table(res.rows, ["value", "scheme", "mean_sum_rate", "stderr_sum_rate"])
