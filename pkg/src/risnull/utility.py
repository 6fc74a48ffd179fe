"""Link rates, their gradients, and sum-rate / min-rate optimisation on the torus.

Gradients use the real-gradient convention for complex variables:
``g = df/dRe(v) + 1j * df/dIm(v)``, so ``f(v + t d) ~ f(v) + t * Re(vdot(g, d))``.
Optimisers work with rates in nats; rates are reported in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .channel import ChannelRealization
from .nulling import (
    NullingProblem,
    SolverReport,
    _isr_from_gains,
    _to_db,
    alternating_projection,
    eigen_initialize,
    project_torus,
    random_torus_point,
)

__all__ = [
    "LinkBudget",
    "RcgState",
    "link_rates",
    "link_rate",
    "sum_rate",
    "rate_gradient",
    "sum_rate_gradient",
    "tangent_project",
    "retract",
    "rcg_sum_rate",
    "two_stage_sum_rate",
    "min_rate_subgradient",
]

LN2 = np.log(2.0)


@dataclass(frozen=True)
class LinkBudget:
    """Transmit powers and receiver noise, in watts."""

    powers: np.ndarray
    noise_power: float
    bandwidth: float = 10e6

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.powers, dtype=float))
        if np.any(p <= 0) or not self.noise_power > 0:
            raise ValueError("powers and noise power must be positive")
        object.__setattr__(self, "powers", p)

    @classmethod
    def uniform(cls, K, power, noise_power, bandwidth=10e6):
        return cls(np.full(K, float(power)), noise_power, bandwidth)

    def scaled(self, factor) -> "LinkBudget":
        """Same noise, all transmit powers multiplied by ``factor``."""
        return LinkBudget(self.powers * factor, self.noise_power, self.bandwidth)

    def for_users(self, K):
        if self.powers.size == 1:
            return np.full(K, self.powers[0])
        if self.powers.size != K:
            raise ValueError(f"budget has {self.powers.size} powers for {K} users")
        return self.powers


def _sinr_terms(realization, v, budget):
    G = realization.effective(v)
    K = G.shape[0]
    p = budget.for_users(K)
    P = np.abs(G) ** 2 * p[None, :]
    signal = np.diagonal(P).copy()
    interf_noise = (P * ~np.eye(K, dtype=bool)).sum(axis=1) + budget.noise_power
    return G, p, signal, interf_noise


def link_rates(realization: ChannelRealization, v, budget: LinkBudget) -> np.ndarray:
    """Achievable rate of every link in bits/s/Hz."""
    _, _, signal, interf_noise = _sinr_terms(realization, v, budget)
    return np.log2(1.0 + signal / interf_noise)


def link_rate(realization: ChannelRealization, v, budget: LinkBudget, k: int) -> float:
    return float(link_rates(realization, v, budget)[k])


def sum_rate(realization: ChannelRealization, v, budget: LinkBudget) -> float:
    return float(link_rates(realization, v, budget).sum())


def _weighted_gradient(realization, X):
    # sum_{k,j} conj(a_kj) * X[k, j] with a_kj = h_t[j] * h_r[k]
    Y = X @ realization.h_t.conj()
    return (realization.h_r.conj() * Y).sum(axis=0)


def _gradient_weights(G, p, signal, interf_noise):
    K = G.shape[0]
    total = interf_noise + signal
    W = 2.0 * p[None, :] * (1.0 / total[:, None] - (~np.eye(K, dtype=bool)) / interf_noise[:, None])
    return W * G


def rate_gradient(realization: ChannelRealization, v, budget: LinkBudget, k: int) -> np.ndarray:
    """Gradient of the natural-log rate of link ``k`` (divide by ln 2 for bits)."""
    G, p, signal, interf_noise = _sinr_terms(realization, v, budget)
    X = np.zeros_like(G)
    X[k] = _gradient_weights(G, p, signal, interf_noise)[k]
    return _weighted_gradient(realization, X)


def sum_rate_gradient(realization: ChannelRealization, v, budget: LinkBudget) -> np.ndarray:
    G, p, signal, interf_noise = _sinr_terms(realization, v, budget)
    return _weighted_gradient(realization, _gradient_weights(G, p, signal, interf_noise))


def tangent_project(v, x) -> np.ndarray:
    """Remove the radial component of ``x`` at each unit-modulus ``v_i``."""
    v = np.asarray(v)
    x = np.asarray(x)
    return x - np.real(x * v.conj()) * v


def retract(v, d, step) -> np.ndarray:
    return project_torus(np.asarray(v) + step * np.asarray(d))


@dataclass
class RcgState:
    """Snapshot passed to the ``rcg_sum_rate`` callback after each accepted step."""

    iteration: int
    v: np.ndarray
    direction: np.ndarray
    gradient: np.ndarray
    objective: float
    previous_objective: float
    step: float
    slope: float


def _objective_nats(realization, v, budget):
    _, _, signal, interf_noise = _sinr_terms(realization, v, budget)
    return float(np.log1p(signal / interf_noise).sum())


def _utility_metrics(realization, v, budget):
    G, p, signal, interf_noise = _sinr_terms(realization, v, budget)
    rates = np.log2(1.0 + signal / interf_noise)
    isr, resid = _isr_from_gains(G, p)
    return rates, float(_to_db(isr)), float(resid)


def rcg_sum_rate(
    realization: ChannelRealization,
    budget: LinkBudget,
    init,
    max_iters: int = 1000,
    tol: float | None = None,
    armijo: float = 1e-4,
    contraction: float = 0.5,
    max_backtracks: int = 60,
    restart_every: int | None = None,
    callback=None,
) -> SolverReport:
    """Riemannian conjugate gradient ascent of the sum rate on the torus.

    Polak-Ribiere+ conjugacy with the previous direction and gradient carried
    over by tangent projection, Armijo backtracking from a unit trial step,
    retraction by elementwise normalisation. The trial step is measured in
    units of the largest elementwise displacement ``max|d_i|`` so it does not
    depend on the channel scale. Stops when the Riemannian gradient norm
    drops to ``tol`` (default ``1e-6 * N``).
    """
    v = np.asarray(init, dtype=complex).copy()
    if np.any(np.abs(np.abs(v) - 1) > 1e-9):
        raise ValueError("initial point must be unit-modulus")
    N = v.size
    tol = 1e-6 * N if tol is None else tol
    restart_every = N if restart_every is None else restart_every

    f = _objective_nats(realization, v, budget)
    grad = tangent_project(v, sum_rate_gradient(realization, v, budget))
    gnorm2 = float(np.vdot(grad, grad).real)
    d = grad.copy()
    traces = {"sum": [], "min": [], "gn": [], "isr": [], "res": []}
    flags = set()
    status = "max_iters"
    if np.sqrt(gnorm2) <= tol:
        return SolverReport(v, 0, "converged", method="rcg")

    it = 0
    while it < max_iters:
        slope = float(np.vdot(grad, d).real)
        if slope <= 0:
            d = grad.copy()
            slope = gnorm2
        scale = 1.0 / np.abs(d).max()
        step = 1.0
        accepted = False
        for _ in range(max_backtracks):
            lam = step * scale
            v_new = retract(v, d, lam)
            f_new = _objective_nats(realization, v_new, budget)
            if f_new >= f + armijo * lam * slope:
                accepted = True
                break
            step *= contraction
        if not accepted:
            if np.array_equal(d, grad):
                flags.add("line_search_failed")
                break
            d = grad.copy()
            flags.add("restart")
            continue

        grad_new = tangent_project(v_new, sum_rate_gradient(realization, v_new, budget))
        gnew2 = float(np.vdot(grad_new, grad_new).real)
        moved_grad = tangent_project(v_new, grad)
        beta = max(0.0, float(np.vdot(grad_new, grad_new - moved_grad).real) / gnorm2)
        if (it + 1) % restart_every == 0:
            beta = 0.0
        d_new = grad_new + beta * tangent_project(v_new, d)

        if callback is not None:
            callback(RcgState(it + 1, v_new, d_new, grad_new, f_new, f, lam, slope))
        v, f, grad, gnorm2, d = v_new, f_new, grad_new, gnew2, d_new
        it += 1
        rates, isr, res = _utility_metrics(realization, v, budget)
        traces["sum"].append(rates.sum())
        traces["min"].append(rates.min())
        traces["gn"].append(np.sqrt(gnorm2))
        traces["isr"].append(isr)
        traces["res"].append(res)
        if np.sqrt(gnorm2) <= tol:
            status = "converged"
            break

    return SolverReport(
        v,
        it,
        status,
        method="rcg",
        residual_trace=np.array(traces["res"]),
        isr_trace=np.array(traces["isr"]),
        sum_rate_trace=np.array(traces["sum"]),
        min_rate_trace=np.array(traces["min"]),
        grad_norm_trace=np.array(traces["gn"]),
        flags=tuple(sorted(flags)),
    )


def two_stage_sum_rate(
    realization: ChannelRealization,
    budget: LinkBudget,
    init_mode: str = "eigen",
    rng=None,
    ap_max_iters: int = 5000,
    isr_threshold_db: float = -60.0,
    rcg_max_iters: int = 1000,
    rcg_tol: float | None = None,
    problem: NullingProblem | None = None,
) -> SolverReport:
    """Alternating projection for a zero-forcing start, then RCG on the sum rate.

    The second stage always runs, whether or not the first stage reached the
    ISR threshold.
    """
    rng = np.random.default_rng(rng)
    N = realization.num_elements
    if init_mode == "eigen":
        init = eigen_initialize(realization, rng)
    elif init_mode == "random":
        init = random_torus_point(N, rng)
    else:
        raise ValueError(f"init_mode must be 'random' or 'eigen', got {init_mode!r}")
    problem = NullingProblem.from_realization(realization) if problem is None else problem
    ap = alternating_projection(
        problem, init, realization, budget.for_users(realization.num_users), ap_max_iters, isr_threshold_db, rng
    )
    rcg = rcg_sum_rate(realization, budget, ap.solution, rcg_max_iters, rcg_tol)
    return replace(rcg, method=f"ap-{init_mode}+rcg", stages=[ap, rcg])


def min_rate_subgradient(
    realization: ChannelRealization,
    budget: LinkBudget,
    init,
    max_iters: int = 10000,
    step: float = 0.05,
    patience: int = 1000,
    rng=None,
) -> SolverReport:
    """Projected subgradient ascent on the worst link rate.

    Each step moves along the gradient of the currently weakest link with
    length ``step`` and projects back to the torus. The best iterate seen is
    returned; ``min_rate_trace`` is the best-so-far minimum rate in bits.
    Stops after ``patience`` iterations without improvement.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    rng = np.random.default_rng(rng)
    v = np.asarray(init, dtype=complex).copy()
    rates = link_rates(realization, v, budget)
    best, best_v = float(rates.min()), v.copy()
    best_trace, sum_trace, gn_trace = [], [], []
    status, flags, stale = "max_iters", set(), 0
    for it in range(max_iters):
        worst = int(np.argmin(rates))
        g = -rate_gradient(realization, v, budget, worst)
        gn = float(np.linalg.norm(g))
        if gn == 0:
            status = "converged"
            flags.add("stationary")
            break
        v = project_torus(v - (step / gn) * g, rng)
        rates = link_rates(realization, v, budget)
        if rates.min() > best:
            best, best_v, stale = float(rates.min()), v.copy(), 0
        else:
            stale += 1
        best_trace.append(best)
        sum_trace.append(float(rates.sum()))
        gn_trace.append(gn)
        if stale >= patience:
            status = "converged"
            flags.add("no_improvement")
            break
    return SolverReport(
        best_v,
        len(best_trace),
        status,
        method="subgradient",
        sum_rate_trace=np.array(sum_trace),
        min_rate_trace=np.array(best_trace),
        grad_norm_trace=np.array(gn_trace),
        flags=tuple(sorted(flags)),
    )
