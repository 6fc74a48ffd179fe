"""Interference nulling: find unit-modulus ``v`` with ``A^T v + b = 0``.

The feasible set is the intersection of the affine set S1 = {v : A^T v + b = 0}
and the torus S2 = {v : |v_i| = 1}. ``alternating_projection`` projects back
and forth between them; ``projected_gradient_baseline`` minimises
``||A^T v + b||^2`` over the torus instead and serves as the reference method.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization

__all__ = [
    "InfeasibleAffineError",
    "NullingProblem",
    "SolverReport",
    "project_null_space",
    "project_torus",
    "random_torus_point",
    "eigen_initialize",
    "max_isr_db",
    "alternating_projection",
    "alternating_projection_batch",
    "projected_gradient_baseline",
    "necessary_condition_direct",
]

PLATEAU_WINDOW = 100
PLATEAU_RTOL = 1e-12


class InfeasibleAffineError(ValueError):
    """``A^T v + b = 0`` has no solution (b outside the range of A^T)."""


class NullingProblem:
    """Affine constraint ``A^T v + b = 0`` with a cached projector factorisation.

    The projector is built from a rank-revealing SVD ``A = U S V^H``: with
    ``B = conj(U_r)`` the constraint reads ``B^H v = c`` and the projection is
    ``v - B (B^H v - c)``, equal to ``v - A^*(A^T A^*)^{-1}(A^T v + b)`` when
    A has full column rank.
    """

    def __init__(self, A, b=None, include_direct=None):
        A = np.asarray(A, dtype=complex)
        if A.ndim != 2:
            raise ValueError("A must be a 2-D N x M matrix")
        N, M = A.shape
        self.include_direct = b is not None if include_direct is None else include_direct
        b = np.zeros(M, complex) if b is None else np.asarray(b, dtype=complex).reshape(M)
        self.A = A
        self.b = b
        if M == 0:
            self.sigma_max = 0.0
            self.rank = 0
            U = np.zeros((N, 0), complex)
            s = np.zeros(0)
            Vh = np.zeros((0, 0), complex)
        else:
            U, s, Vh = np.linalg.svd(A, full_matrices=False)
            self.sigma_max = float(s[0])
            tol = max(N, M) * np.finfo(float).eps * self.sigma_max
            self.rank = int(np.sum(s > tol))
        r = self.rank
        U, s, Vh = U[:, :r], s[:r], Vh[:r]
        self.basis = np.ascontiguousarray(U.conj())
        self.basis_h = np.ascontiguousarray(U.T)
        self.rhs = -(Vh.conj() @ b) / s if r else np.zeros(0, complex)
        if np.any(b != 0):
            b_fit = Vh.T @ (Vh.conj() @ b) if r else np.zeros_like(b)
            self.consistent = bool(np.linalg.norm(b - b_fit) <= np.sqrt(np.finfo(float).eps) * np.linalg.norm(b))
        else:
            self.consistent = True
        self.N, self.M = N, M

    @classmethod
    def from_realization(cls, realization: ChannelRealization, include_direct: bool = True):
        b = realization.stacked_direct if include_direct else None
        return cls(realization.stacked_interference, b, include_direct=include_direct)

    @property
    def is_point(self) -> bool:
        """S1 is a single point (A^T has a trivial null space)."""
        return self.rank == self.N

    def residual(self, v) -> float:
        return float(np.linalg.norm(self.A.T @ v + self.b))

    def check(self):
        if not self.consistent:
            raise InfeasibleAffineError(
                f"b is not in the range of A^T (rank {self.rank} < {self.M} constraints)"
            )


def project_null_space(problem: NullingProblem, v) -> np.ndarray:
    problem.check()
    v = np.asarray(v, dtype=complex)
    if problem.rank == 0:
        return v.copy()
    return v - problem.basis @ (problem.basis_h @ v - problem.rhs)


def project_torus(v, rng=None) -> np.ndarray:
    """Elementwise ``v / |v|``; exact zeros get a uniform random phase."""
    v = np.asarray(v, dtype=complex)
    mag = np.abs(v)
    out = np.empty_like(v)
    nz = mag > 0
    normal = mag >= np.finfo(float).tiny
    out[normal] = v[normal] / mag[normal]
    # complex division overflows for subnormal magnitudes; take the phase directly there
    sub = nz & ~normal
    out[sub] = np.exp(1j * np.angle(v[sub]))
    if not np.all(nz):
        rng = np.random.default_rng(rng)
        out[~nz] = np.exp(1j * rng.uniform(-np.pi, np.pi, int(np.count_nonzero(~nz))))
    return out


def random_torus_point(n, rng=None) -> np.ndarray:
    """Unit-modulus vector with i.i.d. uniform phases in (-pi, pi]."""
    rng = np.random.default_rng(rng)
    return np.exp(1j * rng.uniform(-np.pi, np.pi, n))


def _dominant_eigvec(R):
    w, V = np.linalg.eigh(R)
    x = V[:, -1]
    lead = np.flatnonzero(np.abs(x) > 1e-12 * np.abs(x).max())[0]
    return x * np.exp(-1j * np.angle(x[lead]))


def eigen_initialize(realization: ChannelRealization, rng=None) -> np.ndarray:
    """Torus projection of the dominant eigenvector of ``sum_k a_kk^* a_kk^T``.

    The eigenvector is phase-normalised so its first significant entry is real
    positive, which makes the output independent of the LAPACK phase choice.
    """
    K = realization.num_users
    D = realization.cascaded[np.arange(K), np.arange(K)]
    R = D.conj().T @ D
    return project_torus(_dominant_eigvec(R), rng)


def _isr_from_gains(G, powers, weighted=True):
    """Max ISR (linear) and residual from effective gains ``G[..., k, j]``."""
    K = G.shape[-1]
    P = np.abs(G) ** 2
    if weighted:
        P = P * powers[..., None, :]
    diag = np.diagonal(P, axis1=-2, axis2=-1)
    off = ~np.eye(K, dtype=bool)
    # sum off-diagonal terms directly; row_sum - diag loses everything below eps * signal
    interf = (P * off).sum(axis=-1)
    resid = np.sqrt((np.abs(G) ** 2)[..., off].sum(axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        isr = np.where(diag > 0, interf / np.where(diag > 0, diag, 1.0), np.inf)
    return isr.max(axis=-1), resid


def _to_db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


def max_isr_db(realization: ChannelRealization, v, powers=None, include_direct=True, weighted=True) -> float:
    """Worst-link interference-to-signal ratio in dB.

    ``-inf`` when all interference is exactly zero, ``+inf`` when some link
    has zero desired signal. ``weighted=False`` ignores transmit powers.
    """
    K = realization.num_users
    powers = np.ones(K) if powers is None else np.broadcast_to(np.asarray(powers, float), (K,))
    G = realization.effective(v, include_direct)
    isr, _ = _isr_from_gains(G, powers, weighted)
    return float(_to_db(isr))


@dataclass
class SolverReport:
    """Outcome and per-iteration traces of one solver run.

    ``terminated`` is ``"converged"``, ``"max_iters"`` or ``"infeasible_floor"``.
    Every non-empty trace has one entry per iteration.
    """

    solution: np.ndarray
    iterations: int
    terminated: str
    method: str = ""
    residual_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    isr_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sum_rate_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    min_rate_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    grad_norm_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    flags: tuple = ()
    stages: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.terminated == "converged"

    @property
    def final_isr_db(self) -> float:
        return float(self.isr_trace[-1]) if len(self.isr_trace) else float("nan")

    def first_iteration_below(self, isr_db: float):
        """1-based iteration at which the ISR trace first reaches ``isr_db``, else None."""
        hit = np.flatnonzero(self.isr_trace <= isr_db)
        return int(hit[0]) + 1 if hit.size else None

    def to_dict(self, include_traces: bool = True) -> dict:
        def clean(x):
            return [None if not np.isfinite(t) else float(t) for t in np.asarray(x, float)]

        out = {
            "method": self.method,
            "iterations": self.iterations,
            "terminated": self.terminated,
            "flags": list(self.flags),
            "final_isr_db": None if not np.isfinite(self.final_isr_db) else self.final_isr_db,
            "solution": np.stack([self.solution.real, self.solution.imag], -1).tolist(),
            "info": self.info,
        }
        if include_traces:
            for name in ("residual_trace", "isr_trace", "sum_rate_trace", "min_rate_trace", "grad_norm_trace"):
                trace = getattr(self, name)
                if len(trace):
                    out[name] = clean(trace)
        out["stages"] = [s.to_dict(include_traces) for s in self.stages]
        return out

    def to_json(self, include_traces: bool = True) -> str:
        return json.dumps(self.to_dict(include_traces), indent=1)

    def write_trace_csv(self, path):
        """Nulling traces as ``iter,residual,max_isr_db`` plus utility columns when present."""
        cols = {"residual": self.residual_trace, "max_isr_db": self.isr_trace}
        for name, trace in (
            ("sum_rate_bits", self.sum_rate_trace),
            ("min_rate_bits", self.min_rate_trace),
            ("grad_norm", self.grad_norm_trace),
        ):
            if len(trace):
                cols[name] = trace
        cols = {k: v for k, v in cols.items() if len(v)}
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", *cols])
            for i in range(self.iterations):
                w.writerow([i + 1, *(repr(float(c[i])) for c in cols.values())])


def _powers_for(K, powers):
    if powers is None:
        return np.ones(K)
    return np.broadcast_to(np.asarray(powers, dtype=float), (K,)).copy()


def alternating_projection(
    problem: NullingProblem,
    init,
    realization: ChannelRealization,
    powers=None,
    max_iters: int = 5000,
    isr_threshold_db: float = -60.0,
    rng=None,
    weighted: bool = True,
) -> SolverReport:
    """Iterate ``v <- P_S2(P_S1(v))`` until the max ISR reaches the threshold.

    Stops early with ``infeasible_floor`` when the residual stalls (relative
    change below 1e-12 over 100 iterations) or when S1 is a single point
    that the first cycle fails to place on the torus.
    """
    return alternating_projection_batch(
        [problem], [init], [realization], powers, max_iters, isr_threshold_db, [rng], weighted
    )[0]


def alternating_projection_batch(
    problems,
    inits,
    realizations,
    powers=None,
    max_iters: int = 5000,
    isr_threshold_db: float = -60.0,
    rngs=None,
    weighted: bool = True,
):
    """Run independent AP instances in lock-step; returns one report per instance.

    All instances must share K and N. Per-instance arithmetic is the same as
    a solo run: every product is a per-slice matrix product.
    """
    T = len(problems)
    if T == 0:
        return []
    for p in problems:
        p.check()
    K = realizations[0].num_users
    N = realizations[0].num_elements
    pw = _powers_for(K, powers)
    rngs = [np.random.default_rng(r) for r in (rngs if rngs is not None else [None] * T)]
    R = max(p.rank for p in problems)
    Bh = np.zeros((T, R, N), complex)
    B = np.zeros((T, N, R), complex)
    c = np.zeros((T, R, 1), complex)
    for t, p in enumerate(problems):
        r = p.rank
        Bh[t, :r] = p.basis_h
        B[t, :, :r] = p.basis
        c[t, :r, 0] = p.rhs
    Ht = np.stack([z.h_t for z in realizations])
    HrT = np.stack([z.h_r for z in realizations])
    Dir = np.stack([z.direct if p.include_direct else np.zeros((K, K)) for z, p in zip(realizations, problems)])
    V = np.stack([np.asarray(v, dtype=complex) for v in inits])
    if np.any(np.abs(np.abs(V) - 1) > 1e-9):
        raise ValueError("initial points must be unit-modulus")
    point = np.array([p.is_point for p in problems])
    thr = 10 ** (isr_threshold_db / 10) if np.isfinite(isr_threshold_db) else (0.0 if isr_threshold_db < 0 else np.inf)

    def gains(idx, Vs):
        return np.matmul(HrT[idx], np.swapaxes(Ht[idx] * Vs[:, None, :], 1, 2)) + Dir[idx]

    res_tr = np.zeros((max_iters, T))
    isr_tr = np.zeros((max_iters, T))
    iters = np.zeros(T, dtype=int)
    status = np.array(["max_iters"] * T, dtype=object)
    sol = V.copy()

    isr0, _ = _isr_from_gains(gains(np.arange(T), V), pw, weighted)
    done0 = isr0 <= thr
    status[done0] = "converged"
    active = np.flatnonzero(~done0)
    cur = V[active]
    for it in range(max_iters):
        if active.size == 0:
            break
        coef = np.matmul(Bh[active], cur[:, :, None]) - c[active]
        proj = cur - np.matmul(B[active], coef)[:, :, 0]
        mag = np.abs(proj)
        zero = mag == 0
        if np.any(zero):
            mag_safe = np.where(zero, 1.0, mag)
            nxt = proj / mag_safe
            for row in np.flatnonzero(zero.any(axis=1)):
                nxt[row] = project_torus(proj[row], rngs[active[row]])
        else:
            nxt = proj / mag
        cur = nxt
        isr, resid = _isr_from_gains(gains(active, cur), pw, weighted)
        res_tr[it, active] = resid
        isr_tr[it, active] = _to_db(isr)
        iters[active] = it + 1
        finished = isr <= thr
        status[active[finished]] = "converged"
        floor = point[active] & ~finished
        if it >= PLATEAU_WINDOW:
            old = res_tr[it - PLATEAU_WINDOW, active]
            floor |= (~finished) & (np.abs(resid - old) <= PLATEAU_RTOL * resid)
        status[active[floor]] = "infeasible_floor"
        stop = finished | floor
        if np.any(stop):
            sol[active[stop]] = cur[stop]
            keep = ~stop
            active, cur = active[keep], cur[keep]
    sol[active] = cur

    reports = []
    for t in range(T):
        n = iters[t]
        reports.append(
            SolverReport(
                solution=sol[t],
                iterations=int(n),
                terminated=str(status[t]),
                method="ap",
                residual_trace=res_tr[:n, t].copy(),
                isr_trace=isr_tr[:n, t].copy(),
            )
        )
    return reports


def projected_gradient_baseline(
    problem: NullingProblem,
    init,
    realization: ChannelRealization,
    powers=None,
    max_iters: int = 50000,
    alpha: float = 0.3,
    beta: float = 0.8,
    isr_threshold_db: float = -60.0,
    rng=None,
    weighted: bool = True,
    max_backtracks: int = 60,
) -> SolverReport:
    """Projected gradient descent on ``||A^T v + b||^2`` with Armijo backtracking.

    The objective is evaluated on ``A / sigma_max(A)`` so the unit initial
    step is meaningful whatever the channel scale. The sufficient-decrease
    test is applied to the unprojected trial point.
    """
    if not (0 < alpha < 0.5 and 0 < beta < 1):
        raise ValueError("need alpha in (0, 0.5) and beta in (0, 1)")
    problem.check()
    rng = np.random.default_rng(rng)
    K = realization.num_users
    pw = _powers_for(K, powers)
    scale = problem.sigma_max if problem.sigma_max > 0 else 1.0
    AT = problem.A.T / scale
    Ac = problem.A.conj() / scale
    bn = problem.b / scale
    v = np.asarray(init, dtype=complex).copy()
    thr = 10 ** (isr_threshold_db / 10)

    def measure(x):
        G = realization.effective(x, problem.include_direct)
        isr, resid = _isr_from_gains(G, pw, weighted)
        return float(isr), float(resid)

    isr, _ = measure(v)
    if isr <= thr:
        return SolverReport(v, 0, "converged", method="pgd")
    res_tr, isr_tr, flags = [], [], set()
    status = "max_iters"
    for it in range(max_iters):
        r = AT @ v + bn
        g = 2 * (Ac @ r)
        gg = float(np.vdot(g, g).real)
        if gg == 0:
            status = "infeasible_floor"
            break
        f0 = float(np.vdot(r, r).real)
        step = 1.0
        for _ in range(max_backtracks):
            trial = AT @ (v - step * g) + bn
            if np.vdot(trial, trial).real <= f0 - alpha * step * gg:
                break
            step *= beta
        else:
            flags.add("armijo_min_step")
        v = project_torus(v - step * g, rng)
        isr, resid = measure(v)
        res_tr.append(resid)
        isr_tr.append(_to_db(isr))
        if isr <= thr:
            status = "converged"
            break
        if it >= PLATEAU_WINDOW and abs(resid - res_tr[-1 - PLATEAU_WINDOW]) <= PLATEAU_RTOL * resid:
            status = "infeasible_floor"
            break
    if "armijo_min_step" in flags:
        warnings.warn("Armijo backtracking hit the minimum step", RuntimeWarning, stacklevel=2)
    return SolverReport(
        v,
        len(res_tr),
        status,
        method="pgd",
        residual_trace=np.array(res_tr),
        isr_trace=np.array(isr_tr),
        flags=tuple(sorted(flags)),
    )


def necessary_condition_direct(realization: ChannelRealization):
    """Check ``||a_kj||_1 >= |b_kj|`` for every interfering pair.

    Returns ``({(k, j): satisfied}, all_satisfied)``.
    """
    K = realization.num_users
    l1 = np.abs(realization.cascaded).sum(axis=2)
    mag = np.abs(realization.direct)
    ok = {(k, j): bool(l1[k, j] >= mag[k, j]) for k in range(K) for j in range(K) if j != k}
    return ok, all(ok.values())
