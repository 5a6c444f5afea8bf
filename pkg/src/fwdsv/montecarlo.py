"""Simulation oracles for the affine pricing formulas.

Jump models (pure-jump and mean-reverting): the priced payoff depends on the
curve only through the scalar Z_s = log F(s, T1), so paths simulate one
scalar Brownian integral per path.  Conditional on the jump times, each
volatility mode y_n(s) is piecewise deterministic:

    y_n(s) = y_n(0) e^{-2 a_n s} + d_n sum_{tau_i <= s} e^{-2 a_n (s - tau_i)},

jumps arriving at Poisson rate beta (exact exponential inter-arrival times).
Z is advanced by Euler steps with instantaneous variance
v(s) = sum_n d_n y_n(s) f_n(T1 - s)^2 and the drift implied by the model's
upsilon convention; for the no-arbitrage convention the drift is exactly
-v(s)/2 step by step, so the simulated forward is a discrete martingale.

Wishart model: the rank x rank matrix Y is advanced by Euler-Maruyama with
per-step symmetrization and PSD projection (eigenvalue clipping, the clip
rate is reported); the log-forward uses the quadratic-form variance
v(s) = B(s)^T Y(s) B(s), B_k(s) = sqrt(d_k) f_k(T1 - s).

Reproducibility: paths are split into fixed-size blocks; block i draws from
Philox keyed by (seed, i), and block results are reduced in index order, so
estimates are bitwise reproducible for a given (seed, n_paths, n_steps) no
matter how blocks are scheduled.  Antithetic pairs share one jump (or Y)
path and use +/- the same Brownian draws; standard errors come from
per-pair averages.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import BasisSystem, ConstantCurve, as_curve
from .curve import NelsonSiegelCurve
from .errors import ConfigError, NumericalError
from .riccati_jump import JumpModelParams
from .riccati_wishart import WishartModelParams

BLOCK_PATHS = 16384

# Fraction of Euler steps allowed to need PSD clipping beyond the tolerance
# before the Wishart simulation is rejected as unreliable.
PSD_CLIP_TOL = 1e-8
PSD_CLIP_MAX_RATE = 0.05


@dataclass(frozen=True)
class McConfig:
    """Path count, step count, seed and antithetic switch for one MC run."""

    n_paths: int = 100_000
    n_steps: int = 512
    seed: int = 20240915
    antithetic: bool = True

    def __post_init__(self):
        if self.n_paths < 100:
            raise ConfigError("n_paths must be at least 100")
        if self.n_steps < 1:
            raise ConfigError("n_steps must be at least 1")
        if self.antithetic and self.n_paths % 2:
            raise ConfigError("antithetic sampling requires an even n_paths")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with standard error; complex means carry per-component errors.

    clip_rate is the fraction of matrix Euler steps whose PSD projection
    clipped an eigenvalue below -PSD_CLIP_TOL (zero for scalar simulations).
    """

    mean: float | complex
    std_error: float
    n_effective: int
    se_real: float = 0.0
    se_imag: float = 0.0
    clip_rate: float = 0.0


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, block], dtype=np.uint64)))


def _unit_ranges(n_units: int):
    """Fixed partition of sample units into blocks (independent of workers)."""
    edges = list(range(0, n_units, BLOCK_PATHS)) + [n_units]
    return [(b, edges[i], edges[i + 1]) for i, b in enumerate(range(len(edges) - 1))]


def _reduce_stats(values_per_block):
    """Combine per-block sample arrays (in block order) into mean / SE."""
    total = np.concatenate(values_per_block)
    n = total.size
    mean = total.mean()
    if np.iscomplexobj(total):
        se_re = float(total.real.std(ddof=1) / np.sqrt(n))
        se_im = float(total.imag.std(ddof=1) / np.sqrt(n))
        return McEstimate(mean=complex(mean), std_error=max(se_re, se_im),
                          n_effective=n, se_real=se_re, se_imag=se_im)
    se = float(total.std(ddof=1) / np.sqrt(n))
    return McEstimate(mean=float(mean), std_error=se, n_effective=n)


def _run_blocks(n_units: int, worker: Callable[[int, int], np.ndarray], threads: int = 1):
    ranges = _unit_ranges(n_units)
    if threads <= 1 or len(ranges) == 1:
        chunks = [worker(block, hi - lo) for block, lo, hi in ranges]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [pool.submit(worker, block, hi - lo) for block, lo, hi in ranges]
            chunks = [f.result() for f in futs]
    return chunks


def _draw_jump_times(rng, n: int, beta: float, horizon: float) -> np.ndarray:
    """Exponential inter-arrival jump times, padded with +inf beyond the horizon."""
    cap = int(beta * horizon + 10.0 * np.sqrt(beta * horizon + 1.0) + 20.0)
    gaps = rng.exponential(1.0 / beta, size=(n, cap))
    times = np.cumsum(gaps, axis=1)
    while np.any(times[:, -1] < horizon):
        extra = rng.exponential(1.0 / beta, size=(n, cap))
        times = np.concatenate([times, times[:, -1:] + np.cumsum(extra, axis=1)], axis=1)
    return np.where(times < horizon, times, np.inf)


def _upsilon_grid(system, model, theta, T1, s_left, h0):
    """Drift coefficients upsilon_n(s_m) on the step grid; None when scale is 0.

    Works for either parameter type: only d, h0 and the upsilon convention
    are read.
    """
    gamma = model.upsilon_scale
    if gamma == 0.0:
        return None
    n_modes = model.d.size
    if model.upsilon_rolling:
        if not isinstance(h0, ConstantCurve):
            raise NotImplementedError("rolling drift is implemented for constant h0 only")
        c = h0.c * system.basis_values(n_modes, T1 - s_left)
    else:
        c_fix = np.array([system.c_coefficient(k, theta, model.h0) for k in range(1, n_modes + 1)])
        c = np.repeat(c_fix[:, None], s_left.size, axis=1)
    return gamma * c


def mc_price_jump(model: JumpModelParams, req, cfg: McConfig,
                  system: BasisSystem, curve: NelsonSiegelCurve,
                  threads: int = 1) -> McEstimate:
    """Monte Carlo price of the option in `req` under a jump volatility model.

    K = 0 calls are allowed and estimate the forward mean E[F(T0, T1)]
    (martingale diagnostic).  The returned standard error treats antithetic
    pairs as the independent sampling unit.
    """
    T0, theta = float(req.T0), float(req.theta)
    K, kind = float(req.K), req.option_kind
    if kind not in ("call", "put"):
        raise ConfigError(f"option_kind must be 'call' or 'put', got {kind!r}")
    if K < 0:
        raise ConfigError("strike must be nonnegative for simulation")
    if T0 <= 0:
        raise ConfigError("simulation requires T0 > 0")
    if model.beta * T0 / cfg.n_steps > 0.1:
        warnings.warn(
            f"n_steps={cfg.n_steps} is coarse for beta*T0={model.beta * T0:.2f}; "
            "jump effects may be under-resolved", RuntimeWarning)

    T1 = T0 + theta
    dt = T0 / cfg.n_steps
    s_left = dt * np.arange(cfg.n_steps)
    n_modes = model.d.size
    fgrid = system.basis_values(n_modes, T1 - s_left)          # (N, steps)
    f2grid = fgrid * fgrid
    h0 = as_curve(1.0 if model.h0 is None else model.h0)
    ups = _upsilon_grid(system, model, theta, T1, s_left, h0)  # (N, steps) or None
    log_f0 = float(curve.log_forward(T1))
    decay = np.exp(-2.0 * model.a * dt)                        # per-mode step decay

    antithetic = cfg.antithetic
    n_units = cfg.n_paths // 2 if antithetic else cfg.n_paths

    def worker(block: int, n: int) -> np.ndarray:
        rng = _block_rng(cfg.seed, block)
        times = _draw_jump_times(rng, n, model.beta, T0)
        # Sparse per-step jump lists: stable path order within each step.
        path_idx, jump_idx = np.nonzero(np.isfinite(times))
        tau = times[path_idx, jump_idx]
        step_of = np.minimum((tau / dt).astype(np.int64), cfg.n_steps - 1)
        order = np.argsort(step_of, kind="stable")
        step_sorted, path_sorted, tau_sorted = step_of[order], path_idx[order], tau[order]
        bounds = np.searchsorted(step_sorted, np.arange(cfg.n_steps + 1))

        y = np.repeat(model.y0[:, None], n, axis=1)            # (N, n)
        V = np.zeros(n)
        drift = np.zeros(n)
        noise = np.zeros(n)
        jbuf = np.zeros(n)
        for m in range(cfg.n_steps):
            v = model.d @ (y * f2grid[:, m][:, None])
            V += v * dt
            if ups is not None:
                drift += (model.d * ups[:, m] * fgrid[:, m]) @ y * dt
            noise += np.sqrt(np.maximum(v, 0.0) * dt) * rng.standard_normal(n)
            lo, hi = bounds[m], bounds[m + 1]
            t_end = dt * (m + 1)
            if hi > lo:
                for k in range(n_modes):
                    jbuf[:] = 0.0
                    np.add.at(jbuf, path_sorted[lo:hi],
                              np.exp(-2.0 * model.a[k] * (t_end - tau_sorted[lo:hi])))
                    y[k] = y[k] * decay[k] + model.d[k] * jbuf
            else:
                y *= decay[:, None]
        base = log_f0 + drift
        f_plus = np.exp(base + noise)
        if not antithetic:
            return _payoff(f_plus, K, kind)
        f_minus = np.exp(base - noise)
        return 0.5 * (_payoff(f_plus, K, kind) + _payoff(f_minus, K, kind))

    return _reduce_stats(_run_blocks(n_units, worker, threads))


def _payoff(f: np.ndarray, K: float, kind: str) -> np.ndarray:
    return np.maximum(f - K, 0.0) if kind == "call" else np.maximum(K - f, 0.0)


def mc_forward_jump(model: JumpModelParams, T0: float, theta: float, cfg: McConfig,
                    system: BasisSystem, curve: NelsonSiegelCurve) -> McEstimate:
    """Sample mean of F(T0, T1) under the jump model (martingale check)."""
    from .pricer import PricingRequest

    req = PricingRequest(model=model, T0=T0, theta=theta, K=0.0, option_kind="call")
    return mc_price_jump(model, req, cfg, system, curve)


def mc_mgf_wishart(model: WishartModelParams, nu: float, lam: float, theta: float,
                   u2: np.ndarray | None, T0: float, cfg: McConfig,
                   system: BasisSystem, curve: NelsonSiegelCurve,
                   threads: int = 1) -> McEstimate:
    """Empirical E[exp((nu + i lam) log F(T0, T1) - Tr(Y_T0 u2))].

    Euler-Maruyama on the matrix volatility with per-step symmetrization and
    PSD projection; raises if more than PSD_CLIP_MAX_RATE of path-steps clip
    eigenvalues below -PSD_CLIP_TOL.
    """
    if model.rank > 8:
        raise ConfigError("matrix simulation is intended for small ranks (<= 8)")
    if T0 <= 0:
        raise ConfigError("simulation requires T0 > 0")
    z = complex(nu, lam)
    T1 = T0 + theta
    dt = T0 / cfg.n_steps
    s_left = dt * np.arange(cfg.n_steps)
    n = model.rank
    u2 = np.zeros((n, n)) if u2 is None else np.asarray(u2)
    if u2.shape != (n, n):
        raise ConfigError(f"u2 must be {n}x{n}")
    Bgrid = np.sqrt(model.d)[:, None] * system.basis_values(n, T1 - s_left)   # (n, steps)
    h0 = as_curve(1.0 if model.h0 is None else model.h0)
    ups = _upsilon_grid(system, model, theta, T1, s_left, h0)
    sqrt_d = np.sqrt(model.d)
    ups_vec = None if ups is None else sqrt_d[:, None] * ups   # D^{1/2} upsilon on grid
    log_f0 = float(curve.log_forward(T1))
    sqrtQ = np.diag(np.sqrt(model.q))
    drift_const = model.dof_value * np.diag(model.q)           # dof * Q
    a = model.a

    antithetic = cfg.antithetic
    n_units = cfg.n_paths // 2 if antithetic else cfg.n_paths
    clip_counts: dict[int, int] = {}

    def worker(block: int, nblk: int) -> np.ndarray:
        rng = _block_rng(cfg.seed, block)
        Y = np.repeat(np.diag(model.y0)[None, :, :], nblk, axis=0)
        V = np.zeros(nblk)
        drift = np.zeros(nblk)
        noise = np.zeros(nblk)
        local_clip = 0
        for m in range(cfg.n_steps):
            w, vecs = np.linalg.eigh(Y)
            local_clip += int(np.count_nonzero(w[:, 0] < -PSD_CLIP_TOL))
            w_pos = np.maximum(w, 0.0)
            Y = (vecs * w_pos[:, None, :]) @ np.swapaxes(vecs, 1, 2)
            sqrtY = (vecs * np.sqrt(w_pos)[:, None, :]) @ np.swapaxes(vecs, 1, 2)
            B = Bgrid[:, m]
            v = np.einsum("pij,i,j->p", Y, B, B)
            V += v * dt
            if ups_vec is not None:
                drift += np.einsum("pij,i,j->p", Y, B, ups_vec[:, m]) * dt
            noise += np.sqrt(np.maximum(v, 0.0) * dt) * rng.standard_normal(nblk)
            G = rng.standard_normal((nblk, n, n)) * np.sqrt(dt)
            half = sqrtY @ G @ sqrtQ
            Y = Y + dt * (drift_const[None, :, :] - Y * a[None, None, :] - a[None, :, None] * Y)
            Y = Y + half + np.swapaxes(half, 1, 2)
            Y = 0.5 * (Y + np.swapaxes(Y, 1, 2))
        tr_u2 = np.einsum("pij,ji->p", Y, u2)
        base = log_f0 + drift
        out = 0.5 * (np.exp(z * (base + noise) - tr_u2) + np.exp(z * (base - noise) - tr_u2)) \
            if antithetic else np.exp(z * (base + noise) - tr_u2)
        clip_counts[block] = local_clip
        return out

    est = _reduce_stats(_run_blocks(n_units, worker, threads))
    rate = sum(clip_counts.values()) / max(n_units * cfg.n_steps, 1)
    if rate > PSD_CLIP_MAX_RATE:
        raise NumericalError(
            f"PSD projection clipped eigenvalues below -{PSD_CLIP_TOL:g} in {100 * rate:.1f}% "
            "of steps; increase n_steps or dof")
    return McEstimate(mean=est.mean, std_error=est.std_error, n_effective=est.n_effective,
                      se_real=est.se_real, se_imag=est.se_imag, clip_rate=float(rate))


def mc_forward_wishart(model: WishartModelParams, T0: float, theta: float, cfg: McConfig,
                       system: BasisSystem, curve: NelsonSiegelCurve) -> McEstimate:
    """Sample mean of F(T0, T1) under the Wishart model (martingale check)."""
    est = mc_mgf_wishart(model, 1.0, 0.0, theta, None, T0, cfg, system, curve)
    return McEstimate(mean=float(est.mean.real), std_error=est.se_real,
                      n_effective=est.n_effective)
