"""Finite-rank matrix Riccati scheme for the Wishart volatility model.

The transform exponent is iterated on the Gram matrix
F(t)[i, j] = <q2(t, u) f_i, f_j> by explicit Euler:

    F(t + dt) = F + (dt/2)(F N + N F) - (dt/4) z^2 B^T B
                - (dt/4)(F + F^T) N (F + F^T),
    P(t + dt) = P + dt * dof * (1/2) sum_k F_kk / k^2,

with N = diag(1/k^2), row vector B_k = f_k(t + theta)/k and z = nu + i lambda.
The transform approximation is then

    E[exp(z <X_T, u_theta> - Tr(Y_T u2))]
        ~ exp(-P(T) + z X_0(T + theta) - Tr(Y_0 F(T))).

This is the published finite-rank scheme verbatim; note it carries no
forward-drift term.  As in the jump module, `upsilon_scale` /
`upsilon_rolling` optionally add the drift cross term
-(dt/2) gamma z B^T C (C_k = c_k(.)/k), with (gamma = -1/2, rolling) giving
the exact no-arbitrage drift; the scale defaults to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .basis import BasisSystem, ConstantCurve, as_curve
from .errors import RiccatiBlowUpError

BLOWUP_GUARD = 1e12

# Default Euler resolution: 512 steps for horizons up to a year, scaled
# linearly beyond (first-order scheme; see the step-halving test).
def default_steps(t: float) -> int:
    return max(1, int(np.ceil(512 * max(t, 1.0))))


def _inverse_squares(n: int) -> np.ndarray:
    return 1.0 / np.arange(1, n + 1, dtype=float) ** 2


@dataclass(frozen=True)
class WishartModelParams:
    """Finite-rank Wishart volatility parameters, diagonal in the curve basis.

    rank : matrix dimension (= basis truncation).
    dof : degrees of freedom multiplying Q in the drift (default = rank).
    q_coeffs, a_coeffs : diagonals of the diffusion Q and mean reversion
        (defaults 1/k^2); used by the simulation oracle -- the Euler scheme
        above hard-codes the published N matrix.
    d_coeffs : diagonal of the loading D (default 1/(2 k^2)).
    y0_eigs : eigenvalues of Y_0 (default = Q diagonal).
    h0 : drift-direction curve (default constant 1).
    """

    rank: int
    dof: int | None = None
    q_coeffs: np.ndarray | None = None
    a_coeffs: np.ndarray | None = None
    d_coeffs: np.ndarray | None = None
    y0_eigs: np.ndarray | None = None
    h0: object = None
    upsilon_scale: float = 0.0
    upsilon_rolling: bool = False

    q: np.ndarray = field(init=False, repr=False)
    a: np.ndarray = field(init=False, repr=False)
    d: np.ndarray = field(init=False, repr=False)
    y0: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be at least 1")
        if self.dof is not None and self.dof < 1:
            raise ValueError("dof must be at least 1")

        def _coerce(seq, default, name, *, positive=True):
            arr = default if seq is None else np.asarray(seq, dtype=float)[: self.rank].copy()
            if arr.size != self.rank:
                raise ValueError(f"{name} must provide at least rank={self.rank} entries")
            if positive and np.any(arr <= 0):
                raise ValueError(f"{name} entries must be positive")
            if not positive and np.any(arr < 0):
                raise ValueError(f"{name} entries must be nonnegative")
            arr.flags.writeable = False
            return arr

        inv_sq = _inverse_squares(self.rank)
        object.__setattr__(self, "q", _coerce(self.q_coeffs, inv_sq.copy(), "q_coeffs"))
        object.__setattr__(self, "a", _coerce(self.a_coeffs, inv_sq.copy(), "a_coeffs"))
        object.__setattr__(self, "d", _coerce(self.d_coeffs, 0.5 * inv_sq, "d_coeffs"))
        object.__setattr__(self, "y0", _coerce(self.y0_eigs, self.q.copy(), "y0_eigs", positive=False))

    @property
    def dof_value(self) -> int:
        return self.rank if self.dof is None else self.dof

    def with_no_arbitrage_drift(self) -> "WishartModelParams":
        """Copy with the exact martingale drift (gamma = -1/2, rolling lag)."""
        return replace(self, upsilon_scale=-0.5, upsilon_rolling=True,
                       q_coeffs=self.q, a_coeffs=self.a, d_coeffs=self.d, y0_eigs=self.y0)


@dataclass
class RiccatiMatrixState:
    """Gram matrix F, accumulated P and current time of the Euler flow."""

    F: np.ndarray
    P: complex
    t: float

    @classmethod
    def initial(cls, rank: int, u2: np.ndarray | None = None) -> "RiccatiMatrixState":
        F = np.zeros((rank, rank), dtype=complex) if u2 is None else np.array(u2, dtype=complex)
        if F.shape != (rank, rank):
            raise ValueError(f"u2 must be a {rank}x{rank} matrix")
        return cls(F=F, P=0.0 + 0.0j, t=0.0)


def _drift_vector(system: BasisSystem, m: WishartModelParams, theta: float, t: float) -> np.ndarray | None:
    """C_k = c_k(lag)/k for the optional drift cross term; None when disabled."""
    if m.upsilon_scale == 0.0:
        return None
    k = np.arange(1, m.rank + 1, dtype=float)
    if m.upsilon_rolling:
        h0 = as_curve(1.0 if m.h0 is None else m.h0)
        if not isinstance(h0, ConstantCurve):
            raise NotImplementedError("rolling drift is implemented for constant h0 only")
        c = h0.c * system.basis_values(m.rank, np.array([t + theta]))[:, 0]
    else:
        c = np.array([system.c_coefficient(n, theta, m.h0) for n in range(1, m.rank + 1)])
    return c / k


def wishart_riccati_step(state: RiccatiMatrixState, p, m: WishartModelParams,
                         delta: float, system: BasisSystem) -> RiccatiMatrixState:
    """One explicit Euler step of the matrix Riccati flow.

    P is advanced with the pre-step F (forward Euler of dP/dt = dof Tr(Q q2)).
    """
    if delta <= 0:
        raise ValueError("step size delta must be positive")
    n = m.rank
    k = np.arange(1, n + 1, dtype=float)
    Nd = 1.0 / k**2
    fvals = system.basis_values(n, np.array([state.t + p.theta]))[:, 0]
    B = fvals / k
    z = complex(p.nu, p.lam)
    F = state.F
    S = F + F.T
    quad = (S * Nd[None, :]) @ S
    newF = (F + 0.5 * delta * (F * Nd[None, :] + Nd[:, None] * F)
            - 0.25 * delta * z * z * np.outer(B, B) - 0.25 * delta * quad)
    C = _drift_vector(system, m, p.theta, state.t)
    if C is not None:
        newF = newF - 0.5 * delta * m.upsilon_scale * z * np.outer(B, C)
    newP = state.P + delta * m.dof_value * 0.5 * complex(np.dot(Nd, np.diag(F)))
    if np.max(np.abs(newF)) > BLOWUP_GUARD:
        raise RiccatiBlowUpError("matrix Riccati entries exceeded the blow-up guard; reduce the step size")
    return RiccatiMatrixState(F=newF, P=newP, t=state.t + delta)


def wishart_laplace(p, m: WishartModelParams, u2: np.ndarray | None, X0,
                    steps: int, system: BasisSystem) -> complex:
    """Finite-rank transform approximation exp(-P + z X_0(t+theta) - Tr(Y_0 F)).

    `u2` seeds F(0); pricing uses u2 = 0.  Tr(Y_0 F) = sum_k y0_k F_kk for the
    diagonal Y_0.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    state = RiccatiMatrixState.initial(m.rank, u2)
    if p.t > 0.0:
        delta = p.t / steps
        for _ in range(steps):
            state = wishart_riccati_step(state, p, m, delta, system)
    z = complex(p.nu, p.lam)
    tr_y0 = complex(np.dot(m.y0, np.diag(state.F)))
    return complex(np.exp(-state.P + z * float(as_curve(X0).value(p.t + p.theta)) - tr_y0))


def wishart_exponent_grid(system: BasisSystem, m: WishartModelParams, X0,
                          t: float, theta: float, nu: float, lams,
                          steps: int | None = None) -> np.ndarray:
    """Transform exponent over a lambda grid, Euler-stepping all lambdas at once.

    The basis values B(t) and the optional drift vector are lambda-independent,
    so the per-step cost is a batched rank x rank matrix product.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    z = nu + 1j * lams
    n = m.rank
    x0_val = float(as_curve(X0).value(t + theta))
    if t == 0.0:
        return z * x0_val
    steps = default_steps(t) if steps is None else int(steps)
    delta = t / steps
    k = np.arange(1, n + 1, dtype=float)
    Nd = 1.0 / k**2
    # Basis values on the step grid, computed once.
    tgrid = delta * np.arange(steps)
    fvals = system.basis_values(n, tgrid + theta)            # (n, steps)
    Bgrid = fvals / k[:, None]
    drift_on = m.upsilon_scale != 0.0
    if drift_on:
        if m.upsilon_rolling:
            Cgrid = np.empty((n, steps))
            for idx, tv in enumerate(tgrid):
                Cgrid[:, idx] = _drift_vector(system, m, theta, tv)
        else:
            Cgrid = np.repeat(_drift_vector(system, m, theta, 0.0)[:, None], steps, axis=1)
    F = np.zeros((lams.size, n, n), dtype=complex)
    P = np.zeros(lams.size, dtype=complex)
    z2 = z * z
    half_dof = 0.5 * m.dof_value
    for step in range(steps):
        B = Bgrid[:, step]
        P = P + delta * half_dof * np.einsum("k,lkk->l", Nd, F)
        S = F + np.swapaxes(F, 1, 2)
        quad = np.einsum("lik,k,lkj->lij", S, Nd, S)
        BB = np.outer(B, B)
        F = (F + 0.5 * delta * (F * Nd[None, None, :] + Nd[None, :, None] * F)
             - 0.25 * delta * z2[:, None, None] * BB[None, :, :] - 0.25 * delta * quad)
        if drift_on:
            BC = np.outer(B, Cgrid[:, step])
            F = F - 0.5 * delta * m.upsilon_scale * z[:, None, None] * BC[None, :, :]
        if np.max(np.abs(F)) > BLOWUP_GUARD:
            raise RiccatiBlowUpError("matrix Riccati entries exceeded the blow-up guard")
    tr_y0 = np.einsum("k,lkk->l", m.y0 + 0.0j, F)
    return -P + z * x0_val - tr_y0
