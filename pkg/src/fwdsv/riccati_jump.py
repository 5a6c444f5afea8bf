"""Closed-form Riccati evaluations for the jump-driven volatility models.

Covers two specifications of the volatility operator, both diagonal in the
curve basis (eigenvalues d_n for the loading D, a_n for mean reversion):

* pure-jump case (a == 0): the volatility adds a deterministic jump D at
  Poisson rate beta;
* mean-reverting case (a_n > 0): each volatility mode decays at rate 2 a_n
  between jumps.

The transform exponent for E[exp(z <X_t, u_theta>)], z = nu + i lambda, is
assembled from three pieces:

    exponent = -phi(t, z) + z X_0(t + theta) - <Y_0, psi2(t, z)>,

with the psi2 pairings reducing per mode to two scalar time integrals

    A_n(s) = int_0^s e^{-2 a_n (s-r)} f_n(r + theta)^2 dr,
    B_n(s) = int_0^s e^{-2 a_n (s-r)} f_n(r + theta) c_n(.) dr,

so that  <W, psi2(s, z)> = -sum_n w_n [ z^2/2 A_n(s) + gamma z B_n(s) ]
for weights w_n = d_n^2 (pairing against D) or y_n d_n (against Y_0), and

    phi(t, z) = beta t - beta int_0^t exp(-<D, psi2(s, z)>) ds.

The drift coefficient c_n is <f_n, S*(.) h_0>_w.  Two conventions are
supported through the model parameters: `upsilon_scale` gamma scales the
drift vector, and `upsilon_rolling` evaluates it at the remaining
time-to-delivery (c_n(theta + s) inside the integrals) instead of the fixed
delivery lag (c_n(theta)).  The default (gamma = +1, fixed lag) reproduces
the published closed forms; (gamma = -1/2, rolling) is the exact
no-arbitrage drift under which the forward is a martingale.

A_n and B_n are lambda-independent, so a `JumpExponentTables` precompute is
shared across the whole Fourier grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .basis import BasisSystem, ConstantCurve, _gl_rule, as_curve

# Node count of the Gauss-Legendre rules in the time variable (the outer
# integral of phi and the per-mode inner integrals).
TIME_QUAD_ORDER = 64


@dataclass(frozen=True)
class StripPoint:
    """A point (nu + i lambda, theta, t) on the Fourier integration strip."""

    nu: float
    lam: float
    theta: float
    t: float

    def __post_init__(self):
        if self.theta < 0:
            raise ValueError("delivery lag theta must be nonnegative")
        if self.t < 0:
            raise ValueError("time horizon t must be nonnegative")

    @property
    def z(self) -> complex:
        return complex(self.nu, self.lam)


def _default_modes(n: int) -> np.ndarray:
    k = np.arange(1, n + 1, dtype=float)
    return 0.5 / k**2


@dataclass(frozen=True)
class JumpModelParams:
    """Diagonal jump-model parameters.

    beta : jump intensity of the driving Poisson process.
    N : series truncation rank.
    d_coeffs : eigenvalues of the loading D (default 1/(2 n^2)).
    a_coeffs : mean-reversion rates (default 1/(2 n^2); all zero = pure-jump
        case, most conveniently built via the `levy` classmethod).
    y0_coeffs : eigenvalues of the initial volatility Y_0 (default = D).
    h0 : curve generating the drift direction (default constant 1).
    upsilon_scale, upsilon_rolling : drift convention, see module docstring.
    """

    beta: float
    N: int = 10
    d_coeffs: np.ndarray | None = None
    a_coeffs: np.ndarray | None = None
    y0_coeffs: np.ndarray | None = None
    h0: object = None
    upsilon_scale: float = 1.0
    upsilon_rolling: bool = False

    d: np.ndarray = field(init=False, repr=False)
    a: np.ndarray = field(init=False, repr=False)
    y0: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.N < 1:
            raise ValueError("N must be at least 1")

        def _coerce(seq, default, name, *, positive=False):
            arr = default if seq is None else np.asarray(seq, dtype=float)[: self.N].copy()
            if arr.size != self.N:
                raise ValueError(f"{name} must provide at least N={self.N} entries")
            if positive and np.any(arr <= 0):
                raise ValueError(f"{name} entries must be positive")
            if not positive and np.any(arr < 0):
                raise ValueError(f"{name} entries must be nonnegative")
            arr.flags.writeable = False
            return arr

        object.__setattr__(self, "d", _coerce(self.d_coeffs, _default_modes(self.N), "d_coeffs", positive=True))
        object.__setattr__(self, "a", _coerce(self.a_coeffs, _default_modes(self.N), "a_coeffs"))
        object.__setattr__(self, "y0", _coerce(self.y0_coeffs, self.d.copy(), "y0_coeffs"))

    @property
    def is_levy(self) -> bool:
        return bool(np.all(self.a == 0.0))

    @classmethod
    def levy(cls, beta: float = 1.0, N: int = 10, **kw) -> "JumpModelParams":
        """Pure-jump parameter set with the standard diagonal d_n = 1/(2 n^2)."""
        return cls(beta=beta, N=N, a_coeffs=np.zeros(N), **kw)

    @classmethod
    def bns(cls, beta: float = 1.0, N: int = 10, **kw) -> "JumpModelParams":
        """Mean-reverting parameter set with a_n = 1/(2 n^2)."""
        return cls(beta=beta, N=N, a_coeffs=_default_modes(N), **kw)

    def with_no_arbitrage_drift(self) -> "JumpModelParams":
        """Copy with the exact martingale drift (gamma = -1/2, rolling lag)."""
        return replace(
            self, upsilon_scale=-0.5, upsilon_rolling=True,
            d_coeffs=self.d, a_coeffs=self.a, y0_coeffs=self.y0,
        )


@dataclass(frozen=True)
class RiccatiEvaluation:
    """Transform exponent pieces at one strip point: exponent = -phi + x_pairing - y_pairing."""

    phi: complex
    x_pairing: complex
    y_pairing: complex

    @property
    def exponent(self) -> complex:
        return -self.phi + self.x_pairing - self.y_pairing


def _drift_fixed_coeffs(system: BasisSystem, m: JumpModelParams, theta: float) -> np.ndarray:
    """c_n(theta) = <f_n, S*(theta) h_0>_w for n = 1..N."""
    return np.array([system.c_coefficient(n, theta, m.h0) for n in range(1, m.N + 1)])


def _mode_integrals(system, m, theta, s_points, *, kernel: bool):
    """Per-mode integrals A_n(s), B_n(s) at the requested time points.

    Single TIME_QUAD_ORDER Gauss-Legendre rule on each [0, s]; the
    mean-reversion kernel e^{-2 a_n (s - r)} is applied per mode when
    `kernel` is set.  B_n carries the drift coefficient (fixed-lag outside
    the integral, rolling inside) but not the scale gamma.
    """
    s = np.atleast_1d(np.asarray(s_points, dtype=float))
    gx, gw = _gl_rule(TIME_QUAD_ORDER)
    half = 0.5 * s
    r = half[:, None] * (gx[None, :] + 1.0)           # (S, Q) nodes on [0, s]
    wr = half[:, None] * gw[None, :]
    fv = system.basis_values(m.N, (r + theta).ravel()).reshape(m.N, s.size, r.shape[1])
    if kernel:
        decay = np.exp(-2.0 * m.a[:, None, None] * (s[None, :, None] - r[None, :, :]))
    else:
        decay = 1.0
    A = np.sum(fv * fv * decay * wr[None, :, :], axis=2)
    if m.upsilon_rolling:
        h0 = as_curve(1.0 if m.h0 is None else m.h0)
        if not isinstance(h0, ConstantCurve):
            raise NotImplementedError("rolling drift is implemented for constant h0 only")
        B = h0.c * A if not kernel else np.sum(fv * (h0.c * fv) * decay * wr[None, :, :], axis=2)
    else:
        c = _drift_fixed_coeffs(system, m, theta)
        B = c[:, None] * np.sum(fv * decay * wr[None, :, :], axis=2)
    return A, B


def _pairing(system, m, p: StripPoint, s, weights, *, kernel: bool) -> complex:
    """-sum_n w_n [ z^2/2 A_n(s) + gamma z B_n(s) ] at a single time s."""
    if s == 0.0:
        return 0.0 + 0.0j
    A, B = _mode_integrals(system, m, p.theta, [s], kernel=kernel)
    z = p.z
    return complex(
        -(0.5 * z * z * np.dot(weights, A[:, 0]) + m.upsilon_scale * z * np.dot(weights, B[:, 0]))
    )


def d_psi2_pairing_levy(p: StripPoint, m: JumpModelParams, s: float, system: BasisSystem) -> complex:
    """<D, psi2(s, u)> for the pure-jump case (no mean-reversion kernel)."""
    return _pairing(system, m, p, s, m.d * m.d, kernel=False)


def d_psi2_pairing_bns(p: StripPoint, m: JumpModelParams, t: float, system: BasisSystem) -> complex:
    """<D, psi2(t, u)> with the per-mode kernel e^{-2 a_n (t - s)}."""
    return _pairing(system, m, p, t, m.d * m.d, kernel=True)


def y_pairing_levy(p: StripPoint, m: JumpModelParams, system: BasisSystem) -> complex:
    """<Y_0, psi2(t, u)> in the pure-jump case; equals the D pairing when Y_0 = D."""
    return _pairing(system, m, p, p.t, m.y0 * m.d, kernel=False)


def y_pairing_bns(p: StripPoint, m: JumpModelParams, system: BasisSystem) -> complex:
    """<Y_0, psi2(t, u)> with mean reversion."""
    return _pairing(system, m, p, p.t, m.y0 * m.d, kernel=True)


def _phi(system, m, p: StripPoint, *, kernel: bool) -> complex:
    if p.t == 0.0:
        return 0.0 + 0.0j
    gx, gw = _gl_rule(TIME_QUAD_ORDER)
    s_nodes = 0.5 * p.t * (gx + 1.0)
    s_weights = 0.5 * p.t * gw
    A, B = _mode_integrals(system, m, p.theta, s_nodes, kernel=kernel)
    w = m.d * m.d
    SA = w @ A
    SB = w @ B
    z = p.z
    inner = 0.5 * z * z * SA + m.upsilon_scale * z * SB   # = -<D, psi2(s)>
    return complex(m.beta * (p.t - (np.exp(inner) * s_weights).sum()))


def phi_levy(p: StripPoint, m: JumpModelParams, system: BasisSystem) -> complex:
    """phi(t, u) = beta t - beta int_0^t exp(-<D, psi2(s, u)>) ds, pure-jump case."""
    if not m.is_levy:
        raise ValueError("phi_levy requires all mean-reversion rates to vanish")
    return _phi(system, m, p, kernel=False)


def phi_bns(p: StripPoint, m: JumpModelParams, system: BasisSystem) -> complex:
    """phi(t, u) with mean-reverting volatility modes (reduces to phi_levy for a == 0)."""
    return _phi(system, m, p, kernel=True)


def x_pairing(p: StripPoint, X0) -> complex:
    """<X_0, psi1(t, u)> = (nu + i lambda) X_0(t + theta)."""
    return p.z * float(as_curve(X0).value(p.t + p.theta))


def riccati_evaluation(p: StripPoint, m: JumpModelParams, X0, system: BasisSystem) -> RiccatiEvaluation:
    """Full (phi, <X_0, psi1>, <Y_0, psi2>) triple at one strip point."""
    kernel = not m.is_levy
    return RiccatiEvaluation(
        phi=_phi(system, m, p, kernel=kernel),
        x_pairing=x_pairing(p, X0),
        y_pairing=_pairing(system, m, p, p.t, m.y0 * m.d, kernel=kernel),
    )


class JumpExponentTables:
    """Lambda-independent precompute of the transform exponent for fixed (m, t, theta).

    Caches the mode integrals on the outer phi grid and at the final time, so
    each Fourier node costs O(N + TIME_QUAD_ORDER) complex operations.  This
    reuse across the lambda grid is what makes the affine pricer orders of
    magnitude faster than simulation.
    """

    def __init__(self, system: BasisSystem, m: JumpModelParams, t: float, theta: float, X0):
        kernel = not m.is_levy
        self.m = m
        self.t = float(t)
        self.x0_val = float(as_curve(X0).value(t + theta))
        w_phi = m.d * m.d
        w_y = m.y0 * m.d
        if self.t > 0.0:
            gx, gw = _gl_rule(TIME_QUAD_ORDER)
            self.s_weights = 0.5 * self.t * gw
            s_nodes = 0.5 * self.t * (gx + 1.0)
            A, B = _mode_integrals(system, m, theta, s_nodes, kernel=kernel)
            self.phiA = w_phi @ A
            self.phiB = w_phi @ B
            At, Bt = _mode_integrals(system, m, theta, [self.t], kernel=kernel)
            self.yA = float(w_y @ At[:, 0])
            self.yB = float(w_y @ Bt[:, 0])
        else:
            self.s_weights = np.zeros(0)
            self.phiA = np.zeros(0)
            self.phiB = np.zeros(0)
            self.yA = 0.0
            self.yB = 0.0

    def exponent(self, nu: float, lams: np.ndarray) -> np.ndarray:
        """-phi + z X_0(t+theta) - <Y_0, psi2> for z = nu + i*lams, vectorized."""
        z = nu + 1j * np.atleast_1d(np.asarray(lams, dtype=float))
        z2h = 0.5 * z * z
        gz = self.m.upsilon_scale * z
        # row-wise pairwise sum keeps single-point and grid evaluations bitwise equal
        inner = z2h[:, None] * self.phiA[None, :] + gz[:, None] * self.phiB[None, :]
        phi = self.m.beta * (self.t - (np.exp(inner) * self.s_weights[None, :]).sum(axis=1))
        y_pair = -(z2h * self.yA + gz * self.yB)
        return -phi + z * self.x0_val - y_pair
