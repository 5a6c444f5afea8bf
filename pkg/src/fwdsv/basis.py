"""Orthonormal basis of the exponentially weighted curve space.

The state space for log-forward curves is the Sobolev-type space of
absolutely continuous functions h on [0, inf) with

    <h, g>_w = h(0) g(0) + int_0^inf w(x) h'(x) g'(x) dx,   w(x) = exp(alpha x).

An orthonormal basis is obtained from Laguerre polynomials: f_1 = 1 and

    f_{k+2}(x) = int_0^x L_k(s) exp(-(alpha+1) s / 2) ds,   k >= 0,

so that f_n'(x) = L_{n-2}(x) exp(-(alpha+1) x / 2) for n >= 2.  Everything the
Riccati formulas need (basis values, weighted inner products, the adjoint of
the left-shift semigroup, point-evaluation representers and basis-product
integrals) lives here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureConvergenceError

# Panel budget and relative tail criterion for half-line quadrature.
MAX_PANELS = 1000
TAIL_REL_TOL = 1e-14


@lru_cache(maxsize=None)
def _gl_rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def gl_panel_rule(a: float, b: float, n_panels: int, order: int):
    """Composite Gauss-Legendre nodes and weights on [a, b] with equal panels."""
    x, w = _gl_rule(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def laguerre(n: int, x) -> np.ndarray | float:
    """Laguerre polynomial L_n(x) by the three-term recurrence.

    L_0 = 1, L_1 = 1 - x and
    L_{k+1}(x) = ((2k + 1 - x) L_k(x) - k L_{k-1}(x)) / (k + 1).
    """
    if n < 0:
        raise ValueError(f"Laguerre index must be nonnegative, got {n}")
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    prev = np.ones_like(xs)
    if n == 0:
        return float(prev[0]) if scalar else prev
    cur = 1.0 - xs
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - xs) * cur - k * prev) / (k + 1)
    return float(cur[0]) if scalar else cur


def semigroup_adjoint_apply(h, t: float, x, alpha: float):
    """Adjoint left-shift action (S*(t) h)(x) for weight w(x) = exp(alpha x).

    (S*(t) h)(x) = h(0) + h(0)(1 - e^{-alpha (x^t)})/alpha
                   + e^{-alpha t} 1_{x >= t} (h(x - t) - h(0)).
    """
    if t < 0:
        raise ValueError("shift amount must be nonnegative")
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    h = as_curve(h)
    h0 = h.value(0.0)
    out = h0 + (h0 / alpha) * (1.0 - np.exp(-alpha * np.minimum(xs, t)))
    past = xs >= t
    if np.any(past):
        out[past] += np.exp(-alpha * t) * (np.asarray(h.value(xs[past] - t), dtype=float) - h0)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class SemigroupAction:
    """Adjoint shift S*(t) on the weighted space; identity at t = 0."""

    alpha: float
    t: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.t < 0:
            raise ValueError("shift amount must be nonnegative")

    def __call__(self, h, x):
        return semigroup_adjoint_apply(h, self.t, x, self.alpha)


class ConstantCurve:
    """Curve h == c; slope is identically zero."""

    breakpoints: tuple = ()

    def __init__(self, c: float = 1.0):
        self.c = float(c)

    def value(self, x):
        xs = np.asarray(x, dtype=float)
        return self.c if xs.ndim == 0 else np.full_like(xs, self.c)

    def slope(self, x):
        xs = np.asarray(x, dtype=float)
        return 0.0 if xs.ndim == 0 else np.zeros_like(xs)


class Representer:
    """Riesz representer u_a of point evaluation at a: u_a(y) = 1 + (1 - e^{-alpha (a^y)})/alpha.

    Its weak derivative e^{-alpha y} 1_{y < a} has a kink at y = a, exposed via
    `breakpoints` so panel quadrature can split there.
    """

    def __init__(self, alpha: float, a: float):
        self.alpha = float(alpha)
        self.a = float(a)
        self.breakpoints = (self.a,)

    def value(self, y):
        ys = np.asarray(y, dtype=float)
        out = 1.0 + (1.0 - np.exp(-self.alpha * np.minimum(ys, self.a))) / self.alpha
        return float(out) if ys.ndim == 0 else out

    def slope(self, y):
        ys = np.asarray(y, dtype=float)
        out = np.where(ys < self.a, np.exp(-self.alpha * ys), 0.0)
        return float(out) if ys.ndim == 0 else out


class ShiftedCurve:
    """S*(t) h as a curve with values and weak derivative."""

    def __init__(self, h, t: float, alpha: float):
        self.h = as_curve(h)
        self.t = float(t)
        self.alpha = float(alpha)
        inner = tuple(self.t + b for b in getattr(self.h, "breakpoints", ()))
        self.breakpoints = (self.t,) + inner if self.t > 0 else inner

    def value(self, x):
        return semigroup_adjoint_apply(self.h, self.t, x, self.alpha)

    def slope(self, x):
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        h0 = self.h.value(0.0)
        out = np.where(xs < self.t, h0 * np.exp(-self.alpha * xs), 0.0)
        past = xs >= self.t
        if np.any(past):
            out[past] += np.exp(-self.alpha * self.t) * np.asarray(
                self.h.slope(xs[past] - self.t), dtype=float
            )
        return float(out[0]) if scalar else out


def as_curve(h):
    """Coerce numbers to constant curves; pass curve objects through."""
    if isinstance(h, (int, float)):
        return ConstantCurve(float(h))
    return h


class BasisFunction:
    """Basis element f_n bound to a BasisSystem, with analytic weak derivative."""

    breakpoints: tuple = ()

    def __init__(self, system: "BasisSystem", n: int):
        self.system = system
        self.n = n

    def value(self, x):
        return self.system.basis_f(self.n, x)

    def slope(self, x):
        return self.system.basis_slope(self.n, x)


@dataclass(frozen=True)
class BasisSystem:
    """Basis of the weighted curve space for w(x) = exp(alpha x).

    Parameters
    ----------
    alpha : weight exponent, > 0.
    n_max : largest basis index guaranteed precomputable (evaluation is
        allowed up to n_max + 3, matching the iteration's look-ahead).
    quad_order : Gauss-Legendre node count per quadrature panel.
    panel_length : width of quadrature panels on the half line.
    """

    alpha: float
    n_max: int = 10
    quad_order: int = 32
    panel_length: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.quad_order < 2:
            raise ValueError("quad_order must be at least 2")
        if self.panel_length <= 0:
            raise ValueError("panel_length must be positive")

    # -- basis evaluation ---------------------------------------------------

    def basis_values(self, n: int, x) -> np.ndarray:
        """Stack [f_1(x), ..., f_n(x)] as an (n, len(x)) array.

        f_1 = 1 and f_2 are closed forms; higher indices follow the iteration

            f_{k+3} = ((2k+1) f_{k+2} - k f_{k+1}) / (k+1)
                      + 2/((k+1)(alpha+1)) [x L_k(x) e^{-(alpha+1)x/2}
                         - (k+1) f_{k+2} + k f_{k+1}],

        which reuses each Laguerre value once per level.
        """
        if n < 1 or n > self.n_max + 3:
            raise ValueError(f"basis index out of range: {n} (allowed 1..{self.n_max + 3})")
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        c = 0.5 * (self.alpha + 1.0)
        ew = np.exp(-c * xs)
        out = np.empty((n, xs.size), dtype=float)
        out[0] = 1.0
        if n >= 2:
            out[1] = (1.0 - ew) / c
        lk_prev = np.ones_like(xs)     # L_0
        lk = 1.0 - xs                  # L_1
        for k in range(0, n - 2):
            lag_k = lk_prev if k == 0 else lk
            fk2, fk1 = out[k + 1], out[k]
            out[k + 2] = ((2 * k + 1) * fk2 - k * fk1) / (k + 1) + (
                2.0 / ((k + 1) * (self.alpha + 1.0))
            ) * (xs * lag_k * ew - (k + 1) * fk2 + k * fk1)
            if k >= 1:
                lk_prev, lk = lk, ((2 * k + 1 - xs) * lk - k * lk_prev) / (k + 1)
        return out

    def basis_f(self, n: int, x):
        """Evaluate the basis function f_n at x."""
        xs = np.asarray(x, dtype=float)
        vals = self.basis_values(n, xs)[n - 1]
        return float(vals[0]) if xs.ndim == 0 else vals

    def basis_slope(self, n: int, x):
        """Weak derivative f_n'(x): L_{n-2}(x) e^{-(alpha+1)x/2} for n >= 2, else 0."""
        if n < 1 or n > self.n_max + 3:
            raise ValueError(f"basis index out of range: {n}")
        xs = np.asarray(x, dtype=float)
        if n == 1:
            return 0.0 if xs.ndim == 0 else np.zeros_like(xs)
        out = laguerre(n - 2, xs) * np.exp(-0.5 * (self.alpha + 1.0) * xs)
        return out

    def basis_function(self, n: int) -> BasisFunction:
        return BasisFunction(self, n)

    def representer(self, a: float) -> Representer:
        return Representer(self.alpha, a)

    def shift_adjoint(self, h, t: float) -> ShiftedCurve:
        return ShiftedCurve(h, t, self.alpha)

    # -- inner products and quadrature --------------------------------------

    def inner_product_w(self, h, g) -> float:
        """Weighted inner product h(0)g(0) + int_0^inf w h' g' dx.

        Panel-wise Gauss-Legendre, splitting panels at the arguments' weak
        derivative kinks; integration stops once a panel contributes less than
        TAIL_REL_TOL of the accumulated magnitude (after all kinks are passed).
        """
        h = as_curve(h)
        g = as_curve(g)
        boundary = float(h.value(0.0)) * float(g.value(0.0))
        breaks = sorted(
            {float(b) for b in (*getattr(h, "breakpoints", ()), *getattr(g, "breakpoints", ())) if b > 0}
        )
        last_break = breaks[-1] if breaks else 0.0
        gx, gw = _gl_rule(self.quad_order)
        total = boundary
        scale = abs(boundary)
        a = 0.0
        for _ in range(MAX_PANELS):
            b = a + self.panel_length
            for brk in breaks:
                if a < brk < b:
                    b = brk
                    break
            half = 0.5 * (b - a)
            nodes = 0.5 * (a + b) + half * gx
            with np.errstate(over="ignore", invalid="ignore"):
                vals = np.exp(self.alpha * nodes) * np.asarray(h.slope(nodes)) * np.asarray(g.slope(nodes))
                panel = half * float(np.dot(gw, vals))
            if not np.isfinite(panel):
                raise QuadratureConvergenceError(
                    "half-line integrand is not integrable (panel overflow)"
                )
            total += panel
            scale += abs(panel)
            a = b
            if a >= last_break and abs(panel) <= TAIL_REL_TOL * scale:
                return total
        raise QuadratureConvergenceError(
            f"half-line quadrature did not converge within {MAX_PANELS} panels"
        )

    def c_coefficient(self, n: int, theta: float, h0=None) -> float:
        """<f_n, S*(theta) h0>_w.

        For constant h0 the shifted curve is h0(0) times the representer at
        theta, so the reproducing property gives the closed form h0(0) f_n(theta).
        """
        if n > self.n_max:
            raise ValueError(f"basis index out of range: {n} (n_max={self.n_max})")
        h0 = as_curve(1.0 if h0 is None else h0)
        if isinstance(h0, ConstantCurve):
            return h0.c * float(self.basis_f(n, theta))
        return self.inner_product_w(self.basis_function(n), self.shift_adjoint(h0, theta))

    def integrate_basis_product(self, i: int, j: int, theta: float, t0: float, t1: float) -> float:
        """int_{t0}^{t1} f_i(s + theta) f_j(s + theta) ds.

        j = 0 is a sentinel meaning the integrand is f_i alone.
        """
        if t0 > t1:
            raise ValueError("t0 must not exceed t1")
        if i > self.n_max or j > self.n_max:
            raise ValueError("basis index out of range")
        if t0 == t1:
            return 0.0
        n_panels = max(1, int(np.ceil((t1 - t0) / self.panel_length)))
        nodes, weights = gl_panel_rule(t0, t1, n_panels, self.quad_order)
        vals = self.basis_f(i, nodes + theta)
        if j != 0:
            vals = vals * self.basis_f(j, nodes + theta)
        return float(np.dot(weights, vals))
