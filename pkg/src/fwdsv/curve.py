"""Initial log-forward curve in Nelson-Siegel form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NelsonSiegelCurve:
    """Three-factor Nelson-Siegel log-forward curve.

    X_0(x) = beta0 + beta1 (1 - e^{-x/tau})/(x/tau)
             + beta2 [(1 - e^{-x/tau})/(x/tau) - e^{-x/tau}],

    with the x -> 0 limit beta0 + beta1 taken analytically.  Defaults keep
    forward prices of order one so strikes around 1-2 are near the money.
    """

    beta0: float = 0.05
    beta1: float = -0.02
    beta2: float = 0.01
    tau: float = 2.0

    breakpoints: tuple = ()

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    def log_forward(self, x):
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        u = xs / self.tau
        # (1 - e^{-u})/u via expm1 for stability, patched at u = 0.
        loading = np.where(u > 0, -np.expm1(-u) / np.where(u > 0, u, 1.0), 1.0)
        decay = np.exp(-u)
        out = self.beta0 + self.beta1 * loading + self.beta2 * (loading - decay)
        return float(out[0]) if scalar else out

    def value(self, x):
        """Curve-evaluable alias for the log-forward level."""
        return self.log_forward(x)

    def forward_price(self, T):
        """F(0, T) = exp(X_0(T)); strictly positive."""
        return np.exp(self.log_forward(T))
