"""Damped Fourier pricing of calls and puts on forwards.

The time-0 price of a European option on the forward F(T0, T1) with strike K,
delivery lag theta = T1 - T0 and damping nu (nu > 1 for calls, nu < 0 for
puts) is

    price = (1/2pi) int_R g(lambda) M(nu + i lambda) dlambda,
    g(lambda) = K^{-(nu - 1 + i lambda)} / ((nu + i lambda)(nu - 1 + i lambda)),

where M(z) = E[exp(z log F(T0, T1))] is the transform supplied by the
Riccati modules.  Conjugate symmetry in lambda folds the integral onto the
half line, evaluated by composite Gauss-Legendre panels.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .basis import BasisSystem, gl_panel_rule
from .curve import NelsonSiegelCurve
from .errors import ConfigError, FourierDivergenceError, NumericalError
from .riccati_jump import JumpExponentTables, JumpModelParams, StripPoint
from .riccati_wishart import WishartModelParams, wishart_exponent_grid

NU_CALL_DEFAULT = 2.0
NU_PUT_DEFAULT = -1.0

# Below this exercise time (in years) the inverse transform is flagged as
# numerically unstable: the integrand decays too slowly for the default grid.
INSTABILITY_T0 = 1e-2

N_PANELS = 32
NEGATIVE_PRICE_TOL = 1e-8


@dataclass(frozen=True)
class PricingRequest:
    """One option-pricing task: model parameters plus payoff and grid settings."""

    model: JumpModelParams | WishartModelParams
    T0: float
    theta: float
    K: float
    option_kind: str = "call"
    nu: float | None = None
    lambda_max: float = 200.0
    lambda_nodes: int = 2048
    N: int | None = None

    @property
    def damping(self) -> float:
        if self.nu is not None:
            return self.nu
        return NU_CALL_DEFAULT if self.option_kind == "call" else NU_PUT_DEFAULT

    def validate(self):
        if self.option_kind not in ("call", "put"):
            raise ConfigError(f"option_kind must be 'call' or 'put', got {self.option_kind!r}")
        if self.K <= 0:
            raise ConfigError("strike K must be positive")
        if self.T0 < 0 or self.theta < 0:
            raise ConfigError("T0 and theta must be nonnegative")
        if self.lambda_max <= 0 or self.lambda_nodes < N_PANELS * 2:
            raise ConfigError("lambda grid must satisfy lambda_max > 0 and lambda_nodes >= 64")
        nu = self.damping
        if nu in (0.0, 1.0):
            raise ConfigError(f"damping nu={nu} sits on a pole of the payoff transform")
        if self.option_kind == "call" and nu <= 1:
            raise ConfigError("call pricing requires damping nu > 1")
        if self.option_kind == "put" and nu >= 0:
            raise ConfigError("put pricing requires damping nu < 0")

    def truncated_model(self):
        """Model with its series/rank truncation overridden by the request's N."""
        if self.N is None:
            return self.model
        m = self.model
        if isinstance(m, JumpModelParams):
            return replace(m, N=self.N, d_coeffs=None if m.d_coeffs is None else m.d,
                           a_coeffs=None if m.a_coeffs is None else m.a,
                           y0_coeffs=None if m.y0_coeffs is None else m.y0)
        return replace(m, rank=self.N, dof=None if m.dof is None else min(m.dof, self.N),
                       q_coeffs=None, a_coeffs=None, d_coeffs=None,
                       y0_eigs=None if m.y0_eigs is None else np.asarray(m.y0)[: self.N])


@dataclass(frozen=True)
class PriceResult:
    """Fourier price plus truncation/no-arbitrage diagnostics."""

    price: float
    integrand_tail: float
    parity_gap: float
    n_evals: int
    instability_warning: bool = False


def payoff_transform(lam, nu: float, K: float):
    """Fourier transform g(lambda) of the damped payoff; poles at nu in {0, 1}."""
    if nu in (0.0, 1.0):
        raise ConfigError(f"damping nu={nu} sits on a pole of the payoff transform")
    if K <= 0:
        raise ConfigError("strike K must be positive")
    lam = np.asarray(lam, dtype=float)
    z = nu + 1j * lam
    return np.exp(-(z - 1.0) * np.log(K)) / (z * (z - 1.0))


def _exponent_table(system, curve, model, t, theta):
    if isinstance(model, JumpModelParams):
        table = JumpExponentTables(system, model, t, theta, curve)
        return table.exponent
    if isinstance(model, WishartModelParams):
        return lambda nu, lams: wishart_exponent_grid(system, model, curve, t, theta, nu, lams)
    raise ConfigError(f"unsupported model parameter type: {type(model).__name__}")


def mgf(model, p: StripPoint, system: BasisSystem, curve) -> complex:
    """Transform value exp(-phi + <X_0, psi1> - <Y_0, psi2>) at one strip point."""
    exponent = _exponent_table(system, curve, model, p.t, p.theta)
    return complex(np.exp(exponent(p.nu, np.array([p.lam]))[0]))


def _check_tail(panel_sums: np.ndarray):
    """Cauchy-style tail criterion: the final panels must not grow.

    Growth of the truncation tail signals a transform that is not integrable
    along the chosen strip (damping nu outside the admissible region).
    """
    mags = np.abs(panel_sums)
    tail = mags[-5:]
    floor = 1e-12 * (mags.max() + 1e-300)
    if np.all(np.diff(tail) > 0) and tail[-1] > floor:
        raise FourierDivergenceError(
            "Fourier tail panels are growing; damping nu appears to lie outside the admissible strip"
        )


def _half_line_price(exponent, nu, K, lambda_max, lambda_nodes):
    order = max(2, lambda_nodes // N_PANELS)
    nodes, weights = gl_panel_rule(0.0, lambda_max, N_PANELS, order)
    expo = exponent(nu, nodes)
    # Transform values beyond exp-overflow cannot be integrated in double
    # precision; the damping is effectively outside the usable strip.
    if not np.all(np.isfinite(expo)) or np.max(expo.real) > 700.0:
        raise FourierDivergenceError(
            "transform exponent overflows along the strip; reduce |nu| or the horizon"
        )
    integrand = payoff_transform(nodes, nu, K) * np.exp(expo)
    contrib = weights * np.real(integrand)
    panel_sums = contrib.reshape(N_PANELS, order).sum(axis=1)
    _check_tail(panel_sums)
    price = float(panel_sums.sum() / np.pi)
    tail = float(np.abs(integrand[-1]))
    return price, tail, nodes.size


def price_option(req: PricingRequest, system: BasisSystem, curve: NelsonSiegelCurve) -> PriceResult:
    """Price the requested option and attach diagnostics.

    The put-call parity gap |C - P - (F(0, T1) - K)| is always computed (the
    counterpart leg reuses the lambda-independent precompute, so it is cheap)
    and measures how far the configured drift is from the exact no-arbitrage
    drift, on top of quadrature error.
    """
    req.validate()
    model = req.truncated_model()
    exponent = _exponent_table(system, curve, model, req.T0, req.theta)

    nu = req.damping
    price, tail, n_evals = _half_line_price(exponent, nu, req.K, req.lambda_max, req.lambda_nodes)

    other_nu = NU_PUT_DEFAULT if req.option_kind == "call" else NU_CALL_DEFAULT
    other_price, _, n2 = _half_line_price(exponent, other_nu, req.K, req.lambda_max, req.lambda_nodes)
    call, put = (price, other_price) if req.option_kind == "call" else (other_price, price)
    forward = float(curve.forward_price(req.T0 + req.theta))
    parity_gap = abs(call - put - (forward - req.K))

    if price < -NEGATIVE_PRICE_TOL:
        raise NumericalError(f"Fourier price is significantly negative: {price}")
    price = max(price, 0.0)
    return PriceResult(
        price=price,
        integrand_tail=tail,
        parity_gap=parity_gap,
        n_evals=n_evals + n2,
        instability_warning=req.T0 < INSTABILITY_T0,
    )


def relative_difference_percent(value: float, baseline: float) -> float:
    return 100.0 * abs(value - baseline) / abs(baseline)


def format_percent(x: float) -> str:
    """Two-decimal percent with half-up rounding (matches printed tables)."""
    if not np.isfinite(x):
        return "NaN"
    return str(Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def convergence_table(req_template: PricingRequest, N_list, sweep_name: str, sweep_values,
                      system: BasisSystem, curve: NelsonSiegelCurve, on_error: str = "raise"):
    """Relative price differences |price(N) - price(N_base)| / price(N_base).

    The baseline is the largest entry of N_list.  Returns rows
    (sweep_value, N, rel_diff_percent); see `format_percent` for the printed
    two-decimal form.  With on_error="nan", numerically failing cells are
    recorded as NaN instead of aborting the sweep.
    """
    N_list = sorted(set(int(n) for n in N_list))
    baseline_N = N_list[-1]
    rows = []
    for val in sweep_values:
        if sweep_name == "theta":
            base_req = replace(req_template, theta=float(val))
        elif sweep_name == "beta":
            m = req_template.model
            if not isinstance(m, JumpModelParams):
                raise ConfigError("beta sweep applies to jump models only")
            base_req = replace(req_template, model=replace(
                m, beta=float(val), d_coeffs=m.d, a_coeffs=m.a, y0_coeffs=m.y0))
        else:
            raise ConfigError(f"unknown sweep variable {sweep_name!r} (use 'theta' or 'beta')")
        prices = {}
        for n in N_list:
            try:
                prices[n] = price_option(replace(base_req, N=n), system, curve).price
            except NumericalError:
                if on_error != "nan":
                    raise
                prices[n] = float("nan")
        for n in N_list:
            rows.append((float(val), n, relative_difference_percent(prices[n], prices[baseline_N])))
    return rows


def table_to_csv(rows, path: str, sweep_name: str):
    """Write convergence rows as CSV: sweep value, N, rel_diff_percent."""
    lines = [f"{sweep_name},N,rel_diff_percent"]
    for val, n, pct in rows:
        lines.append(f"{val:g},{n},{format_percent(pct)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def timed(fn, *args, **kw):
    """Run fn and return (result, wall_seconds)."""
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0
