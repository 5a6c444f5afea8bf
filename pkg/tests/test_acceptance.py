"""Acceptance suite: one test per criterion, printing a PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines.

Criteria 1-3 compare against the published convergence tables at +-0.05
percentage points per cell.  The published cells could not be reproduced in
every cell by this implementation (nor by any of the drift/compensator
conventions the source material admits; see notes in the repository README):
the machinery itself is verified against independent oracles elsewhere in
the test suite, and the N >= 5 "converged" rows do reproduce.  Those two
criteria-level comparisons are treated as genuinely blocked and left red
rather than loosened; the remaining criteria pass at their stated
tolerances.

Convergence tables are evaluated under the exact no-arbitrage drift (the
configuration that satisfies the martingale/parity requirements of
criterion 7 and best matches the published cells).
"""

import time

import numpy as np
import pytest

from fwdsv.basis import BasisSystem
from fwdsv.curve import NelsonSiegelCurve
from fwdsv.montecarlo import McConfig, mc_mgf_wishart, mc_price_jump
from fwdsv.pricer import PricingRequest, convergence_table, mgf, price_option, timed
from fwdsv.riccati_jump import (JumpModelParams, StripPoint, d_psi2_pairing_bns,
                                d_psi2_pairing_levy, phi_bns, phi_levy, riccati_evaluation,
                                y_pairing_bns, y_pairing_levy)
from fwdsv.riccati_wishart import RiccatiMatrixState, WishartModelParams, wishart_laplace, wishart_riccati_step

from test_riccati_jump import oracle_pairing, oracle_phi

ALPHA = 0.1
CELL_TOL_PP = 0.05
SYSTEM = BasisSystem(alpha=ALPHA, n_max=10)
CURVE = NelsonSiegelCurve()

TABLE_1 = {  # theta -> {N: percent}; pure-jump, T0=1, K=1, beta=1
    1: {2: 0.06, 3: 0.01, 5: 0.01, 8: 0.00},
    3: {2: 0.09, 3: 0.04, 5: 0.02, 8: 0.00},
    5: {2: 0.33, 3: 0.03, 5: 0.01, 8: 0.00},
    10: {2: 0.63, 3: 0.05, 5: 0.00, 8: 0.00},
    20: {2: 0.65, 3: 0.04, 5: 0.00, 8: 0.00},
}
TABLE_2 = {  # beta -> {N: percent}; pure-jump, T0=2, K=2, theta=1
    0.5: {2: 1.46, 3: 0.10, 5: 0.01, 8: 0.01},
    1.0: {2: 1.26, 3: 0.05, 5: 0.01, 8: 0.01},
    2.0: {2: 1.01, 3: 0.02, 5: 0.01, 8: 0.01},
    5.0: {2: 0.60, 3: 0.02, 5: 0.01, 8: 0.00},
}
TABLE_3 = {  # theta -> {N: percent}; mean-reverting, T0=1, K=1, beta=1
    1: {2: 0.03, 3: 0.01, 5: 0.01, 8: 0.00},
    3: {2: 0.07, 3: 0.03, 5: 0.02, 8: 0.00},
    5: {2: 0.23, 3: 0.02, 5: 0.00, 8: 0.00},
    10: {2: 0.42, 3: 0.03, 5: 0.00, 8: 0.00},
    20: {2: 0.42, 3: 0.01, 5: 0.00, 8: 0.00},
}
TABLE_4 = {  # beta -> {N: percent}; mean-reverting, T0=2, K=2, theta=1
    0.5: {2: 0.37, 3: 0.03, 5: 0.00, 8: 0.00},
    1.0: {2: 0.32, 3: 0.05, 5: 0.00, 8: 0.00},
    2.0: {2: 0.24, 3: 0.10, 5: 0.00, 8: 0.00},
    5.0: {2: 0.03, 3: 0.21, 5: 0.00, 8: 0.00},
}


def _report(criterion: str, ok: bool, detail: str = ""):
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" — {detail}"
    print(line, flush=True)
    return ok


def _table_cells(reference, *, bns, sweep, T0, K):
    factory = JumpModelParams.bns if bns else JumpModelParams.levy
    mismatches = []
    for value, cells in reference.items():
        model = factory(beta=float(value) if sweep == "beta" else 1.0, N=10).with_no_arbitrage_drift()
        req = PricingRequest(
            model=model, T0=T0, theta=float(value) if sweep == "theta" else 1.0, K=K)
        rows = convergence_table(req, [2, 3, 5, 8, 10], sweep,
                                 [float(value) if sweep == "theta" else float(value)],
                                 SYSTEM, CURVE) if sweep == "theta" else convergence_table(
            req, [2, 3, 5, 8, 10], "beta", [float(value)], SYSTEM, CURVE)
        got = {n: pct for _, n, pct in rows}
        for n, expected in cells.items():
            if abs(got[n] - expected) > CELL_TOL_PP:
                mismatches.append((value, n, round(got[n], 2), expected))
    return mismatches


def test_criterion_1_table1_levy_theta_sweep():
    mismatches = _table_cells(TABLE_1, bns=False, sweep="theta", T0=1.0, K=1.0)
    ok = _report("1 (pure-jump theta table)", not mismatches,
                 f"{20 - len(mismatches)}/20 cells within ±{CELL_TOL_PP}pp; "
                 f"off-cells (value, N, got, published): {mismatches}")
    assert ok, f"published table cells not reproduced: {mismatches}"


def test_criterion_2_table2_levy_beta_sweep():
    mismatches = _table_cells(TABLE_2, bns=False, sweep="beta", T0=2.0, K=2.0)
    ok = _report("2 (pure-jump beta table)", not mismatches,
                 f"{16 - len(mismatches)}/16 cells within ±{CELL_TOL_PP}pp; "
                 f"off-cells (value, N, got, published): {mismatches}")
    assert ok, f"published table cells not reproduced: {mismatches}"


def test_criterion_3_tables34_bns():
    mismatches3 = _table_cells(TABLE_3, bns=True, sweep="theta", T0=1.0, K=1.0)
    mismatches4 = _table_cells(TABLE_4, bns=True, sweep="beta", T0=2.0, K=2.0)
    n_ok = 36 - len(mismatches3) - len(mismatches4)
    ok = _report("3 (mean-reverting tables)", not (mismatches3 or mismatches4),
                 f"{n_ok}/36 cells within ±{CELL_TOL_PP}pp; "
                 f"off-cells: theta-table {mismatches3}, beta-table {mismatches4}")
    assert ok, f"published table cells not reproduced: {mismatches3 + mismatches4}"


def test_criterion_4_wishart_mgf_vs_mc():
    T0 = 1.0 / 365.0
    theta, nu = 1.0, 2.0
    model = WishartModelParams(rank=5)
    cfg = McConfig(n_paths=100_000, n_steps=64, seed=20240915)
    worst = 0.0
    detail = []
    for lam in (0.0, 1.0, 2.0, 5.0):
        p = StripPoint(nu=nu, lam=lam, theta=theta, t=T0)
        affine = wishart_laplace(p, model, None, CURVE, 512, SYSTEM)
        est = mc_mgf_wishart(model, nu, lam, theta, None, T0, cfg, SYSTEM, CURVE)
        z_re = abs(est.mean.real - affine.real) / est.se_real if est.se_real > 0 else 0.0
        z_im = abs(est.mean.imag - affine.imag) / est.se_imag if est.se_imag > 0 else 0.0
        worst = max(worst, z_re, z_im)
        detail.append(f"lam={lam:g}: |z|=({z_re:.2f},{z_im:.2f})")
    ok = _report("4 (matrix-model MGF vs MC)", worst <= 3.0, "; ".join(detail))
    assert ok, f"MGF mismatch beyond 3 standard errors: {detail}"


@pytest.mark.parametrize("factory,label", [(JumpModelParams.levy, "pure-jump"),
                                           (JumpModelParams.bns, "mean-reverting")])
def test_criterion_5_mc_price_agreement(factory, label):
    model = factory(beta=1.0, N=5)
    req = PricingRequest(model=model, T0=1.0, theta=1.0, K=1.0)
    affine = price_option(req, SYSTEM, CURVE).price
    est = mc_price_jump(model, req, McConfig(n_paths=100_000, n_steps=512, seed=20240915),
                        SYSTEM, CURVE)
    z = abs(est.mean - affine) / est.std_error
    ok = _report(f"5 ({label} price vs MC)", z <= 3.0,
                 f"affine={affine:.6f} mc={est.mean:.6f}±{est.std_error:.6f} |z|={z:.2f}")
    assert ok, f"|z| = {z:.2f} exceeds 3"


def test_criterion_6_speed_ratio():
    model = JumpModelParams.levy(beta=1.0, N=5)
    req = PricingRequest(model=model, T0=1.0, theta=1.0, K=1.0)
    affine_wall = min(timed(price_option, req, SYSTEM, CURVE)[1] for _ in range(3))
    cfg = McConfig(n_paths=1_000_000, n_steps=512, seed=20240915)
    _, mc_wall = timed(mc_price_jump, model, req, cfg, SYSTEM, CURVE)
    ratio = mc_wall / affine_wall
    ok = _report("6 (speed ratio)", ratio >= 100.0,
                 f"affine={affine_wall * 1e3:.1f}ms, 10^6-path MC={mc_wall:.1f}s, ratio={ratio:.0f}x")
    assert ok, f"speed ratio {ratio:.0f}x below the 100x floor"


def test_criterion_7_property_suite():
    checks = {}

    # MGF normalization at u = 0 for all three models
    worst = 0.0
    for model in (JumpModelParams.levy(beta=1.0, N=5), JumpModelParams.bns(beta=1.0, N=5),
                  WishartModelParams(rank=5)):
        p0 = StripPoint(nu=0.0, lam=0.0, theta=1.0, t=1.0)
        worst = max(worst, abs(mgf(model, p0, SYSTEM, CURVE) - 1.0))
    checks["mgf(0)=1 within 1e-12"] = worst <= 1e-12

    # exact zero initial conditions
    m5 = JumpModelParams.levy(beta=1.0, N=5)
    b5 = JumpModelParams.bns(beta=1.0, N=5)
    p_t0 = StripPoint(nu=2.0, lam=1.0, theta=1.0, t=0.0)
    checks["phi(0)=0 and psi2-pairings(0)=0 exactly"] = (
        phi_levy(p_t0, m5, SYSTEM) == 0.0 and phi_bns(p_t0, b5, SYSTEM) == 0.0
        and d_psi2_pairing_levy(p_t0, m5, 0.0, SYSTEM) == 0.0
        and y_pairing_bns(p_t0, b5, SYSTEM) == 0.0
        and riccati_evaluation(p_t0, m5, CURVE, SYSTEM).y_pairing == 0.0)

    # conjugate symmetry in lambda
    sym_err = 0.0
    for lam in (0.5, 2.0, 7.0):
        pp = StripPoint(nu=2.0, lam=lam, theta=1.0, t=1.0)
        pm = StripPoint(nu=2.0, lam=-lam, theta=1.0, t=1.0)
        sym_err = max(sym_err, abs(mgf(b5, pm, SYSTEM, CURVE) - np.conj(mgf(b5, pp, SYSTEM, CURVE))))
        w = WishartModelParams(rank=4)
        pw_p = StripPoint(nu=2.0, lam=lam, theta=1.0, t=1.0 / 365.0)
        pw_m = StripPoint(nu=2.0, lam=-lam, theta=1.0, t=1.0 / 365.0)
        sym_err = max(sym_err, abs(wishart_laplace(pw_m, w, None, CURVE, 128, SYSTEM)
                                   - np.conj(wishart_laplace(pw_p, w, None, CURVE, 128, SYSTEM))))
    checks["conjugate symmetry within 1e-12"] = sym_err <= 1e-12

    # damping invariance across nu in {1.5, 2, 3}
    na = JumpModelParams.levy(beta=1.0, N=10).with_no_arbitrage_drift()
    prices = [price_option(PricingRequest(model=na, T0=1.0, theta=1.0, K=1.0, nu=nu),
                           SYSTEM, CURVE).price for nu in (1.5, 2.0, 3.0)]
    checks["damping invariance within 1e-6 rel"] = max(
        abs(p / prices[0] - 1.0) for p in prices) <= 1e-6

    # put-call parity at the table-1 point (put damped at nu = -1)
    res = price_option(PricingRequest(model=na, T0=1.0, theta=1.0, K=1.0), SYSTEM, CURVE)
    checks["put-call parity within 1e-6 rel"] = res.parity_gap / CURVE.forward_price(2.0) <= 1e-6

    # basis orthonormality
    ortho = max(abs(SYSTEM.inner_product_w(SYSTEM.basis_function(i), SYSTEM.basis_function(j))
                    - (1.0 if i == j else 0.0))
                for i in range(1, 11) for j in range(1, 11))
    checks["orthonormality within 1e-8 (n<=10)"] = ortho <= 1e-8

    # one-step-from-zero matrix identity, exact
    w5 = WishartModelParams(rank=5)
    p = StripPoint(nu=2.0, lam=1.5, theta=1.0, t=1.0)
    stepped = wishart_riccati_step(RiccatiMatrixState.initial(5), p, w5, 0.01, SYSTEM)
    k = np.arange(1, 6, dtype=float)
    B = SYSTEM.basis_values(5, np.array([p.theta]))[:, 0] / k
    checks["one-step identity exact"] = bool(
        np.array_equal(stepped.F, -(0.01 / 4.0) * p.z**2 * np.outer(B, B)))

    # first-order step-halving for the matrix flow
    pw = StripPoint(nu=2.0, lam=2.0, theta=1.0, t=1.0 / 365.0)
    vals = {k: wishart_laplace(pw, w5, None, CURVE, 2**k, SYSTEM) for k in (7, 8, 9)}
    ratio = abs(vals[7] - vals[8]) / abs(vals[8] - vals[9])
    checks["Euler step-halving ratio ~ 1/2"] = abs(ratio - 2.0) <= 0.2

    # closed forms vs the independent nested-trapezoid oracle
    p1 = StripPoint(nu=2.0, lam=1.0, theta=1.0, t=1.0)
    oracle_err = max(
        abs(d_psi2_pairing_levy(p1, m5, 1.0, SYSTEM)
            - oracle_pairing(SYSTEM, m5, 1.0, 1.0, p1.z, weights=m5.d * m5.d, kernel=False)),
        abs(d_psi2_pairing_bns(p1, b5, 1.0, SYSTEM)
            - oracle_pairing(SYSTEM, b5, 1.0, 1.0, p1.z, weights=b5.d * b5.d, kernel=True)),
        abs(phi_levy(StripPoint(2.0, 0.5, 1.0, 1.0), m5, SYSTEM)
            - oracle_phi(SYSTEM, m5, 1.0, 1.0, complex(2.0, 0.5), kernel=False)),
        abs(phi_bns(StripPoint(2.0, 0.5, 1.0, 1.0), b5, SYSTEM)
            - oracle_phi(SYSTEM, b5, 1.0, 1.0, complex(2.0, 0.5), kernel=True)),
    )
    checks["closed forms vs trapezoid oracle within 1e-7"] = oracle_err <= 1e-7

    failed = [name for name, ok in checks.items() if not ok]
    ok = _report("7 (property suite)", not failed,
                 f"{len(checks) - len(failed)}/{len(checks)} checks passed"
                 + (f"; failing: {failed}" if failed else ""))
    assert ok, f"property checks failed: {failed}"
