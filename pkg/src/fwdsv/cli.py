"""Command-line interface: pricing, convergence tables, MGF evaluation, MC comparison.

Configuration is strict JSON (unknown keys are rejected so typos cannot be
silently ignored).  Dotted-path overrides are accepted as extra flags, e.g.

    fwdsv price config.json --pricing.K=2 --model.beta=0.5

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .basis import BasisSystem
from .curve import NelsonSiegelCurve
from .errors import ConfigError, NumericalError
from .montecarlo import McConfig, mc_mgf_wishart, mc_price_jump
from .pricer import PricingRequest, convergence_table, mgf, price_option, table_to_csv, timed
from .riccati_jump import JumpModelParams, StripPoint
from .riccati_wishart import WishartModelParams, default_steps

SCHEMA_VERSION = 1

_MODEL_KEYS_JUMP = {"type", "beta", "N", "d_coeffs", "a_coeffs", "y0_coeffs", "h0",
                    "upsilon_scale", "upsilon_rolling"}
_MODEL_KEYS_WISHART = {"type", "rank", "dof", "q_coeffs", "a_coeffs", "d_coeffs",
                       "y0_eigs", "h0", "steps", "upsilon_scale", "upsilon_rolling"}
_BLOCK_KEYS = {
    "curve": {"beta0", "beta1", "beta2", "tau"},
    "basis": {"alpha", "n_max", "quad_order", "panel_length"},
    "pricing": {"T0", "theta", "K", "kind", "nu", "lambda_max", "lambda_nodes"},
    "mc": {"paths", "steps", "seed", "antithetic"},
}
_TOP_KEYS = {"model", "curve", "basis", "pricing", "mc"}


def _reject_unknown(block: dict, allowed: set, where: str):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")


def _build(config: dict):
    """Validate the config dict and build (model, system, curve, request, mc, wishart_steps)."""
    if not isinstance(config, dict):
        raise ConfigError("config root must be a JSON object")
    _reject_unknown(config, _TOP_KEYS, "config")
    if "model" not in config:
        raise ConfigError("config: missing required block 'model'")
    mblock = dict(config["model"])
    mtype = mblock.get("type")
    if mtype not in ("levy", "bns", "wishart"):
        raise ConfigError(f"model.type must be levy, bns or wishart, got {mtype!r}")

    for name in ("curve", "basis", "pricing", "mc"):
        _reject_unknown(config.get(name, {}), _BLOCK_KEYS[name], name)

    try:
        curve = NelsonSiegelCurve(**config.get("curve", {}))
        basis_cfg = dict(config.get("basis", {}))
        basis_cfg.setdefault("alpha", 0.1)
        system = BasisSystem(**basis_cfg)

        wishart_steps = None
        if mtype == "wishart":
            _reject_unknown(mblock, _MODEL_KEYS_WISHART, "model")
            wishart_steps = mblock.pop("steps", None)
            mblock.pop("type")
            model = WishartModelParams(**mblock)
        else:
            _reject_unknown(mblock, _MODEL_KEYS_JUMP, "model")
            mblock.pop("type")
            mblock.setdefault("beta", 1.0)
            if mtype == "bns":
                mblock.setdefault("a_coeffs", 0.5 / np.arange(1, mblock.get("N", 10) + 1) ** 2)
            else:
                mblock.setdefault("a_coeffs", np.zeros(mblock.get("N", 10)))
            model = JumpModelParams(**mblock)

        pricing = dict(config.get("pricing", {}))
        kind = pricing.pop("kind", "call")
        req = PricingRequest(
            model=model,
            T0=float(pricing.pop("T0", 1.0)),
            theta=float(pricing.pop("theta", 1.0)),
            K=float(pricing.pop("K", 1.0)),
            option_kind=kind,
            nu=pricing.pop("nu", None),
            lambda_max=float(pricing.pop("lambda_max", 200.0)),
            lambda_nodes=int(pricing.pop("lambda_nodes", 2048)),
        )
        req.validate()

        mc_block = dict(config.get("mc", {}))
        mc = McConfig(
            n_paths=int(mc_block.get("paths", 100_000)),
            n_steps=int(mc_block.get("steps", 512)),
            seed=int(mc_block.get("seed", 20240915)),
            antithetic=bool(mc_block.get("antithetic", True)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return model, system, curve, req, mc, wishart_steps


def _apply_overrides(config: dict, overrides):
    for item in overrides:
        if not item.startswith("--") or "=" not in item:
            raise ConfigError(f"override {item!r} must look like --block.key=value")
        path, raw = item[2:].split("=", 1)
        keys = path.split(".")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = config
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {path!r} does not address a config object")
        node[keys[-1]] = value
    return config


def _load_config(path: str, overrides) -> dict:
    try:
        with open(path) as fh:
            config = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return _apply_overrides(config, overrides)


def _emit(payload: dict):
    payload["schema_version"] = SCHEMA_VERSION
    print(json.dumps(payload, sort_keys=True))


def cmd_price(args, overrides) -> int:
    config = _load_config(args.config, overrides)
    model, system, curve, req, _, _ = _build(config)
    result, wall = timed(price_option, req, system, curve)
    _emit({
        "price": result.price,
        "integrand_tail": result.integrand_tail,
        "parity_gap": result.parity_gap,
        "n_evals": result.n_evals,
        "instability_warning": result.instability_warning,
        "wall_time_s": wall,
    })
    return 0


def cmd_table(args, overrides) -> int:
    config = _load_config(args.config, overrides)
    _, system, curve, req, _, _ = _build(config)
    values = [float(v) for v in args.values.split(",")]
    n_list = [int(v) for v in args.N.split(",")]
    rows = convergence_table(req, n_list, args.sweep, values, system, curve, on_error="nan")
    table_to_csv(rows, args.out, args.sweep)
    print(args.out)
    # failed cells are recorded as NaN and flagged through the exit code
    return 3 if any(not np.isfinite(pct) for _, _, pct in rows) else 0


def cmd_mc_compare(args, overrides) -> int:
    config = _load_config(args.config, overrides)
    model, system, curve, req, mc, _ = _build(config)
    if isinstance(model, WishartModelParams):
        raise ConfigError("mc-compare prices jump models; use `mgf --mc` for the Wishart model")
    affine, wall_affine = timed(price_option, req, system, curve)
    est, wall_mc = timed(mc_price_jump, model, req, mc, system, curve, args.threads)
    z = (est.mean - affine.price) / est.std_error if est.std_error > 0 else 0.0
    _emit({
        "affine": {"price": affine.price, "wall_time_s": wall_affine},
        "mc": {"mean": est.mean, "std_error": est.std_error,
               "n_effective": est.n_effective, "wall_time_s": wall_mc},
        "z_score": z,
        "speedup": wall_mc / wall_affine if wall_affine > 0 else float("inf"),
    })
    return 0


def cmd_mgf(args, overrides) -> int:
    config = _load_config(args.config, overrides)
    model, system, curve, req, mc, wsteps = _build(config)
    lams = [float(v) for v in args.lam.split(",")]
    nu = req.damping
    out = []
    for lam in lams:
        p = StripPoint(nu=nu, lam=lam, theta=req.theta, t=req.T0)
        value = mgf(model, p, system, curve)
        entry = {"lam": lam, "mgf_re": value.real, "mgf_im": value.imag}
        if args.mc:
            if isinstance(model, WishartModelParams):
                est = mc_mgf_wishart(model, nu, lam, req.theta, None, req.T0, mc,
                                     system, curve, args.threads)
                entry.update({
                    "mc_re": est.mean.real, "mc_im": est.mean.imag,
                    "se_re": est.se_real, "se_im": est.se_imag,
                })
            else:
                raise ConfigError("--mc MGF comparison is implemented for the wishart model")
        out.append(entry)
    _emit({"nu": nu, "points": out})
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="fwdsv", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("PRICER_THREADS", "1")),
                        help="worker cap for simulation blocks (results are thread-count invariant)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_price = sub.add_parser("price", help="price one option, JSON to stdout")
    p_price.add_argument("config")

    p_table = sub.add_parser("table", help="N-convergence table as CSV")
    p_table.add_argument("config")
    p_table.add_argument("--sweep", choices=("theta", "beta"), required=True)
    p_table.add_argument("--values", required=True, help="comma-separated sweep values")
    p_table.add_argument("--N", default="2,3,5,8,10", help="comma-separated truncations")
    p_table.add_argument("--out", required=True, help="CSV output path")

    p_cmp = sub.add_parser("mc-compare", help="affine vs Monte Carlo price report")
    p_cmp.add_argument("config")

    p_mgf = sub.add_parser("mgf", help="transform values on a lambda grid")
    p_mgf.add_argument("config")
    p_mgf.add_argument("--lam", default="0,1,2,5", help="comma-separated lambda values")
    p_mgf.add_argument("--mc", action="store_true", help="attach Monte Carlo MGF estimates")

    args, extras = parser.parse_known_args(argv)
    handlers = {"price": cmd_price, "table": cmd_table,
                "mc-compare": cmd_mc_compare, "mgf": cmd_mgf}
    try:
        return handlers[args.command](args, extras)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
