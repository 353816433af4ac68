"""Command-line batch interface.

Subcommands cover the artifact pipeline end to end: ``fit-curve``
builds a curve-exact model from quote files, ``calibrate-nominal`` and
``calibrate-inflation`` run the staged market calibrations, ``price``
evaluates a single instrument, ``surface`` emits figure-style CSV
tables, and ``verify`` runs a trimmed self-check suite against the
independent oracles.

Data goes to files (and single prices to stdout); diagnostics go to
stderr as one machine-parsable line ``error: <Class>: <message>``.
Exit codes: 0 success, 1 failed verification, 2 usage or input-file
problems, 3 infeasible calibration targets, 4 transform-domain or
quadrature failures.  All dates are year fractions; runs are
deterministic for a fixed --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as aio
from .black import black_implied_vol
from .calibrate import CalibrationConfig, calibrate_inflation, calibrate_nominal
from .cosh import (
    CoshLiborModel,
    TenorGrid,
    _floorlet_sign_function,
    _swaption_legs,
    _swaption_sign_function,
    brownian_floorlet_price,
    brownian_put_swaption_price,
    caplet_price,
    caplet_vol_surface,
    fit_cosh_model,
    floorlet_price,
    forward_rate_lower_bound,
    put_swaption_price,
)
from .errors import (
    BudgetExhausted,
    ContourError,
    DomainError,
    Infeasible,
    InvalidTime,
    LayoutError,
    NonmonotoneInput,
    NotUnimodal,
    OdeBlowup,
    OutOfBounds,
    PoleError,
    StageInfeasible,
    WrongSpec,
)
from .inflation import (
    InflationModel,
    MarketSnapshot,
    build_inflation_model,
    cpi_call_price,
    cpi_put_price,
    forward_inflation_rate,
    inflation_caplet_price,
    inflation_floorlet_price,
    nominal_caplet_price,
    nominal_floorlet_price,
    yyiis_rate,
    yyiis_value,
    zciis_rate,
    zciis_value,
)
from .mc import SimConfig, mc_price
from .processes import (
    BrownianDrift,
    CIR,
    CIRJump,
    DoubleGammaOUBM,
    GaussOU,
    Product,
    riccati_integrate,
    spec_from_dict,
)

_USAGE_ERRORS = (FileNotFoundError, json.JSONDecodeError, KeyError, ValueError)
_INFEASIBLE_ERRORS = (
    Infeasible,
    StageInfeasible,
    NonmonotoneInput,
    OutOfBounds,
    BudgetExhausted,
)
_DOMAIN_ERRORS = (
    DomainError,
    ContourError,
    PoleError,
    OdeBlowup,
    InvalidTime,
    WrongSpec,
    LayoutError,
    NotUnimodal,
)


def _fail(exc: BaseException) -> None:
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _INFEASIBLE_ERRORS as exc:
        _fail(exc)
        return 3
    except _DOMAIN_ERRORS as exc:
        _fail(exc)
        return 4
    except _USAGE_ERRORS as exc:
        _fail(exc)
        return 2


def main() -> None:
    sys.exit(run())


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affine-markets",
        description="Affine interest-rate and inflation model toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-curve", help="fit ladder exponents to quote curves")
    p.add_argument("--config", required=True, help="JSON: family, process, fit options")
    p.add_argument("--curve", required=True, help="CSV maturity_years,discount_factor")
    p.add_argument("--zciis", help="CSV maturity_years,rate (inflation family)")
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=_cmd_fit_curve)

    p = sub.add_parser("calibrate-nominal", help="fit nominal buckets to caplet vols")
    p.add_argument("--config", required=True, help="JSON: process template, calibration")
    p.add_argument("--curve", required=True)
    p.add_argument("--caplet-vols", required=True, help="CSV expiry_years,strike,vol")
    p.add_argument("--model-out", required=True)
    p.add_argument("--out-dir", help="write report.json here")
    p.set_defaults(func=_cmd_calibrate_nominal)

    p = sub.add_parser(
        "calibrate-inflation", help="fit inflation buckets to year-on-year options"
    )
    p.add_argument("--config", required=True)
    p.add_argument("--curve", required=True)
    p.add_argument("--zciis", required=True)
    p.add_argument(
        "--inflation-options", required=True,
        help="CSV maturity_years,strike,kind,price_bps",
    )
    p.add_argument("--model-in", required=True, help="calibrated nominal model JSON")
    p.add_argument("--model-out", required=True)
    p.add_argument("--out-dir", help="write report.json here")
    p.set_defaults(func=_cmd_calibrate_inflation)

    p = sub.add_parser("price", help="price one instrument on a saved model")
    p.add_argument("--model-in", required=True)
    p.add_argument(
        "--instrument",
        required=True,
        choices=[
            "floorlet",
            "caplet",
            "put-swaption",
            "nominal-caplet",
            "nominal-floorlet",
            "cpi-call",
            "cpi-put",
            "inflation-caplet",
            "inflation-floorlet",
            "zciis",
            "yyiis",
        ],
    )
    p.add_argument("--k", type=int, help="period or date index (1-based)")
    p.add_argument("--base", type=int, default=None, help="base date index (YoY)")
    p.add_argument("--alpha", type=int, help="swap start period")
    p.add_argument("--beta", type=int, help="swap end period")
    p.add_argument("--strike", type=float)
    p.add_argument("--years", type=int, help="swap years (zciis/yyiis)")
    p.add_argument("--out", help="also append the row to this CSV")
    p.set_defaults(func=_cmd_price)

    p = sub.add_parser("surface", help="emit a figure-style CSV table")
    p.add_argument("--model-in", required=True)
    p.add_argument(
        "--table",
        default="caplet",
        choices=["caplet", "bounds", "yoy", "cpi"],
        help="caplet vols / forward-rate bounds (rate model); "
        "year-on-year or CPI options (inflation model)",
    )
    p.add_argument("--strikes", help="comma-separated strikes")
    p.add_argument("--periods", help="comma-separated period indices (rate model)")
    p.add_argument("--maturities", help="comma-separated whole years (inflation)")
    p.add_argument("--shift", type=float, default=1.0, help="vol shift for yoy table")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--out-dir", help="directory for <table>.csv when --out absent")
    p.set_defaults(func=_cmd_surface)

    p = sub.add_parser("verify", help="run the embedded oracle self-checks")
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=_cmd_verify)

    return parser


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


# ---------------------------------------------------------------------------
# fit-curve
# ---------------------------------------------------------------------------

def _cmd_fit_curve(args) -> int:
    cfg = aio.load_json(args.config)
    family = cfg.get("family", "cosh")
    spec = spec_from_dict(cfg["process"])
    snapshot = aio.read_snapshot(args.curve, zciis_path=args.zciis)
    if family == "cosh":
        grid_cfg = cfg.get("grid", {})
        if "dates" in grid_cfg:
            grid = TenorGrid(tuple(float(t) for t in grid_cfg["dates"]))
        else:
            grid = TenorGrid.semiannual(float(grid_cfg.get("semiannual_years",
                                                           spec.horizon)))
        ratios = snapshot.discount_ratios(grid)
        terminal = snapshot.discount(grid.maturities[-1])
        model = fit_cosh_model(spec, grid, ratios, terminal)
    elif family == "inflation":
        if not isinstance(spec, Product):
            raise WrongSpec("inflation family needs a Product process")
        M = (spec.dim - 1) // 2
        grid = TenorGrid.semiannual(M)
        ratios = snapshot.discount_ratios(grid)
        terminal = snapshot.discount(grid.maturities[-1])
        cpi = snapshot.forward_cpi_curve(grid)
        model = build_inflation_model(
            spec,
            ratios,
            cpi,
            terminal,
            scale=float(cfg.get("scale", 2.0)),
            tilt=float(cfg.get("tilt", 0.08)),
        )
    else:
        raise WrongSpec(f"unknown family {family!r}")
    aio.save_model(model, args.model_out)
    print(args.model_out)
    return 0


# ---------------------------------------------------------------------------
# calibrate
# ---------------------------------------------------------------------------

def _calibration_config(cfg: dict) -> CalibrationConfig:
    raw = dict(cfg.get("calibration", {}))
    if "restart_steps" in raw:
        raw["restart_steps"] = tuple(float(s) for s in raw["restart_steps"])
    return CalibrationConfig(**raw)


def _write_report(report, out_dir) -> None:
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        aio.save_json(report.to_dict(), path / "report.json")


def _cmd_calibrate_nominal(args) -> int:
    cfg = aio.load_json(args.config)
    process = spec_from_dict(cfg["process"])
    snapshot = aio.read_snapshot(args.curve, caplet_vols_path=args.caplet_vols)
    model, report = calibrate_nominal(process, snapshot, _calibration_config(cfg))
    aio.save_model(model, args.model_out)
    _write_report(report, args.out_dir)
    print(args.model_out)
    return 0


def _cmd_calibrate_inflation(args) -> int:
    cfg = aio.load_json(args.config)
    nominal = aio.load_model(args.model_in)
    if not isinstance(nominal, InflationModel):
        raise WrongSpec("--model-in must hold an inflation-market model")
    snapshot = aio.read_snapshot(
        args.curve,
        zciis_path=args.zciis,
        inflation_options_path=args.inflation_options,
    )
    model, report = calibrate_inflation(nominal, snapshot, _calibration_config(cfg))
    aio.save_model(model, args.model_out)
    _write_report(report, args.out_dir)
    print(args.model_out)
    return 0


# ---------------------------------------------------------------------------
# price
# ---------------------------------------------------------------------------

def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ValueError(
            f"instrument {args.instrument} needs --{', --'.join(missing)}"
        )


def _price_value(model, args) -> float:
    kind = args.instrument
    if isinstance(model, CoshLiborModel):
        if kind == "floorlet":
            _require(args, "k", "strike")
            return floorlet_price(model, args.k, args.strike)
        if kind == "caplet":
            _require(args, "k", "strike")
            return caplet_price(model, args.k, args.strike)
        if kind == "put-swaption":
            _require(args, "alpha", "beta", "strike")
            return put_swaption_price(model, args.alpha, args.beta, args.strike)
        raise WrongSpec(f"instrument {kind} needs an inflation-market model")
    if kind == "nominal-caplet":
        _require(args, "k", "strike")
        return nominal_caplet_price(model, args.k, args.strike)
    if kind == "nominal-floorlet":
        _require(args, "k", "strike")
        return nominal_floorlet_price(model, args.k, args.strike)
    if kind == "cpi-call":
        _require(args, "k", "strike")
        return cpi_call_price(model, args.k, args.strike)
    if kind == "cpi-put":
        _require(args, "k", "strike")
        return cpi_put_price(model, args.k, args.strike)
    if kind == "inflation-caplet":
        _require(args, "k", "base", "strike")
        return inflation_caplet_price(model, args.base, args.k, args.strike)
    if kind == "inflation-floorlet":
        _require(args, "k", "base", "strike")
        return inflation_floorlet_price(model, args.base, args.k, args.strike)
    if kind == "zciis":
        _require(args, "years", "strike")
        return zciis_value(model, args.years, args.strike)
    if kind == "yyiis":
        _require(args, "years", "strike")
        return yyiis_value(model, args.years, args.strike)
    raise WrongSpec(f"instrument {kind} needs a rate-ladder model")


def _cmd_price(args) -> int:
    model = aio.load_model(args.model_in)
    value = _price_value(model, args)
    print(f"{value:.17g}")
    if args.out:
        aio.write_rows(
            args.out,
            ("instrument", "k", "base", "alpha", "beta", "strike", "years", "price"),
            [
                (
                    args.instrument,
                    args.k,
                    args.base,
                    args.alpha,
                    args.beta,
                    args.strike,
                    args.years,
                    f"{value:.17g}",
                )
            ],
        )
    return 0


# ---------------------------------------------------------------------------
# surface
# ---------------------------------------------------------------------------

def _surface_rows(model, args):
    table = args.table
    if isinstance(model, CoshLiborModel):
        periods = _ints(args.periods) if args.periods else list(range(1, model.n))
        if table == "bounds":
            header = ("expiry_years", "lower_bound")
            return header, [
                (model.grid.T(k), f"{forward_rate_lower_bound(model, k):.12g}")
                for k in periods
            ]
        if table != "caplet":
            raise WrongSpec(f"table {table} needs an inflation-market model")
        if not args.strikes:
            raise ValueError("table caplet needs --strikes")
        rows = caplet_vol_surface(model, periods, _floats(args.strikes))
        header = ("expiry_years", "strike", "price", "implied_vol")
        return header, [
            (r["expiry_years"], r["strike"], f"{r['price']:.12g}", f"{r['implied_vol']:.12g}")
            for r in rows
        ]
    if table not in ("yoy", "cpi"):
        raise WrongSpec(f"table {table} needs a rate-ladder model")
    if not args.strikes:
        raise ValueError(f"table {table} needs --strikes")
    years = (
        _ints(args.maturities)
        if args.maturities
        else list(range(1, model.n_years + 1))
    )
    strikes = _floats(args.strikes)
    discounts = model.discounts()
    out = []
    if table == "cpi":
        for m in years:
            for K in strikes:
                price = cpi_call_price(model, 2 * m, K)
                out.append((float(m), K, f"{price:.12g}"))
        return ("maturity_years", "strike", "price"), out
    for m in years:
        base, pay = 2 * m - 2, 2 * m
        disc = float(discounts[pay - 1])
        fwd = forward_inflation_rate(model, pay, 2)
        for K in strikes:
            price = inflation_caplet_price(model, base, pay, K)
            try:
                vol = black_implied_vol(
                    price, fwd, K, float(m), disc, call=True, shift=args.shift
                )
            except OutOfBounds:
                vol = float("nan")
            out.append((float(m), K, f"{price:.12g}", f"{vol:.12g}"))
    return ("maturity_years", "strike", "price", "implied_vol"), out


def _cmd_surface(args) -> int:
    model = aio.load_model(args.model_in)
    header, rows = _surface_rows(model, args)
    if args.out:
        path = Path(args.out)
    elif args.out_dir:
        directory = Path(args.out_dir)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{args.table}.csv"
    else:
        raise ValueError("surface needs --out or --out-dir")
    aio.write_rows(path, header, rows)
    print(path)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _flat_ratio_curve(rate: float, grid: TenorGrid) -> np.ndarray:
    growth = np.cumprod([1.0 + rate * grid.accrual(k) for k in range(1, grid.n + 1)])
    return growth[-1] / growth


def _verify_brownian() -> None:
    grid = TenorGrid.semiannual(10)
    spec = BrownianDrift(sigma=1.0, mu=0.0, x0=0.0, horizon=10.0)
    model = fit_cosh_model(spec, grid, _flat_ratio_curve(0.035, grid), 0.70)
    for k in (4, 12):
        for strike in (0.02, 0.035, 0.05):
            a = floorlet_price(model, k, strike)
            b = brownian_floorlet_price(model, k, strike)
            if abs(a - b) > 1e-8 * max(abs(b), 1e-12):
                raise AssertionError(f"floorlet k={k} K={strike}: {a} vs {b}")
    a = put_swaption_price(model, 4, 8, 0.035)
    b = brownian_put_swaption_price(model, 4, 8, 0.035)
    if abs(a - b) > 1e-8 * max(abs(b), 1e-12):
        raise AssertionError(f"put swaption: {a} vs {b}")


def _verify_riccati() -> None:
    cases = [
        (CIR(lam=0.6, theta=0.04, eta=0.3, x0=0.05, horizon=5.0), (0.5, -2.0)),
        (
            CIRJump(lam=0.8, theta=0.03, eta=0.25, x0=0.04, alpha=8.0, beta=0.5,
                    horizon=5.0),
            (0.4, -1.5),
        ),
        (GaussOU(lam=0.5, theta=0.02, sigma=0.3, x0=0.01, horizon=5.0), (1.0, -1.0)),
        (
            DoubleGammaOUBM(lam=0.02, theta=0.5, sigma=0.3, alpha_plus=12.0,
                            alpha_minus=10.0, beta_plus=50.0, beta_minus=5.0,
                            x0=0.7, horizon=10.0),
            (3.0, -5.0),
        ),
    ]
    for spec, exps in cases:
        for u in exps:
            t = 0.7 * spec.horizon
            closed = spec.phi_psi(t, u)
            ode = riccati_integrate(spec, t, u)
            for a, b in ((closed.phi, ode.phi), (closed.psi[0], ode.psi[0])):
                if abs(a - b) > 1e-6 * max(abs(b), 1e-9):
                    raise AssertionError(f"{type(spec).__name__} u={u}: {a} vs {b}")


def _verify_semiflow(rng) -> None:
    specs = [
        CIR(lam=0.6, theta=0.04, eta=0.3, x0=0.05, horizon=5.0),
        DoubleGammaOUBM(lam=0.3, theta=0.1, sigma=0.4, alpha_plus=15.0,
                        alpha_minus=12.0, beta_plus=3.0, beta_minus=2.0, x0=0.2,
                        horizon=5.0),
    ]
    for spec in specs:
        lo, hi = spec.domain(spec.horizon).uniform[0]
        lo = max(lo, -20.0) * 0.5
        hi = min(hi, 20.0) * 0.5
        for _ in range(50):
            u = rng.uniform(lo, hi)
            s, t = np.sort(rng.uniform(0.1, spec.horizon, 2) * 0.5)
            whole = spec.phi_psi(s + t, u)
            inner = spec.phi_psi(t, u)
            outer = spec.phi_psi(s, complex(inner.psi[0]))
            if abs(whole.phi - (inner.phi + outer.phi)) > 1e-10 * max(
                1.0, abs(whole.phi)
            ):
                raise AssertionError(f"{type(spec).__name__} semiflow phi at u={u}")
            if abs(whole.psi[0] - outer.psi[0]) > 1e-10 * max(1.0, abs(whole.psi[0])):
                raise AssertionError(f"{type(spec).__name__} semiflow psi at u={u}")


def _verify_model() -> InflationModel:
    M = 2
    comps = [CIR(lam=0.55, theta=0.05, eta=0.28, x0=0.06, horizon=float(M))]
    for i in range(M):
        comps.append(
            CIRJump(lam=0.7 + 0.1 * i, theta=0.04, eta=0.22, x0=0.05,
                    alpha=9.0, beta=0.6, horizon=float(M))
        )
    for i in range(M):
        comps.append(
            DoubleGammaOUBM(lam=0.35, theta=0.0, sigma=0.3 + 0.05 * i,
                            alpha_plus=18.0, alpha_minus=16.0, beta_plus=2.0,
                            beta_minus=1.5, x0=0.1, horizon=float(M))
        )
    grid = TenorGrid.semiannual(M)
    ratios = _flat_ratio_curve(0.03, grid)
    cpi = np.array([1.02 ** t for t in grid.maturities])
    return build_inflation_model(Product(tuple(comps)), ratios, cpi, 0.94)


def _verify_term_structure(model: InflationModel) -> None:
    grid = model.grid
    ratios = _flat_ratio_curve(0.03, grid)
    target = model.terminal_discount * ratios
    got = model.discounts()
    if np.max(np.abs(got - target)) > 1e-10:
        raise AssertionError("discount reproduction off")
    cpi = np.array([1.02 ** t for t in grid.maturities])
    got_cpi = np.array([model.forward_cpi(k) for k in range(1, grid.n + 1)])
    if np.max(np.abs(got_cpi - cpi)) > 1e-10:
        raise AssertionError("forward CPI reproduction off")


def _verify_parity(model: InflationModel) -> None:
    discounts = model.discounts()
    k, strike = 4, 0.03
    cap = nominal_caplet_price(model, k, strike)
    floor = nominal_floorlet_price(model, k, strike)
    rhs = model.grid.accrual(k) * discounts[k - 1] * (model.forward_rate(k) - strike)
    if abs(cap - floor - rhs) > 1e-10:
        raise AssertionError("nominal parity off")
    cap = inflation_caplet_price(model, 2, 4, 0.02)
    floor = inflation_floorlet_price(model, 2, 4, 0.02)
    rhs = discounts[3] * (model.grid.T(4) - model.grid.T(2)) * (
        forward_inflation_rate(model, 4, 2) - 0.02
    )
    if abs(cap - floor - rhs) > 1e-10:
        raise AssertionError("inflation parity off")
    if abs(zciis_value(model, model.n_years, zciis_rate(model))) > 1e-10:
        raise AssertionError("ZCIIS par value off")
    if abs(yyiis_value(model, model.n_years, yyiis_rate(model))) > 1e-10:
        raise AssertionError("YYIIS par value off")


def _scan_local_maxima(g, width: float = 30.0, n: int = 2001) -> int:
    ys = np.linspace(-width, width, n)
    vals = np.array([g(float(y)) for y in ys])
    d = np.sign(np.diff(vals))
    count = 0
    prev = d[0]
    for cur in d[1:]:
        if cur == 0:
            continue
        if prev > 0 and cur < 0:
            count += 1
        prev = cur
    return count


def _verify_unimodal(rng) -> None:
    grid = TenorGrid.semiannual(10)
    spec = DoubleGammaOUBM(lam=0.02, theta=0.5, sigma=0.3, alpha_plus=12.0,
                           alpha_minus=10.0, beta_plus=50.0, beta_minus=5.0,
                           x0=0.7, horizon=10.0)
    model = fit_cosh_model(spec, grid, _flat_ratio_curve(0.035, grid), 0.70)
    for _ in range(10):
        k = int(rng.integers(1, model.n - 1))
        strike = float(rng.uniform(0.005, 0.08))
        g = _floorlet_sign_function(model, k, 1.0 + grid.accrual(k + 1) * strike)
        if _scan_local_maxima(g) != 1:
            raise AssertionError(f"floorlet g not unimodal at k={k} K={strike}")
    legs = _swaption_legs(model, 4, 10, 0.035)
    g = _swaption_sign_function(model, 4, legs)
    if _scan_local_maxima(g) != 1:
        raise AssertionError("swaption g not unimodal")


def _verify_mc(seed: int) -> None:
    grid = TenorGrid.semiannual(5)
    spec = GaussOU(lam=0.4, theta=0.0, sigma=0.5, x0=0.1, horizon=5.0)
    model = fit_cosh_model(spec, grid, _flat_ratio_curve(0.03, grid), 0.86)
    k, strike = 4, 0.03
    t_fix = grid.T(k)
    delta = grid.accrual(k + 1)
    k_tilde = 1.0 + delta * strike
    exact = caplet_price(model, k, strike)

    def payoff(paths):
        x = paths[:, 0, 0]
        num = model.martingale(t_fix, model.u(k), x)
        den = model.martingale(t_fix, model.u(k + 1), x)
        return np.maximum(num / den - k_tilde, 0.0) * den

    est, se = mc_price(
        spec,
        [t_fix],
        payoff,
        SimConfig(n_paths=1 << 15, seed=seed),
    )
    value = model.terminal_discount * est
    if abs(value - exact) > 4.0 * model.terminal_discount * se:
        raise AssertionError(f"MC caplet {value} vs transform {exact} (se {se})")


def _cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    checks = [
        ("brownian_closed_forms", _verify_brownian),
        ("riccati_oracle", _verify_riccati),
        ("semiflow", lambda: _verify_semiflow(rng)),
    ]
    failures = 0
    model = None
    for name, fn in checks:
        failures += _run_check(name, fn)
    try:
        model = _verify_model()
        print("ok model_build")
    except Exception as exc:  # pragma: no cover - diagnostic path
        failures += 1
        print(f"FAIL model_build: {type(exc).__name__}: {exc}")
    if model is not None:
        failures += _run_check("term_structure", lambda: _verify_term_structure(model))
        failures += _run_check("parity", lambda: _verify_parity(model))
    failures += _run_check("unimodality", lambda: _verify_unimodal(rng))
    failures += _run_check("mc_smoke", lambda: _verify_mc(args.seed))
    return 0 if failures == 0 else 1


def _run_check(name: str, fn) -> int:
    try:
        fn()
    except Exception as exc:
        print(f"FAIL {name}: {type(exc).__name__}: {exc}")
        return 1
    print(f"ok {name}")
    return 0


if __name__ == "__main__":
    main()
