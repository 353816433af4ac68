"""Two-stage market calibration of the joint nominal/inflation model.

The nominal stage walks the year buckets backward (longest expiry
first), fitting one jump-diffusion square-root component per year to
that year's caplet quotes.  The date-ladder exponents for the two dates
owned by the bucket are re-solved inside every objective evaluation, so
every candidate model reprices the discount curve exactly and the
optimizer only ever moves along the curve-consistent manifold.  Year-k
caplets read exponents from buckets k..M and the common factor only,
so stages are independent: earlier (shorter) years never disturb an
already fitted longer year.

The inflation stage walks forward, fitting one two-sided OU component
per year to that year's year-on-year option quotes, with the CPI-curve
exponents for the bucket's two dates re-solved per evaluation in the
same way.  The year-k instrument touches inflation buckets k and k-1
only, so forward ordering makes those stages independent as well.

Optimization is derivative-free simplex search restarted at the
running best with a coarse-to-fine ladder of initial simplex sizes,
under a hard per-stage evaluation budget.  Positive parameters are
searched in log space; infeasible candidates (domain violations,
ladder targets out of reach, quadrature failures) score a large
penalty that grows with distance from the stage start, which steers
the simplex back toward feasible ground instead of stranding it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .black import black_implied_vol, black_price
from .errors import (
    AffineModelError,
    BudgetExhausted,
    OutOfBounds,
    StageInfeasible,
    WrongSpec,
)
from .inflation import (
    InflationModel,
    MarketSnapshot,
    ParamLayout,
    _comp_mgf,
    _solve_increasing,
    fit_tilde_u,
    fit_ubar_sequence,
    fit_vbar,
    fit_vbar_sequence,
    forward_inflation_rate,
    inflation_caplet_price,
    inflation_floorlet_price,
    nominal_caplet_price,
    nominal_floorlet_price,
)
from .cosh import TenorGrid
from .processes import CIRJump, DoubleGammaOUBM, Product

__all__ = [
    "CalibrationConfig",
    "StageResult",
    "CalibrationReport",
    "calibrate_nominal",
    "calibrate_inflation",
]

_PENALTY = 1e8

_NOMINAL_KEYS = ("lam", "theta", "eta", "alpha", "beta", "x0")
_NOMINAL_START = {
    "lam": 0.5,
    "theta": 0.4,
    "eta": 0.25,
    "alpha": 40.0,
    "beta": 0.5,
    "x0": 0.4,
}
# (lo, hi) boxes in natural units; candidates outside score the penalty
_NOMINAL_BOX = {
    "lam": (1e-3, 5.0),
    "theta": (1e-8, 50.0),
    "eta": (1e-3, 5.0),
    "alpha": (0.5, 1000.0),
    "beta": (1e-10, 500.0),
    "x0": (1e-10, 100.0),
}

_INFLATION_LOG_KEYS = (
    "lam",
    "sigma",
    "alpha_plus",
    "alpha_minus",
    "beta_plus",
    "beta_minus",
)
_INFLATION_LIN_KEYS = ("theta", "x0")
_INFLATION_START = {
    "lam": 0.3,
    "theta": 0.0,
    "sigma": 0.3,
    "alpha_plus": 40.0,
    "alpha_minus": 40.0,
    "beta_plus": 1.0,
    "beta_minus": 1.0,
    "x0": 0.3,
}
_INFLATION_BOX = {
    "lam": (1e-3, 5.0),
    "sigma": (1e-10, 5.0),
    "alpha_plus": (0.5, 1000.0),
    "alpha_minus": (0.5, 1000.0),
    "beta_plus": (1e-10, 500.0),
    "beta_minus": (1e-10, 500.0),
    "theta": (-50.0, 50.0),
    "x0": (-50.0, 50.0),
}


@dataclass(frozen=True)
class CalibrationConfig:
    """Budgets, objective choice and search policy for both stages.

    budget            max objective evaluations per year stage
    objective         'mse_price' or 'mse_implied_vol'
    early_stop        stop a stage once its objective falls this low
    objective_target  when set, a stage that ends above it raises
                      BudgetExhausted carrying the best result so far
    scale             common-factor split passed to the exponent fit
    tilt              real-vs-nominal tilt of the common-factor exponents
    vol_shift         shift for quoting year-on-year vols (rates near zero)
    bound_margin      jump-size caps must clear the used exponents by this
    audit_bp          flag a year when its forward lower bound exceeds this
    nominal_start     initial component parameters for the nominal stage
    inflation_start   initial component parameters for the inflation stage
    restart_steps     initial-simplex sizes for the restart ladder
    """

    budget: int = 2000
    objective: str = "mse_price"
    early_stop: float = 1e-14
    objective_target: float | None = None
    scale: float = 2.0
    tilt: float = 0.08
    vol_shift: float = 1.0
    bound_margin: float = 0.1
    audit_bp: float = 50.0
    nominal_start: dict = field(default_factory=lambda: dict(_NOMINAL_START))
    inflation_start: dict = field(default_factory=lambda: dict(_INFLATION_START))
    restart_steps: tuple[float, ...] = (0.4, 0.12, 0.03, 0.008, 0.002)

    def __post_init__(self):
        if self.budget < 1:
            raise WrongSpec("budget must be at least 1 evaluation")
        if self.objective not in ("mse_price", "mse_implied_vol"):
            raise WrongSpec(f"unknown objective {self.objective!r}")
        if self.bound_margin <= 0:
            raise WrongSpec("bound_margin must be positive")


@dataclass(frozen=True)
class StageResult:
    """Outcome of one year-bucket stage."""

    name: str
    params: dict
    objective: float
    n_evals: int
    best_series: tuple[float, ...]
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": dict(self.params),
            "objective": self.objective,
            "n_evals": self.n_evals,
            "best_series": list(self.best_series),
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class CalibrationReport:
    """Stage results plus post-fit audits.

    residuals        per quote: (years, strike, model value, quote value)
                     in the units of the configured objective
    parity_max_error max |cap - floor - discounted forward parity| over quotes
    curve_max_error  max reproduction error of the curve the stage must
                     hold exactly (discounts, or forward CPI values)
    bound_audit      per quoted year: (years, forward lower bound, flagged)
    """

    kind: str
    objective_name: str
    stages: tuple[StageResult, ...]
    residuals: tuple[tuple[float, float, float, float], ...]
    parity_max_error: float
    curve_max_error: float
    bound_audit: tuple[tuple[float, float, bool], ...] = ()

    @property
    def total_evals(self) -> int:
        return sum(s.n_evals for s in self.stages)

    @property
    def objective(self) -> float:
        return max((s.objective for s in self.stages), default=0.0)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "objective_name": self.objective_name,
            "stages": [s.to_dict() for s in self.stages],
            "residuals": [list(r) for r in self.residuals],
            "parity_max_error": self.parity_max_error,
            "curve_max_error": self.curve_max_error,
            "bound_audit": [list(b) for b in self.bound_audit],
            "total_evals": self.total_evals,
        }


# ---------------------------------------------------------------------------
# restarted simplex driver
# ---------------------------------------------------------------------------

class _Stop(Exception):
    pass


def _nm_minimize(fun, y0, budget: int, early_stop: float, steps):
    """Budgeted Nelder-Mead with restarts at the running best.

    Each restart rebuilds a fresh simplex of size ``steps[i]`` around the
    best point; progress keeps the current size, stagnation moves down
    the ladder, and exhausting the ladder without progress terminates.
    Returns (best point, best value, evaluations used, running best series).
    """
    y0 = np.asarray(y0, dtype=float)
    n = y0.size
    state = {"evals": 0, "best_f": math.inf, "best_y": y0.copy()}
    series: list[float] = []

    def wrapped(y):
        if state["evals"] >= budget or state["best_f"] <= early_stop:
            raise _Stop
        v = float(fun(np.asarray(y, dtype=float)))
        state["evals"] += 1
        if v < state["best_f"]:
            state["best_f"] = v
            state["best_y"] = np.asarray(y, dtype=float).copy()
        series.append(state["best_f"])
        return v

    idx = 0
    while state["evals"] < budget and state["best_f"] > early_stop:
        start = state["best_y"].copy()
        f_before = state["best_f"]
        step = steps[min(idx, len(steps) - 1)]
        simplex = np.vstack([start] + [start + step * _unit(n, i) for i in range(n)])
        try:
            minimize(
                wrapped,
                start,
                method="Nelder-Mead",
                options={
                    "initial_simplex": simplex,
                    "maxfev": budget - state["evals"],
                    "xatol": 1e-13,
                    "fatol": 1e-16,
                    "adaptive": n > 4,
                },
            )
        except _Stop:
            break
        if state["best_f"] < f_before - 1e-18:
            continue  # progress at this scale: restart at the new best
        idx += 1
        if idx >= len(steps):
            break  # converged at the finest scale
    return state["best_y"], state["best_f"], state["evals"], series


def _unit(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


# ---------------------------------------------------------------------------
# shared stage plumbing
# ---------------------------------------------------------------------------

def _group_quotes_by_year(entries, M: int, what: str):
    """Map year k -> list of quote tuples; maturities must sit on years."""
    by_year: dict[int, list] = {}
    for entry in entries:
        years = entry[0]
        k = int(round(years))
        if abs(years - k) > 1e-9 or not 1 <= k <= M:
            raise WrongSpec(
                f"{what} maturity {years} is not a whole year within 1..{M}"
            )
        by_year.setdefault(k, []).append(entry[1:])
    return by_year


def _penalty(y, y_ref) -> float:
    return _PENALTY * (1.0 + float(np.sum((np.asarray(y) - y_ref) ** 2)))


def _mse(residuals) -> float:
    r = np.asarray(residuals, dtype=float)
    return float(np.mean(r * r))


def _run_stage(name, objective, y0, config):
    """Drive one stage and wrap the error semantics around the result."""
    best_y, best_f, n_evals, series = _nm_minimize(
        objective, y0, config.budget, config.early_stop, config.restart_steps
    )
    if best_f >= _PENALTY:
        raise StageInfeasible(name, "no feasible parameter set inside the budget")
    return best_y, best_f, n_evals, series


def _check_target(name, result: StageResult, config: CalibrationConfig):
    if config.objective_target is not None and result.objective > config.objective_target:
        raise BudgetExhausted(
            f"{name}: objective {result.objective:.3e} above target "
            f"{config.objective_target:.3e} after {result.n_evals} evaluations",
            best=result,
            objective=result.objective,
        )


# ---------------------------------------------------------------------------
# nominal stage
# ---------------------------------------------------------------------------

def _nominal_component(params: dict, horizon: float) -> CIRJump:
    return CIRJump(
        lam=params["lam"],
        theta=params["theta"],
        eta=params["eta"],
        x0=params["x0"],
        alpha=params["alpha"],
        beta=params["beta"],
        horizon=horizon,
    )


def _in_box(params: dict, box: dict) -> bool:
    return all(box[k][0] <= v <= box[k][1] for k, v in params.items())


def _ladder_known(process: Product, tilde_u, bar, date: int, M: int) -> float:
    """Fixed mgf factors at a ladder date: common factor and later buckets."""
    c = (date + 1) // 2
    known = _comp_mgf(process, 0, tilde_u[date - 1])
    for l in range(c + 1, M + 1):
        known *= _comp_mgf(process, l, bar[2 * l - 2])
    return known


def _curve_forward(snapshot: MarketSnapshot, k: int) -> float:
    """Simple forward over [k-0.5, k] read off the snapshot curve."""
    pe = snapshot.discount(k - 0.5)
    pp = snapshot.discount(float(k))
    return (pe / pp - 1.0) / 0.5


def _nominal_quote_values(snapshot, quotes_by_year, config):
    """Target values per year in objective units; also raw quote prices."""
    values: dict[int, list[tuple[float, float, float]]] = {}
    for k, quotes in quotes_by_year.items():
        fwd = _curve_forward(snapshot, k)
        disc = snapshot.discount(float(k))
        annuity = 0.5 * disc
        rows = []
        for strike, vol in quotes:
            if vol <= 0.0:
                raise OutOfBounds(
                    f"caplet quote at year {k}, strike {strike}: "
                    "zero volatility has no implied-vol representation"
                )
            price = black_price(fwd, strike, k - 0.5, vol, annuity)
            target = price if config.objective == "mse_price" else vol
            rows.append((float(strike), float(price), float(target)))
        values[k] = rows
    return values


def _nominal_model_value(model, k, strike, snapshot, config) -> float:
    price = nominal_caplet_price(model, 2 * k, strike)
    if config.objective == "mse_price":
        return price
    fwd = _curve_forward(snapshot, k)
    annuity = 0.5 * snapshot.discount(float(k))
    return black_implied_vol(price, fwd, strike, k - 0.5, annuity)


def calibrate_nominal(
    process: Product,
    snapshot: MarketSnapshot,
    config: CalibrationConfig | None = None,
) -> tuple[InflationModel, CalibrationReport]:
    """Fit the nominal year buckets of ``process`` to caplet quotes.

    ``process`` supplies the component family and the non-nominal
    components (common factor, inflation buckets), which are kept as
    given.  Returns the curve-exact model with fitted nominal buckets
    (inflation exponents left trivial) and the stage report.  Raises
    StageInfeasible when a year admits no feasible parameters,
    BudgetExhausted when ``objective_target`` is set and missed, and
    OutOfBounds for degenerate (zero-vol) quote surfaces.
    """
    config = config or CalibrationConfig()
    M = (process.dim - 1) // 2
    if process.dim != 2 * M + 1 or M < 1:
        raise WrongSpec(f"process dimension {process.dim} is not 2M+1")
    grid = TenorGrid.semiannual(M)
    if abs(grid.maturities[-1] - process.horizon) > 1e-9:
        raise WrongSpec(f"process horizon {process.horizon} must equal {M} years")
    N = 2 * M
    horizon = process.horizon

    ratios = snapshot.discount_ratios(grid)
    terminal_discount = snapshot.discount(grid.maturities[-1])
    quotes_by_year = _group_quotes_by_year(snapshot.caplet_vols, M, "caplet quote")
    quote_values = _nominal_quote_values(snapshot, quotes_by_year, config)

    tilde_u = fit_tilde_u(process, ratios, config.scale)
    comps = list(process.components)
    # ladder exponents; every date a stage reads is re-solved before use,
    # so the template never has to be ladder-feasible itself
    bar = np.zeros(N)
    zeros = tuple(0.0 for _ in range(N))

    stages = []
    warm: dict | None = None
    for k in range(M, 0, -1):
        name = f"nominal_year_{k}"
        rows = quote_values.get(k)
        proc_fixed = Product(tuple(comps))
        known_hi = _ladder_known(proc_fixed, tilde_u, bar, 2 * k, M)
        known_lo = _ladder_known(proc_fixed, tilde_u, bar, 2 * k - 1, M)
        if not rows:
            # keep the bucket component as given, but its ladder dates
            # still feed the known factors of shorter years
            bar[2 * k - 1] = _solve_increasing(
                proc_fixed, k, ratios[2 * k - 1] / known_hi, f"bar_u_{2 * k}"
            )
            bar[2 * k - 2] = _solve_increasing(
                proc_fixed, k, ratios[2 * k - 2] / known_lo, f"bar_u_{2 * k - 1}"
            )
            stages.append(
                StageResult(name, _component_params(comps[k], _NOMINAL_KEYS), 0.0, 0, (), ("no_quotes",))
            )
            continue
        start = warm or dict(config.nominal_start)
        y_ref = np.log([start[key] for key in _NOMINAL_KEYS])

        def objective(y, _k=k, _known=(known_lo, known_hi), _rows=rows, _ref=y_ref):
            params = dict(zip(_NOMINAL_KEYS, np.exp(y)))
            if not _in_box(params, _NOMINAL_BOX):
                return _penalty(y, _ref)
            try:
                trial = list(comps)
                trial[_k] = _nominal_component(params, horizon)
                proc = Product(tuple(trial))
                bar_try = bar.copy()
                bar_try[2 * _k - 1] = _solve_increasing(
                    proc, _k, ratios[2 * _k - 1] / _known[1], f"bar_u_{2 * _k}"
                )
                bar_try[2 * _k - 2] = _solve_increasing(
                    proc, _k, ratios[2 * _k - 2] / _known[0], f"bar_u_{2 * _k - 1}"
                )
                if params["alpha"] < bar_try[2 * _k - 2] + config.bound_margin:
                    return _penalty(y, _ref)
                bar_try[: 2 * _k - 2] = bar_try[2 * _k - 2]
                layout = ParamLayout(
                    n_years=M,
                    tilde_u=tuple(tilde_u),
                    bar_u=tuple(bar_try),
                    tilde_v=tuple(tilde_u),
                    bar_v=zeros,
                )
                model = InflationModel(proc, layout, grid, terminal_discount)
                resid = [
                    _nominal_model_value(model, _k, strike, snapshot, config) - target
                    for strike, _, target in _rows
                ]
                return _mse(resid)
            except (AffineModelError, ValueError, OverflowError):
                return _penalty(y, _ref)

        best_y, best_f, n_evals, series = _run_stage(name, objective, y_ref, config)
        params = dict(zip(_NOMINAL_KEYS, np.exp(best_y)))
        comps[k] = _nominal_component(params, horizon)
        proc_now = Product(tuple(comps))
        bar[2 * k - 1] = _solve_increasing(
            proc_now, k, ratios[2 * k - 1] / known_hi, f"bar_u_{2 * k}"
        )
        bar[2 * k - 2] = _solve_increasing(
            proc_now, k, ratios[2 * k - 2] / known_lo, f"bar_u_{2 * k - 1}"
        )
        warm = params
        result = StageResult(name, params, best_f, n_evals, tuple(series))
        _check_target(name, result, config)
        stages.append(result)

    process_out = Product(tuple(comps))
    bar_u = fit_ubar_sequence(process_out, tilde_u, ratios)
    layout = ParamLayout(
        n_years=M,
        tilde_u=tuple(tilde_u),
        bar_u=tuple(bar_u),
        tilde_v=tuple(tilde_u),
        bar_v=zeros,
    )
    model = InflationModel(process_out, layout, grid, terminal_discount)

    residuals = []
    parity_err = 0.0
    audit = []
    discounts = model.discounts()
    for k in sorted(quote_values):
        disc_model = float(discounts[2 * k - 1])
        fwd_model = model.forward_rate(2 * k)
        for strike, price, target in quote_values[k]:
            value = _nominal_model_value(model, k, strike, snapshot, config)
            residuals.append((float(k), strike, value, target))
            cap = nominal_caplet_price(model, 2 * k, strike)
            floor = nominal_floorlet_price(model, 2 * k, strike)
            parity = cap - floor - 0.5 * disc_model * (fwd_model - strike)
            parity_err = max(parity_err, abs(parity))
        bound = _nominal_lower_bound(model, 2 * k)
        audit.append((float(k), bound, bound > config.audit_bp * 1e-4))

    curve_err = float(
        np.max(np.abs(discounts - np.array([snapshot.discount(t) for t in grid.maturities])))
    )
    report = CalibrationReport(
        kind="nominal",
        objective_name=config.objective,
        stages=tuple(reversed(stages)),
        residuals=tuple(residuals),
        parity_max_error=parity_err,
        curve_max_error=curve_err,
        bound_audit=tuple(audit),
    )
    return model, report


def _component_params(comp, keys) -> dict:
    return {key: float(getattr(comp, key)) for key in keys if hasattr(comp, key)}


def _nominal_lower_bound(model: InflationModel, k: int, t: float | None = None) -> float:
    """Infimum of the simple forward F^k(t) over admissible states.

    Defaults to the fixing time T_{k-1}, the lowest rate the model can
    set.  The exponent difference u_{k-1} - u_k loads only on
    nonnegative components, where the transform slope is nonnegative,
    so the infimum sits at the zero state and is (e^A - 1)/Delta_k
    with A the constant part of the log bond ratio.
    """
    if t is None:
        t = model.grid.T(k - 1)
    tau = model.process.horizon - float(t)
    a_hi, _ = model._exps(tau, "u", k - 1)
    a_lo, _ = model._exps(tau, "u", k)
    delta = model.grid.accrual(k)
    return float(math.expm1(a_hi - a_lo) / delta)


# ---------------------------------------------------------------------------
# inflation stage
# ---------------------------------------------------------------------------

def _inflation_component(params: dict, horizon: float) -> DoubleGammaOUBM:
    return DoubleGammaOUBM(
        lam=params["lam"],
        theta=params["theta"],
        sigma=params["sigma"],
        alpha_plus=params["alpha_plus"],
        alpha_minus=params["alpha_minus"],
        beta_plus=params["beta_plus"],
        beta_minus=params["beta_minus"],
        x0=params["x0"],
        horizon=horizon,
    )


def _pack_inflation(params: dict) -> np.ndarray:
    return np.array(
        [math.log(params[key]) for key in _INFLATION_LOG_KEYS]
        + [params[key] for key in _INFLATION_LIN_KEYS]
    )


def _unpack_inflation(y) -> dict:
    nlog = len(_INFLATION_LOG_KEYS)
    out = dict(zip(_INFLATION_LOG_KEYS, np.exp(y[:nlog])))
    out.update(zip(_INFLATION_LIN_KEYS, (float(v) for v in y[nlog:])))
    return out


def _yoy_model_value(model, k, strike, kind, disc, fwd, config) -> float:
    base, pay = 2 * k - 2, 2 * k
    if kind == "cap":
        price = inflation_caplet_price(model, base, pay, strike)
    else:
        price = inflation_floorlet_price(model, base, pay, strike)
    if config.objective == "mse_price":
        return price
    return black_implied_vol(
        price,
        fwd,
        strike,
        float(pay) * 0.5,
        disc,
        call=(kind == "cap"),
        shift=config.vol_shift,
    )


def calibrate_inflation(
    nominal_model: InflationModel,
    snapshot: MarketSnapshot,
    config: CalibrationConfig | None = None,
) -> tuple[InflationModel, CalibrationReport]:
    """Fit the inflation year buckets on top of a calibrated nominal model.

    Keeps the nominal components and exponents of ``nominal_model``
    untouched, sets the real common-factor exponents by the tilt policy,
    and fits one two-sided OU component per year to that year's
    year-on-year option quotes (price quotes in basis points of
    notional).  The CPI curve from the ZCIIS quotes is reproduced
    exactly throughout.  Error semantics match calibrate_nominal.
    """
    config = config or CalibrationConfig()
    M = nominal_model.n_years
    N = 2 * M
    grid = nominal_model.grid
    horizon = nominal_model.process.horizon
    layout0 = nominal_model.layout
    tilde_u = np.asarray(layout0.tilde_u)
    tilde_v = tilde_u * (1.0 + config.tilt * np.arange(1, N + 1))
    cpi_targets = snapshot.forward_cpi_curve(grid)

    comps = list(nominal_model.process.components)
    proc0 = Product(tuple(comps))
    # v-ladder mgf targets: depend on the fixed common factor only
    factors = np.array(
        [
            cpi_targets[d - 1]
            * _comp_mgf(proc0, 0, tilde_u[d - 1])
            / _comp_mgf(proc0, 0, tilde_v[d - 1])
            for d in range(1, N + 1)
        ]
    )

    quotes_by_year = _group_quotes_by_year(
        snapshot.infl_options, M, "year-on-year option"
    )
    bar_v = np.zeros(N)

    def build(proc: Product, bv) -> InflationModel:
        layout = ParamLayout(
            n_years=M,
            tilde_u=tuple(tilde_u),
            bar_u=layout0.bar_u,
            tilde_v=tuple(tilde_v),
            bar_v=tuple(bv),
        )
        return InflationModel(proc, layout, grid, nominal_model.terminal_discount)

    stages = []
    warm: dict | None = None
    for k in range(1, M + 1):
        name = f"inflation_year_{k}"
        rows = quotes_by_year.get(k)
        if not rows:
            # hold the CPI fit on this bucket even without quotes
            for d in (2 * k - 1, 2 * k):
                bar_v[d - 1] = fit_vbar(Product(tuple(comps)), M + k, factors[d - 1])
            stages.append(
                StageResult(
                    name,
                    _component_params(comps[M + k], _INFLATION_LOG_KEYS + _INFLATION_LIN_KEYS),
                    0.0,
                    0,
                    (),
                    ("no_quotes",),
                )
            )
            continue

        disc = nominal_model.terminal_discount * math.exp(
            nominal_model.log_bond_ratio(2 * k)
        )
        start = warm or dict(config.inflation_start)
        y_ref = _pack_inflation(start)
        fwd_quote = _yoy_forward_quote(cpi_targets, k)
        target_rows = [
            (
                float(strike),
                kind,
                (price_bps * 1e-4)
                if config.objective == "mse_price"
                else black_implied_vol(
                    price_bps * 1e-4,
                    fwd_quote,
                    strike,
                    float(k),
                    disc,
                    call=(kind == "cap"),
                    shift=config.vol_shift,
                ),
            )
            for strike, kind, price_bps in rows
        ]

        def objective(y, _k=k, _rows=target_rows, _ref=y_ref, _disc=disc, _fwd=fwd_quote):
            params = _unpack_inflation(y)
            if not _in_box(params, _INFLATION_BOX):
                return _penalty(y, _ref)
            strip = min(params["alpha_plus"], params["alpha_minus"])
            try:
                trial = list(comps)
                trial[M + _k] = _inflation_component(params, horizon)
                proc = Product(tuple(trial))
                bv = bar_v.copy()
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    for d in (2 * _k - 1, 2 * _k):
                        bv[d - 1] = fit_vbar(proc, M + _k, factors[d - 1])
                if max(abs(bv[2 * _k - 2]), abs(bv[2 * _k - 1])) > strip - config.bound_margin:
                    return _penalty(y, _ref)
                model = build(proc, bv)
                resid = [
                    _yoy_model_value(model, _k, strike, kind, _disc, _fwd, config)
                    - target
                    for strike, kind, target in _rows
                ]
                return _mse(resid)
            except (AffineModelError, ValueError, OverflowError):
                return _penalty(y, _ref)

        best_y, best_f, n_evals, series = _run_stage(name, objective, y_ref, config)
        params = _unpack_inflation(best_y)
        comps[M + k] = _inflation_component(params, horizon)
        proc_now = Product(tuple(comps))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for d in (2 * k - 1, 2 * k):
                bar_v[d - 1] = fit_vbar(proc_now, M + k, factors[d - 1])
        warm = params
        result = StageResult(name, params, best_f, n_evals, tuple(series))
        _check_target(name, result, config)
        stages.append(result)

    process_out = Product(tuple(comps))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bar_v_full = fit_vbar_sequence(process_out, tilde_u, tilde_v, cpi_targets)
    model = build(process_out, bar_v_full)

    residuals = []
    parity_err = 0.0
    discounts = model.discounts()
    for k in sorted(quotes_by_year):
        rows = quotes_by_year[k]
        disc = float(discounts[2 * k - 1])
        fwd_quote = _yoy_forward_quote(cpi_targets, k)
        fwd_model = forward_inflation_rate(model, 2 * k, 2)
        for strike, kind, price_bps in rows:
            target = (
                price_bps * 1e-4
                if config.objective == "mse_price"
                else black_implied_vol(
                    price_bps * 1e-4, fwd_quote, strike, float(k), disc,
                    call=(kind == "cap"), shift=config.vol_shift,
                )
            )
            value = _yoy_model_value(model, k, strike, kind, disc, fwd_quote, config)
            residuals.append((float(k), float(strike), value, float(target)))
            cap = inflation_caplet_price(model, 2 * k - 2, 2 * k, strike)
            floor = inflation_floorlet_price(model, 2 * k - 2, 2 * k, strike)
            parity = cap - floor - disc * (fwd_model - strike)
            parity_err = max(parity_err, abs(parity))

    curve_err = float(
        np.max(
            np.abs(
                np.array([model.forward_cpi(d) for d in range(1, N + 1)]) - cpi_targets
            )
        )
    )
    report = CalibrationReport(
        kind="inflation",
        objective_name=config.objective,
        stages=tuple(stages),
        residuals=tuple(residuals),
        parity_max_error=parity_err,
        curve_max_error=curve_err,
    )
    return model, report


def _yoy_forward_quote(cpi_targets, k: int) -> float:
    """Static year-on-year forward proxy used only for vol quoting."""
    base = cpi_targets[2 * k - 3] if k > 1 else 1.0
    return cpi_targets[2 * k - 1] / base - 1.0
