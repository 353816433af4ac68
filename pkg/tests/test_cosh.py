"""Terminal-measure LIBOR model: ladder fitting, transforms, option pricing.

The frozen tables below come from the Gaussian closed forms for the
standard-Brownian driver (semiannual grid to 10y, flat 3.5% curve);
regenerate with `python tests/gen_oracles.py brownian`.
"""

import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import FLAT_RATE, build_cosh
from affinemarkets import (
    CoshLiborModel,
    TenorGrid,
    caplet_price,
    caplet_vol_surface,
    fit_u_sequence,
    flat_curve_ratios,
    floorlet_price,
    put_swaption_price,
)
from affinemarkets.cosh import (
    _floorlet_sign_function,
    brownian_floorlet_price,
    brownian_put_swaption_price,
    brownian_u_from_ratio,
    find_exercise_bounds,
    fit_cosh_model,
    forward_rate_lower_bound,
    h_function,
)
from affinemarkets.errors import (
    ContourError,
    Infeasible,
    InvalidTime,
    NonmonotoneInput,
    NotUnimodal,
    PoleError,
    WrongSpec,
)
from affinemarkets.processes import CIR, BrownianDrift, DoubleGammaOUBM, GaussOU, Product

# (period k, strike, price) for the standard-Brownian model
FLOORLETS = [
    (1, 0.02, 0.0),
    (1, 0.035, 0.0004081854907635645),
    (1, 0.05, 0.0072460531102475955),
    (4, 0.02, 0.0),
    (4, 0.035, 0.001511794222720572),
    (4, 0.05, 0.007208193144113144),
    (12, 0.02, 0.0006318919638644011),
    (12, 0.035, 0.003885383721127729),
    (12, 0.05, 0.00828923434594298),
    (19, 0.02, 0.002420289274343125),
    (19, 0.035, 0.005704880635132933),
    (19, 0.05, 0.00958195922168463),
]

# (alpha, beta, strike, price)
SWAPTIONS = [
    (4, 8, 0.035, 0.005912871187810677),
    (2, 20, 0.03, 0.0),
    (10, 14, 0.05, 0.03123439473327905),
]


# ---------------------------------------------------------------------------
# grid and curve plumbing
# ---------------------------------------------------------------------------

def test_semiannual_grid():
    grid = TenorGrid.semiannual(10.0)
    assert grid.n == 20
    assert grid.T(0) == 0.0
    assert grid.T(7) == pytest.approx(3.5)
    assert grid.accrual(3) == pytest.approx(0.5)


def test_grid_rejects_bad_maturities():
    with pytest.raises(ValueError):
        TenorGrid((1.0, 0.5))
    with pytest.raises(ValueError):
        TenorGrid(())
    with pytest.raises(ValueError):
        TenorGrid((-0.5, 1.0))


def test_flat_curve_ratios_pin_every_forward(brownian_model):
    for k in range(1, brownian_model.n):
        assert brownian_model.forward(k) == pytest.approx(FLAT_RATE, rel=1e-12)


def test_discounts_decreasing(skew_model):
    d = skew_model.discounts()
    assert np.all(np.diff(d) < 0)
    assert d[-1] == pytest.approx(skew_model.terminal_discount)


# ---------------------------------------------------------------------------
# ladder fitting
# ---------------------------------------------------------------------------

def test_fitted_ladder_reproduces_ratios(skew_model):
    grid = skew_model.grid
    ratios = flat_curve_ratios(FLAT_RATE, grid)
    for u, r in zip(skew_model.u_seq, ratios):
        assert skew_model.martingale(0.0, u, skew_model.x0) == pytest.approx(
            r, rel=1e-12
        )
    assert all(a >= b for a, b in zip(skew_model.u_seq, skew_model.u_seq[1:]))


def test_brownian_ladder_closed_form(brownian_model):
    ratios = flat_curve_ratios(FLAT_RATE, brownian_model.grid)
    for u, r in zip(brownian_model.u_seq, ratios):
        assert u == pytest.approx(brownian_u_from_ratio(r, 10.0), rel=1e-12, abs=1e-12)
    with pytest.raises(Infeasible):
        brownian_u_from_ratio(0.98, 10.0)


def test_fit_rejects_bad_ratio_input():
    spec = BrownianDrift(sigma=1.0, mu=0.0, x0=0.0, horizon=2.0)
    grid = TenorGrid((1.0, 2.0))
    with pytest.raises(Infeasible):
        fit_u_sequence(spec, grid, [0.9, 1.0])
    with pytest.raises(NonmonotoneInput):
        fit_u_sequence(spec, grid, [1.01, 1.05])
    with pytest.raises(ValueError):
        fit_u_sequence(spec, grid, [1.05])
    product = Product(
        (
            CIR(lam=0.5, theta=0.05, eta=0.1, x0=0.04, horizon=2.0),
            GaussOU(lam=0.3, theta=0.0, sigma=0.2, x0=0.0, horizon=2.0),
        )
    )
    with pytest.raises(WrongSpec):
        fit_u_sequence(product, grid, [1.05, 1.0])


def test_fit_infeasible_beyond_attainable_range():
    spec = DoubleGammaOUBM(
        lam=0.4, theta=0.0, sigma=0.0, alpha_plus=3.0, alpha_minus=3.0,
        beta_plus=0.2, beta_minus=0.2, x0=0.5, horizon=2.0,
    )
    grid = TenorGrid((1.0, 2.0))
    lo, hi = spec.domain(2.0).uniform[0]
    cap = 0.999 * min(hi, -lo)
    pp, pm = spec.phi_psi(2.0, cap), spec.phi_psi(2.0, -cap)
    m_max = 0.5 * (
        math.exp(float(np.real(pp.phi) + np.real(pp.psi[0]) * 0.5))
        + math.exp(float(np.real(pm.phi) + np.real(pm.psi[0]) * 0.5))
    )
    with pytest.raises(Infeasible):
        fit_u_sequence(spec, grid, [2.0 * m_max, 1.0])


def test_model_constructor_validation():
    grid = TenorGrid.semiannual(2.0)
    spec = BrownianDrift(sigma=1.0, mu=0.0, x0=0.0, horizon=2.0)
    with pytest.raises(NonmonotoneInput):
        CoshLiborModel(spec, grid, (0.1, 0.2, 0.1, 0.0), 0.9)
    with pytest.raises(ValueError):
        CoshLiborModel(spec, grid, (0.2, 0.1, -0.1, 0.0), 0.9)
    with pytest.raises(ValueError):
        CoshLiborModel(spec, grid, (0.2, 0.1), 0.9)
    with pytest.raises(ValueError):
        CoshLiborModel(spec, TenorGrid((1.0, 3.0)), (0.2, 0.1), 0.9)
    product = Product(
        (
            CIR(lam=0.5, theta=0.05, eta=0.1, x0=0.04, horizon=2.0),
            GaussOU(lam=0.3, theta=0.0, sigma=0.2, x0=0.0, horizon=2.0),
        )
    )
    with pytest.raises(WrongSpec):
        CoshLiborModel(product, grid, (0.2, 0.15, 0.1, 0.0), 0.9)


# ---------------------------------------------------------------------------
# martingale shapes
# ---------------------------------------------------------------------------

def test_bond_ratios_ordered_and_above_one(skew_model):
    xs = np.linspace(-4.0, 6.0, 41)
    for t in (0.0, 2.5, 7.0):
        vals = np.array(
            [skew_model.martingale(t, u, xs) for u in skew_model.u_seq]
        )
        assert np.all(vals >= 1.0 - 1e-12)
        assert np.all(np.diff(vals, axis=0) <= 1e-12)


def test_terminal_martingale_is_plain_cosh(skew_model):
    u = skew_model.u(3)
    T = skew_model.process.horizon
    for x in (-1.5, 0.0, 2.0):
        assert skew_model.martingale(T, u, x) == pytest.approx(math.cosh(u * x))


# ---------------------------------------------------------------------------
# windowed slope transform
# ---------------------------------------------------------------------------

def test_transform_empty_window_and_zero_exponent(skew_model):
    assert h_function(skew_model, 1.0, 0.4 + 0.3j, skew_model.u(2), 0.7, 0.7) == 0
    assert h_function(skew_model, 1.0, 0.4 + 0.3j, 0.0, -1.0, 1.0) == 0


def test_transform_matches_quadrature_of_defining_integral(skew_model):
    m = skew_model
    t, u = 2.0, m.u(4)
    f1, s1, f2, s2 = m.shape(t, u)
    k1, k2 = -1.3, 2.1
    z = 0.8 + 1.7j

    def dm(x):
        return 0.5 * (s1 * np.exp(f1 + s1 * x) + s2 * np.exp(f2 + s2 * x))

    re = quad(lambda x: (np.exp(z * x) * dm(x)).real, k1, k2, epsabs=1e-14)[0]
    im = quad(lambda x: (np.exp(z * x) * dm(x)).imag, k1, k2, epsabs=1e-14)[0]
    got = h_function(m, t, z, u, k1, k2)
    assert got == pytest.approx(re + 1j * im, rel=1e-9)


def test_transform_vectorizes_and_flags_poles(skew_model):
    m = skew_model
    t, u = 2.0, m.u(4)
    zs = np.array([0.5 + 1.0j, -0.2 - 0.3j])
    batch = h_function(m, t, zs, u, -1.0, 1.5)
    for z, hv in zip(zs, batch):
        assert hv == pytest.approx(h_function(m, t, complex(z), u, -1.0, 1.5), rel=1e-14)
    s1 = m.shape(t, u)[1]
    with pytest.raises(PoleError):
        h_function(m, t, -s1, u, -1.0, 1.5)


# ---------------------------------------------------------------------------
# exercise window
# ---------------------------------------------------------------------------

def test_exercise_bounds_on_shifted_parabola():
    b = find_exercise_bounds(lambda y: 1.0 - (y - 0.3) ** 2)
    assert not b.degenerate
    assert b.xi == pytest.approx(0.3, abs=1e-6)
    assert b.kappa1 == pytest.approx(-0.7, abs=1e-9)
    assert b.kappa2 == pytest.approx(1.3, abs=1e-9)
    assert b.g_max == pytest.approx(1.0, abs=1e-9)


def test_exercise_bounds_degenerate_when_peak_nonpositive():
    b = find_exercise_bounds(lambda y: -1.0 - y * y)
    assert b.degenerate
    assert b.kappa1 == b.kappa2 == b.xi


def test_exercise_bounds_reject_unbounded_region():
    with pytest.raises(NotUnimodal):
        find_exercise_bounds(lambda y: 0.5 + 1.0 / (1.0 + y * y))


def test_floorlet_sign_region_is_single_interval(skew_model):
    m = skew_model
    k, strike = 3, 0.04
    k_tilde = 1.0 + m.grid.accrual(k + 1) * strike
    g = _floorlet_sign_function(m, k, k_tilde)
    b = find_exercise_bounds(g)
    assert not b.degenerate
    ys = np.linspace(-15.0, 15.0, 3001)
    pos = np.array([g(y) for y in ys]) > 0.0
    idx = np.flatnonzero(pos)
    assert np.array_equal(idx, np.arange(idx[0], idx[-1] + 1))
    assert ys[idx[0] - 1] <= b.kappa1 <= ys[idx[0]]
    assert ys[idx[-1]] <= b.kappa2 <= ys[idx[-1] + 1]


# ---------------------------------------------------------------------------
# pricing vs the Gaussian closed forms
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k,strike,want", FLOORLETS)
def test_brownian_closed_form_regression(brownian_model, k, strike, want):
    got = brownian_floorlet_price(brownian_model, k, strike)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("k,strike,want", FLOORLETS)
def test_fourier_floorlet_matches_closed_form(brownian_model, k, strike, want):
    got = floorlet_price(brownian_model, k, strike)
    assert got == pytest.approx(want, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("alpha,beta,strike,want", SWAPTIONS)
def test_fourier_swaption_matches_closed_form(brownian_model, alpha, beta, strike, want):
    assert brownian_put_swaption_price(brownian_model, alpha, beta, strike) == (
        pytest.approx(want, rel=1e-12, abs=1e-15)
    )
    got = put_swaption_price(brownian_model, alpha, beta, strike)
    assert got == pytest.approx(want, rel=1e-8, abs=1e-12)


def _floorlet_contours(model, k):
    """Midpoints of the pole gaps of the period-k floorlet integrand."""
    t_fix = model.grid.T(k)
    slopes = []
    for u in (model.u(k), model.u(k + 1)):
        sh = model.shape(t_fix, u)
        slopes += [sh[1], sh[3]]
    pts = sorted({0.0, *slopes})
    return [0.5 * (a + b) for a, b in zip(pts, pts[1:]) if b - a > 1e-3]


@pytest.mark.parametrize("k,strike", [(2, 0.03), (9, 0.045)])
def test_price_independent_of_contour(skew_model, k, strike):
    mids = _floorlet_contours(skew_model, k)
    assert len(mids) >= 3
    prices = [floorlet_price(skew_model, k, strike, R=r) for r in mids]
    spread = max(prices) - min(prices)
    assert spread <= 1e-8 * max(max(prices), 1e-12)
    assert floorlet_price(skew_model, k, strike) == pytest.approx(
        prices[0], rel=1e-8
    )


def test_explicit_contour_validation(skew_model):
    with pytest.raises(ContourError):
        floorlet_price(skew_model, 3, 0.04, R=0.0)
    with pytest.raises(ContourError):
        floorlet_price(skew_model, 3, 0.04, R=1e4)


# ---------------------------------------------------------------------------
# parity and cross-instrument identities
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k,strike", [(1, 0.02), (4, 0.035), (12, 0.05), (19, 0.04)])
def test_caplet_floorlet_parity(brownian_model, k, strike):
    m = brownian_model
    cap = caplet_price(m, k, strike)
    flt = floorlet_price(m, k, strike)
    disc = m.discounts()[k]  # P(0, T_{k+1})
    fwd = m.forward(k)
    want = disc * m.grid.accrual(k + 1) * (fwd - strike)
    assert cap - flt == pytest.approx(want, abs=1e-12)


def test_at_the_money_caplet_equals_floorlet(skew_model):
    k = 6
    strike = skew_model.forward(k)
    cap = caplet_price(skew_model, k, strike)
    flt = floorlet_price(skew_model, k, strike)
    assert cap == pytest.approx(flt, abs=1e-13)


def test_single_period_swaption_is_floorlet(skew_model):
    for k, strike in ((2, 0.03), (8, 0.05)):
        sw = put_swaption_price(skew_model, k, k + 1, strike)
        fl = floorlet_price(skew_model, k, strike)
        assert sw == pytest.approx(fl, rel=1e-9, abs=1e-14)


def test_swaption_index_validation(brownian_model):
    with pytest.raises(ValueError):
        put_swaption_price(brownian_model, 5, 5, 0.03)
    with pytest.raises(ValueError):
        put_swaption_price(brownian_model, 0, 4, 0.03)
    with pytest.raises(ValueError):
        put_swaption_price(brownian_model, 3, 21, 0.03)


# ---------------------------------------------------------------------------
# degenerate ladders and bounds
# ---------------------------------------------------------------------------

def test_flat_ladder_pins_rates_at_zero():
    model = build_cosh(
        BrownianDrift(sigma=1.0, mu=0.0, x0=0.0, horizon=10.0), rate=0.0
    )
    assert all(u == 0.0 for u in model.u_seq)
    assert model.forward(5) == 0.0
    strike = 0.02
    delta = model.grid.accrual(6)
    assert floorlet_price(model, 5, strike) == pytest.approx(delta * strike)
    assert caplet_price(model, 5, strike) == pytest.approx(0.0, abs=1e-15)
    sw = put_swaption_price(model, 4, 8, strike)
    want = strike * sum(model.grid.accrual(j) for j in range(5, 9))
    assert sw == pytest.approx(want)
    assert put_swaption_price(model, 4, 8, -0.01) == 0.0


def test_forward_rate_lower_bound_controls_floorlets(skew_model):
    k = 2
    bound = forward_rate_lower_bound(skew_model, k)
    assert bound > 0.0
    assert floorlet_price(skew_model, k, 0.9 * bound) == 0.0
    assert floorlet_price(skew_model, k, bound + 0.005) > 0.0
    with pytest.raises(InvalidTime):
        forward_rate_lower_bound(skew_model, k, t=skew_model.grid.T(k) + 1.0)


def test_low_strike_caplet_prices_at_intrinsic(brownian_model):
    m = brownian_model
    k, strike = 1, 0.02
    assert floorlet_price(m, k, strike) == 0.0
    want = m.discounts()[k] * m.grid.accrual(k + 1) * (m.forward(k) - strike)
    assert caplet_price(m, k, strike) == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------------------
# valuation away from time zero
# ---------------------------------------------------------------------------

def test_seasoned_parity_in_terminal_units(skew_model):
    m = skew_model
    k = 5
    t = m.grid.T(k) - 0.25
    strike = 0.04
    k_tilde = 1.0 + m.grid.accrual(k + 1) * strike
    for x in (m.x0 - 1.0, m.x0 + 0.5):
        cap = caplet_price(m, k, strike, t=t, x=x, discount=1.0)
        flt = floorlet_price(m, k, strike, t=t, x=x, discount=1.0)
        want = float(
            m.martingale(t, m.u(k), x) - k_tilde * m.martingale(t, m.u(k + 1), x)
        )
        assert cap - flt == pytest.approx(want, abs=1e-12)
        assert flt >= 0.0


def test_valuation_after_fixing_rejected(skew_model):
    t_late = skew_model.grid.T(3) + 0.6
    with pytest.raises(InvalidTime):
        floorlet_price(skew_model, 3, 0.03, t=t_late)
    with pytest.raises(InvalidTime):
        put_swaption_price(skew_model, 3, 7, 0.03, t=t_late)


# ---------------------------------------------------------------------------
# implied-vol surface
# ---------------------------------------------------------------------------

def test_vol_surface_rows(brownian_model):
    periods = (1, 4, 12)
    strikes = (0.02, 0.035, 0.05)
    rows = caplet_vol_surface(brownian_model, periods, strikes)
    assert len(rows) == 9
    assert rows[0]["expiry_years"] == pytest.approx(0.5)
    assert rows[0]["strike"] == 0.02
    assert rows[0]["implied_vol"] == 0.0  # intrinsic: strike below the rate floor
    for row, (k, K) in zip(rows, [(k, K) for k in periods for K in strikes]):
        assert row["price"] == pytest.approx(caplet_price(brownian_model, k, K))
        assert not math.isnan(row["implied_vol"])
    atm = [r for r in rows if r["strike"] == 0.035]
    assert all(v["implied_vol"] > 0.0 for v in atm)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_model_json_round_trip(skew_model):
    payload = json.loads(json.dumps(skew_model.to_dict()))
    clone = CoshLiborModel.from_dict(payload)
    assert clone.u_seq == skew_model.u_seq
    assert clone.terminal_discount == skew_model.terminal_discount
    assert clone.grid.maturities == skew_model.grid.maturities
    assert floorlet_price(clone, 4, 0.03) == floorlet_price(skew_model, 4, 0.03)


def test_from_dict_rejects_foreign_payload(skew_model):
    with pytest.raises(WrongSpec):
        CoshLiborModel.from_dict({"type": "inflation_market"})
    payload = skew_model.to_dict()
    payload["type"] = "zoo"
    with pytest.raises(WrongSpec):
        CoshLiborModel.from_dict(payload)


def test_fit_cosh_model_convenience(brownian_model):
    grid = brownian_model.grid
    ratios = flat_curve_ratios(FLAT_RATE, grid)
    built = fit_cosh_model(
        brownian_model.process, grid, ratios, brownian_model.terminal_discount
    )
    assert built.u_seq == pytest.approx(brownian_model.u_seq)
