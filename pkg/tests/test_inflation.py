"""Joint nominal/inflation model: layout, transforms, swaps, options, fitting."""

import json
import math

import numpy as np
import pytest

from conftest import build_inflation, inflation_components
from affinemarkets import (
    InflationModel,
    MarketSnapshot,
    ParamLayout,
    TenorGrid,
    build_inflation_model,
    cpi_call_price,
    cpi_log_mgf,
    cpi_put_price,
    double_time_mgf,
    forward_inflation_rate,
    forward_measure_mgf,
    inflation_caplet_price,
    inflation_floorlet_price,
    nominal_caplet_price,
    nominal_floorlet_price,
    yoy_mgf,
    yyiis_rate,
    yyiis_value,
    zciis_rate,
    zciis_value,
)
from affinemarkets.inflation import (
    _comp_mgf,
    assemble_vectors,
    correlation,
    fit_vbar,
)
from affinemarkets.errors import (
    AmbiguousRoots,
    DegenerateVariance,
    DomainError,
    Infeasible,
    InvalidTime,
    LayoutError,
    NonmonotoneInput,
    WrongSpec,
)
from affinemarkets.processes import CIR, GaussOU, Product


def sample_layout():
    return ParamLayout(
        n_years=2,
        tilde_u=(0.40, 0.30, 0.20, 0.10),
        bar_u=(0.50, 0.35, 0.45, 0.25),
        tilde_v=(0.42, 0.33, 0.24, 0.15),
        bar_v=(0.10, -0.05, 0.08, 0.02),
    )


# ---------------------------------------------------------------------------
# exponent layout
# ---------------------------------------------------------------------------

def test_layout_vector_structure():
    lay = sample_layout()
    assert lay.dim == 5
    assert [lay.year_of(k) for k in (1, 2, 3, 4)] == [1, 1, 2, 2]
    # date 1 (year 1): common, own bucket, first-half entry of year 2
    assert lay.u_vector(1) == pytest.approx([0.40, 0.50, 0.45, 0.0, 0.0])
    assert lay.u_vector(2) == pytest.approx([0.30, 0.35, 0.45, 0.0, 0.0])
    # dates in year 2 no longer load the year-1 bucket
    assert lay.u_vector(3) == pytest.approx([0.20, 0.0, 0.45, 0.0, 0.0])
    assert lay.u_vector(4) == pytest.approx([0.10, 0.0, 0.25, 0.0, 0.0])
    # v adds the matching inflation bucket on top of the nominal entries
    assert lay.v_vector(1) == pytest.approx([0.42, 0.50, 0.45, 0.10, 0.0])
    assert lay.v_vector(4) == pytest.approx([0.15, 0.0, 0.25, 0.0, 0.02])


def test_layout_assembles_ordered_vectors():
    U, V = assemble_vectors(sample_layout())
    assert U.shape == V.shape == (4, 5)
    assert np.all(np.diff(U, axis=0) <= 1e-12)
    for k in (1, 2, 3, 4):
        assert U[k - 1] == pytest.approx(sample_layout().u_vector(k))
        assert V[k - 1] == pytest.approx(sample_layout().v_vector(k))


def test_layout_allows_sawtooth_across_buckets():
    # later bucket entries may exceed earlier ones: different coordinates
    lay = ParamLayout(
        n_years=2,
        tilde_u=(0.4, 0.3, 0.2, 0.1),
        bar_u=(1.0, 0.5, 2.0, 1.8),
        tilde_v=(0.4, 0.3, 0.2, 0.1),
        bar_v=(0.0, 0.0, 0.0, 0.0),
    )
    U, _ = assemble_vectors(lay)
    assert np.all(np.diff(U, axis=0) <= 1e-12)


def test_layout_validation_errors():
    good = dict(
        n_years=2,
        tilde_u=(0.4, 0.3, 0.2, 0.1),
        bar_u=(0.5, 0.35, 0.45, 0.25),
        tilde_v=(0.4, 0.3, 0.2, 0.1),
        bar_v=(0.0, 0.0, 0.0, 0.0),
    )
    with pytest.raises(LayoutError):
        ParamLayout(**{**good, "n_years": 0})
    with pytest.raises(LayoutError):
        ParamLayout(**{**good, "tilde_u": (0.4, 0.3, 0.2)})
    with pytest.raises(LayoutError):
        ParamLayout(**{**good, "tilde_u": (0.3, 0.4, 0.2, 0.1)})
    with pytest.raises(LayoutError):
        ParamLayout(**{**good, "bar_u": (-0.1, 0.0, 0.45, 0.25)})
    with pytest.raises(LayoutError):
        ParamLayout(**{**good, "bar_u": (0.35, 0.5, 0.45, 0.25)})


def test_layout_round_trip():
    lay = sample_layout()
    assert ParamLayout.from_dict(json.loads(json.dumps(lay.to_dict()))) == lay


# ---------------------------------------------------------------------------
# model construction and curves
# ---------------------------------------------------------------------------

def test_model_requires_matching_product():
    lay = sample_layout()
    grid = TenorGrid.semiannual(2.0)
    comps = inflation_components(2)
    with pytest.raises(WrongSpec):
        InflationModel(comps[0], lay, grid, 0.94)
    with pytest.raises(WrongSpec):
        InflationModel(Product(tuple(comps[:3])), lay, grid, 0.94)
    with pytest.raises(WrongSpec):
        InflationModel(Product(tuple(comps)), lay, TenorGrid.semiannual(1.0), 0.94)
    # common factor must be a nonnegative process
    swapped = (GaussOU(lam=0.3, theta=0.0, sigma=0.2, x0=0.0, horizon=2.0),) + tuple(
        comps[1:]
    )
    with pytest.raises(WrongSpec):
        InflationModel(Product(swapped), lay, grid, 0.94)


def test_fitted_model_reproduces_curves(inflation_model):
    m = inflation_model
    grid = m.grid
    ratios = np.array([math.exp(0.03 * (2.0 - t)) for t in grid.maturities])
    cpi = np.array([1.02**t for t in grid.maturities])
    assert m.discounts() == pytest.approx(0.94 * ratios, rel=1e-10)
    got_cpi = np.array([m.forward_cpi(k) for k in range(1, m.n + 1)])
    assert got_cpi == pytest.approx(cpi, rel=1e-10)
    for k in range(2, m.n + 1):
        want = (math.exp(0.03 * 0.5) - 1.0) / 0.5
        assert m.forward_rate(k) == pytest.approx(want, rel=1e-9)


def test_model_serialization_round_trip(inflation_model):
    m = inflation_model
    clone = InflationModel.from_dict(json.loads(json.dumps(m.to_dict())))
    assert clone.layout == m.layout
    assert np.array_equal(clone.discounts(), m.discounts())
    assert clone.forward_cpi(3) == m.forward_cpi(3)
    with pytest.raises(WrongSpec):
        InflationModel.from_dict({"type": "cosh_libor"})


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def test_forward_measure_mgf_degeneracies(inflation_model):
    m = inflation_model
    dim = m.process.dim
    assert forward_measure_mgf(m, 3, np.zeros(dim)) == 1.0
    with pytest.raises(WrongSpec):
        forward_measure_mgf(m, 3, np.zeros(dim - 1))


def test_cpi_log_mgf_recovers_forward_cpi(inflation_model):
    m = inflation_model
    for k in (1, 2, 4):
        assert cpi_log_mgf(m, k, 0.0) == pytest.approx(1.0, rel=1e-14)
        got = cpi_log_mgf(m, k, 1.0)
        assert got.imag == pytest.approx(0.0, abs=1e-14)
        assert got.real == pytest.approx(m.forward_cpi(k), rel=1e-12)
    # martingale in the seasoned state as well
    x = m.x0 * 1.3 + 0.01
    s = 0.75
    assert cpi_log_mgf(m, 3, 1.0, s=s, x=x).real == pytest.approx(
        m.forward_cpi(3, s, x), rel=1e-12
    )


def test_double_time_mgf_degenerate_edges(inflation_model):
    m = inflation_model
    k, r, t = 4, 0.6, 1.4
    u = 0.25 * m.u(2)
    w = 0.20 * m.v(3)
    zero = np.zeros(m.process.dim)
    two = double_time_mgf(m, k, u, zero, r, t)
    one = forward_measure_mgf(m, k, u, r=r)
    assert two == pytest.approx(one, rel=1e-12)
    two = double_time_mgf(m, k, zero, w, r, t)
    one = forward_measure_mgf(m, k, w, r=t)
    assert two == pytest.approx(one, rel=1e-12)
    two = double_time_mgf(m, k, u, w, r, r)
    one = forward_measure_mgf(m, k, u + w, r=r)
    assert two == pytest.approx(one, rel=1e-12)
    assert double_time_mgf(m, k, zero, zero, r, t) == 1.0 + 0.0j


def test_double_time_mgf_names_failed_condition(inflation_model):
    m = inflation_model
    dim = m.process.dim
    big = np.full(dim, 40.0)
    small = 0.1 * m.u(2)
    with pytest.raises(DomainError, match="condition 1"):
        double_time_mgf(m, 4, small, big, 0.5, 1.2)
    with pytest.raises(DomainError, match="condition 2"):
        double_time_mgf(m, 4, big, small, 0.5, 1.2)
    with pytest.raises(InvalidTime):
        double_time_mgf(m, 4, small, small, 1.2, 0.5)


def test_yoy_mgf_matches_par_rate(inflation_model):
    m = inflation_model
    for k, j in ((2, 2), (4, 2), (3, 1), (4, 4)):
        tau = m.grid.T(k) - m.grid.T(k - j)
        got = yoy_mgf(m, k, j, 1.0)
        want = 1.0 + tau * forward_inflation_rate(m, k, j)
        assert got.imag == pytest.approx(0.0, abs=1e-13)
        assert got.real == pytest.approx(want, rel=1e-10)
        assert yoy_mgf(m, k, j, 0.0) == pytest.approx(1.0, rel=1e-14)


def test_forward_inflation_rate_anchored_at_base(inflation_model):
    m = inflation_model
    # k = j anchors at the unit base fixing: the par ratio is the forward CPI
    k = 2
    tau = m.grid.T(k)
    want = (m.forward_cpi(k) - 1.0) / tau
    assert forward_inflation_rate(m, k, j=k) == pytest.approx(want, rel=1e-12)
    with pytest.raises(InvalidTime):
        forward_inflation_rate(m, 4, j=2, t=m.grid.T(2) + 0.1)
    with pytest.raises(ValueError):
        forward_inflation_rate(m, 2, j=3)


# ---------------------------------------------------------------------------
# linear swaps
# ---------------------------------------------------------------------------

def test_zciis_par_consistency(inflation_model):
    m = inflation_model
    for years in (1, 2):
        k = zciis_rate(m, years)
        assert (1.0 + k) ** years == pytest.approx(m.forward_cpi(2 * years), rel=1e-12)
        assert zciis_value(m, years, k) == pytest.approx(0.0, abs=1e-14)
        # fixture CPI curve grows at 2%
        assert k == pytest.approx(0.02, rel=1e-9)
    with pytest.raises(ValueError):
        zciis_rate(m, 3)


def test_yyiis_par_consistency(inflation_model):
    m = inflation_model
    for years in (1, 2):
        k = yyiis_rate(m, years)
        assert yyiis_value(m, years, k) == pytest.approx(0.0, abs=1e-14)
    # weighted average of period par rates sits between their extremes
    rates = [forward_inflation_rate(m, 2 * j, j=2) for j in (1, 2)]
    assert min(rates) - 1e-12 <= yyiis_rate(m) <= max(rates) + 1e-12


# ---------------------------------------------------------------------------
# option prices
# ---------------------------------------------------------------------------

def test_cpi_call_limit_and_parity(inflation_model):
    m = inflation_model
    k = 3
    disc = m.discounts()[k - 1]
    fwd = m.forward_cpi(k)
    assert cpi_call_price(m, k, 1e-8) == pytest.approx(disc * fwd, rel=1e-4)
    for strike in (0.95, 1.01, 1.12):
        call = cpi_call_price(m, k, strike)
        put = cpi_put_price(m, k, strike)
        assert call >= 0.0 and put >= 0.0
        assert call - put == pytest.approx(disc * (fwd - strike), abs=1e-10)
    with pytest.raises(ValueError):
        cpi_call_price(m, k, -0.2)


def test_inflation_caplet_parity_and_limits(inflation_model):
    m = inflation_model
    k_base, k = 2, 4
    tau = m.grid.T(k) - m.grid.T(k_base)
    disc = m.discounts()[k - 1]
    f_i = forward_inflation_rate(m, k, k - k_base)
    for strike in (0.0, 0.02, 0.05):
        cap = inflation_caplet_price(m, k_base, k, strike)
        flr = inflation_floorlet_price(m, k_base, k, strike)
        assert cap - flr == pytest.approx(disc * tau * (f_i - strike), abs=1e-12)
        assert cap >= 0.0 and flr >= -1e-12
    assert inflation_caplet_price(m, k_base, k, 8.0) == pytest.approx(0.0, abs=1e-12)
    assert inflation_floorlet_price(m, k_base, k, -0.9) == pytest.approx(
        0.0, abs=1e-8
    )
    with pytest.raises(ValueError):
        inflation_caplet_price(m, 4, 4, 0.02)


def test_nominal_caplet_validation_and_floor_parity(inflation_model):
    m = inflation_model
    with pytest.raises(ValueError):
        nominal_caplet_price(m, 1, 0.02)
    with pytest.raises(ValueError):
        nominal_caplet_price(m, 3, -3.0)
    k = 3
    strike = m.forward_rate(k)
    cap = nominal_caplet_price(m, k, strike)
    flr = nominal_floorlet_price(m, k, strike)
    assert cap == pytest.approx(flr, abs=1e-13)
    assert cap > 0.0
    deep = nominal_floorlet_price(m, k, strike - 0.05)
    assert deep == pytest.approx(0.0, abs=1e-8)


def test_nominal_prices_ignore_inflation_legs():
    base = build_inflation(M=2)
    proc = Product(components=tuple(inflation_components(2)))
    grid = TenorGrid.semiannual(2.0)
    ratios = np.array([math.exp(0.03 * (2.0 - t)) for t in grid.maturities])
    cpi = np.array([1.02**t for t in grid.maturities])
    alt = build_inflation_model(proc, ratios, cpi, 0.94, tilt=0.25)
    assert not np.array_equal(
        np.asarray(alt.layout.tilde_v), np.asarray(base.layout.tilde_v)
    )
    assert np.array_equal(base.discounts(), alt.discounts())
    for k in (2, 4):
        assert base.forward_rate(k) == alt.forward_rate(k)
        assert nominal_caplet_price(base, k, 0.05) == nominal_caplet_price(
            alt, k, 0.05
        )


# ---------------------------------------------------------------------------
# correlations
# ---------------------------------------------------------------------------

def test_correlation_properties(inflation_model):
    m = inflation_model
    t = 0.4
    qa, qb = ("forward_rate", 3), ("forward_cpi", 4)
    r_ab = correlation(m, t, qa, qb)
    assert correlation(m, t, qb, qa) == pytest.approx(r_ab, rel=1e-12)
    assert abs(r_ab) <= 1.0 + 1e-12
    assert correlation(m, t, qa, qa) == pytest.approx(1.0, rel=1e-12)
    r_yoy = correlation(m, 0.3, ("yoy_rate", 4, 2), qa)
    assert abs(r_yoy) <= 1.0 + 1e-12
    with pytest.warns(DegenerateVariance):
        assert math.isnan(correlation(m, 0.0, qa, qb))
    with pytest.raises(ValueError):
        correlation(m, t, ("spot", 1), qb)


# ---------------------------------------------------------------------------
# root policy of the inflation-bucket fit
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def vbar_process():
    return Product(components=tuple(inflation_components(2)))


def test_fit_vbar_unit_target_is_zero(vbar_process):
    assert fit_vbar(vbar_process, 3, 1.0) == 0.0
    assert fit_vbar(vbar_process, 3, 1.0 + 5e-15) == 0.0


def test_fit_vbar_straddling_roots_prefers_positive(vbar_process):
    root = fit_vbar(vbar_process, 3, 1.2)
    assert root > 0.0
    assert _comp_mgf(vbar_process, 3, root) == pytest.approx(1.2, rel=1e-10)


def test_fit_vbar_same_sign_roots_warns(vbar_process):
    idx, target = 3, 0.99
    with pytest.warns(AmbiguousRoots):
        root = fit_vbar(vbar_process, idx, target)
    assert root < 0.0
    assert _comp_mgf(vbar_process, idx, root) == pytest.approx(target, rel=1e-10)


def test_fit_vbar_unreachable_target(vbar_process):
    with pytest.raises(Infeasible):
        fit_vbar(vbar_process, 3, 1e-6)
    with pytest.raises(Infeasible):
        fit_vbar(vbar_process, 3, -0.5)


# ---------------------------------------------------------------------------
# curve fitting entry point
# ---------------------------------------------------------------------------

def test_build_model_input_validation():
    proc = Product(components=tuple(inflation_components(2)))
    grid = TenorGrid.semiannual(2.0)
    good = np.array([math.exp(0.03 * (2.0 - t)) for t in grid.maturities])
    cpi = np.ones(4)
    with pytest.raises(Infeasible):
        build_inflation_model(proc, good * 1.01, cpi, 0.94)
    swapped = good.copy()
    swapped[[1, 2]] = swapped[[2, 1]]
    with pytest.raises(NonmonotoneInput):
        build_inflation_model(proc, swapped, cpi, 0.94)
    with pytest.raises(WrongSpec):
        build_inflation_model(proc, good[:3], cpi, 0.94)
    comps3 = inflation_components(2)[:4]
    with pytest.raises(WrongSpec):
        build_inflation_model(Product(tuple(comps3)), good, cpi, 0.94)


def test_build_model_rejects_wrong_horizon():
    comps = inflation_components(3)  # horizon 3 process
    proc = Product(components=tuple(comps[:5]))  # dim 5 => M = 2
    grid = TenorGrid.semiannual(2.0)
    ratios = np.array([math.exp(0.03 * (2.0 - t)) for t in grid.maturities])
    with pytest.raises(WrongSpec):
        build_inflation_model(proc, ratios, np.ones(4), 0.94)


# ---------------------------------------------------------------------------
# market snapshot plumbing
# ---------------------------------------------------------------------------

def test_snapshot_discount_interpolation():
    snap = MarketSnapshot(curve=((1.0, 0.97), (2.0, 0.94), (5.0, 0.85)))
    assert snap.discount(0.0) == 1.0
    assert snap.discount(2.0) == pytest.approx(0.94)
    mid = snap.discount(1.5)
    assert mid == pytest.approx(math.sqrt(0.97 * 0.94), rel=1e-12)
    grid = TenorGrid.semiannual(2.0)
    ratios = snap.discount_ratios(grid)
    assert ratios[-1] == 1.0
    assert np.all(np.diff(ratios) < 0)
    with pytest.raises(ValueError):
        snap.discount(6.0)


def test_snapshot_cpi_curve_from_zciis():
    snap = MarketSnapshot(
        curve=((1.0, 0.97), (2.0, 0.94)),
        zciis=((1.0, 0.02), (2.0, 0.025)),
    )
    grid = TenorGrid.semiannual(2.0)
    cpi = snap.forward_cpi_curve(grid)
    assert cpi[1] == pytest.approx(1.02)
    assert cpi[3] == pytest.approx(1.025**2)
    assert cpi[0] == pytest.approx(math.exp(0.5 * math.log(1.02)))
    with pytest.raises(ValueError):
        MarketSnapshot(curve=((1.0, 0.97),), zciis=((1.0, 0.02),)).forward_cpi_curve(
            TenorGrid.semiannual(2.0)
        )


def test_snapshot_validation():
    with pytest.raises(ValueError):
        MarketSnapshot(curve=())
    with pytest.raises(ValueError):
        MarketSnapshot(curve=((2.0, 0.94), (1.0, 0.97)))
    with pytest.raises(ValueError):
        MarketSnapshot(curve=((1.0, 1.2),))
    with pytest.raises(ValueError):
        MarketSnapshot(curve=((1.0, 0.97),), infl_options=((2.0, 0.01, "straddle", 10.0),))
