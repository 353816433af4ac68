"""Shared model fixtures and the acceptance-line terminal report."""

import numpy as np
import pytest

from affinemarkets import (
    CoshLiborModel,
    TenorGrid,
    build_inflation_model,
    fit_u_sequence,
    flat_curve_ratios,
)
from affinemarkets.processes import (
    CIR,
    CIRJump,
    BrownianDrift,
    DoubleGammaOUBM,
    Product,
)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log(pytestconfig):
    """Append one 'criterion N: PASS/FAIL ...' line per acceptance check."""
    return pytestconfig._acceptance_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


FLAT_RATE = 0.035


def build_cosh(spec, rate=FLAT_RATE):
    grid = TenorGrid.semiannual(spec.horizon)
    ratios = flat_curve_ratios(rate, grid)
    u_seq = fit_u_sequence(spec, grid, ratios)
    # flat simple period rate: P(0,T_N) consistent with the same curve
    disc = float(ratios[-1] / np.prod(1.0 + rate * np.diff([0.0, *grid.maturities])))
    return CoshLiborModel(
        process=spec, grid=grid, u_seq=tuple(u_seq), terminal_discount=disc
    )


@pytest.fixture(scope="session")
def brownian_model():
    return build_cosh(BrownianDrift(sigma=1.0, mu=0.0, x0=0.0, horizon=10.0))


@pytest.fixture(scope="session")
def skew_model():
    """Jump-diffusion driver whose caplet surface is skew-shaped."""
    spec = DoubleGammaOUBM(
        lam=0.02,
        theta=0.5,
        sigma=0.3,
        alpha_plus=12.0,
        alpha_minus=10.0,
        beta_plus=50.0,
        beta_minus=5.0,
        x0=0.7,
        horizon=10.0,
    )
    return build_cosh(spec)


@pytest.fixture(scope="session")
def smile_model():
    """Pure-jump driver whose caplet surface is smile-shaped."""
    spec = DoubleGammaOUBM(
        lam=0.02,
        theta=0.0,
        sigma=0.0,
        alpha_plus=50.0,
        alpha_minus=5.0,
        beta_plus=50.0,
        beta_minus=10.0,
        x0=1.0,
        horizon=10.0,
    )
    return build_cosh(spec)


def inflation_components(M, cir_eta=0.15):
    """Component list for an M-year joint model, Feller-safe square roots."""
    comps = [CIR(lam=0.55, theta=0.05, eta=cir_eta, x0=0.06, horizon=float(M))]
    for _ in range(M):
        comps.append(
            CIRJump(
                lam=0.7,
                theta=0.04,
                eta=0.22,
                x0=0.05,
                alpha=9.0,
                beta=0.6,
                horizon=float(M),
            )
        )
    for _ in range(M):
        comps.append(
            DoubleGammaOUBM(
                lam=0.35,
                theta=0.0,
                sigma=0.3,
                alpha_plus=18.0,
                alpha_minus=16.0,
                beta_plus=2.0,
                beta_minus=1.5,
                x0=0.1,
                horizon=float(M),
            )
        )
    return comps


def build_inflation(M=2, nominal_rate=0.03, infl_rate=0.02, P0T=0.94, cir_eta=0.15):
    proc = Product(components=tuple(inflation_components(M, cir_eta)))
    grid = TenorGrid.semiannual(float(M))
    ratios = np.array([np.exp(nominal_rate * (M - t)) for t in grid.maturities])
    cpi = np.array([(1.0 + infl_rate) ** t for t in grid.maturities])
    return build_inflation_model(proc, ratios, cpi, P0T)


@pytest.fixture(scope="session")
def inflation_model():
    return build_inflation(M=2)
