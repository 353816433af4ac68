"""Regenerate the frozen oracle literals used by the test suite.

Run `python tests/gen_oracles.py riccati` (or `brownian`) and paste the
output over the matching table.  The values come from independent code
paths: adaptive ODE integration of the transform equations, and the
Gaussian closed forms; the semi-analytic pricers never feed them.
"""

import sys

import numpy as np

from affinemarkets.cosh import (
    CoshLiborModel,
    TenorGrid,
    brownian_floorlet_price,
    brownian_put_swaption_price,
    fit_u_sequence,
    flat_curve_ratios,
)
from affinemarkets.processes import (
    CIR,
    CIRJump,
    BrownianDrift,
    DoubleGammaOUBM,
    GaussOU,
    riccati_integrate,
)


def riccati():
    cases = [
        ("CIR", CIR(lam=0.026, theta=0.65, eta=0.5, x0=3.45, horizon=10.0),
         [(0.75, 0.9), (3.0, -1.2), (9.5, 0.21)]),
        ("CIRJump", CIRJump(lam=0.7, theta=0.04, eta=0.22, x0=0.05, alpha=9.0,
                            beta=0.6, horizon=5.0),
         [(0.5, 2.0), (2.5, -3.0), (4.75, 0.8)]),
        ("GaussOU", GaussOU(lam=0.3, theta=0.12, sigma=0.4, x0=0.25, horizon=8.0),
         [(1.0, 1.4), (4.0, -2.2), (7.5, 0.6)]),
        ("DoubleGammaOUBM",
         DoubleGammaOUBM(lam=0.02, theta=0.5, sigma=0.3, alpha_plus=12.0,
                         alpha_minus=10.0, beta_plus=50.0, beta_minus=5.0,
                         x0=0.7, horizon=10.0),
         [(0.5, 4.0), (5.0, -6.0), (9.0, 1.1)]),
        ("BrownianDrift", BrownianDrift(sigma=1.0, mu=-0.5, x0=0.0, horizon=10.0),
         [(1.0, 0.7), (6.0, -1.3), (9.5, 2.0)]),
    ]
    for name, spec, pts in cases:
        print(f'    "{name}": [')
        for t, u in pts:
            pp = riccati_integrate(spec, t, np.array([u]))
            print(f"        ({t!r}, {u!r}, {pp.phi!r}, {float(pp.psi[0])!r}),")
        print("    ],")


def brownian():
    spec = BrownianDrift(sigma=1.0, mu=0.0, x0=0.0, horizon=10.0)
    grid = TenorGrid.semiannual(10.0)
    ratios = flat_curve_ratios(0.035, grid)
    u_seq = fit_u_sequence(spec, grid, ratios)
    disc = float(1.0 / np.prod(1.0 + 0.035 * np.diff([0.0, *grid.maturities])))
    model = CoshLiborModel(
        process=spec, grid=grid, u_seq=tuple(u_seq), terminal_discount=disc
    )
    print("FLOORLETS = [")
    for k in (1, 4, 12, 19):
        for K in (0.02, 0.035, 0.05):
            print(f"    ({k}, {K}, {float(brownian_floorlet_price(model, k, K))!r}),")
    print("]")
    print("SWAPTIONS = [")
    for a, b, K in ((4, 8, 0.035), (2, 20, 0.03), (10, 14, 0.05)):
        v = float(brownian_put_swaption_price(model, a, b, K))
        print(f"    ({a}, {b}, {K}, {v!r}),")
    print("]")


if __name__ == "__main__":
    {"riccati": riccati, "brownian": brownian}[sys.argv[1]]()
