"""Affine interest-rate and inflation market models.

Closed-form transform exponents for a family of affine driving
processes, a cosh-martingale rate ladder with semi-analytic caplet,
floorlet and swaption pricing, an exponential-martingale joint
nominal/inflation model with CPI and year-on-year derivatives, staged
market calibration, and a seeded Monte Carlo engine for independent
verification.
"""

from .black import black_implied_vol, black_price
from .calibrate import (
    CalibrationConfig,
    CalibrationReport,
    StageResult,
    calibrate_inflation,
    calibrate_nominal,
)
from .cosh import (
    CoshLiborModel,
    ExerciseBounds,
    TenorGrid,
    brownian_floorlet_price,
    brownian_put_swaption_price,
    brownian_u_from_ratio,
    caplet_price,
    caplet_vol_surface,
    cosh_martingale,
    find_exercise_bounds,
    fit_cosh_model,
    fit_u_sequence,
    flat_curve_ratios,
    floorlet_price,
    forward_rate_lower_bound,
    h_function,
    put_swaption_price,
)
from .errors import (
    AffineModelError,
    AmbiguousRoots,
    BudgetExhausted,
    ContourError,
    DegenerateVariance,
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
    ParamLayout,
    assemble_vectors,
    build_inflation_model,
    correlation,
    cpi_call_price,
    cpi_log_mgf,
    cpi_put_price,
    double_time_mgf,
    fit_tilde_u,
    fit_ubar_sequence,
    fit_vbar,
    fit_vbar_sequence,
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
from .io import (
    load_model,
    read_caplet_vols,
    read_curve,
    read_inflation_options,
    read_snapshot,
    read_zciis,
    save_model,
)
from .mc import SimConfig, mc_price, simulate
from .processes import (
    BrownianDrift,
    CIR,
    CIRJump,
    DoubleGammaOUBM,
    GaussOU,
    MomentDomain,
    PhiPsi,
    Product,
    domain,
    mgf,
    phi_psi,
    riccati_integrate,
    spec_from_dict,
    spec_from_json,
    variance,
)

__version__ = "0.1.0"
