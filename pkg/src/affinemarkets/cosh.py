"""Cap/floor/swaption model with cosh-shaped bond ratios.

Normalized bonds are driven by a one-dimensional affine process X through

    P(t, T_k) / P(t, T) = M_t^{u_k}(X_t),
    M_t^u(x) = ( e^{phi_{T-t}(u) + psi_{T-t}(u) x}
               + e^{phi_{T-t}(-u) + psi_{T-t}(-u) x} ) / 2,

with a nonincreasing exponent ladder u_1 >= ... >= u_N >= 0.  Each M_t^u
is a positive martingale mixture of two exponentials, so simple forwards
stay above model-implied lower bounds, and caps/floors and swaptions
price semi-analytically: the exercise region of the terminal payoff is
an interval (kappa1, kappa2) found by root search, and the windowed
expectation reduces to one Fourier integral of the transform.

Index convention: period k covers [T_k, T_{k+1}], fixes at T_k, pays at
T_{k+1}, and involves the exponent pair (u_k, u_{k+1}), k = 1..N-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.stats import norm

from ._quad import integrate_halfline
from .black import black_implied_vol
from .errors import (
    ContourError,
    Infeasible,
    InvalidTime,
    NonmonotoneInput,
    NotUnimodal,
    OutOfBounds,
    PoleError,
    WrongSpec,
)
from .processes import AffineProcessSpec, BrownianDrift, spec_from_dict

_EXP_CLIP = 700.0
_LOG2 = math.log(2.0)
_BRACKET_LIMIT = 1e6


@dataclass(frozen=True)
class TenorGrid:
    """Strictly increasing payment dates T_1 < ... < T_N (year fractions)."""

    maturities: tuple[float, ...]

    def __post_init__(self):
        mats = tuple(float(m) for m in self.maturities)
        object.__setattr__(self, "maturities", mats)
        if len(mats) < 2:
            raise ValueError("need at least two tenor dates")
        if mats[0] <= 0:
            raise ValueError("tenor dates must be positive")
        if any(b <= a for a, b in zip(mats, mats[1:])):
            raise ValueError("tenor dates must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.maturities)

    def T(self, k: int) -> float:
        """k-th date, 1-based; T(0) = 0."""
        if k == 0:
            return 0.0
        return self.maturities[k - 1]

    def accrual(self, k: int) -> float:
        """Delta_k = T_k - T_{k-1} (with T_0 = 0)."""
        return self.T(k) - self.T(k - 1)

    @staticmethod
    def semiannual(years: float) -> "TenorGrid":
        n = int(round(2 * years))
        return TenorGrid(tuple(0.5 * k for k in range(1, n + 1)))


def flat_curve_ratios(rate: float, grid: TenorGrid) -> np.ndarray:
    """Discount ratios P(0,T_k)/P(0,T_N) for a flat simple period rate."""
    growth = np.cumprod(
        [1.0 + rate * grid.accrual(k) for k in range(1, grid.n + 1)]
    )  # growth[k-1] = 1 / P(0, T_k)
    return growth[-1] / growth


# four numbers fix M_t^u as a function of the state:
# (phi_{T-t}(u), psi_{T-t}(u), phi_{T-t}(-u), psi_{T-t}(-u))
Shape = tuple[float, float, float, float]


def _shape_log_m(sh: Shape, y: float) -> float:
    """log M(y) from a precomputed shape; scalar, overflow-safe."""
    a = sh[0] + sh[1] * y
    b = sh[2] + sh[3] * y
    if a < b:
        a, b = b, a
    gap = a - b
    if gap > 40.0:
        return a - _LOG2
    return a + math.log1p(math.exp(-gap)) - _LOG2


@dataclass(frozen=True)
class ExerciseBounds:
    kappa1: float
    xi: float
    kappa2: float
    degenerate: bool
    g_max: float


@dataclass(frozen=True)
class CoshLiborModel:
    process: AffineProcessSpec
    grid: TenorGrid
    u_seq: tuple[float, ...]
    terminal_discount: float

    def __post_init__(self):
        object.__setattr__(self, "u_seq", tuple(float(u) for u in self.u_seq))
        if self.process.dim != 1:
            raise WrongSpec("cosh model requires a one-dimensional driving process")
        if len(self.u_seq) != self.grid.n:
            raise ValueError("u_seq length must match the tenor grid")
        if abs(self.grid.maturities[-1] - self.process.horizon) > 1e-9:
            raise ValueError("grid must end at the process horizon")
        if self.terminal_discount <= 0:
            raise ValueError("terminal discount must be positive")
        us = self.u_seq
        if any(u < 0 for u in us):
            raise ValueError("exponents must be nonnegative")
        if any(b > a + 1e-12 for a, b in zip(us, us[1:])):
            raise NonmonotoneInput("exponent ladder must be nonincreasing")
        lo, hi = self.process.domain(self.process.horizon).uniform[0]
        for u in us:
            if u != 0.0 and not (lo < -u and u < hi):
                raise ValueError(
                    f"exponent {u} leaves the admissible strip ({lo}, {hi})"
                )

    # -- bookkeeping -----------------------------------------------------
    @property
    def n(self) -> int:
        return self.grid.n

    def u(self, k: int) -> float:
        """Exponent attached to date T_k, 1-based."""
        return self.u_seq[k - 1]

    @property
    def x0(self) -> float:
        return float(self.process.x0_vector[0])

    def shape(self, t: float, u: float) -> Shape:
        """Constants of M_t^u: (phi(u), psi(u), phi(-u), psi(-u)) at T - t."""
        tau = self.process.horizon - t
        if tau < -1e-12:
            raise InvalidTime(f"t={t} beyond the terminal date")
        tau = max(tau, 0.0)
        if u == 0.0:
            return (0.0, 0.0, 0.0, 0.0)
        pp = self.process.phi_psi(tau, u)
        pm = self.process.phi_psi(tau, -u)
        return (
            float(np.real(pp.phi)),
            float(np.real(pp.psi[0])),
            float(np.real(pm.phi)),
            float(np.real(pm.psi[0])),
        )

    def log_martingale(self, t: float, u: float, x):
        """log M_t^u(x); x may be an array."""
        x = np.asarray(x, dtype=float)
        if u == 0.0:
            return np.zeros_like(x)
        fp, sp, fm, sm = self.shape(t, u)
        return np.logaddexp(fp + sp * x, fm + sm * x) - _LOG2

    def martingale(self, t: float, u: float, x):
        return np.exp(np.clip(self.log_martingale(t, u, x), -_EXP_CLIP, _EXP_CLIP))

    def discounts(self) -> np.ndarray:
        """P(0, T_k) implied by the ladder and the terminal discount."""
        return self.terminal_discount * np.array(
            [float(self.martingale(0.0, u, self.x0)) for u in self.u_seq]
        )

    def forward(self, k: int, t: float = 0.0, x=None) -> float:
        """Simple forward for period k observed at time t."""
        self._check_period(k)
        x = self.x0 if x is None else x
        delta = self.grid.accrual(k + 1)
        lr = self.log_martingale(t, self.u(k), x) - self.log_martingale(
            t, self.u(k + 1), x
        )
        return (math.exp(float(lr)) - 1.0) / delta

    def _check_period(self, k: int) -> None:
        if not 1 <= k <= self.n - 1:
            raise ValueError(f"period index k={k} outside 1..{self.n - 1}")

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "type": "cosh_libor",
            "spec": self.process.to_dict(),
            "grid": list(self.grid.maturities),
            "u_seq": list(self.u_seq),
            "P0T": self.terminal_discount,
        }

    @staticmethod
    def from_dict(data: dict) -> "CoshLiborModel":
        if data.get("type") != "cosh_libor":
            raise WrongSpec(f"not a cosh model payload: {data.get('type')!r}")
        return CoshLiborModel(
            process=spec_from_dict(data["spec"]),
            grid=TenorGrid(tuple(float(t) for t in data["grid"])),
            u_seq=tuple(float(u) for u in data["u_seq"]),
            terminal_discount=float(data["P0T"]),
        )


def cosh_martingale(model: CoshLiborModel, t: float, u: float, x):
    """M_t^u(x): the normalized-bond martingale shape."""
    return model.martingale(t, u, x)


# ---------------------------------------------------------------------------
# ladder fitting
# ---------------------------------------------------------------------------

def fit_u_sequence(
    spec: AffineProcessSpec, grid: TenorGrid, ratios: Sequence[float]
) -> np.ndarray:
    """Fit u_1 >= ... >= u_N to discount ratios P(0,T_k)/P(0,T).

    Each ratio r >= 1 is matched through the strictly increasing map
    u -> E[cosh(u X_T)] by bracketing and bisection on the admissible
    strip.
    """
    if spec.dim != 1:
        raise WrongSpec("ladder fitting requires a one-dimensional process")
    ratios = np.asarray(ratios, dtype=float)
    if ratios.shape != (grid.n,):
        raise ValueError("need one discount ratio per tenor date")
    if np.any(ratios < 1.0 - 1e-12):
        raise Infeasible("discount ratios below 1 are not attainable (u >= 0)")
    if np.any(np.diff(ratios) > 1e-12):
        raise NonmonotoneInput("discount ratios must be nonincreasing in maturity")

    T = spec.horizon
    lo_u, hi_u = spec.domain(T).uniform[0]
    cap = min(hi_u, -lo_u)  # both +u and -u must stay admissible
    x0 = float(spec.x0_vector[0])

    def m(u: float) -> float:
        if u == 0.0:
            return 1.0
        pp = spec.phi_psi(T, u)
        pm = spec.phi_psi(T, -u)
        a = float(np.real(pp.phi) + np.real(pp.psi[0]) * x0)
        b = float(np.real(pm.phi) + np.real(pm.psi[0]) * x0)
        return 0.5 * (math.exp(min(a, _EXP_CLIP)) + math.exp(min(b, _EXP_CLIP)))

    u_cap = 0.999 * cap if math.isfinite(cap) else _BRACKET_LIMIT
    out = np.empty(grid.n)
    for i, r in enumerate(ratios):
        if r <= 1.0 + 1e-15:
            out[i] = 0.0
            continue
        hi = min(1.0, u_cap)
        while m(hi) < r:
            if hi >= u_cap:
                raise Infeasible(
                    f"ratio {r} at T_{i + 1} exceeds the attainable range "
                    f"(max {m(u_cap)} at u={u_cap})"
                )
            hi = min(2.0 * hi, u_cap)
        out[i] = brentq(lambda u: m(u) - r, 0.0, hi, xtol=1e-15, rtol=8.9e-16)
    # monotone map of nonincreasing targets; clip floating-point slack
    return np.minimum.accumulate(out)


def fit_cosh_model(
    spec: AffineProcessSpec,
    grid: TenorGrid,
    ratios: Sequence[float],
    terminal_discount: float,
) -> CoshLiborModel:
    u_seq = fit_u_sequence(spec, grid, ratios)
    return CoshLiborModel(
        process=spec,
        grid=grid,
        u_seq=tuple(u_seq),
        terminal_discount=terminal_discount,
    )


# ---------------------------------------------------------------------------
# exercise window
# ---------------------------------------------------------------------------

def _bracket_maximum(g: Callable[[float], float], x_init: float):
    """Bracket the peak of a unimodal g by symmetric doubling around x_init."""
    xs = [x_init]
    vals = [float(g(x_init))]
    step = 1.0
    while True:
        left, right = x_init - step, x_init + step
        xs = [left] + xs + [right]
        vals = [float(g(left))] + vals + [float(g(right))]
        imax = int(np.argmax(vals))
        if 0 < imax < len(xs) - 1 and vals[imax] > vals[0] and vals[imax] > vals[-1]:
            return xs[imax - 1], xs[imax], xs[imax + 1]
        if step > _BRACKET_LIMIT:
            raise NotUnimodal("no interior maximum found within |x| <= 1e6")
        step *= 2.0


def find_exercise_bounds(
    g: Callable[[float], float], tol: float = 1e-12, x_init: float = 0.0
) -> ExerciseBounds:
    """Peak and sign-change points of a unimodal payoff-sign function.

    g must rise to a single interior maximum and decay on both sides.
    Returns the window (kappa1, kappa2) where g > 0, or a degenerate
    (empty) window when the peak is nonpositive.
    """
    a, b, c = _bracket_maximum(g, x_init)
    res = minimize_scalar(
        lambda x: -g(x), bracket=(a, b, c), method="golden", options={"xtol": 1e-12}
    )
    xi = float(res.x)
    g_xi = float(g(xi))
    if g_xi <= 0.0:
        return ExerciseBounds(xi, xi, xi, True, g_xi)

    def _root(direction: float) -> float:
        step = 1.0
        inner = xi
        outer = xi + direction * step
        while g(outer) > 0.0:
            inner = outer
            step *= 2.0
            outer = xi + direction * step
            if abs(outer) > _BRACKET_LIMIT:
                raise NotUnimodal("payoff region unbounded; no root within |x| <= 1e6")
        lo, hi = (inner, outer) if direction > 0 else (outer, inner)
        return float(brentq(g, lo, hi, xtol=tol, rtol=8.9e-16, maxiter=200))

    k2 = _root(+1.0)
    k1 = _root(-1.0)
    return ExerciseBounds(k1, xi, k2, False, g_xi)


# ---------------------------------------------------------------------------
# Fourier pricing
# ---------------------------------------------------------------------------

def _cexp(z: np.ndarray) -> np.ndarray:
    """Complex exp with the real part clipped against overflow."""
    return np.exp(np.clip(np.real(z), -745.0, _EXP_CLIP) + 1j * np.imag(z))


def h_function(
    model: CoshLiborModel,
    t: float,
    z,
    u: float,
    kappa1: float,
    kappa2: float,
):
    """Windowed transform of the slope of M_t^u:

        h(z) = int_{kappa1}^{kappa2} e^{z x} (M_t^u)'(x) dx,

    in closed form; z may be a complex scalar or array.
    """
    z = np.asarray(z, dtype=complex)
    sh = model.shape(t, u)
    out = np.zeros(z.shape, dtype=complex)
    for f_, s_ in ((sh[0], sh[1]), (sh[2], sh[3])):
        if s_ == 0.0:
            continue
        den = z + s_
        if np.any(np.abs(den) < 1e-12 * (1.0 + abs(s_))):
            raise PoleError(f"transform pole at exponent shift {-s_}")
        out = out + math.exp(f_) * s_ / (2.0 * den) * (
            _cexp(den * kappa2) - _cexp(den * kappa1)
        )
    return out if out.shape else complex(out)


def _transform_exponent(spec: AffineProcessSpec, tau: float, z: np.ndarray, x: float):
    """phi_tau(z) + psi_tau(z) x for a complex abscissa array (1-d spec)."""
    if tau == 0.0:
        return z * x
    phi, psi = spec._phi_psi_arr(tau, z[:, None])
    return phi + psi[:, 0] * x


def _contour_candidates(
    spec: AffineProcessSpec,
    tau_m: float,
    x: float,
    slopes: Sequence[float],
    kappa1: float,
    kappa2: float,
):
    """Admissible contours ranked by numerical conditioning.

    Poles sit at 0 and the windowed-transform slopes; candidates are the
    gaps between them.  The integrand scale at a real abscissa R grows
    like exp(phi(R) + psi(R) x) times the window factors, and whatever
    that scale exceeds the result by is lost to cancellation, so the
    candidates are ordered by that log-scale plus pole-proximity terms.
    """
    lo, hi = spec._intervals(tau_m)[0]
    srt = sorted({0.0, *slopes})
    left_edge = max(lo, srt[0] - 6.0)
    right_edge = min(hi, srt[-1] + 6.0)
    walls = [left_edge] + [p for p in srt if left_edge < p < right_edge] + [right_edge]
    pts = [0.5 * (a + b) for a, b in zip(walls, walls[1:]) if b - a > 1e-6]
    if not pts:
        raise ContourError("no pole-free contour inside the moment strip")
    rr = np.asarray(pts)
    expo = np.real(_transform_exponent(spec, tau_m, rr.astype(complex), x))
    dd = np.asarray(slopes)[None, :] - rr[:, None]
    window = np.max(np.maximum(dd * kappa2, dd * kappa1), axis=1)
    gap = np.array([min(abs(p - q) for q in srt) for p in pts])
    score = (
        expo
        + window
        - np.minimum(np.log(gap), 0.0)
        - np.minimum(np.log(np.abs(rr)), 0.0)
    )
    return [pts[i] for i in np.argsort(score)]


def _fourier_window_value(
    model: CoshLiborModel,
    t: float,
    x: float,
    t_fix: float,
    coeffs: Sequence[tuple[float, float]],
    kappa1: float,
    kappa2: float,
    R: float | None,
) -> float:
    """(1/pi) Int_0^inf Re( mgf(R + i s) fhat(s - i R) ) ds.

    fhat is the transform of the windowed payoff sum_j c_j M^{u_j}
    restricted to (kappa1, kappa2), built from windowed-slope transforms;
    mgf is the conditional transform of X_{T_fix} given X_t = x.
    """
    spec = model.process
    tau_m = t_fix - t
    if tau_m < 0:
        raise InvalidTime(f"valuation time {t} after fixing {t_fix}")

    # flatten sum_j c_j M^{u_j} into exponential terms c e^{f} e^{s x} / 2
    shapes = {u: model.shape(t_fix, u) for u in {u for _, u in coeffs}}
    cs, fs, ss = [], [], []
    for c, u in coeffs:
        if u == 0.0:
            continue
        sh = shapes[u]
        for f_, s_ in ((sh[0], sh[1]), (sh[2], sh[3])):
            cs.append(c)
            fs.append(f_)
            ss.append(s_)
    if not cs:
        return 0.0
    pre = np.array([c * math.exp(f_) * s_ / 2.0 for c, f_, s_ in zip(cs, fs, ss)])
    s_arr = np.asarray(ss)
    tau_q = max(tau_m, 1e-12)
    if R is None:
        cands = _contour_candidates(spec, tau_q, x, ss, kappa1, kappa2)[:4]
    else:
        lo, hi = spec._intervals(tau_q)[0]
        if not (lo < R < hi):
            raise ContourError(f"contour R={R} outside the moment strip ({lo}, {hi})")
        if R == 0.0:
            raise ContourError("contour R=0 sits on the payoff-transform pole")
        cands = [float(R)]

    def make_integrand(rv: float):
        def integrand(s: np.ndarray) -> np.ndarray:
            zm = rv + 1j * s
            mgfv = _cexp(_transform_exponent(spec, tau_m, zm, x))
            den = (-rv - 1j * s)[:, None] + s_arr[None, :]
            hsum = (pre[None, :] / den) * (_cexp(den * kappa2) - _cexp(den * kappa1))
            fhat = hsum.sum(axis=1) / zm  # 1/z of the indicator transform
            return np.real(mgfv * fhat)

        return integrand

    err: ContourError | None = None
    for rv in cands:
        gap = float(np.min(np.abs(s_arr - rv)))
        if min(gap, abs(rv)) < 1e-9:
            if len(cands) == 1:
                raise PoleError(f"contour R={rv} hits a windowed-transform pole")
            continue
        try:
            return integrate_halfline(make_integrand(rv), abs_floor=1e-15) / math.pi
        except ContourError as exc:
            err = exc
    raise err if err is not None else ContourError(
        "every candidate contour hits a windowed-transform pole"
    )


# ---------------------------------------------------------------------------
# instrument prices
# ---------------------------------------------------------------------------

def _resolve_numeraire(model: CoshLiborModel, t: float, discount) -> float:
    if discount is not None:
        return float(discount)
    return model.terminal_discount if t == 0.0 else 1.0


def _floorlet_sign_function(model, k, k_tilde):
    t_fix = model.grid.T(k)
    sh_a = model.shape(t_fix, model.u(k))
    sh_b = model.shape(t_fix, model.u(k + 1))

    def g(y: float) -> float:
        lr = _shape_log_m(sh_a, y) - _shape_log_m(sh_b, y)
        return k_tilde - math.exp(min(lr, _EXP_CLIP))

    return g


def floorlet_price(
    model: CoshLiborModel,
    k: int,
    strike: float,
    t: float = 0.0,
    x: float | None = None,
    R: float | None = None,
    discount: float | None = None,
) -> float:
    """Floorlet on period k: pays Delta_{k+1} (K - F^k(T_k))_+ at T_{k+1}.

    At t = 0 the result is a price (scaled by the terminal discount); at
    t > 0 it is quoted in units of the time-t terminal bond unless an
    explicit ``discount`` is supplied.
    """
    model._check_period(k)
    t_fix = model.grid.T(k)
    if t > t_fix + 1e-12:
        raise InvalidTime(f"valuation time {t} after the fixing date T_{k}")
    x = model.x0 if x is None else float(x)
    delta = model.grid.accrual(k + 1)
    k_tilde = 1.0 + delta * strike
    if model.u(k) == model.u(k + 1):
        # flat ladder step: the period forward is pinned at zero
        val = max(k_tilde - 1.0, 0.0) * model.martingale(t, model.u(k + 1), x)
        return _resolve_numeraire(model, t, discount) * float(val)
    g = _floorlet_sign_function(model, k, k_tilde)
    bounds = find_exercise_bounds(g)
    if bounds.degenerate:
        return 0.0
    coeffs = [(k_tilde, model.u(k + 1)), (-1.0, model.u(k))]
    val = _fourier_window_value(
        model, t, x, t_fix, coeffs, bounds.kappa1, bounds.kappa2, R
    )
    return _resolve_numeraire(model, t, discount) * val


def caplet_price(
    model: CoshLiborModel,
    k: int,
    strike: float,
    t: float = 0.0,
    x: float | None = None,
    R: float | None = None,
    discount: float | None = None,
) -> float:
    """Caplet on period k, by parity: cap = floor + forward leg."""
    model._check_period(k)
    x = model.x0 if x is None else float(x)
    delta = model.grid.accrual(k + 1)
    k_tilde = 1.0 + delta * strike
    flt = floorlet_price(model, k, strike, t, x, R, discount=1.0)
    fwd_leg = float(
        model.martingale(t, model.u(k), x)
        - k_tilde * model.martingale(t, model.u(k + 1), x)
    )
    return _resolve_numeraire(model, t, discount) * (flt + fwd_leg)


def _swaption_legs(model, alpha, beta, strike):
    return [(1.0, model.u(beta))] + [
        (strike * model.grid.accrual(k), model.u(k)) for k in range(alpha + 1, beta + 1)
    ]


def _swaption_sign_function(model, alpha, legs):
    t_fix = model.grid.T(alpha)
    sh_den = model.shape(t_fix, model.u(alpha))
    leg_shapes = [(c, model.shape(t_fix, u)) for c, u in legs]

    def g(y: float) -> float:
        ld = _shape_log_m(sh_den, y)
        acc = -1.0
        for c, sh in leg_shapes:
            acc += c * math.exp(min(_shape_log_m(sh, y) - ld, _EXP_CLIP))
        return acc

    return g


def put_swaption_price(
    model: CoshLiborModel,
    alpha: int,
    beta: int,
    strike: float,
    t: float = 0.0,
    x: float | None = None,
    R: float | None = None,
    discount: float | None = None,
) -> float:
    """Right, exercised at T_alpha, to receive fixed K on [T_alpha, T_beta]."""
    if not 1 <= alpha < beta <= model.n:
        raise ValueError(f"need 1 <= alpha < beta <= {model.n}")
    t_fix = model.grid.T(alpha)
    if t > t_fix + 1e-12:
        raise InvalidTime(f"valuation time {t} after the exercise date T_{alpha}")
    x = model.x0 if x is None else float(x)
    legs = _swaption_legs(model, alpha, beta, strike)
    if model.u(alpha) == model.u(beta):
        # flat ladder across the swap: every bond ratio is 1
        val = max(strike, 0.0) * sum(
            model.grid.accrual(kk) * model.martingale(t, model.u(kk), x)
            for kk in range(alpha + 1, beta + 1)
        )
        return _resolve_numeraire(model, t, discount) * float(val)
    g = _swaption_sign_function(model, alpha, legs)
    bounds = find_exercise_bounds(g)
    if bounds.degenerate:
        return 0.0
    coeffs = legs + [(-1.0, model.u(alpha))]
    val = _fourier_window_value(
        model, t, x, t_fix, coeffs, bounds.kappa1, bounds.kappa2, R
    )
    return _resolve_numeraire(model, t, discount) * val


def forward_rate_lower_bound(
    model: CoshLiborModel, k: int, t: float | None = None
) -> float:
    """Model-implied floor of the period-k simple forward at time t.

    Defaults to the fixing time T_k, where the bound constrains the
    realized fixing: floorlets struck at or below it are worthless.
    """
    model._check_period(k)
    t = model.grid.T(k) if t is None else float(t)
    if t > model.grid.T(k) + 1e-12:
        raise InvalidTime(f"t={t} after the fixing date T_{k}")
    uk, uk1 = model.u(k), model.u(k + 1)
    delta = model.grid.accrual(k + 1)
    if uk == uk1:
        return 0.0
    sh_a = model.shape(t, uk)
    sh_b = model.shape(t, uk1)

    def ratio(y: float) -> float:
        return math.exp(
            min(_shape_log_m(sh_a, y) - _shape_log_m(sh_b, y), _EXP_CLIP)
        )

    a, b, c = _bracket_maximum(lambda y: -ratio(y), 0.0)
    res = minimize_scalar(
        ratio, bracket=(a, b, c), method="golden", options={"xtol": 1e-12}
    )
    return (float(res.fun) - 1.0) / delta


# ---------------------------------------------------------------------------
# Brownian closed forms (driver: standard BM started at 0)
# ---------------------------------------------------------------------------

def _require_standard_brownian(model: CoshLiborModel) -> None:
    p = model.process
    if not isinstance(p, BrownianDrift) or p.sigma != 1.0 or p.mu != 0.0 or p.x0 != 0.0:
        raise WrongSpec("closed forms require BrownianDrift(sigma=1, mu=0, x0=0)")


def brownian_u_from_ratio(ratio: float, horizon: float) -> float:
    """Ladder inversion for the standard-Brownian driver: E cosh(u B_T) = r."""
    if ratio < 1.0:
        raise Infeasible("ratio below 1 not attainable")
    return math.sqrt(2.0 * math.log(ratio) / horizon)


def _brownian_window(u: float, t_fix: float, kappa: float, horizon: float) -> float:
    """E^{Q^T}[ M_{t_fix}^u(B_{t_fix}) 1{|B| <= kappa} ] for the BM driver."""
    rt = math.sqrt(t_fix)
    return math.exp(0.5 * u * u * horizon) * (
        norm.cdf(kappa / rt - u * rt) - norm.cdf(-kappa / rt - u * rt)
    )


def _symmetric_root(g: Callable[[float], float]) -> float | None:
    """Positive root of an even unimodal g peaking at 0; None if g(0) <= 0."""
    if g(0.0) <= 0.0:
        return None
    lo, hi = 0.0, 1.0
    while g(hi) > 0.0:
        lo = hi
        hi *= 2.0
        if hi > _BRACKET_LIMIT:
            raise NotUnimodal("payoff region unbounded; no root within |x| <= 1e6")
    return float(brentq(g, lo, hi, xtol=1e-13, rtol=8.9e-16))


def brownian_floorlet_price(model: CoshLiborModel, k: int, strike: float) -> float:
    """Exact floorlet value for the standard-Brownian driver (t = 0)."""
    _require_standard_brownian(model)
    model._check_period(k)
    t_fix = model.grid.T(k)
    delta = model.grid.accrual(k + 1)
    k_tilde = 1.0 + delta * strike
    uk, uk1 = model.u(k), model.u(k + 1)
    if uk == uk1:
        val = max(k_tilde - 1.0, 0.0) * model.martingale(0.0, uk1, model.x0)
        return model.terminal_discount * float(val)
    g = _floorlet_sign_function(model, k, k_tilde)
    kappa = _symmetric_root(g)
    if kappa is None:
        return 0.0
    T = model.process.horizon
    return model.terminal_discount * (
        k_tilde * _brownian_window(uk1, t_fix, kappa, T)
        - _brownian_window(uk, t_fix, kappa, T)
    )


def brownian_put_swaption_price(
    model: CoshLiborModel, alpha: int, beta: int, strike: float
) -> float:
    """Exact put-swaption value for the standard-Brownian driver (t = 0)."""
    _require_standard_brownian(model)
    if not 1 <= alpha < beta <= model.n:
        raise ValueError(f"need 1 <= alpha < beta <= {model.n}")
    t_fix = model.grid.T(alpha)
    legs = _swaption_legs(model, alpha, beta, strike)
    if model.u(alpha) == model.u(beta):
        val = max(strike, 0.0) * sum(
            model.grid.accrual(kk) * model.martingale(0.0, model.u(kk), model.x0)
            for kk in range(alpha + 1, beta + 1)
        )
        return model.terminal_discount * float(val)
    g = _swaption_sign_function(model, alpha, legs)
    kappa = _symmetric_root(g)
    if kappa is None:
        return 0.0
    T = model.process.horizon
    total = -_brownian_window(model.u(alpha), t_fix, kappa, T)
    for c, u in legs:
        total += c * _brownian_window(u, t_fix, kappa, T)
    return model.terminal_discount * total


# ---------------------------------------------------------------------------
# quoting
# ---------------------------------------------------------------------------

def caplet_vol_surface(
    model: CoshLiborModel,
    periods: Sequence[int],
    strikes: Sequence[float],
    shift: float = 0.0,
) -> list[dict]:
    """Black vols of model caplets, one row per (period, strike).

    The vol is NaN where inversion fails, e.g. when a forward-rate floor
    pins the price at intrinsic value.
    """
    discounts = model.discounts()
    rows = []
    for k in periods:
        model._check_period(k)
        expiry = model.grid.T(k)
        annuity = model.grid.accrual(k + 1) * discounts[k]  # pays at T_{k+1}
        fwd = model.forward(k)
        for K in strikes:
            price = caplet_price(model, k, float(K))
            try:
                vol = black_implied_vol(
                    price, fwd, float(K), expiry, annuity, call=True, shift=shift
                )
            except OutOfBounds:
                vol = float("nan")
            rows.append(
                {
                    "expiry_years": expiry,
                    "strike": float(K),
                    "implied_vol": vol,
                    "price": price,
                }
            )
    return rows
