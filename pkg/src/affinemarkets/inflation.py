"""Affine inflation market model on a semiannual tenor grid.

Normalized nominal bonds and CPI-linked bonds are exponential-affine in
a product process X = (X^0, X^1..X^M, X^{M+1}..X^{2M}):

    P(t, T_k) / P(t, T)      = M_t^{u_k} = exp(phi_{T-t}(u_k) + psi_{T-t}(u_k).X_t),
    P_ILB(t, T_k) / P(t, T)  = M_t^{v_k},
    forward CPI I(t, T_k)    = M_t^{v_k} / M_t^{u_k},

where X^0 is a common nonnegative factor, X^1..X^M drive nominal years
1..M, and X^{M+1}..X^{2M} drive inflation years.  The exponent vectors
u_k, v_k carry a structured sparsity: a common entry, one entry on the
year bucket containing T_k, and the first-half-year entries of all later
year buckets; v_k additionally loads one inflation coordinate.

Forward measures Q^{T_k} have exponential-affine densities M^{u_k}, so
every conditional transform needed for CPI options, year-on-year options
and nominal caplets stays in closed form; strikes enter through a single
Fourier integral along a vertical contour.  Components whose exponent
entry is zero cancel exactly between numerator and denominator of the
measure change and are skipped.

Nominal period convention: F^k is the simple forward over [T_{k-1}, T_k],
fixing at T_{k-1} and paying at T_k (defined for k >= 2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ._quad import integrate_halfline
from .cosh import TenorGrid
from .errors import (
    AmbiguousRoots,
    ContourError,
    DegenerateVariance,
    DomainError,
    Infeasible,
    InvalidTime,
    LayoutError,
    NonmonotoneInput,
    WrongSpec,
)
from .processes import Product, spec_from_dict

_CALL_CONTOURS = (1.5, 2.0, 2.5, 3.0, 1.25, 1.1, 4.0)
_PUT_CONTOURS = (-1.0, -0.5, -1.5, -2.0, -3.0)


# ---------------------------------------------------------------------------
# parameter layout
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParamLayout:
    """Structured exponents for M years (N = 2M semiannual dates).

    For date index k with year bucket c = ceil(k/2):

        u_k = tilde_u[k] e^0 + bar_u[k] e^c + sum_{l>c} bar_u[2l-1] e^l
        v_k = tilde_v[k] e^0 + (same nominal entries) + bar_v[k] e^{M+c}

    tilde_u must be nonincreasing and bar_u nonnegative with the first
    half-year entry of each bucket at least the second; together these
    make the u_k componentwise nonincreasing (positive simple forwards).
    Entries of different buckets never share a coordinate, so no
    ordering across buckets is required.
    """

    n_years: int
    tilde_u: tuple[float, ...]
    bar_u: tuple[float, ...]
    tilde_v: tuple[float, ...]
    bar_v: tuple[float, ...]

    def __post_init__(self):
        M = self.n_years
        if M < 1:
            raise LayoutError("need at least one year")
        for name in ("tilde_u", "bar_u", "tilde_v", "bar_v"):
            vals = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, vals)
            if len(vals) != 2 * M:
                raise LayoutError(f"{name} must have length 2M = {2 * M}")
        for name in ("tilde_u", "bar_u"):
            if any(v < 0 for v in getattr(self, name)):
                raise LayoutError(f"{name} entries must be nonnegative")
        if any(b > a + 1e-12 for a, b in zip(self.tilde_u, self.tilde_u[1:])):
            raise LayoutError("tilde_u must be nonincreasing")
        for c in range(1, M + 1):
            if self.bar_u[2 * c - 1] > self.bar_u[2 * c - 2] + 1e-12:
                raise LayoutError(
                    f"bar_u must be nonincreasing inside year {c}"
                )

    @property
    def n_dates(self) -> int:
        return 2 * self.n_years

    @property
    def dim(self) -> int:
        return 2 * self.n_years + 1

    def year_of(self, k: int) -> int:
        """Year bucket of date k: ceil(k/2)."""
        if not 1 <= k <= self.n_dates:
            raise LayoutError(f"date index {k} outside 1..{self.n_dates}")
        return (k + 1) // 2

    def _nominal_entries(self, k: int) -> np.ndarray:
        vec = np.zeros(self.dim)
        c = self.year_of(k)
        vec[c] = self.bar_u[k - 1]
        for l in range(c + 1, self.n_years + 1):
            vec[l] = self.bar_u[2 * l - 2]  # entry of the first half of year l
        return vec

    def u_vector(self, k: int) -> np.ndarray:
        vec = self._nominal_entries(k)
        vec[0] = self.tilde_u[k - 1]
        return vec

    def v_vector(self, k: int) -> np.ndarray:
        vec = self._nominal_entries(k)
        vec[0] = self.tilde_v[k - 1]
        vec[self.n_years + self.year_of(k)] = self.bar_v[k - 1]
        return vec

    def to_dict(self) -> dict:
        return {
            "n_years": self.n_years,
            "tilde_u": list(self.tilde_u),
            "bar_u": list(self.bar_u),
            "tilde_v": list(self.tilde_v),
            "bar_v": list(self.bar_v),
        }

    @staticmethod
    def from_dict(data: dict) -> "ParamLayout":
        return ParamLayout(
            n_years=int(data["n_years"]),
            tilde_u=tuple(data["tilde_u"]),
            bar_u=tuple(data["bar_u"]),
            tilde_v=tuple(data["tilde_v"]),
            bar_v=tuple(data["bar_v"]),
        )


def assemble_vectors(layout: ParamLayout) -> tuple[np.ndarray, np.ndarray]:
    """(U, V) matrices of shape (N, 2M+1); row k-1 holds u_k resp. v_k.

    Raises LayoutError if the assembled u_k fail to be componentwise
    nonincreasing in k (the bond ratios would not be ordered).
    """
    N = layout.n_dates
    U = np.vstack([layout.u_vector(k) for k in range(1, N + 1)])
    V = np.vstack([layout.v_vector(k) for k in range(1, N + 1)])
    if np.any(np.diff(U, axis=0) > 1e-12):
        raise LayoutError("u_k must be componentwise nonincreasing in k")
    if np.any(U < -1e-15):
        raise LayoutError("u_k entries must be nonnegative")
    return U, V


# ---------------------------------------------------------------------------
# market inputs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MarketSnapshot:
    """Ingested curves and quotes.

    curve          (maturity_years, discount_factor), sorted, df in (0,1]
    zciis          (maturity_years, rate) at increasing maturities
    caplet_vols    (expiry_years, strike, vol)
    infl_options   (maturity_years, strike, kind 'cap'|'floor', price_bps)
    """

    curve: tuple[tuple[float, float], ...]
    zciis: tuple[tuple[float, float], ...] = ()
    caplet_vols: tuple[tuple[float, float, float], ...] = ()
    infl_options: tuple[tuple[float, float, str, float], ...] = ()

    def __post_init__(self):
        curve = tuple((float(t), float(d)) for t, d in self.curve)
        object.__setattr__(self, "curve", curve)
        if not curve:
            raise ValueError("snapshot needs a discount curve")
        ts = [t for t, _ in curve]
        if ts[0] <= 0 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("curve maturities must be positive, strictly increasing")
        if any(not 0.0 < d <= 1.0 for _, d in curve):
            raise ValueError("discount factors must lie in (0, 1]")
        zc = tuple((float(t), float(r)) for t, r in self.zciis)
        object.__setattr__(self, "zciis", zc)
        if any(b[0] <= a[0] for a, b in zip(zc, zc[1:])) or any(t <= 0 for t, _ in zc):
            raise ValueError("ZCIIS maturities must be positive, strictly increasing")
        cv = tuple((float(e), float(k), float(v)) for e, k, v in self.caplet_vols)
        object.__setattr__(self, "caplet_vols", cv)
        if any(v < 0 for _, _, v in cv):
            raise ValueError("caplet vols must be nonnegative")
        io = tuple(
            (float(t), float(k), str(s), float(p)) for t, k, s, p in self.infl_options
        )
        object.__setattr__(self, "infl_options", io)
        if any(s not in ("cap", "floor") for _, _, s, _ in io):
            raise ValueError("inflation option kind must be 'cap' or 'floor'")

    def discount(self, t: float) -> float:
        """Discount factor at t, log-linear in ln P between curve nodes."""
        if t == 0.0:
            return 1.0
        ts = np.array([0.0] + [p[0] for p in self.curve])
        ls = np.array([0.0] + [math.log(p[1]) for p in self.curve])
        if t > ts[-1] + 1e-12 or t < 0:
            raise ValueError(f"maturity {t} outside the curve span [0, {ts[-1]}]")
        return float(np.exp(np.interp(t, ts, ls)))

    def discount_ratios(self, grid: TenorGrid) -> np.ndarray:
        """P(0,T_k)/P(0,T_N) on the grid dates."""
        p = np.array([self.discount(t) for t in grid.maturities])
        return p / p[-1]

    def forward_cpi_curve(self, grid: TenorGrid) -> np.ndarray:
        """I(0,T_k) from ZCIIS quotes, log-linear in ln I anchored at I(0,0)=1.

        A quote s at maturity m years means I(0, m) = (1+s)^m.
        """
        if not self.zciis:
            raise ValueError("snapshot has no ZCIIS quotes")
        ts = np.array([0.0] + [t for t, _ in self.zciis])
        li = np.array([0.0] + [m * math.log1p(r) for m, r in self.zciis])
        out = []
        for t in grid.maturities:
            if t > ts[-1] + 1e-12:
                raise ValueError(f"grid date {t} beyond the last ZCIIS quote {ts[-1]}")
            out.append(math.exp(float(np.interp(t, ts, li))))
        return np.array(out)


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InflationModel:
    """Joint nominal/inflation term-structure model.

    ``process`` is a Product of 2M+1 independent components (the first
    M+1 nonnegative), ``layout`` the structured exponents, ``grid`` the
    semiannual dates ending at the process horizon, ``terminal_discount``
    the observed P(0, T).
    """

    process: Product
    layout: ParamLayout
    grid: TenorGrid
    terminal_discount: float

    def __post_init__(self):
        M = self.layout.n_years
        if not isinstance(self.process, Product):
            raise WrongSpec("inflation model requires a Product process")
        if self.process.dim != 2 * M + 1:
            raise WrongSpec(
                f"process has {self.process.dim} components, layout needs {2 * M + 1}"
            )
        if not all(self.process.nonneg[: M + 1]):
            raise WrongSpec("components 0..M (common and nominal) must be nonnegative")
        if self.grid.n != 2 * M:
            raise WrongSpec(f"grid has {self.grid.n} dates, layout needs {2 * M}")
        if abs(self.grid.maturities[-1] - self.process.horizon) > 1e-9:
            raise ValueError("grid must end at the process horizon")
        if self.terminal_discount <= 0:
            raise ValueError("terminal discount must be positive")
        U, V = assemble_vectors(self.layout)
        dom = self.process.domain(self.process.horizon)
        for k in range(U.shape[0]):
            if not dom.contains(U[k], uniform=True):
                raise DomainError(f"u_{k + 1} outside the uniform moment set")
            if not dom.contains(V[k], uniform=True):
                raise DomainError(f"v_{k + 1} outside the uniform moment set")
        object.__setattr__(self, "_U", U)
        object.__setattr__(self, "_V", V)
        object.__setattr__(self, "_memo", {})

    # -- bookkeeping --------------------------------------------------------
    @property
    def n_years(self) -> int:
        return self.layout.n_years

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def x0(self) -> np.ndarray:
        return self.process.x0_vector

    def u(self, k: int) -> np.ndarray:
        self._check_date(k)
        return self._U[k - 1]

    def v(self, k: int) -> np.ndarray:
        self._check_date(k)
        return self._V[k - 1]

    def _check_date(self, k: int) -> None:
        if not 1 <= k <= self.n:
            raise ValueError(f"date index k={k} outside 1..{self.n}")

    def _tau(self, t: float) -> float:
        if t < 0 or t > self.process.horizon + 1e-12:
            raise InvalidTime(f"time {t} outside [0, {self.process.horizon}]")
        return max(self.process.horizon - float(t), 0.0)

    def _exps(self, tau: float, kind: str, k: int) -> tuple[float, np.ndarray]:
        """Cached real (phi_tau(vec), psi_tau(vec)) for a layout vector."""
        key = (round(float(tau), 12), kind, k)
        hit = self._memo.get(key)
        if hit is None:
            vec = self._U[k - 1] if kind == "u" else self._V[k - 1]
            pp = self.process.phi_psi(tau, vec)
            hit = (float(np.real(pp.phi)), np.real(np.asarray(pp.psi)).astype(float))
            self._memo[key] = hit
        return hit

    # -- curves ---------------------------------------------------------------
    def log_bond_ratio(self, k: int, t: float = 0.0, x=None) -> float:
        """log(P(t,T_k)/P(t,T)), the exponent of M_t^{u_k}."""
        self._check_date(k)
        x = self.x0 if x is None else np.asarray(x, dtype=float)
        phi, psi = self._exps(self._tau(t), "u", k)
        return phi + float(psi @ x)

    def discounts(self) -> np.ndarray:
        """P(0,T_k) for every grid date."""
        return self.terminal_discount * np.exp(
            [self.log_bond_ratio(k) for k in range(1, self.n + 1)]
        )

    def forward_rate(self, k: int, t: float = 0.0, x=None) -> float:
        """Simple forward F^k over [T_{k-1}, T_k], k >= 2; needs t <= T_{k-1}."""
        if k < 2:
            raise ValueError("forward periods start at k=2 (pair u_{k-1}, u_k)")
        self._check_date(k)
        if t > self.grid.T(k - 1) + 1e-12:
            raise InvalidTime(f"t={t} after the fixing date T_{k - 1}")
        lr = self.log_bond_ratio(k - 1, t, x) - self.log_bond_ratio(k, t, x)
        return math.expm1(lr) / self.grid.accrual(k)

    def forward_cpi(self, k: int, t: float = 0.0, x=None) -> float:
        """I(t,T_k) = M_t^{v_k} / M_t^{u_k}; needs t <= T_k."""
        a, b = self.cpi_coeffs(k, t)
        x = self.x0 if x is None else np.asarray(x, dtype=float)
        return math.exp(a + float(b @ x))

    def cpi_coeffs(self, k: int, t: float = 0.0) -> tuple[float, np.ndarray]:
        """(A, B) with log I(t,T_k) = A + B . X_t; at t=T_k the spot pair."""
        self._check_date(k)
        if t > self.grid.T(k) + 1e-12:
            raise InvalidTime(f"t={t} after T_{k}")
        tau = self._tau(t)
        phi_v, psi_v = self._exps(tau, "v", k)
        phi_u, psi_u = self._exps(tau, "u", k)
        return phi_v - phi_u, psi_v - psi_u

    # -- serialization --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "type": "inflation_market",
            "specs": [c.to_dict() for c in self.process.components],
            "layout": self.layout.to_dict(),
            "grid": list(self.grid.maturities),
            "P0T": self.terminal_discount,
        }

    @staticmethod
    def from_dict(data: dict) -> "InflationModel":
        if data.get("type") != "inflation_market":
            raise WrongSpec(f"not an inflation model payload: {data.get('type')!r}")
        comps = tuple(spec_from_dict(c) for c in data["specs"])
        return InflationModel(
            process=Product(components=comps),
            layout=ParamLayout.from_dict(data["layout"]),
            grid=TenorGrid(tuple(float(t) for t in data["grid"])),
            terminal_discount=float(data["P0T"]),
        )


# ---------------------------------------------------------------------------
# sparse componentwise transform evaluation
# ---------------------------------------------------------------------------

def _support(vec) -> tuple[int, ...]:
    return tuple(int(i) for i in np.nonzero(np.asarray(vec) != 0.0)[0])


def _comp_pairs(
    spec: Product, tau: float, cols: dict[int, np.ndarray], validate: bool = True
) -> tuple[dict[int, np.ndarray], dict[int, np.ndarray]]:
    """Per-component (phi, psi) batches for complex exponent columns.

    Only the listed components are evaluated; omitted components sit at
    exponent 0 where both transforms vanish.  Raises DomainError naming
    the offending component when a real part leaves its admissible band.
    """
    phis: dict[int, np.ndarray] = {}
    psis: dict[int, np.ndarray] = {}
    for i, col in cols.items():
        col = np.asarray(col, dtype=complex)
        comp = spec.components[i]
        if tau == 0.0:
            phis[i] = np.zeros_like(col)
            psis[i] = col
            continue
        if validate:
            lo, hi = comp._interval1(tau)
            re = np.real(col)
            if not (np.all(re > lo) and np.all(re < hi)):
                raise DomainError(
                    f"component {i}: Re(exponent) range [{re.min():.6g}, "
                    f"{re.max():.6g}] leaves ({lo:.6g}, {hi:.6g}) at elapsed {tau:.6g}"
                )
        phis[i] = np.asarray(comp._phi1(tau, col))
        psis[i] = np.asarray(comp._psi1(tau, col))
    return phis, psis


# ---------------------------------------------------------------------------
# forward-measure transforms
# ---------------------------------------------------------------------------

def _forward_measure_rows(
    model: InflationModel,
    k: int,
    W: dict[int, np.ndarray],
    s: float,
    r: float,
    x: np.ndarray,
) -> np.ndarray:
    """Batch of E^{Q^{T_k}}[exp(w . X_r) | X_s = x] for sparse exponents.

    W maps component index to a column of complex entries; components
    outside W cancel exactly between the measure-change numerator and
    denominator and are skipped.
    """
    T = model.process.horizon
    t_k = model.grid.T(k)
    if not (-1e-12 <= s <= r + 1e-12 and r <= t_k + 1e-12):
        raise InvalidTime(f"need 0 <= s <= r <= T_{k}; got s={s}, r={r}")
    _, psi_b = model._exps(T - r, "u", k)
    _, psi_full = model._exps(T - s, "u", k)
    shifted = {i: psi_b[i] + np.asarray(col, dtype=complex) for i, col in W.items()}
    phi_a, psi_a = _comp_pairs(model.process, r - s, shifted)
    base = {i: np.array([psi_b[i] + 0.0j]) for i in W}
    phi_c, _ = _comp_pairs(model.process, r - s, base, validate=False)
    n = len(next(iter(shifted.values())))
    out = np.zeros(n, dtype=complex)
    for i in W:
        out = out + phi_a[i] - phi_c[i][0] + (psi_a[i] - psi_full[i]) * x[i]
    return np.exp(out)


def forward_measure_mgf(
    model: InflationModel,
    k: int,
    w,
    s: float = 0.0,
    r: float | None = None,
    x=None,
) -> complex:
    """E^{Q^{T_k}}[e^{w . X_r} | F_s] at X_s = x (defaults: r = T_k, x = x0).

    The Q^{T_k} density over the terminal measure is M^{u_k}, so the
    answer is exponential-affine in x; w = 0 gives exactly 1.
    """
    model._check_date(k)
    r = model.grid.T(k) if r is None else float(r)
    x = model.x0 if x is None else np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=complex)
    if w.shape != (model.process.dim,):
        raise WrongSpec(f"exponent shape {w.shape} != ({model.process.dim},)")
    supp = _support(w)
    if not supp:
        return 1.0 + 0.0j
    W = {i: np.array([w[i]]) for i in supp}
    return complex(_forward_measure_rows(model, k, W, float(s), r, x)[0])


def _cpi_log_mgf_rows(
    model: InflationModel, k: int, Z: np.ndarray, s: float, x: np.ndarray
) -> np.ndarray:
    """Batch mgf of log I(T_k) under Q^{T_k} given X_s = x."""
    T = model.process.horizon
    t_k = model.grid.T(k)
    if not -1e-12 <= s <= t_k + 1e-12:
        raise InvalidTime(f"need 0 <= s <= T_{k}, got s={s}")
    phi_v, psi_v = model._exps(T - t_k, "v", k)
    phi_u, psi_u = model._exps(T - t_k, "u", k)
    uk, vk = model.u(k), model.v(k)
    supp = _support(psi_v - psi_u)
    Z = np.asarray(Z, dtype=complex)
    if not supp:
        return np.ones_like(Z)
    # per-component constants at T_k and the matching slice of log M_s^{u_k}
    pv, _ = _comp_pairs(
        model.process, T - t_k, {i: np.array([vk[i] + 0.0j]) for i in supp}, False
    )
    pu, _ = _comp_pairs(
        model.process, T - t_k, {i: np.array([uk[i] + 0.0j]) for i in supp}, False
    )
    ps, qs = _comp_pairs(
        model.process, T - s, {i: np.array([uk[i] + 0.0j]) for i in supp}, False
    )
    mix = {i: Z * psi_v[i] + (1.0 - Z) * psi_u[i] for i in supp}
    phi_a, psi_a = _comp_pairs(model.process, t_k - s, mix)
    out = np.zeros_like(Z)
    for i in supp:
        out = out + Z * pv[i][0] + (1.0 - Z) * pu[i][0] + phi_a[i]
        out = out + psi_a[i] * x[i] - ps[i][0] - qs[i][0] * x[i]
    return np.exp(out)


def cpi_log_mgf(model: InflationModel, k: int, z, s: float = 0.0, x=None) -> complex:
    """mgf of log I(T_k) under Q^{T_k} given F_s, evaluated at X_s = x.

    z = 0 gives 1 and z = 1 the forward CPI I(s, T_k); both follow from
    the martingale property of I(., T_k) under Q^{T_k}.
    """
    x = model.x0 if x is None else np.asarray(x, dtype=float)
    return complex(_cpi_log_mgf_rows(model, k, np.array([complex(z)]), float(s), x)[0])


def _double_time_rows(
    model: InflationModel,
    k: int,
    Ucols: dict[int, np.ndarray],
    Wcols: dict[int, np.ndarray],
    r: float,
    t: float,
    s: float,
    x: np.ndarray,
) -> np.ndarray:
    """Batch of E^{Q^{T_k}}[exp(u . X_r + w . X_t) | X_s = x], s <= r <= t.

    The flow is composed backward: psi_{T-t}(u_k) + w must be admissible
    over [r, t] (condition 1) and its pullback plus u admissible over
    [s, r] (condition 2); violations raise DomainError naming the
    condition.
    """
    T = model.process.horizon
    t_k = model.grid.T(k)
    if not (-1e-12 <= s <= r + 1e-12 and r <= t + 1e-12 and t <= t_k + 1e-12):
        raise InvalidTime(f"need 0 <= s <= r <= t <= T_{k}; got s={s}, r={r}, t={t}")
    supp = sorted(set(Ucols) | set(Wcols))
    ref = next(iter(Wcols.values()), None)
    if ref is None:
        ref = next(iter(Ucols.values()))
    n = len(ref)
    zero = np.zeros(n, dtype=complex)
    _, psi_b = model._exps(T - t, "u", k)
    _, psi_full = model._exps(T - s, "u", k)
    a1 = {i: psi_b[i] + Wcols.get(i, zero) for i in supp}
    try:
        phi1, psi1 = _comp_pairs(model.process, t - r, a1)
    except DomainError as exc:
        raise DomainError(f"condition 1 (exponent over [r, t]): {exc}") from None
    a2 = {i: psi1[i] + Ucols.get(i, zero) for i in supp}
    try:
        phi2, psi2 = _comp_pairs(model.process, r - s, a2)
    except DomainError as exc:
        raise DomainError(f"condition 2 (exponent over [s, r]): {exc}") from None
    base1 = {i: np.array([psi_b[i] + 0.0j]) for i in supp}
    phib1, psib1 = _comp_pairs(model.process, t - r, base1, validate=False)
    phib2, _ = _comp_pairs(model.process, r - s, psib1, validate=False)
    out = np.zeros(n, dtype=complex)
    for i in supp:
        out = out + phi1[i] + phi2[i] - phib1[i][0] - phib2[i][0]
        out = out + (psi2[i] - psi_full[i]) * x[i]
    return np.exp(out)


def double_time_mgf(
    model: InflationModel,
    k: int,
    u,
    w,
    r: float,
    t: float,
    s: float = 0.0,
    x=None,
) -> complex:
    """Joint transform E^{Q^{T_k}}[e^{u . X_r + w . X_t} | F_s] at X_s = x.

    Degenerate edges: u = 0 reduces to forward_measure_mgf at t, w = 0 to
    forward_measure_mgf at r, and r = t to the single-date transform of
    u + w.
    """
    model._check_date(k)
    x = model.x0 if x is None else np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=complex)
    w = np.asarray(w, dtype=complex)
    dim = model.process.dim
    if u.shape != (dim,) or w.shape != (dim,):
        raise WrongSpec(f"exponent shapes {u.shape}, {w.shape} != ({dim},)")
    Ucols = {i: np.array([u[i]]) for i in _support(u)}
    Wcols = {i: np.array([w[i]]) for i in _support(w)}
    if not Ucols and not Wcols:
        return 1.0 + 0.0j
    return complex(
        _double_time_rows(model, k, Ucols, Wcols, float(r), float(t), float(s), x)[0]
    )


def _yoy_rows(
    model: InflationModel, k: int, j: int, Z: np.ndarray, s: float, x: np.ndarray
) -> np.ndarray:
    """Batch mgf of Y = log(I(T_k)/I(T_{k-j})) under Q^{T_k} given X_s = x."""
    model._check_date(k)
    if j < 1 or k - j < 0:
        raise ValueError(f"lag j={j} must satisfy 1 <= j <= {k}")
    Z = np.asarray(Z, dtype=complex)
    if k == j:
        # base fixing at T_0 = 0 where I(T_0) = 1
        return _cpi_log_mgf_rows(model, k, Z, s, x)
    a_k, b_k = model.cpi_coeffs(k, model.grid.T(k))
    a_p, b_p = model.cpi_coeffs(k - j, model.grid.T(k - j))
    Wcols = {i: Z * b_k[i] for i in _support(b_k)}
    Ucols = {i: -Z * b_p[i] for i in _support(b_p)}
    if not Wcols and not Ucols:
        return np.exp(Z * (a_k - a_p))
    core = _double_time_rows(
        model, k, Ucols, Wcols, model.grid.T(k - j), model.grid.T(k), s, x
    )
    return np.exp(Z * (a_k - a_p)) * core


def yoy_mgf(
    model: InflationModel, k: int, j: int, z, s: float = 0.0, x=None
) -> complex:
    """mgf of the log CPI ratio log(I(T_k)/I(T_{k-j})) under Q^{T_k}.

    Needs s <= T_{k-j}; j = k anchors the ratio at the unit base fixing.
    z = 1 returns 1 + tau * (period par inflation rate).
    """
    x = model.x0 if x is None else np.asarray(x, dtype=float)
    return complex(_yoy_rows(model, k, j, np.array([complex(z)]), float(s), x)[0])


def forward_inflation_rate(
    model: InflationModel, k: int, j: int = 2, t: float = 0.0, x=None
) -> float:
    """Par rate F_I with 1 + tau F_I = E^{Q^{T_k}}[I(T_k)/I(T_{k-j}) | F_t].

    tau = T_k - T_{k-j}.  Evaluated in closed form by collapsing the
    two-date transform at exponent one; equals (yoy_mgf(z=1) - 1)/tau.
    """
    model._check_date(k)
    if j < 1 or k - j < 0:
        raise ValueError(f"lag j={j} must satisfy 1 <= j <= {k}")
    x = model.x0 if x is None else np.asarray(x, dtype=float)
    T = model.process.horizon
    t_k, t_p = model.grid.T(k), model.grid.T(k - j)
    tau = t_k - t_p
    if t > t_p + 1e-12:
        raise InvalidTime(f"t={t} after T_{k - j}")
    if k == j:
        # unit base fixing: the expectation is the forward CPI itself
        return (model.forward_cpi(k, t, x) - 1.0) / tau
    phi_vk, psi_vk = model._exps(T - t_p, "v", k)
    phi_up, psi_up = model._exps(T - t_p, "u", k - j)
    phi_vp, psi_vp = model._exps(T - t_p, "v", k - j)
    phi_u, psi_u = model._exps(T - t, "u", k)
    a2 = psi_vk - (psi_vp - psi_up)
    pp = model.process.phi_psi(t_p - t, a2)
    const = phi_up - phi_vp + phi_vk + float(np.real(pp.phi)) - phi_u
    load = np.real(np.asarray(pp.psi)) - psi_u
    return math.expm1(const + float(load @ x)) / tau


# ---------------------------------------------------------------------------
# Fourier pricing of exponential payoffs
# ---------------------------------------------------------------------------

def _fourier_exp_option(rows, strike: float, R: float) -> float:
    """E[(e^Y - K)_+] for R > 1, E[(K - e^Y)_+] for R < 0, from the mgf
    rows of Y along the contour R + is."""
    ln_k = math.log(strike)

    def integrand(svals: np.ndarray) -> np.ndarray:
        z = R + 1j * svals
        return np.real(rows(z) * np.exp(-z * ln_k) / (z * (z - 1.0)))

    return strike * integrate_halfline(integrand, abs_floor=1e-16) / math.pi


def _exp_option(rows, point, strike: float, call: bool, R: float | None) -> float:
    """Option on e^Y from batch/scalar mgf callables, with contour search.

    Tries the preferred side first; if every candidate contour is
    infeasible, reprices the other side and applies put-call parity with
    the forward E[e^Y] = point(1).
    """
    if strike <= 0:
        raise ValueError("strike of the exponential payoff must be positive")
    if R is not None:
        R = float(R)
        if call and R <= 1.0:
            raise ContourError(f"call contour needs R > 1, got {R}")
        if not call and R >= 0.0:
            raise ContourError(f"put contour needs R < 0, got {R}")
        point(R)  # domain probe, propagates DomainError
        return _fourier_exp_option(rows, strike, R)

    def attempt(want_call: bool) -> float:
        errors = []
        for cand in _CALL_CONTOURS if want_call else _PUT_CONTOURS:
            try:
                point(cand)
            except DomainError as exc:
                errors.append(f"R={cand}: {exc}")
                continue
            try:
                return _fourier_exp_option(rows, strike, cand)
            except ContourError as exc:
                errors.append(f"R={cand}: {exc}")
        raise ContourError("no feasible contour; tried " + "; ".join(errors[:4]))

    try:
        return attempt(call)
    except ContourError as direct_err:
        try:
            other = attempt(not call)
            forward = float(np.real(point(1.0)))
        except (ContourError, DomainError):
            raise direct_err from None
        return other + (forward - strike) * (1.0 if call else -1.0)


# ---------------------------------------------------------------------------
# prices (all at valuation time 0)
# ---------------------------------------------------------------------------

def nominal_caplet_price(
    model: InflationModel, k: int, strike: float, R: float | None = None
) -> float:
    """Caplet paying Delta_k (F^k(T_{k-1}) - K)_+ at T_k, k >= 2.

    The capped quantity 1 + Delta_k F^k is exponential-affine in
    X_{T_{k-1}}, so the price is one Fourier integral under Q^{T_k}.
    """
    if k < 2:
        raise ValueError("nominal caplets start at k=2")
    model._check_date(k)
    delta = model.grid.accrual(k)
    k_tilde = 1.0 + delta * strike
    if k_tilde <= 0:
        raise ValueError(f"strike {strike} makes 1 + Delta K nonpositive")
    T = model.process.horizon
    t_fix = model.grid.T(k - 1)
    phi_a, psi_a = model._exps(T - t_fix, "u", k - 1)
    phi_b, psi_b = model._exps(T - t_fix, "u", k)
    a = phi_a - phi_b
    b = psi_a - psi_b
    disc = model.terminal_discount * math.exp(model.log_bond_ratio(k))
    supp = _support(b)
    if not supp:
        return disc * max(math.exp(a) - k_tilde, 0.0)
    x = model.x0

    def rows(z: np.ndarray) -> np.ndarray:
        cols = {i: z * b[i] for i in supp}
        return np.exp(z * a) * _forward_measure_rows(model, k, cols, 0.0, t_fix, x)

    def point(z: float) -> complex:
        return complex(rows(np.array([z + 0.0j]))[0])

    return disc * _exp_option(rows, point, k_tilde, call=True, R=R)


def nominal_floorlet_price(
    model: InflationModel, k: int, strike: float, R: float | None = None
) -> float:
    """Floorlet via parity: floor = cap - Delta_k P(0,T_k) (F^k(0) - K)."""
    cap = nominal_caplet_price(model, k, strike, R=R)
    disc = model.terminal_discount * math.exp(model.log_bond_ratio(k))
    return cap - disc * model.grid.accrual(k) * (model.forward_rate(k) - strike)


def cpi_call_price(
    model: InflationModel, k: int, strike: float, R: float | None = None
) -> float:
    """Price of (I(T_k) - K)_+ paid at T_k: one Fourier integral on the
    log-CPI transform under Q^{T_k}."""
    model._check_date(k)
    if strike <= 0:
        raise ValueError("CPI strike must be positive")
    disc = model.terminal_discount * math.exp(model.log_bond_ratio(k))
    a, b = model.cpi_coeffs(k, model.grid.T(k))
    if not _support(b):
        return disc * max(math.exp(a) - strike, 0.0)
    x = model.x0

    def rows(z: np.ndarray) -> np.ndarray:
        return _cpi_log_mgf_rows(model, k, z, 0.0, x)

    def point(z: float) -> complex:
        return complex(rows(np.array([z + 0.0j]))[0])

    return disc * _exp_option(rows, point, strike, call=True, R=R)


def cpi_put_price(
    model: InflationModel, k: int, strike: float, R: float | None = None
) -> float:
    """Price of (K - I(T_k))_+ paid at T_k (standalone redemption floor)."""
    model._check_date(k)
    if strike <= 0:
        raise ValueError("CPI strike must be positive")
    disc = model.terminal_discount * math.exp(model.log_bond_ratio(k))
    a, b = model.cpi_coeffs(k, model.grid.T(k))
    if not _support(b):
        return disc * max(strike - math.exp(a), 0.0)
    x = model.x0

    def rows(z: np.ndarray) -> np.ndarray:
        return _cpi_log_mgf_rows(model, k, z, 0.0, x)

    def point(z: float) -> complex:
        return complex(rows(np.array([z + 0.0j]))[0])

    return disc * _exp_option(rows, point, strike, call=False, R=R)


def inflation_caplet_price(
    model: InflationModel,
    k_base: int,
    k: int,
    strike: float,
    R: float | None = None,
) -> float:
    """Year-on-year caplet paying (I(T_k)/I(T_base) - (1 + tau K))_+ at T_k
    with tau = T_k - T_base; k_base = 0 anchors at the unit base fixing."""
    model._check_date(k)
    if not 0 <= k_base < k:
        raise ValueError(f"need 0 <= base index {k_base} < {k}")
    j = k - k_base
    tau = model.grid.T(k) - model.grid.T(k_base)
    k_tilde = 1.0 + tau * strike
    if k_tilde <= 0:
        raise ValueError(f"strike {strike} makes 1 + tau K nonpositive")
    disc = model.terminal_discount * math.exp(model.log_bond_ratio(k))
    a_k, b_k = model.cpi_coeffs(k, model.grid.T(k))
    if k_base > 0:
        a_p, b_p = model.cpi_coeffs(k_base, model.grid.T(k_base))
    else:
        a_p, b_p = 0.0, np.zeros_like(b_k)
    if not _support(b_k) and not _support(b_p):
        return disc * max(math.exp(a_k - a_p) - k_tilde, 0.0)
    x = model.x0

    def rows(z: np.ndarray) -> np.ndarray:
        return _yoy_rows(model, k, j, z, 0.0, x)

    def point(z: float) -> complex:
        return complex(rows(np.array([z + 0.0j]))[0])

    return disc * _exp_option(rows, point, k_tilde, call=True, R=R)


def inflation_floorlet_price(
    model: InflationModel,
    k_base: int,
    k: int,
    strike: float,
    R: float | None = None,
) -> float:
    """Year-on-year floorlet via parity with the period par rate:

        floor = cap - tau P(0,T_k) (F_I - K).
    """
    cap = inflation_caplet_price(model, k_base, k, strike, R=R)
    j = k - k_base
    tau = model.grid.T(k) - model.grid.T(k_base)
    disc = model.terminal_discount * math.exp(model.log_bond_ratio(k))
    f_i = forward_inflation_rate(model, k, j)
    return cap - disc * tau * (f_i - strike)


# ---------------------------------------------------------------------------
# linear inflation swaps
# ---------------------------------------------------------------------------

def zciis_rate(model: InflationModel, years: int | None = None) -> float:
    """Par fixed rate K of the m-year zero-coupon inflation swap:
    (1+K)^m = E^{Q^{T_{2m}}}[I(T_{2m})] = I(0, T_{2m})."""
    m = model.n_years if years is None else int(years)
    if not 1 <= m <= model.n_years:
        raise ValueError(f"years {m} outside 1..{model.n_years}")
    return model.forward_cpi(2 * m) ** (1.0 / m) - 1.0


def zciis_value(model: InflationModel, years: int, strike: float) -> float:
    """Value to the inflation receiver of the m-year zero-coupon swap:
    P(0,T_{2m}) (I(0,T_{2m}) - (1+K)^m)."""
    m = int(years)
    if not 1 <= m <= model.n_years:
        raise ValueError(f"years {m} outside 1..{model.n_years}")
    disc = model.terminal_discount * math.exp(model.log_bond_ratio(2 * m))
    return disc * (model.forward_cpi(2 * m) - (1.0 + strike) ** m)


def yyiis_rate(model: InflationModel, years: int | None = None) -> float:
    """Par fixed rate of the annual year-on-year swap: the P(0,T_{2m})
    weighted average of the period par rates F_I(0; T_{2m-2}, T_{2m})."""
    m_max = model.n_years if years is None else int(years)
    if not 1 <= m_max <= model.n_years:
        raise ValueError(f"years {m_max} outside 1..{model.n_years}")
    num = 0.0
    den = 0.0
    for m in range(1, m_max + 1):
        disc = model.terminal_discount * math.exp(model.log_bond_ratio(2 * m))
        num += disc * forward_inflation_rate(model, 2 * m, j=2)
        den += disc
    return num / den


def yyiis_value(model: InflationModel, years: int, strike: float) -> float:
    """Value to the inflation receiver of the annual year-on-year swap
    with fixed rate K: sum_m P(0,T_{2m}) (F_I^{(m)} - K)."""
    m_max = int(years)
    if not 1 <= m_max <= model.n_years:
        raise ValueError(f"years {m_max} outside 1..{model.n_years}")
    total = 0.0
    for m in range(1, m_max + 1):
        disc = model.terminal_discount * math.exp(model.log_bond_ratio(2 * m))
        total += disc * (forward_inflation_rate(model, 2 * m, j=2) - strike)
    return total


# ---------------------------------------------------------------------------
# instantaneous correlations
# ---------------------------------------------------------------------------

def _loading(model: InflationModel, t: float, quantity) -> np.ndarray:
    """State loading (gradient in X_t) of a log market quantity."""
    T = model.process.horizon
    name, *args = quantity
    if name == "forward_rate":
        (k,) = args
        if k < 2:
            raise ValueError("forward_rate quantities start at k=2")
        model._check_date(k)
        if t > model.grid.T(k - 1) + 1e-12:
            raise InvalidTime(f"t={t} after the fixing date T_{k - 1}")
        _, psi_a = model._exps(T - t, "u", k - 1)
        _, psi_b = model._exps(T - t, "u", k)
        return psi_a - psi_b
    if name == "forward_cpi":
        (k,) = args
        _, b = model.cpi_coeffs(k, t)
        return b
    if name == "yoy_rate":
        k = args[0]
        j = args[1] if len(args) > 1 else 2
        model._check_date(k)
        if j < 1 or k - j < 1:
            raise ValueError(f"yoy_rate needs 1 <= j < k, got j={j}, k={k}")
        t_p = model.grid.T(k - j)
        if t > t_p + 1e-12:
            raise InvalidTime(f"t={t} after T_{k - j}")
        _, psi_vk = model._exps(T - t_p, "v", k)
        _, psi_up = model._exps(T - t_p, "u", k - j)
        _, psi_vp = model._exps(T - t_p, "v", k - j)
        _, psi_u = model._exps(T - t, "u", k)
        a2 = psi_vk - (psi_vp - psi_up)
        pp = model.process.phi_psi(t_p - t, a2)
        return np.real(np.asarray(pp.psi)) - psi_u
    raise ValueError(f"unknown quantity {name!r}")


def correlation(model: InflationModel, t: float, qa, qb) -> float:
    """Correlation at time t between two log quantities' state noise.

    Quantities: ("forward_rate", k), ("forward_cpi", k), or
    ("yoy_rate", k[, j]).  Uses the independent-component variances of
    X_t; emits DegenerateVariance and returns NaN when either quantity
    carries no variance at t.
    """
    if t <= 0:
        warnings.warn("zero elapsed time carries no variance", DegenerateVariance)
        return float("nan")
    a = _loading(model, t, qa)
    b = _loading(model, t, qb)
    var = model.process.variance(t)
    va = float(a * a @ var)
    vb = float(b * b @ var)
    if va <= 0.0 or vb <= 0.0:
        warnings.warn(
            f"quantity {qa if va <= 0 else qb} carries no variance at t={t}",
            DegenerateVariance,
        )
        return float("nan")
    return float(a * b @ var) / math.sqrt(va * vb)


# ---------------------------------------------------------------------------
# term-structure fitting
# ---------------------------------------------------------------------------

def _comp_mgf(spec: Product, i: int, a: float) -> float:
    """E[exp(a X^i_T)] at the horizon, overflow-clipped real exponent."""
    comp = spec.components[i]
    pp = comp.phi_psi(spec.horizon, a)
    expo = float(np.real(pp.phi)) + float(np.real(pp.psi[0])) * comp.x0
    return math.exp(min(expo, 700.0))


def _comp_sup(spec: Product, i: int) -> tuple[float, float]:
    return spec.components[i]._interval1(spec.horizon)


def _solve_increasing(spec: Product, i: int, target: float, what: str) -> float:
    """Solve E[exp(y X^i_T)] = target for y >= 0 on a nonnegative component."""
    if target < 1.0 - 1e-12:
        raise Infeasible(f"{what}: target mgf {target} below 1")
    if target <= 1.0:
        return 0.0
    hi_sup = _comp_sup(spec, i)[1]
    cap = 0.999 * hi_sup if math.isfinite(hi_sup) else 1e6

    def g(y: float) -> float:
        return _comp_mgf(spec, i, y) - target

    lo, hi = 0.0, min(1e-3, 0.5 * cap)
    while g(hi) < 0.0:
        lo = hi
        hi = min(2.0 * hi, cap)
        if hi == lo:
            raise Infeasible(
                f"{what}: target {target} above the component mgf at the "
                f"admissible cap {cap:.6g}"
            )
    return float(brentq(g, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200))


def fit_tilde_u(spec: Product, ratios, scale: float = 2.0) -> np.ndarray:
    """Common-factor exponents from E[exp(scale tilde_u_k X^0_T)] = ratio_k.

    The scale splits each discount ratio between the common factor and
    the year buckets; 2 makes the common factor carry the square root.
    """
    ratios = np.asarray(ratios, dtype=float)
    if scale <= 0:
        raise ValueError("scale must be positive")
    out = np.empty(ratios.shape)
    for idx, r in enumerate(ratios):
        y = _solve_increasing(spec, 0, float(r), f"tilde_u_{idx + 1}")
        out[idx] = y / scale
    return out


def fit_ubar_sequence(spec: Product, tilde_u, ratios) -> np.ndarray:
    """Year-bucket exponents by backward induction over the dates.

    At date k with bucket c the unknown bar_u_k satisfies

        m_0(tilde_u_k) m_c(bar_u_k) prod_{l>c} m_l(bar_u_{2l-1}) = ratio_k

    with m_i the component mgfs at the horizon; the left side is
    increasing in bar_u_k and later buckets are already fixed.  Raises
    Infeasible naming the date index when a target cannot be reached.
    """
    tilde_u = np.asarray(tilde_u, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    M = (spec.dim - 1) // 2
    N = 2 * M
    if tilde_u.shape != (N,) or ratios.shape != (N,):
        raise WrongSpec(f"need {N} entries, got {tilde_u.shape} and {ratios.shape}")
    bar = np.zeros(N)
    for k in range(N, 0, -1):
        c = (k + 1) // 2
        known = _comp_mgf(spec, 0, tilde_u[k - 1])
        for l in range(c + 1, M + 1):
            known *= _comp_mgf(spec, l, bar[2 * l - 2])
        bar[k - 1] = _solve_increasing(spec, c, ratios[k - 1] / known, f"bar_u_{k}")
    for c in range(1, M + 1):
        if bar[2 * c - 1] > bar[2 * c - 2] + 1e-12:
            raise Infeasible(f"bar_u ladder not nonincreasing inside year {c}")
    return bar


def fit_vbar(spec: Product, index: int, target: float) -> float:
    """Solve E[exp(y X^index_T)] = target on a two-sided component strip.

    The mgf is convex with value 1 at 0, so at most two roots exist.  A
    lone root is returned; roots of opposite signs keep the positive
    one; two same-sign roots return the smaller magnitude and emit
    AmbiguousRoots.  No root raises Infeasible.
    """
    if target <= 0.0:
        raise Infeasible(f"component {index}: mgf target {target} must be positive")
    if abs(target - 1.0) <= 1e-14:
        return 0.0
    lo_sup, hi_sup = _comp_sup(spec, index)
    lo_cap = 0.999 * lo_sup if math.isfinite(lo_sup) else -1e6
    hi_cap = 0.999 * hi_sup if math.isfinite(hi_sup) else 1e6

    def g(y: float) -> float:
        return _comp_mgf(spec, index, y) - target

    res = minimize_scalar(
        lambda y: _comp_mgf(spec, index, y),
        bounds=(lo_cap, hi_cap),
        method="bounded",
        options={"xatol": 1e-12},
    )
    y_min = float(res.x)
    if g(y_min) > 0.0:
        raise Infeasible(
            f"component {index}: target {target} below the minimal mgf "
            f"{_comp_mgf(spec, index, y_min):.9g} on the strip"
        )

    def branch_root(far: float) -> float | None:
        if g(far) < 0.0:
            return None  # target never reached before the strip cap
        a, b = sorted((y_min, far))
        return float(brentq(g, a, b, xtol=1e-13, rtol=8.9e-16, maxiter=200))

    roots = [rt for rt in (branch_root(lo_cap), branch_root(hi_cap)) if rt is not None]
    if not roots:
        raise Infeasible(
            f"component {index}: target {target} not reached on the strip "
            f"({lo_cap:.6g}, {hi_cap:.6g})"
        )
    if len(roots) == 1:
        return roots[0]
    r_lo, r_hi = sorted(roots)
    if r_lo < 0.0 < r_hi:
        return r_hi
    pick = min(roots, key=abs)
    warnings.warn(
        f"component {index}: two same-sign mgf roots {r_lo:.6g} and {r_hi:.6g}; "
        f"keeping the smaller magnitude {pick:.6g}",
        AmbiguousRoots,
    )
    return pick


def fit_vbar_sequence(spec: Product, tilde_u, tilde_v, cpi_targets) -> np.ndarray:
    """Inflation-bucket exponents matching the forward CPI curve.

    The nominal entries of v_k cancel against u_k inside I(0,T_k), so
    the remaining factor on the year-c inflation component must satisfy

        m_{M+c}(bar_v_k) = I(0,T_k) m_0(tilde_u_k) / m_0(tilde_v_k).
    """
    tilde_u = np.asarray(tilde_u, dtype=float)
    tilde_v = np.asarray(tilde_v, dtype=float)
    targets = np.asarray(cpi_targets, dtype=float)
    M = (spec.dim - 1) // 2
    N = 2 * M
    if targets.shape != (N,) or tilde_u.shape != (N,) or tilde_v.shape != (N,):
        raise WrongSpec(f"need {N} entries per input")
    out = np.empty(N)
    for k in range(1, N + 1):
        c = (k + 1) // 2
        factor = (
            targets[k - 1]
            * _comp_mgf(spec, 0, tilde_u[k - 1])
            / _comp_mgf(spec, 0, tilde_v[k - 1])
        )
        out[k - 1] = fit_vbar(spec, M + c, factor)
    return out


def build_inflation_model(
    process: Product,
    ratios,
    cpi_targets,
    terminal_discount: float,
    scale: float = 2.0,
    tilt: float = 0.08,
    tilde_v=None,
) -> InflationModel:
    """Fit the full layout to discount ratios and a forward CPI curve.

    ``ratios`` are P(0,T_k)/P(0,T) on the semiannual dates (last entry
    1); ``cpi_targets`` the forward CPI values I(0,T_k).  tilde_v
    defaults to tilde_u_k (1 + tilt k); pass explicit values to override
    the common-factor split between nominal and real discounting.
    """
    M = (process.dim - 1) // 2
    if process.dim != 2 * M + 1 or M < 1:
        raise WrongSpec(f"process dimension {process.dim} is not 2M+1")
    grid = TenorGrid.semiannual(M)
    if abs(grid.maturities[-1] - process.horizon) > 1e-9:
        raise WrongSpec(
            f"semiannual layout over {M} years needs horizon {M}, "
            f"got {process.horizon}"
        )
    N = 2 * M
    ratios = np.asarray(ratios, dtype=float)
    if ratios.shape != (N,):
        raise WrongSpec(f"need {N} discount ratios, got {ratios.shape}")
    if abs(ratios[-1] - 1.0) > 1e-10:
        raise Infeasible("the terminal discount ratio must be 1")
    if np.any(np.diff(ratios) > 1e-12):
        raise NonmonotoneInput("discount ratios must be nonincreasing")
    tilde_u = fit_tilde_u(process, ratios, scale)
    bar_u = fit_ubar_sequence(process, tilde_u, ratios)
    if tilde_v is None:
        tilde_v = tilde_u * (1.0 + tilt * np.arange(1, N + 1))
    else:
        tilde_v = np.asarray(tilde_v, dtype=float)
    bar_v = fit_vbar_sequence(process, tilde_u, tilde_v, cpi_targets)
    layout = ParamLayout(
        n_years=M,
        tilde_u=tuple(tilde_u),
        bar_u=tuple(bar_u),
        tilde_v=tuple(tilde_v),
        bar_v=tuple(bar_v),
    )
    return InflationModel(
        process=process,
        layout=layout,
        grid=grid,
        terminal_discount=float(terminal_discount),
    )
