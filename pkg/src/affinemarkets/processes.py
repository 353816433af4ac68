"""Analytic affine processes on R^m_{>=0} x R^n.

Every supported driving process admits closed-form transform exponents
``phi_t(u)``, ``psi_t(u)`` with

    E[ exp(u . X_t) | X_0 = x ] = exp( phi_t(u) + psi_t(u) . x ),

valid on an open strip of exponents (the moment domain).  The module
provides the closed forms, their admissible domains, conditional mgfs,
per-component variances, an independent ODE oracle for the transform
exponents, and JSON (de)serialization of process specifications.

Scalar variants
---------------
BrownianDrift    x0 + mu t + sigma B_t                     (real line)
GaussOU          dX = -lam (X - theta) dt + sigma dB       (real line)
DoubleGammaOUBM  GaussOU plus two-sided exponential jumps  (real line)
CIR              dX = -lam (X - theta) dt + 2 eta sqrt(X) dW   (nonneg)
CIRJump          CIR plus exponential(1/alpha) jumps at rate lam*beta

``Product`` composes independent scalar components; exponent vectors
concatenate and the nonnegative components must come first.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, fields
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, InvalidTime, OdeBlowup, WrongSpec

_INF = float("inf")
_PSI_BLOWUP_CAP = 1e10


def _clog1p(z):
    """log(1 + z) for complex scalars/arrays, accurate for tiny |z|."""
    z = np.asarray(z)
    small = np.abs(z) < 1e-4
    if not np.any(small):
        return np.log1p(z) if np.isrealobj(z) else np.log(1.0 + z)
    zs = np.where(small, z, 0.0)
    # quartic Horner tail keeps the relative error near machine epsilon
    series = zs * (1.0 - zs * (0.5 - zs * (1.0 / 3.0 - zs * 0.25)))
    large = np.where(small, 0.5, z)
    full = np.log1p(large) if np.isrealobj(z) else np.log(1.0 + large)
    return np.where(small, series, full)


@dataclass(frozen=True)
class PhiPsi:
    """Transform exponent pair; ``psi`` has one entry per component."""

    phi: complex
    psi: np.ndarray

    def value(self, x) -> complex:
        """Exponent evaluated at state x: phi + psi . x."""
        return self.phi + np.dot(self.psi, np.asarray(x))


@dataclass(frozen=True)
class MomentDomain:
    """Open per-component exponent strips.

    ``at_t``    admissible real parts for the elapsed time queried,
    ``uniform`` admissible for every elapsed time up to the horizon.
    """

    at_t: tuple[tuple[float, float], ...]
    uniform: tuple[tuple[float, float], ...]

    def contains(self, u, uniform: bool = False) -> bool:
        bands = self.uniform if uniform else self.at_t
        re = np.atleast_1d(np.real(np.asarray(u, dtype=complex)))
        if re.shape[-1] != len(bands):
            raise WrongSpec(
                f"exponent has {re.shape[-1]} components, domain has {len(bands)}"
            )
        for i, (lo, hi) in enumerate(bands):
            if not (lo < re[i] < hi):
                return False
        return True


class AffineProcessSpec(ABC):
    """Base class for affine driving-process specifications."""

    horizon: float

    # -- structural ------------------------------------------------------
    @property
    @abstractmethod
    def dim(self) -> int: ...

    @property
    @abstractmethod
    def nonneg(self) -> tuple[bool, ...]:
        """Per-component flag: state restricted to the nonnegative axis."""

    @property
    @abstractmethod
    def x0_vector(self) -> np.ndarray: ...

    @abstractmethod
    def _intervals(self, t: float) -> tuple[tuple[float, float], ...]:
        """Open admissible Re(u) band per component at elapsed time t."""

    @abstractmethod
    def _phi_psi_arr(self, t: float, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized transform exponents.

        ``u`` has shape (n, dim); returns phi (n,) and psi (n, dim).
        No domain validation here; callers validate.
        """

    # -- shared plumbing --------------------------------------------------
    def _check_time(self, t: float, allow_zero: bool = True) -> float:
        t = float(t)
        if math.isnan(t) or t < 0.0 or t > self.horizon + 1e-12:
            raise InvalidTime(f"elapsed time {t} outside [0, horizon={self.horizon}]")
        if not allow_zero and t == 0.0:
            raise InvalidTime("elapsed time must be positive")
        return t

    def _as_exponent(self, u) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(u))
        if arr.shape != (self.dim,):
            raise WrongSpec(
                f"exponent shape {arr.shape} does not match process dimension {self.dim}"
            )
        return arr

    def _validate_domain(self, t: float, u_arr: np.ndarray) -> None:
        bands = self._intervals(t)
        re = np.real(u_arr)
        for i, (lo, hi) in enumerate(bands):
            bad = ~((re[..., i] > lo) & (re[..., i] < hi))
            if np.any(bad):
                val = re[..., i][bad].flat[0]
                raise DomainError(
                    f"component {i}: Re(u)={val} outside open band ({lo}, {hi}) "
                    f"at elapsed time {t}"
                )

    def domain(self, t: float) -> MomentDomain:
        t = self._check_time(t)
        return MomentDomain(at_t=self._intervals(t), uniform=self._intervals(self.horizon))

    def phi_psi(self, t: float, u) -> PhiPsi:
        t = self._check_time(t)
        u_arr = self._as_exponent(u)
        if t == 0.0:
            return PhiPsi(phi=0.0 * u_arr.flat[0], psi=u_arr.copy())
        self._validate_domain(t, u_arr[None, :])
        phi, psi = self._phi_psi_arr(t, u_arr[None, :])
        return PhiPsi(phi=phi[0], psi=psi[0])

    def phi_psi_many(self, t: float, u: np.ndarray, validate: bool = True):
        """Batch transform exponents for u of shape (n, dim)."""
        t = self._check_time(t)
        u = np.asarray(u)
        if u.ndim != 2 or u.shape[1] != self.dim:
            raise WrongSpec(f"batch exponent shape {u.shape} invalid for dim {self.dim}")
        if t == 0.0:
            return np.zeros(u.shape[0], dtype=u.dtype), u.copy()
        if validate:
            self._validate_domain(t, u)
        return self._phi_psi_arr(t, u)

    def mgf(self, s: float, t: float, u, x=None) -> complex:
        """E[exp(u . X_t) | X_s = x] for 0 <= s <= t <= horizon."""
        s, t = float(s), float(t)
        if s < 0 or t < s or t > self.horizon + 1e-12:
            raise InvalidTime(f"need 0 <= s <= t <= horizon, got s={s}, t={t}")
        x = self.x0_vector if x is None else np.atleast_1d(np.asarray(x))
        pp = self.phi_psi(t - s, u)
        return np.exp(pp.value(x))

    def variance(self, t: float) -> np.ndarray:
        """Diagonal of Var(X_t), by Richardson-extrapolated differencing.

        Second central difference of the per-component cumulant
        f(h) = phi_t(h e_i) + psi_t(h e_i) . x0 at 0, one Richardson step.
        """
        t = self._check_time(t)
        if t == 0.0:
            return np.zeros(self.dim)
        bands = self._intervals(t)
        x0 = self.x0_vector
        out = np.empty(self.dim)
        for i, (lo, hi) in enumerate(bands):
            radius = min(-lo, hi)  # distance from 0 to nearest boundary
            if radius <= 0:
                raise DomainError(f"component {i}: 0 not interior to the moment band")
            if math.isinf(radius):
                h = 1e-4
            else:
                h = min(1e-4 * max(1.0, radius), radius / 8.0)
            if not h > 0:
                raise DomainError(f"component {i}: stencil step collapsed to {h}")

            def cum(step: float) -> float:
                u = np.zeros((2, self.dim))
                u[0, i] = step
                u[1, i] = -step
                phi, psi = self._phi_psi_arr(t, u)
                vals = np.real(phi) + np.real(psi[:, i]) * x0[i]
                return float(vals[0] + vals[1])  # f(h) + f(-h); f(0) = 0

            v_h = cum(h) / h**2
            v_h2 = cum(h / 2.0) / (h / 2.0) ** 2
            out[i] = (4.0 * v_h2 - v_h) / 3.0
        return out

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        params = {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if f.name != "horizon"
        }
        return {
            "variant": type(self).__name__,
            "params": params,
            "horizon": self.horizon,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class _ScalarSpec(AffineProcessSpec):
    """One-dimensional variant plumbing around scalar closed forms."""

    @property
    def dim(self) -> int:
        return 1

    @property
    def x0_vector(self) -> np.ndarray:
        return np.array([self.x0], dtype=float)

    def _intervals(self, t):
        return (self._interval1(t),)

    @abstractmethod
    def _interval1(self, t: float) -> tuple[float, float]: ...

    @abstractmethod
    def _phi1(self, t: float, u): ...

    @abstractmethod
    def _psi1(self, t: float, u): ...

    # generator pair for the ODE oracle
    @abstractmethod
    def _gen_F(self, w: float) -> float: ...

    @abstractmethod
    def _gen_R(self, w: float) -> float: ...

    def _gen_events(self) -> list[Callable]:
        """Terminal events that flag the flow leaving the admissible set."""
        def blowup(t, y):
            return _PSI_BLOWUP_CAP - abs(y[1])
        blowup.terminal = True
        return [blowup]

    def _phi_psi_arr(self, t, u):
        u1 = u[:, 0]
        return np.asarray(self._phi1(t, u1)), np.asarray(self._psi1(t, u1))[:, None]


@dataclass(frozen=True)
class BrownianDrift(_ScalarSpec):
    """x0 + mu t + sigma B_t."""

    sigma: float = 1.0
    mu: float = 0.0
    x0: float = 0.0
    horizon: float = 1.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.horizon <= 0:
            raise ValueError("horizon must be > 0")

    @property
    def nonneg(self):
        return (False,)

    def _interval1(self, t):
        return (-_INF, _INF)

    def _phi1(self, t, u):
        return t * (self.mu * u + 0.5 * self.sigma**2 * u * u)

    def _psi1(self, t, u):
        return u + np.zeros_like(u)

    def _gen_F(self, w):
        return self.mu * w + 0.5 * self.sigma**2 * w * w

    def _gen_R(self, w):
        return 0.0


@dataclass(frozen=True)
class GaussOU(_ScalarSpec):
    """dX = -lam (X - theta) dt + sigma dB."""

    lam: float
    theta: float
    sigma: float
    x0: float
    horizon: float = 1.0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be > 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.horizon <= 0:
            raise ValueError("horizon must be > 0")

    @property
    def nonneg(self):
        return (False,)

    def _interval1(self, t):
        return (-_INF, _INF)

    def _phi1(self, t, u):
        e = math.exp(-self.lam * t)
        diff = self.sigma**2 * u * u * (1.0 - e * e) / (4.0 * self.lam)
        return diff + self.theta * u * (1.0 - e)

    def _psi1(self, t, u):
        return math.exp(-self.lam * t) * u

    def _gen_F(self, w):
        return self.lam * self.theta * w + 0.5 * self.sigma**2 * w * w

    def _gen_R(self, w):
        return -self.lam * w


@dataclass(frozen=True)
class DoubleGammaOUBM(_ScalarSpec):
    """Mean-reverting diffusion with two-sided exponential jumps.

    dX = -lam (X - theta) dt + sigma dB + dJ, where J compounds
    positive Exp(mean 1/alpha_plus) jumps at rate lam*beta_plus and
    negative Exp(mean 1/alpha_minus) jumps at rate lam*beta_minus.
    """

    lam: float
    theta: float
    sigma: float
    alpha_plus: float
    alpha_minus: float
    beta_plus: float
    beta_minus: float
    x0: float
    horizon: float = 1.0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be > 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.alpha_plus <= 0 or self.alpha_minus <= 0:
            raise ValueError("alpha_plus/alpha_minus must be > 0")
        if self.beta_plus < 0 or self.beta_minus < 0:
            raise ValueError("beta_plus/beta_minus must be >= 0")
        if self.horizon <= 0:
            raise ValueError("horizon must be > 0")

    @property
    def nonneg(self):
        return (False,)

    def _interval1(self, t):
        lo = -self.alpha_minus if self.beta_minus > 0 else -_INF
        hi = self.alpha_plus if self.beta_plus > 0 else _INF
        return (lo, hi)

    def _phi1(self, t, u):
        e = math.exp(-self.lam * t)
        out = self.sigma**2 * u * u * (1.0 - e * e) / (4.0 * self.lam)
        out = out + self.theta * u * (1.0 - e)
        # per-factor logs: every factor has positive real part on the strip
        if self.beta_plus > 0:
            ap = self.alpha_plus
            out = out + self.beta_plus * (np.log(ap - e * u) - np.log(ap - u))
        if self.beta_minus > 0:
            am = self.alpha_minus
            out = out + self.beta_minus * (np.log(am + e * u) - np.log(am + u))
        return out

    def _psi1(self, t, u):
        return math.exp(-self.lam * t) * u

    def _gen_F(self, w):
        out = self.lam * self.theta * w + 0.5 * self.sigma**2 * w * w
        if self.beta_plus > 0:
            out += self.lam * self.beta_plus * w / (self.alpha_plus - w)
        if self.beta_minus > 0:
            out -= self.lam * self.beta_minus * w / (self.alpha_minus + w)
        return out

    def _gen_R(self, w):
        return -self.lam * w

    def _gen_events(self):
        events = super()._gen_events()
        if self.beta_plus > 0:
            ap = self.alpha_plus

            def hit_plus(t, y, ap=ap):
                return ap * (1.0 - 1e-12) - y[1]
            hit_plus.terminal = True
            events.append(hit_plus)
        if self.beta_minus > 0:
            am = self.alpha_minus

            def hit_minus(t, y, am=am):
                return y[1] + am * (1.0 - 1e-12)
            hit_minus.terminal = True
            events.append(hit_minus)
        return events


@dataclass(frozen=True)
class CIR(_ScalarSpec):
    """dX = -lam (X - theta) dt + 2 eta sqrt(X) dW."""

    lam: float
    theta: float
    eta: float
    x0: float
    horizon: float = 1.0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be > 0")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.eta <= 0:
            raise ValueError("eta must be > 0")
        if self.x0 < 0:
            raise ValueError("x0 must be >= 0")
        if self.horizon <= 0:
            raise ValueError("horizon must be > 0")

    @property
    def nonneg(self):
        return (True,)

    def _c(self, t: float) -> float:
        return (2.0 * self.eta**2 / self.lam) * (1.0 - math.exp(-self.lam * t))

    def _interval1(self, t):
        if t == 0.0:
            return (-_INF, _INF)
        return (-_INF, 1.0 / self._c(t))

    def _phi1(self, t, u):
        c = self._c(t)
        # Re(1 - c u) > 0 on the admissible band, principal log is smooth
        return -(self.lam * self.theta / (2.0 * self.eta**2)) * np.log(1.0 - c * u)

    def _psi1(self, t, u):
        c = self._c(t)
        return math.exp(-self.lam * t) * u / (1.0 - c * u)

    def _gen_F(self, w):
        return self.lam * self.theta * w

    def _gen_R(self, w):
        return -self.lam * w + 2.0 * self.eta**2 * w * w


@dataclass(frozen=True)
class CIRJump(CIR):
    """CIR plus Exp(mean 1/alpha) jumps arriving at rate lam*beta."""

    alpha: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        super().__post_init__()
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")

    def _d(self, t: float) -> float:
        e = math.exp(-self.lam * t)
        return e + (1.0 - e) * (2.0 * self.eta**2 * self.alpha / self.lam)

    def _interval1(self, t):
        if t == 0.0:
            return (-_INF, _INF)
        hi = min(1.0 / self._c(t), self.alpha / self._d(t), self.alpha)
        return (-_INF, hi)

    def _phi1(self, t, u):
        base = CIR._phi1(self, t, u)
        if self.beta == 0:
            return base
        lam, alpha, beta = self.lam, self.alpha, self.beta
        eps = lam - 2.0 * self.eta**2 * alpha
        e = math.exp(-lam * t)
        # jump part: (lam beta / eps) * log1p(w eps), w = u(1-e)/(lam(alpha-u));
        # exact for all eps, removable singularity handled by the eps -> 0 limit
        w = u * (1.0 - e) / (lam * (alpha - u))
        if eps == 0.0:
            return base + lam * beta * w
        return base + (lam * beta / eps) * _clog1p(w * eps)

    def _gen_F(self, w):
        out = self.lam * self.theta * w
        if self.beta > 0:
            out += self.lam * self.beta * w / (self.alpha - w)
        return out

    def _gen_events(self):
        events = super()._gen_events()
        if self.beta > 0:
            alpha = self.alpha

            def hit_alpha(t, y, alpha=alpha):
                return alpha * (1.0 - 1e-12) - y[1]
            hit_alpha.terminal = True
            events.append(hit_alpha)
        return events


@dataclass(frozen=True)
class Product(AffineProcessSpec):
    """Independent scalar components; nonnegative components come first."""

    components: tuple[AffineProcessSpec, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("Product needs at least one component")
        for c in comps:
            if isinstance(c, Product):
                raise WrongSpec("nested Product specs are not supported")
        horizons = {c.horizon for c in comps}
        if len(horizons) != 1:
            raise ValueError(f"components disagree on horizon: {sorted(horizons)}")
        seen_real = False
        for flag in self.nonneg:
            if not flag:
                seen_real = True
            elif seen_real:
                raise WrongSpec("nonnegative components must precede real-valued ones")

    @property
    def horizon(self) -> float:  # type: ignore[override]
        return self.components[0].horizon

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def nonneg(self):
        return tuple(c.nonneg[0] for c in self.components)

    @property
    def x0_vector(self) -> np.ndarray:
        return np.array([c.x0 for c in self.components], dtype=float)

    def _intervals(self, t):
        return tuple(c._interval1(t) for c in self.components)

    def _phi_psi_arr(self, t, u):
        n = u.shape[0]
        phi = np.zeros(n, dtype=u.dtype if np.iscomplexobj(u) else float)
        psi = np.empty_like(u)
        for i, c in enumerate(self.components):
            phi = phi + np.asarray(c._phi1(t, u[:, i]))
            psi[:, i] = c._psi1(t, u[:, i])
        return phi, psi

    def component_mgf(self, i: int, t: float, a, x=None) -> complex:
        """E[exp(a X^i_t)] for the i-th (independent) component."""
        comp = self.components[i]
        xi = comp.x0 if x is None else float(x)
        pp = comp.phi_psi(t, a)
        return np.exp(pp.phi + pp.psi[0] * xi)

    def to_dict(self) -> dict:
        return {
            "variant": "Product",
            "components": [c.to_dict() for c in self.components],
            "horizon": self.horizon,
        }


_VARIANTS: dict[str, type] = {
    "BrownianDrift": BrownianDrift,
    "GaussOU": GaussOU,
    "DoubleGammaOUBM": DoubleGammaOUBM,
    "CIR": CIR,
    "CIRJump": CIRJump,
}


def spec_from_dict(data: dict) -> AffineProcessSpec:
    variant = data.get("variant")
    if variant == "Product":
        comps = tuple(spec_from_dict(c) for c in data["components"])
        return Product(components=comps)
    if variant not in _VARIANTS:
        raise WrongSpec(f"unknown process variant {variant!r}")
    cls = _VARIANTS[variant]
    kwargs = dict(data.get("params", {}))
    kwargs["horizon"] = data["horizon"]
    return cls(**kwargs)


def spec_from_json(text: str) -> AffineProcessSpec:
    return spec_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# free-function façade
# ---------------------------------------------------------------------------

def phi_psi(spec: AffineProcessSpec, t: float, u) -> PhiPsi:
    return spec.phi_psi(t, u)


def mgf(spec: AffineProcessSpec, s: float, t: float, u, x=None) -> complex:
    return spec.mgf(s, t, u, x)


def domain(spec: AffineProcessSpec, t: float) -> MomentDomain:
    return spec.domain(t)


def variance(spec: AffineProcessSpec, t: float) -> np.ndarray:
    return spec.variance(t)


def riccati_integrate(
    spec: AffineProcessSpec,
    t: float,
    u,
    rtol: float = 1e-9,
    atol: float = 1e-10,
) -> PhiPsi:
    """ODE oracle for the transform exponents (real u only).

    Integrates d(phi)/dt = F(psi), d(psi)/dt = R(psi) with psi_0 = u by an
    adaptive embedded Runge-Kutta scheme, independently of the closed forms.
    """
    t = spec._check_time(t)
    u_arr = spec._as_exponent(u)
    if np.iscomplexobj(u_arr):
        raise WrongSpec("riccati_integrate supports real exponents only")
    if t == 0.0:
        return PhiPsi(phi=0.0, psi=u_arr.astype(float))
    spec._validate_domain(t, u_arr[None, :].astype(complex))

    comps = spec.components if isinstance(spec, Product) else (spec,)
    phis = np.empty(len(comps))
    psis = np.empty(len(comps))
    for i, comp in enumerate(comps):
        def rhs(_s, y, comp=comp):
            w = y[1]
            return [comp._gen_F(w), comp._gen_R(w)]

        sol = solve_ivp(
            rhs,
            (0.0, t),
            [0.0, float(u_arr[i])],
            method="DOP853",
            rtol=rtol,
            atol=atol,
            events=comp._gen_events(),
            dense_output=False,
        )
        if sol.status == 1:
            raise OdeBlowup(
                f"component {i}: transform flow left the admissible set before t={t}"
            )
        if sol.status != 0:
            raise OdeBlowup(f"component {i}: ODE solver failed: {sol.message}")
        phis[i] = sol.y[0, -1]
        psis[i] = sol.y[1, -1]
    return PhiPsi(phi=float(np.sum(phis)), psi=psis)
