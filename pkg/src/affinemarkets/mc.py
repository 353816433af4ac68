"""Monte Carlo sampling of the driving processes.

Serves as an independent pricing oracle: paths are simulated under the
terminal measure (the law the specs describe), and forward-measure
expectations are recovered through importance weights supplied by the
caller.

Sampling schemes:

  BrownianDrift   exact Gaussian increments
  GaussOU         exact Gaussian transition (or Euler on request)
  DoubleGammaOUBM exact: Gaussian OU transition plus two compound
                  Poisson jump streams with exponential sizes, each
                  arrival decayed to the interval end
  CIR / CIRJump   full-truncation Euler with substeps; jump arrivals
                  added per substep as Poisson counts of exponential
                  sizes (a Gamma draw)

Streams are counter-based (Philox) and spawned per (block, component)
from a single seed, with a fixed block size and a deterministic
reduction order, so a given seed reproduces estimates bit for bit
regardless of platform parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import WrongSpec
from .processes import (
    AffineProcessSpec,
    BrownianDrift,
    CIR,
    CIRJump,
    DoubleGammaOUBM,
    GaussOU,
    Product,
)

_BLOCK = 1 << 17

_DEFAULT_SCHEME = {
    "BrownianDrift": "exact",
    "GaussOU": "exact",
    "DoubleGammaOUBM": "exact",
    "CIR": "euler",
    "CIRJump": "euler",
}


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    ``schemes`` overrides the per-variant default ('exact' or 'euler');
    exact sampling is unavailable for the square-root diffusions.
    """

    n_paths: int
    seed: int
    steps_per_year: int = 64
    schemes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be positive")
        if self.steps_per_year < 1:
            raise ValueError("steps_per_year must be positive")
        for name, scheme in self.schemes.items():
            if scheme not in ("exact", "euler"):
                raise ValueError(f"unknown scheme {scheme!r} for {name}")

    def scheme_for(self, variant: str) -> str:
        scheme = self.schemes.get(variant, _DEFAULT_SCHEME.get(variant))
        if scheme is None:
            raise WrongSpec(f"no sampling scheme for variant {variant!r}")
        if scheme == "exact" and variant in ("CIR", "CIRJump"):
            raise WrongSpec(f"exact sampling is unavailable for {variant}")
        return scheme


def _ou_step(comp, state, dt, rng, n):
    lam, theta, sigma = comp.lam, comp.theta, comp.sigma
    e = math.exp(-lam * dt)
    sd = sigma * math.sqrt((1.0 - e * e) / (2.0 * lam))
    return theta * (1.0 - e) + e * state + sd * rng.standard_normal(n)


def _decayed_jumps(rng, n, rate, alpha, lam, dt):
    """Sum of Exp(alpha)-sized arrivals in (0, dt], each decayed by
    exp(-lam (dt - arrival time))."""
    counts = rng.poisson(rate * dt, size=n)
    kmax = int(counts.max()) if counts.size else 0
    if kmax == 0:
        return np.zeros(n)
    arrivals = rng.uniform(0.0, dt, size=(n, kmax))
    sizes = rng.exponential(1.0 / alpha, size=(n, kmax))
    mask = np.arange(kmax)[None, :] < counts[:, None]
    decay = np.exp(-lam * (dt - arrivals))
    return np.sum(sizes * decay * mask, axis=1)


def _sim_component(comp, times, n, rng, config: SimConfig) -> np.ndarray:
    """Paths of one scalar component at the requested times, shape (n, len(times))."""
    variant = type(comp).__name__
    scheme = config.scheme_for(variant)
    out = np.empty((n, len(times)))
    state = np.full(n, float(comp.x0))
    t_prev = 0.0
    for j, t in enumerate(times):
        dt_total = t - t_prev
        if dt_total < 0:
            raise ValueError("sample times must be nondecreasing")
        if dt_total == 0.0:
            out[:, j] = np.maximum(state, 0.0) if comp.nonneg[0] else state
            t_prev = t
            continue
        if scheme == "exact":
            if variant == "BrownianDrift":
                state = (
                    state
                    + comp.mu * dt_total
                    + comp.sigma * math.sqrt(dt_total) * rng.standard_normal(n)
                )
            elif variant == "GaussOU":
                state = _ou_step(comp, state, dt_total, rng, n)
            else:  # DoubleGammaOUBM
                state = _ou_step(comp, state, dt_total, rng, n)
                if comp.beta_plus > 0:
                    state = state + _decayed_jumps(
                        rng, n, comp.lam * comp.beta_plus, comp.alpha_plus,
                        comp.lam, dt_total,
                    )
                if comp.beta_minus > 0:
                    state = state - _decayed_jumps(
                        rng, n, comp.lam * comp.beta_minus, comp.alpha_minus,
                        comp.lam, dt_total,
                    )
        else:
            n_sub = max(1, math.ceil(config.steps_per_year * dt_total))
            h = dt_total / n_sub
            sqh = math.sqrt(h)
            for _ in range(n_sub):
                z = rng.standard_normal(n)
                if variant in ("CIR", "CIRJump"):
                    pos = np.maximum(state, 0.0)
                    state = (
                        state
                        - comp.lam * (pos - comp.theta) * h
                        + 2.0 * comp.eta * np.sqrt(pos) * sqh * z
                    )
                    if variant == "CIRJump" and comp.beta > 0:
                        counts = rng.poisson(comp.lam * comp.beta * h, size=n)
                        jumps = rng.gamma(counts, 1.0 / comp.alpha)
                        state = state + jumps
                elif variant == "GaussOU":
                    state = (
                        state
                        - comp.lam * (state - comp.theta) * h
                        + comp.sigma * sqh * z
                    )
                elif variant == "BrownianDrift":
                    state = state + comp.mu * h + comp.sigma * sqh * z
                else:  # DoubleGammaOUBM euler
                    state = (
                        state
                        - comp.lam * (state - comp.theta) * h
                        + comp.sigma * sqh * z
                    )
                    if comp.beta_plus > 0:
                        counts = rng.poisson(comp.lam * comp.beta_plus * h, size=n)
                        state = state + rng.gamma(counts, 1.0 / comp.alpha_plus)
                    if comp.beta_minus > 0:
                        counts = rng.poisson(comp.lam * comp.beta_minus * h, size=n)
                        state = state - rng.gamma(counts, 1.0 / comp.alpha_minus)
        out[:, j] = np.maximum(state, 0.0) if comp.nonneg[0] else state
        t_prev = t
    return out


def _components(spec: AffineProcessSpec):
    if isinstance(spec, Product):
        return spec.components
    return (spec,)


def simulate(spec: AffineProcessSpec, times, config: SimConfig) -> np.ndarray:
    """Simulate paths at the given times; returns (n_paths, n_times, dim).

    Times must be nondecreasing and within (0, horizon].  Identical
    (seed, n_paths) settings reproduce the array bit for bit.
    """
    times = [float(t) for t in times]
    if not times:
        raise ValueError("need at least one sample time")
    if any(t <= 0 for t in times) or any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("sample times must be positive and nondecreasing")
    if times[-1] > spec.horizon + 1e-12:
        raise ValueError(f"sample time {times[-1]} beyond the horizon {spec.horizon}")
    comps = _components(spec)
    n_blocks = (config.n_paths + _BLOCK - 1) // _BLOCK
    root = np.random.SeedSequence(config.seed)
    block_seeds = root.spawn(n_blocks)
    out = np.empty((config.n_paths, len(times), spec.dim))
    for b in range(n_blocks):
        lo = b * _BLOCK
        hi = min(lo + _BLOCK, config.n_paths)
        comp_seeds = block_seeds[b].spawn(len(comps))
        for i, comp in enumerate(comps):
            rng = np.random.Generator(np.random.Philox(comp_seeds[i]))
            out[lo:hi, :, i] = _sim_component(comp, times, hi - lo, rng, config)
    return out


def mc_price(
    spec: AffineProcessSpec,
    times,
    payoff: Callable[[np.ndarray], np.ndarray],
    config: SimConfig,
    weight: Callable[[np.ndarray], np.ndarray] | None = None,
    normalizer: float = 1.0,
) -> tuple[float, float]:
    """(estimate, standard error) of E[payoff * weight] / normalizer.

    ``payoff`` and ``weight`` map the path array (n, n_times, dim) to a
    per-path vector; the weight carries a measure change (for forward
    measures, the date-T_k martingale over its time-0 value).
    """
    paths = simulate(spec, times, config)
    vals = np.asarray(payoff(paths), dtype=float)
    if vals.shape != (config.n_paths,):
        raise ValueError(f"payoff returned shape {vals.shape}")
    if weight is not None:
        wv = np.asarray(weight(paths), dtype=float)
        if wv.shape != (config.n_paths,):
            raise ValueError(f"weight returned shape {wv.shape}")
        vals = vals * wv
    est = float(np.mean(vals)) / normalizer
    if config.n_paths == 1:
        return est, float("nan")
    se = float(np.std(vals, ddof=1)) / math.sqrt(config.n_paths) / abs(normalizer)
    return est, se
