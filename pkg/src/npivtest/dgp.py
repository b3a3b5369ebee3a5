"""Simulation designs.

All designs draw jointly normal latents, map regressor and instrument to
(0, 1) through the standard normal CDF, and add correlated noise:

  * design I: (X*, W*, U) with corr(X*, W*) = xi (instrument strength) and
    corr(X*, U) = 0.3; Y = h(X) + U with unit-variance noise.
  * design II: W* drives X* through xi; U = (0.3 eps + sqrt(0.91) nu) / 2 has
    variance 1/4.
  * multivariate: two instruments, the second correlated 0.4 with X*.

Structural function families: a smooth strictly decreasing step (mono), the
sine-perturbed quadratic (sin), design II's increasing variant (design2), and
the plain quadratic bump (quad).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .randdist import CovarianceSpec, RngStream, mvn_sample, std_normal_cdf

__all__ = [
    "HSpec",
    "DesignConfig",
    "Dataset",
    "h_mono",
    "h_sin",
    "h_design2",
    "h_quad",
    "eval_h",
    "gen_design1",
    "gen_design2",
    "gen_multivariate",
    "generate",
    "null_boundary",
]

_DESIGNS = ("I", "II", "multivariate")
_H_FAMILIES = ("mono", "sin", "design2", "quad")


def h_mono(c0: float, x):
    """Strictly decreasing slide from c0 to -c0; c0 tunes how step-like it is."""
    if c0 <= 0:
        raise InputError(f"c0 must be positive, got {c0}")
    x = np.asarray(x, dtype=float)
    return c0 * (1.0 - 2.0 * std_normal_cdf((x - 0.5) / c0))


def h_sin(c_a: float, c_b: float, x):
    x = np.asarray(x, dtype=float)
    return -x / 5.0 + c_a * (x**2 + c_b * np.sin(2.0 * np.pi * x))


def h_design2(c_a: float, x):
    x = np.asarray(x, dtype=float)
    return x / 5.0 + x**2 + c_a * np.sin(2.0 * np.pi * x)


def h_quad(c_a: float, x):
    x = np.asarray(x, dtype=float)
    return -x / 5.0 + c_a * x**2


@dataclass(frozen=True)
class HSpec:
    """Structural function pick: family plus its constants."""

    family: str
    c0: float = 1.0
    c_a: float = 0.0
    c_b: float = 0.0

    def __post_init__(self):
        if self.family not in _H_FAMILIES:
            raise InputError(f"unknown h family {self.family!r}; expected one of {_H_FAMILIES}")
        if self.family == "mono" and not 0.0 < self.c0 <= 1.0:
            raise InputError(f"mono family needs c0 in (0, 1], got {self.c0}")

    def __call__(self, x):
        return eval_h(self, x)


def eval_h(h: HSpec, x):
    if h.family == "mono":
        return h_mono(h.c0, x)
    if h.family == "sin":
        return h_sin(h.c_a, h.c_b, x)
    if h.family == "design2":
        return h_design2(h.c_a, x)
    return h_quad(h.c_a, x)


@dataclass(frozen=True)
class DesignConfig:
    """One simulation cell: design, sample size, instrument strength, h, stream."""

    design: str
    n: int
    xi: float
    h_spec: HSpec
    rng: RngStream

    def __post_init__(self):
        if self.design not in _DESIGNS:
            raise InputError(f"unknown design {self.design!r}; expected one of {_DESIGNS}")
        if self.n < 1:
            raise InputError(f"n must be positive, got {self.n}")
        if not 0.0 < self.xi < 1.0:
            raise InputError(f"xi must lie in (0, 1), got {self.xi}")


@dataclass(frozen=True)
class Dataset:
    """Generated sample with its provenance."""

    y: np.ndarray
    x: np.ndarray
    w: np.ndarray
    config: DesignConfig = field(repr=False)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def d_w(self) -> int:
        return 1 if self.w.ndim == 1 else self.w.shape[1]


def design1_cov(xi: float) -> np.ndarray:
    return np.array([[1.0, xi, 0.3], [xi, 1.0, 0.0], [0.3, 0.0, 1.0]])


def multivariate_cov(xi: float) -> np.ndarray:
    return np.array(
        [
            [1.0, xi, 0.4, 0.3],
            [xi, 1.0, 0.0, 0.0],
            [0.4, 0.0, 1.0, 0.0],
            [0.3, 0.0, 0.0, 1.0],
        ]
    )


def gen_design1(cfg: DesignConfig) -> Dataset:
    if cfg.design != "I":
        raise InputError(f"gen_design1 needs design 'I', got {cfg.design!r}")
    draws = mvn_sample(CovarianceSpec(design1_cov(cfg.xi)), cfg.rng, cfg.n)
    x_star, w_star, u = draws[:, 0], draws[:, 1], draws[:, 2]
    x = std_normal_cdf(x_star)
    w = std_normal_cdf(w_star)
    y = eval_h(cfg.h_spec, x) + u
    return Dataset(y=y, x=x, w=w, config=cfg)


def gen_design2(cfg: DesignConfig) -> Dataset:
    if cfg.design != "II":
        raise InputError(f"gen_design2 needs design 'II', got {cfg.design!r}")
    gen = cfg.rng.generator()
    z = gen.standard_normal((cfg.n, 3))
    w_star, eps, nu = z[:, 0], z[:, 1], z[:, 2]
    w = std_normal_cdf(w_star)
    x = std_normal_cdf(cfg.xi * w_star + math.sqrt(1.0 - cfg.xi**2) * eps)
    u = (0.3 * eps + math.sqrt(1.0 - 0.09) * nu) / 2.0
    y = eval_h(cfg.h_spec, x) + u
    return Dataset(y=y, x=x, w=w, config=cfg)


def gen_multivariate(cfg: DesignConfig) -> Dataset:
    if cfg.design != "multivariate":
        raise InputError(f"gen_multivariate needs design 'multivariate', got {cfg.design!r}")
    draws = mvn_sample(CovarianceSpec(multivariate_cov(cfg.xi)), cfg.rng, cfg.n)
    x = std_normal_cdf(draws[:, 0])
    w = std_normal_cdf(draws[:, 1:3])
    y = eval_h(cfg.h_spec, x) + draws[:, 3]
    return Dataset(y=y, x=x, w=w, config=cfg)


def generate(cfg: DesignConfig) -> Dataset:
    if cfg.design == "I":
        return gen_design1(cfg)
    if cfg.design == "II":
        return gen_design2(cfg)
    return gen_multivariate(cfg)


def null_boundary(h_family: str, c_b: float = 0.0, grid_points: int = 20001) -> float:
    """Largest c_A (c_0-free families) keeping the family inside its shape null.

    'sin' with the weakly-decreasing null: c_A* = 0.2 / max_x d/dx (x^2 + c_b sin(2 pi x));
    'design2' with the weakly-increasing null: smallest c_A whose derivative dips below 0;
    'quad' with the linearity null: 0.
    """
    xs = np.linspace(0.0, 1.0, grid_points)
    if h_family == "sin":
        slope = 2.0 * xs + 2.0 * np.pi * c_b * np.cos(2.0 * np.pi * xs)
        peak = float(np.max(slope))
        if peak <= 0:
            raise InputError("sine perturbation never increases; no boundary")
        return 0.2 / peak
    if h_family == "design2":
        # h' = 0.2 + 2x + 2 pi c_a cos(2 pi x) >= 0; binding where cos < 0
        base = 0.2 + 2.0 * xs
        trig = 2.0 * np.pi * np.cos(2.0 * np.pi * xs)
        neg = trig < 0
        if not np.any(neg):
            raise InputError("no binding region for design2 boundary")
        return float(np.min(-base[neg] / trig[neg]))
    if h_family == "quad":
        return 0.0
    raise InputError(f"no null boundary defined for family {h_family!r}")
