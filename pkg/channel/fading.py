import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from channel.params import SystemParams
from numerics.quadrature import gauss_legendre, quad

DEFAULT_NODES = 64


def large_scale_fading(d, alpha: float, d0: float):
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("Distance must be positive")
    result = np.minimum(d**-alpha, d0**-alpha)
    return float(result) if result.ndim == 0 else result


def distance_pdf(d, radius: float):
    d = np.asarray(d, dtype=float)
    x = np.clip(d / (2 * radius), 0.0, 1.0)
    inside = (d > 0) & (d < 2 * radius)
    value = 4 * d / (math.pi * radius**2) * (np.arccos(x) - x * np.sqrt(1 - x**2))
    result = np.where(inside, value, 0.0)
    return float(result) if result.ndim == 0 else result


def distance_cdf(d, radius: float):
    t = np.clip(np.asarray(d, dtype=float) / radius, 0.0, 2.0)
    result = (
        1
        + 2 / math.pi * (t**2 - 1) * np.arccos(t / 2)
        - t / math.pi * (1 + t**2 / 2) * np.sqrt(1 - t**2 / 4)
    )
    result = np.clip(result, 0.0, 1.0)
    return float(result) if result.ndim == 0 else result


def sample_disc(rng: np.random.Generator, count: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(count))
    phi = 2 * math.pi * rng.random(count)
    return np.column_stack((r * np.cos(phi), r * np.sin(phi)))


@dataclass(frozen=True)
class BetaDistribution:
    """Law of beta as quadrature atoms on the continuous part plus the point
    mass at beta_max. Expectations are weighted sums over the atoms."""

    nodes: np.ndarray
    weights: np.ndarray
    beta_max: float
    point_mass: float
    radius: float = math.inf
    pathloss_exp: float = 1.0
    atoms: np.ndarray = field(init=False, repr=False)
    probabilities: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "atoms", np.append(self.nodes, self.beta_max))
        object.__setattr__(
            self, "probabilities", np.append(self.weights, self.point_mass)
        )

    @classmethod
    def point(cls, beta: float) -> "BetaDistribution":
        return cls(np.empty(0), np.empty(0), float(beta), 1.0)

    @property
    def beta_min(self) -> float:
        if len(self.nodes) == 0:
            return self.beta_max
        return (2 * self.radius) ** -self.pathloss_exp

    @property
    def total_mass(self) -> float:
        return float(self.probabilities.sum())

    def expect(self, fn: Callable, vectorized: bool = True) -> float:
        if vectorized:
            values = np.asarray(fn(self.atoms), dtype=float)
        else:
            values = np.array([fn(float(b)) for b in self.atoms])
        return float(self.probabilities @ values)

    def mean(self) -> float:
        return self.expect(lambda b: b)

    def density(self, beta):
        """Density of the continuous part, zero outside (beta_min, beta_max)."""
        beta = np.asarray(beta, dtype=float)
        if len(self.nodes) == 0:
            return np.zeros_like(beta)
        inside = (beta > self.beta_min) & (beta < self.beta_max)
        safe = np.where(inside, beta, self.beta_max)
        d = safe ** (-1 / self.pathloss_exp)
        jacobian = d / (self.pathloss_exp * safe)
        return np.where(inside, distance_pdf(d, self.radius) * jacobian, 0.0)

    def cdf(self, beta):
        beta = np.asarray(beta, dtype=float)
        if len(self.nodes) == 0:
            return np.where(beta >= self.beta_max, 1.0, 0.0)
        safe = np.clip(beta, self.beta_min, self.beta_max)
        below_atom = 1.0 - distance_cdf(safe ** (-1 / self.pathloss_exp), self.radius)
        below_atom = np.where(beta < self.beta_min, 0.0, below_atom)
        return np.where(beta >= self.beta_max, 1.0, below_atom)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if len(self.nodes) == 0:
            return np.full(size, self.beta_max)
        d = np.linalg.norm(
            sample_disc(rng, size, self.radius) - sample_disc(rng, size, self.radius),
            axis=1,
        )
        d = np.maximum(d, np.finfo(float).tiny)
        return np.minimum(d**-self.pathloss_exp, self.beta_max)


@lru_cache(maxsize=32)
def _tabulate(radius: float, alpha: float, d0: float, nodes: int) -> BetaDistribution:
    span = 2 * radius - d0
    # d = 2R - span s^2 flattens the (2R - d)^(3/2) edge of the density
    s, w = gauss_legendre(nodes, 0.0, 1.0)
    d = 2 * radius - span * s**2
    weights = w * distance_pdf(d, radius) * 2 * span * s
    point_mass = quad(lambda x: distance_pdf(x, radius), 0.0, d0, tol=1e-12)
    return BetaDistribution(
        nodes=d**-alpha,
        weights=weights,
        beta_max=d0**-alpha,
        point_mass=point_mass,
        radius=radius,
        pathloss_exp=alpha,
    )


def beta_pdf_numeric(params: SystemParams, nodes: int = DEFAULT_NODES) -> BetaDistribution:
    return _tabulate(
        float(params.radius), float(params.pathloss_exp), float(params.ref_dist), nodes
    )
