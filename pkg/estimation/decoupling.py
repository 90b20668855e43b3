import enum
import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from channel.fading import BetaDistribution
from estimation.cbamp import posterior_mean
from numerics.fixed_point import FixedPointConfig, FixedPointResult, solve_fixed_point
from numerics.quadrature import omega, omega2

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
AGREEMENT_TOL = 1e-6


class SolverMethod(enum.Enum):
    PROPERTY1 = "Property1"
    STATE_EVOLUTION = "StateEvolution"


@dataclass
class EffectiveNoise:
    sigma_eff_sq: float
    sigma_peff_sq: float
    method: SolverMethod
    residual: float = 0.0
    iters: int = 0
    ambiguous: bool = False
    alternatives: List[float] = field(default_factory=list)


def scalar_pmmse(z, lam: float, eta_p: float):
    if not eta_p > 0:
        raise ValueError(f"eta_p must be > 0 (got {eta_p})")
    return posterior_mean(z, lam, 1.0, eta_p)


def mse_matched(lam: float, eta_p: float) -> float:
    if not eta_p > 0:
        raise ValueError(f"eta_p must be > 0 (got {eta_p})")
    if lam <= 0:
        return 0.0
    a = (1 + eta_p) * (1 - lam) / (lam * eta_p)
    return lam * (1 - eta_p**2 / (1 + eta_p) * omega(a, eta_p))


def mse_mismatched(lam: float, eta_p: float, eta: float) -> float:
    """MSE of the estimator built for noise eta_p when the true noise is eta.

    The cross term integrates t e^{-bt} (1 + c e^{-dt}) / (1 + a e^{-t})^2,
    written through omega2 as 2 omega2(a, b, 0, 0) - omega2(a, b, c, d).
    """
    if not (eta_p > 0 and eta > 0):
        raise ValueError(f"eta_p and eta must be > 0 (got {eta_p}, {eta})")
    if lam <= 0:
        return 0.0
    a = (1 + eta_p) * (1 - lam) / (lam * eta_p)
    b = eta_p * (1 + eta_p) / (1 + eta)
    c = (1 + eta) * (1 - lam) / (lam * eta)
    d = b / eta
    cross = 2 * omega2(a, b, 0.0, 0.0) - omega2(a, b, c, d)
    return lam * (
        1
        - 2 * eta_p**2 * (1 + eta_p) / (1 + eta) ** 2 * omega(a, b)
        + eta_p**2 / (1 + eta) * cross
    )


def _shrinkage_integral(sigma_sq: float, lam: float, beta: float) -> float:
    # Integral over t of the f-integrand at one value of beta
    a = (1 - lam) * (beta + sigma_sq) / (lam * sigma_sq)
    return sigma_sq**2 / (beta + sigma_sq) * omega(a, sigma_sq / beta)


def theory_mse(sigma_sq: float, lam: float, beta_dist: BetaDistribution) -> float:
    if not sigma_sq > 0:
        raise ValueError(f"sigma_sq must be > 0 (got {sigma_sq})")
    if lam <= 0:
        return 0.0
    shrinkage = beta_dist.expect(
        lambda b: _shrinkage_integral(sigma_sq, lam, b), vectorized=False
    )
    return lam * (beta_dist.mean() - shrinkage)


def _scaled_mse(beta_dist, fn):
    return beta_dist.expect(lambda b: b * fn(b), vectorized=False)


def _check_inputs(lam: float, gamma: float, noise_var: float):
    if not 0 <= lam < 1:
        raise ValueError(f"lam must be in [0, 1) (got {lam})")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0 (got {gamma})")
    if not noise_var > 0:
        raise ValueError(f"noise_var must be > 0 (got {noise_var})")


def _default_config(cfg: FixedPointConfig, init: float) -> FixedPointConfig:
    if cfg is None:
        return FixedPointConfig(init=init)
    return FixedPointConfig(cfg.max_iters, cfg.rel_tol, cfg.damping, init)


def solve_state_evolution(
    lam: float,
    gamma: float,
    noise_var: float,
    beta_dist: BetaDistribution,
    cfg: FixedPointConfig = None,
) -> EffectiveNoise:
    _check_inputs(lam, gamma, noise_var)
    if lam == 0 or gamma == 0:
        return EffectiveNoise(noise_var, noise_var, SolverMethod.STATE_EVOLUTION)

    def update(sigma_sq):
        return noise_var + gamma * theory_mse(sigma_sq, lam, beta_dist)

    # Low start and the estimator-off start; disagreement means several fixed points
    starts = [noise_var, noise_var + gamma * lam * beta_dist.mean()]
    results: List[FixedPointResult] = [
        solve_fixed_point(update, _default_config(cfg, start)) for start in starts
    ]
    low, high = results
    ambiguous = abs(low.value - high.value) > AGREEMENT_TOL * max(low.value, high.value)
    if ambiguous:
        logger.warning(
            "Multiple state-evolution fixed points at lam=%g gamma=%g: %.6g and %.6g",
            lam,
            gamma,
            low.value,
            high.value,
        )

    return EffectiveNoise(
        sigma_eff_sq=low.value,
        sigma_peff_sq=low.value,
        method=SolverMethod.STATE_EVOLUTION,
        residual=low.residual / low.value,
        iters=low.iters + high.iters,
        ambiguous=ambiguous,
        alternatives=[high.value] if ambiguous else [],
    )


def solve_property1(
    lam: float,
    gamma: float,
    noise_var: float,
    beta_dist: BetaDistribution,
    cfg: FixedPointConfig = None,
) -> EffectiveNoise:
    _check_inputs(lam, gamma, noise_var)
    if lam == 0 or gamma == 0:
        return EffectiveNoise(noise_var, noise_var, SolverMethod.PROPERTY1)

    def update(pair):
        sigma_sq, sigma_p_sq = pair
        true_noise = noise_var + gamma * _scaled_mse(
            beta_dist, lambda b: mse_mismatched(lam, sigma_p_sq / b, sigma_sq / b)
        )
        postulated = noise_var + gamma * _scaled_mse(
            beta_dist, lambda b: mse_matched(lam, sigma_p_sq / b)
        )
        return np.array([true_noise, postulated])

    cfg = _default_config(cfg, noise_var)
    result = solve_fixed_point(update, cfg, x0=np.full(2, cfg.init))
    sigma_sq, sigma_p_sq = result.value
    residual = float(np.max(np.abs(result.residual)) / sigma_sq)
    if residual > RESIDUAL_TOL:
        logger.warning("Coupled noise solver residual %.3g above %.1g", residual, RESIDUAL_TOL)

    return EffectiveNoise(
        sigma_eff_sq=float(sigma_sq),
        sigma_peff_sq=float(sigma_p_sq),
        method=SolverMethod.PROPERTY1,
        residual=residual,
        iters=result.iters,
    )
