import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from channel.fading import BetaDistribution
from shared.errors import NoRootError, SingularSystemError

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12
BRACKET_EPS = 1e-12
MAX_BRACKET_STEPS = 200


@dataclass
class OracleResult:
    theta_hat: np.ndarray
    mse: float
    support_size: int


def _normalized_system(pilot_support: np.ndarray, beta_support: np.ndarray, noise_var: float):
    # D Phi^H Phi D + sigma^2 I with D = diag(sqrt(beta)) over the support
    scale = np.sqrt(np.asarray(beta_support, dtype=float))
    scaled = pilot_support * scale[np.newaxis, :]
    system = scaled.conj().T @ scaled + noise_var * np.eye(len(scale))
    condition = np.linalg.cond(system)
    if not math.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularSystemError(condition)
    return scale, scaled, linalg.cho_factor(system)


def oracle_mse_exact(
    pilot_support: np.ndarray, beta_support: np.ndarray, noise_var: float, num_users: int
) -> float:
    if pilot_support.shape[1] == 0:
        return 0.0
    scale, _, factor = _normalized_system(pilot_support, beta_support, noise_var)
    inverse_diag = np.real(np.diag(linalg.cho_solve(factor, np.eye(len(scale)))))
    return float(noise_var * np.sum(scale**2 * inverse_diag) / num_users)


def oracle_estimate(
    y: np.ndarray,
    pilot: np.ndarray,
    beta_col: np.ndarray,
    support: np.ndarray,
    noise_var: float,
) -> OracleResult:
    N = pilot.shape[1]
    theta_hat = np.zeros(N, dtype=complex)
    support = np.asarray(support, dtype=int)
    if len(support) == 0:
        return OracleResult(theta_hat, 0.0, 0)

    pilot_support = pilot[:, support]
    beta_support = np.asarray(beta_col, dtype=float)[support]
    if np.any(beta_support <= 0):
        raise ValueError("Large-scale coefficients on the support must be positive")

    scale, scaled, factor = _normalized_system(pilot_support, beta_support, noise_var)
    theta_hat[support] = scale * linalg.cho_solve(factor, scaled.conj().T @ y)
    inverse_diag = np.real(np.diag(linalg.cho_solve(factor, np.eye(len(support)))))
    mse = float(noise_var * np.sum(beta_support * inverse_diag) / N)
    return OracleResult(theta_hat, mse, len(support))


def oracle_fixed_point(
    lam: float, gamma: float, noise_var: float, beta_dist: BetaDistribution
) -> float:
    """Root of E{beta / (beta + s)} = (s - noise_var) / (lam gamma s) above noise_var."""
    load = lam * gamma
    if not load > 0:
        raise ValueError(f"lam * gamma must be > 0 (got {load})")

    def gap(s):
        return beta_dist.expect(lambda b: b / (b + s)) - (s - noise_var) / (load * s)

    low = noise_var * (1 + BRACKET_EPS)
    if gap(low) <= 0:
        raise NoRootError(
            f"No oracle fixed point above noise_var={noise_var:g} for lam*gamma={load:g}"
        )

    high = 2 * noise_var
    for _ in range(MAX_BRACKET_STEPS):
        if gap(high) < 0:
            break
        high *= 2
    else:
        raise NoRootError(f"Could not bracket the oracle fixed point (last {high:g})")

    root = optimize.brentq(gap, low, high, xtol=1e-14 * noise_var, rtol=1e-14)
    logger.debug("Oracle fixed point %.10g in [%g, %g]", root, low, high)
    return root


def oracle_point_mass_root(lam: float, gamma: float, noise_var: float, beta: float) -> float:
    load = lam * gamma
    linear = beta - noise_var - load * beta
    return (-linear + math.sqrt(linear**2 + 4 * noise_var * beta)) / 2


def oracle_mse_asymptotic(
    lam: float, gamma: float, noise_var: float, beta_dist: BetaDistribution
) -> float:
    root = oracle_fixed_point(lam, gamma, noise_var, beta_dist)
    return (root - noise_var) / gamma
