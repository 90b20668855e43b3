from dataclasses import dataclass

import numpy as np

from estimation.cbamp import gated_probability


@dataclass
class CentralizedStats:
    varsigma: float
    kappa: float
    decision: int


def row_statistics(z, beta, sigma_sq):
    """Average energy statistic and threshold over the last axis (APs)."""
    z = np.asarray(z)
    beta = np.asarray(beta, dtype=float)
    sigma_sq = np.broadcast_to(np.asarray(sigma_sq, dtype=float), beta.shape)
    if z.shape != beta.shape:
        raise ValueError(f"Shape mismatch: z {z.shape} vs beta {beta.shape}")

    energy = np.abs(z) ** 2 * beta / ((beta + sigma_sq) * sigma_sq)
    varsigma = energy.mean(axis=-1)
    kappa = (np.log(beta + sigma_sq) - np.log(sigma_sq)).mean(axis=-1)
    return varsigma, kappa


def centralized_stats(z_i, beta_i, sigma_sq) -> CentralizedStats:
    z_i = np.atleast_1d(z_i)
    if z_i.ndim != 1 or len(z_i) < 1:
        raise ValueError("Expected one observation per AP")
    varsigma, kappa = row_statistics(z_i, np.atleast_1d(beta_i), sigma_sq)
    return CentralizedStats(float(varsigma), float(kappa), int(varsigma > kappa))


def centralized_decide_all(Z, B, sigma_sq) -> np.ndarray:
    varsigma, kappa = row_statistics(Z, B, sigma_sq)
    return (varsigma > kappa).astype(np.int8)


def activity_probability(z, beta, sigma_sq, lam):
    varsigma, kappa = row_statistics(z, beta, sigma_sq)
    M = np.shape(z)[-1]
    return gated_probability(M * (varsigma - kappa), lam)


def centralized_mmse(z_i, beta_i, sigma_sq, lam: float):
    z_i = np.asarray(z_i)
    beta_i = np.asarray(beta_i, dtype=float)
    g = activity_probability(z_i, beta_i, sigma_sq, lam)
    return np.expand_dims(g, -1) * beta_i / (beta_i + sigma_sq) * z_i
