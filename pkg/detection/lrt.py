import math
from dataclasses import dataclass

import numpy as np

from channel.fading import BetaDistribution


def _check_prior(lam: float):
    if not 0 < lam < 1:
        raise ValueError(f"Activity probability must be in (0, 1) (got {lam})")


@dataclass
class LrtResult:
    # threshold is the beta-averaged l' when the result covers a distribution
    threshold: float
    p_false_alarm: float
    p_miss: float
    p_err: float


def lrt_threshold(sigma_sq, lam: float, beta):
    _check_prior(lam)
    sigma_sq = np.asarray(sigma_sq, dtype=float)
    beta = np.asarray(beta, dtype=float)
    result = (
        sigma_sq
        * (beta + sigma_sq)
        / beta
        * np.log((1 - lam) * (beta + sigma_sq) / (lam * sigma_sq))
    )
    return float(result) if result.ndim == 0 else result


def lrt_decide(z, sigma_sq, lam: float, beta):
    decision = (np.abs(z) ** 2 > lrt_threshold(sigma_sq, lam, beta)).astype(np.int8)
    return int(decision) if decision.ndim == 0 else decision


def lrt_error_probs(sigma_sq: float, lam: float, beta_dist: BetaDistribution) -> LrtResult:
    _check_prior(lam)

    def threshold(b):
        return lrt_threshold(sigma_sq, lam, b)

    p_false_alarm = beta_dist.expect(lambda b: np.exp(-threshold(b) / sigma_sq))
    p_miss = 1 - beta_dist.expect(lambda b: np.exp(-threshold(b) / (b + sigma_sq)))
    p_err = (1 - lam) * p_false_alarm + lam * p_miss
    return LrtResult(beta_dist.expect(threshold), p_false_alarm, p_miss, p_err)


def likelihood_ratio(z, sigma_sq: float, beta):
    """p(z | active) / p(z | inactive) on the decoupled channel."""
    u = np.abs(z) ** 2
    return sigma_sq / (beta + sigma_sq) * np.exp(u / sigma_sq - u / (beta + sigma_sq))


def lrt_decide_ratio(z, sigma_sq: float, lam: float, beta):
    return (likelihood_ratio(z, sigma_sq, beta) > (1 - lam) / lam).astype(np.int8)
