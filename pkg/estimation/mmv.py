import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from detection.centralized import activity_probability, centralized_mmse
from estimation.cbamp import (
    DEFAULT_MAX_ITERS,
    DEFAULT_STOP_TOL,
    AmpState,
    empirical_mse,
    gated_variance,
    run_message_passing,
)

logger = logging.getLogger(__name__)


@dataclass
class MmvState:
    theta_hat: np.ndarray
    residual: np.ndarray
    tau: np.ndarray
    r_hat: np.ndarray
    kappa_hat: np.ndarray
    iter: int

    @property
    def noise_level(self) -> float:
        return float(np.mean(self.tau))


@dataclass
class MmvTrace:
    states: List[MmvState] = field(default_factory=list)
    converged: bool = False

    @property
    def final(self) -> MmvState:
        return self.states[-1]

    def mse_history(self, theta_true) -> List[float]:
        """theta_true is N x M, matching the estimate layout."""
        return [empirical_mse(theta_true, state.theta_hat) for state in self.states]


def mmv_denoise_row(z_row, beta_row, lam: float, tau):
    if np.any(np.asarray(tau) <= 0):
        raise ValueError("tau must be > 0")
    return centralized_mmse(z_row, beta_row, tau, lam)


def mmv_amp(
    Y: np.ndarray,
    pilot: np.ndarray,
    beta: np.ndarray,
    lam: float,
    noise_var: float,
    max_iters: int = DEFAULT_MAX_ITERS,
    stop_tol: float = DEFAULT_STOP_TOL,
) -> MmvTrace:
    """Y is L x M and beta is M x N; estimates come back as N x M."""
    B = np.asarray(beta, dtype=float).T
    if Y.shape[1] != B.shape[1]:
        raise ValueError(f"Y has {Y.shape[1]} APs but beta has {B.shape[1]}")

    def denoiser(r_hat, tau):
        g = activity_probability(r_hat, B, tau, lam)[:, np.newaxis]
        return mmv_denoise_row(r_hat, B, lam, tau), gated_variance(r_hat, B, tau, g)

    states, converged = run_message_passing(
        Y, pilot, lam * B, denoiser, noise_var, max_iters, stop_tol
    )
    return MmvTrace([_to_mmv(Y, s) for s in states], converged)


def _to_mmv(Y: np.ndarray, state: AmpState) -> MmvState:
    return MmvState(
        theta_hat=state.theta_hat,
        residual=Y - state.p,
        tau=state.tau,
        r_hat=state.r_hat,
        kappa_hat=state.kappa_hat,
        iter=state.iter,
    )
