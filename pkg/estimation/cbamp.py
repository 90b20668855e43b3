import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np
from scipy.special import expit

from shared.errors import AmpDivergenceError

logger = logging.getLogger(__name__)

EXPONENT_CLAMP = 700.0
DEFAULT_MAX_ITERS = 200
DEFAULT_STOP_TOL = 1e-6


@dataclass
class DenoiserParams:
    lam: float
    beta: float
    xi: float

    def __post_init__(self):
        if not 0 <= self.lam <= 1:
            raise ValueError(f"lam must be in [0, 1] (got {self.lam})")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0 (got {self.beta})")
        if not self.xi > 0:
            raise ValueError(f"xi must be > 0 (got {self.xi})")


def gated_probability(logit, lam):
    """expit of a clamped logit, pinned to 0 and 1 at the prior extremes."""
    lam = np.asarray(lam, dtype=float)
    safe = np.clip(lam, 1e-300, 1 - 1e-16)
    prior_logit = np.log(safe) - np.log1p(-safe)
    g = expit(np.clip(logit + prior_logit, -EXPONENT_CLAMP, EXPONENT_CLAMP))
    return np.where(lam <= 0, 0.0, np.where(lam >= 1, 1.0, g))


def activity_posterior(r_hat, lam, beta, xi):
    """Posterior probability that the user is active given r_hat = theta + noise(xi)."""
    u = np.abs(r_hat) ** 2
    logit = beta * u / (xi * (beta + xi)) + np.log(xi) - np.log(beta + xi)
    return gated_probability(logit, lam)


def gated_mean(r_hat, beta, xi, g):
    return g * beta / (beta + xi) * r_hat


def gated_variance(r_hat, beta, xi, g):
    u = np.abs(r_hat) ** 2
    scale = (beta + xi) ** 2
    return beta * g * ((beta * (xi + u) + xi**2) / scale - g * beta * u / scale)


def posterior_mean(r_hat, lam, beta, xi):
    return gated_mean(r_hat, beta, xi, activity_posterior(r_hat, lam, beta, xi))


def posterior_var(r_hat, lam, beta, xi):
    return gated_variance(r_hat, beta, xi, activity_posterior(r_hat, lam, beta, xi))


def denoise_mean(r_hat: complex, dp: DenoiserParams) -> complex:
    return complex(posterior_mean(r_hat, dp.lam, dp.beta, dp.xi))


def denoise_var(r_hat: complex, dp: DenoiserParams) -> float:
    return float(posterior_var(r_hat, dp.lam, dp.beta, dp.xi))


def empirical_mse(theta_true, theta_hat) -> float:
    theta_true = np.asarray(theta_true)
    theta_hat = np.asarray(theta_hat)
    if theta_true.shape != theta_hat.shape:
        raise ValueError(
            f"Shape mismatch: {theta_true.shape} vs {theta_hat.shape}"
        )
    return float(np.mean(np.abs(theta_true - theta_hat) ** 2))


@dataclass
class AmpState:
    theta_hat: np.ndarray
    kappa_hat: np.ndarray
    z: np.ndarray
    p: np.ndarray
    r_hat: np.ndarray
    tau: np.ndarray
    iter: int

    @property
    def noise_level(self) -> float:
        return float(np.mean(self.tau))

    def predicted_mse(self, noise_var: float, gamma: float) -> float:
        # State evolution: tau = noise_var + gamma * MSE
        return max(self.noise_level - noise_var, 0.0) / gamma


@dataclass
class AmpTrace:
    states: List[AmpState] = field(default_factory=list)
    converged: bool = False

    @property
    def final(self) -> AmpState:
        return self.states[-1]

    @property
    def iterations(self) -> int:
        return len(self.states)

    def mse_history(self, theta_true) -> List[float]:
        return [empirical_mse(theta_true, state.theta_hat) for state in self.states]

    def to_csv(self, path: Path, theta_true=None) -> None:
        with open(path, "w", newline="") as output:
            writer = csv.writer(output)
            writer.writerow(["iter", "mean_tau", "empirical_mse"])
            for state in self.states:
                mse = "" if theta_true is None else repr(empirical_mse(theta_true, state.theta_hat))
                writer.writerow([state.iter, repr(state.noise_level), mse])


Denoiser = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]


def run_message_passing(
    y: np.ndarray,
    pilot: np.ndarray,
    kappa_init: np.ndarray,
    denoiser: Denoiser,
    noise_var: float,
    max_iters: int = DEFAULT_MAX_ITERS,
    stop_tol: float = DEFAULT_STOP_TOL,
) -> Tuple[List[AmpState], bool]:
    """Run the AMP recursion column by column on y (L x M).

    The denoiser maps (r_hat, tau), both N x M, to the posterior mean and
    variance. States carry N x M and L x M blocks.
    """
    if noise_var <= 0:
        raise ValueError(f"noise_var must be > 0 (got {noise_var})")
    L, N = pilot.shape
    if y.shape[0] != L or kappa_init.shape[0] != N:
        raise ValueError(
            f"Inconsistent dimensions: y {y.shape}, pilot {pilot.shape}, prior {kappa_init.shape}"
        )

    pilot_energy = np.abs(pilot) ** 2
    pilot_h = pilot.conj().T

    theta_hat = np.zeros(kappa_init.shape, dtype=complex)
    kappa_hat = kappa_init.astype(float)
    z_prev = np.ones(y.shape)
    p_prev = y.copy()

    states = []
    for iteration in range(1, max_iters + 1):
        z = pilot_energy @ kappa_hat
        p = pilot @ theta_hat - z / (noise_var + z_prev) * (y - p_prev)
        tau = 1.0 / (pilot_energy.T @ (1.0 / (noise_var + z)))
        r_hat = theta_hat + tau * (pilot_h @ ((y - p) / (noise_var + z)))

        theta_next, kappa_next = denoiser(r_hat, tau)
        if not (np.all(np.isfinite(theta_next)) and np.all(np.isfinite(kappa_next))):
            raise AmpDivergenceError(iteration)

        states.append(AmpState(theta_next, kappa_next, z, p, r_hat, tau, iteration))

        change = np.linalg.norm(theta_next - theta_hat)
        scale = np.linalg.norm(theta_next)
        theta_hat, kappa_hat = theta_next, kappa_next
        z_prev, p_prev = z, p
        if change <= stop_tol * scale:
            logger.debug("AMP converged after %d iterations", iteration)
            return states, True

    logger.debug("AMP stopped at the iteration limit (%d)", max_iters)
    return states, False


def amp_iterate(
    y: np.ndarray,
    pilot: np.ndarray,
    beta_col: np.ndarray,
    lam: float,
    noise_var: float,
    max_iters: int = DEFAULT_MAX_ITERS,
    stop_tol: float = DEFAULT_STOP_TOL,
) -> AmpTrace:
    beta = np.asarray(beta_col, dtype=float)[:, np.newaxis]

    def denoiser(r_hat, tau):
        g = activity_posterior(r_hat, lam, beta, tau)
        return gated_mean(r_hat, beta, tau, g), gated_variance(r_hat, beta, tau, g)

    states, converged = run_message_passing(
        np.asarray(y)[:, np.newaxis],
        pilot,
        lam * beta,
        denoiser,
        noise_var,
        max_iters,
        stop_tol,
    )
    columns = [
        AmpState(
            theta_hat=s.theta_hat[:, 0],
            kappa_hat=s.kappa_hat[:, 0],
            z=s.z[:, 0],
            p=s.p[:, 0],
            r_hat=s.r_hat[:, 0],
            tau=s.tau[:, 0],
            iter=s.iter,
        )
        for s in states
    ]
    return AmpTrace(columns, converged)
