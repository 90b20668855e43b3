"""Known-support estimator and its large-system limit."""

import math

import numpy as np
import pytest

from channel.fading import BetaDistribution, beta_pdf_numeric
from channel.params import SystemParams
from channel.scene import complex_normal, generate_scene
from estimation.decoupling import solve_state_evolution, theory_mse
from estimation.oracle import (
    oracle_estimate,
    oracle_fixed_point,
    oracle_mse_asymptotic,
    oracle_mse_exact,
    oracle_point_mass_root,
)
from shared.errors import SingularSystemError


def random_pilot(rng, num_pilots, num_users):
    return complex_normal(rng, (num_pilots, num_users), 1.0 / num_pilots)


def test_empty_support():
    rng = np.random.default_rng(0)
    pilot = random_pilot(rng, 10, 30)
    result = oracle_estimate(complex_normal(rng, 10), pilot, np.ones(30), [], 0.1)
    assert result.support_size == 0
    assert result.mse == 0.0
    np.testing.assert_array_equal(result.theta_hat, 0)
    assert oracle_mse_exact(pilot[:, []], np.empty(0), 0.1, 30) == 0.0


def test_single_user_closed_form():
    rng = np.random.default_rng(1)
    pilot = random_pilot(rng, 12, 40)
    y = complex_normal(rng, 12)
    beta, noise_var = 2.0, 0.3
    result = oracle_estimate(y, pilot, np.full(40, beta), [5], noise_var)
    phi = pilot[:, 5]
    energy = np.vdot(phi, phi).real
    expected = np.vdot(phi, y) / (energy + noise_var / beta)
    assert result.theta_hat[5] == pytest.approx(expected)
    assert result.mse == pytest.approx(1 / (energy / noise_var + 1 / beta) / 40)
    assert np.count_nonzero(result.theta_hat) == 1


def test_noiseless_recovery():
    rng = np.random.default_rng(2)
    pilot = random_pilot(rng, 40, 100)
    support = rng.choice(100, 10, replace=False)
    theta = np.zeros(100, dtype=complex)
    theta[support] = complex_normal(rng, 10)
    result = oracle_estimate(pilot @ theta, pilot, np.ones(100), support, 1e-10)
    assert np.linalg.norm(result.theta_hat - theta) < 1e-6 * np.linalg.norm(theta)


def test_exact_mse_matches_estimate():
    rng = np.random.default_rng(3)
    pilot = random_pilot(rng, 30, 80)
    beta = rng.uniform(0.5, 2.0, 80)
    support = np.array([3, 17, 40, 62])
    result = oracle_estimate(complex_normal(rng, 30), pilot, beta, support, 0.2)
    assert result.mse == pytest.approx(oracle_mse_exact(pilot[:, support], beta[support], 0.2, 80))


def test_exact_mse_against_monte_carlo():
    rng = np.random.default_rng(4)
    num_pilots, num_users, noise_var = 20, 50, 0.2
    pilot = random_pilot(rng, num_pilots, num_users)
    beta = rng.uniform(0.5, 2.0, num_users)
    support = np.array([1, 8, 22, 31, 47])
    errors = []
    for _ in range(2000):
        theta = np.zeros(num_users, dtype=complex)
        theta[support] = np.sqrt(beta[support]) * complex_normal(rng, len(support))
        y = pilot @ theta + complex_normal(rng, num_pilots, noise_var)
        estimate = oracle_estimate(y, pilot, beta, support, noise_var).theta_hat
        errors.append(np.sum(np.abs(estimate - theta) ** 2) / num_users)
    errors = np.array(errors)
    stderr = errors.std(ddof=1) / math.sqrt(len(errors))
    expected = oracle_mse_exact(pilot[:, support], beta[support], noise_var, num_users)
    assert abs(errors.mean() - expected) < 4 * stderr


def test_rejects_non_positive_beta_on_support():
    rng = np.random.default_rng(5)
    pilot = random_pilot(rng, 10, 20)
    beta = np.ones(20)
    beta[4] = 0.0
    with pytest.raises(ValueError):
        oracle_estimate(complex_normal(rng, 10), pilot, beta, [4], 0.1)


def test_duplicated_pilots_are_singular():
    rng = np.random.default_rng(6)
    pilot = random_pilot(rng, 10, 20)
    pilot[:, 3] = pilot[:, 2]
    with pytest.raises(SingularSystemError) as info:
        oracle_estimate(complex_normal(rng, 10), pilot, np.ones(20), [2, 3], 1e-20)
    assert info.value.condition > 1e12


@pytest.mark.parametrize("lam, gamma, noise_var, beta", [
    (0.05, 13.3, 1e-3, 5e-5),
    (0.1, 4.0, 0.1, 1.0),
    (0.2, 10.0, 1e-4, 2.0),
])
def test_point_mass_root_closed_form(lam, gamma, noise_var, beta):
    root = oracle_fixed_point(lam, gamma, noise_var, BetaDistribution.point(beta))
    assert root == pytest.approx(oracle_point_mass_root(lam, gamma, noise_var, beta), rel=1e-10)


def test_fixed_point_satisfies_its_equation():
    lam, gamma = 0.05, 1000 / 75
    params = SystemParams()
    dist = beta_pdf_numeric(params)
    root = oracle_fixed_point(lam, gamma, params.noise_var, dist)
    assert root > params.noise_var
    lhs = dist.expect(lambda b: b / (b + root))
    assert lhs == pytest.approx((root - params.noise_var) / (lam * gamma * root), rel=1e-9)


def test_fixed_point_rejects_empty_load():
    with pytest.raises(ValueError):
        oracle_fixed_point(0.0, 10.0, 0.1, BetaDistribution.point(1.0))


def test_asymptotic_mse_trends():
    dist = beta_pdf_numeric(SystemParams())
    by_noise = [oracle_mse_asymptotic(0.05, 10.0, s, dist) for s in (1e-3, 1e-5, 1e-7)]
    by_lam = [oracle_mse_asymptotic(l, 10.0, 1e-5, dist) for l in (0.01, 0.05, 0.1)]
    assert all(a >= b for a, b in zip(by_noise, by_noise[1:]))
    assert all(a <= b for a, b in zip(by_lam, by_lam[1:]))


@pytest.mark.parametrize("lam, gamma, noise_var", [(0.05, 2.0, 0.1), (0.1, 4.0, 0.01), (0.2, 2.0, 1.0)])
def test_oracle_bounds_message_passing(lam, gamma, noise_var):
    unit = BetaDistribution.point(1.0)
    noise = solve_state_evolution(lam, gamma, noise_var, unit)
    amp = theory_mse(noise.sigma_eff_sq, lam, unit)
    assert oracle_mse_asymptotic(lam, gamma, noise_var, unit) <= amp * (1 + 1e-9)


@pytest.mark.slow
def test_finite_network_approaches_the_limit():
    params = SystemParams(num_users=1000, num_pilots=75, num_aps=10, activity_prob=0.05)
    per_scene = []
    for seed in range(50):
        scene = generate_scene(params.with_changes(seed=seed))
        support = scene.support
        per_scene.append(np.mean([
            oracle_mse_exact(scene.pilot[:, support], scene.beta[j, support], params.noise_var, params.num_users)
            for j in range(params.num_aps)
        ]))
    per_scene = np.array(per_scene)
    expected = oracle_mse_asymptotic(
        params.activity_prob, params.gamma, params.noise_var, beta_pdf_numeric(params)
    )
    stderr = per_scene.std(ddof=1) / math.sqrt(len(per_scene))
    assert abs(per_scene.mean() - expected) < max(0.05 * expected, 4 * stderr)
