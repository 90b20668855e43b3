"""System parameters, path loss, the law of beta and scene generation."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from channel.fading import (
    BetaDistribution,
    beta_pdf_numeric,
    distance_cdf,
    distance_pdf,
    large_scale_fading,
    sample_disc,
)
from channel.params import SystemParams, noise_var_from_snr, snr_from_noise_var
from channel.scene import (
    generate_scene,
    load_scene,
    sample_activity,
    save_scene,
    synthesize_received,
)


def small_params(**changes) -> SystemParams:
    base = SystemParams(num_users=200, num_pilots=40, num_aps=3, seed=11)
    return base.with_changes(**changes)


# Parameters


def test_default_params_are_the_desk_setting():
    params = SystemParams()
    assert (params.num_users, params.num_pilots, params.num_aps) == (1000, 75, 10)
    assert params.gamma == pytest.approx(1000 / 75)
    assert params.snr_db == pytest.approx(30.0)


def test_snr_conversion():
    assert noise_var_from_snr(20.0) == pytest.approx(0.01)
    assert snr_from_noise_var(1e-5) == pytest.approx(50.0)
    assert small_params(snr_db=20).noise_var == pytest.approx(0.01)


def test_snr_against_reference_distance():
    params = small_params(snr_reference="ref_dist", snr_db=30)
    assert params.reference_power == pytest.approx(50**-2.5)
    assert params.noise_var == pytest.approx(50**-2.5 * 1e-3)
    assert params.snr_db == pytest.approx(30.0)
    assert noise_var_from_snr(30.0, params.reference_power) == pytest.approx(params.noise_var)


def test_snr_follows_the_updated_geometry():
    params = small_params(snr_reference="ref_dist", ref_dist=100.0, snr_db=20)
    assert params.noise_var == pytest.approx(100**-2.5 * 0.01)
    assert small_params(ref_dist=100.0, snr_db=20).noise_var == pytest.approx(0.01)


def test_unknown_snr_reference():
    with pytest.raises(ValueError, match="snr_reference"):
        SystemParams(snr_reference="receiver")


def test_beta_bounds():
    params = SystemParams()
    assert params.beta_max == pytest.approx(50**-2.5)
    assert params.beta_min == pytest.approx(1000**-2.5)


@pytest.mark.parametrize(
    "changes",
    [
        {"activity_prob": 0.6},
        {"activity_prob": -0.1},
        {"num_pilots": 0},
        {"ref_dist": 1000.0},
        {"noise_var": 0.0},
        {"seed": -1},
        {"seed": 2**64},
    ],
)
def test_params_validation(changes):
    with pytest.raises(ValueError):
        SystemParams(**changes)


# Path loss and distances


def test_large_scale_fading_examples():
    assert large_scale_fading(50, 2.5, 50) == pytest.approx(50**-2.5)
    assert large_scale_fading(25, 2.5, 50) == pytest.approx(50**-2.5)
    assert large_scale_fading(100, 2.5, 50) == pytest.approx(1e-5, rel=1e-12)


def test_large_scale_fading_is_vectorized():
    values = large_scale_fading(np.array([10.0, 50.0, 200.0]), 2.0, 50.0)
    np.testing.assert_allclose(values, [1 / 2500, 1 / 2500, 1 / 40000])


@pytest.mark.parametrize("d", [0.0, -3.0])
def test_large_scale_fading_rejects_non_positive_distance(d):
    with pytest.raises(ValueError):
        large_scale_fading(d, 2.5, 50)


def test_distance_pdf_support():
    assert distance_pdf(0.0, 500) == 0.0
    assert distance_pdf(1000.0, 500) == 0.0
    assert distance_pdf(-5.0, 500) == 0.0
    assert distance_pdf(400.0, 500) > 0


def test_distance_pdf_integrates_to_one():
    total, _ = integrate.quad(lambda d: distance_pdf(d, 500), 0, 1000, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("d", [10.0, 50.0, 300.0, 700.0, 999.0])
def test_distance_cdf_matches_integrated_pdf(d):
    integral, _ = integrate.quad(lambda x: distance_pdf(x, 500), 0, d, epsabs=1e-13)
    assert distance_cdf(d, 500) == pytest.approx(integral, abs=1e-9)


def test_sampled_distances_follow_the_disc_law():
    rng = np.random.default_rng(3)
    d = np.linalg.norm(sample_disc(rng, 50_000, 500) - sample_disc(rng, 50_000, 500), axis=1)
    result = stats.kstest(d, lambda x: distance_cdf(x, 500))
    assert result.pvalue > 0.01


# Law of beta


def test_beta_distribution_total_mass():
    dist = beta_pdf_numeric(SystemParams())
    assert dist.total_mass == pytest.approx(1.0, abs=1e-6)


def test_point_mass_is_the_near_distance_probability():
    params = SystemParams()
    dist = beta_pdf_numeric(params)
    assert dist.point_mass == pytest.approx(distance_cdf(params.ref_dist, params.radius), rel=1e-8)


def test_point_mass_matches_sampled_distances():
    rng = np.random.default_rng(5)
    count = 100_000
    d = np.linalg.norm(sample_disc(rng, count, 500) - sample_disc(rng, count, 500), axis=1)
    fraction = np.mean(d < 50)
    dist = beta_pdf_numeric(SystemParams())
    stderr = math.sqrt(dist.point_mass * (1 - dist.point_mass) / count)
    assert abs(fraction - dist.point_mass) < 4 * stderr


def test_point_mass_approaches_one_near_the_diameter():
    dist = beta_pdf_numeric(SystemParams(ref_dist=999.999))
    assert dist.point_mass > 1 - 1e-6


def test_density_integrates_to_continuous_mass():
    dist = beta_pdf_numeric(SystemParams())
    integral, _ = integrate.quad(
        lambda b: float(dist.density(b)),
        dist.beta_min,
        dist.beta_max,
        epsabs=0,
        epsrel=1e-10,
        limit=500,
        points=[1e-7, 1e-6, 1e-5],
    )
    assert integral == pytest.approx(1 - dist.point_mass, rel=1e-5)


def test_mean_matches_direct_integral():
    params = SystemParams()
    dist = beta_pdf_numeric(params)
    continuous, _ = integrate.quad(
        lambda d: d**-2.5 * distance_pdf(d, 500), 50, 1000, epsabs=0, epsrel=1e-11
    )
    assert dist.mean() == pytest.approx(continuous + dist.point_mass * params.beta_max, rel=1e-7)


def test_sampled_beta_follows_the_continuous_law():
    dist = beta_pdf_numeric(SystemParams())
    samples = dist.sample(np.random.default_rng(17), 100_000)
    assert samples.max() <= dist.beta_max
    assert samples.min() >= dist.beta_min
    continuous = samples[samples < dist.beta_max]
    scale = 1 - dist.point_mass
    result = stats.kstest(continuous, lambda b: dist.cdf(b) / scale)
    assert result.pvalue > 0.01


def test_point_distribution():
    dist = BetaDistribution.point(2.0)
    assert dist.total_mass == 1.0
    assert dist.mean() == 2.0
    assert dist.expect(lambda b: b**2) == 4.0
    assert dist.beta_min == dist.beta_max == 2.0
    np.testing.assert_array_equal(dist.sample(np.random.default_rng(0), 3), [2.0, 2.0, 2.0])


def test_expect_scalar_callable():
    dist = beta_pdf_numeric(SystemParams())
    assert dist.expect(math.sqrt, vectorized=False) == pytest.approx(
        dist.expect(np.sqrt), rel=1e-12
    )


def test_tabulation_is_cached():
    assert beta_pdf_numeric(SystemParams()) is beta_pdf_numeric(SystemParams(num_users=10))


# Scenes


def test_scene_shapes():
    params = small_params()
    scene = generate_scene(params)
    M, N, L = params.num_aps, params.num_users, params.num_pilots
    assert scene.beta.shape == (M, N)
    assert scene.small_scale.shape == (M, N)
    assert scene.pilot.shape == (L, N)
    assert scene.noise.shape == (L, M)
    assert scene.activity.shape == (N,)
    assert scene.received_all().shape == (L, M)


def test_scene_is_reproducible():
    first = generate_scene(small_params())
    second = generate_scene(small_params())
    np.testing.assert_array_equal(first.beta, second.beta)
    np.testing.assert_array_equal(first.pilot, second.pilot)
    np.testing.assert_array_equal(first.activity, second.activity)


def test_scene_beta_within_bounds():
    params = small_params()
    scene = generate_scene(params)
    assert scene.beta.max() <= params.beta_max
    assert scene.beta.min() >= params.beta_min


def test_activity_extremes():
    params = small_params()
    assert generate_scene(params, lam=0.0).activity.sum() == 0
    assert generate_scene(params, lam=1.0).activity.sum() == params.num_users


def test_activity_rate():
    activity = sample_activity(np.random.default_rng(1), 4000, 0.1)
    assert abs(activity.sum() - 400) < 3 * math.sqrt(4000 * 0.1 * 0.9)


def test_sample_activity_rejects_probability_above_one():
    with pytest.raises(ValueError):
        sample_activity(np.random.default_rng(0), 10, 1.5)


def test_pilot_power():
    params = small_params(num_users=500)
    scene = generate_scene(params)
    power = np.abs(scene.pilot) ** 2
    L = params.num_pilots
    stderr = (1 / L) / math.sqrt(power.size)
    assert abs(power.mean() - 1 / L) < 4 * stderr


def test_synthesize_received_silent_network_is_noise():
    scene = generate_scene(small_params(), lam=0.0)
    np.testing.assert_array_equal(synthesize_received(scene, 1), scene.noise[:, 1])


def test_synthesize_received_single_user():
    scene = generate_scene(small_params(), lam=0.0)
    scene.activity[7] = 1
    scene.noise[:] = 0
    expected = scene.pilot[:, 7] * math.sqrt(scene.beta[2, 7]) * scene.small_scale[2, 7]
    np.testing.assert_allclose(synthesize_received(scene, 2), expected)


def test_synthesize_received_matches_all_aps():
    scene = generate_scene(small_params())
    received = scene.received_all()
    for j in range(scene.params.num_aps):
        np.testing.assert_allclose(synthesize_received(scene, j), received[:, j], atol=1e-14)


@pytest.mark.parametrize("index", [-1, 3])
def test_synthesize_received_rejects_bad_index(index):
    with pytest.raises(IndexError):
        synthesize_received(generate_scene(small_params()), index)


def test_scene_round_trip(tmp_path):
    scene = generate_scene(small_params())
    path = tmp_path / "scene.npz"
    save_scene(scene, path)
    loaded = load_scene(path)
    assert loaded.params == scene.params
    np.testing.assert_array_equal(loaded.beta, scene.beta)
    np.testing.assert_array_equal(loaded.pilot, scene.pilot)
    np.testing.assert_array_equal(loaded.activity, scene.activity)
