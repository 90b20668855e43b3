import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from channel.fading import large_scale_fading, sample_disc
from channel.params import SystemParams

logger = logging.getLogger(__name__)

MIN_DISTANCE = 0.1


@dataclass
class NetworkScene:
    params: SystemParams
    ap_positions: np.ndarray
    user_positions: np.ndarray
    beta: np.ndarray
    activity: np.ndarray
    small_scale: np.ndarray
    pilot: np.ndarray
    noise: np.ndarray

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.activity)

    def effective_channel(self) -> np.ndarray:
        """M x N matrix of a_i sqrt(beta_ij) h_ij."""
        return self.activity[np.newaxis, :] * np.sqrt(self.beta) * self.small_scale

    def received_all(self) -> np.ndarray:
        """L x M matrix of received pilot signals, one column per AP."""
        return self.pilot @ self.effective_channel().T + self.noise


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    scale = math.sqrt(variance / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_activity(rng: np.random.Generator, count: int, lam: float) -> np.ndarray:
    if not 0 <= lam <= 1:
        raise ValueError(f"Activity probability must be in [0, 1] (got {lam})")
    return (rng.random(count) < lam).astype(np.int8)


def _distances(ap_positions: np.ndarray, user_positions: np.ndarray) -> np.ndarray:
    delta = ap_positions[:, np.newaxis, :] - user_positions[np.newaxis, :, :]
    return np.linalg.norm(delta, axis=2)


def generate_scene(
    params: SystemParams, rng: np.random.Generator = None, lam: float = None
) -> NetworkScene:
    rng = rng if rng is not None else np.random.default_rng(params.seed)
    lam = params.activity_prob if lam is None else lam
    M, N, L = params.num_aps, params.num_users, params.num_pilots

    ap_positions = sample_disc(rng, M, params.radius)
    user_positions = sample_disc(rng, N, params.radius)
    distances = _distances(ap_positions, user_positions)

    # Redraw users that sit on top of an AP
    while True:
        close = np.flatnonzero((distances < MIN_DISTANCE).any(axis=0))
        if len(close) == 0:
            break
        logger.debug("Resampling %d users closer than %g m to an AP", len(close), MIN_DISTANCE)
        user_positions[close] = sample_disc(rng, len(close), params.radius)
        distances[:, close] = _distances(ap_positions, user_positions[close])

    beta = large_scale_fading(distances, params.pathloss_exp, params.ref_dist)
    activity = sample_activity(rng, N, lam)
    small_scale = complex_normal(rng, (M, N))
    pilot = complex_normal(rng, (L, N), 1.0 / L)
    noise = complex_normal(rng, (L, M), params.noise_var)

    return NetworkScene(
        params=params,
        ap_positions=ap_positions,
        user_positions=user_positions,
        beta=np.atleast_2d(beta),
        activity=activity,
        small_scale=small_scale,
        pilot=pilot,
        noise=noise,
    )


def synthesize_received(scene: NetworkScene, ap_index: int) -> np.ndarray:
    M = scene.beta.shape[0]
    if not 0 <= ap_index < M:
        raise IndexError(f"AP index {ap_index} out of range [0, {M})")
    theta = (
        scene.activity
        * np.sqrt(scene.beta[ap_index])
        * scene.small_scale[ap_index]
    )
    return scene.pilot @ theta + scene.noise[:, ap_index]


def save_scene(scene: NetworkScene, path: Path) -> None:
    np.savez_compressed(
        path,
        params=np.array(json.dumps(asdict(scene.params))),
        ap_positions=scene.ap_positions,
        user_positions=scene.user_positions,
        beta=scene.beta,
        activity=scene.activity,
        small_scale=scene.small_scale,
        pilot=scene.pilot,
        noise=scene.noise,
    )


def load_scene(path: Path) -> NetworkScene:
    with np.load(path) as data:
        params = SystemParams(**json.loads(str(data["params"])))
        arrays = {
            key: data[key]
            for key in data.files
            if key != "params"
        }
    return NetworkScene(params=params, **arrays)
