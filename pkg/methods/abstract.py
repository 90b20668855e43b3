import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from channel.fading import BetaDistribution, beta_pdf_numeric
from channel.params import SystemParams
from channel.scene import NetworkScene, generate_scene, synthesize_received
from estimation.cbamp import AmpTrace, amp_iterate
from estimation.decoupling import EffectiveNoise, solve_property1, solve_state_evolution
from estimation.mmv import MmvTrace, mmv_amp

logger = logging.getLogger(__name__)


@dataclass
class Setting:
    """One point of a sweep. Theory quantities are solved once and shared by
    every trial at this point."""

    params: SystemParams
    sweep_value: float
    max_iters: int = 200
    stop_tol: float = 1e-6
    _beta_dist: Optional[BetaDistribution] = field(default=None, repr=False)
    _effective_noise: Optional[EffectiveNoise] = field(default=None, repr=False)
    _property1_noise: Optional[EffectiveNoise] = field(default=None, repr=False)

    @property
    def beta_dist(self) -> BetaDistribution:
        if self._beta_dist is None:
            self._beta_dist = beta_pdf_numeric(self.params)
        return self._beta_dist

    @property
    def effective_noise(self) -> EffectiveNoise:
        if self._effective_noise is None:
            p = self.params
            self._effective_noise = solve_state_evolution(
                p.activity_prob, p.gamma, p.noise_var, self.beta_dist
            )
            logger.info(
                "Effective noise at %g: %.6g (%d iterations)",
                self.sweep_value,
                self._effective_noise.sigma_eff_sq,
                self._effective_noise.iters,
            )
        return self._effective_noise

    @property
    def property1_noise(self) -> EffectiveNoise:
        if self._property1_noise is None:
            p = self.params
            self._property1_noise = solve_property1(
                p.activity_prob, p.gamma, p.noise_var, self.beta_dist
            )
        return self._property1_noise


@dataclass
class Trial:
    """One Monte Carlo scene at a setting. AMP runs are cached so every
    method evaluated on the trial sees the same estimates."""

    setting: Setting
    index: int
    seed: int = 0
    _scene: Optional[NetworkScene] = field(default=None, repr=False)
    _amp: Optional[List[AmpTrace]] = field(default=None, repr=False)
    _mmv: Optional[MmvTrace] = field(default=None, repr=False)
    _read: set = field(default_factory=set, repr=False)

    SCENE_STREAM = 0
    DECOUPLED_STREAM = 1

    def rng(self, stream: int) -> np.random.Generator:
        # One stream per consumer: the scene, then decoupled-channel samples
        return np.random.default_rng(
            np.random.SeedSequence([self.seed, self.index, stream])
        )

    @property
    def scene(self) -> NetworkScene:
        if self._scene is None:
            if self.index < 0:
                raise RuntimeError("Theoretical evaluations have no scene")
            self._scene = generate_scene(self.setting.params, self.rng(self.SCENE_STREAM))
        return self._scene

    @property
    def amp_traces(self) -> List[AmpTrace]:
        self._read.add("amp")
        if self._amp is None:
            scene, setting = self.scene, self.setting
            self._amp = [
                amp_iterate(
                    synthesize_received(scene, j),
                    scene.pilot,
                    scene.beta[j],
                    setting.params.activity_prob,
                    setting.params.noise_var,
                    setting.max_iters,
                    setting.stop_tol,
                )
                for j in range(scene.beta.shape[0])
            ]
        return self._amp

    @property
    def mmv_trace(self) -> MmvTrace:
        self._read.add("mmv")
        if self._mmv is None:
            scene, setting = self.scene, self.setting
            self._mmv = mmv_amp(
                scene.received_all(),
                scene.pilot,
                scene.beta,
                setting.params.activity_prob,
                setting.params.noise_var,
                setting.max_iters,
                setting.stop_tol,
            )
        return self._mmv

    def take_stalled(self) -> int:
        """Number of AMP runs read since the last call that stopped at the
        iteration limit."""
        read, self._read = self._read, set()
        stalled = 0
        if "amp" in read and self._amp is not None:
            stalled += sum(not trace.converged for trace in self._amp)
        if "mmv" in read and self._mmv is not None:
            stalled += int(not self._mmv.converged)
        return stalled

    def decoupled_outputs(self):
        """N x M decoupled observations and their noise levels from CB-AMP."""
        finals = [trace.final for trace in self.amp_traces]
        z = np.column_stack([state.r_hat for state in finals])
        tau = np.column_stack([state.tau for state in finals])
        return z, tau


class EvaluationMethod(ABC):
    name = "Abstract method"
    description = "This method cannot be used directly"
    metric = "mse"
    theoretical = False
    requires_theory = False

    @abstractmethod
    def execute(self, trial: Trial) -> float:
        pass
