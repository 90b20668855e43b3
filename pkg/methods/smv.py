import numpy as np

from estimation.cbamp import empirical_mse
from estimation.decoupling import theory_mse
from methods.abstract import EvaluationMethod, Trial


class SmvTheoryMethod(EvaluationMethod):
    name = "SmvTheory"
    description = "Decoupled-channel MSE at the state-evolution noise level."
    theoretical = True
    requires_theory = True

    def execute(self, trial: Trial) -> float:
        setting = trial.setting
        return theory_mse(
            setting.effective_noise.sigma_eff_sq,
            setting.params.activity_prob,
            setting.beta_dist,
        )


class SmvProperty1Method(EvaluationMethod):
    name = "SmvProperty1"
    description = "Decoupled-channel MSE at the noise level of the coupled true/postulated equations."
    theoretical = True

    def execute(self, trial: Trial) -> float:
        setting = trial.setting
        return theory_mse(
            setting.property1_noise.sigma_eff_sq,
            setting.params.activity_prob,
            setting.beta_dist,
        )


class SmvCbampMethod(EvaluationMethod):
    name = "SmvCbamp"
    description = """CB-AMP run separately at every AP.
    Reports the empirical MSE of the effective channel averaged over APs."""

    def execute(self, trial: Trial) -> float:
        theta = trial.scene.effective_channel()
        return float(
            np.mean(
                [
                    empirical_mse(theta[j], trace.final.theta_hat)
                    for j, trace in enumerate(trial.amp_traces)
                ]
            )
        )
