import numpy as np

from channel.scene import synthesize_received
from estimation.oracle import oracle_estimate, oracle_mse_asymptotic
from methods.abstract import EvaluationMethod, Trial


class OracleExactMethod(EvaluationMethod):
    name = "OracleExact"
    description = """Known-support MMSE estimate at every AP.
    Reports the exact finite-size MSE averaged over APs."""

    def execute(self, trial: Trial) -> float:
        scene = trial.scene
        noise_var = scene.params.noise_var
        mse = [
            oracle_estimate(
                synthesize_received(scene, j), scene.pilot, scene.beta[j], scene.support, noise_var
            ).mse
            for j in range(scene.beta.shape[0])
        ]
        return float(np.mean(mse))


class OracleAsymMethod(EvaluationMethod):
    name = "OracleAsym"
    description = "Large-system oracle MSE from the random-matrix fixed point."
    theoretical = True

    def execute(self, trial: Trial) -> float:
        p = trial.setting.params
        return oracle_mse_asymptotic(
            p.activity_prob, p.gamma, p.noise_var, trial.setting.beta_dist
        )
