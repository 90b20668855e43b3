from estimation.cbamp import empirical_mse
from methods.abstract import EvaluationMethod, Trial


class MmvAmpMethod(EvaluationMethod):
    name = "MmvAmp"
    description = "Joint AMP over all APs with the row-coupled denoiser."

    def execute(self, trial: Trial) -> float:
        theta = trial.scene.effective_channel().T
        return empirical_mse(theta, trial.mmv_trace.final.theta_hat)
