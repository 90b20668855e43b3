import numpy as np

from detection.lrt import lrt_decide, lrt_error_probs
from detection.scoring import score_decisions
from methods.abstract import EvaluationMethod, Trial


class LrtTheoryMethod(EvaluationMethod):
    name = "LrtTheory"
    description = "Single-AP likelihood ratio test, closed-form error probability."
    metric = "p_err"
    theoretical = True
    requires_theory = True

    def execute(self, trial: Trial) -> float:
        setting = trial.setting
        return lrt_error_probs(
            setting.effective_noise.sigma_eff_sq,
            setting.params.activity_prob,
            setting.beta_dist,
        ).p_err


class LrtEmpiricalMethod(EvaluationMethod):
    name = "LrtEmp"
    description = """Likelihood ratio test on each AP's CB-AMP output.
    The test uses every user's own tau and beta; error rates are averaged over APs."""
    metric = "p_err"

    def execute(self, trial: Trial) -> float:
        scene = trial.scene
        z, tau = trial.decoupled_outputs()
        lam = scene.params.activity_prob
        errors = [
            score_decisions(
                lrt_decide(z[:, j], tau[:, j], lam, scene.beta[j]), scene.activity
            ).p_err
            for j in range(z.shape[1])
        ]
        return float(np.mean(errors))
