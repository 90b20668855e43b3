import numpy as np

from channel.scene import complex_normal, sample_activity
from detection.centralized import centralized_decide_all
from detection.scoring import score_decisions
from methods.abstract import EvaluationMethod, Trial


class CentralizedSmvMethod(EvaluationMethod):
    name = "CentSmv"
    description = """Centralized detection at the CPU from every AP's CB-AMP output.
    Each AP contributes its decoupled observation with its own tau."""
    metric = "p_err"

    def execute(self, trial: Trial) -> float:
        z, tau = trial.decoupled_outputs()
        decisions = centralized_decide_all(z, trial.scene.beta.T, tau)
        return score_decisions(decisions, trial.scene.activity).p_err


class CentralizedMmvMethod(EvaluationMethod):
    name = "CentMmv"
    description = "Centralized detection from the joint AMP output."
    metric = "p_err"

    def execute(self, trial: Trial) -> float:
        state = trial.mmv_trace.final
        decisions = centralized_decide_all(state.r_hat, trial.scene.beta.T, state.tau)
        return score_decisions(decisions, trial.scene.activity).p_err


class CentralizedTheoryMethod(EvaluationMethod):
    name = "CentTheory"
    description = """Centralized detection on the decoupled channel z = theta + sigma n
    with the state-evolution noise level and independent noise across APs."""
    metric = "p_err"
    requires_theory = True

    def execute(self, trial: Trial) -> float:
        setting = trial.setting
        p = setting.params
        sigma_sq = setting.effective_noise.sigma_eff_sq
        rng = trial.rng(Trial.DECOUPLED_STREAM)

        beta = setting.beta_dist.sample(rng, p.num_users * p.num_aps)
        beta = beta.reshape(p.num_users, p.num_aps)
        activity = sample_activity(rng, p.num_users, p.activity_prob)
        theta = activity[:, np.newaxis] * np.sqrt(beta) * complex_normal(rng, beta.shape)
        z = theta + complex_normal(rng, beta.shape, sigma_sq)

        decisions = centralized_decide_all(z, beta, sigma_sq)
        return score_decisions(decisions, activity).p_err
