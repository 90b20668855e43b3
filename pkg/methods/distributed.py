import logging

import numpy as np

from detection.fusion import fusion_decide, fusion_error_probs, fusion_params, is_informative
from detection.lrt import lrt_decide, lrt_error_probs
from detection.scoring import score_decisions
from methods.abstract import EvaluationMethod, Trial

logger = logging.getLogger(__name__)


def _local_fusion(local, lam: float, num_aps: int):
    # Votes that cannot beat the prior leave every user declared inactive
    if not is_informative(local.p_false_alarm, local.p_miss):
        logger.info(
            "Local test uninformative (P_F=%.3g, P_M=%.3g), fusing to the prior",
            local.p_false_alarm,
            local.p_miss,
        )
        return None
    return fusion_params(local.p_false_alarm, local.p_miss, lam, num_aps)


class DistributedFusionMethod(EvaluationMethod):
    name = "DistFusion"
    description = """Per-AP likelihood ratio votes fused at the CPU.
    Vote reliabilities come from the trial's mean CB-AMP noise level."""
    metric = "p_err"

    def execute(self, trial: Trial) -> float:
        scene = trial.scene
        p = scene.params
        z, tau = trial.decoupled_outputs()
        local = lrt_error_probs(float(np.mean(tau)), p.activity_prob, trial.setting.beta_dist)
        fp = _local_fusion(local, p.activity_prob, p.num_aps)
        if fp is None:
            decisions = np.zeros(p.num_users, dtype=np.int8)
        else:
            votes = np.column_stack(
                [
                    lrt_decide(z[:, j], tau[:, j], p.activity_prob, scene.beta[j])
                    for j in range(z.shape[1])
                ]
            )
            decisions = fusion_decide(votes, fp)
        return score_decisions(decisions, scene.activity).p_err


class DistributedTheoryMethod(EvaluationMethod):
    name = "DistTheory"
    description = "Optimal fusion rule, binomial error probability at the state-evolution noise level."
    metric = "p_err"
    theoretical = True
    requires_theory = True

    def execute(self, trial: Trial) -> float:
        setting = trial.setting
        p = setting.params
        local = lrt_error_probs(
            setting.effective_noise.sigma_eff_sq, p.activity_prob, setting.beta_dist
        )
        fp = _local_fusion(local, p.activity_prob, p.num_aps)
        if fp is None:
            return p.activity_prob
        return fusion_error_probs(fp).p_err
