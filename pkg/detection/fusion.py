import math
from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass
class FusionParams:
    chi: float
    rho: float
    num_aps: int
    p_f_local: float
    p_m_local: float
    lam: float


@dataclass
class FusionErrorProbs:
    p_false_alarm: float
    p_miss: float
    p_err: float


def is_informative(p_f_local: float, p_m_local: float) -> bool:
    """Whether local votes can move the fused decision away from the prior."""
    return 0 < p_f_local < 1 and 0 < p_m_local < 1 and p_f_local + p_m_local < 1


def fusion_params(p_f_local: float, p_m_local: float, lam: float, num_aps: int) -> FusionParams:
    for name, value in (("p_f_local", p_f_local), ("p_m_local", p_m_local), ("lam", lam)):
        if not 0 < value < 1:
            raise ValueError(f"{name} must be in (0, 1) (got {value})")
    if p_f_local + p_m_local >= 1:
        raise ValueError(
            f"Local test is uninformative (P_F + P_M = {p_f_local + p_m_local:g})"
        )
    if num_aps < 1:
        raise ValueError(f"num_aps must be positive (got {num_aps})")

    chi = math.log((1 - p_m_local) * (1 - p_f_local) / (p_m_local * p_f_local))
    rho = (
        math.log((1 - lam) / lam) - num_aps * math.log(p_m_local / (1 - p_f_local))
    ) / chi
    return FusionParams(chi, rho, num_aps, p_f_local, p_m_local, lam)


def fusion_decide(votes, fp: FusionParams):
    """Active iff the number of active votes across APs (last axis) exceeds rho."""
    votes = np.asarray(votes)
    if votes.shape[-1] != fp.num_aps:
        raise ValueError(f"Expected {fp.num_aps} votes per user, got {votes.shape[-1]}")
    decision = (votes.sum(axis=-1) > fp.rho).astype(np.int8)
    return int(decision) if decision.ndim == 0 else decision


def fusion_error_probs(fp: FusionParams) -> FusionErrorProbs:
    cut = math.floor(fp.rho)
    p_false_alarm = 1 - stats.binom.cdf(cut, fp.num_aps, fp.p_f_local)
    p_miss = stats.binom.cdf(cut, fp.num_aps, 1 - fp.p_m_local)
    p_err = (1 - fp.lam) * p_false_alarm + fp.lam * p_miss
    return FusionErrorProbs(float(p_false_alarm), float(p_miss), float(p_err))
