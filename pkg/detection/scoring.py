from dataclasses import dataclass

import numpy as np


@dataclass
class DetectionReport:
    decisions: np.ndarray
    p_false_alarm: float
    p_miss: float
    p_err: float
    theoretical: bool = False


def score_decisions(decisions, activity) -> DetectionReport:
    decisions = np.asarray(decisions).astype(bool)
    activity = np.asarray(activity).astype(bool)
    if decisions.shape != activity.shape:
        raise ValueError(f"Shape mismatch: {decisions.shape} vs {activity.shape}")

    inactive = max(int((~activity).sum()), 1)
    active = max(int(activity.sum()), 1)
    false_alarms = int((decisions & ~activity).sum())
    misses = int((~decisions & activity).sum())
    return DetectionReport(
        decisions=decisions.astype(np.int8),
        p_false_alarm=false_alarms / inactive,
        p_miss=misses / active,
        p_err=(false_alarms + misses) / max(activity.size, 1),
    )
