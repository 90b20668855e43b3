from typing import List, Sequence


class JadceError(Exception):
    """Base class for every failure the simulator reports to the user."""


class QuadratureError(JadceError):
    def __init__(self, message: str, best_estimate: float, abserr: float):
        super().__init__(f"{message} (best estimate {best_estimate:.6g}, error {abserr:.3g})")
        self.best_estimate = best_estimate
        self.abserr = abserr


class FixedPointError(JadceError):
    def __init__(self, message: str, trace: Sequence[float] = ()):
        super().__init__(message)
        self.trace: List[float] = list(trace)


class AmpDivergenceError(JadceError):
    def __init__(self, iteration: int, what: str = "estimate"):
        super().__init__(f"AMP diverged at iteration {iteration}: non-finite {what}")
        self.iteration = iteration


class SingularSystemError(JadceError):
    def __init__(self, condition: float):
        super().__init__(f"Oracle system is numerically singular (condition {condition:.3g})")
        self.condition = condition


class NoRootError(JadceError):
    pass


class ConfigError(JadceError):
    pass


class ExperimentError(JadceError):
    def __init__(self, method: str, value: float, trial: int, cause: Exception):
        trial_text = "theory" if trial < 0 else f"trial {trial}"
        super().__init__(f"{method} failed at value {value:g} ({trial_text}): {cause}")
        self.method = method
        self.value = value
        self.trial = trial
        self.cause = cause
