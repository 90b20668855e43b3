import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from channel.params import SystemParams
from methods.abstract import EvaluationMethod, Setting, Trial
from shared.errors import ExperimentError, JadceError

logger = logging.getLogger(__name__)


class SweepVariable(enum.Enum):
    PILOTS = "pilots"
    SNR = "snr"
    NUM_APS = "num_aps"

    def apply(self, params: SystemParams, value: float) -> SystemParams:
        if self is SweepVariable.PILOTS:
            return params.with_changes(num_pilots=int(value))
        if self is SweepVariable.NUM_APS:
            return params.with_changes(num_aps=int(value))
        return params.with_changes(snr_db=value)


@dataclass
class SweepSpec:
    base: SystemParams
    sweep_var: SweepVariable
    values: Sequence[float]
    trials: int
    methods: List[EvaluationMethod]
    max_iters: int = 200
    stop_tol: float = 1e-6

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1 (got {self.trials})")
        if not self.methods:
            raise ValueError("At least one method is required")
        if len(self.values) == 0:
            raise ValueError("At least one sweep value is required")
        steps = np.diff(np.asarray(self.values, dtype=float))
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError(f"Sweep values must be strictly monotone (got {list(self.values)})")
        if self.sweep_var is not SweepVariable.SNR:
            for value in self.values:
                if value != int(value) or value < 1:
                    raise ValueError(
                        f"{self.sweep_var.value} values must be positive integers (got {value})"
                    )


@dataclass
class ResultRow:
    method: str
    sweep_var: str
    sweep_value: float
    metric: float
    stderr: float
    trials: int
    seed: int
    # AMP runs behind this row that stopped at the iteration limit
    unconverged: int = 0


@dataclass
class _Accumulator:
    total: float = 0.0
    squares: float = 0.0
    count: int = 0
    stalled: int = 0

    def add(self, value: float, stalled: int = 0):
        self.total += value
        self.squares += value * value
        self.count += 1
        self.stalled += stalled

    @property
    def mean(self) -> float:
        return self.total / self.count

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return 0.0
        variance = (self.squares - self.count * self.mean**2) / (self.count - 1)
        return math.sqrt(max(variance, 0.0) / self.count)


def _run_trial(setting: Setting, index: int, seed: int, methods) -> Dict[str, Tuple[float, int]]:
    trial = Trial(setting, index, seed)
    outcomes = {}
    for method in methods:
        try:
            outcomes[method.name] = (method.execute(trial), trial.take_stalled())
        except (JadceError, ValueError, ArithmeticError) as e:
            raise ExperimentError(method.name, setting.sweep_value, index, e) from e
    return outcomes


def run_sweep(
    spec: SweepSpec,
    threads: int = 1,
    progress: Callable[[str], None] = None,
) -> List[ResultRow]:
    theory = [m for m in spec.methods if m.theoretical]
    monte_carlo = [m for m in spec.methods if not m.theoretical]
    seed = spec.base.seed
    rows = []

    for value in spec.values:
        setting = Setting(
            spec.sweep_var.apply(spec.base, value), value, spec.max_iters, spec.stop_tol
        )
        results: Dict[str, float] = {}

        for method in theory:
            try:
                results[method.name] = method.execute(Trial(setting, -1, seed))
            except (JadceError, ValueError, ArithmeticError) as e:
                raise ExperimentError(method.name, value, -1, e) from e

        accumulators = {m.name: _Accumulator() for m in monte_carlo}
        if monte_carlo:
            if any(m.requires_theory for m in monte_carlo):
                # Solve before fanning out so workers only read the cache
                setting.effective_noise
            with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
                outcomes = pool.map(
                    lambda index: _run_trial(setting, index, seed, monte_carlo),
                    range(spec.trials),
                )
                for metrics in outcomes:
                    for name, (metric, stalled) in metrics.items():
                        accumulators[name].add(metric, stalled)

        for method in spec.methods:
            if method.theoretical:
                metric, stderr, trials, stalled = results[method.name], 0.0, 0, 0
            else:
                acc = accumulators[method.name]
                metric, stderr, trials, stalled = acc.mean, acc.stderr, acc.count, acc.stalled
                if stalled:
                    logger.warning(
                        "%s at %s=%g: %d AMP runs stopped at the iteration limit (%d)",
                        method.name,
                        spec.sweep_var.value,
                        value,
                        stalled,
                        spec.max_iters,
                    )
            rows.append(
                ResultRow(
                    method.name, spec.sweep_var.value, value, metric, stderr, trials, seed, stalled
                )
            )

        if progress:
            summary = ", ".join(f"{row.method}={row.metric:.4g}" for row in rows[-len(spec.methods):])
            progress(f"{spec.sweep_var.value}={value:g}: {summary}")

    return rows
