import logging
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from shared.errors import FixedPointError

logger = logging.getLogger(__name__)


@dataclass
class FixedPointConfig:
    max_iters: int = 1000
    rel_tol: float = 1e-9
    damping: float = 0.7
    init: float = 1.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be positive (got {self.max_iters})")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be > 0 (got {self.rel_tol})")
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must be in (0, 1] (got {self.damping})")
        if not self.init > 0:
            raise ValueError(f"init must be > 0 (got {self.init})")


@dataclass
class FixedPointResult:
    value: float
    iters: int
    residual: float
    trace: List[float] = field(default_factory=list)


def _unwrap(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


def solve_fixed_point(
    fn: Callable, cfg: FixedPointConfig = None, x0=None
) -> FixedPointResult:
    """Damped iteration x <- (1 - d) x + d fn(x) until every component moves
    by at most cfg.rel_tol relative. x0 overrides cfg.init and may be a vector;
    the residual is |fn(x) - x| at the last step."""
    cfg = cfg or FixedPointConfig()
    x = np.asarray(cfg.init if x0 is None else x0, dtype=float)
    trace = [_unwrap(x)]

    for iteration in range(1, cfg.max_iters + 1):
        mapped = np.asarray(fn(_unwrap(x)), dtype=float)
        if not np.all(np.isfinite(mapped)):
            raise FixedPointError(
                f"Fixed-point map returned {mapped} at iteration {iteration}", trace
            )

        updated = (1.0 - cfg.damping) * x + cfg.damping * mapped
        trace.append(_unwrap(updated))
        if np.all(np.abs(updated - x) <= cfg.rel_tol * np.abs(updated)):
            logger.debug("Fixed point %s after %d iterations", updated, iteration)
            return FixedPointResult(
                _unwrap(updated), iteration, _unwrap(np.abs(mapped - x)), trace
            )
        x = updated

    raise FixedPointError(
        f"No convergence after {cfg.max_iters} iterations (last value {x})", trace
    )
