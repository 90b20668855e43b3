import os

import humanize

from checks.abstract import Check, CheckResult, RunPlan

COMPLEX_BYTES = 16
REAL_BYTES = 8


class MemoryCheck(Check):
    name = "Memory check"

    def _physical_memory(self) -> int:
        try:
            return os.sysconf("SC_PAGE_SIZE") * os.sysconf("SC_PHYS_PAGES")
        except (ValueError, OSError, AttributeError):
            return 0

    def estimate(self, plan: RunPlan) -> int:
        """Rough working set of one trial: the scene, the pilot copies used by
        AMP and the stored per-iteration states of every AP."""
        params = plan.config.params
        N = params.num_users
        L = max(plan.max_pilots, params.num_pilots)
        M = max(plan.max_aps, params.num_aps)

        scene = L * N * COMPLEX_BYTES + M * N * (2 * REAL_BYTES + COMPLEX_BYTES)
        amp_workspace = L * N * (COMPLEX_BYTES + REAL_BYTES)
        state = N * (2 * COMPLEX_BYTES + 2 * REAL_BYTES) + L * (COMPLEX_BYTES + REAL_BYTES)
        # Per-AP traces plus the joint trace
        states = 2 * M * plan.config.max_iters * state
        return plan.threads * (scene + amp_workspace + states)

    def execute(self, plan: RunPlan) -> CheckResult:
        result = CheckResult()

        needed = self.estimate(plan)
        available = self._physical_memory()
        needed_readable = humanize.naturalsize(needed)
        if not available:
            result.write(f"Physical memory unknown, run needs about {needed_readable}")
            return result

        tail = f"(up to {needed_readable} / {humanize.naturalsize(available)})"
        result.passed = needed <= available
        if result.passed:
            result.write(f"Memory seems enough {tail}")
        else:
            result.write(f"Memory could be insufficient {tail}, try fewer --threads")
        return result
