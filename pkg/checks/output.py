import os

from checks.abstract import Check, CheckResult, RunPlan


class OutputCheck(Check):
    name = "Output check"

    def _nearest_existing(self, path):
        while not path.exists() and path != path.parent:
            path = path.parent
        return path

    def execute(self, plan: RunPlan) -> CheckResult:
        result = CheckResult(passed=True)
        out_dir = plan.out_dir

        if out_dir.exists() and not out_dir.is_dir():
            result.write(f"Output path {out_dir} is not a directory!")
            result.passed = False
            return result

        anchor = self._nearest_existing(out_dir.resolve())
        if not os.access(anchor, os.W_OK):
            result.write(f"Output location {anchor} is not writable!")
            result.passed = False
            return result

        busy = [name for name in plan.outputs if (out_dir / name).exists()]
        if busy and not plan.force:
            result.write(f"Output directory already contains {', '.join(busy)}!")
            result.passed = False
        elif busy:
            result.write(f"Overwriting {', '.join(busy)}")
        elif out_dir.exists():
            result.write("Output directory is a valid directory")
        else:
            result.write(f"Output directory {out_dir} will be created")

        return result
