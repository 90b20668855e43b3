from checks.abstract import Check, CheckResult, RunPlan


class RegimeCheck(Check):
    name = "Regime check"

    def execute(self, plan: RunPlan) -> CheckResult:
        result = CheckResult(passed=True)
        params = plan.config.params
        expected_active = params.activity_prob * params.num_users

        if expected_active > params.num_pilots:
            result.write(
                f"About {expected_active:g} active users for {params.num_pilots} pilots: "
                "the known-support system is underdetermined and MSE will flatten at high SNR"
            )
        else:
            result.write(
                f"About {expected_active:g} active users for {params.num_pilots} pilots "
                f"(gamma = {params.gamma:.4g})"
            )
        return result
