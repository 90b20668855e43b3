import math
from dataclasses import dataclass, replace

MAX_SEED = 2**64

# Signal power the SNR is measured against: the unit-power transmitted
# pilot, or the power received from the reference distance d0
SNR_REFERENCES = ("transmit", "ref_dist")


def noise_var_from_snr(snr_db: float, reference_power: float = 1.0) -> float:
    return reference_power * 10.0 ** (-snr_db / 10.0)


def snr_from_noise_var(noise_var: float, reference_power: float = 1.0) -> float:
    return 10.0 * math.log10(reference_power / noise_var)


@dataclass(frozen=True)
class SystemParams:
    num_users: int = 1000
    num_pilots: int = 75
    num_aps: int = 10
    activity_prob: float = 0.05
    radius: float = 500.0
    pathloss_exp: float = 2.5
    ref_dist: float = 50.0
    noise_var: float = 1e-3
    seed: int = 0
    snr_reference: str = "transmit"

    def __post_init__(self):
        for name in ("num_users", "num_pilots", "num_aps"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer (got {value})")
        if not 0 <= self.activity_prob < 0.5:
            raise ValueError(
                f"activity_prob must be in [0, 0.5) (got {self.activity_prob})"
            )
        if not self.radius > 0:
            raise ValueError(f"radius must be > 0 (got {self.radius})")
        if not self.pathloss_exp > 0:
            raise ValueError(f"pathloss_exp must be > 0 (got {self.pathloss_exp})")
        if not 0 < self.ref_dist < 2 * self.radius:
            raise ValueError(
                f"ref_dist must be in (0, 2 * radius) (got {self.ref_dist})"
            )
        if not (self.noise_var > 0 and math.isfinite(self.noise_var)):
            raise ValueError(f"noise_var must be > 0 (got {self.noise_var})")
        if int(self.seed) != self.seed or not 0 <= self.seed < MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer (got {self.seed})")
        if self.snr_reference not in SNR_REFERENCES:
            raise ValueError(
                f"snr_reference must be one of {', '.join(SNR_REFERENCES)} "
                f"(got {self.snr_reference!r})"
            )

    @property
    def gamma(self) -> float:
        return self.num_users / self.num_pilots

    @property
    def reference_power(self) -> float:
        if self.snr_reference == "ref_dist":
            return self.beta_max
        return 1.0

    @property
    def snr_db(self) -> float:
        return snr_from_noise_var(self.noise_var, self.reference_power)

    @property
    def beta_min(self) -> float:
        return (2 * self.radius) ** -self.pathloss_exp

    @property
    def beta_max(self) -> float:
        return self.ref_dist**-self.pathloss_exp

    def with_changes(self, **changes) -> "SystemParams":
        # snr_db is resolved against the reference of the updated geometry
        snr_db = changes.pop("snr_db", None)
        updated = replace(self, **changes)
        if snr_db is not None:
            updated = replace(
                updated, noise_var=noise_var_from_snr(snr_db, updated.reference_power)
            )
        return updated
