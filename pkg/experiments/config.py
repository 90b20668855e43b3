from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, List, Optional

from channel.params import SystemParams
from shared.errors import ConfigError
from shared.utils import lines_to_properties

DESK_SCALE = {"num_users": 1000, "num_pilots": 75, "num_aps": 10}
PAPER_SCALE = {"num_users": 4000, "num_pilots": 300, "num_aps": 10}
SCALES = {"desk": DESK_SCALE, "paper": PAPER_SCALE}

DEFAULT_SNR_DB = 30.0


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    trials: int = 20
    max_iters: int = 200
    stop_tol: float = 1e-6

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1 (got {self.trials})")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be at least 1 (got {self.max_iters})")
        if not self.stop_tol > 0:
            raise ConfigError(f"stop_tol must be > 0 (got {self.stop_tol})")


_PARAM_KEYS = {f.name for f in fields(SystemParams)}
_RUN_KEYS = {"trials": int, "max_iters": int, "stop_tol": float}
_TYPES = {
    "num_users": int,
    "num_pilots": int,
    "num_aps": int,
    "activity_prob": float,
    "radius": float,
    "pathloss_exp": float,
    "ref_dist": float,
    "noise_var": float,
    "snr_db": float,
    "seed": int,
    "snr_reference": str,
    **_RUN_KEYS,
}
KNOWN_KEYS = sorted(_TYPES)


def _convert(key: str, text: str):
    kind = _TYPES[key]
    try:
        if kind is int:
            return int(text, 0)
        if kind is str:
            return text
        return float(text)
    except ValueError:
        expected = "an integer" if kind is int else "a real number"
        raise ConfigError(f"Invalid value for {key}: {text!r} (expected {expected})")


def parse_overrides(items: Iterable[str]) -> dict:
    result = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"Override {item!r} is not of the form key=value")
        result.update(lines_to_properties([item], separator="="))
    return result


def parse_config(
    lines: Iterable[str] = (),
    overrides: Optional[dict] = None,
    scale: str = "desk",
) -> RunConfig:
    values = lines_to_properties(lines, separator="=")
    values.update(overrides or {})

    for key in values:
        if key not in _TYPES:
            raise ConfigError(f"Unknown configuration key {key!r} (known: {', '.join(KNOWN_KEYS)})")
    if "snr_db" in values and "noise_var" in values:
        raise ConfigError("Set either snr_db or noise_var, not both")

    converted = {key: _convert(key, text) for key, text in values.items()}
    snr_db = converted.pop("snr_db", None)
    if snr_db is None and "noise_var" not in converted:
        snr_db = DEFAULT_SNR_DB

    param_values = {**SCALES[scale]}
    param_values.update({k: v for k, v in converted.items() if k in _PARAM_KEYS})
    run_values = {k: v for k, v in converted.items() if k in _RUN_KEYS}
    try:
        params = SystemParams(**param_values)
        if snr_db is not None:
            params = params.with_changes(snr_db=snr_db)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return RunConfig(params, **run_values)


def load_config(path: Optional[Path], overrides: Optional[dict] = None, scale="desk") -> RunConfig:
    lines: List[str] = []
    if path is not None:
        try:
            with open(path) as source:
                lines = source.read().splitlines()
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}") from e
    return parse_config(lines, overrides, scale)


def format_config(config: RunConfig) -> str:
    values = {**asdict(config.params)}
    values.update(
        trials=config.trials, max_iters=config.max_iters, stop_tol=config.stop_tol
    )
    return "".join(
        f"{key} = {value if isinstance(value, str) else repr(value)}\n"
        for key, value in values.items()
    )
