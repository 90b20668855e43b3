import hashlib
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import List

import humanize

from experiments.config import RunConfig, format_config
from meta import AUTHOR, NAME, VERSION


@dataclass
class HashedFile:
    path: Path
    sha256: str = ""


@dataclass
class RunReport:
    command: str
    config: RunConfig
    start_time: datetime = None
    end_time: datetime = None
    success: bool = False
    output_files: List[Path] = field(default_factory=list)
    results: List[HashedFile] = field(default_factory=list)
    unconverged: List[str] = field(default_factory=list)

    @property
    def elapsed(self) -> str:
        if self.start_time is None or self.end_time is None:
            return "unknown"
        return humanize.naturaldelta(self.end_time - self.start_time)


def compute_hash(path: Path, chunk_size: int = 16 * 1024) -> HashedFile:
    sha256 = hashlib.sha256()
    with open(path, "rb") as f:
        while True:
            chunk = f.read(chunk_size)
            if not chunk:
                break
            sha256.update(chunk)
    return HashedFile(path, sha256=sha256.hexdigest())


def write_report(report: RunReport, path: Path) -> None:
    separator = "-" * 80

    output_files = []
    if len(report.output_files):
        output_files = [
            separator,
            "Generated files:",
        ] + [f"    - {file}" for file in report.output_files]

    hashes = []
    if report.results:
        hashes = [separator, "Computed hashes (SHA256):"] + [
            f"    - {hashed.path.name}: {hashed.sha256}" for hashed in report.results
        ]

    warnings = []
    if report.unconverged:
        warnings = [separator, "AMP runs stopped at the iteration limit:"] + [
            f"    - {entry}" for entry in report.unconverged
        ]

    with open(path, "w") as output:
        for line in (
            [
                f"{NAME} - joint activity detection and channel estimation",
                f"Version {VERSION} by {AUTHOR}",
                "Run log",
                separator,
                f"Command: {report.command}",
                f"Start time: {report.start_time}",
                f"End time: {report.end_time}",
                f"Elapsed: {report.elapsed}",
                f"Completed: {'yes' if report.success else 'no'}",
                separator,
                "Configuration:",
                "",
                format_config(report.config).rstrip("\n"),
            ]
            + output_files
            + hashes
            + warnings
        ):
            output.write(line + "\n")
