from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence

from experiments.config import RunConfig


@dataclass
class RunPlan:
    config: RunConfig
    out_dir: Path
    outputs: List[str] = field(default_factory=list)
    threads: int = 1
    # Largest pilot and AP counts any sweep in the run will use
    max_pilots: int = 0
    max_aps: int = 0
    force: bool = False


@dataclass
class CheckResult:
    passed: bool = True
    message: str = ""

    def write(self, content: str):
        if self.message:
            self.message = self.message + "\n" + content
        else:
            self.message = content


class Check(ABC):
    name = "Abstract check"

    @abstractmethod
    def execute(self, plan: RunPlan) -> CheckResult:
        pass
