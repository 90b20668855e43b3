import csv
import json
from pathlib import Path
from typing import Iterable, List, Sequence

from experiments.sweep import ResultRow

CSV_HEADER = ["method", "sweep_var", "sweep_value", "metric", "stderr", "trials", "seed"]


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_table(header: Sequence[str], records: Iterable[Sequence], path: Path) -> None:
    with open(path, "w", newline="") as output:
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(header)
        for record in records:
            writer.writerow([_format(value) for value in record])


def emit_csv(rows: Iterable[ResultRow], path: Path) -> None:
    emit_table(
        CSV_HEADER,
        (
            (r.method, r.sweep_var, float(r.sweep_value), float(r.metric), float(r.stderr), r.trials, r.seed)
            for r in rows
        ),
        path,
    )


def read_csv(path: Path) -> List[ResultRow]:
    with open(path, newline="") as source:
        reader = csv.DictReader(source)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"Unexpected header in {path}: {reader.fieldnames}")
        return [
            ResultRow(
                method=line["method"],
                sweep_var=line["sweep_var"],
                sweep_value=float(line["sweep_value"]),
                metric=float(line["metric"]),
                stderr=float(line["stderr"]),
                trials=int(line["trials"]),
                seed=int(line["seed"]),
            )
            for line in reader
        ]


def write_summary(path: Path, summary: dict) -> None:
    with open(path, "w") as output:
        json.dump(summary, output, indent=2, sort_keys=True, default=str)
        output.write("\n")
