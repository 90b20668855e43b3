import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Sequence

from channel.fading import beta_pdf_numeric
from channel.scene import save_scene
from checks.abstract import CheckResult, RunPlan
from checks.memory import MemoryCheck
from checks.output import OutputCheck
from checks.regime import RegimeCheck
from estimation.decoupling import solve_property1, solve_state_evolution
from estimation.oracle import oracle_fixed_point
from experiments.config import RunConfig, load_config, parse_overrides
from experiments.output import emit_csv, emit_table, write_summary
from experiments.report import RunReport, compute_hash, write_report
from experiments.sweep import SweepSpec, SweepVariable, run_sweep
from meta import NAME, VERSION
from methods.abstract import EvaluationMethod, Setting, Trial
from methods.centralized import (
    CentralizedMmvMethod,
    CentralizedSmvMethod,
    CentralizedTheoryMethod,
)
from methods.distributed import DistributedFusionMethod, DistributedTheoryMethod
from methods.lrt import LrtEmpiricalMethod, LrtTheoryMethod
from methods.mmv import MmvAmpMethod
from methods.oracle import OracleAsymMethod, OracleExactMethod
from methods.smv import SmvCbampMethod, SmvProperty1Method, SmvTheoryMethod
from shared.errors import JadceError

METHODS = [
    OracleExactMethod(),
    OracleAsymMethod(),
    SmvTheoryMethod(),
    SmvProperty1Method(),
    SmvCbampMethod(),
    MmvAmpMethod(),
    LrtTheoryMethod(),
    LrtEmpiricalMethod(),
    CentralizedSmvMethod(),
    CentralizedMmvMethod(),
    CentralizedTheoryMethod(),
    DistributedFusionMethod(),
    DistributedTheoryMethod(),
]
CHECKS = [OutputCheck(), MemoryCheck(), RegimeCheck()]

PILOT_VALUES = {"desk": (50, 75, 100, 200, 300), "paper": (100, 150, 200, 250, 300)}
SNR_VALUES = (0, 10, 20, 30, 40, 50)
AP_VALUES = (1, 2, 4, 8, 16)

MSE_METHODS = ["OracleExact", "OracleAsym", "SmvTheory", "SmvCbamp", "MmvAmp"]
LRT_METHODS = ["LrtTheory", "LrtEmp"]
CENTRALIZED_METHODS = ["CentSmv", "CentMmv", "CentTheory"]
DISTRIBUTED_METHODS = ["DistFusion", "DistTheory"]

SUBCOMMANDS = [
    "fixed-point",
    "oracle-asym",
    "mse-vs-pilots",
    "mse-vs-snr",
    "lrt-single",
    "detect-centralized",
    "detect-distributed",
    "reproduce-all",
]

logger = logging.getLogger("jadce")


@dataclass
class CliConfig:
    subcommand: str
    config_path: Optional[Path] = None
    overrides: dict = field(default_factory=dict)
    seed: Optional[int] = None
    out_dir: Path = Path("results")
    threads: int = 1
    scale: str = "desk"
    values: Optional[Sequence[float]] = None
    trials: Optional[int] = None
    lrt_sweep: str = "pilots"
    force: bool = False
    dump_scene: bool = False


def find_methods(names: Sequence[str]) -> List[EvaluationMethod]:
    by_name = {method.name: method for method in METHODS}
    return [by_name[name] for name in names]


class SweepPipeline:
    def __init__(self, filename: str, sweep_var: SweepVariable, methods: List[str], defaults):
        self.filename = filename
        self.sweep_var = sweep_var
        self.methods = methods
        self.defaults = defaults

    def values(self, cfg: CliConfig) -> Sequence[float]:
        if cfg.values:
            return cfg.values
        if isinstance(self.defaults, dict):
            return self.defaults[cfg.scale]
        return self.defaults

    def run(self, config: RunConfig, cfg: CliConfig, path: Path) -> List[str]:
        spec = SweepSpec(
            base=config.params,
            sweep_var=self.sweep_var,
            values=self.values(cfg),
            trials=config.trials,
            methods=find_methods(self.methods),
            max_iters=config.max_iters,
            stop_tol=config.stop_tol,
        )
        print(f"\nRunning {self.filename} ({config.trials} trials per value)")
        rows = run_sweep(spec, threads=cfg.threads, progress=print)
        emit_csv(rows, path)
        return [
            f"{self.filename}: {row.method} at {row.sweep_var}={row.sweep_value:g}, {row.unconverged} runs"
            for row in rows
            if row.unconverged
        ]

    def first_setting(self, config: RunConfig, cfg: CliConfig) -> Setting:
        value = self.values(cfg)[0]
        params = self.sweep_var.apply(config.params, value)
        return Setting(params, value, config.max_iters, config.stop_tol)


class FixedPointPipeline:
    filename = "fixed_point.csv"

    def run(self, config: RunConfig, cfg: CliConfig, path: Path) -> List[str]:
        p = config.params
        beta_dist = beta_pdf_numeric(p)
        records = []
        for solver in (solve_state_evolution, solve_property1):
            noise = solver(p.activity_prob, p.gamma, p.noise_var, beta_dist)
            print(
                f"{noise.method.value}: sigma_eff^2 = {noise.sigma_eff_sq:.6g} "
                f"(noise_var = {p.noise_var:.6g}, {noise.iters} iterations)"
            )
            if noise.ambiguous:
                print(f"    ambiguous, other fixed points: {noise.alternatives}")
            records.append(
                (
                    p.activity_prob,
                    p.gamma,
                    p.snr_db,
                    noise.sigma_eff_sq,
                    noise.sigma_peff_sq,
                    noise.method.value,
                    noise.iters,
                    noise.residual,
                    int(noise.ambiguous),
                )
            )
        emit_table(
            [
                "lam",
                "gamma",
                "snr_db",
                "sigma_eff_sq",
                "sigma_peff_sq",
                "method",
                "iters",
                "residual",
                "ambiguous",
            ],
            records,
            path,
        )
        return []


class OracleAsymPipeline:
    filename = "oracle_asym.csv"

    def run(self, config: RunConfig, cfg: CliConfig, path: Path) -> List[str]:
        p = config.params
        root = oracle_fixed_point(p.activity_prob, p.gamma, p.noise_var, beta_pdf_numeric(p))
        mse = (root - p.noise_var) / p.gamma
        print(f"Oracle fixed point {root:.6g}, asymptotic MSE {mse:.6g}")
        emit_table(
            ["lam", "gamma", "snr_db", "varsigma", "mse"],
            [(p.activity_prob, p.gamma, p.snr_db, root, mse)],
            path,
        )
        return []


def _sweeps():
    return {
        "mse-vs-pilots": SweepPipeline(
            "mse_vs_pilots.csv", SweepVariable.PILOTS, MSE_METHODS, PILOT_VALUES
        ),
        "mse-vs-snr": SweepPipeline(
            "mse_vs_snr.csv", SweepVariable.SNR, MSE_METHODS, SNR_VALUES
        ),
        "lrt-pilots": SweepPipeline(
            "lrt_vs_pilots.csv", SweepVariable.PILOTS, LRT_METHODS, PILOT_VALUES
        ),
        "lrt-snr": SweepPipeline(
            "lrt_vs_snr.csv", SweepVariable.SNR, LRT_METHODS, SNR_VALUES
        ),
        "detect-centralized": SweepPipeline(
            "detect_centralized.csv", SweepVariable.NUM_APS, CENTRALIZED_METHODS, AP_VALUES
        ),
        "detect-distributed": SweepPipeline(
            "detect_distributed.csv", SweepVariable.NUM_APS, DISTRIBUTED_METHODS, AP_VALUES
        ),
    }


def plan_pipelines(cfg: CliConfig) -> list:
    sweeps = _sweeps()
    if cfg.subcommand == "fixed-point":
        return [FixedPointPipeline()]
    if cfg.subcommand == "oracle-asym":
        return [OracleAsymPipeline()]
    if cfg.subcommand == "lrt-single":
        return [sweeps[f"lrt-{cfg.lrt_sweep}"]]
    if cfg.subcommand == "reproduce-all":
        return list(sweeps.values())
    return [sweeps[cfg.subcommand]]


def _sweep_extent(pipelines, cfg: CliConfig, variable: SweepVariable) -> int:
    values = [
        int(max(p.values(cfg)))
        for p in pipelines
        if isinstance(p, SweepPipeline) and p.sweep_var is variable
    ]
    return max(values, default=0)


def run_checks(plan: RunPlan) -> bool:
    passed = True
    for check in CHECKS:
        result: CheckResult = check.execute(plan)
        status = "OK" if result.passed else "FAILED"
        print(f"[{status}] {check.name}")
        for line in result.message.splitlines():
            print(f"    {line}")
        passed = passed and result.passed
    return passed


def _dump_scene(pipeline, config: RunConfig, cfg: CliConfig) -> List[Path]:
    if not isinstance(pipeline, SweepPipeline):
        return []
    trial = Trial(pipeline.first_setting(config, cfg), 0, config.params.seed)
    scene_path = cfg.out_dir / "scene.npz"
    trace_path = cfg.out_dir / "amp_trace.csv"
    save_scene(trial.scene, scene_path)
    trial.amp_traces[0].to_csv(trace_path, trial.scene.effective_channel()[0])
    print(f"Scene of trial 0 saved to {scene_path}")
    return [scene_path, trace_path]


def dispatch(cfg: CliConfig) -> int:
    overrides = dict(cfg.overrides)
    if cfg.seed is not None:
        overrides["seed"] = str(cfg.seed)
    if cfg.trials is not None:
        overrides["trials"] = str(cfg.trials)
    config = load_config(cfg.config_path, overrides, cfg.scale)

    pipelines = plan_pipelines(cfg)
    outputs = [p.filename for p in pipelines] + ["report.txt", "summary.json"]
    if cfg.dump_scene:
        outputs += ["scene.npz", "amp_trace.csv"]
    plan = RunPlan(
        config,
        cfg.out_dir,
        outputs,
        threads=cfg.threads,
        max_pilots=_sweep_extent(pipelines, cfg, SweepVariable.PILOTS),
        max_aps=_sweep_extent(pipelines, cfg, SweepVariable.NUM_APS),
        force=cfg.force,
    )

    print(f"{NAME} {VERSION} - {cfg.subcommand}")
    if not run_checks(plan):
        print("Checks failed, nothing was run", file=sys.stderr)
        return 1

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    report = RunReport(cfg.subcommand, config, start_time=datetime.now())
    try:
        for pipeline in pipelines:
            path = cfg.out_dir / pipeline.filename
            report.unconverged += pipeline.run(config, cfg, path)
            report.output_files.append(path)
        if cfg.dump_scene:
            report.output_files += _dump_scene(pipelines[0], config, cfg)
        report.results = [compute_hash(path) for path in report.output_files]
        report.success = True
    finally:
        report.end_time = datetime.now()
        write_report(report, cfg.out_dir / "report.txt")
        write_summary(
            cfg.out_dir / "summary.json",
            {
                "name": NAME,
                "version": VERSION,
                "command": cfg.subcommand,
                "seed": config.params.seed,
                "config": {
                    **asdict(config.params),
                    "snr_db": config.params.snr_db,
                    "trials": config.trials,
                    "max_iters": config.max_iters,
                    "stop_tol": config.stop_tol,
                },
                "success": report.success,
                "files": [path.name for path in report.output_files],
                "unconverged": report.unconverged,
            },
        )

    print(f"\nCompleted in {report.elapsed}, results in {cfg.out_dir}")
    if report.unconverged:
        print(
            f"Error: {len(report.unconverged)} results include AMP runs that did not converge "
            f"within {config.max_iters} iterations (see report.txt)",
            file=sys.stderr,
        )
        return 1
    return 0


def _parse_values(text: str) -> tuple:
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=Path, default=Path("results"))
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--trials", type=int)
    common.add_argument("--values", type=_parse_values, help="comma-separated sweep values")
    scale = common.add_mutually_exclusive_group()
    scale.add_argument("--desk-scale", dest="scale", action="store_const", const="desk")
    scale.add_argument("--paper-scale", dest="scale", action="store_const", const="paper")
    common.add_argument("--force", action="store_true", help="overwrite existing outputs")
    common.add_argument("--dump-scene", action="store_true", help="save the first scene and its AMP trace")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="jadce",
        description="Activity detection and channel estimation for cell-free massive MIMO",
    )
    parser.add_argument("--version", action="version", version=f"{NAME} {VERSION}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name, parents=[common])
        if name == "lrt-single":
            sub.add_argument("--sweep", choices=["pilots", "snr"], default="pilots")
    return parser


def config_from_args(args: argparse.Namespace) -> CliConfig:
    return CliConfig(
        subcommand=args.subcommand,
        config_path=args.config,
        overrides=parse_overrides(args.overrides),
        seed=args.seed,
        out_dir=args.out,
        threads=max(args.threads, 1),
        scale=args.scale or "desk",
        values=args.values,
        trials=args.trials,
        lrt_sweep=getattr(args, "sweep", "pilots"),
        force=args.force,
        dump_scene=args.dump_scene,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.values is not None and args.subcommand in ("reproduce-all", "fixed-point", "oracle-asym"):
        parser.error(f"--values is not supported by {args.subcommand}")

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return dispatch(config_from_args(args))
    except (JadceError, OSError, ValueError) as e:
        logger.debug("Run failed", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
