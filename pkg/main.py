"""
File:           main.py
Author:         Dibyaranjan Sathua
Created on:     16/04/22, 12:38 pm
"""
from typing import Any, Dict, List, Optional
from pathlib import Path
import argparse
import sys
import time

from src import OUTPUT_DIR
from src.experiment.config import ExperimentConfig, parse_config
from src.experiment.plots import write_regret_html
from src.experiment.presets import PRESET_MAPPER, preset
from src.experiment.results import RunManifest, emit_results, summary_row, write_summary
from src.lipschitz.config_reader import ConfigReader
from src.lipschitz.exception import LipschitzBanditError
from src.lipschitz.harness import run_experiment
from src.utils.enums import (
    AdversaryType, AttackKind, MetricKind, PolicyKind, RewardKind, RMELVariant, SampleMode
)
from src.utils.logger import LogFacade


logger = LogFacade.get_logger("main")
ON_OFF = ("on", "off")
NON_CONFIG_ARGS = ("config", "out", "preset", "plot")


def _values(enum_class) -> List[str]:
    return [member.value for member in enum_class]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Corruption-robust Lipschitz bandit experiments")
    parser.add_argument("--config", type=str, help="Config file path (JSON or key = value)")
    parser.add_argument("--preset", type=str, choices=list(PRESET_MAPPER.keys()), help="Named experiment grid")
    parser.add_argument("--out", type=str, help="Output directory")
    parser.add_argument("--plot", action="store_true", default=None, help="Also write regret.html")
    parser.add_argument("--algo", type=str, choices=_values(PolicyKind))
    parser.add_argument("--reward", type=str, choices=[x for x in _values(RewardKind) if x != "custom"])
    parser.add_argument("--attack", type=str, choices=_values(AttackKind))
    parser.add_argument("--adversary", type=str, choices=_values(AdversaryType))
    parser.add_argument("--budget", type=float, help="Adversary corruption budget C")
    parser.add_argument("--known-budget", type=float, help="C handed to Robust Zooming")
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--delta", type=float)
    parser.add_argument("--sigma", type=float, help="Noise standard deviation")
    parser.add_argument("--reps", type=int)
    parser.add_argument("--seed", type=int, help="Seed of the first repetition")
    parser.add_argument("--stride", type=int, help="Trace thinning stride")
    parser.add_argument("--B", type=float, help="RMEL layer base")
    parser.add_argument("--rmel-variant", type=str, choices=_values(RMELVariant))
    parser.add_argument("--bob-restart", type=str, choices=ON_OFF)
    parser.add_argument("--grid-depth", type=int, help="Zooming candidate grid depth")
    parser.add_argument("--capped", type=str, choices=ON_OFF, help="Cap the radius corruption term at 1")
    parser.add_argument("--metric", type=str, choices=_values(MetricKind))
    parser.add_argument("--dim", type=int, help="Dimension of the lower-bound instance")
    parser.add_argument("--sample-mode", type=str, choices=_values(SampleMode))
    parser.add_argument("--sigma-radius", type=str, choices=ON_OFF)
    parser.add_argument("--lb-epsilon", type=float)
    parser.add_argument("--lb-cell", type=int)
    parser.add_argument("--region-cap", type=int)
    parser.add_argument("--workers", type=int, help="Parallel repetitions")
    parser.add_argument("--log-rounds", action="store_true", default=None)
    return parser


def config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        key: value for key, value in vars(args).items() if key not in NON_CONFIG_ARGS and value is not None
    }


def run_cell(config: ExperimentConfig, out_dir: Path, plot: bool) -> Dict[str, Any]:
    started = time.perf_counter()
    result = run_experiment(config)
    manifest = RunManifest.build(config, result, time.perf_counter() - started)
    emit_results(config, result, manifest, out_dir)
    if plot:
        write_regret_html({config.label: result}, out_dir / "regret.html", title=config.label)
    return summary_row(config, result)


def run_cli(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = config_overrides(args)
        if args.preset:
            values: Dict[str, Any] = ConfigReader(Path(args.config)).as_dict() if args.config else dict()
            values.update(overrides)
            configs = preset(args.preset, **values)
            root = Path(args.out) if args.out else OUTPUT_DIR / args.preset
            logger.info(f"Preset {args.preset}: {len(configs)} configurations into {root}")
            rows = [run_cell(config, root / config.label, bool(args.plot)) for config in configs]
            write_summary(rows, root / "summary.csv")
        else:
            config = parse_config(overrides, args.config)
            out_dir = Path(args.out) if args.out else OUTPUT_DIR / config.label
            run_cell(config, out_dir, bool(args.plot))
    except LipschitzBanditError as err:
        logger.error(f"Experiment failed: {err}")
        return 1
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
