"""
File:           results.py
Author:         Dibyaranjan Sathua
Created on:     13/08/22, 8:05 pm
"""
from typing import Any, Dict, List, Optional
from pathlib import Path
import datetime
import json

import pandas as pd
from pydantic import BaseModel

from src import __version__
from src.experiment.config import ExperimentConfig, dump_config
from src.lipschitz.exception import LipschitzBanditError
from src.lipschitz.harness import lower_bound_details
from src.lipschitz.regret_analysis import AggregateResult
from src.utils.logger import LogFacade


logger: LogFacade = LogFacade.get_logger("results")

FLOAT_FORMAT = "%.10g"
TRACE_COLUMNS = ["rep", "t", "cum_regret", "budget_spent"]
SUMMARY_COLUMNS = [
    "algo", "reward", "attack", "adversary", "C", "T", "reps", "mean_final_regret", "std_final_regret"
]


class RunManifest(BaseModel):
    """ Everything needed to reproduce one experiment cell """
    config: Dict[str, str]
    version: str = __version__
    seeds: List[int]
    wall_clock_seconds: float
    created_at: str
    lower_bound: Optional[Dict[str, Any]] = None

    @classmethod
    def build(cls, config: ExperimentConfig, result: AggregateResult, wall_clock: float) -> "RunManifest":
        return cls(
            config=config.flat_items(),
            seeds=result.seeds,
            wall_clock_seconds=round(wall_clock, 3),
            created_at=datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
            lower_bound=lower_bound_details(config),
        )


def summary_row(config: ExperimentConfig, result: AggregateResult) -> Dict[str, Any]:
    return {
        "algo": config.algo.value,
        "reward": config.reward.value,
        "attack": config.attack.value,
        "adversary": config.adversary.value,
        "C": config.budget,
        "T": config.horizon,
        "reps": result.reps,
        "mean_final_regret": result.mean_final_regret,
        "std_final_regret": result.std_final_regret,
    }


def save_df_to_csv(df: pd.DataFrame, filepath: Path) -> None:
    df.to_csv(filepath, index=False, float_format=FLOAT_FORMAT)


def write_summary(rows: List[Dict[str, Any]], filepath: Path) -> Path:
    save_df_to_csv(pd.DataFrame(rows, columns=SUMMARY_COLUMNS), filepath)
    return filepath


def emit_results(
        config: ExperimentConfig,
        result: AggregateResult,
        manifest: RunManifest,
        out_dir: Path
) -> Dict[str, Path]:
    """ Write trace.csv, summary.csv, manifest.json and config.cfg (plus rounds.csv for logged single runs) """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {
            "trace": out_dir / "trace.csv",
            "summary": out_dir / "summary.csv",
            "manifest": out_dir / "manifest.json",
            "config": out_dir / "config.cfg",
        }
        save_df_to_csv(result.trace_frame()[TRACE_COLUMNS], paths["trace"])
        write_summary([summary_row(config, result)], paths["summary"])
        paths["manifest"].write_text(json.dumps(json.loads(manifest.json()), indent=2, sort_keys=True) + "\n")
        dump_config(config, paths["config"])
        if result.reps == 1 and result.traces[0].rounds:
            paths["rounds"] = out_dir / "rounds.csv"
            save_df_to_csv(pd.DataFrame(result.traces[0].rounds), paths["rounds"])
    except OSError as err:
        raise LipschitzBanditError(f"Cannot write results to {out_dir}: {err}") from err
    logger.info(f"Results of {config.label} written to {out_dir}")
    return paths
