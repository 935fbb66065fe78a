"""Command-line pipeline: simulate, train, predict, evaluate, basin, run.

Exit codes: 0 on success, 2 for configuration problems, 3 for numerical
failures inside the pipeline.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .basin import ground_truth_grid, grid_agreement, operator_grid
from .config import (
    ConfigError,
    ExperimentConfig,
    config_from_dict,
    config_to_dict,
    derived_seed,
)
from .core import FeatureConfig, IntegrationError, Trajectory
from .identify import train as fit_operator
from .io import (
    load_model,
    save_basin_csv,
    save_model,
    save_trajectory_csv,
    write_json,
)
from .metrics import rrmse
from .odes import add_noise, integrate, make_system
from .predict import predict as run_prediction

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PIPELINE = 3


@dataclass
class SeriesData:
    """One simulated series: clean reference, optional noisy copy."""

    clean: Trajectory
    noisy: Trajectory | None
    seed: int | None

    @property
    def working(self) -> Trajectory:
        return self.noisy if self.noisy is not None else self.clean


def _simulate_role(config: ExperimentConfig, role: str, global_seed: int):
    system = make_system(config.system.ident, **config.system.params)
    entries = config.train if role == "train" else config.test
    out = []
    for index, entry in enumerate(entries):
        clean = integrate(system, entry.ic, entry.t_span, entry.num_samples)
        noisy = None
        seed = None
        if entry.noise is not None:
            seed = (
                entry.noise.seed
                if entry.noise.seed is not None
                else derived_seed(global_seed, role, index)
            )
            noisy = add_noise(clean, entry.noise.sigma_pct, seed)
        out.append(SeriesData(clean=clean, noisy=noisy, seed=seed))
    return out


def _score_payload(score, diverged_at):
    return {
        "per_state_rrmse": score.per_state_rrmse,
        "mean_rrmse": score.mean_rrmse,
        "compared_points": score.compared_points,
        "diverged": diverged_at is not None,
        "diverged_at": diverged_at,
        "rrmse_std_window": "compared samples only",
    }


class _Pipeline:
    def __init__(self, config, out_dir: Path, threads: int, global_seed: int):
        self.config = config
        self.out = out_dir
        self.threads = threads
        self.global_seed = global_seed
        self.timings: dict[str, float] = {}
        self.artifacts: list[str] = []
        self.train_data = None
        self.test_data = None
        self.operator = None

    def _write_csv(self, name: str, trajectory: Trajectory):
        path = self.out / name
        save_trajectory_csv(path, trajectory)
        self.artifacts.append(name)

    def _timed(self, stage: str, fn):
        started = time.perf_counter()
        result = fn()
        self.timings[stage] = time.perf_counter() - started
        return result

    def simulate(self):
        def stage():
            self.train_data = _simulate_role(self.config, "train", self.global_seed)
            self.test_data = _simulate_role(self.config, "test", self.global_seed)

        self._timed("simulate", stage)
        for role, series in (("train", self.train_data), ("test", self.test_data)):
            for index, data in enumerate(series):
                self._write_csv(f"{role}_{index:02d}_clean.csv", data.clean)
                if data.noisy is not None:
                    self._write_csv(f"{role}_{index:02d}_noisy.csv", data.noisy)

    def ensure_simulated(self):
        if self.train_data is not None:
            return

        def stage():
            self.train_data = _simulate_role(self.config, "train", self.global_seed)
            self.test_data = _simulate_role(self.config, "test", self.global_seed)

        self._timed("simulate", stage)

    def train(self):
        self.ensure_simulated()
        feature_config = FeatureConfig(
            num_states=len(self.config.train[0].ic),
            delays=self.config.model.delays,
            degree=self.config.model.degree,
        )

        def stage():
            return fit_operator(
                [data.working for data in self.train_data],
                feature_config,
                references=[data.clean for data in self.train_data],
            )

        result = self._timed("train", stage)
        self.operator = result.operator
        save_model(self.out / "model.txt", self.operator)
        self.artifacts.append("model.txt")
        summary = self.operator.training_summary
        write_json(
            self.out / "train_metrics.json",
            {
                "num_trajectories": summary.num_trajectories,
                "total_columns": summary.total_columns,
                "residual_frobenius": summary.residual_frobenius,
                "effective_rank": summary.effective_rank,
                "underdetermined": summary.underdetermined,
                "per_trajectory_rrmse": summary.per_trajectory_rrmse,
                "mean_rrmse": result.mean_rrmse,
                "elapsed_seconds": result.elapsed_seconds,
                "rrmse_std_window": "compared samples only",
            },
        )
        self.artifacts.append("train_metrics.json")

    def predict(self, evaluate: bool):
        self.ensure_simulated()
        if self.operator is None:
            raise ConfigError("no model available; train first or pass --model")
        delays = self.operator.config.delays
        scores = []

        def stage():
            for index, data in enumerate(self.test_data):
                seeds = data.working.states[:delays]
                steps = data.working.num_samples - delays
                prediction = run_prediction(
                    self.operator, seeds, steps, t0=data.working.t0
                )
                self._write_csv(
                    f"predicted_test_{index:02d}.csv", prediction.trajectory
                )
                if evaluate:
                    score = rrmse(prediction.trajectory, data.clean, delays)
                    scores.append(_score_payload(score, prediction.diverged_at))

        self._timed("evaluate" if evaluate else "predict", stage)
        if evaluate:
            write_json(self.out / "scores.json", {"test": scores})
            self.artifacts.append("scores.json")

    def basin(self):
        spec = self.config.basin
        if spec is None:
            raise ConfigError("config has no basin section")
        system = make_system(self.config.system.ident, **self.config.system.params)
        dt = self.config.train[0].dt
        horizon = spec.steps * dt
        fixed = dict(spec.fixed) or None

        truth = self._timed(
            "basin_truth",
            lambda: ground_truth_grid(
                system,
                spec.window,
                spec.resolution,
                horizon=horizon,
                tol=spec.tol,
                num_samples=min(spec.steps, 400) + 1,
                fixed_coords=fixed,
                n_jobs=self.threads,
            ),
        )
        save_basin_csv(self.out / "basin_truth.csv", truth)
        self.artifacts.append("basin_truth.csv")

        if self.operator is not None:
            predicted = self._timed(
                "basin_operator",
                lambda: operator_grid(
                    self.operator,
                    system,
                    spec.window,
                    spec.resolution,
                    steps=spec.steps,
                    tol=spec.tol,
                    fixed_coords=fixed,
                ),
            )
            save_basin_csv(self.out / "basin_operator.csv", predicted)
            self.artifacts.append("basin_operator.csv")
            agreement = grid_agreement(truth, predicted)
            write_json(
                self.out / "agreement.json",
                {
                    "fraction_agree": agreement.fraction_agree,
                    "compared_cells": agreement.compared_cells,
                    "confusion": agreement.confusion,
                },
            )
            self.artifacts.append("agreement.json")

    def manifest(self, command: str):
        payload = {
            "command": command,
            "config": config_to_dict(self.config),
            "global_seed": self.global_seed,
            "threads": self.threads,
            "resolved_noise_seeds": {
                "train": [d.seed for d in self.train_data or []],
                "test": [d.seed for d in self.test_data or []],
            },
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "nldm": __version__,
            },
            "timings_seconds": self.timings,
            "artifacts": self.artifacts,
        }
        write_json(self.out / "manifest.json", payload)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nldm",
        description="Learn one-step operators from simulated trajectories, "
        "forecast, score, and map basins of attraction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("simulate", "integrate the configured series and write CSVs"),
        ("train", "fit an operator to the training series"),
        ("predict", "forecast the test series with a trained operator"),
        ("evaluate", "forecast and score the test series"),
        ("basin", "map basins of attraction"),
        ("run", "simulate, train, evaluate, and map basins in one pass"),
    ):
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--config", required=True, help="experiment config (JSON)")
        cmd.add_argument("--model", help="previously saved operator file")
        cmd.add_argument("--out", help="output directory (overrides config)")
        cmd.add_argument("--seed", type=int, help="override the global seed")
        cmd.add_argument(
            "--threads",
            type=int,
            help="worker processes for grid scans (default: NLDM_THREADS or 1)",
        )
    return parser


def _resolve_threads(value) -> int:
    if value is None:
        value = os.environ.get("NLDM_THREADS", "1")
    threads = int(value)
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    return threads


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        raw = json.loads(Path(args.config).read_text())
        config = config_from_dict(raw)
        threads = _resolve_threads(args.threads)
        global_seed = config.global_seed if args.seed is None else args.seed
        if global_seed < 0:
            raise ConfigError(f"seed must be >= 0, got {global_seed}")
        out_dir = Path(args.out if args.out else config.output_dir)
        if args.command in ("predict", "evaluate") and not config.test:
            raise ConfigError(f"{args.command} needs at least one test series")
        if args.command == "basin" and config.basin is None:
            raise ConfigError("config has no basin section")
        operator = load_model(args.model) if args.model else None
        if args.command in ("predict", "evaluate") and operator is None:
            raise ConfigError(f"--model is required for {args.command}")
    except (OSError, json.JSONDecodeError, ConfigError, ValueError) as exc:
        print(f"nldm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir.mkdir(parents=True, exist_ok=True)
    pipeline = _Pipeline(config, out_dir, threads, global_seed)
    pipeline.operator = operator
    try:
        if args.command == "simulate":
            pipeline.simulate()
        elif args.command == "train":
            pipeline.train()
        elif args.command in ("predict", "evaluate"):
            pipeline.predict(evaluate=args.command == "evaluate")
        elif args.command == "basin":
            pipeline.basin()
        elif args.command == "run":
            pipeline.simulate()
            pipeline.train()
            if config.test:
                pipeline.predict(evaluate=True)
            if config.basin is not None:
                pipeline.basin()
        pipeline.manifest(args.command)
    except ConfigError as exc:
        print(f"nldm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"nldm: pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
