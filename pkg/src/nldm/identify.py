"""Fitting the one-step operator from training trajectories.

Training stacks snapshot pairs from every trajectory, solves the
minimum-norm least-squares problem, and then scores the fit the hard
way: each training trajectory is re-predicted from its own first
``delays`` states and compared against a reference over the predicted
window.  When the training series are noisy, the clean originals can be
passed separately so the scores measure skill against the truth rather
than against the noise.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    DimensionError,
    FeatureConfig,
    LearnedOperator,
    Trajectory,
    TrainingSummary,
)
from .features import build_snapshot_pair
from .lstsq import solve_min_frobenius
from .metrics import rrmse
from .predict import predict

__all__ = ["TrainingResult", "train"]


@dataclass(frozen=True, eq=False)
class TrainingResult:
    operator: LearnedOperator
    per_trajectory_rrmse: tuple[float, ...]
    mean_rrmse: float
    elapsed_seconds: float


def train(
    trajectories,
    config: FeatureConfig,
    references=None,
) -> TrainingResult:
    """Fit an operator to the given trajectories.

    Parameters
    ----------
    trajectories : sequence of Trajectory
        Training series; must share state dimension and dt.
    config : FeatureConfig
    references : sequence of Trajectory, optional
        Clean counterparts used for scoring, aligned with
        ``trajectories``.  Defaults to scoring against the training
        series themselves.

    Returns
    -------
    TrainingResult
        The operator carries a TrainingSummary; per-trajectory scores
        are mean RRMSE across states, and ``mean_rrmse`` averages them
        (NaN if any re-prediction diverged).
    """
    started = time.perf_counter()
    trajectories = list(trajectories)
    if references is not None:
        references = list(references)
        if len(references) != len(trajectories):
            raise DimensionError(
                f"{len(references)} references for {len(trajectories)} "
                "trajectories"
            )
        for q, (trajectory, reference) in enumerate(zip(trajectories, references)):
            if reference.num_samples != trajectory.num_samples:
                raise DimensionError(f"reference {q} length mismatch")

    pair = build_snapshot_pair(trajectories, config)
    if config.num_features > pair.num_columns:
        warnings.warn(
            f"underdetermined fit: {config.num_features} features but only "
            f"{pair.num_columns} snapshot columns; the minimum-norm "
            "solution is reported",
            stacklevel=2,
        )
    report = solve_min_frobenius(pair.features, pair.targets)
    operator = LearnedOperator(
        matrix=report.solution,
        config=config,
        dt=trajectories[0].dt,
        training_summary=None,
    )

    scores = []
    for q, trajectory in enumerate(trajectories):
        seeds = trajectory.states[: config.delays]
        steps = trajectory.num_samples - config.delays
        prediction = predict(operator, seeds, steps, t0=trajectory.t0)
        reference = references[q] if references is not None else trajectory
        score = rrmse(prediction.trajectory, reference, config.delays)
        scores.append(score.mean_rrmse)

    summary = TrainingSummary(
        num_trajectories=len(trajectories),
        total_columns=pair.num_columns,
        residual_frobenius=report.residual_frobenius,
        per_trajectory_rrmse=tuple(scores),
        effective_rank=report.effective_rank,
        underdetermined=config.num_features > pair.num_columns,
    )
    operator = replace(operator, training_summary=summary)
    elapsed = time.perf_counter() - started
    return TrainingResult(
        operator=operator,
        per_trajectory_rrmse=tuple(scores),
        mean_rrmse=float(np.mean(scores)),
        elapsed_seconds=elapsed,
    )
