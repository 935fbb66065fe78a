"""Experiment configuration: typed dataclasses plus strict JSON parsing.

A configuration names a catalog system, the training and test series to
simulate from it, the model shape, and optionally a basin scan.  Parsing
is strict: unknown or missing keys are reported by name, and every
series must imply the same sampling interval.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .odes import make_system

__all__ = [
    "ConfigError",
    "NoiseSpec",
    "SeriesSpec",
    "ModelSpec",
    "BasinSpec",
    "SystemSpec",
    "ExperimentConfig",
    "config_from_dict",
    "config_to_dict",
    "derived_seed",
]


class ConfigError(ValueError):
    """A configuration is malformed; the message names the field."""


@dataclass(frozen=True)
class NoiseSpec:
    sigma_pct: float
    seed: int | None = None


@dataclass(frozen=True)
class SeriesSpec:
    ic: tuple[float, ...]
    t_span: tuple[float, float]
    num_samples: int
    noise: NoiseSpec | None = None

    @property
    def dt(self) -> float:
        return (self.t_span[1] - self.t_span[0]) / (self.num_samples - 1)


@dataclass(frozen=True)
class ModelSpec:
    delays: int
    degree: int


@dataclass(frozen=True)
class BasinSpec:
    window: tuple[tuple[float, float], tuple[float, float]]
    resolution: int
    steps: int = 1000
    tol: float = 0.05
    fixed: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class SystemSpec:
    ident: str
    params: dict = field(default_factory=dict)

    def __hash__(self):
        return hash((self.ident, tuple(sorted(self.params.items()))))


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemSpec
    model: ModelSpec
    train: tuple[SeriesSpec, ...]
    test: tuple[SeriesSpec, ...] = ()
    basin: BasinSpec | None = None
    output_dir: str = "runs/experiment"
    global_seed: int = 0


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return mapping[key]


def _reject_unknown(mapping: dict, allowed, where: str):
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {where}")


def _parse_noise(raw, where: str) -> NoiseSpec | None:
    if raw is None:
        return None
    _reject_unknown(raw, ("sigma_pct", "seed"), where)
    sigma_pct = float(_require(raw, "sigma_pct", where))
    if sigma_pct < 0:
        raise ConfigError(f"sigma_pct must be >= 0 in {where}, got {sigma_pct}")
    seed = raw.get("seed")
    if seed is not None:
        seed = int(seed)
        if seed < 0:
            raise ConfigError(f"seed must be >= 0 in {where}, got {seed}")
    return NoiseSpec(sigma_pct=sigma_pct, seed=seed)


def _parse_series(raw, where: str) -> SeriesSpec:
    _reject_unknown(raw, ("ic", "t_span", "num_samples", "noise"), where)
    ic = tuple(float(v) for v in _require(raw, "ic", where))
    if not ic or not all(np.isfinite(ic)):
        raise ConfigError(f"ic must be a non-empty finite vector in {where}")
    t_span_raw = _require(raw, "t_span", where)
    if len(t_span_raw) != 2:
        raise ConfigError(f"t_span must be [start, end] in {where}")
    t_span = (float(t_span_raw[0]), float(t_span_raw[1]))
    if not t_span[1] > t_span[0]:
        raise ConfigError(f"t_span must increase in {where}, got {t_span}")
    num_samples = int(_require(raw, "num_samples", where))
    if num_samples < 2:
        raise ConfigError(f"num_samples must be >= 2 in {where}, got {num_samples}")
    noise = _parse_noise(raw.get("noise"), f"{where}.noise")
    return SeriesSpec(ic=ic, t_span=t_span, num_samples=num_samples, noise=noise)


def _parse_basin(raw) -> BasinSpec | None:
    if raw is None:
        return None
    where = "basin"
    _reject_unknown(raw, ("window", "resolution", "steps", "tol", "fixed"), where)
    window_raw = _require(raw, "window", where)
    if len(window_raw) != 2 or any(len(r) != 2 for r in window_raw):
        raise ConfigError("basin.window must be [[x_lo, x_hi], [y_lo, y_hi]]")
    window = (
        (float(window_raw[0][0]), float(window_raw[0][1])),
        (float(window_raw[1][0]), float(window_raw[1][1])),
    )
    if not (window[0][1] > window[0][0] and window[1][1] > window[1][0]):
        raise ConfigError(f"basin.window must have positive extent, got {window}")
    resolution = int(_require(raw, "resolution", where))
    if resolution < 2:
        raise ConfigError(f"basin.resolution must be >= 2, got {resolution}")
    steps = int(raw.get("steps", 1000))
    if steps < 1:
        raise ConfigError(f"basin.steps must be >= 1, got {steps}")
    tol = float(raw.get("tol", 0.05))
    if not tol > 0:
        raise ConfigError(f"basin.tol must be positive, got {tol}")
    fixed_raw = raw.get("fixed", {})
    fixed = tuple(sorted((int(axis), float(value)) for axis, value in fixed_raw.items()))
    return BasinSpec(window=window, resolution=resolution, steps=steps, tol=tol, fixed=fixed)


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Parse and validate a configuration mapping (as loaded from JSON)."""
    _reject_unknown(
        raw,
        ("system", "model", "train", "test", "basin", "output_dir", "global_seed"),
        "config",
    )
    system_raw = _require(raw, "system", "config")
    _reject_unknown(system_raw, ("ident", "params"), "system")
    system = SystemSpec(
        ident=str(_require(system_raw, "ident", "system")),
        params={str(k): float(v) for k, v in system_raw.get("params", {}).items()},
    )
    try:
        catalog = make_system(system.ident, **system.params)
    except ValueError as exc:
        raise ConfigError(f"system: {exc}") from exc

    model_raw = _require(raw, "model", "config")
    _reject_unknown(model_raw, ("delays", "degree"), "model")
    model = ModelSpec(
        delays=int(_require(model_raw, "delays", "model")),
        degree=int(_require(model_raw, "degree", "model")),
    )
    if model.delays < 1:
        raise ConfigError(f"model.delays must be >= 1, got {model.delays}")
    if model.degree < 1:
        raise ConfigError(f"model.degree must be >= 1, got {model.degree}")

    train_raw = _require(raw, "train", "config")
    if not train_raw:
        raise ConfigError("train must list at least one series")
    train = tuple(
        _parse_series(entry, f"train[{i}]") for i, entry in enumerate(train_raw)
    )
    test = tuple(
        _parse_series(entry, f"test[{i}]")
        for i, entry in enumerate(raw.get("test", ()) or ())
    )

    for role, entries in (("train", train), ("test", test)):
        for i, entry in enumerate(entries):
            if len(entry.ic) != catalog.num_states:
                raise ConfigError(
                    f"{role}[{i}].ic has {len(entry.ic)} entries, system "
                    f"{system.ident!r} has {catalog.num_states} states"
                )
            if entry.num_samples < model.delays + 1:
                raise ConfigError(
                    f"{role}[{i}].num_samples={entry.num_samples} cannot "
                    f"support {model.delays} delays"
                )

    dts = [entry.dt for entry in train + test]
    for i, dt in enumerate(dts[1:], start=1):
        if abs(dt - dts[0]) > 1e-12 * max(abs(dts[0]), 1.0):
            raise ConfigError(
                f"all series must share one sampling interval; series {i} "
                f"implies dt={dt}, series 0 implies dt={dts[0]}"
            )

    basin = _parse_basin(raw.get("basin"))
    output_dir = str(raw.get("output_dir", "runs/experiment"))
    if not output_dir:
        raise ConfigError("output_dir must be non-empty")
    global_seed = int(raw.get("global_seed", 0))
    if global_seed < 0:
        raise ConfigError(f"global_seed must be >= 0, got {global_seed}")

    return ExperimentConfig(
        system=system,
        model=model,
        train=train,
        test=test,
        basin=basin,
        output_dir=output_dir,
        global_seed=global_seed,
    )


def config_to_dict(config: ExperimentConfig) -> dict:
    """Inverse of ``config_from_dict`` (up to list/tuple spelling)."""
    raw = asdict(config)
    raw["train"] = [_series_dict(entry) for entry in config.train]
    raw["test"] = [_series_dict(entry) for entry in config.test]
    if config.basin is None:
        raw.pop("basin")
    else:
        raw["basin"] = {
            "window": [list(config.basin.window[0]), list(config.basin.window[1])],
            "resolution": config.basin.resolution,
            "steps": config.basin.steps,
            "tol": config.basin.tol,
        }
        if config.basin.fixed:
            raw["basin"]["fixed"] = {str(axis): value for axis, value in config.basin.fixed}
        else:
            raw["basin"].pop("fixed", None)
    raw["system"] = {"ident": config.system.ident, "params": dict(config.system.params)}
    raw["model"] = {"delays": config.model.delays, "degree": config.model.degree}
    return raw


def _series_dict(entry: SeriesSpec) -> dict:
    out = {
        "ic": list(entry.ic),
        "t_span": list(entry.t_span),
        "num_samples": entry.num_samples,
    }
    if entry.noise is not None:
        noise = {"sigma_pct": entry.noise.sigma_pct}
        if entry.noise.seed is not None:
            noise["seed"] = entry.noise.seed
        out["noise"] = noise
    return out


def derived_seed(global_seed: int, role: str, index: int) -> int:
    """Deterministic per-series noise seed when none is given explicitly."""
    role_code = {"train": 0, "test": 1}[role]
    sequence = np.random.SeedSequence([global_seed, role_code, index])
    return int(sequence.generate_state(1)[0])
