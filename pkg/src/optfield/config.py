"""Declarative run configuration: JSON parsing, validation, serialization.

One canonical format (JSON). Complex amplitudes are two-element arrays
[re, im]. Unknown keys are rejected with their location in the document.
Level indices appearing in configs are 1-based; the kernel uses 0-based
arrays internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as _field

from .model import PRESET_NAMES

TASK_NAMES = ("solve", "baseline", "wigner", "evolve", "sweep")
SWEEP_PARAMETERS = ("g", "T", "theta", "phi", "n_atoms", "n_max")
INTEGER_SWEEP_PARAMETERS = ("n_atoms", "n_max")

_PRESET_CONFIG_REQUIRED = {
    "rabi_resonant": ("g", "T", "theta"),
    "multilevel_jc": ("T",),
    "multilevel_rsc": ("T",),
    "multilevel_dr": ("T",),
    "multiqubit": ("target", "T"),
}


class ConfigError(ValueError):
    """Configuration rejected; the message carries the offending location."""


@dataclass
class SweepAxis:
    parameter: str
    start: float
    stop: float
    count: int
    scale: str = "linear"


@dataclass
class WignerOptions:
    x_min: float = -6.0
    x_max: float = 6.0
    x_count: int = 121
    p_min: float = -6.0
    p_max: float = 6.0
    p_count: int = 121
    localize: bool = False


@dataclass
class EvolveOptions:
    t_max: float = None
    count: int = 400


@dataclass
class ScenarioConfig:
    """Explicit scenario description (alternative to a preset)."""

    control_time: float
    atoms: list
    omega_c: float = 1.0
    initial_atomic: list = None
    target_atomic: list = None
    target_level: int = None


@dataclass
class RunConfig:
    tasks: list
    preset: str = None
    scenario: ScenarioConfig = None
    g: float = None
    T: float = None
    theta: float = None
    phi: float = 0.0
    n_atoms: int = 3
    target: str = None
    n_max: int = 80
    n_trunc: int = None
    restrict: bool = True
    label: str = ""
    output_dir: str = "out"
    overwrite: bool = False
    threads: int = None
    seed: int = None
    sweep: list = _field(default_factory=list)
    wigner: WignerOptions = _field(default_factory=WignerOptions)
    evolve: EvolveOptions = _field(default_factory=EvolveOptions)


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}" if path else message)


def _expect_mapping(value, path):
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {type(value).__name__}")
    return value


def _check_keys(value: dict, allowed, path: str):
    for key in value:
        if key not in allowed:
            _fail(f"{path}.{key}" if path else key, "unknown key")


def _get_number(value: dict, key: str, path: str, default=None, required=False):
    if key not in value:
        if required:
            _fail(path, f"missing required key {key!r}")
        return default
    v = value[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"{path}.{key}" if path else key, "expected a number")
    return float(v)


def _get_int(value: dict, key: str, path: str, default=None, required=False):
    if key not in value:
        if required:
            _fail(path, f"missing required key {key!r}")
        return default
    v = value[key]
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"{path}.{key}" if path else key, "expected an integer")
    return v


def _get_bool(value: dict, key: str, path: str, default=False):
    v = value.get(key, default)
    if not isinstance(v, bool):
        _fail(f"{path}.{key}" if path else key, "expected true or false")
    return v


def _get_str(value: dict, key: str, path: str, default=None, required=False):
    if key not in value:
        if required:
            _fail(path, f"missing required key {key!r}")
        return default
    v = value[key]
    if not isinstance(v, str):
        _fail(f"{path}.{key}" if path else key, "expected a string")
    return v


def _parse_amplitudes(value, path: str):
    if not isinstance(value, list) or not value:
        _fail(path, "expected a non-empty array of [re, im] pairs")
    out = []
    for i, item in enumerate(value):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in item)
        ):
            _fail(f"{path}[{i}]", "expected a [re, im] pair of numbers")
        out.append([float(item[0]), float(item[1])])
    return out


def _parse_sweep_axis(value, path: str) -> SweepAxis:
    _expect_mapping(value, path)
    _check_keys(value, ("parameter", "start", "stop", "count", "scale"), path)
    parameter = _get_str(value, "parameter", path, required=True)
    if parameter not in SWEEP_PARAMETERS:
        _fail(
            f"{path}.parameter",
            f"unknown sweep parameter {parameter!r}; choose from {SWEEP_PARAMETERS}",
        )
    start = _get_number(value, "start", path, required=True)
    stop = _get_number(value, "stop", path, required=True)
    count = _get_int(value, "count", path, required=True)
    if count < 1:
        _fail(f"{path}.count", "must be >= 1")
    scale = _get_str(value, "scale", path, default="linear")
    if scale not in ("linear", "log"):
        _fail(f"{path}.scale", "must be 'linear' or 'log'")
    if scale == "log" and (start <= 0 or stop <= 0):
        _fail(f"{path}.scale", "log scale requires positive start and stop")
    return SweepAxis(parameter=parameter, start=start, stop=stop, count=count, scale=scale)


def _parse_scenario(value, path: str) -> ScenarioConfig:
    _expect_mapping(value, path)
    allowed = (
        "omega_c",
        "control_time",
        "atoms",
        "initial_atomic",
        "target_atomic",
        "target_level",
    )
    _check_keys(value, allowed, path)
    control_time = _get_number(value, "control_time", path, required=True)
    if control_time < 0:
        _fail(f"{path}.control_time", "control_time must be nonnegative")
    atoms_raw = value.get("atoms")
    if not isinstance(atoms_raw, list) or not atoms_raw:
        _fail(f"{path}.atoms", "expected a non-empty array of atoms")
    atoms = []
    for i, atom in enumerate(atoms_raw):
        apath = f"{path}.atoms[{i}]"
        _expect_mapping(atom, apath)
        _check_keys(atom, ("energies", "couplings"), apath)
        energies = atom.get("energies")
        couplings = atom.get("couplings")
        if not isinstance(energies, list) or len(energies) < 2:
            _fail(f"{apath}.energies", "expected an array of at least two numbers")
        if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in energies):
            _fail(f"{apath}.energies", "expected numbers")
        n = len(energies)
        if (
            not isinstance(couplings, list)
            or len(couplings) != n
            or any(not isinstance(row, list) or len(row) != n for row in couplings)
        ):
            _fail(f"{apath}.couplings", f"expected a {n}x{n} matrix")
        for row in couplings:
            if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in row):
                _fail(f"{apath}.couplings", "expected numbers")
        atoms.append(
            {
                "energies": [float(x) for x in energies],
                "couplings": [[float(x) for x in row] for row in couplings],
            }
        )
    initial = value.get("initial_atomic")
    if initial is not None:
        initial = _parse_amplitudes(initial, f"{path}.initial_atomic")
    target = value.get("target_atomic")
    target_level = _get_int(value, "target_level", path)
    if target is not None and target_level is not None:
        _fail(path, "give either target_atomic or target_level, not both")
    if target is None and target_level is None:
        _fail(path, "missing target: give target_atomic or target_level")
    if target is not None:
        target = _parse_amplitudes(target, f"{path}.target_atomic")
    if target_level is not None:
        if len(atoms) != 1:
            _fail(f"{path}.target_level", "target_level needs a single atom")
        n_levels = len(atoms[0]["energies"])
        if not 1 <= target_level <= n_levels:
            _fail(
                f"{path}.target_level",
                f"level {target_level} out of range 1..{n_levels} (levels are 1-based)",
            )
    return ScenarioConfig(
        control_time=control_time,
        atoms=atoms,
        omega_c=_get_number(value, "omega_c", path, default=1.0),
        initial_atomic=initial,
        target_atomic=target,
        target_level=target_level,
    )


def parse_config_data(data) -> RunConfig:
    """Validate an already-decoded JSON document into a RunConfig."""
    _expect_mapping(data, "")
    allowed = (
        "label",
        "preset",
        "scenario",
        "g",
        "T",
        "theta",
        "phi",
        "n_atoms",
        "target",
        "n_max",
        "n_trunc",
        "restrict",
        "tasks",
        "output_dir",
        "overwrite",
        "threads",
        "seed",
        "sweep",
        "wigner",
        "evolve",
    )
    _check_keys(data, allowed, "")

    tasks = data.get("tasks")
    if not isinstance(tasks, list) or not tasks:
        _fail("tasks", "expected a non-empty array of task names")
    for i, task in enumerate(tasks):
        if task not in TASK_NAMES:
            _fail(f"tasks[{i}]", f"unknown task {task!r}; choose from {TASK_NAMES}")

    preset = _get_str(data, "preset", "")
    scenario = None
    if "scenario" in data:
        scenario = _parse_scenario(data["scenario"], "scenario")
    if preset is None and scenario is None:
        _fail("", "give either a preset name or an explicit scenario")
    if preset is not None and scenario is not None:
        _fail("", "give either preset or scenario, not both")
    if preset is not None and preset not in PRESET_NAMES:
        _fail("preset", f"unknown preset {preset!r}; choose from {PRESET_NAMES}")

    t_value = _get_number(data, "T", "")
    if t_value is not None and t_value < 0:
        _fail("T", f"control_time (T) must be nonnegative, got {t_value}")

    if preset is not None:
        for key in _PRESET_CONFIG_REQUIRED[preset]:
            if key not in data:
                _fail(key, f"preset {preset!r} requires key {key!r}")

    n_max = _get_int(data, "n_max", "", default=80)
    if n_max < 0:
        _fail("n_max", "must be >= 0")
    n_trunc = _get_int(data, "n_trunc", "")
    if n_trunc is not None and n_trunc < n_max:
        _fail("n_trunc", f"must be >= n_max ({n_max})")

    target = _get_str(data, "target", "")
    n_atoms = _get_int(data, "n_atoms", "", default=3)
    if n_atoms < 1:
        _fail("n_atoms", "must be >= 1")

    sweep_axes = []
    if "sweep" in data:
        sweep_block = _expect_mapping(data["sweep"], "sweep")
        _check_keys(sweep_block, ("axes",), "sweep")
        axes = sweep_block.get("axes")
        if not isinstance(axes, list) or not axes:
            _fail("sweep.axes", "expected a non-empty array of axes")
        sweep_axes = [
            _parse_sweep_axis(axis, f"sweep.axes[{i}]") for i, axis in enumerate(axes)
        ]
    if "sweep" in tasks and not sweep_axes:
        _fail("sweep", "the sweep task requires sweep.axes")

    wigner = WignerOptions()
    if "wigner" in data:
        block = _expect_mapping(data["wigner"], "wigner")
        allowed_w = ("x_min", "x_max", "x_count", "p_min", "p_max", "p_count", "localize")
        _check_keys(block, allowed_w, "wigner")
        wigner = WignerOptions(
            x_min=_get_number(block, "x_min", "wigner", default=-6.0),
            x_max=_get_number(block, "x_max", "wigner", default=6.0),
            x_count=_get_int(block, "x_count", "wigner", default=121),
            p_min=_get_number(block, "p_min", "wigner", default=-6.0),
            p_max=_get_number(block, "p_max", "wigner", default=6.0),
            p_count=_get_int(block, "p_count", "wigner", default=121),
            localize=_get_bool(block, "localize", "wigner"),
        )
        if wigner.x_count < 2 or wigner.p_count < 2:
            _fail("wigner", "x_count and p_count must be >= 2")

    evolve = EvolveOptions()
    if "evolve" in data:
        block = _expect_mapping(data["evolve"], "evolve")
        _check_keys(block, ("t_max", "count"), "evolve")
        evolve = EvolveOptions(
            t_max=_get_number(block, "t_max", "evolve"),
            count=_get_int(block, "count", "evolve", default=400),
        )
        if evolve.count < 2:
            _fail("evolve.count", "must be >= 2")
        if evolve.t_max is not None and evolve.t_max <= 0:
            _fail("evolve.t_max", "must be positive")

    threads = _get_int(data, "threads", "")
    if threads is not None and threads < 1:
        _fail("threads", "must be >= 1")

    return RunConfig(
        tasks=list(tasks),
        preset=preset,
        scenario=scenario,
        g=_get_number(data, "g", ""),
        T=t_value,
        theta=_get_number(data, "theta", ""),
        phi=_get_number(data, "phi", "", default=0.0),
        n_atoms=n_atoms,
        target=target,
        n_max=n_max,
        n_trunc=n_trunc,
        restrict=_get_bool(data, "restrict", "", default=True),
        label=_get_str(data, "label", "", default=""),
        output_dir=_get_str(data, "output_dir", "", default="out"),
        overwrite=_get_bool(data, "overwrite", ""),
        threads=threads,
        seed=_get_int(data, "seed", ""),
        sweep=sweep_axes,
        wigner=wigner,
        evolve=evolve,
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(
            f"invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}"
        ) from err
    return parse_config_data(data)


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(config: RunConfig) -> str:
    """Canonical JSON rendering; parse(serialize(c)) == c."""
    data = {"tasks": list(config.tasks)}
    if config.preset is not None:
        data["preset"] = config.preset
    if config.scenario is not None:
        sc = {
            "control_time": config.scenario.control_time,
            "atoms": config.scenario.atoms,
            "omega_c": config.scenario.omega_c,
        }
        if config.scenario.initial_atomic is not None:
            sc["initial_atomic"] = config.scenario.initial_atomic
        if config.scenario.target_atomic is not None:
            sc["target_atomic"] = config.scenario.target_atomic
        if config.scenario.target_level is not None:
            sc["target_level"] = config.scenario.target_level
        data["scenario"] = sc
    for key in ("g", "T", "theta"):
        value = getattr(config, key)
        if value is not None:
            data[key] = value
    data["phi"] = config.phi
    data["n_atoms"] = config.n_atoms
    if config.target is not None:
        data["target"] = config.target
    data["n_max"] = config.n_max
    if config.n_trunc is not None:
        data["n_trunc"] = config.n_trunc
    data["restrict"] = config.restrict
    data["label"] = config.label
    data["output_dir"] = config.output_dir
    data["overwrite"] = config.overwrite
    if config.threads is not None:
        data["threads"] = config.threads
    if config.seed is not None:
        data["seed"] = config.seed
    if config.sweep:
        data["sweep"] = {
            "axes": [
                {
                    "parameter": ax.parameter,
                    "start": ax.start,
                    "stop": ax.stop,
                    "count": ax.count,
                    "scale": ax.scale,
                }
                for ax in config.sweep
            ]
        }
    w = config.wigner
    data["wigner"] = {
        "x_min": w.x_min,
        "x_max": w.x_max,
        "x_count": w.x_count,
        "p_min": w.p_min,
        "p_max": w.p_max,
        "p_count": w.p_count,
        "localize": w.localize,
    }
    ev = {"count": config.evolve.count}
    if config.evolve.t_max is not None:
        ev["t_max"] = config.evolve.t_max
    data["evolve"] = ev
    return json.dumps(data, indent=2, sort_keys=True)
