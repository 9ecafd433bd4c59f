"""Task execution: scenario assembly, solving, sweeps, file output.

Output files are deterministic for a fixed config and package version:
floats are rendered with 17 significant digits and sweep rows are emitted in
lexicographic grid order regardless of worker scheduling.
"""

from __future__ import annotations

import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__
from .analysis import fock_statistics, poisson_reference, wigner
from .config import RunConfig, ScenarioConfig, ConfigError
from .control import (
    coherent_approximation,
    forward_population,
    parity_superposition,
    solve_scenario,
)
from .model import (
    ScenarioSpec,
    build_hamiltonian,
    multilevel,
    multiqubit,
    rabi_resonant,
)
from .operators import (
    AtomicSystem,
    FieldSpace,
    atomic_basis_state,
    coherent_state,
    embed_atomic_operator,
)
from .propagator import eigendecompose, population_timeseries

FLOAT_FORMAT = "%.17g"


class RunError(RuntimeError):
    pass


def _fmt(value) -> str:
    return FLOAT_FORMAT % float(value)


def _pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _amplitude_array(pairs) -> np.ndarray:
    return np.array([p[0] + 1j * p[1] for p in pairs], dtype=complex)


def write_csv(path: str, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# scenario assembly

def apply_overrides(config: RunConfig, overrides: dict) -> RunConfig:
    fields = {}
    for key, value in overrides.items():
        if key in ("n_atoms", "n_max"):
            fields[key] = int(round(value))
        else:
            fields[key] = float(value)
    return replace(config, **fields)


def build_scenario(config: RunConfig, overrides: dict = None) -> ScenarioSpec:
    if overrides:
        config = apply_overrides(config, overrides)
    if config.preset is not None:
        if config.preset == "rabi_resonant":
            return rabi_resonant(
                g=config.g,
                control_time=config.T,
                theta=config.theta,
                phi=config.phi,
                n_max=config.n_max,
                n_trunc=config.n_trunc,
            )
        if config.preset.startswith("multilevel_"):
            return multilevel(
                config.preset.split("_", 1)[1],
                control_time=config.T,
                g=config.g,
                n_max=config.n_max,
                n_trunc=config.n_trunc,
            )
        return multiqubit(
            target=config.target,
            control_time=config.T,
            n_atoms=config.n_atoms,
            g=config.g if config.g is not None else 0.01,
            n_max=config.n_max,
            n_trunc=config.n_trunc,
        )

    sc: ScenarioConfig = config.scenario
    atoms = AtomicSystem(
        [a["energies"] for a in sc.atoms], [a["couplings"] for a in sc.atoms]
    )
    if sc.target_atomic is not None:
        target = _amplitude_array(sc.target_atomic)
    else:
        # config levels are 1-based
        target = atomic_basis_state(atoms, (sc.target_level - 1,))
    initial = (
        _amplitude_array(sc.initial_atomic) if sc.initial_atomic is not None else None
    )
    control_time = config.T if config.T is not None else sc.control_time
    field = FieldSpace(
        config.n_max, -1 if config.n_trunc is None else config.n_trunc
    )
    return ScenarioSpec(
        atoms=atoms,
        field=field,
        control_time=control_time,
        target_atomic=target,
        initial_atomic=initial,
        omega_c=sc.omega_c,
        label=config.label,
    )


# ---------------------------------------------------------------------------
# sweep engine

def sweep_grid(config: RunConfig):
    """Axis values and the lexicographic list of override dicts."""
    axes_values = []
    for axis in config.sweep:
        if axis.scale == "log":
            values = np.geomspace(axis.start, axis.stop, axis.count)
        else:
            values = np.linspace(axis.start, axis.stop, axis.count)
        if axis.parameter in ("n_atoms", "n_max"):
            values = np.array([int(round(v)) for v in values], dtype=float)
        axes_values.append(values)
    points = []
    shape = [len(v) for v in axes_values]
    for flat in range(int(np.prod(shape))):
        idx = np.unravel_index(flat, shape)
        points.append(
            {
                axis.parameter: axes_values[k][idx[k]]
                for k, axis in enumerate(config.sweep)
            }
        )
    return axes_values, points


_DECOMP_CACHE = {}


def _hamiltonian_cache_key(spec: ScenarioSpec) -> bytes:
    parts = [
        repr(spec.omega_c).encode(),
        repr(spec.field.n_trunc).encode(),
    ]
    for e, g in zip(spec.atoms.energies, spec.atoms.couplings):
        parts.append(e.tobytes())
        parts.append(g.tobytes())
    return b"|".join(parts)


def _cached_decomposition(spec: ScenarioSpec):
    key = _hamiltonian_cache_key(spec)
    if key not in _DECOMP_CACHE:
        _DECOMP_CACHE.clear()  # one decomposition per worker is enough
        _DECOMP_CACHE[key] = eigendecompose(build_hamiltonian(spec))
    return _DECOMP_CACHE[key]


def _sweep_point(args):
    config, overrides = args
    spec = build_scenario(config, overrides)
    decomp = _cached_decomposition(spec)
    solution = solve_scenario(
        spec, baseline=True, restrict=config.restrict, decomp=decomp
    )
    report = fock_statistics(solution.optimal_state)
    fidelity = solution.fidelity
    ratio = solution.coherent_fidelity / fidelity if fidelity > 0 else float("nan")
    values = [overrides[axis.parameter] for axis in config.sweep]
    return values + [
        fidelity,
        solution.coherent_fidelity,
        ratio,
        report.n_av,
        report.mandel_q,
    ]


def run_sweep(config: RunConfig, threads: int):
    _, points = sweep_grid(config)
    jobs = [(config, p) for p in points]
    if threads == 1 or len(points) == 1:
        rows = [_sweep_point(job) for job in jobs]
    else:
        chunk = max(1, len(jobs) // (threads * 4))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_point, jobs, chunksize=chunk))
    header = [axis.parameter for axis in config.sweep] + [
        "fidelity",
        "coherent_fidelity",
        "coherent_ratio",
        "n_av",
        "mandel_q",
    ]
    return header, rows


# ---------------------------------------------------------------------------
# run

TASK_FILES = {
    "solve": ("solution.json", "statistics.csv"),
    "baseline": ("solution.json", "statistics.csv"),
    "wigner": ("wigner.csv",),
    "evolve": ("populations.csv",),
    "sweep": ("sweep.csv",),
}


def _resolved_parameters(config: RunConfig, spec: ScenarioSpec = None) -> dict:
    params = {
        "preset": config.preset,
        "g": config.g,
        "T": config.T,
        "theta": config.theta,
        "phi": config.phi,
        "n_atoms": config.n_atoms,
        "target": config.target,
        "n_max": config.n_max,
        "n_trunc": config.n_trunc,
        "restrict": config.restrict,
        "tasks": list(config.tasks),
        "threads": config.threads,
        "seed": config.seed,
    }
    if config.scenario is not None:
        params["scenario"] = {
            "control_time": config.scenario.control_time,
            "omega_c": config.scenario.omega_c,
            "n_atoms": len(config.scenario.atoms),
        }
    if spec is not None:
        params["n_trunc"] = spec.field.n_trunc
        params["control_time"] = spec.control_time
        params["label"] = spec.label
    return params


def run(config: RunConfig, stream=None) -> int:
    """Execute the configured tasks; returns the process exit status.

    Task failures are reported individually and do not abort sibling tasks;
    any failure yields exit status 1.
    """
    stream = stream if stream is not None else sys.stderr
    started = time.time()
    out_dir = config.output_dir
    os.makedirs(out_dir, exist_ok=True)

    planned = ["manifest.json"]
    for task in config.tasks:
        for name in TASK_FILES[task]:
            if name not in planned:
                planned.append(name)
    if not config.overwrite:
        existing = [
            name for name in planned if os.path.exists(os.path.join(out_dir, name))
        ]
        if existing:
            print(
                f"error: output files already exist in {out_dir}: "
                f"{', '.join(existing)} (use --overwrite)",
                file=stream,
            )
            return 1

    if config.seed is not None:
        np.random.seed(config.seed)

    threads = config.threads or os.cpu_count() or 1
    failures = []
    written = []

    needs_solution = any(t in config.tasks for t in ("solve", "baseline", "wigner", "evolve"))
    spec = None
    decomp = None
    solution = None
    localized = None
    combined = False
    try:
        spec = build_scenario(config)
        if needs_solution:
            decomp = eigendecompose(build_hamiltonian(spec))
            solution = solve_scenario(
                spec,
                baseline="baseline" in config.tasks,
                restrict=config.restrict,
                decomp=decomp,
            )
            localized, combined = parity_superposition(solution)
    except Exception as err:  # noqa: BLE001 - surface per spec, keep going
        print(f"error: scenario setup failed: {err}", file=stream)
        failures.append("setup")

    if solution is not None and ("solve" in config.tasks or "baseline" in config.tasks):
        try:
            report = fock_statistics(solution.optimal_state)
            doc = {
                "label": spec.label,
                "fidelity": solution.fidelity,
                "spectrum": [float(v) for v in solution.spectrum],
                "optimal_state": [_pair(z) for z in solution.optimal_state],
                "coherent_fidelity": solution.coherent_fidelity,
                "alpha_star": _pair(solution.coherent_alpha)
                if solution.coherent_alpha is not None
                else None,
                "n_av": report.n_av,
                "mandel_q": None if np.isnan(report.mandel_q) else report.mandel_q,
                "parity_expectation": report.parity,
                "localized_pair": combined,
                "n_max": spec.field.n_max,
                "n_trunc": spec.field.n_trunc,
            }
            path = os.path.join(out_dir, "solution.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
                fh.write("\n")
            written.append("solution.json")

            ref = poisson_reference(report.n_av, spec.field.n_trunc)
            rows = [
                [n, state.real, state.imag, abs(state) ** 2, ref[n]]
                for n, state in enumerate(solution.optimal_state)
            ]
            write_csv(
                os.path.join(out_dir, "statistics.csv"),
                ["n", "re_amplitude", "im_amplitude", "probability", "poisson_reference"],
                rows,
            )
            written.append("statistics.csv")
        except Exception as err:  # noqa: BLE001
            print(f"error: solve task failed: {err}", file=stream)
            failures.append("solve")

    if solution is not None and "wigner" in config.tasks:
        try:
            opts = config.wigner
            state = localized if opts.localize else solution.optimal_state
            grid = wigner(
                state,
                np.linspace(opts.x_min, opts.x_max, opts.x_count),
                np.linspace(opts.p_min, opts.p_max, opts.p_count),
            )
            if not grid.reliable:
                print(
                    "warning: wigner grid reaches beyond the reliable region "
                    f"(|beta|^2 > 0.8 * {spec.field.n_trunc}); increase n_trunc",
                    file=stream,
                )
            rows = [
                [grid.x[i], grid.p[j], grid.values[i, j]]
                for i in range(grid.x.size)
                for j in range(grid.p.size)
            ]
            write_csv(os.path.join(out_dir, "wigner.csv"), ["x", "p", "wigner"], rows)
            written.append("wigner.csv")
        except Exception as err:  # noqa: BLE001
            print(f"error: wigner task failed: {err}", file=stream)
            failures.append("wigner")

    if solution is not None and "evolve" in config.tasks:
        try:
            t_max = config.evolve.t_max
            if t_max is None:
                t_max = max(
                    1.25 * 2 * np.pi / spec.omega_c, 1.5 * spec.control_time
                )
            times = np.linspace(0.0, t_max, config.evolve.count)
            alpha = coherent_approximation(localized)
            coh = coherent_state(spec.field, alpha)
            proj_target = embed_atomic_operator(
                np.outer(spec.target_atomic, spec.target_atomic.conj()), spec.composite
            )
            proj_initial = embed_atomic_operator(
                np.outer(spec.initial_atomic, spec.initial_atomic.conj()),
                spec.composite,
            )
            series = {}
            for tag, field_state in (("opt", localized), ("coh", coh)):
                psi0 = np.kron(field_state, spec.initial_atomic)
                series[f"target_{tag}"] = population_timeseries(
                    decomp, psi0, times, proj_target
                )
                series[f"initial_{tag}"] = population_timeseries(
                    decomp, psi0, times, proj_initial
                )
            rows = [
                [
                    times[k],
                    series["target_opt"][k],
                    series["target_coh"][k],
                    series["initial_opt"][k],
                    series["initial_coh"][k],
                ]
                for k in range(times.size)
            ]
            write_csv(
                os.path.join(out_dir, "populations.csv"),
                [
                    "t",
                    "p_target_optimal",
                    "p_target_coherent",
                    "p_initial_optimal",
                    "p_initial_coherent",
                ],
                rows,
            )
            written.append("populations.csv")
        except Exception as err:  # noqa: BLE001
            print(f"error: evolve task failed: {err}", file=stream)
            failures.append("evolve")

    if "sweep" in config.tasks:
        try:
            header, rows = run_sweep(config, threads)
            write_csv(os.path.join(out_dir, "sweep.csv"), header, rows)
            written.append("sweep.csv")
        except Exception as err:  # noqa: BLE001
            print(f"error: sweep task failed: {err}", file=stream)
            failures.append("sweep")

    manifest = {
        "version": __version__,
        "label": config.label,
        "parameters": _resolved_parameters(config, spec),
        "tasks": list(config.tasks),
        "failures": failures,
        "files": written,
        "wall_clock_seconds": time.time() - started,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return 1 if failures else 0
