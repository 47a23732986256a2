"""Operator-facing command line: subcommand dispatch, JSON configs,
CSV/JSON emission, and persisted run records.

Every run writes its outputs into one directory together with a
``record.json`` holding the config snapshot, package version, wall-clock
duration, and a sha256 manifest of every emitted file.  Identical configs
produce identical data digests (all searches are deterministic and no RNG
is used anywhere).  Exit codes: 0 success, 2 config error, 3 solver or
calibration failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .control import (
    DEFAULT_A0,
    DEFAULT_RAMP_FIELD,
    DEFAULT_RAMP_WELL,
    DEFAULT_T1,
    PulseSchedule,
    calibrate_gate,
    phase_gate_run,
    run_protocol,
    scan_t2,
    schedule_value,
)
from .coupling import CouplingParams, corner_energies, ising_gate_time, landscape_2d, verify_phase_model_2d
from .doublewell import DoubleWellParams, default_grid, potential_value, spectrum_scan
from .errors import ConfigError, NemsqubitError
from .gates import QubitBasis, fidelity, ideal_gate, reconstruct_gate
from .grids import build_grid
from .mechanics import PlateGeometry, arc_length, feasibility_report, hooke_potential, quartic_fit
from .schrodinger import DEFAULT_DT, DEFAULT_NPOINTS, discretize_hamiltonian, eigensolve, propagate

OUTPUT_ROOT_ENV = "NEMSQUBIT_OUT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _fmt(value) -> str:
    """Serialize one CSV cell; floats at 17 significant digits."""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class RunConfig:
    """Validated run description: verb plus its option mapping."""

    verb: str
    options: dict
    out: str

    def to_dict(self) -> dict:
        return {"verb": self.verb, "options": self.options, "out": self.out}


@dataclass
class RunRecord:
    config: RunConfig
    version: str
    duration_s: float
    outputs: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "version": self.version,
            "duration_s": self.duration_s,
            "outputs": self.outputs,
        }


def resolve_out_dir(out: str) -> Path:
    root = os.environ.get(OUTPUT_ROOT_ENV)
    path = Path(out)
    if root and not path.is_absolute():
        path = Path(root) / path
    return path


# ---------------------------------------------------------------------------
# verb implementations: validate(options) -> options, execute(options, outdir)
# ---------------------------------------------------------------------------


def _need(options: dict, key: str, kind=float):
    if key not in options or options[key] is None:
        raise ConfigError(f"missing required option {key!r}")
    try:
        return kind(options[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"option {key!r} must be a {kind.__name__}") from exc


def _get(options: dict, key: str, default, kind=float):
    if key not in options or options[key] is None:
        return default
    try:
        return kind(options[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"option {key!r} must be a {kind.__name__}") from exc


def _validate_spectrum(o: dict) -> dict:
    variable = _get(o, "variable", "well_separation", str).replace("-", "_")
    if variable not in ("well_separation", "field"):
        raise ConfigError("option 'variable' must be well-separation or field")
    lo = _need(o, "min")
    hi = _need(o, "max")
    if hi < lo:
        raise ConfigError("option 'max' must be >= 'min'")
    points = _get(o, "points", 61, int)
    if points < 1:
        raise ConfigError("option 'points' must be >= 1")
    k = _get(o, "k", 6, int)
    if not 1 <= k <= 8:
        raise ConfigError("option 'k' must be within 1..8")
    fixed = DoubleWellParams(A=_get(o, "a", 0.0), F=_get(o, "f", 0.0))
    return {
        "variable": variable,
        "min": lo,
        "max": hi,
        "points": points,
        "k": k,
        "a": fixed.A,
        "f": fixed.F,
        "n_points": _get(o, "n_points", DEFAULT_NPOINTS, int),
    }


def _run_spectrum(o: dict, outdir: Path) -> list[Path]:
    values = np.linspace(o["min"], o["max"], o["points"])
    fixed = DoubleWellParams(A=o["a"], F=o["f"])
    scan = spectrum_scan(o["variable"], values, fixed, k=o["k"], n_points=o["n_points"])
    header = ["scan_value"] + [f"E{i}" for i in range(o["k"])] + ["flags"]
    rows = [
        [float(v)] + [float(e) for e in scan.energies[i]] + [scan.flags[i]]
        for i, v in enumerate(scan.values)
    ]
    path = outdir / "spectrum.csv"
    write_csv(path, header, rows)
    return [path]


def _validate_wavefunctions(o: dict) -> dict:
    return {
        "a": _need(o, "a"),
        "f": _get(o, "f", 0.0),
        "k": _get(o, "k", 2, int),
        "n_points": _get(o, "n_points", DEFAULT_NPOINTS, int),
    }


def _run_wavefunctions(o: dict, outdir: Path) -> list[Path]:
    params = DoubleWellParams(A=o["a"], F=o["f"])
    grid = default_grid(params, o["n_points"])
    op = discretize_hamiltonian(grid, lambda x: potential_value(params, x))
    res = eigensolve(op, o["k"])
    x = grid.points()
    header = ["x"] + [f"psi{i}" for i in range(o["k"])] + ["V"]
    rows = [
        [float(x[j])] + [float(res.eigenvectors[i][j]) for i in range(o["k"])]
        + [float(potential_value(params, x[j]))]
        for j in range(grid.n_points)
    ]
    path = outdir / "wavefunctions.csv"
    write_csv(path, header, rows)
    epath = outdir / "energies.json"
    write_json(epath, {"eigenvalues": [float(e) for e in res.eigenvalues]})
    return [path, epath]


def _gate_family(o: dict) -> tuple[PulseSchedule, DoubleWellParams, dict]:
    a0 = _get(o, "a0", DEFAULT_A0)
    t1 = _get(o, "t1", DEFAULT_T1)
    ramp = _get(o, "ramp", DEFAULT_RAMP_WELL)
    t2 = _get(o, "t2", t1 + 7.0)
    schedule = PulseSchedule("well_separation", t1, t2, ramp, a0)
    base = DoubleWellParams(A=a0)
    extra = {
        "n_points": _get(o, "n_points", DEFAULT_NPOINTS, int),
        "dt": _get(o, "dt", DEFAULT_DT),
    }
    return schedule, base, extra


def _validate_gate_search(o: dict) -> dict:
    target = _get(o, "target", "sqrt_not", str).replace("-", "_")
    if target not in ("sqrt_not", "not"):
        raise ConfigError("option 'target' must be sqrt-not or not")
    schedule, base, extra = _gate_family(o)
    out = {
        "target": target,
        "a0": schedule.amplitude,
        "t1": schedule.t1,
        "ramp": schedule.ramp_T,
        "scan_min": _get(o, "scan_min", 26.0),
        "scan_max": _get(o, "scan_max", 30.5),
        "scan_step": _get(o, "scan_step", 0.25),
        **extra,
    }
    if out["scan_max"] <= out["scan_min"]:
        raise ConfigError("option 'scan_max' must exceed 'scan_min'")
    if out["scan_step"] <= 0:
        raise ConfigError("option 'scan_step' must be positive")
    return out


def _run_gate_search(o: dict, outdir: Path) -> list[Path]:
    template = PulseSchedule("well_separation", o["t1"], o["t1"] + 7.0, o["ramp"], o["a0"])
    base = DoubleWellParams(A=o["a0"])
    cal = calibrate_gate(
        o["target"],
        template,
        base,
        scan_range=(o["scan_min"], o["scan_max"]),
        scan_step=o["scan_step"],
        dt=o["dt"],
        n_points=o["n_points"],
    )
    scan_path = outdir / "scan.csv"
    write_csv(
        scan_path,
        ["t2", "mag_plus", "mag_minus", "phase_diff"],
        [
            [float(t), float(mp), float(mm), float(pd)]
            for t, mp, mm, pd in zip(
                cal.scan.t2, cal.scan.mag_plus, cal.scan.mag_minus, cal.scan.phase_diff
            )
        ],
    )
    result_path = outdir / "search.json"
    write_json(
        result_path,
        {
            "target": cal.target,
            "t2_star": cal.t2_star,
            "residual": cal.residual,
            "n_runs": cal.n_runs,
        },
    )
    return [scan_path, result_path]


def _validate_gate_run(o: dict) -> dict:
    schedule, base, extra = _gate_family(o)
    initial = _get(o, "initial", "plus", str)
    if initial not in ("plus", "minus"):
        raise ConfigError("option 'initial' must be plus or minus")
    t3 = _get(o, "t3", schedule.t2 + 20.0)
    if t3 < schedule.t2 + 10.0:
        raise ConfigError("option 't3' must be at least t2 + 10")
    return {
        "t1": schedule.t1,
        "t2": schedule.t2,
        "ramp": schedule.ramp_T,
        "a0": schedule.amplitude,
        "initial": initial,
        "t3": t3,
        **extra,
    }


def _run_gate_run(o: dict, outdir: Path) -> list[Path]:
    schedule = PulseSchedule("well_separation", o["t1"], o["t2"], o["ramp"], o["a0"])
    base = DoubleWellParams(A=o["a0"])
    r = run_protocol(
        o["initial"], schedule, base, t3=o["t3"], dt=o["dt"], n_points=o["n_points"]
    )
    traj_path = outdir / "trajectory.csv"
    write_csv(
        traj_path,
        ["t", "schedule_value", "mag_plus", "mag_minus", "phase_diff"],
        [
            [float(t), float(a), float(mp), float(mm), float(pd)]
            for t, a, mp, mm, pd in zip(
                r.times, r.schedule_values, r.traj_mag_plus, r.traj_mag_minus, r.traj_phase_diff
            )
        ],
    )
    term_path = outdir / "terminal.json"
    write_json(
        term_path,
        {
            "t3": r.t3,
            "mag_plus": r.mag_plus,
            "mag_minus": r.mag_minus,
            "phase_plus": r.phase_plus,
            "phase_minus": r.phase_minus,
            "phase_diff": r.phase_diff,
            "stationary": r.stationary,
            "norm_drift": r.norm_drift,
        },
    )
    return [traj_path, term_path]


def _validate_phase_gate(o: dict) -> dict:
    t1 = _get(o, "t1", 2.0)
    t2 = _get(o, "t2", 2.5)
    if t2 < t1:
        raise ConfigError("option 't2' must be >= 't1'")
    a = _get(o, "a", 3.0)
    if a < 2.5:
        raise ConfigError("option 'a' must be >= 2.5 for the phase gate")
    return {
        "f0": _get(o, "f0", 0.5),
        "t1": t1,
        "t2": t2,
        "a": a,
        "ramp": _get(o, "ramp", DEFAULT_RAMP_FIELD),
        "t_end": _get(o, "t_end", t2 + 2.0),
        "initial": _get(o, "initial", "plus", str),
        "n_points": _get(o, "n_points", DEFAULT_NPOINTS, int),
        "dt": _get(o, "dt", DEFAULT_DT),
    }


def _run_phase_gate(o: dict, outdir: Path) -> list[Path]:
    base = DoubleWellParams(A=o["a"])
    r = phase_gate_run(
        o["f0"],
        o["t1"],
        o["t2"],
        base,
        initial_side=o["initial"],
        ramp_T=o["ramp"],
        t_end=o["t_end"],
        dt=o["dt"],
        n_points=o["n_points"],
    )
    series_path = outdir / "phase.csv"
    write_csv(
        series_path,
        ["t", "theta"],
        [[float(t), float(th)] for t, th in zip(r.times, r.theta_series)],
    )
    sum_path = outdir / "phase.json"
    write_json(
        sum_path,
        {
            "theta": r.theta,
            "magnitude_change": r.magnitude_change,
            "adiabatic_warning": r.adiabatic_warning,
            "norm_drift": r.norm_drift,
        },
    )
    return [series_path, sum_path]


def _validate_gate_tomography(o: dict) -> dict:
    out = _validate_gate_run({**o, "initial": "plus"})
    return out


def _run_gate_tomography(o: dict, outdir: Path) -> list[Path]:
    schedule = PulseSchedule("well_separation", o["t1"], o["t2"], o["ramp"], o["a0"])
    base = DoubleWellParams(A=o["a0"])
    grid = default_grid(base, o["n_points"])
    run_plus = run_protocol("plus", schedule, base, t3=o["t3"], dt=o["dt"], grid=grid)
    run_minus = run_protocol("minus", schedule, base, t3=o["t3"], dt=o["dt"], grid=grid)
    basis = QubitBasis.for_params(base, grid)
    rec = reconstruct_gate(run_plus, run_minus, basis)
    refs = {
        "identity": ideal_gate("identity"),
        "not": ideal_gate("not"),
        "sqrt_not_plus": ideal_gate("sqrt_not_plus"),
        "sqrt_not_minus": ideal_gate("sqrt_not_minus"),
        "hadamard": ideal_gate("hadamard"),
    }
    path = outdir / "tomography.json"
    write_json(
        path,
        {
            "matrix_re": rec.matrix.real.tolist(),
            "matrix_im": rec.matrix.imag.tolist(),
            "leakage": list(rec.leakage),
            "reliable": rec.reliable,
            "fidelities": {name: fidelity(rec.matrix, u) for name, u in refs.items()},
        },
    )
    return [path]


def _validate_two_qubit(o: dict) -> dict:
    params = CouplingParams(
        eps0S=_get(o, "eps0s", 200.0),
        X_cap=_get(o, "x_cap", 10.0),
        V1=_get(o, "v1", 1.0),
        a=_get(o, "a", 2.0),
    )
    out = {
        "eps0s": params.eps0S,
        "x_cap": params.X_cap,
        "v1": params.V1,
        "a": params.a,
        "grid_n": _get(o, "grid_n", 201, int),
        "x_half": _get(o, "x_half", params.a + 2.0),
        "verify": _get(o, "verify", False, bool),
        "t": _get(o, "t", 2.0),
        "n_2d": _get(o, "n_2d", 128, int),
        "dt_2d": _get(o, "dt_2d", 1e-3),
    }
    if out["grid_n"] ** 2 > 512**2:
        raise ConfigError("option 'grid_n' is capped at 512")
    return out


def _run_two_qubit(o: dict, outdir: Path) -> list[Path]:
    params = CouplingParams(eps0S=o["eps0s"], X_cap=o["x_cap"], V1=o["v1"], a=o["a"])
    dw = (DoubleWellParams(A=o["a"]), DoubleWellParams(A=o["a"]))
    ce = corner_energies(params)
    corners_path = outdir / "corners.json"
    write_json(
        corners_path,
        {
            "U0": ce.U0,
            "E_plus": ce.E_plus,
            "E_minus": ce.E_minus,
            "EX": ce.EX,
            "first_order_rel_error": ce.first_order_rel_error,
            "ising_gate_time": ising_gate_time(ce.EX),
        },
    )
    grid = build_grid(-o["x_half"], o["x_half"], o["grid_n"])
    land = landscape_2d(params, dw, grid, grid)
    land_path = outdir / "landscape.csv"
    x = grid.points()
    rows = []
    for i in range(grid.n_points):
        for j in range(grid.n_points):
            rows.append([float(x[i]), float(x[j]), float(land.values[i, j])])
    write_csv(land_path, ["x1", "x2", "V"], rows)
    minima_path = outdir / "minima.json"
    write_json(
        minima_path,
        {
            "minima": [
                {"x1": m.x1, "x2": m.x2, "energy": m.energy, "grid_energy": m.grid_energy}
                for m in land.minima
            ]
        },
    )
    outputs = [corners_path, land_path, minima_path]
    if o["verify"]:
        report = verify_phase_model_2d(params, dw, o["t"], n_points=o["n_2d"], dt=o["dt_2d"])
        verify_path = outdir / "verify.json"
        write_json(verify_path, report.to_dict())
        outputs.append(verify_path)
    return outputs


def _validate_mechanics(o: dict) -> dict:
    geom = PlateGeometry(
        L0=_need(o, "l0"),
        y0=_need(o, "y0"),
        kappa=_get(o, "kappa", 1.0),
        boundary=_get(o, "boundary", "fixed", str),
    )
    return {
        "l0": geom.L0,
        "y0": geom.y0,
        "kappa": geom.kappa,
        "boundary": geom.boundary,
        "samples": _get(o, "samples", 121, int),
    }


def _run_mechanics(o: dict, outdir: Path) -> list[Path]:
    geom = PlateGeometry(L0=o["l0"], y0=o["y0"], kappa=o["kappa"], boundary=o["boundary"])
    fit = quartic_fit(geom)
    xs = np.linspace(-0.98 * geom.y0, 0.98 * geom.y0, o["samples"])
    profile_path = outdir / "profile.csv"
    write_csv(
        profile_path,
        ["x0", "L", "V"],
        [
            [float(x0), float(arc_length(geom, x0)), float(hooke_potential(geom, x0))]
            for x0 in xs
        ],
    )
    fit_path = outdir / "fit.json"
    write_json(
        fit_path,
        {
            "lambda_fit": fit.lambda_fit,
            "a_fit": fit.a_fit,
            "V0": fit.V0,
            "barrier_height": fit.barrier_height,
            "fit_residual": fit.fit_residual,
            "printed_lambda": fit.printed_lambda,
            "printed_a": fit.printed_a,
            "lambda_discrepancy": fit.lambda_discrepancy,
            "a_discrepancy": fit.a_discrepancy,
        },
    )
    return [profile_path, fit_path]


def _parse_range(o: dict, key: str) -> tuple[float, float]:
    raw = o.get(key)
    if raw is None:
        raise ConfigError(f"missing required option {key!r}")
    if isinstance(raw, (list, tuple)):
        parts = [float(v) for v in raw]
    else:
        try:
            parts = [float(v) for v in str(raw).split(",")]
        except ValueError as exc:
            raise ConfigError(f"option {key!r} must be 'lo,hi'") from exc
    if len(parts) != 2 or not 0 < parts[0] <= parts[1]:
        raise ConfigError(f"option {key!r} must be 'lo,hi' with 0 < lo <= hi")
    return parts[0], parts[1]


def _validate_feasibility(o: dict) -> dict:
    mass = _parse_range(o, "mass")
    length = _parse_range(o, "length")
    kappa = _parse_range(o, "kappa")
    samples = _get(o, "samples", 3, int)
    if samples < 1:
        raise ConfigError("option 'samples' must be >= 1")
    return {"mass": list(mass), "length": list(length), "kappa": list(kappa), "samples": samples}


def _run_feasibility(o: dict, outdir: Path) -> list[Path]:
    rows = feasibility_report(tuple(o["mass"]), tuple(o["length"]), tuple(o["kappa"]), o["samples"])
    path = outdir / "feasibility.csv"
    write_csv(
        path,
        [
            "mass",
            "length",
            "kappa",
            "x_u",
            "t_u",
            "frequency",
            "flag_length",
            "flag_displacement",
            "flag_mass",
            "flag_frequency",
            "candidate",
        ],
        [
            [
                r.mass,
                r.length,
                r.kappa,
                r.x_u,
                r.t_u,
                r.frequency,
                int(r.flags["length"]),
                int(r.flags["displacement"]),
                int(r.flags["mass"]),
                int(r.flags["frequency"]),
                int(r.candidate),
            ]
            for r in rows
        ],
    )
    return [path]


def _validate_convergence(o: dict) -> dict:
    return {
        "a": _get(o, "a", 3.0),
        "n_points": _get(o, "n_points", 257, int),
        "dt": _get(o, "dt", 2e-3),
        "t_end": _get(o, "t_end", 1.0),
    }


def _run_convergence(o: dict, outdir: Path) -> list[Path]:
    """Grid and time-step halving ratios; both should sit near 4."""
    params = DoubleWellParams(A=o["a"])
    rows = []
    n0 = o["n_points"]
    energies = {}
    for n in (n0, 2 * n0 - 1, 4 * n0 - 3):
        grid = default_grid(params, n)
        op = discretize_hamiltonian(grid, lambda x: potential_value(params, x))
        energies[n] = eigensolve(op, 4).eigenvalues
    for level in range(4):
        e0, e1, e2 = (energies[n][level] for n in (n0, 2 * n0 - 1, 4 * n0 - 3))
        ratio = (e0 - e1) / (e1 - e2) if e1 != e2 else math.inf
        rows.append(["grid", level, float(ratio)])

    grid = default_grid(params, 2 * n0 - 1)
    from .doublewell import gaussian_state

    state0 = gaussian_state(params, "plus", grid)
    pot = lambda x, t: potential_value(params, x)
    probes = {}
    for dt in (o["dt"], o["dt"] / 2, o["dt"] / 4):
        res = propagate(state0.copy(), pot, o["t_end"], dt=dt)
        amp = res.state.amplitudes
        idx = np.argmin(np.abs(grid.points() - params.A))
        probes[dt] = complex(amp[idx])
    v0, v1, v2 = (probes[d] for d in (o["dt"], o["dt"] / 2, o["dt"] / 4))
    ratio = abs(v0 - v1) / abs(v1 - v2)
    rows.append(["timestep", 0, float(ratio)])
    path = outdir / "convergence.csv"
    write_csv(path, ["check", "level", "ratio"], rows)
    return [path]


VERBS = {
    "spectrum": (_validate_spectrum, _run_spectrum),
    "wavefunctions": (_validate_wavefunctions, _run_wavefunctions),
    "gate-search": (_validate_gate_search, _run_gate_search),
    "gate-run": (_validate_gate_run, _run_gate_run),
    "phase-gate": (_validate_phase_gate, _run_phase_gate),
    "gate-tomography": (_validate_gate_tomography, _run_gate_tomography),
    "two-qubit": (_validate_two_qubit, _run_two_qubit),
    "mechanics": (_validate_mechanics, _run_mechanics),
    "feasibility": (_validate_feasibility, _run_feasibility),
    "convergence": (_validate_convergence, _run_convergence),
}


def run(config: RunConfig) -> RunRecord:
    """Validate and execute one run; outputs plus record.json land in the
    config's output directory."""
    if config.verb not in VERBS:
        raise ConfigError(f"unknown verb {config.verb!r}")
    validate, execute = VERBS[config.verb]
    normalized = validate(config.options)
    config = RunConfig(config.verb, normalized, config.out)
    outdir = resolve_out_dir(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    files = execute(normalized, outdir)
    duration = time.perf_counter() - started
    record = RunRecord(
        config=config,
        version=__version__,
        duration_s=duration,
        outputs=[
            {"path": str(f.relative_to(outdir)), "sha256": sha256_file(f)} for f in files
        ],
    )
    write_json(outdir / "record.json", record.to_dict())
    return record


def _sweep_child(payload: tuple) -> dict:
    verb, options, out = payload
    try:
        record = run(RunConfig(verb, options, out))
        return {"out": out, "status": "ok", "outputs": record.outputs}
    except NemsqubitError as exc:
        return {"out": out, "status": f"failed: {exc}", "outputs": []}


def run_sweep(base: RunConfig, axis: str, values: list, parallel: int = 1) -> tuple[list[dict], Path]:
    """One run per value with the dotted ``axis`` option replaced; outputs
    in per-value subdirectories plus an aggregate index.csv."""
    if not values:
        raise ConfigError("sweep needs at least one value")
    if axis.startswith("options."):
        axis = axis.split(".", 1)[1]
    if parallel < 1:
        raise ConfigError("option 'parallel' must be >= 1")
    validate, _ = VERBS[base.verb]
    jobs = []
    for v in values:
        options = dict(base.options)
        options[axis] = v
        validate(options)  # fail before any output exists
        jobs.append((base.verb, options, str(Path(base.out) / f"{axis}={_fmt(v)}")))
    if parallel == 1:
        results = [_sweep_child(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_sweep_child, jobs))
    outdir = resolve_out_dir(base.out)
    outdir.mkdir(parents=True, exist_ok=True)
    index_path = outdir / "index.csv"
    write_csv(
        index_path,
        ["value", "directory", "status"],
        [[_fmt(v), r["out"], r["status"]] for v, r in zip(values, results)],
    )
    return results, index_path


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; CLI flags override its options")
    sub.add_argument("--out", help="output directory (default runs/<verb>)")


_VERB_FLAGS = {
    "spectrum": ["variable", "min", "max", "points", "k", "a", "f", "n_points"],
    "wavefunctions": ["a", "f", "k", "n_points"],
    "gate-search": [
        "target",
        "a0",
        "t1",
        "ramp",
        "scan_min",
        "scan_max",
        "scan_step",
        "n_points",
        "dt",
    ],
    "gate-run": ["t2", "a0", "t1", "ramp", "t3", "initial", "n_points", "dt"],
    "phase-gate": ["f0", "t1", "t2", "a", "ramp", "t_end", "initial", "n_points", "dt"],
    "gate-tomography": ["t2", "a0", "t1", "ramp", "t3", "n_points", "dt"],
    "two-qubit": ["eps0s", "x_cap", "v1", "a", "grid_n", "x_half", "verify", "t", "n_2d", "dt_2d"],
    "mechanics": ["l0", "y0", "kappa", "boundary", "samples"],
    "feasibility": ["mass", "length", "kappa", "samples"],
    "convergence": ["a", "n_points", "dt", "t_end"],
}

_BOOL_FLAGS = {"verify"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nemsqubit",
        description="Buckled-plate NEMS qubit simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="verb", required=True)
    for verb, flags in _VERB_FLAGS.items():
        sub = subs.add_parser(verb)
        _add_common(sub)
        for flag in flags:
            name = "--" + flag.replace("_", "-")
            if flag in _BOOL_FLAGS:
                sub.add_argument(name, action="store_true", default=None)
            else:
                # validators coerce types and report the offending field
                sub.add_argument(name, type=str, default=None)
    sweep = subs.add_parser("sweep")
    _add_common(sweep)
    sweep.add_argument("--axis", required=True, help="option name to vary, e.g. 'a'")
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--parallel", type=int, default=1)
    return parser


def _collect_config(args: argparse.Namespace, verb: str) -> RunConfig:
    options: dict = {}
    out = None
    if args.config:
        cfg_path = Path(args.config)
        if not cfg_path.exists():
            raise ConfigError(f"config file {args.config} does not exist")
        try:
            payload = json.loads(cfg_path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if payload.get("verb", verb) != verb:
            raise ConfigError(
                f"config verb {payload.get('verb')!r} does not match subcommand {verb!r}"
            )
        options.update(payload.get("options", {}))
        out = payload.get("out")
    for flag in _VERB_FLAGS.get(verb, []):
        value = getattr(args, flag, None)
        if value is not None:
            options[flag] = value
    if args.out:
        out = args.out
    if out is None:
        out = f"runs/{verb}"
    return RunConfig(verb, options, out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "sweep":
            if not args.config:
                raise ConfigError("sweep requires --config with the base run")
            payload = json.loads(Path(args.config).read_text())
            base = RunConfig(
                payload["verb"], payload.get("options", {}), args.out or payload.get("out", "runs/sweep")
            )
            if base.verb not in VERBS:
                raise ConfigError(f"unknown verb {base.verb!r} in sweep config")
            values = [v for v in args.values.split(",") if v != ""]
            if not values:
                raise ConfigError("sweep needs at least one value")
            typed = []
            for v in values:
                try:
                    typed.append(float(v))
                except ValueError:
                    typed.append(v)
            results, _ = run_sweep(base, args.axis, typed, parallel=args.parallel)
            failed = [r for r in results if r["status"] != "ok"]
            for r in results:
                print(f"{r['out']}: {r['status']}")
            return EXIT_SOLVER if failed else EXIT_OK
        config = _collect_config(args, args.verb)
        record = run(config)
        outdir = resolve_out_dir(config.out)
        print(f"wrote {len(record.outputs)} file(s) to {outdir}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NemsqubitError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
