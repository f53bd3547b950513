"""Batch front end: scenario configuration, execution, CSV/manifest output.

Invocation::

    radtrap <mode> (--config FILE | --preset NAME) [--set key=value ...] --out DIR

Modes: evolve, spectrum, sweep, asymptote, oracle.  Configuration is a
JSON object; ``--set`` overrides individual (dot-separated) keys.  Every
run writes one CSV per result table plus ``manifest.json`` recording the
fully resolved scenario; the manifest can be fed back as ``--config`` and
reproduces the CSV output bit for bit.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .dynamics import (Trajectory, asymptotic_pump_rate_inhom,
                       asymptotic_pump_rate_rad, estimate_asymptote, evolve,
                       pump_rate_estimate)
from .errors import ConfigError, RadtrapError
from .model import Inhomogeneous, PopulationState, Radiative, SystemParams, gamma_ab
from .oracle import StochasticConfig, simulate_stochastic
from .steadystate import stationary, sweep
from .trapping import absorption_spectrum, gamma_selfconsistent_rad, spectral_distribution

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

MODES = ("evolve", "spectrum", "sweep", "asymptote", "oracle")

_UNIT_LINES = (
    "all rates in units of gamma; all times in units of 1/gamma",
)

#: Default scenario fields shared by every mode.
_COMMON_DEFAULTS = {
    "gamma_prime": 1.0,
    "gamma0": 0.0,
    "pump_rate": 10.0,
}

_MODE_DEFAULTS = {
    "evolve": {
        "initial": [0.0, 0.5, 0.5],
        "density_params": None,   # list of K values; None = the regime's own
        "t_end": None,            # None = 12 / estimated pump rate, per K
        "n_out": 400,
        "grid": "linear",         # "linear" | "log" (log starts at t_start)
        "t_start": 1e-2,
        "rtol": 1e-8,
        "atol": 1e-10,
    },
    "spectrum": {
        "density_params": None,
        "delta_min": -60.0,
        "delta_max": 60.0,
        "n_delta": 481,
        "normalization": "peak",
        "absorption_for": None,   # K value for the absorption overlay
    },
    "sweep": {
        "K_grid": None,           # list, or {"log10_min","log10_max","n"}
        "gamma0_list": None,      # None = [gamma0]
    },
    "asymptote": {
        "density_params": None,
        "window": 12.0,           # integration window in pumping times
        "n_out": 400,
        "max_spread": 0.10,
    },
    "oracle": {
        "bandwidth": 200.0,
        "n_trajectories": 10_000,
        "dt": None,
        "seed": 0,
        "delta_ac": 0.0,
        "gamma_ac": None,
        "gamma_fixed": 0.0,
        "initial": [0.0, 0.5, 0.5],
        "t_end": 2.0,
        "n_out": 21,
    },
}

PRESETS = {
    # time evolution at fixed pump for a ladder of optical densities
    "fig2": {
        "mode": "evolve",
        "gamma_prime": 1.0,
        "gamma0": 0.0,
        "pump_rate": 10.0,
        "regime": {"kind": "inhomogeneous", "doppler_width": 100.0,
                   "density_param": 0.0},
        "density_params": [0.0, 1.0, 10.0, 100.0],
        "grid": "log",
    },
    # stationary target population vs density, Doppler regime
    "fig3": {
        "mode": "sweep",
        "gamma_prime": 1.0,
        "gamma0": 0.0,
        "pump_rate": 10.0,
        "regime": {"kind": "inhomogeneous", "doppler_width": 100.0,
                   "density_param": 1.0},
        "K_grid": {"log10_min": 0.0, "log10_max": 6.0, "n": 25},
        "gamma0_list": [0.0, 1e-4, 1e-3, 1e-2],
    },
    # same sweep in the radiative regime
    "fig4": {
        "mode": "sweep",
        "gamma_prime": 1.0,
        "gamma0": 0.0,
        "pump_rate": 10.0,
        "regime": {"kind": "radiative", "density_param_k0": 1.0},
        "K_grid": {"log10_min": 0.0, "log10_max": 6.0, "n": 25},
        "gamma0_list": [0.0, 1e-4, 1e-3, 1e-2],
    },
    # stationary trapped-radiation spectra plus the absorption overlay
    "fig5": {
        "mode": "spectrum",
        "gamma_prime": 1.0,
        "gamma0": 1e-4,
        "pump_rate": 10.0,
        "regime": {"kind": "radiative", "density_param_k0": 1.0},
        "density_params": [1.0, 10.0, 100.0],
        "absorption_for": 1.0,
    },
}


# ---------------------------------------------------------------------------
# configuration plumbing

def _parse_set_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_override(scenario: dict, key: str, raw: str) -> None:
    """Set a dot-separated key to a JSON-parsed value, in place."""
    parts = key.split(".")
    node = scenario
    for p in parts[:-1]:
        if not isinstance(node.get(p), dict):
            node[p] = {}
        node = node[p]
    node[parts[-1]] = _parse_set_value(raw)


def resolve_scenario(mode: str, raw: dict) -> dict:
    """Fill defaults and reject unknown fields."""
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {MODES}")
    allowed = {"regime", "mode", *_COMMON_DEFAULTS, *_MODE_DEFAULTS[mode]}
    for key in raw:
        if key not in allowed:
            raise ConfigError(f"unknown field {key!r} for mode {mode!r}")
    if raw.get("mode", mode) != mode:
        raise ConfigError(
            f"config is for mode {raw['mode']!r} but {mode!r} was requested")
    if "regime" not in raw:
        raise ConfigError("missing required field 'regime'")
    scenario = dict(_COMMON_DEFAULTS)
    scenario.update(_MODE_DEFAULTS[mode])
    scenario.update(raw)
    scenario["mode"] = mode
    _build_params(scenario)  # validate early so errors surface as exit 2
    return scenario


def _build_params(scenario: dict, K: float | None = None,
                  gamma0: float | None = None) -> SystemParams:
    reg = scenario["regime"]
    if not isinstance(reg, dict) or "kind" not in reg:
        raise ConfigError("regime must be an object with a 'kind' field")
    kind = reg["kind"]
    try:
        if kind == "inhomogeneous":
            regime = Inhomogeneous(
                doppler_width=float(reg["doppler_width"]),
                density_param=float(reg["density_param"] if K is None else K))
        elif kind == "radiative":
            regime = Radiative(density_param_k0=float(
                reg["density_param_k0"] if K is None else K))
        else:
            raise ConfigError(f"unknown regime kind {kind!r}")
        return SystemParams(
            gamma_prime=float(scenario["gamma_prime"]),
            gamma0=float(scenario["gamma0"] if gamma0 is None else gamma0),
            pump_rate=float(scenario["pump_rate"]),
            regime=regime)
    except KeyError as exc:
        raise ConfigError(f"missing required regime field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid parameter value: {exc}") from exc


def _initial_state(scenario: dict) -> PopulationState:
    vals = scenario["initial"]
    if not isinstance(vals, (list, tuple)) or len(vals) != 3:
        raise ConfigError("'initial' must be a list [rho_aa, rho_bb, rho_cc]")
    try:
        return PopulationState(*map(float, vals))
    except ValueError as exc:
        raise ConfigError(f"invalid initial state: {exc}") from exc


def _density_list(scenario: dict) -> list[float]:
    ks = scenario.get("density_params")
    if ks is None:
        reg = scenario["regime"]
        key = "density_param" if reg["kind"] == "inhomogeneous" else "density_param_k0"
        return [float(reg[key])]
    if not isinstance(ks, list) or not ks:
        raise ConfigError("'density_params' must be a non-empty list")
    return [float(k) for k in ks]


def _k_label(scenario: dict) -> str:
    return "K" if scenario["regime"]["kind"] == "inhomogeneous" else "K0"


def _file_tag(value: float) -> str:
    return np.format_float_positional(value, trim="-").replace(".", "p").replace("-", "m")


# ---------------------------------------------------------------------------
# CSV output

def _fmt(value: float) -> str:
    return repr(float(value))


def write_csv(path: Path, columns: list[str], rows, comments=()) -> None:
    with open(path, "w") as fh:
        for line in (*_UNIT_LINES, *comments):
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# mode runners

def _time_grid(scenario: dict, t_end: float) -> np.ndarray:
    n = int(scenario["n_out"])
    if n < 3:
        raise ConfigError("n_out must be >= 3")
    if scenario["grid"] == "log":
        t0 = float(scenario["t_start"])
        if not 0 < t0 < t_end:
            raise ConfigError("t_start must lie in (0, t_end) for a log grid")
        return np.concatenate(([0.0], np.geomspace(t0, t_end, n - 1)))
    if scenario["grid"] != "linear":
        raise ConfigError("grid must be 'linear' or 'log'")
    return np.linspace(0.0, t_end, n)


def _resolved_t_end(scenario: dict, params: SystemParams, window: float = 12.0) -> float:
    if scenario.get("t_end") is not None:
        return float(scenario["t_end"])
    return window / max(pump_rate_estimate(params), 1e-6)


def _traj_rows(traj: Trajectory):
    for i, t in enumerate(traj.times):
        aa, bb, cc = traj.states[i]
        yield (t, aa, bb, cc, traj.gammas[i], traj.pump_rates[i])


def run_evolve(scenario: dict, outdir: Path) -> list[str]:
    initial = _initial_state(scenario)
    label = _k_label(scenario)
    outputs = []
    for K in _density_list(scenario):
        params = _build_params(scenario, K=K)
        t_end = _resolved_t_end(scenario, params)
        grid = _time_grid(scenario, t_end)
        traj = evolve(params, initial=initial, output_grid=grid,
                      rtol=float(scenario["rtol"]), atol=float(scenario["atol"]))
        name = f"evolve_{label}{_file_tag(K)}.csv"
        write_csv(outdir / name,
                  ["t", "rho_aa", "rho_bb", "rho_cc", "Gamma", "Gamma_p"],
                  _traj_rows(traj),
                  comments=[f"{label} = {_fmt(K)}",
                            f"pump_rate = {_fmt(params.pump_rate)}",
                            f"gamma_prime = {_fmt(params.gamma_prime)}",
                            f"gamma0 = {_fmt(params.gamma0)}"])
        outputs.append(name)
    return outputs


def run_sweep(scenario: dict, outdir: Path) -> list[str]:
    grid_spec = scenario.get("K_grid")
    if grid_spec is None:
        raise ConfigError("missing required field 'K_grid'")
    if isinstance(grid_spec, dict):
        try:
            K_grid = np.logspace(float(grid_spec["log10_min"]),
                                 float(grid_spec["log10_max"]),
                                 int(grid_spec["n"]))
        except KeyError as exc:
            raise ConfigError(f"K_grid object missing {exc.args[0]!r}") from exc
    else:
        K_grid = [float(k) for k in grid_spec]
    gamma0_list = scenario.get("gamma0_list")
    if gamma0_list is None:
        gamma0_list = [float(scenario["gamma0"])]
    params_base = _build_params(scenario)
    table = sweep(params_base, K_grid, gamma0_list)

    label = _k_label(scenario)
    rows = []
    failures = []
    for r in table.rows:
        bb = r.state.rho_bb if r.state is not None else math.nan
        rows.append((r.density_param, r.gamma0, bb, r.residual))
        if r.error is not None:
            failures.append((r.density_param, r.gamma0, r.error))
    write_csv(outdir / "sweep.csv",
              [label, "gamma0", "rho_bb_stat", "residual"], rows,
              comments=[f"pump_rate = {_fmt(params_base.pump_rate)}",
                        f"gamma_prime = {_fmt(params_base.gamma_prime)}"])
    if failures:
        detail = "; ".join(
            f"{label}={k:g}, gamma0={g0:g}: {msg}" for k, g0, msg in failures)
        raise RadtrapError(f"{len(failures)} sweep row(s) failed: {detail}")
    return ["sweep.csv"]


def run_asymptote(scenario: dict, outdir: Path) -> list[str]:
    label = _k_label(scenario)
    inhom = label == "K"
    rows = []
    for K in _density_list(scenario):
        params = _build_params(scenario, K=K)
        t_end = _resolved_t_end(scenario, params, window=float(scenario["window"]))
        grid = np.linspace(0.0, t_end, int(scenario["n_out"]))
        traj = evolve(params, output_grid=grid)
        est = estimate_asymptote(traj, max_spread=float(scenario["max_spread"]))
        if inhom:
            closed = asymptotic_pump_rate_inhom(K) if K > 1 else math.nan
        else:
            closed = asymptotic_pump_rate_rad(K / gamma_ab(params))
        ratio = est.rate / closed if closed == closed and closed != 0 else math.nan
        rows.append((K, est.rate, est.spread, closed, ratio))
    write_csv(outdir / "asymptote.csv",
              [label, "gamma_p", "spread", "closed_form", "ratio"], rows)
    return ["asymptote.csv"]


def run_spectrum(scenario: dict, outdir: Path) -> list[str]:
    label = _k_label(scenario)
    deltas = np.linspace(float(scenario["delta_min"]),
                         float(scenario["delta_max"]),
                         int(scenario["n_delta"]))
    delta_unit = ("detuning in units of the Doppler width" if label == "K"
                  else "detuning in units of gamma")
    outputs = []
    for K in _density_list(scenario):
        params = _build_params(scenario, K=K)
        result = stationary(params)
        spec = spectral_distribution(result.state, params, deltas,
                                     normalization=scenario["normalization"])
        name = f"spectrum_{label}{_file_tag(K)}.csv"
        write_csv(outdir / name, ["delta", "value"],
                  zip(spec.detunings, spec.values),
                  comments=[delta_unit, f"{label} = {_fmt(K)}",
                            f"gamma0 = {_fmt(params.gamma0)}",
                            f"Gamma_stat = {_fmt(result.gamma)}"])
        outputs.append(name)
    overlay = scenario.get("absorption_for")
    if overlay is not None:
        K = float(overlay)
        params = _build_params(scenario, K=K)
        result = stationary(params)
        if isinstance(params.regime, Radiative):
            g_star = gamma_selfconsistent_rad(result.state, params, K)
        else:
            g_star = result.gamma
        spec = absorption_spectrum(result.state, params, g_star, deltas)
        write_csv(outdir / "absorption.csv", ["delta", "value"],
                  zip(spec.detunings, spec.values),
                  comments=[delta_unit, f"{label} = {_fmt(K)}"])
        outputs.append("absorption.csv")
    return outputs


def run_oracle(scenario: dict, outdir: Path) -> list[str]:
    params = _build_params(scenario)
    initial = _initial_state(scenario)
    gamma_fixed = float(scenario["gamma_fixed"])
    cfg = StochasticConfig(
        bandwidth=float(scenario["bandwidth"]),
        n_trajectories=int(scenario["n_trajectories"]),
        dt=None if scenario["dt"] is None else float(scenario["dt"]),
        seed=int(scenario["seed"]),
        delta_ac=float(scenario["delta_ac"]),
        gamma_ac=None if scenario["gamma_ac"] is None else float(scenario["gamma_ac"]))
    try:
        cfg.validate(params, gamma_fixed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    res = simulate_stochastic(params, cfg, initial, float(scenario["t_end"]),
                              gamma_fixed=gamma_fixed,
                              n_out=int(scenario["n_out"]))
    columns = ["t", "rho_aa", "rho_bb", "rho_cc", "se_aa", "se_bb", "se_cc"]
    ref = None
    thin = (isinstance(params.regime, Inhomogeneous)
            and params.regime.density_param == 0.0) or \
        (isinstance(params.regime, Radiative)
         and params.regime.density_param_k0 == 0.0)
    if gamma_fixed == 0.0 and thin:
        ref = evolve(params, initial=initial, output_grid=res.times)
        columns += ["ref_aa", "ref_bb", "ref_cc"]

    def rows():
        for i, t in enumerate(res.times):
            row = (t, *res.mean[i], *res.stderr[i])
            if ref is not None:
                row = (*row, *ref.states[i])
            yield row

    write_csv(outdir / "oracle.csv", columns, rows(),
              comments=[f"bandwidth = {_fmt(cfg.bandwidth)}",
                        f"n_trajectories = {cfg.n_trajectories}",
                        f"seed = {cfg.seed}"])
    return ["oracle.csv"]


_RUNNERS = {
    "evolve": run_evolve,
    "sweep": run_sweep,
    "asymptote": run_asymptote,
    "spectrum": run_spectrum,
    "oracle": run_oracle,
}


# ---------------------------------------------------------------------------
# entry point

def _load_raw_config(args) -> dict:
    if (args.config is None) == (args.preset is None):
        raise ConfigError("exactly one of --config or --preset is required")
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; available: {sorted(PRESETS)}")
        raw = copy.deepcopy(PRESETS[args.preset])
    else:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        # a manifest from a previous run is accepted as-is
        raw = doc["scenario"] if "scenario" in doc else doc
        if not isinstance(raw, dict):
            raise ConfigError("'scenario' must be a JSON object")
    return raw


def main(argv=None) -> int:
    from . import __version__

    parser = argparse.ArgumentParser(
        prog="radtrap",
        description="Optical pumping with radiation trapping: batch runner.")
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", help="JSON scenario (or a previous manifest)")
    parser.add_argument("--preset", help=f"built-in scenario: {sorted(PRESETS)}")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a scenario field")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--version", action="version", version=__version__)
    args = parser.parse_args(argv)

    t0 = time.perf_counter()
    try:
        raw = _load_raw_config(args)
        for item in args.overrides:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, _, value = item.partition("=")
            apply_override(raw, key, value)
        scenario = resolve_scenario(args.mode, raw)
    except ConfigError as exc:
        print(f"radtrap: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"radtrap: config error: cannot create --out: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        outputs = _RUNNERS[args.mode](scenario, outdir)
    except ConfigError as exc:
        print(f"radtrap: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RadtrapError as exc:
        print(f"radtrap: numerical failure in mode {args.mode!r}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERIC

    manifest = {
        "mode": args.mode,
        "scenario": scenario,
        "version": __version__,
        "wall_time_s": time.perf_counter() - t0,
        "outputs": outputs,
    }
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
