"""Run configuration, parameter sweeps, and CSV persistence.

Configs are flat JSON objects whose keys mirror RunConfig fields; figure
fixture files additionally support a {"common": {...}, "runs": [...]} shape
that expands into several labelled runs sharing a base configuration.  All
CSV output uses shortest round-trip float formatting and a fixed row order,
so identical configurations produce byte-identical files regardless of the
worker count.

Units in config files: energies (eps, gamma, omega_c, temperature) are in
absolute units with hbar = k_B = 1, v is energy^2, and the time window
t0_tau/tf_tau is expressed in units of tau_LZ = eps/v.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import multiprocessing
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bath import BathParams
from .errors import ConfigError, InvalidStateError, NumericalError
from .lzmodel import Coupling, ModelParams, nonadiabatic_amplitude
from .oracles import p_lz_exact
from .propagator import (DensityMatrix, EvolutionMode, TrajectoryRecord,
                         effective_temperature, evolve, thermal_state)
from .rates import rate_set
from .thermo import ThermoRecord, accumulate

__all__ = [
    "TRAJECTORY_COLUMNS",
    "SWEEP_COLUMNS",
    "RATES_COLUMNS",
    "SweepSpec",
    "RunConfig",
    "SweepRow",
    "load_config",
    "run_trajectory",
    "run_sweep",
    "cmd_evolve",
    "cmd_lzprob",
    "cmd_thermo",
    "cmd_rates",
]

TRAJECTORY_COLUMNS = [
    "t", "t_over_tauLZ", "rho_ee_re", "rho_gg_re", "rho_eg_re", "rho_eg_im",
    "P_up", "P_down", "P_e", "P_g", "alpha_abs", "Gamma_p", "Gamma_m",
    "Gamma_z", "S_p", "S_m", "U", "W", "Q", "S_vn", "dS", "dS_e", "dS_irr",
    "T_eff",
]
SWEEP_COLUMNS = [
    "v", "v_over_eps2", "T", "T_over_eps", "P_v", "P_lz_exact", "dS", "dS_e",
    "dS_irr", "T_eff_final", "error",
]
RATES_COLUMNS = [
    "t", "t_over_tauLZ", "alpha_abs", "Gamma_p", "Gamma_m", "Gamma_z",
    "S_p", "S_m",
]

_COUPLINGS = {c.value for c in Coupling}
_MODES = {"full", "no_nonadiabatic", "no_dissipation"}
_INITIAL_STATES = {"up", "down", "gibbs"}
_SWEEP_AXES = {"v", "temperature"}
_SWEEP_SCALES = {"log", "linear"}

# Per-subcommand defaults: population evolutions and thermodynamics run on
# +-40 tau_LZ, probability sweeps on +-100 tau_LZ (long enough to cover the
# crossing and the dissipative window), and thermodynamic runs start from
# the instantaneous Gibbs state.
_COMMAND_DEFAULTS = {
    "evolve": {},
    "rates": {},
    "lzprob": {"t0_tau": -100.0, "tf_tau": 100.0},
    "thermo": {"initial_state": "gibbs"},
}


@dataclass(frozen=True)
class SweepSpec:
    """One sweep axis: grid of v or temperature values."""

    axis: str
    scale: str
    start: float
    stop: float
    points: int

    def grid(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class RunConfig:
    """Validated, fully-resolved configuration of one run (or sweep)."""

    v: float = 1.0
    eps: float = 1.0
    gamma: float = 0.001
    omega_c: float = 10.0
    temperature: float = 25.0
    coupling: str = "transverse"
    t0_tau: float = -40.0
    tf_tau: float = 40.0
    mode: str = "full"
    include_lamb_shift: bool = True
    initial_state: str = "up"
    rtol: float = 1e-8
    atol: float = 1e-10
    rate_points_per_tau: float = 8.0
    output_points_per_tau: float = 16.0
    workers: int = 1
    out: str | None = None
    sweep: SweepSpec | None = None

    def validate(self) -> None:
        problems = []
        if self.coupling not in _COUPLINGS:
            problems.append(f"coupling must be one of {sorted(_COUPLINGS)}, got {self.coupling!r}")
        if self.mode not in _MODES:
            problems.append(f"mode must be one of {sorted(_MODES)}, got {self.mode!r}")
        if self.initial_state not in _INITIAL_STATES:
            problems.append(
                f"initial_state must be one of {sorted(_INITIAL_STATES)}, got {self.initial_state!r}")
        if not self.rtol > 0.0 or not self.atol > 0.0:
            problems.append("integrator tolerances must be positive")
        if not self.rate_points_per_tau > 0.0:
            problems.append("rate_points_per_tau must be positive")
        if not self.output_points_per_tau > 0.0:
            problems.append("output_points_per_tau must be positive (empty output grid)")
        if self.workers < 1:
            problems.append("workers must be >= 1")
        if self.sweep is not None:
            s = self.sweep
            if s.axis not in _SWEEP_AXES:
                problems.append(f"sweep axis must be one of {sorted(_SWEEP_AXES)}")
            if s.scale not in _SWEEP_SCALES:
                problems.append(f"sweep scale must be one of {sorted(_SWEEP_SCALES)}")
            if s.points < 1:
                problems.append("sweep must contain at least one point")
            if not (s.start > 0.0 and s.stop > 0.0):
                problems.append("sweep endpoints must be positive (v and T are positive)")
            if s.stop < s.start:
                problems.append("sweep stop must be >= start")
        if not problems:
            try:
                self.model_params()
            except ValueError as exc:
                problems.append(str(exc))
        if problems:
            raise ConfigError("invalid configuration: " + "; ".join(problems))

    def model_params(self) -> ModelParams:
        bath = BathParams(gamma=self.gamma, omega_c=self.omega_c,
                          temperature=self.temperature)
        tau = self.eps / self.v
        return ModelParams(v=self.v, eps=self.eps, bath=bath,
                           t0=self.t0_tau * tau, tf=self.tf_tau * tau,
                           coupling=Coupling(self.coupling))

    def evolution_mode(self) -> EvolutionMode:
        return EvolutionMode.from_name(self.mode, self.include_lamb_shift)

    def initial_density(self, mp: ModelParams) -> DensityMatrix:
        if self.initial_state == "up":
            return DensityMatrix.diabatic_up()
        if self.initial_state == "down":
            return DensityMatrix.diabatic_down()
        return thermal_state(mp, mp.t0)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if self.sweep is None:
            d.pop("sweep")
        return d

    @classmethod
    def from_dict(cls, raw: dict, command: str = "evolve") -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"configuration must be a JSON object, got {type(raw).__name__}")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        merged = dict(_COMMAND_DEFAULTS.get(command, {}))
        merged.update(raw)
        if "sweep" in merged and merged["sweep"] is not None:
            s = merged["sweep"]
            if isinstance(s, SweepSpec):
                pass
            elif isinstance(s, dict):
                sweep_known = {f.name for f in dataclasses.fields(SweepSpec)}
                sweep_unknown = set(s) - sweep_known
                if sweep_unknown:
                    raise ConfigError(f"unknown sweep keys: {sorted(sweep_unknown)}")
                try:
                    merged["sweep"] = SweepSpec(**s)
                except TypeError as exc:
                    raise ConfigError(f"incomplete sweep specification: {exc}") from exc
            else:
                raise ConfigError("sweep must be a JSON object")
        try:
            cfg = cls(**merged)
        except TypeError as exc:
            raise ConfigError(f"bad configuration value: {exc}") from exc
        cfg.validate()
        return cfg


def _parse_set(expr: str):
    if "=" not in expr:
        raise ConfigError(f"--set expects key=value, got {expr!r}")
    key, _, value = expr.partition("=")
    try:
        return key.strip(), json.loads(value)
    except json.JSONDecodeError:
        return key.strip(), value


def load_config(path: str | None, command: str, sets: list[str] | None = None,
                workers: int | None = None):
    """Read a config file into labelled runs, applying CLI overrides.

    Returns (runs, out_dir) where runs is a list of (label, RunConfig);
    label is None for a plain single-run config.
    """
    doc: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            doc = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config file must contain a JSON object")

    declared = doc.pop("command", None)
    if declared is not None and declared != command:
        raise ConfigError(
            f"config file declares command {declared!r} but {command!r} was invoked")

    overrides = dict(_parse_set(s) for s in (sets or []))
    if workers is not None:
        overrides["workers"] = workers

    out_dir = doc.pop("out_dir", None)
    if "runs" in doc:
        runs_raw = doc.pop("runs")
        common = doc.pop("common", {})
        if doc:
            raise ConfigError(f"unknown top-level keys in multi-run config: {sorted(doc)}")
        if not isinstance(runs_raw, list) or not runs_raw:
            raise ConfigError("multi-run config needs a nonempty 'runs' list")
        runs = []
        for entry in runs_raw:
            if not isinstance(entry, dict) or "label" not in entry:
                raise ConfigError("each run needs a 'label' key")
            entry = dict(entry)
            label = str(entry.pop("label"))
            merged = {**common, **entry, **overrides}
            runs.append((label, RunConfig.from_dict(merged, command)))
        labels = [lbl for lbl, _ in runs]
        if len(set(labels)) != len(labels):
            raise ConfigError("run labels must be unique")
        return runs, out_dir

    merged = {**doc, **overrides}
    return [(None, RunConfig.from_dict(merged, command))], out_dir


def _fmt(x) -> str:
    return repr(float(x))


def _t_eff_or_nan(record: TrajectoryRecord, mp: ModelParams) -> float:
    if record.p_up <= 0.0 or record.p_down <= 0.0:
        return math.nan
    return effective_temperature(record, mp)


def _evolve_config(cfg: RunConfig):
    mp = cfg.model_params()
    records = evolve(mp, cfg.evolution_mode(), cfg.initial_density(mp),
                     rtol=cfg.rtol, atol=cfg.atol,
                     output_points_per_tau=cfg.output_points_per_tau,
                     rate_points_per_tau=cfg.rate_points_per_tau)
    return records, mp


def run_trajectory(cfg: RunConfig):
    """Evolve one configuration and post-process it.

    Returns (records, thermo_records, model_params).  A state that breaks
    its physical invariants during post-processing is reported as a
    numerical failure carrying the last valid time.
    """
    records, mp = _evolve_config(cfg)
    try:
        thermo = accumulate(records, mp)
    except InvalidStateError as exc:
        raise NumericalError(f"thermodynamic post-processing rejected the state: {exc}",
                             last_good_time=records[0].t) from exc
    return records, thermo, mp


def _ensure_parent(path: str) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    return p


def write_trajectory_csv(path: str, records: list[TrajectoryRecord],
                         thermo: list[ThermoRecord], mp: ModelParams) -> None:
    p = _ensure_parent(path)
    with p.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for rec, th in zip(records, thermo):
            w.writerow([
                _fmt(rec.t), _fmt(rec.t / mp.tau_lz),
                _fmt(rec.rho_ad[0, 0].real), _fmt(rec.rho_ad[1, 1].real),
                _fmt(rec.rho_ad[0, 1].real), _fmt(rec.rho_ad[0, 1].imag),
                _fmt(rec.p_up), _fmt(rec.p_down), _fmt(rec.p_e), _fmt(rec.p_g),
                _fmt(rec.alpha_abs),
                _fmt(rec.rates.gamma_plus), _fmt(rec.rates.gamma_minus),
                _fmt(rec.rates.gamma_z), _fmt(rec.rates.s_plus), _fmt(rec.rates.s_minus),
                _fmt(th.u), _fmt(th.w), _fmt(th.q), _fmt(th.s_vn),
                _fmt(th.ds), _fmt(th.ds_e), _fmt(th.ds_irr),
                _fmt(_t_eff_or_nan(rec, mp)),
            ])


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a sweep, plus bookkeeping not written to CSV."""

    v: float
    eps: float
    temperature: float
    p_v: float
    p_lz: float
    ds: float
    ds_e: float
    ds_irr: float
    t_eff_final: float
    error: str
    wall_time: float


def _sweep_point(task) -> tuple[int, SweepRow]:
    index, cfg = task
    start = time.perf_counter()
    p_lz = p_lz_exact(cfg.v, cfg.eps)
    try:
        records, mp = _evolve_config(cfg)
    except NumericalError as exc:
        return index, SweepRow(v=cfg.v, eps=cfg.eps, temperature=cfg.temperature,
                               p_v=math.nan, p_lz=p_lz, ds=math.nan, ds_e=math.nan,
                               ds_irr=math.nan, t_eff_final=math.nan, error=str(exc),
                               wall_time=time.perf_counter() - start)
    last = records[-1]
    # thermodynamic columns degrade gracefully if the state breaks its
    # invariants (weak-coupling negativity artifact); populations stay valid
    error = ""
    try:
        th = accumulate(records, mp)[-1]
        ds, ds_e, ds_irr = th.ds, th.ds_e, th.ds_irr
    except InvalidStateError as exc:
        ds = ds_e = ds_irr = math.nan
        error = f"entropy columns unavailable: {exc}"
    return index, SweepRow(v=cfg.v, eps=cfg.eps, temperature=cfg.temperature,
                           p_v=last.p_down, p_lz=p_lz, ds=ds, ds_e=ds_e,
                           ds_irr=ds_irr, t_eff_final=_t_eff_or_nan(last, mp),
                           error=error, wall_time=time.perf_counter() - start)


def run_sweep(cfg: RunConfig) -> list[SweepRow]:
    """Run one trajectory per sweep grid point, in parallel, ordered by grid."""
    if cfg.sweep is None:
        raise ConfigError("this command requires a 'sweep' specification")
    grid = cfg.sweep.grid()
    tasks = []
    for i, value in enumerate(grid):
        if cfg.sweep.axis == "v":
            point = dataclasses.replace(cfg, v=float(value))
        else:
            point = dataclasses.replace(cfg, temperature=float(value))
        tasks.append((i, point))

    if cfg.workers > 1 and len(tasks) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=cfg.workers) as pool:
            results = pool.map(_sweep_point, tasks, chunksize=1)
    else:
        results = [_sweep_point(t) for t in tasks]
    results.sort(key=lambda item: item[0])
    return [row for _, row in results]


def write_sweep_csv(path: str, rows: list[SweepRow]) -> None:
    p = _ensure_parent(path)
    with p.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([
                _fmt(r.v), _fmt(r.v / r.eps**2), _fmt(r.temperature),
                _fmt(r.temperature / r.eps), _fmt(r.p_v), _fmt(r.p_lz),
                _fmt(r.ds), _fmt(r.ds_e), _fmt(r.ds_irr), _fmt(r.t_eff_final),
                r.error,
            ])


def write_rates_csv(path: str, cfg: RunConfig) -> None:
    # declared uniform grid over the window; symmetric windows include t = 0
    # exactly, where the coupling peaks.  Coefficients are evaluated directly
    # (no interpolation) since curve dumps are one-shot.
    mp = cfg.model_params()
    span = mp.tf - mp.t0
    n = max(2, round(span * cfg.rate_points_per_tau / mp.tau_lz)) + 1
    ts = np.linspace(mp.t0, mp.tf, n)
    p = _ensure_parent(path)
    with p.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RATES_COLUMNS)
        for t in ts:
            rs = rate_set(float(t), mp)
            w.writerow([
                _fmt(t), _fmt(t / mp.tau_lz), _fmt(nonadiabatic_amplitude(float(t), mp)),
                _fmt(rs.gamma_plus), _fmt(rs.gamma_minus), _fmt(rs.gamma_z),
                _fmt(rs.s_plus), _fmt(rs.s_minus),
            ])


def _resolve_out(label: str | None, cfg: RunConfig, out: str | None,
                 out_dir: str | None) -> str:
    if label is None:
        path = out or cfg.out
        if path is None:
            raise ConfigError("no output path: set 'out' in the config or pass --out")
        return path
    if out_dir is None:
        raise ConfigError("multi-run config needs an output directory "
                          "(config key 'out_dir' or --out-dir)")
    return str(Path(out_dir) / f"{label}.csv")


def cmd_evolve(runs, out: str | None = None, out_dir: str | None = None) -> list[str]:
    """Write one trajectory CSV per run; returns the written paths."""
    written = []
    for label, cfg in runs:
        path = _resolve_out(label, cfg, out, out_dir)
        records, thermo, mp = run_trajectory(cfg)
        write_trajectory_csv(path, records, thermo, mp)
        written.append(path)
    return written


def _cmd_sweep(runs, out, out_dir) -> list[str]:
    written = []
    for label, cfg in runs:
        path = _resolve_out(label, cfg, out, out_dir)
        rows = run_sweep(cfg)
        write_sweep_csv(path, rows)
        written.append(path)
    return written


def cmd_lzprob(runs, out: str | None = None, out_dir: str | None = None) -> list[str]:
    """Transition-probability sweep: one trajectory per grid point."""
    return _cmd_sweep(runs, out, out_dir)


def cmd_thermo(runs, out: str | None = None, out_dir: str | None = None) -> list[str]:
    """Thermodynamic sweep: entropy balance at the final time per grid point."""
    return _cmd_sweep(runs, out, out_dir)


def cmd_rates(runs, out: str | None = None, out_dir: str | None = None) -> list[str]:
    """Dissipator-coefficient curves on the rate-table grid."""
    written = []
    for label, cfg in runs:
        path = _resolve_out(label, cfg, out, out_dir)
        write_rates_csv(path, cfg)
        written.append(path)
    return written
