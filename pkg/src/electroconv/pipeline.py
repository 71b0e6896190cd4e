"""Scenario presets and run orchestration."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import checks
from . import diagnostics as dg
from . import files
from . import initial
from . import semigroups as sg
from . import spectral as sp
from .config import ExperimentConfig, config_from_dict
from .integrator import BlowUpError, IntegratorConfig, run, step
from .model import SimState, dissipation, energy, energy_residual, zero_state

log = logging.getLogger(__name__)

SCENARIOS = (
    "S1_sharp_decay",
    "S2_difference_decay",
    "S3_moment_growth",
    "S4_linear_oracle",
    "S5_property_suite",
)

SERIES_FILE = "series.csv"
COMPANION_FILE = "series_companion.csv"
SUMMARY_FILE = "summary.json"
CONFIG_FILE = "config.json"
CHECKPOINT_FILE = "checkpoint.bin"
CHECKS_FILE = "checks.json"
CONVERGENCE_FILE = "convergence.json"

# S1 integrator-order study
CONVERGENCE_T = 5.0
CONVERGENCE_DT = 0.2


def scenario(name: str) -> ExperimentConfig:
    """Fully specified configuration for a named preset."""
    big = {"grid": {"n": 512, "half_period": 40 * math.pi}}
    blob = {"init": {"preset": "blob_vortex"}}
    presets = {
        "S1_sharp_decay": {**big, **blob},
        "S2_difference_decay": {**big, **blob},
        "S3_moment_growth": {**big, **blob},
        "S4_linear_oracle": {
            **big,
            "init": {"preset": "poisson_kernel"},
            "model": {"coupled": False},
        },
        "S5_property_suite": {
            "grid": {"n": 256, "half_period": 8 * math.pi},
            "init": {"preset": "property_suite"},
        },
    }
    if name not in presets:
        raise ValueError(f"unknown scenario {name!r}; expected one of {list(SCENARIOS)}")
    doc = presets[name]
    if name == "S2_difference_decay":
        doc = {**doc, "grid": {**doc["grid"], "companion_n": 256}}
    doc = {**doc, "output": {"dir": name}}
    return config_from_dict(doc)


def sample_times(t_end: float, per_decade: int) -> list[float]:
    """``0`` then log-spaced in ``1 + t`` up to ``t_end`` inclusive."""
    if t_end <= 0:
        return [0.0]
    count = max(1, math.ceil(per_decade * math.log10(1.0 + t_end)))
    ts = np.expm1(np.linspace(0.0, math.log1p(t_end), count + 1))
    ts[0], ts[-1] = 0.0, t_end
    return [float(t) for t in ts]


def initial_state(cfg: ExperimentConfig, n: int | None = None) -> SimState:
    grid = sp.make_grid(n or cfg.grid.n, cfg.grid.half_period)
    p = cfg.init.params
    preset = cfg.init.preset
    state = zero_state(grid)
    if preset == "blob_vortex":
        q = initial.gaussian_blob(grid, p["mass"], p["width"], tuple(p["center"]))
        u = initial.gaussian_vortex(
            grid, p["vortex_amplitude"], p["vortex_width"], tuple(p["vortex_center"])
        )
        state = SimState(grid, 0.0, sp.dealias(grid, q), sp.dealias(grid, u))
    elif preset == "poisson_kernel":
        # left undealiased: truncating the slowly decaying spectrum rings in x
        # and spoils the weighted moment by a few percent
        q = initial.poisson_kernel(grid, p["mass"], p["height"])
        state = SimState(grid, 0.0, q, state.u_hat)
    elif preset != "zero":
        raise ValueError(f"preset {preset!r} does not define a trajectory")
    return state


@dataclass
class RunResult:
    records: list[dg.TimeSeriesRecord]
    energy: list[tuple[float, float, float]]
    final: SimState | None
    status: str = "ok"
    message: str = ""
    steps: int = 0
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        ts = [r.t for r in self.records]
        means = [r.mean_q for r in self.records]
        e = [row[1] for row in self.energy]
        l2 = [r.l2q2 for r in self.records]
        return {
            "status": self.status,
            "message": self.message,
            "steps": self.steps,
            "n_samples": len(ts),
            "t_final": ts[-1] if ts else None,
            "mean_drift": max((abs(m - means[0]) for m in means), default=0.0),
            "l2q_increase": dg.monotone_violation(np.sqrt(l2)) if l2 else 0.0,
            "energy_increase": dg.monotone_violation(e) if e else 0.0,
            "energy_initial": e[0] if e else 0.0,
            "l2q_initial": math.sqrt(l2[0]) if l2 else 0.0,
            "energy": [list(row) for row in self.energy],
            **self.extra,
        }


_CACHE: dict[tuple[str, int], RunResult] = {}


def clear_cache() -> None:
    _CACHE.clear()


def simulate(cfg: ExperimentConfig, n: int | None = None, checkpoint: Path | None = None) -> RunResult:
    """Run the trajectory described by ``cfg`` (optionally at another resolution)."""
    n = n or cfg.grid.n
    key = (cfg.trajectory_key(), n)
    if key in _CACHE:
        cached = _CACHE[key]
        if checkpoint is not None:
            files.write_checkpoint(cached.final, checkpoint)
        return cached
    state0 = initial_state(cfg, n)
    grid = state0.grid
    q0, u0 = state0.q_hat, state0.u_hat
    icfg = IntegratorConfig(
        dt_max=cfg.integrator.dt_max,
        t_end=cfg.t_end,
        cfl=cfg.integrator.cfl,
        sample_times=sample_times(cfg.t_end, cfg.sampling.per_decade),
    )
    modes = [tuple(m) for m in cfg.probes.modes]
    records: list[dg.TimeSeriesRecord] = []
    energies: list[tuple[float, float, float]] = []

    def sink(s: SimState) -> None:
        Q = sg.poisson_evolve(grid, q0, s.t)
        U = sg.heat_evolve(grid, u0, s.t)
        records.append(dg.record(s, Q, U, modes, cfg.splitting.r))
        energies.append((s.t, energy(s), dissipation(s)))

    result = RunResult(records, energies, None)
    stats: dict = {}
    try:
        result.final = run(state0, icfg, sink, nonlinear=cfg.model.coupled, stats=stats)
    except BlowUpError as exc:
        log.error("run aborted: %s", exc)
        result.status = "blowup"
        result.message = str(exc)
    result.steps = stats.get("steps", 0)
    if checkpoint is not None and result.final is not None:
        files.write_checkpoint(result.final, checkpoint)
    if result.status == "ok":
        _CACHE[key] = result
    return result


def convergence_study(
    cfg: ExperimentConfig, t_stop: float = CONVERGENCE_T, dt: float = CONVERGENCE_DT
) -> dict:
    """Global error at ``dt`` and ``dt/2`` against a ``dt/8`` reference, plus
    the largest per-step energy-identity residual at ``dt`` and ``dt/2``."""
    state0 = initial_state(cfg)
    grid = state0.grid

    def march(h: float) -> tuple[SimState, float]:
        s = state0
        worst = 0.0
        nsteps = int(round(t_stop / h))
        for _ in range(nsteps):
            nxt = step(s, h, nonlinear=cfg.model.coupled)
            worst = max(worst, energy_residual(s, nxt))
            s = nxt
        return s, worst

    def distance(a: SimState, b: SimState) -> float:
        return math.hypot(
            sp.norm(grid, a.q_hat - b.q_hat, "L2"), sp.norm(grid, a.u_hat - b.u_hat, "L2")
        )

    coarse, res_coarse = march(dt)
    half, res_half = march(dt / 2)
    ref, _ = march(dt / 8)
    e1, e2 = distance(coarse, ref), distance(half, ref)
    return {
        "t_stop": t_stop,
        "dt": dt,
        "error_dt": e1,
        "error_half": e2,
        "error_ratio": e1 / e2 if e2 > 0 else math.inf,
        "residual_dt": res_coarse,
        "residual_half": res_half,
        "residual_ratio": res_coarse / res_half if res_half > 0 else math.inf,
    }


def run_property_suite(cfg: ExperimentConfig) -> list[checks.CheckReport]:
    grid = sp.make_grid(cfg.grid.n, cfg.grid.half_period)
    p = cfg.init.params
    names = list(checks.SUITES) if "all" in p["suites"] else p["suites"]
    reports: list[checks.CheckReport] = []
    for name in names:
        trials = p["bump_trials"] if name in ("weight_commutator", "force_lowmode") else p["trials"]
        reports.extend(checks.run_suite(name, grid, cfg.seed, trials))
    return reports


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None, extras: bool = False) -> dict:
    """Run one configuration and write its outputs; returns the summary.

    ``extras`` adds the integrator-order study (used by the S1 preset).
    """
    out = Path(out_dir if out_dir is not None else cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    files.write_json(cfg.to_dict(), out / CONFIG_FILE)
    if cfg.init.preset == "property_suite":
        reports = run_property_suite(cfg)
        summary = {
            "status": "ok",
            "passed": all(r.passed for r in reports),
            "reports": [r.to_dict() for r in reports],
        }
        files.write_json(summary, out / CHECKS_FILE)
        files.write_json({"status": "ok"}, out / SUMMARY_FILE)
        return summary
    result = simulate(cfg, checkpoint=out / CHECKPOINT_FILE)
    files.emit_series(result.records, out / SERIES_FILE)
    summary = result.summary()
    if result.status == "ok" and cfg.grid.companion_n:
        comp = simulate(cfg, n=cfg.grid.companion_n)
        files.emit_series(comp.records, out / COMPANION_FILE)
        summary["companion"] = comp.summary()
        if comp.status != "ok":
            summary["status"] = comp.status
            summary["message"] = comp.message
    if result.status == "ok" and extras:
        files.write_json(convergence_study(cfg), out / CONVERGENCE_FILE)
    files.write_json(summary, out / SUMMARY_FILE)
    return summary


def run_scenario(name: str, out_root: str | Path) -> dict:
    cfg = scenario(name)
    return run_experiment(cfg, Path(out_root) / name, extras=(name == "S1_sharp_decay"))
