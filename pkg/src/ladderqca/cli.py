"""Command-line runner for ladder automaton experiments.

Every run writes CSV tables plus a ``manifest.json`` with the resolved
configuration into ``--out``.  Exit status is 0 on success, 2 on a
configuration error and 3 when a size guard refuses the run.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import channel as ch
from . import entanglement as ent
from . import meanfield as mf
from . import randomref as rr
from .automaton import (CLUSTER_PLUS, MAX_QUBITS, PLUS_PLUS, AutomatonParams, Trajectory, evolve,
                        stationary_window)
from .lattice import OPEN, PERIODIC, LatticeLayout, SizeGuardError, cluster_register
from .order import string_order_trajectory

EXIT_OK, EXIT_CONFIG, EXIT_GUARD = 0, 2, 3
WORKERS_ENV = "LADDERQCA_WORKERS"
UNSAFE_MAX_QUBITS = 30
UNSAFE_MAX_CELLS = 8

SUBCOMMANDS = ("evolve", "spectra", "meanfield", "channel", "string-order", "mstar", "sweep", "preset")


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


@dataclass
class ScenarioConfig:
    """Resolved options of one invocation."""

    command: str
    cells: list[int] = field(default_factory=lambda: [8])
    boundary: str = PERIODIC
    J: list[float] = field(default_factory=lambda: [0.2])
    g: list[float] | None = None
    gbar: list[float] | None = None
    steps: int = 2000
    cadence: int = 1
    seed: int = 0
    init: str = CLUSTER_PLUS
    split_size: int | None = None
    out: str = "out"
    mode: str = "full"
    dt: float = 0.005
    time: float = 10.0
    trials: int = rr.MIN_TRIALS
    unsafe_size: bool = False
    critical: bool = False
    gbar_min: float = 0.0
    gbar_max: float = 1.0
    points: int = 200
    k_points: int = 128
    record_every: int = 1
    preset: str | None = None

    def validate(self) -> None:
        numbers = list(self.J) + list(self.g or []) + list(self.gbar or []) + [
            self.dt, self.time, self.gbar_min, self.gbar_max]
        if not all(math.isfinite(float(v)) for v in numbers):
            raise ConfigError("numeric options must be finite")
        if self.command != "meanfield" and (self.g is None) == (self.gbar is None):
            raise ConfigError("give exactly one of --g and --gbar")
        if self.boundary not in (PERIODIC, OPEN):
            raise ConfigError(f"unknown boundary {self.boundary!r}")
        if self.init not in (CLUSTER_PLUS, PLUS_PLUS):
            raise ConfigError(f"unknown init {self.init!r}")
        if any(c < 1 for c in self.cells):
            raise ConfigError("--cells must be positive")
        if self.steps < 0 or self.cadence < 1 or self.record_every < 1:
            raise ConfigError("--steps must be >= 0 and --cadence >= 1")
        if self.trials < rr.MIN_TRIALS:
            raise ConfigError(f"--trials must be >= {rr.MIN_TRIALS}")
        if self.command in ("evolve", "spectra", "sweep", "mstar"):
            for c in self.cells:
                if c % 2:
                    raise ConfigError(f"half-ladder cut needs an even number of cells, got {c}")
        if self.command in ("evolve", "spectra", "channel"):
            if len(self.cells) != 1 or len(self.J) != 1 or len(self.g or self.gbar) != 1:
                raise ConfigError(f"{self.command} takes single values of --cells, --J and --g/--gbar")
        if self.command == "channel" and self.mode not in ("full", "coherent", "lindblad"):
            raise ConfigError(f"unknown channel mode {self.mode!r}")
        if self.command == "meanfield" and (self.points < 1 or self.gbar_max < self.gbar_min):
            raise ConfigError("empty gbar range")

    def couplings(self) -> list[tuple[float, float]]:
        """``(J, g)`` pairs, converting ``gbar`` with each ``J``."""
        if self.g is not None:
            return [(J, g) for J in self.J for g in self.g]
        return [(J, gb * J) for J in self.J for gb in self.gbar]

    @property
    def max_qubits(self) -> int:
        return UNSAFE_MAX_QUBITS if self.unsafe_size else MAX_QUBITS

    @property
    def max_cells(self) -> int:
        return UNSAFE_MAX_CELLS if self.unsafe_size else ch.MAX_CELLS


# figure presets; values echo the figure captions
PRESETS = {
    "fig4-row1": dict(command="evolve", cells=[8], J=[0.2], gbar=[0.5]),
    "fig4-row2": dict(command="evolve", cells=[8], J=[0.2], gbar=[1.0]),
    "fig4-row3": dict(command="evolve", cells=[8], J=[0.2], gbar=[2.5]),
    "fig4-row4": dict(command="evolve", cells=[8], J=[0.2], gbar=[5.0]),
    "fig3-left": dict(command="sweep", cells=[10], J=[0.2, 0.3, 0.4], cadence=10,
                      gbar=[0.1, 0.25, 0.4, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0]),
    "fig3-right": dict(command="mstar", cells=[10], J=[0.3], cadence=10,
                       gbar=[0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0]),
    "fig5": dict(command="string-order", cells=[6, 8, 10], boundary=OPEN, J=[0.2], cadence=10,
                 gbar=[0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5]),
    "fig6-product": dict(command="evolve", cells=[8], J=[0.3], g=[0.1], init=PLUS_PLUS),
    "neg-scan": dict(command="sweep", cells=[6, 8, 10], J=[0.3], cadence=10,
                     gbar=[0.1, 0.3, 0.4, 0.7, 1.0, 2.0, 3.0, 5.0]),
    "meanfield": dict(command="meanfield", gbar_min=0.0, gbar_max=1.0, points=200, critical=True),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cells", type=int, nargs="+", help="cells L (ladder has 2L qubits)")
    common.add_argument("--boundary", choices=(PERIODIC, OPEN))
    common.add_argument("--J", type=float, nargs="+")
    common.add_argument("--g", type=float, nargs="+")
    common.add_argument("--gbar", type=float, nargs="+")
    common.add_argument("--steps", type=int)
    common.add_argument("--cadence", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--init", choices=(CLUSTER_PLUS, PLUS_PLUS))
    common.add_argument("--split-size", dest="split_size", type=int)
    common.add_argument("--out")
    common.add_argument("--mode", choices=("full", "coherent", "lindblad"))
    common.add_argument("--dt", type=float)
    common.add_argument("--time", type=float)
    common.add_argument("--record-every", dest="record_every", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--unsafe-size", dest="unsafe_size", action="store_true", default=None)
    common.add_argument("--critical", action="store_true", default=None)
    common.add_argument("--gbar-min", dest="gbar_min", type=float)
    common.add_argument("--gbar-max", dest="gbar_max", type=float)
    common.add_argument("--points", type=int)
    common.add_argument("--k-points", dest="k_points", type=int)

    p = argparse.ArgumentParser(prog="ladderqca", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "evolve": "run one trajectory; write series and magnetization",
        "spectra": "evolve and also write stationary-window spectra",
        "meanfield": "solve for s_B on a gbar grid and tabulate bands",
        "channel": "iterate the reduced register channel",
        "string-order": "string order parameter series and W_inf",
        "mstar": "effective environment size from random mixtures",
        "sweep": "stationary witness and negativity over a (J, g) grid",
    }
    for name, h in helps.items():
        sub.add_parser(name, parents=[common], help=h)
    pp = sub.add_parser("preset", parents=[common], help="run a named figure preset")
    pp.add_argument("name", choices=sorted(PRESETS))
    return p


def resolve(args: argparse.Namespace) -> ScenarioConfig:
    base = {}
    if args.command == "preset":
        base = dict(PRESETS[args.name])
        base["preset"] = args.name
    else:
        base["command"] = args.command
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "name") and v is not None}
    if "g" in overrides:
        base.pop("gbar", None)
    if "gbar" in overrides:
        base.pop("g", None)
    base.update(overrides)
    cfg = ScenarioConfig(**base)
    cfg.validate()
    return cfg


def workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer")


def fan_out(fn, jobs: list) -> list:
    """Map ``fn`` over ``jobs`` in order, in worker processes if configured."""
    n = workers()
    if n == 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, jobs))


def _trajectory(cfg: ScenarioConfig, cells: int, J: float, g: float, boundary=None,
                observables=None, keep_spectra=False) -> Trajectory:
    layout = LatticeLayout(cells, boundary or cfg.boundary)
    kw = {} if observables is None else {"observables": frozenset(observables)}
    return Trajectory(AutomatonParams(J, g, layout), init=cfg.init, steps=cfg.steps,
                      cadence=cfg.cadence, seed=cfg.seed, split_block=cfg.split_size,
                      keep_spectra=keep_spectra, **kw)


def run_evolve(cfg: ScenarioConfig, out: Path, spectra: bool = False) -> dict:
    (J, g), = cfg.couplings()
    traj = _trajectory(cfg, cfg.cells[0], J, g, keep_spectra=spectra)
    series = evolve(traj, max_qubits=cfg.max_qubits)
    t = series.times
    write_csv(out / "series.csv", ["t", "S_half", "S_B", "logneg", "lambda_min"],
              zip(t, series.S_half, series.S_B, series.logneg, series.lambda_min))
    write_csv(out / "magnetization.csv", ["t", "site", "exp_x"],
              ((t[r], q, series.magnetization[r, q]) for r in range(len(t))
               for q in range(series.magnetization.shape[1])))
    window, saturated = stationary_window(series.S_half)
    if spectra:
        part = ent.Partition(ent.CLUSTER_SPLIT, cfg.split_size).describe(cfg.cells[0])
        rows = []
        for r in range(window.start, window.stop):
            rows += [(t[r], "ent", "sublattice", e) for e in series.ent_spectra[r]]
            rows += [(t[r], "neg", part, e) for e in series.neg_spectra[r]]
        write_csv(out / "spectra.csv", ["t", "tag", "partition", "eigenvalue"], rows)
    return {"stationary_window": [int(t[window.start]), int(t[window.stop - 1])],
            "saturated": bool(saturated),
            "lambda_stationary": float(np.mean(series.lambda_min[window])),
            "logneg_stationary": float(np.mean(series.logneg[window]))}


def _sweep_point(job):
    cfg, cells, J, g = job
    traj = _trajectory(cfg, cells, J, g, observables={"S_half", "S_B", "logneg", "lambda_min"})
    s = evolve(traj, max_qubits=cfg.max_qubits)
    window, saturated = stationary_window(s.S_half)
    lam = s.lambda_min[window]
    return (J, g, g / J, 2 * cells, float(np.mean(lam)), float(np.std(lam)),
            float(np.mean(s.logneg[window])), float(np.mean(s.S_half[window])), int(saturated))


def run_sweep(cfg: ScenarioConfig, out: Path) -> dict:
    jobs = [(cfg, c, J, g) for c in cfg.cells for J, g in cfg.couplings()]
    rows = fan_out(_sweep_point, jobs)
    write_csv(out / "sweep.csv", ["J", "g", "gbar", "2L", "lambda", "lambda_std", "logneg",
                                  "S_half", "saturated"], rows)
    return {"points": len(rows)}


def run_meanfield(cfg: ScenarioConfig, out: Path) -> dict:
    grid = np.linspace(cfg.gbar_min, cfg.gbar_max, cfg.points) if cfg.gbar is None else np.array(cfg.gbar)
    scan = mf.band_scan(grid, k_points=cfg.k_points)
    write_csv(out / "sb.csv", ["gbar", "branch", "s_B"], scan.sb_rows)
    write_csv(out / "bands.csv", ["gbar", "branch", "k", "epsilon"], scan.band_rows)
    info = {"selected_s_B": [s.s_B for s in scan.selected]}
    if cfg.critical:
        gc, sc = mf.critical_point()
        print(f"gbar_c = {gc:.6f}  s_B(gbar_c) = {sc:.6f}")
        info.update(gbar_c=gc, s_B_c=sc)
    return info


def run_channel(cfg: ScenarioConfig, out: Path) -> dict:
    L = cfg.cells[0]
    ch._guard(L, cfg.max_cells)
    (J, g), = cfg.couplings()
    psi = cluster_register(L, cfg.boundary)
    rho = np.outer(psi, psi.conj())
    split = ent.Partition(ent.CLUSTER_SPLIT, cfg.split_size or max(L // 2, 1))
    rows = []

    def record(t, r, w=1.0):
        d = ch.channel_diagnostics(r, split)
        rows.append((t, d["trace"], d["purity"], d["entropy"], d["logneg"], d["lambda_min"], w))

    if cfg.mode == "lindblad":
        gbar = g / J
        series = ch.lindblad_evolve(rho, gbar, cfg.dt, cfg.time, record_every=cfg.record_every,
                                    boundary=cfg.boundary)
        for t, r in zip(series.times, series.states):
            record(t, r)
        info = {"max_trace_drift": series.max_trace_drift}
    else:
        state = ch.ChannelState(rho)
        record(0, rho)
        kraus = ch.build_kraus(L, J, g, cfg.boundary, cfg.max_cells) if cfg.mode == "full" else None
        for _ in range(cfg.steps):
            if kraus is not None:
                state = ch.markov_step(state, kraus)
            else:
                state = ch.coherent_step(state, J, g, cfg.boundary)
            if state.step % cfg.cadence == 0:
                record(state.step, state.rho, state.weight)
        info = {"final_weight": state.weight}
    write_csv(out / "channel.csv", ["t", "trace", "purity", "entropy", "logneg", "lambda_min", "weight"], rows)
    return info


def _w_point(job):
    cfg, cells, J, g = job
    s = string_order_trajectory(_trajectory(cfg, cells, J, g), require_open=False)
    return s


def run_string_order(cfg: ScenarioConfig, out: Path) -> dict:
    jobs = [(cfg, c, J, g) for c in cfg.cells for J, g in cfg.couplings()]
    results = fan_out(_w_point, jobs)
    write_csv(out / "w.csv", ["gbar", "2L", "t", "W"],
              ((s.gbar, s.n_qubits, t, w) for s in results for t, w in zip(s.times, s.W)))
    write_csv(out / "w_inf.csv", ["gbar", "2L", "W_inf"], ((s.gbar, s.n_qubits, s.W_inf) for s in results))
    return {"saturated": [bool(s.saturated) for s in results]}


def run_mstar(cfg: ScenarioConfig, out: Path) -> dict:
    jobs = [(cfg, c, J, g) for c in cfg.cells for J, g in cfg.couplings()]
    points = fan_out(_sweep_point, jobs)
    curves, rows = {}, []
    for p in points:
        cells = p[3] // 2
        if cells not in curves:
            block = cfg.split_size
            curves[cells] = rr.lambda_curve(cells, ent.Partition(ent.CLUSTER_SPLIT, block),
                                            cfg.trials, cfg.seed)
        est = rr.estimate_m(p[4], curves[cells], clip_low=True)
        m_high = math.inf if est.at_cap else est.m_high
        rows.append((p[2], p[4], est.m, est.m_low, m_high))
    write_csv(out / "mstar.csv", ["gbar", "lambda", "m", "m_low", "m_high"], rows)
    write_csv(out / "lambda_curve.csv", ["qubits", "log2_m", "mean", "stderr"],
              ((q, k, m, e) for q, c in curves.items() for k, m, e in zip(c.log2_m, c.mean, c.stderr)))
    return {"m_cap": 2**rr.M_CAP_LOG2}


RUNNERS = {
    "evolve": run_evolve,
    "spectra": lambda cfg, out: run_evolve(cfg, out, spectra=True),
    "meanfield": run_meanfield,
    "channel": run_channel,
    "string-order": run_string_order,
    "mstar": run_mstar,
    "sweep": run_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        t0 = time.perf_counter()
        info = RUNNERS[cfg.command](cfg, out)
        manifest = {"config": asdict(cfg), "version": __version__, "seed": cfg.seed,
                    "wall_time_s": time.perf_counter() - t0, "result": info}
        with open(out / "manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=float)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
