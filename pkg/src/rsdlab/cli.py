"""Command line entry point: ``rsdlab {generate,simulate,experiment,verify}``.

Exit codes: 0 success, 2 input error, 3 experiment bound failure,
4 property violation.
"""
from __future__ import annotations

import json
import os
import sys
import time
from pathlib import Path

import click

from . import io as rio
from .errors import RsdLabError
from .generators import GeneratorSpec, generate_instance, sample_permutation, substream
from .market import cutoffs, demand_matrix, run_rsd
from .montecarlo import (
    DEFAULT_EPSILON_GRID,
    McConfig,
    cutoff_tail_experiment,
    lottery_report,
    phase_transition_experiment,
    toy_model_law_check,
    uniform_tail_experiment,
)
from .verifiers import SUITES, enumerate_oracle, inflated_engine, mc_vs_oracle, run_suite

EXIT_OK, EXIT_INPUT, EXIT_BOUND, EXIT_PROPERTY = 0, 2, 3, 4
EXPERIMENTS = ("toy-law", "phase-transition", "tail", "uniform-tail", "lottery")


class InputError(Exception):
    def __init__(self, kind, message):
        self.kind = kind
        super().__init__(message)


def _fail(kind: str, message: str, code: int = EXIT_INPUT):
    click.echo(f"error: {kind}: {message}", err=True)
    sys.exit(code)


def _load_config(path) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise InputError("FileNotFound", str(p))
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise InputError("ConfigInvalid", f"{p}: {e}") from e


def _seed(flag, cfg: dict) -> int:
    if flag is not None:
        return flag
    for key in ("master_seed", "seed"):
        if key in cfg:
            return int(cfg[key])
    return int(os.environ.get("RSD_LAB_SEED", 0))


def _instance(cfg: dict):
    if "instance" in cfg:
        p = Path(cfg["instance"])
        if not p.exists():
            raise InputError("FileNotFound", str(p))
        return rio.read_instance(p)
    if "generator" in cfg:
        g = dict(cfg["generator"])
        for key in ("capacities", "weights"):
            if g.get(key) is not None:
                g[key] = tuple(g[key])
        try:
            spec = GeneratorSpec(**g)
        except TypeError as e:
            raise InputError("ConfigInvalid", str(e)) from e
        return generate_instance(spec)
    raise InputError("ConfigInvalid", "config needs an 'instance' path or a 'generator' spec")


def _outdir(out) -> Path:
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _guard(fn):
    """Map validation failures onto exit code 2 with a one-line message."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InputError as e:
            _fail(e.kind, str(e))
        except (RsdLabError, ValueError, KeyError) as e:
            _fail(type(e).__name__, str(e))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


_common = [
    click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                 help="JSON config file; flags override its values."),
    click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None,
                 help="Master seed (falls back to RSD_LAB_SEED, then 0)."),
    click.option("--out", default=".", show_default=True, help="Output directory."),
]


def common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Random serial dictatorship simulation and verification lab."""


@main.command()
@common
@_guard
def generate(config_path, seed, out):
    """Write the instance described by the config's generator spec."""
    cfg = _load_config(config_path)
    if seed is not None and "generator" in cfg:
        cfg["generator"]["seed"] = seed
    inst = _instance(cfg)
    path = _outdir(out) / "instance.json"
    rio.write_instance(inst, path)
    click.echo(str(path))


@main.command()
@common
@click.option("--instance", "instance_path", default=None, help="Instance file (overrides config).")
@_guard
def simulate(config_path, seed, out, instance_path):
    """One seeded RSD run: assignment, cutoffs and demand trajectories."""
    cfg = _load_config(config_path)
    if instance_path is not None:
        cfg["instance"] = instance_path
    s = _seed(seed, cfg)
    inst = _instance(cfg)
    pi = sample_permutation(inst.n, substream(s, "simulate"))
    h = rio.config_hash({**cfg, "seed": s})
    prov = {"master_seed": s, "replications": 1, "config_hash": h}
    d = _outdir(out)
    (d / "permutation.json").write_text(rio.dumps({**prov, "student_at": rio.permutation_to_json(pi)}))
    (d / "assignment.json").write_text(rio.dumps({**prov, **rio.assignment_to_json(run_rsd(inst, pi))}))
    (d / "cutoffs.json").write_text(rio.dumps({**prov, **rio.cutoffs_to_json(cutoffs(inst, pi))}))
    tau = demand_matrix(inst, pi)
    with open(d / "trajectories.csv", "w") as fh:
        for k, v in prov.items():
            fh.write(f"# {k}={v}\n")
        fh.write("t," + ",".join(f"school_{k}" for k in range(inst.m)) + "\n")
        for t in range(inst.n + 1):
            fh.write(f"{t}," + ",".join(str(int(x)) for x in tau[:, t]) + "\n")
    click.echo(str(d))


@main.command()
@common
@click.option("--experiment", "name", type=click.Choice(EXPERIMENTS), default=None)
@click.option("--reps", type=click.IntRange(1), default=None, help="Replications.")
@click.option("--workers", type=click.IntRange(1), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "text"]), default="csv", show_default=True)
@_guard
def experiment(config_path, seed, out, name, reps, workers, fmt):
    """Run a Monte Carlo experiment; exit 3 if any bound check fails."""
    cfg = _load_config(config_path)
    name = name or cfg.get("experiment")
    if name not in EXPERIMENTS:
        raise InputError("ConfigInvalid", f"experiment must be one of {EXPERIMENTS}")
    s = _seed(seed, cfg)
    mc = McConfig(
        replications=reps or int(cfg.get("replications", 1000)),
        master_seed=s,
        epsilon_grid=tuple(cfg.get("epsilon_grid", DEFAULT_EPSILON_GRID)),
        workers=workers or int(cfg.get("workers", 1)),
        gamma_bar_replications=cfg.get("gamma_bar_replications"),
    )
    t0 = time.perf_counter()
    if name == "toy-law":
        report = toy_model_law_check(int(cfg["n"]), int(cfg["m"]), mc, int(cfg.get("school", 0)))
    elif name == "phase-transition":
        report = phase_transition_experiment(
            int(cfg["m"]), float(cfg["alpha"]), float(cfg.get("epsilon", 0.5)), mc,
            tuple(cfg.get("t_values", (0.3, 0.5, 0.8))))
    elif name == "tail":
        inst = _instance(cfg)
        report = cutoff_tail_experiment(inst, cfg.get("school"), mc)
    elif name == "uniform-tail":
        report = uniform_tail_experiment(_instance(cfg), mc)
    else:
        report = lottery_report(_instance(cfg), mc)
    h = rio.config_hash({**cfg, "experiment": name, "master_seed": s,
                         "replications": mc.replications, "epsilon_grid": mc.epsilon_grid})
    d = _outdir(out)
    stem = name.replace("-", "_")
    if fmt == "csv":
        (d / f"{stem}.csv").write_text(report.to_csv(h))
    (d / f"{stem}_summary.txt").write_text(report.summary_text(h))
    click.echo(f"{name}: passed={str(report.passed).lower()} "
               f"wall_clock={time.perf_counter() - t0:.2f}s", err=True)
    if not report.passed:
        for r in report.failing_rows():
            click.echo("failing: " + ",".join(r.as_strings()), err=True)
        sys.exit(EXIT_BOUND)


@main.command()
@common
@click.option("--suite", type=click.Choice(SUITES + ("all",)), default=None)
@click.option("--trials", type=click.IntRange(0), default=None)
@click.option("--reps", type=click.IntRange(1), default=None,
              help="Replications for the oracle calibration suite.")
@click.option("--self-test", is_flag=True, default=False,
              help="Run the permutation properties on a deliberately broken engine.")
@_guard
def verify(config_path, seed, out, suite, trials, reps, self_test):
    """Run property suites; exit 4 if any property is violated."""
    cfg = _load_config(config_path)
    suite = suite or cfg.get("suite", "all")
    if suite not in SUITES + ("all",):
        raise InputError("ConfigInvalid", f"suite must be one of {SUITES + ('all',)}")
    s = _seed(seed, cfg)
    trials = trials if trials is not None else int(cfg.get("trials", 10_000))
    reps = reps or int(cfg.get("replications", 10_000))
    self_test = self_test or bool(cfg.get("self_test", False))
    if suite == "oracle" and ("instance" in cfg or "generator" in cfg):
        inst = _instance(cfg)
        oracle = enumerate_oracle(inst)
        verdicts = [mc_vs_oracle(inst, McConfig(replications=reps, master_seed=s), oracle)]
    else:
        engine = inflated_engine if self_test else None
        verdicts = run_suite(suite, seed=s, trials=trials, engine=engine, replications=reps,
                             battery_size=int(cfg.get("battery_size", 20)))
    h = rio.config_hash({**cfg, "suite": suite, "seed": s, "trials": trials,
                         "replications": reps, "self_test": self_test})
    d = _outdir(out)
    text = f"master_seed: {s}\nreplications: {reps}\nconfig_hash: {h}\n\n"
    text += "\n".join(v.to_text() for v in verdicts)
    (d / "verdicts.txt").write_text(text)
    failed = [v for v in verdicts if not v.passed]
    for v in verdicts:
        click.echo(f"{v.name}: {'pass' if v.passed else 'FAIL'} ({v.trials} trials)", err=True)
    if failed:
        sys.exit(EXIT_PROPERTY)


if __name__ == "__main__":
    main()
