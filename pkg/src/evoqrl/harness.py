"""Command-line experiment runner.

Writes, per invocation, into ``--out``:

* ``seed_<s>.csv``: one row per generation for run seed ``s``
* ``aggregate.csv``: per-generation means across seeds
* ``manifest.json``: resolved configuration, per-seed final elite genome, duration
* ``trace_seed_<s>.txt`` (with ``--trace``): one episode of the final elite
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .evolution import (AgentKind, Evaluation, EvolutionConfig, Strategy, episode_seed, play_episode,
                        run_evolution)
from .metrics import GenerationRecord, mean_records

log = logging.getLogger(__name__)

AGGREGATE_HEADER = ("generation", "mean_score", "max_score", "mean_total_coins", "mean_own_coins",
                    "own_coin_rate")
DEFAULT_SEEDS = (0, 1, 2, 3, 4)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in str(text).replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _hidden(text: str) -> tuple[int, int]:
    dims = _int_list(text)
    if len(dims) != 2:
        raise argparse.ArgumentTypeError(f"--hidden takes two sizes H1,H2, got {text!r}")
    return dims


# option name -> (config field or None, converter, default)
OPTIONS = {
    "agent": ("agent_kind", str, AgentKind.VQC.value),
    "strategy": ("strategy", str, Strategy.MU.value),
    "layers": ("n_layers", int, 8),
    "qubits": ("n_qubits", int, 6),
    "hidden": ("hidden_dims", _hidden, (3, 4)),
    "population": ("population_size", int, 250),
    "generations": ("generations", int, 200),
    "tau": ("truncation", int, 5),
    "sigma": ("mutation_power", float, 0.01),
    "episode_steps": ("episode_steps", int, 50),
    "evaluation": ("evaluation", str, Evaluation.FRESH.value),
    "seeds": (None, _int_list, DEFAULT_SEEDS),
    "out": (None, str, "runs/latest"),
    "workers": (None, int, 1),
}


@dataclass(frozen=True)
class RunPlan:
    config: EvolutionConfig
    seeds: tuple[int, ...]
    out: Path
    workers: int = 1
    trace: bool = False


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="evoqrl",
        description="Evolve VQC / NN / random agents in the cooperative Coin Game.",
        argument_default=argparse.SUPPRESS,
    )
    p.add_argument("--agent", choices=[k.value for k in AgentKind])
    p.add_argument("--strategy", choices=[s.value for s in Strategy])
    p.add_argument("--layers", type=int, help="VQC variational layers (default 8)")
    p.add_argument("--qubits", type=int, help="VQC qubits (default 6)")
    p.add_argument("--hidden", type=_hidden, metavar="H1,H2", help="NN hidden sizes (default 3,4)")
    p.add_argument("--population", type=int, help="population size (default 250)")
    p.add_argument("--generations", type=int, help="generations (default 200)")
    p.add_argument("--tau", type=int, help="truncation size (default 5)")
    p.add_argument("--sigma", type=float, help="mutation power (default 0.01)")
    p.add_argument("--episode-steps", dest="episode_steps", type=int, help="steps per episode (default 50)")
    p.add_argument("--evaluation", choices=[e.value for e in Evaluation],
                   help="episode used for fitness (default fresh)")
    p.add_argument("--seeds", type=_int_list, help="comma-separated run seeds (default 0,1,2,3,4)")
    p.add_argument("--out", help="output directory (default runs/latest)")
    p.add_argument("--workers", type=int, help="processes running seeds in parallel (default 1)")
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--trace", action="store_true", help="write one episode trace of each final elite")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` comments; keys use the long flag names."""
    text = Path(path).read_text()
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string("[run]\n" + text)
    values = {}
    for key, raw in cp["run"].items():
        name = key.replace("-", "_")
        if name not in OPTIONS:
            raise ValueError(f"unknown config key {key!r}")
        converter = OPTIONS[name][1]
        try:
            values[name] = converter(raw)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ValueError(f"bad value for {key!r}: {exc}") from None
    return values


def parse_config(argv: Optional[Sequence[str]] = None) -> RunPlan:
    """Resolve defaults < config file < flags. Usage errors exit with status 2."""
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    values = {name: default for name, (_, _, default) in OPTIONS.items()}
    if "config" in args:
        try:
            values.update(read_config_file(args["config"]))
        except (OSError, ValueError, configparser.Error) as exc:
            parser.error(f"config file: {exc}")
    values.update({k: v for k, v in args.items() if k in OPTIONS})

    fields = {field: values[name] for name, (field, _, _) in OPTIONS.items() if field}
    try:
        config = EvolutionConfig(**fields)
    except ValueError as exc:
        parser.error(str(exc))
    if not values["seeds"]:
        parser.error("at least one seed is required")
    if values["workers"] < 1:
        parser.error("--workers must be positive")
    logging.basicConfig(level=logging.INFO if args.get("verbose") else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    return RunPlan(config, tuple(values["seeds"]), Path(values["out"]), values["workers"],
                   bool(args.get("trace")))


def config_to_dict(config: EvolutionConfig) -> dict:
    out = {}
    for key, value in asdict(config).items():
        if isinstance(value, Enum):
            value = value.value
        elif isinstance(value, tuple):
            value = list(value)
        out[key] = value
    return out


def write_seed_csv(path: Path, records: Sequence[GenerationRecord]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(GenerationRecord.CSV_HEADER)
        for rec in records:
            w.writerow(rec.csv_row())


def write_aggregate_csv(path: Path, per_seed: Sequence[Sequence[GenerationRecord]]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(AGGREGATE_HEADER)
        for row in mean_records(list(per_seed)):
            w.writerow([row["generation"]] + [f"{row[k]:.6f}" for k in AGGREGATE_HEADER[1:]])


def _run_seed(config: EvolutionConfig):
    start = time.perf_counter()
    result = run_evolution(config, on_generation=_progress)
    return result, time.perf_counter() - start


def _progress(record: GenerationRecord) -> None:
    if record.generation % 10 == 0:
        log.info("seed %d generation %d mean score %.3f", record.run_seed, record.generation, record.mean_score)


def run_experiment(config: EvolutionConfig, seeds: Sequence[int], out_path, workers: int = 1,
                   trace: bool = False) -> int:
    """Run every seed, write CSVs and the manifest; returns a process exit status."""
    start = time.perf_counter()
    out = Path(out_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"evoqrl: cannot create output directory {out}: {exc}", file=sys.stderr)
        return 1

    configs = [replace(config, run_seed=int(s)) for s in seeds]
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(configs))) as pool:
            outcomes = list(pool.map(_run_seed, configs))
    else:
        outcomes = [_run_seed(c) for c in configs]

    try:
        for seed, (result, _) in zip(seeds, outcomes):
            write_seed_csv(out / f"seed_{seed}.csv", result.records)
            if trace:
                ep = episode_seed(seed, config.generations, 0, config.evaluation)
                lines = [str(step) for step in play_episode(result.elite, ep, config.episode_steps)]
                (out / f"trace_seed_{seed}.txt").write_text("\n".join(lines) + "\n")
        write_aggregate_csv(out / "aggregate.csv", [r.records for r, _ in outcomes])
        manifest = {
            "version": __version__,
            "config": {k: v for k, v in config_to_dict(config).items() if k != "run_seed"},
            "seeds": [int(s) for s in seeds],
            "param_count": config.param_count,
            "elites": {str(s): r.elite.params.tolist() for s, (r, _) in zip(seeds, outcomes)},
            "seed_seconds": {str(s): round(t, 3) for s, (_, t) in zip(seeds, outcomes)},
            "duration_seconds": round(time.perf_counter() - start, 3),
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        print(f"evoqrl: failed writing results to {out}: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    plan = parse_config(argv)
    return run_experiment(plan.config, plan.seeds, plan.out, plan.workers, plan.trace)
