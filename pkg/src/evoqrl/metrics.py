"""Episode and population metrics: score, total coins, own coins, own coin rate."""
from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np


@dataclass(frozen=True)
class GenerationRecord:
    run_seed: int
    generation: int
    mean_score: float
    max_score: float
    mean_total_coins: float
    mean_own_coins: float
    own_coin_rate: float

    CSV_HEADER = ("seed", "generation", "mean_score", "max_score",
                  "mean_total_coins", "mean_own_coins", "own_coin_rate")

    def csv_row(self) -> list[str]:
        values = astuple(self)
        return [str(v) for v in values[:2]] + [f"{v:.6f}" for v in values[2:]]


def episode_metrics(trace) -> tuple[float, int, int]:
    """``(score, total_coins, own_coins)`` from step outcomes or step records."""
    score, total, own = 0.0, 0, 0
    for item in trace:
        outcome = getattr(item, "outcome", item)
        score += sum(outcome.rewards)
        if outcome.collected is not None:
            total += 1
            own += bool(outcome.collected.own_color)
    return score, total, own


def own_coin_rate(own_coins: float, total_coins: float) -> float:
    """OC / TC, with 0 coins giving a rate of 0."""
    if own_coins < 0 or own_coins > total_coins:
        raise ValueError(f"own coins ({own_coins}) must lie in [0, total coins ({total_coins})]")
    if total_coins == 0:
        return 0.0
    return own_coins / total_coins


def aggregate(evaluated, generation: int, run_seed: int) -> GenerationRecord:
    """Population means; the coin rate is pooled (sum own / sum total)."""
    evaluated = list(evaluated)
    if not evaluated:
        raise ValueError("cannot aggregate an empty population")
    scores = np.array([e.fitness for e in evaluated], dtype=np.float64)
    totals = np.array([e.total_coins for e in evaluated], dtype=np.float64)
    owns = np.array([e.own_coins for e in evaluated], dtype=np.float64)
    # per-episode stats are integers, so these float sums are exact and order-free
    return GenerationRecord(
        run_seed=int(run_seed),
        generation=int(generation),
        mean_score=float(scores.sum() / len(scores)),
        max_score=float(scores.max()),
        mean_total_coins=float(totals.sum() / len(totals)),
        mean_own_coins=float(owns.sum() / len(owns)),
        own_coin_rate=own_coin_rate(owns.sum(), totals.sum()),
    )


def mean_records(per_seed: list[list[GenerationRecord]]) -> list[dict]:
    """Per-generation means across seeds, one dict per generation."""
    if not per_seed:
        return []
    n_gen = min(len(r) for r in per_seed)
    names = [f.name for f in fields(GenerationRecord)][2:]
    rows = []
    for g in range(n_gen):
        row = {"generation": g}
        for name in names:
            row[name] = float(np.mean([getattr(r[g], name) for r in per_seed]))
        rows.append(row)
    return rows
