"""Cooperative two-agent Coin Game on a 3x3 grid.

Agents move in strict alternation starting with agent 0 (red); agent 1 is
blue. A coin of the collector's own colour pays (+1, 0); a coin of the other
agent's colour pays +1 to the collector and -2 to the other agent, so the
summed reward is +1 / -1 per own / foreign coin.

Coordinates are ``(row, col)``. Actions: 0 north (row-1), 1 south (row+1),
2 west (col-1), 3 east (col+1). Observation planes, each row-major over the
grid: agent 0, agent 1, red coin, blue coin.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

GRID = 3
N_CELLS = GRID * GRID
N_ACTIONS = 4
OBS_DIM = 4 * N_CELLS
EPISODE_LENGTH = 50
RED, BLUE = 0, 1

MOVES = np.array([(-1, 0), (1, 0), (0, -1), (0, 1)])
ACTION_NAMES = ("north", "south", "west", "east")
OWN_REWARD = 1.0
FOREIGN_PENALTY = -2.0


class IllegalActionError(ValueError):
    """An action was applied that the legality mask forbids."""


class Collection(NamedTuple):
    collector: int
    own_color: bool


class StepOutcome(NamedTuple):
    rewards: tuple[float, float]
    collected: Optional[Collection] = None


@dataclass(frozen=True)
class CoinGameState:
    positions: tuple[tuple[int, int], tuple[int, int]]
    coin_pos: tuple[int, int]
    coin_color: int
    active_agent: int = 0
    step_count: int = 0
    episode_length: int = EPISODE_LENGTH

    @property
    def done(self) -> bool:
        return self.step_count >= self.episode_length


def cell_of(cell: int) -> tuple[int, int]:
    return divmod(int(cell), GRID)


def _initial_layout(rng: np.random.Generator) -> tuple[int, int, int, int]:
    """Two distinct agent cells, a coin cell off both, and a coin colour."""
    a0, a1, coin = rng.choice(N_CELLS, size=3, replace=False)
    return int(a0), int(a1), int(coin), int(rng.integers(2))


def _spawn_coin(rng: np.random.Generator, occupied) -> tuple[int, int]:
    """Uniform free cell and uniform colour; agents may share a cell, leaving 8 free."""
    free = [c for c in range(N_CELLS) if c not in occupied]
    return free[int(rng.integers(len(free)))], int(rng.integers(2))


def reward_pair(collector: int, coin_color: int) -> tuple[float, float]:
    rewards = [0.0, 0.0]
    rewards[collector] = OWN_REWARD
    if coin_color != collector:
        rewards[1 - collector] = FOREIGN_PENALTY
    return rewards[0], rewards[1]


def reset(rng: np.random.Generator, episode_length: int = EPISODE_LENGTH) -> CoinGameState:
    a0, a1, coin, color = _initial_layout(rng)
    return CoinGameState((cell_of(a0), cell_of(a1)), cell_of(coin), color, episode_length=episode_length)


def observe(state: CoinGameState) -> np.ndarray:
    obs = np.zeros(OBS_DIM)
    for agent, (r, c) in enumerate(state.positions):
        obs[agent * N_CELLS + r * GRID + c] = 1.0
    r, c = state.coin_pos
    obs[(2 + state.coin_color) * N_CELLS + r * GRID + c] = 1.0
    return obs


def legal_mask(state: CoinGameState) -> np.ndarray:
    r, c = state.positions[state.active_agent]
    return np.array([r > 0, r < GRID - 1, c > 0, c < GRID - 1])


def step(state: CoinGameState, action: int, rng: np.random.Generator) -> tuple[CoinGameState, StepOutcome]:
    """Move the active agent; ``rng`` is only consumed when a coin respawns."""
    if state.done:
        raise IllegalActionError("episode is over")
    if not 0 <= action < N_ACTIONS or not legal_mask(state)[action]:
        raise IllegalActionError(f"action {action} is illegal for agent {state.active_agent} at "
                                 f"{state.positions[state.active_agent]}")
    agent = state.active_agent
    dr, dc = MOVES[action]
    r, c = state.positions[agent]
    moved = (int(r + dr), int(c + dc))
    positions = list(state.positions)
    positions[agent] = moved
    positions = tuple(positions)

    coin_pos, coin_color = state.coin_pos, state.coin_color
    outcome = StepOutcome((0.0, 0.0))
    if moved == coin_pos:
        outcome = StepOutcome(reward_pair(agent, coin_color), Collection(agent, coin_color == agent))
        occupied = {p[0] * GRID + p[1] for p in positions}
        cell, coin_color = _spawn_coin(rng, occupied)
        coin_pos = cell_of(cell)

    nxt = replace(state, positions=positions, coin_pos=coin_pos, coin_color=coin_color,
                  active_agent=1 - agent, step_count=state.step_count + 1)
    return nxt, outcome


class CoinGameBatch:
    """Many independent episodes advanced in lockstep.

    Each episode owns its generator and draws from it in exactly the order
    :func:`reset` and :func:`step` would, so a batched episode matches its
    one-at-a-time replay.
    """

    def __init__(self, rngs, episode_length: int = EPISODE_LENGTH):
        self.rngs = list(rngs)
        self.episode_length = episode_length
        n = len(self.rngs)
        self.agent_cells = np.zeros((n, 2), dtype=np.int64)
        self.coin_cell = np.zeros(n, dtype=np.int64)
        self.coin_color = np.zeros(n, dtype=np.int64)
        for i, rng in enumerate(self.rngs):
            a0, a1, coin, color = _initial_layout(rng)
            self.agent_cells[i] = (a0, a1)
            self.coin_cell[i] = coin
            self.coin_color[i] = color
        self.step_count = 0
        self._rows = np.arange(n)

    @property
    def size(self) -> int:
        return len(self.rngs)

    @property
    def active_agent(self) -> int:
        return self.step_count % 2

    @property
    def done(self) -> bool:
        return self.step_count >= self.episode_length

    def observe(self) -> np.ndarray:
        obs = np.zeros((self.size, OBS_DIM))
        obs[self._rows, self.agent_cells[:, 0]] = 1.0
        obs[self._rows, N_CELLS + self.agent_cells[:, 1]] = 1.0
        obs[self._rows, (2 + self.coin_color) * N_CELLS + self.coin_cell] = 1.0
        return obs

    def legal_mask(self) -> np.ndarray:
        r, c = np.divmod(self.agent_cells[:, self.active_agent], GRID)
        return np.stack([r > 0, r < GRID - 1, c > 0, c < GRID - 1], axis=1)

    def step(self, actions) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Returns ``(rewards (n, 2), collected (n,), own_color (n,))``."""
        if self.done:
            raise IllegalActionError("episode is over")
        actions = np.asarray(actions, dtype=np.int64)
        if not self.legal_mask()[self._rows, actions].all():
            raise IllegalActionError("batch contains an illegal action")
        agent = self.active_agent
        r, c = np.divmod(self.agent_cells[:, agent], GRID)
        r = r + MOVES[actions, 0]
        c = c + MOVES[actions, 1]
        self.agent_cells[:, agent] = r * GRID + c

        collected = self.agent_cells[:, agent] == self.coin_cell
        own = collected & (self.coin_color == agent)
        rewards = np.zeros((self.size, 2))
        rewards[collected, agent] = OWN_REWARD
        rewards[collected & ~own, 1 - agent] = FOREIGN_PENALTY
        for i in np.flatnonzero(collected):
            cell, color = _spawn_coin(self.rngs[i], set(self.agent_cells[i].tolist()))
            self.coin_cell[i] = cell
            self.coin_color[i] = color
        self.step_count += 1
        return rewards, collected, own


def format_step(index: int, agent: int, action: int, outcome: StepOutcome) -> str:
    """One trace line: step, agent, action, reward pair, coin event."""
    r0, r1 = outcome.rewards
    if outcome.collected is None:
        event = "-"
    else:
        event = f"coin:{'own' if outcome.collected.own_color else 'foreign'}"
    return f"{index:02d} agent={agent} action={action}:{ACTION_NAMES[action]} rewards=({r0:+g},{r1:+g}) {event}"


class StepRecord(NamedTuple):
    index: int
    agent: int
    action: int
    outcome: StepOutcome

    def __str__(self) -> str:
        return format_step(self.index, self.agent, self.action, self.outcome)
