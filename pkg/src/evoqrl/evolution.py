"""Gradient-free evolution of self-play agents.

Per generation every individual plays one fresh Coin Game episode in which it
controls both agents; fitness is the summed reward of the two. The top
``truncation`` individuals become parents, the single best survives
unmutated, and ``population_size - 1`` children are bred by the chosen
strategy (copy, random-point crossover or layer-boundary crossover) and then
perturbed with Gaussian noise.

Seeding: the initial population, every episode and every breeding step draw
from their own :class:`numpy.random.SeedSequence` keyed on the run seed, so a
run is reproducible and evaluation order does not matter.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import coin_game as cg
from .actions import select_action, select_actions
from .metrics import GenerationRecord, aggregate
from .mlp import NnBatch, NnGenome, init_nn_genome, nn_forward, nn_param_count
from .vqc import VqcBatch, VqcGenome, init_vqc_genome, vqc_forward, vqc_param_count

log = logging.getLogger(__name__)

_INIT_STREAM = 0x1217
_EPISODE_STREAM = 0xE915
_BREED_STREAM = 0xB4EE
_POLICY_STREAM = 0x9011


class Strategy(str, Enum):
    MU = "mu"
    RAREMU = "raremu"
    LAREMU = "laremu"


class AgentKind(str, Enum):
    VQC = "vqc"
    NN = "nn"
    RANDOM = "random"


class Evaluation(str, Enum):
    """Which environment episode an individual is scored on.

    ``fresh`` (default): a new layout per (generation, individual).
    ``fixed``: one seeded episode layout per run, replayed for every
    individual in every generation. Action sampling of random agents always
    differs per individual.
    """

    FRESH = "fresh"
    FIXED = "fixed"


@dataclass(frozen=True, eq=False)
class RandomAgent:
    """Parameter-free agent that picks a uniformly random legal action."""

    params: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    param_count = 0

    def with_params(self, params) -> "RandomAgent":
        if np.size(params):
            raise ValueError("a random agent has no parameters")
        return RandomAgent()

    def same_shape(self, other) -> bool:
        return isinstance(other, RandomAgent)


Genome = VqcGenome | NnGenome | RandomAgent


def agent_kind_of(genome) -> AgentKind:
    if isinstance(genome, VqcGenome):
        return AgentKind.VQC
    if isinstance(genome, NnGenome):
        return AgentKind.NN
    if isinstance(genome, RandomAgent):
        return AgentKind.RANDOM
    raise TypeError(f"not a genome: {type(genome).__name__}")


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 250
    generations: int = 200
    episode_steps: int = cg.EPISODE_LENGTH
    truncation: int = 5
    mutation_power: float = 0.01
    strategy: Strategy = Strategy.MU
    agent_kind: AgentKind = AgentKind.VQC
    n_layers: int = 8
    n_qubits: int = 6
    hidden_dims: tuple[int, int] = (3, 4)
    n_actions: int = cg.N_ACTIONS
    evaluation: Evaluation = Evaluation.FRESH
    run_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "evaluation", Evaluation(self.evaluation))
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "agent_kind", AgentKind(self.agent_kind))
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not 1 <= self.truncation < self.population_size:
            raise ValueError("truncation must satisfy 1 <= tau < population_size")
        if self.mutation_power < 0:
            raise ValueError("mutation_power must be non-negative")
        if self.generations < 1 or self.episode_steps < 1:
            raise ValueError("generations and episode_steps must be positive")
        if self.strategy is not Strategy.MU and self.truncation < 2:
            raise ValueError("crossover strategies need at least two parents (tau >= 2)")
        if self.strategy is Strategy.LAREMU and self.agent_kind is not AgentKind.VQC:
            raise ValueError("layer-wise crossover is only defined for VQC agents")
        if self.agent_kind is AgentKind.VQC:
            if self.n_layers < 1 or self.n_qubits < 1:
                raise ValueError("n_layers and n_qubits must be positive")
            if 2**self.n_qubits < cg.OBS_DIM:
                raise ValueError(f"{self.n_qubits} qubits cannot embed {cg.OBS_DIM} features")
        if self.agent_kind is AgentKind.NN and (len(self.hidden_dims) != 2 or min(self.hidden_dims) < 1):
            raise ValueError("hidden_dims must be a pair of positive integers")

    @property
    def param_count(self) -> int:
        if self.agent_kind is AgentKind.VQC:
            return vqc_param_count(self.n_qubits, self.n_layers, self.n_actions)
        if self.agent_kind is AgentKind.NN:
            return nn_param_count(cg.OBS_DIM, self.hidden_dims, self.n_actions)
        return 0

    def init_genome(self, rng: np.random.Generator) -> Genome:
        if self.agent_kind is AgentKind.VQC:
            return init_vqc_genome(self.n_qubits, self.n_layers, self.n_actions, rng)
        if self.agent_kind is AgentKind.NN:
            return init_nn_genome(cg.OBS_DIM, self.hidden_dims, self.n_actions, rng)
        return RandomAgent()


class EvaluatedIndividual(NamedTuple):
    genome: Genome
    fitness: float
    total_coins: int
    own_coins: int


class Selection(NamedTuple):
    indices: list[int]
    parents: list
    elite: int


@dataclass
class EvolutionResult:
    config: EvolutionConfig
    records: list[GenerationRecord]
    elite: Genome
    population: list


class EpisodeSeed(NamedTuple):
    """Separate entropy for the environment (layout, respawns) and for random action sampling."""

    env: tuple
    policy: tuple


def episode_seed(run_seed: int, generation: int, index: int,
                 evaluation: Evaluation | str = Evaluation.FRESH) -> EpisodeSeed:
    policy = (int(run_seed), _POLICY_STREAM, int(generation), int(index))
    if Evaluation(evaluation) is Evaluation.FIXED:
        return EpisodeSeed((int(run_seed), _EPISODE_STREAM), policy)
    return EpisodeSeed((int(run_seed), _EPISODE_STREAM, int(generation), int(index)), policy)


def episode_rngs(seed) -> tuple[np.random.Generator, np.random.Generator]:
    """(environment rng, policy rng) for one episode.

    ``seed`` is an :class:`EpisodeSeed` or any plain SeedSequence entropy, which
    is then split into the two streams.
    """
    if isinstance(seed, EpisodeSeed):
        return np.random.default_rng(list(seed.env)), np.random.default_rng(list(seed.policy))
    env_ss, policy_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(env_ss), np.random.default_rng(policy_ss)


def random_legal_action(rng: np.random.Generator, mask) -> int:
    return int(rng.choice(np.flatnonzero(mask)))


def _batch_policy(genomes) -> Optional[Callable[[np.ndarray], np.ndarray]]:
    kind = agent_kind_of(genomes[0])
    if any(agent_kind_of(g) is not kind for g in genomes):
        raise ValueError("population mixes agent kinds")
    if kind is AgentKind.VQC:
        return VqcBatch.from_genomes(genomes, cg.OBS_DIM).values
    if kind is AgentKind.NN:
        return NnBatch.from_genomes(genomes).values
    return None


def evaluate_population(genomes: Sequence, seeds: Sequence, episode_steps: int = cg.EPISODE_LENGTH):
    """Play one self-play episode per genome, all episodes in lockstep."""
    if len(genomes) != len(seeds):
        raise ValueError("need exactly one episode seed per genome")
    if not genomes:
        return []
    rngs = [episode_rngs(s) for s in seeds]
    env = cg.CoinGameBatch([r[0] for r in rngs], episode_steps)
    policy = _batch_policy(genomes)
    n = len(genomes)
    score = np.zeros(n)
    total = np.zeros(n, dtype=np.int64)
    own = np.zeros(n, dtype=np.int64)
    while not env.done:
        mask = env.legal_mask()
        if policy is None:
            actions = np.array([random_legal_action(r[1], m) for r, m in zip(rngs, mask)])
        else:
            actions = select_actions(policy(env.observe()), mask)
        rewards, collected, own_color = env.step(actions)
        score += rewards.sum(axis=1)
        total += collected
        own += own_color
    return [EvaluatedIndividual(g, float(score[i]), int(total[i]), int(own[i])) for i, g in enumerate(genomes)]


def evaluate_fitness(genome, agent_kind, seed, episode_steps: int = cg.EPISODE_LENGTH) -> EvaluatedIndividual:
    """Fitness of one genome on the episode identified by ``seed``."""
    if agent_kind_of(genome) is not AgentKind(agent_kind):
        raise ValueError(f"genome is not a {AgentKind(agent_kind).value} genome")
    return evaluate_population([genome], [seed], episode_steps)[0]


def action_values(genome, observation) -> np.ndarray:
    if isinstance(genome, VqcGenome):
        return vqc_forward(genome, observation)
    if isinstance(genome, NnGenome):
        return nn_forward(genome, observation)
    raise TypeError("random agents have no action values")


def play_episode(genome, seed, episode_steps: int = cg.EPISODE_LENGTH) -> list[cg.StepRecord]:
    """Step-by-step self-play episode returning the full trace.

    Uses the single-observation forward passes, so it doubles as a reference
    for :func:`evaluate_population`.
    """
    env_rng, policy_rng = episode_rngs(seed)
    state = cg.reset(env_rng, episode_steps)
    trace = []
    while not state.done:
        mask = cg.legal_mask(state)
        if isinstance(genome, RandomAgent):
            action = random_legal_action(policy_rng, mask)
        else:
            action = select_action(action_values(genome, cg.observe(state)), mask)
        agent, index = state.active_agent, state.step_count
        state, outcome = cg.step(state, action, env_rng)
        trace.append(cg.StepRecord(index, agent, action, outcome))
    return trace


def truncation_select(evaluated: Sequence[EvaluatedIndividual], tau: int) -> Selection:
    """Top ``tau`` by fitness, ties to the lower index; the elite is the first of them."""
    if not 1 <= tau <= len(evaluated):
        raise ValueError(f"tau={tau} must lie in [1, {len(evaluated)}]")
    fitness = np.array([e.fitness for e in evaluated])
    order = np.argsort(-fitness, kind="stable")[:tau]
    indices = [int(i) for i in order]
    return Selection(indices, [evaluated[i].genome for i in indices], indices[0])


def mutate(genome, sigma: float, rng: np.random.Generator):
    """Add ``sigma * N(0, 1)`` to every parameter; no clipping."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    noise = rng.standard_normal(genome.params.size)
    if sigma == 0:
        return genome
    return genome.with_params(genome.params + sigma * noise)


def _check_pair(parent_a, parent_b) -> None:
    if not parent_a.same_shape(parent_b):
        raise ValueError("crossover parents must share one shape")


def crossover_at(parent_a, parent_b, point: int):
    """Head of ``parent_a`` up to ``point``, tail of ``parent_b`` from there."""
    _check_pair(parent_a, parent_b)
    size = parent_a.params.size
    if not 0 <= point <= size:
        raise ValueError(f"crossover point {point} outside [0, {size}]")
    return parent_a.with_params(np.concatenate([parent_a.params[:point], parent_b.params[point:]]))


def crossover_random(parent_a, parent_b, rng: np.random.Generator, point: Optional[int] = None):
    _check_pair(parent_a, parent_b)
    if point is None:
        point = int(rng.integers(0, parent_a.params.size + 1))
    return crossover_at(parent_a, parent_b, point)


def crossover_layerwise(parent_a, parent_b, rng: np.random.Generator, layer: Optional[int] = None):
    """Cut after the last angle of a random layer; biases always come from ``parent_b``."""
    if not isinstance(parent_a, VqcGenome):
        raise ValueError("layer-wise crossover requires VQC genomes")
    _check_pair(parent_a, parent_b)
    if layer is None:
        layer = int(rng.integers(parent_a.n_layers))
    if not 0 <= layer < parent_a.n_layers:
        raise ValueError(f"layer {layer} outside [0, {parent_a.n_layers})")
    return crossover_at(parent_a, parent_b, (layer + 1) * 3 * parent_a.n_qubits)


_CROSSOVERS = {Strategy.RAREMU: crossover_random, Strategy.LAREMU: crossover_layerwise}


def next_generation(evaluated: Sequence[EvaluatedIndividual], config: EvolutionConfig, rng: np.random.Generator):
    """Breed ``population_size - 1`` mutated children and append the untouched elite."""
    if len(evaluated) != config.population_size:
        raise ValueError(f"expected {config.population_size} individuals, got {len(evaluated)}")
    sel = truncation_select(evaluated, config.truncation)
    tau = len(sel.parents)
    children = []
    for _ in range(config.population_size - 1):
        if config.strategy is Strategy.MU:
            children.append(sel.parents[int(rng.integers(tau))])
        else:
            i, j = rng.choice(tau, size=2, replace=False)
            children.append(_CROSSOVERS[config.strategy](sel.parents[i], sel.parents[j], rng))
    children = [mutate(c, config.mutation_power, rng) for c in children]
    children.append(evaluated[sel.elite].genome)
    return children


def initial_population(config: EvolutionConfig) -> list:
    rng = np.random.default_rng([config.run_seed, _INIT_STREAM])
    return [config.init_genome(rng) for _ in range(config.population_size)]


def run_evolution(config: EvolutionConfig, on_generation: Optional[Callable[[GenerationRecord], None]] = None
                  ) -> EvolutionResult:
    """Run ``config.generations`` generations and return one record per generation."""
    population = initial_population(config)
    records = []
    elite = population[0]
    for gen in range(config.generations):
        seeds = [episode_seed(config.run_seed, gen, i, config.evaluation) for i in range(config.population_size)]
        evaluated = evaluate_population(population, seeds, config.episode_steps)
        record = aggregate(evaluated, gen, config.run_seed)
        records.append(record)
        if on_generation is not None:
            on_generation(record)
        log.debug("seed %d gen %d mean score %.3f", config.run_seed, gen, record.mean_score)
        elite = evaluated[truncation_select(evaluated, 1).elite].genome
        if gen + 1 < config.generations:
            rng = np.random.default_rng([config.run_seed, _BREED_STREAM, gen])
            population = next_generation(evaluated, config, rng)
    return EvolutionResult(config, records, elite, population)
