"""Two-hidden-layer tanh network used as the classical baseline.

Flat layout: W1 (h1 x in, row-major by output unit), b1, W2 (h2 x h1), b2,
W3 (n_actions x h2), b3.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actions import select_action


def nn_param_count(input_dim: int, hidden_dims, n_actions: int) -> int:
    h1, h2 = hidden_dims
    return (input_dim * h1 + h1) + (h1 * h2 + h2) + (h2 * n_actions + n_actions)


def _layer_shapes(input_dim, hidden_dims, n_actions):
    h1, h2 = hidden_dims
    return [(h1, input_dim), (h2, h1), (n_actions, h2)]


@dataclass(frozen=True, eq=False)
class NnGenome:
    input_dim: int
    hidden_dims: tuple[int, int]
    n_actions: int
    params: np.ndarray = field(repr=False)

    def __post_init__(self):
        hidden = tuple(int(h) for h in self.hidden_dims)
        if len(hidden) != 2 or min(self.input_dim, self.n_actions, *hidden) < 1:
            raise ValueError("NN dimensions must be positive and hidden_dims a pair")
        object.__setattr__(self, "hidden_dims", hidden)
        p = np.array(self.params, dtype=np.float64).ravel()
        if p.size != self.param_count:
            raise ValueError(f"expected {self.param_count} parameters, got {p.size}")
        p.flags.writeable = False
        object.__setattr__(self, "params", p)

    @property
    def param_count(self) -> int:
        return nn_param_count(self.input_dim, self.hidden_dims, self.n_actions)

    def layers(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """(weight, bias) views per layer."""
        out, pos = [], 0
        for rows, cols in _layer_shapes(self.input_dim, self.hidden_dims, self.n_actions):
            w = self.params[pos : pos + rows * cols].reshape(rows, cols)
            pos += rows * cols
            b = self.params[pos : pos + rows]
            pos += rows
            out.append((w, b))
        return out

    def with_params(self, params) -> "NnGenome":
        return NnGenome(self.input_dim, self.hidden_dims, self.n_actions, params)

    def same_shape(self, other) -> bool:
        return (
            isinstance(other, NnGenome)
            and (self.input_dim, self.hidden_dims, self.n_actions)
            == (other.input_dim, other.hidden_dims, other.n_actions)
        )


def init_nn_genome(input_dim: int, hidden_dims, n_actions: int, rng: np.random.Generator) -> NnGenome:
    hidden = tuple(hidden_dims)
    if len(hidden) != 2 or min(input_dim, n_actions, *hidden) < 1:
        raise ValueError("NN dimensions must be positive and hidden_dims a pair")
    n = nn_param_count(input_dim, hidden, n_actions)
    return NnGenome(input_dim, hidden, n_actions, rng.uniform(-np.pi, np.pi, size=n))


def nn_forward(genome: NnGenome, observation) -> np.ndarray:
    x = np.asarray(observation, dtype=np.float64).ravel()
    if x.size != genome.input_dim:
        raise ValueError(f"observation has {x.size} entries, network expects {genome.input_dim}")
    (w1, b1), (w2, b2), (w3, b3) = genome.layers()
    h = np.tanh(w1 @ x + b1)
    h = np.tanh(w2 @ h + b2)
    return w3 @ h + b3


def nn_select_action(values, mask) -> int:
    return select_action(values, mask)


class NnBatch:
    """Lockstep evaluation of many same-shape networks."""

    def __init__(self, params: np.ndarray, input_dim: int, hidden_dims, n_actions: int):
        params = np.asarray(params, dtype=np.float64)
        n = nn_param_count(input_dim, hidden_dims, n_actions)
        if params.ndim != 2 or params.shape[1] != n:
            raise ValueError(f"expected (batch, {n}) parameters, got {params.shape}")
        self.batch = params.shape[0]
        self.input_dim = input_dim
        self._layers = []
        pos = 0
        for rows, cols in _layer_shapes(input_dim, hidden_dims, n_actions):
            w = params[:, pos : pos + rows * cols].reshape(self.batch, rows, cols)
            pos += rows * cols
            b = params[:, pos : pos + rows]
            pos += rows
            self._layers.append((w, b))

    @classmethod
    def from_genomes(cls, genomes) -> "NnBatch":
        g0 = genomes[0]
        if not all(g0.same_shape(g) for g in genomes):
            raise ValueError("all genomes in a batch must share one shape")
        return cls(np.stack([g.params for g in genomes]), g0.input_dim, g0.hidden_dims, g0.n_actions)

    def values(self, observations: np.ndarray) -> np.ndarray:
        h = np.asarray(observations, dtype=np.float64)
        if h.shape != (self.batch, self.input_dim):
            raise ValueError(f"expected observations of shape {(self.batch, self.input_dim)}, got {h.shape}")
        last = len(self._layers) - 1
        for i, (w, b) in enumerate(self._layers):
            h = np.matmul(w, h[:, :, None])[:, :, 0] + b
            if i < last:
                h = np.tanh(h)
        return h
