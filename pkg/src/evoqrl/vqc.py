"""Variational quantum circuit policy.

Circuit per forward pass: amplitude-embed the observation, then ``n_layers``
repetitions of (CNOT ring, RZ-RY-RZ on every wire), then read ``<Z>`` on the
first ``n_actions`` wires and add one bias per action.

Flat parameter layout, which crossover relies on::

    angles[l, i, j] -> l * 3 * n_qubits + i * 3 + j     (j: 0=alpha, 1=beta, 2=gamma)
    biases[k]       -> 3 * n_qubits * n_layers + k
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import statevector as sv
from .actions import select_action

__all__ = [
    "VqcGenome",
    "VqcBatch",
    "vqc_param_count",
    "init_vqc_genome",
    "vqc_forward",
    "ring_pairs",
    "select_action",
]


def vqc_param_count(n_qubits: int, n_layers: int, n_actions: int) -> int:
    return 3 * n_qubits * n_layers + n_actions


def angle_index(layer: int, qubit: int, slot: int, n_qubits: int) -> int:
    return layer * 3 * n_qubits + qubit * 3 + slot


def ring_pairs(n_qubits: int) -> list[tuple[int, int]]:
    """CNOT(i, i+1 mod n) for ascending i; empty for a single wire."""
    if n_qubits < 2:
        return []
    return [(i, (i + 1) % n_qubits) for i in range(n_qubits)]


@dataclass(frozen=True, eq=False)
class VqcGenome:
    n_qubits: int
    n_layers: int
    n_actions: int
    params: np.ndarray = field(repr=False)

    def __post_init__(self):
        if min(self.n_qubits, self.n_layers, self.n_actions) < 1:
            raise ValueError("VQC dimensions must be positive")
        if self.n_actions > self.n_qubits:
            raise ValueError("cannot measure more actions than there are qubits")
        p = np.array(self.params, dtype=np.float64).ravel()
        if p.size != self.param_count:
            raise ValueError(f"expected {self.param_count} parameters, got {p.size}")
        p.flags.writeable = False
        object.__setattr__(self, "params", p)

    @property
    def param_count(self) -> int:
        return vqc_param_count(self.n_qubits, self.n_layers, self.n_actions)

    @property
    def n_angles(self) -> int:
        return 3 * self.n_qubits * self.n_layers

    @property
    def angles(self) -> np.ndarray:
        return self.params[: self.n_angles].reshape(self.n_layers, self.n_qubits, 3)

    @property
    def biases(self) -> np.ndarray:
        return self.params[self.n_angles :]

    def with_params(self, params) -> "VqcGenome":
        return VqcGenome(self.n_qubits, self.n_layers, self.n_actions, params)

    def same_shape(self, other) -> bool:
        return (
            isinstance(other, VqcGenome)
            and (self.n_qubits, self.n_layers, self.n_actions)
            == (other.n_qubits, other.n_layers, other.n_actions)
        )


def init_vqc_genome(n_qubits: int, n_layers: int, n_actions: int, rng: np.random.Generator) -> VqcGenome:
    """Angles uniform in [-pi, pi]; biases start at zero."""
    n_angles = 3 * n_qubits * n_layers
    if min(n_qubits, n_layers, n_actions) < 1:
        raise ValueError("VQC dimensions must be positive")
    angles = rng.uniform(-np.pi, np.pi, size=n_angles)
    return VqcGenome(n_qubits, n_layers, n_actions, np.concatenate([angles, np.zeros(n_actions)]))


def vqc_forward(genome: VqcGenome, observation) -> np.ndarray:
    """Gate-by-gate reference forward pass on a single observation."""
    obs = np.asarray(observation, dtype=np.float64).ravel()
    state = sv.amplitude_embed(obs, genome.n_qubits)
    pairs = ring_pairs(genome.n_qubits)
    for layer in genome.angles:
        for control, target in pairs:
            state = sv.apply_cnot(state, control, target)
        for qubit, (alpha, beta, gamma) in enumerate(layer):
            state = sv.apply_rz(state, qubit, alpha)
            state = sv.apply_ry(state, qubit, beta)
            state = sv.apply_rz(state, qubit, gamma)
    expvals = np.array([sv.expectation_z(state, k) for k in range(genome.n_actions)])
    return expvals + genome.biases


def fused_rotations(angles: np.ndarray) -> np.ndarray:
    """RZ(gamma) @ RY(beta) @ RZ(alpha) for every trailing ``(alpha, beta, gamma)`` triple."""
    alpha, beta, gamma = angles[..., 0], angles[..., 1], angles[..., 2]
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    ry = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2).astype(np.complex128)
    za = np.exp(-0.5j * alpha)
    zg = np.exp(-0.5j * gamma)
    left = np.stack([zg, np.conj(zg)], -1)
    right = np.stack([za, np.conj(za)], -1)
    return left[..., :, None] * ry * right[..., None, :]


def _kron_rows(mats: np.ndarray) -> np.ndarray:
    """Batched Kronecker product of ``mats[:, 0] x mats[:, 1] x ...`` (first factor most significant)."""
    out = mats[:, 0]
    for q in range(1, mats.shape[1]):
        nxt = mats[:, q]
        out = (out[:, :, None, :, None] * nxt[:, None, :, None, :]).reshape(
            out.shape[0], out.shape[1] * 2, out.shape[2] * 2
        )
    return out


class VqcBatch:
    """Many genomes of one shape evaluated in lockstep.

    The circuit after the embedding is a fixed unitary per genome, and the
    embedding is linear up to normalization, so each genome's unitary is
    compiled once (restricted to the ``input_dim`` columns an observation can
    touch) and every forward pass is a single batched mat-vec.
    """

    def __init__(self, params: np.ndarray, n_qubits: int, n_layers: int, n_actions: int,
                 input_dim: int | None = None):
        params = np.asarray(params, dtype=np.float64)
        n_angles = 3 * n_qubits * n_layers
        if params.ndim != 2 or params.shape[1] != n_angles + n_actions:
            raise ValueError(f"expected (batch, {n_angles + n_actions}) parameters, got {params.shape}")
        dim = 2**n_qubits
        self.input_dim = dim if input_dim is None else int(input_dim)
        if not 1 <= self.input_dim <= dim:
            raise ValueError(f"input_dim must lie in [1, {dim}]")
        self.n_qubits = n_qubits
        self.n_layers = n_layers
        self.n_actions = n_actions
        self.batch = params.shape[0]
        self._biases = params[:, n_angles:]
        self._signs = np.stack([sv.z_signs(n_qubits, k) for k in range(n_actions)], axis=1)
        angles = params[:, :n_angles].reshape(self.batch, n_layers, n_qubits, 3)
        self._columns = self._compile(fused_rotations(angles))

    def _compile(self, rot: np.ndarray) -> np.ndarray:
        b, n, k = self.batch, self.n_qubits, self.input_dim
        perm = sv.cnot_permutation(n, ring_pairs(n))
        cols = np.zeros((b, 2**n, k), dtype=np.complex128)
        cols[:, np.arange(k), np.arange(k)] = 1.0
        # the rotation column is a Kronecker product; split it in two halves
        # so each half is a small dense matrix acting on one index group
        head = n // 2
        for layer in range(self.n_layers):
            cols = cols[:, perm, :]
            if head == 0:
                cols = np.matmul(_kron_rows(rot[:, layer]), cols)
                continue
            hi = _kron_rows(rot[:, layer, :head])
            lo = _kron_rows(rot[:, layer, head:])
            cols = np.matmul(hi, cols.reshape(b, 2**head, -1)).reshape(b, 2**head, 2 ** (n - head), k)
            cols = np.matmul(lo[:, None], cols).reshape(b, 2**n, k)
        return cols

    @classmethod
    def from_genomes(cls, genomes, input_dim: int | None = None) -> "VqcBatch":
        g0 = genomes[0]
        if not all(g0.same_shape(g) for g in genomes):
            raise ValueError("all genomes in a batch must share one shape")
        return cls(np.stack([g.params for g in genomes]), g0.n_qubits, g0.n_layers, g0.n_actions, input_dim)

    def values(self, observations: np.ndarray) -> np.ndarray:
        obs = np.asarray(observations, dtype=np.float64)
        if obs.shape != (self.batch, self.input_dim):
            raise ValueError(f"expected observations of shape {(self.batch, self.input_dim)}, got {obs.shape}")
        norms = np.linalg.norm(obs, axis=1)
        if (norms == 0).any():
            raise sv.DegenerateInputError("cannot amplitude-embed an all-zero feature vector")
        psi = np.matmul(self._columns, (obs / norms[:, None])[:, :, None])[:, :, 0]
        probs = psi.real**2 + psi.imag**2
        return probs @ self._signs + self._biases
