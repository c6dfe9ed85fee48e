"""Dense statevector simulation of a small qubit register.

Basis ordering: qubit 0 is the most significant bit of the basis index, so
``|q0 q1 ... q_{n-1}>`` sits at ``sum(q_i * 2**(n-1-i))``. Reshaping the
amplitude vector to ``(2,) * n`` in C order puts qubit ``i`` on axis ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 20


class DegenerateInputError(ValueError):
    """Raised when an input cannot be normalized into a quantum state."""


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, got shape {amps.shape}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)


def _check_n_qubits(n_qubits: int) -> None:
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be an integer in [1, {MAX_QUBITS}], got {n_qubits!r}")


def _check_qubit(state: StateVector, qubit: int, name: str = "qubit") -> None:
    if not isinstance(qubit, (int, np.integer)) or not 0 <= qubit < state.n_qubits:
        raise ValueError(f"{name} index {qubit!r} out of range for {state.n_qubits} qubits")


def new_state(n_qubits: int) -> StateVector:
    """All-zeros register ``|0...0>``."""
    _check_n_qubits(n_qubits)
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def amplitude_embed(features, n_qubits: int) -> StateVector:
    """Zero-pad ``features`` to ``2**n_qubits`` entries and L2-normalize them into amplitudes."""
    _check_n_qubits(n_qubits)
    x = np.asarray(features, dtype=np.float64).ravel()
    dim = 2**n_qubits
    if not 1 <= x.size <= dim:
        raise ValueError(f"{x.size} features do not fit into {n_qubits} qubits (max {dim})")
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise DegenerateInputError("cannot amplitude-embed an all-zero feature vector")
    padded = np.zeros(dim, dtype=np.complex128)
    padded[: x.size] = x / norm
    return StateVector(n_qubits, padded)


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz_matrix(angle: float) -> np.ndarray:
    phase = np.exp(-0.5j * angle)
    return np.array([[phase, 0.0], [0.0, np.conj(phase)]], dtype=np.complex128)


def apply_single_qubit(state: StateVector, qubit: int, matrix: np.ndarray) -> StateVector:
    """Apply a 2x2 unitary to one wire."""
    _check_qubit(state, qubit)
    psi = np.moveaxis(state.tensor(), qubit, 0)
    psi = np.tensordot(matrix, psi, axes=([1], [0]))
    psi = np.moveaxis(psi, 0, qubit)
    return StateVector(state.n_qubits, psi.reshape(-1))


def apply_ry(state: StateVector, qubit: int, angle: float) -> StateVector:
    return apply_single_qubit(state, qubit, ry_matrix(angle))


def apply_rz(state: StateVector, qubit: int, angle: float) -> StateVector:
    return apply_single_qubit(state, qubit, rz_matrix(angle))


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """Flip ``target`` on every basis state whose ``control`` bit is 1."""
    _check_qubit(state, control, "control")
    _check_qubit(state, target, "target")
    if control == target:
        raise ValueError("control and target must differ")
    psi = state.tensor().copy()
    idx = [slice(None)] * state.n_qubits
    idx[control] = 1
    sub = psi[tuple(idx)]
    # target axis shifts down by one once the control axis is indexed away
    t_axis = target if target < control else target - 1
    psi[tuple(idx)] = np.flip(sub, axis=t_axis)
    return StateVector(state.n_qubits, psi.reshape(-1))


def z_signs(n_qubits: int, qubit: int) -> np.ndarray:
    """Eigenvalues of Z on ``qubit`` for every basis index (+1 for bit 0, -1 for bit 1)."""
    bits = (np.arange(2**n_qubits) >> (n_qubits - 1 - qubit)) & 1
    return 1.0 - 2.0 * bits


def expectation_z(state: StateVector, qubit: int) -> float:
    """Exact ``<Z>`` on one wire; no shot noise."""
    _check_qubit(state, qubit)
    return float(np.dot(state.probabilities(), z_signs(state.n_qubits, qubit)))


def cnot_permutation(n_qubits: int, pairs) -> np.ndarray:
    """Index map ``perm`` with ``apply(CNOTs)(psi) == psi[perm]`` for a CNOT sequence.

    ``pairs`` is an ordered iterable of ``(control, target)``.
    """
    idx = np.arange(2**n_qubits)
    perm = idx.copy()
    for control, target in pairs:
        cbit = 1 << (n_qubits - 1 - control)
        tbit = 1 << (n_qubits - 1 - target)
        src = np.where(idx & cbit, idx ^ tbit, idx)
        perm = perm[src]
    return perm
