"""Independent reference computations used as test oracles.

Everything here is built from full 2^n x 2^n matrices via np.kron and shares
no code with the package's simulator.
"""
import numpy as np

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def embed_1q(gate, qubit, n):
    return kron_all([gate if i == qubit else I2 for i in range(n)])


def cnot_dense(control, target, n):
    off = kron_all([P0 if i == control else I2 for i in range(n)])
    on = kron_all([P1 if i == control else (X if i == target else I2) for i in range(n)])
    return off + on


def ry(t):
    return np.array([[np.cos(t / 2), -np.sin(t / 2)], [np.sin(t / 2), np.cos(t / 2)]], dtype=complex)


def rz(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def circuit_unitary(angles, n):
    """Dense unitary of the layered circuit; ``angles`` has shape (layers, n, 3)."""
    u = np.eye(2**n, dtype=complex)
    for layer in angles:
        if n > 1:
            for i in range(n):
                u = cnot_dense(i, (i + 1) % n, n) @ u
        rot = kron_all([rz(g) @ ry(b) @ rz(a) for a, b, g in layer])
        u = rot @ u
    return u


def vqc_values(angles, biases, observation, n):
    x = np.zeros(2**n)
    obs = np.asarray(observation, dtype=float)
    x[: obs.size] = obs
    psi = circuit_unitary(np.asarray(angles), n) @ (x / np.sqrt(np.sum(x**2)))
    return np.array([np.real(np.conj(psi) @ embed_1q(Z, k, n) @ psi) for k in range(len(biases))]) + biases


def mlp_values(params, input_dim, hidden, n_actions, x):
    """Straight-line loop implementation of the tanh MLP."""
    h1, h2 = hidden
    p = list(params)
    pos = 0

    def dense(n_in, n_out, inp, act):
        nonlocal pos
        w = p[pos : pos + n_in * n_out]
        pos += n_in * n_out
        b = p[pos : pos + n_out]
        pos += n_out
        out = []
        for o in range(n_out):
            acc = b[o]
            for i in range(n_in):
                acc += w[o * n_in + i] * inp[i]
            out.append(np.tanh(acc) if act else acc)
        return out

    a = dense(input_dim, h1, list(x), True)
    a = dense(h1, h2, a, True)
    return np.array(dense(h2, n_actions, a, False))
