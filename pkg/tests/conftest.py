import itertools
from functools import reduce

import numpy as np
import pytest

# Dense-matrix oracle for small circuits, independent of the package.
_I = np.eye(2, dtype=complex)
_SINGLE = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
    "s": np.diag([1, 1j]),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]),
    "sdg": np.diag([1, -1j]),
    "tdg": np.diag([1, np.exp(-1j * np.pi / 4)]),
}


def _basis_permutation(n, fn):
    """Matrix of a classical reversible map on n qubits (qubit 0 = most significant bit)."""
    dim = 2 ** n
    m = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        bits = [(idx >> (n - 1 - k)) & 1 for k in range(n)]
        out = fn(bits)
        j = sum(b << (n - 1 - k) for k, b in enumerate(out))
        m[j, idx] = 1
    return m


def gate_matrix(kind, qubits, n):
    if kind in _SINGLE:
        (q,) = qubits
        return reduce(np.kron, [_SINGLE[kind] if k == q else _I for k in range(n)])
    if kind == "cnot":
        c, t = qubits

        def f(bits):
            bits = list(bits)
            bits[t] ^= bits[c]
            return bits
        return _basis_permutation(n, f)
    if kind == "toffoli":
        a, b, t = qubits

        def f(bits):
            bits = list(bits)
            bits[t] ^= bits[a] & bits[b]
            return bits
        return _basis_permutation(n, f)
    raise KeyError(kind)


def circuit_matrix(ops, n):
    u = np.eye(2 ** n, dtype=complex)
    for kind, qubits in ops:
        u = gate_matrix(kind, qubits, n) @ u
    return u


def equal_up_to_phase(a, b, tol=1e-9):
    k = np.argmax(np.abs(b))
    idx = np.unravel_index(k, b.shape)
    if abs(a[idx]) < tol:
        return False
    phase = a[idx] / b[idx]
    return abs(abs(phase) - 1) < tol and np.allclose(a, phase * b, atol=tol)


@pytest.fixture
def matrix_oracle():
    return circuit_matrix, equal_up_to_phase


@pytest.fixture(scope="session")
def brute_qap():
    def solve(flow, dist):
        n = len(flow)
        best = None
        for rest in itertools.permutations(range(1, n)):
            perm = (0, *rest)
            cost = sum(flow[i][j] * dist[perm[i]][perm[j]] for i in range(n) for j in range(n))
            if best is None or cost < best[1] - 1e-9:
                best = (perm, cost)
        return best
    return solve
