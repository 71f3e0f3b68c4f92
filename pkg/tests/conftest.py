"""Shared test helpers: independent oracles kept off the library's code paths."""

import numpy as np
import pytest
from scipy.linalg import expm

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
CNOT4 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                 dtype=complex)


def kron_chain(*ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def expi(H, s=1.0):
    """Independent matrix exponential exp(-i s H) (Pade, not eigh)."""
    return expm(-1j * s * np.asarray(H, dtype=complex))


def embed_on(U, qubits, n):
    """Independent embedding: permutation-matrix route."""
    k = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    big = kron_chain(U, *([I2] * (n - k)))
    src = list(qubits) + rest
    P = np.zeros((2**n, 2**n))
    for b in range(2**n):
        bits = [(b >> (n - 1 - i)) & 1 for i in range(n)]
        nb = 0
        for pos, q in enumerate(src):
            nb |= bits[q] << (n - 1 - pos)
        P[b, nb] = 1.0
    return P @ big @ P.T


def phase_overlap(A, B):
    return abs(np.trace(np.asarray(A).conj().T @ np.asarray(B))) / A.shape[0]


def random_unitary(rng, dim):
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(M)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_hermitian(rng, dim):
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (M + M.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
