"""Dense complex linear algebra and Pauli-basis utilities.

Conventions used throughout the package:

- States live on qubit registers; operators are ``2**n x 2**n`` complex
  ndarrays (dtype complex128).
- ``herm_exp(H, s)`` returns ``exp(-i*s*H)`` for Hermitian ``H`` via
  eigendecomposition, so the result is unitary up to floating error.
- The n-qubit Pauli basis is ordered lexicographically with I < X < Y < Z
  (II, IX, IY, IZ, XI, ... for n=2) and uses plain (unnormalized) Pauli
  strings: ``Tr[P_i P_j] = 2**n * delta_ij``.
- "Equal up to global phase" means ``|Tr[A^dag B]| / dim`` is 1 within
  tolerance.

All returned basis matrices are flagged read-only; everything here is
stateless and safe to share across parallel workers.
"""

from __future__ import annotations

from functools import lru_cache, reduce
from itertools import product

import numpy as np

I2 = np.array([[1, 0], [0, 1]], dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI_1Q = {"I": I2, "X": X, "Y": Y, "Z": Z}

MAX_PAULI_QUBITS = 5


def kron(factors) -> np.ndarray:
    """Kronecker product of a non-empty sequence of matrices, in order."""
    factors = list(factors)
    if not factors:
        raise ValueError("kron requires at least one factor")
    return reduce(np.kron, [np.asarray(f, dtype=complex) for f in factors])


def is_hermitian(H, tol: float = 1e-10) -> bool:
    H = np.asarray(H)
    return bool(np.abs(H - H.conj().T).max() < tol)


def is_unitary(U, tol: float = 1e-12) -> bool:
    U = np.asarray(U)
    return bool(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() < tol)


def herm_exp(H, s: float) -> np.ndarray:
    """``exp(-i*s*H)`` for Hermitian ``H``.

    Uses the eigendecomposition of ``H`` so the result is exactly unitary
    up to floating error (no series truncation).

    Raises ``ValueError`` if ``H`` is not Hermitian to 1e-10.
    """
    H = np.asarray(H, dtype=complex)
    if not is_hermitian(H, 1e-10):
        raise ValueError("herm_exp requires a Hermitian matrix")
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * s * w)) @ V.conj().T


def pauli_labels(n: int) -> list[str]:
    """The 4**n Pauli-string labels in canonical (lexicographic) order."""
    _check_n(n)
    return ["".join(p) for p in product("IXYZ", repeat=n)]


def pauli_basis(n: int) -> list[np.ndarray]:
    """The 4**n unnormalized Pauli strings on n qubits, identity first.

    Ordering is lexicographic with I < X < Y < Z; each element is Hermitian
    and satisfies ``Tr[P_i P_j] = 2**n * delta_ij``. Matrices are cached and
    read-only.
    """
    _check_n(n)
    return list(_pauli_basis_cached(n))


def pauli_basis_stack(n: int) -> np.ndarray:
    """Same as :func:`pauli_basis` but stacked into a (4**n, 2**n, 2**n) array."""
    _check_n(n)
    return _pauli_stack_cached(n)


def _check_n(n):
    if not (1 <= n <= MAX_PAULI_QUBITS):
        raise ValueError(f"qubit count must be in [1, {MAX_PAULI_QUBITS}], got {n}")


@lru_cache(maxsize=MAX_PAULI_QUBITS)
def _pauli_basis_cached(n: int):
    mats = []
    for labels in product("IXYZ", repeat=n):
        P = kron([PAULI_1Q[c] for c in labels])
        P.flags.writeable = False
        mats.append(P)
    return tuple(mats)


@lru_cache(maxsize=MAX_PAULI_QUBITS)
def _pauli_stack_cached(n: int) -> np.ndarray:
    stack = np.stack(_pauli_basis_cached(n))
    stack.flags.writeable = False
    return stack


def phase_overlap(A, B) -> float:
    """``|Tr[A^dag B]| / dim`` -- equals 1 iff A == B up to a global phase."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(abs(np.trace(A.conj().T @ B)) / A.shape[0])


def equal_up_to_phase(A, B, tol: float = 1e-10) -> bool:
    return abs(1.0 - phase_overlap(A, B)) < tol


def embed(U, qubits, n: int) -> np.ndarray:
    """Embed an operator acting on ``qubits`` into the full n-qubit space.

    ``U`` must be ``2**k x 2**k`` where ``k = len(qubits)``; qubit 0 is the
    most significant bit of the computational-basis index.
    """
    qubits = tuple(qubits)
    k = len(qubits)
    U = np.asarray(U, dtype=complex)
    if U.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {U.shape} does not match {k} qubit(s)")
    if len(set(qubits)) != k or any(q < 0 or q >= n for q in qubits):
        raise ValueError(f"bad qubit indices {qubits} for n={n}")
    if k == n and qubits == tuple(range(n)):
        return U
    rest = [q for q in range(n) if q not in qubits]
    M = kron([U] + [I2] * (n - k))
    # tensor axes currently ordered [qubits..., rest...]; permute to natural order
    order = list(qubits) + rest
    inv = np.argsort(order)
    T = M.reshape((2,) * (2 * n))
    perm = list(inv) + [n + i for i in inv]
    return np.ascontiguousarray(T.transpose(perm).reshape(2**n, 2**n))
