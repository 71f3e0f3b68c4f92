"""Pauli transfer matrix machinery: construction, composition, validation.

A channel Lambda on n qubits is represented by the real 4**n x 4**n matrix

    R_ij = Tr[P_i Lambda(P_j)] / 2**n

over the unnormalized Pauli strings (lexicographic order, identity first).
With this convention:

- trace preservation  <=>  first row is (1, 0, ..., 0);
- unitality           <=>  first column is (1, 0, ..., 0)^T;
- applying channels in sequence multiplies their PTMs with the *last*
  applied channel as the leftmost factor;
- a unitary conjugation gives an orthogonal PTM.

Complete positivity is checked through the (trace-normalized) Choi matrix

    C = (1/4**n) sum_ij R_ij  P_i (x) P_j^T,

which is positive semidefinite iff the channel is CP.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmat

CP_EIG_TOL = -1e-8
TP_TOL = 1e-10


@dataclass(frozen=True)
class PTM:
    n: int
    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=float)
        d = 4**self.n
        if mat.shape != (d, d):
            raise ValueError(f"PTM for n={self.n} must be {d}x{d}, got {mat.shape}")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)


def identity_ptm(n: int) -> PTM:
    return PTM(n, np.eye(4**n))


def ptm_of_unitary(U) -> PTM:
    """PTM of the conjugation ``rho -> U rho U^dag``; orthogonal by construction."""
    U = np.asarray(U, dtype=complex)
    dim = U.shape[0]
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if not qmat.is_unitary(U, 1e-10):
        raise ValueError("ptm_of_unitary requires a unitary matrix")
    P = qmat.pauli_basis_stack(n)
    conj = np.einsum("ab,jbc,dc->jad", U, P, U.conj(), optimize=True)
    R = np.real(np.einsum("iab,jba->ij", P, conj, optimize=True)) / dim
    return PTM(n, R)


def depolarizing_ptm(n: int, p: float) -> PTM:
    """Global depolarizing channel: keep the state with probability ``p``."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"retention probability must be in [0, 1], got {p}")
    diag = np.full(4**n, p)
    diag[0] = 1.0
    return PTM(n, np.diag(diag))


def compose_ptms(seq) -> PTM:
    """Compose channels given in application order (first applied first)."""
    seq = list(seq)
    if not seq:
        raise ValueError("compose_ptms requires at least one PTM")
    n = seq[0].n
    if any(R.n != n for R in seq):
        raise ValueError("PTM qubit counts differ")
    out = seq[0].mat
    for R in seq[1:]:
        out = R.mat @ out
    return PTM(n, out)


def process_fidelity_from_ptm(R: PTM, R_ideal: PTM) -> float:
    if R.n != R_ideal.n:
        raise ValueError("PTM qubit counts differ")
    return float(np.trace(R_ideal.mat.T @ R.mat) / 4**R.n)


def avg_fidelity_from_ptm(R: PTM, R_ideal: PTM) -> float:
    """Average gate fidelity ``(2**n F_pro + 1) / (2**n + 1)`` vs an ideal PTM."""
    d = 2**R.n
    return (d * process_fidelity_from_ptm(R, R_ideal) + 1.0) / (d + 1.0)


def choi_matrix(R: PTM) -> np.ndarray:
    """Trace-normalized Choi matrix of the channel."""
    P = qmat.pauli_basis_stack(R.n)
    PT = P.transpose(0, 2, 1)
    C = np.einsum("ij,iab,jcd->acbd", R.mat, P, PT, optimize=True)
    d2 = (2**R.n) ** 2
    return C.reshape(d2, d2) / 4**R.n


def choi_min_eigenvalue(R: PTM) -> float:
    C = choi_matrix(R)
    C = 0.5 * (C + C.conj().T)
    return float(np.linalg.eigvalsh(C)[0])


def is_trace_preserving(R: PTM, tol: float = TP_TOL) -> bool:
    e1 = np.zeros(4**R.n)
    e1[0] = 1.0
    return bool(np.abs(R.mat[0] - e1).max() < tol)


def is_cptp(R: PTM, cp_tol: float = CP_EIG_TOL, tp_tol: float = TP_TOL) -> bool:
    return is_trace_preserving(R, tp_tol) and choi_min_eigenvalue(R) >= cp_tol


def pauli_vector(rho, n: int) -> np.ndarray:
    """Coefficients ``Tr[P_i rho]`` (real for Hermitian rho)."""
    P = qmat.pauli_basis_stack(n)
    return np.real(np.einsum("iab,ba->i", P, np.asarray(rho, dtype=complex),
                             optimize=True))


def matrix_from_pauli_vector(vec, n: int) -> np.ndarray:
    """Inverse of :func:`pauli_vector`: ``rho = sum_i vec_i P_i / 2**n``."""
    P = qmat.pauli_basis_stack(n)
    return np.einsum("i,iab->ab", np.asarray(vec, dtype=float), P,
                     optimize=True) / 2**n


def apply_ptm(R: PTM, rho) -> np.ndarray:
    return matrix_from_pauli_vector(R.mat @ pauli_vector(rho, R.n), R.n)


# ---------------------------------------------------------------------------
# CSV export (row-major, header records n and basis order)

def write_csv(R: PTM, path) -> None:
    labels = qmat.pauli_labels(R.n)
    with open(path, "w") as fh:
        fh.write(f"# ptm n={R.n} basis=lexicographic({'|'.join(labels[:4])}...)"
                 f" rows=output cols=input\n")
        fh.write(",".join(labels) + "\n")
        for row in R.mat:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def read_csv(path) -> PTM:
    rows = []
    n = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line.split():
                    if tok.startswith("n="):
                        n = int(tok[2:])
                continue
            if line[0].isalpha() or line[0] == "I":
                continue  # header row of labels
            rows.append([float(x) for x in line.split(",")])
    mat = np.array(rows)
    if n is None:
        n = int(round(np.log2(mat.shape[0]) / 2))
    return PTM(n, mat)
