"""Circuit IR, parity-controlled-rotation builders, and exact execution.

Two execution pipelines are provided and must agree:

- :func:`unitary_of` / :func:`run_density` evolve states exactly, applying
  realized gate unitaries and attached stochastic channels (as Pauli
  transfer matrices) to a density matrix;
- :func:`run_ptm` converts every step to a PTM and composes, which is how
  long circuits with pre-characterized gates are simulated cheaply.

The plain-text serialization is line oriented, one gate per line:

    qubits <n>
    rot1q <q> <theta> <phi>
    virtual_z <q> <theta>
    xx <qa> <qb> <theta> <phase_a> <phase_b>
    hadamard <q>
    cnot <control> <target> <standard|inverse>
    pauli_x <q>            (same for pauli_y / pauli_z)

Floats are written with repr so parse(print(c)) == c exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import channels, gates, qmat
from .gates import IDEAL, INVERSE, STANDARD, Gate, NoiseModel

HIDDEN_INVERSE = "hidden"

MAX_DENSE_DIM = 1024


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n < 1:
            raise ValueError("circuit needs at least one qubit")
        for g in self.gates:
            if any(q >= self.n for q in g.qubits):
                raise ValueError(f"gate {g} exceeds qubit count {self.n}")

    def __len__(self):
        return len(self.gates)


def parity_controlled_z(n: int, theta: float, orientations=None) -> Circuit:
    """CNOT ladder onto qubit n-1, a virtual Z(theta), and the return ladder.

    ``orientations`` lists the orientation of all 2(n-1) CNOTs in temporal
    order (defaults to all standard).  The noiseless unitary equals
    ``exp(-i theta/2 Z^(x)n)`` up to a global phase for any orientation
    assignment.
    """
    if n < 2:
        raise ValueError("parity-controlled rotation needs n >= 2")
    theta = gates.wrap_pi(theta)
    if orientations is None:
        orientations = [STANDARD] * (2 * (n - 1))
    orientations = list(orientations)
    if len(orientations) != 2 * (n - 1):
        raise ValueError(f"need {2 * (n - 1)} orientations, got {len(orientations)}")
    gs = []
    for j in range(n - 1):
        gs.append(gates.cnot(j, n - 1, orientations[j]))
    gs.append(gates.virtual_z(n - 1, theta))
    for i, j in enumerate(reversed(range(n - 1))):
        gs.append(gates.cnot(j, n - 1, orientations[n - 1 + i]))
    return Circuit(n, gs)


def repeated_block_circuit(n: int, theta: float, reps: int, config: str = STANDARD) -> Circuit:
    """Hadamard sandwich around ``reps`` parity-controlled-Z blocks.

    ``config``: ``"hidden"`` inverts every return-ladder CNOT, ``"standard"``
    leaves all CNOTs in the standard orientation.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if config not in (HIDDEN_INVERSE, STANDARD):
        raise ValueError(f"bad config {config!r}")
    closing = INVERSE if config == HIDDEN_INVERSE else STANDARD
    theta = gates.wrap_pi(theta)
    gs = [gates.hadamard(q) for q in range(n)]
    for _ in range(reps):
        for j in range(n - 1):
            gs.append(gates.cnot(j, n - 1, STANDARD))
        gs.append(gates.virtual_z(n - 1, theta))
        for j in reversed(range(n - 1)):
            gs.append(gates.cnot(j, n - 1, closing))
    gs += [gates.hadamard(q) for q in range(n)]
    return Circuit(n, gs)


def ideal_parity_unitary(n: int, theta: float) -> np.ndarray:
    """``exp(-i theta/2 Z^(x)n)`` -- the target of the parity circuits."""
    phases = np.empty(2**n)
    for b in range(2**n):
        z = 1 - 2 * (bin(b).count("1") % 2)
        phases[b] = -0.5 * theta * z
    return np.diag(np.exp(1j * phases))


def unitary_of(c: Circuit, nm: NoiseModel = IDEAL) -> np.ndarray:
    """Ordered product of the realized gates, embedded on the full register."""
    dim = 2**c.n
    if dim > MAX_DENSE_DIM:
        raise ValueError(f"dense dimension {dim} exceeds {MAX_DENSE_DIM}")
    U = np.eye(dim, dtype=complex)
    for g in c.gates:
        U = qmat.embed(gates.realize(g, nm), g.qubits, c.n) @ U
    return U


def run_density(c: Circuit, nm: NoiseModel = IDEAL, channel_map=None) -> np.ndarray:
    """Z-basis probabilities of |0..0> evolved through the noisy circuit.

    ``channel_map`` maps a gate index to a PTM applied right after that
    gate (how stochastic channels are attached to gates).  Raises
    ``ValueError`` on non-CPTP channels or dimension mismatch.
    """
    channel_map = _checked_channels(c, channel_map)
    dim = 2**c.n
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    for i, g in enumerate(c.gates):
        U = qmat.embed(gates.realize(g, nm), g.qubits, c.n)
        rho = U @ rho @ U.conj().T
        if i in channel_map:
            rho = channels.apply_ptm(channel_map[i], rho)
    probs = np.real(np.diag(rho)).copy()
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probability normalization drifted to {total}")
    return probs


def run_ptm(c: Circuit, nm: NoiseModel = IDEAL, channel_map=None) -> np.ndarray:
    """Same output as :func:`run_density`, via PTM composition throughout."""
    channel_map = _checked_channels(c, channel_map)
    R = channels.identity_ptm(c.n)
    for i, g in enumerate(c.gates):
        U = qmat.embed(gates.realize(g, nm), g.qubits, c.n)
        R = channels.compose_ptms([R, channels.ptm_of_unitary(U)])
        if i in channel_map:
            R = channels.compose_ptms([R, channel_map[i]])
    dim = 2**c.n
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[0, 0] = 1.0
    vec = R.mat @ channels.pauli_vector(rho0, c.n)
    rho = channels.matrix_from_pauli_vector(vec, c.n)
    return np.real(np.diag(rho)).copy()


def channels_after_two_qubit(c: Circuit, ptm) -> dict:
    """Channel map attaching ``ptm`` after every two-qubit gate."""
    return {i: ptm for i, g in enumerate(c.gates) if g.kind in gates.TWO_QUBIT_KINDS}


def _checked_channels(c: Circuit, channel_map) -> dict:
    if not channel_map:
        return {}
    out = {}
    for i, R in channel_map.items():
        if not (0 <= i < len(c.gates)):
            raise ValueError(f"channel index {i} out of range")
        if R.n != c.n:
            raise ValueError(f"channel on {R.n} qubits attached to {c.n}-qubit circuit")
        if not channels.is_cptp(R):
            raise ValueError(f"channel at gate {i} is not CPTP")
        out[i] = R
    return out


# ---------------------------------------------------------------------------
# plain-text serialization

def to_text(c: Circuit) -> str:
    lines = [f"qubits {c.n}"]
    for g in c.gates:
        if g.kind == "cnot":
            lines.append(f"cnot {g.qubits[0]} {g.qubits[1]} {g.orientation}")
        else:
            parts = [g.kind] + [str(q) for q in g.qubits] + [repr(p) for p in g.params]
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


class CircuitParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def from_text(text: str) -> Circuit:
    n = None
    gs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind, args = tok[0], tok[1:]
        try:
            if kind == "qubits":
                n = int(args[0])
            elif kind == "rot1q":
                gs.append(gates.rot1q(int(args[0]), float(args[1]), float(args[2])))
            elif kind == "virtual_z":
                gs.append(gates.virtual_z(int(args[0]), float(args[1])))
            elif kind == "xx":
                phases = [float(a) for a in args[3:5]] if len(args) > 3 else [0.0, 0.0]
                gs.append(gates.xx(int(args[0]), int(args[1]), float(args[2]), *phases))
            elif kind == "hadamard":
                gs.append(gates.hadamard(int(args[0])))
            elif kind == "cnot":
                orientation = args[2] if len(args) > 2 else STANDARD
                gs.append(gates.cnot(int(args[0]), int(args[1]), orientation))
            elif kind in ("pauli_x", "pauli_y", "pauli_z"):
                gs.append(Gate(kind, (int(args[0]),)))
            else:
                raise ValueError(f"unknown gate kind {kind!r}")
        except (IndexError, ValueError) as exc:
            raise CircuitParseError(lineno, str(exc)) from exc
    if n is None:
        raise CircuitParseError(0, "missing 'qubits <n>' header")
    return Circuit(n, gs)


def write_file(c: Circuit, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_text(c))


def read_file(path) -> Circuit:
    with open(path) as fh:
        return from_text(fh.read())
