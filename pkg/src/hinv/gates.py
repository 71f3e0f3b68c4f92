"""Native trapped-ion gate set, CNOT decompositions, and coherent-error models.

Gate kinds
----------
- ``rot1q``: driven single-qubit rotation ``R(theta, phi) = exp(-i theta/2
  (cos(phi) X + sin(phi) Y))``.
- ``virtual_z``: frame Z rotation ``exp(-i theta/2 Z)``, always noiseless.
- ``xx``: Molmer-Sorensen interaction ``exp(-i theta sigma_a (x) sigma_b)``
  where each factor is an equatorial axis ``sigma_phi = cos(phi) X +
  sin(phi) Y``; per-ion programmed phases default to the XX axis.
- ``hadamard``: realized through its native sequence (see
  :func:`hadamard_sequence`), noise applies to the driven part only.
- ``cnot``: a self-adjoint composite carrying an orientation tag.  The
  ``standard`` orientation is a fixed 5-gate native sequence; ``inverse`` is
  that sequence reversed with every angle negated (the driven Hermitian
  conjugate).  Both realize CNOT exactly when noiseless; under angle-
  inverting noise the inverse realizes the exact adjoint of the standard
  gate, which is what hidden-inverse cancellation exploits.
- ``pauli_x/y/z``: frame Paulis used by randomized compiling; realized
  exactly (they stand for corrections merged into adjacent single-qubit
  layers at zero cost).

Noise model
-----------
``NoiseModel(eps_2q, eps_1q, phi_diff, delta_detune)``:

- overrotation is multiplicative on the rotation angle, ``theta ->
  (1+eps) * theta``;
- ``phi_diff`` offsets the XX interaction axis on both ions (single-qubit
  gates define the phase frame);
- ``delta_detune`` adds a Z drift term scaled by the pulse duration.  The
  duration is proportional to ``|theta|`` (a negated rotation flips the
  drive phase, not time), so detuning does *not* invert with inverted
  controls -- unlike the other three knobs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmat
from .qmat import I2, X, Y, Z

STANDARD = "standard"
INVERSE = "inverse"

CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

HADAMARD_MATRIX = (X + Z) / np.sqrt(2)

_PAULI_KINDS = {"pauli_x": X, "pauli_y": Y, "pauli_z": Z}

TWO_QUBIT_KINDS = ("xx", "cnot")


def wrap_two_pi(theta: float) -> float:
    """Canonicalize an angle to (-2*pi, 2*pi], preserving full 2*pi loops."""
    return theta - 4 * math.pi * math.ceil((theta - 2 * math.pi) / (4 * math.pi))


def wrap_pi(theta: float) -> float:
    """Wrap an angle to [-pi, pi]."""
    t = math.fmod(theta, 2 * math.pi)
    if t > math.pi:
        t -= 2 * math.pi
    elif t < -math.pi:
        t += 2 * math.pi
    return t


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    orientation: str = STANDARD

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit indices in {self.qubits}")
        if self.kind == "cnot" and self.orientation not in (STANDARD, INVERSE):
            raise ValueError(f"bad orientation {self.orientation!r}")


def rot1q(q: int, theta: float, phi: float) -> Gate:
    return Gate("rot1q", (q,), (wrap_two_pi(theta), float(phi)))


def virtual_z(q: int, theta: float) -> Gate:
    return Gate("virtual_z", (q,), (wrap_two_pi(theta),))


def xx(qa: int, qb: int, theta: float, phase_a: float = 0.0, phase_b: float = 0.0) -> Gate:
    return Gate("xx", (qa, qb), (wrap_two_pi(theta), float(phase_a), float(phase_b)))


def hadamard(q: int) -> Gate:
    return Gate("hadamard", (q,))


def cnot(control: int, target: int, orientation: str = STANDARD) -> Gate:
    return Gate("cnot", (control, target), (), orientation)


def pauli(q: int, label: str) -> list[Gate]:
    """Frame Pauli as a (possibly empty) gate list; label in I/X/Y/Z."""
    label = label.upper()
    if label == "I":
        return []
    if label not in "XYZ":
        raise ValueError(f"bad Pauli label {label!r}")
    return [Gate("pauli_" + label.lower(), (q,))]


@dataclass(frozen=True)
class NoiseModel:
    """Coherent control-error parameters; the zero model is exactly ideal."""

    eps_2q: float = 0.0
    eps_1q: float = 0.0
    phi_diff: float = 0.0
    delta_detune: float = 0.0

    def __post_init__(self):
        for name in ("eps_2q", "eps_1q", "phi_diff", "delta_detune"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def ideal(cls) -> "NoiseModel":
        return cls()


IDEAL = NoiseModel()


def amplitude_to_angle_overrotation(eps_amplitude: float) -> float:
    """Map a Rabi-amplitude miscalibration to the induced MS angle error.

    The MS gate angle is quadratic in the drive amplitude, so a fractional
    amplitude error eps produces an angle overrotation (1+eps)^2 - 1.
    """
    return (1.0 + eps_amplitude) ** 2 - 1.0


def _axis(phi: float) -> np.ndarray:
    return math.cos(phi) * X + math.sin(phi) * Y


def rot1q_unitary(theta: float, phi: float) -> np.ndarray:
    """``exp(-i theta/2 sigma_phi)`` on one qubit."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return c * I2 - 1j * s * _axis(phi)


def virtual_z_unitary(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def xx_unitary(theta: float, phi_axis: float = 0.0,
               phase_a: float = 0.0, phase_b: float = 0.0) -> np.ndarray:
    """``exp(-i theta sigma_a (x) sigma_b)`` with equatorial per-ion axes.

    ``phi_axis`` is a common offset applied to both axes (the phase
    misalignment between the single-qubit frame and the XX interaction);
    ``phase_a``/``phase_b`` are the programmed per-ion drive phases.
    """
    G = np.kron(_axis(phase_a + phi_axis), _axis(phase_b + phi_axis))
    c, s = math.cos(theta), math.sin(theta)
    return c * np.eye(4, dtype=complex) - 1j * s * G


def cnot_sequence(orientation: str = STANDARD) -> list[Gate]:
    """Native 5-gate CNOT decomposition on local qubits (0=control, 1=target).

    The inverse orientation is the reversed sequence with every angle
    negated, matching a 180-degree shift of the drive phases.
    """
    seq = [
        rot1q(0, math.pi / 2, math.pi / 2),
        xx(0, 1, math.pi / 4),
        rot1q(0, -math.pi / 2, 0.0),
        rot1q(1, -math.pi / 2, 0.0),
        rot1q(0, -math.pi / 2, math.pi / 2),
    ]
    if orientation == STANDARD:
        return seq
    if orientation == INVERSE:
        return [_negated(g) for g in reversed(seq)]
    raise ValueError(f"bad orientation {orientation!r}")


def hadamard_sequence() -> list[Gate]:
    """Native Hadamard: virtual Z(pi), then the driven R(pi/2, pi/2)."""
    return [virtual_z(0, math.pi), rot1q(0, math.pi / 2, math.pi / 2)]


def _negated(g: Gate) -> Gate:
    if g.kind == "rot1q":
        return rot1q(g.qubits[0], -g.params[0], g.params[1])
    if g.kind == "virtual_z":
        return virtual_z(g.qubits[0], -g.params[0])
    if g.kind == "xx":
        return xx(*g.qubits, -g.params[0], g.params[1], g.params[2])
    raise ValueError(f"cannot negate gate kind {g.kind!r}")


def realize(g: Gate, nm: NoiseModel = IDEAL) -> np.ndarray:
    """The unitary actually implemented for ``g`` under the noise model.

    Returned on the gate's local qubits (2x2 or 4x4); composites are the
    ordered product of their realized native gates.
    """
    k = g.kind
    if k == "rot1q":
        theta, phi = g.params
        G = theta * (1 + nm.eps_1q) * _axis(phi) + nm.delta_detune * abs(theta) * Z
        return qmat.herm_exp(G, 0.5)
    if k == "virtual_z":
        return virtual_z_unitary(g.params[0])
    if k in _PAULI_KINDS:
        return _PAULI_KINDS[k]
    if k == "xx":
        theta, pa, pb = g.params
        G = theta * (1 + nm.eps_2q) * np.kron(_axis(pa + nm.phi_diff),
                                              _axis(pb + nm.phi_diff))
        if nm.delta_detune:
            G = G + nm.delta_detune * abs(theta) / 2 * (np.kron(Z, I2) + np.kron(I2, Z))
        return qmat.herm_exp(G, 1.0)
    if k == "hadamard":
        return _product(hadamard_sequence(), 1, nm)
    if k == "cnot":
        return _product(cnot_sequence(g.orientation), 2, nm)
    raise ValueError(f"unknown gate kind {k!r}")


def _product(seq: list[Gate], n: int, nm: NoiseModel) -> np.ndarray:
    U = np.eye(2**n, dtype=complex)
    for g in seq:
        U = qmat.embed(realize(g, nm), g.qubits, n) @ U
    return U


def _validate_decompositions():
    for orientation in (STANDARD, INVERSE):
        P = _product(cnot_sequence(orientation), 2, IDEAL)
        if abs(1.0 - qmat.phase_overlap(CNOT_MATRIX, P)) > 1e-12:
            raise AssertionError(f"{orientation} CNOT decomposition is invalid")
    H = _product(hadamard_sequence(), 1, IDEAL)
    if abs(1.0 - qmat.phase_overlap(HADAMARD_MATRIX, H)) > 1e-12:
        raise AssertionError("Hadamard decomposition is invalid")


_validate_decompositions()
