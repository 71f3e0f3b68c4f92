"""Closed-form fidelity expressions for parity-controlled rotation circuits.

Two coherent-error models are covered, each with its own functions that are
never mixed in one evaluation:

1. the MS overrotation model (every two-qubit XX pulse overrotated by the
   same fraction): :func:`closed_form_fe` is the standard per-conjugation-
   pair power form; :func:`exact_ladder_fe` is the exact result for the
   nested ladder, a binomial average over control-parity sectors.  The two
   agree for n=2 and to O(eps^2) for all n; the power form picks up an
   O(sin^4(pi*eps/4) * sin^2(theta)) error per extra control because the
   conjugation pairs share the target qubit.
2. a toy model whose error generator is the CNOT itself,
   ``exp(-i eps/2 CNOT)``: :func:`cnot_hamiltonian_fe` evaluates its
   binomial trace sum.

Orientation convention: ``"plus"`` is the hidden-inverse configuration,
``"minus"`` the standard one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PLUS = "plus"
MINUS = "minus"


def _sign(orientation: str) -> int:
    if orientation == PLUS:
        return 1
    if orientation == MINUS:
        return -1
    raise ValueError(f"orientation must be 'plus' or 'minus', got {orientation!r}")


def entanglement_fidelity(U, V) -> float:
    """``|Tr[U^dag V]|^2 / 4**n`` for equal-dimension unitaries."""
    U = np.asarray(U)
    V = np.asarray(V)
    if U.shape != V.shape:
        raise ValueError(f"dimension mismatch: {U.shape} vs {V.shape}")
    d = U.shape[0]
    return float(abs(np.trace(U.conj().T @ V)) ** 2 / d**2)


def average_from_entanglement(f_e: float, n: int) -> float:
    """Average gate fidelity ``(2**n f_e + 1) / (2**n + 1)``."""
    d = 2**n
    return (d * f_e + 1.0) / (d + 1.0)


def closed_form_fe(theta: float, eps: float, n: int, orientation: str) -> float:
    """Per-pair power form ``[cos^2(pi eps/4) +/- sin^2(pi eps/4) cos(theta)]^(2(n-1))``.

    Exact for n=2; the independent-pair approximation of
    :func:`exact_ladder_fe` for larger n.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    s = _sign(orientation)
    w = math.pi * eps / 4
    # cos^2 w + s sin^2 w cos(theta), written so the cancellation points are exact
    base = 1.0 - math.sin(w) ** 2 * (1.0 - s * math.cos(theta))
    return base ** (2 * (n - 1))


def exact_ladder_fe(theta: float, eps: float, n: int, orientation: str) -> float:
    """Exact entanglement fidelity of the overrotated-MS parity ladder.

    Every conjugated MS error commutes into the center of the circuit, where
    the joint action on the shared target splits over control-parity
    sectors:

        tau = 2**(1-n) sum_w C(n-1, w) [cos^2(m w') +/- sin^2(m w') cos(theta)],

    with ``m = n-1-2w`` and ``w' = pi*eps/4``; the fidelity is ``tau**2``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    s = _sign(orientation)
    wp = math.pi * eps / 4
    tau = 0.0
    for w in range(n):
        m = (n - 1) - 2 * w
        tau += math.comb(n - 1, w) * (
            1.0 - math.sin(m * wp) ** 2 * (1.0 - s * math.cos(theta))
        )
    tau /= 2 ** (n - 1)
    return tau**2


def small_angle_drop(n: int, eps: float, deviation: float, correct: bool) -> float:
    """Leading-order infidelity near the ideal cancellation points.

    For a small angle deviation around theta = 0 (or pi with the roles of
    the configurations swapped): the correct sequence choice loses
    ``(n-1)(pi/4)^2 eps^2 deviation^2``, the incorrect one
    ``(n-1)(pi/4)^2 eps^2 (4 - deviation^2)``.
    """
    scale = (n - 1) * (math.pi / 4) ** 2 * eps**2
    if correct:
        return scale * deviation**2
    return scale * (4.0 - deviation**2)


def cnot_hamiltonian_fe(theta: float, eps: float, n: int, orientation: str) -> float:
    """Entanglement fidelity under the CNOT-generator error model.

    Each conjugating CNOT is implemented as ``exp(-+i eps/2 CNOT) CNOT``;
    the trace against the ideal parity rotation reduces over target-register
    bit strings of Hamming weight w to

        Tr[U^dag V_pm] = sum_w C(n-1,w) e^{-i (n-1-w) eps/2 (-1 +/- 1)} B_pm(w, theta),
        B_pm(w, theta) = 2 (cos^2(w eps/2) +/- cos(theta) sin^2(w eps/2)),

    and the fidelity is ``|Tr|^2 / 4**n``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    s = _sign(orientation)
    tr = 0.0 + 0.0j
    for w in range(n):
        B = 2.0 * (math.cos(w * eps / 2) ** 2
                   + s * math.cos(theta) * math.sin(w * eps / 2) ** 2)
        tr += math.comb(n - 1, w) * np.exp(-0.5j * (n - 1 - w) * eps * (-1 + s)) * B
    return float(abs(tr) ** 2 / 4**n)


def binomial_phase_identity(n: int, eps: float) -> tuple[complex, complex]:
    """Both sides of ``sum_w C(n-1,w) e^{-i w eps} = e^{-i(n-1)eps/2} [2 cos(eps/2)]^(n-1)``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    lhs = sum(math.comb(n - 1, w) * np.exp(-1j * w * eps) for w in range(n))
    rhs = np.exp(-0.5j * (n - 1) * eps) * (2 * math.cos(eps / 2)) ** (n - 1)
    return complex(lhs), complex(rhs)


@dataclass(frozen=True)
class FidelityPoint:
    theta: float
    eps: float
    n: int
    orientation: str
    f_entanglement: float
    f_average: float

    def __post_init__(self):
        _sign(self.orientation)
        expected = average_from_entanglement(self.f_entanglement, self.n)
        if abs(self.f_average - expected) > 1e-14:
            raise ValueError("f_average inconsistent with f_entanglement")

    @classmethod
    def from_entanglement(cls, theta, eps, n, orientation, f_e) -> "FidelityPoint":
        return cls(theta, eps, n, orientation, f_e,
                   average_from_entanglement(f_e, n))
