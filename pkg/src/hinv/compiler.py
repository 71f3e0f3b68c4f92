"""Circuit-level passes: hidden-inverse orientation, randomized compiling, SK1.

All passes preserve the noiseless circuit unitary up to a global phase;
they only change how gates are realized (orientations, twirl frames,
composite-pulse expansions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gates, qmat
from .circuit import Circuit
from .gates import INVERSE, STANDARD, Gate

SK1_MAX_SPIN_ANGLE = 4 * math.pi


@dataclass(frozen=True)
class ConjugationSite:
    """A matched U . W . U^dag motif: two copies of the same self-adjoint
    composite around a block that does not commute with it."""

    left_index: int
    right_index: int
    enclosed_angle: float


@dataclass(frozen=True)
class OrientationRule:
    """Invert the closing composite when ``|enclosed angle| <= threshold``."""

    threshold: float = math.pi / 2

    def __post_init__(self):
        if not (0.0 < self.threshold <= math.pi):
            raise ValueError("threshold must be in (0, pi]")

    def pick_inverse(self, enclosed_angle: float) -> bool:
        return abs(gates.wrap_pi(enclosed_angle)) <= self.threshold + 1e-15


def find_hidden_inverse_sites(c: Circuit) -> list[ConjugationSite]:
    """Match CNOT composites into conjugation pairs, inner-to-outer.

    A pair (i, j) is a site when both gates are CNOTs on the same
    (control, target) qubits and some enclosed gate sharing a qubit with
    them fails to commute with CNOT (the enclosure is a genuine W).  Pairs
    are matched greedily left-to-right with a stack, so no gate ends up in
    two sites and repetition boundaries pair before crossing them.
    """
    stack: list[int] = []
    sites = []
    for i, g in enumerate(c.gates):
        if g.kind != "cnot":
            continue
        if stack:
            top = stack[-1]
            partner = c.gates[top]
            if partner.qubits == g.qubits and _has_noncommuting_witness(c, top, i):
                stack.pop()
                sites.append(ConjugationSite(top, i, _enclosed_angle(c, top, i)))
                continue
        stack.append(i)
    sites.sort(key=lambda s: s.left_index)
    return sites


def _has_noncommuting_witness(c: Circuit, left: int, right: int) -> bool:
    cn = c.gates[left]
    for g in c.gates[left + 1:right]:
        shared = set(g.qubits) & set(cn.qubits)
        if not shared:
            continue
        union = sorted(set(g.qubits) | set(cn.qubits))
        k = len(union)
        pos = {q: p for p, q in enumerate(union)}
        A = qmat.embed(gates.realize(cn), tuple(pos[q] for q in cn.qubits), k)
        B = qmat.embed(gates.realize(g), tuple(pos[q] for q in g.qubits), k)
        if np.abs(A @ B - B @ A).max() > 1e-9:
            return True
    return False


def _enclosed_angle(c: Circuit, left: int, right: int) -> float:
    target = c.gates[left].qubits[1]
    total = 0.0
    for g in c.gates[left + 1:right]:
        if g.kind == "virtual_z" and g.qubits[0] == target:
            total += g.params[0]
    return gates.wrap_pi(total)


def apply_orientation_rule(c: Circuit, rule: OrientationRule = OrientationRule()) -> Circuit:
    """Set orientations at every conjugation site: the closing composite is
    inverted when the rule selects the hidden-inverse configuration.
    Gates outside sites are left untouched; the noiseless unitary is
    unchanged either way."""
    new = list(c.gates)
    for site in find_hidden_inverse_sites(c):
        invert = rule.pick_inverse(site.enclosed_angle)
        left, right = c.gates[site.left_index], c.gates[site.right_index]
        new[site.left_index] = gates.cnot(*left.qubits, STANDARD)
        new[site.right_index] = gates.cnot(*right.qubits,
                                           INVERSE if invert else STANDARD)
    return Circuit(c.n, new)


# ---------------------------------------------------------------------------
# randomized compiling

_PAULI_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_PAULI = {v: k for k, v in _PAULI_BITS.items()}


def _cnot_frame(pc: str, pt: str) -> tuple[str, str]:
    """Propagate a Pauli pair through CNOT (X spreads control->target,
    Z spreads target->control); global phases are irrelevant."""
    xc, zc = _PAULI_BITS[pc]
    xt, zt = _PAULI_BITS[pt]
    return _BITS_PAULI[(xc, zc ^ zt)], _BITS_PAULI[(xt ^ xc, zt)]


def randomized_compile(c: Circuit, seed: int) -> Circuit:
    """Pauli-twirl every CNOT composite, deterministically in ``seed``.

    A uniformly random Pauli is placed on each qubit before the composite
    and the exact frame correction after it, so the noiseless unitary is
    preserved up to a global phase.  Twirl Paulis are emitted as frame
    gates (``pauli_*``): corrections merge into the adjacent single-qubit
    layers at zero cost.
    """
    rng = np.random.default_rng(seed)
    new: list[Gate] = []
    for g in c.gates:
        if g.kind != "cnot":
            new.append(g)
            continue
        qc, qt = g.qubits
        pc, pt = rng.choice(("I", "X", "Y", "Z"), size=2)
        cc, ct = _cnot_frame(pc, pt)
        new += gates.pauli(qc, pc) + gates.pauli(qt, pt)
        new.append(g)
        new += gates.pauli(qc, cc) + gates.pauli(qt, ct)
    return Circuit(c.n, new)


# ---------------------------------------------------------------------------
# SK1 composite pulses

def sk1_expand(g: Gate) -> list[Gate]:
    """Replace a driven rotation by its SK1 composite.

    The target pulse is followed by two full-loop (2*pi spin angle)
    corrections at phases ``phi +/- phi1`` with ``cos(phi1) = -Theta/(4*pi)``,
    where Theta is the effective spin-1/2 rotation angle (theta for a
    single-qubit rotation, 2*theta for ``exp(-i theta XX)``).  Two-qubit
    corrections rotate about ``cos(phi1) X(x)X + sin(phi1) Y(x)X``, the
    anticommuting pair realizing the one-qubit isomorphism; at pulse level
    they are MS drives with the first ion's phase shifted.  The noiseless
    product equals the target up to a global phase; under common
    overrotation the first-order error cancels.
    """
    if g.kind == "rot1q":
        theta, phi = g.params
        phi1 = _sk1_phase(theta)
        q = g.qubits[0]
        return [g,
                gates.rot1q(q, 2 * math.pi, phi + phi1),
                gates.rot1q(q, 2 * math.pi, phi - phi1)]
    if g.kind == "xx":
        theta, pa, pb = g.params
        phi1 = _sk1_phase(2 * theta)
        qa, qb = g.qubits
        return [g,
                gates.xx(qa, qb, math.pi, pa + phi1, pb),
                gates.xx(qa, qb, math.pi, pa - phi1, pb)]
    raise ValueError(f"sk1_expand applies to rot1q or xx gates, not {g.kind!r}")


def _sk1_phase(spin_angle: float) -> float:
    if abs(spin_angle) > SK1_MAX_SPIN_ANGLE:
        raise ValueError(
            f"spin angle {spin_angle} exceeds 4*pi; SK1 correction phase undefined")
    return math.acos(-spin_angle / (4 * math.pi))


def flatten_composites(c: Circuit) -> Circuit:
    """Expand every composite (cnot, hadamard) into its native gate sequence."""
    new: list[Gate] = []
    for g in c.gates:
        if g.kind == "cnot":
            for h in gates.cnot_sequence(g.orientation):
                new.append(_remap(h, g.qubits))
        elif g.kind == "hadamard":
            for h in gates.hadamard_sequence():
                new.append(_remap(h, g.qubits))
        else:
            new.append(g)
    return Circuit(c.n, new)


def _remap(g: Gate, qubits: tuple[int, ...]) -> Gate:
    return Gate(g.kind, tuple(qubits[q] for q in g.qubits), g.params, g.orientation)


def sk1_compile(c: Circuit) -> Circuit:
    """Flatten composites, then expand every driven rotation with SK1."""
    out: list[Gate] = []
    for g in flatten_composites(c).gates:
        if g.kind in ("rot1q", "xx"):
            out += sk1_expand(g)
        else:
            out.append(g)
    return Circuit(c.n, out)
