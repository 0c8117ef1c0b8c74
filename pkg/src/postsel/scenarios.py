"""Canonical pre/postselection setups and a designer for target weak values."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateTargets, SumRuleViolation
from .pointer import POLARIZATION
from .prepost import Circuit, JointShutter, PrePost
from .state import Ket, Operator, Space, Subsystem, basis_ket, make_ket

PATHS3 = Space.single(("1", "2", "3"), name="path")
POSITRON = Subsystem("positron", ("NO+", "O+"))
ELECTRON = Subsystem("electron", ("NO-", "O-"))
HARDY = Space((POSITRON, ELECTRON))

#: Extra overlap points that can be added to the Hardy interferometers.
HARDY_OVERLAPS = (("NO+", "O-"), ("NO+", "NO-"), ("O+", "NO-"))

#: Floor on |<k|i>|^2 for zero targets in :func:`design_prepost`.
DESIGN_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class ScenarioSpec:
    name: str
    prepost: PrePost
    circuit: Circuit
    description: str = ""
    internal_init: Optional[Ket] = None
    visibility: float = 1.0

    @property
    def space(self) -> Space:
        return self.prepost.space

    def with_elements(self, *extra) -> "ScenarioSpec":
        return replace(self, circuit=self.circuit.with_elements(*extra))


def three_box(variant: str = "intro") -> ScenarioSpec:
    """Three-path pre/postselection with path weak values (1, -1, 1).

    ``intro`` is the symmetric textbook pair; ``experimental`` is the
    interferometer setting, given up to normalization.
    """
    if variant == "intro":
        pre = make_ket(PATHS3, [1, 1, 1], normalize=True)
        post = make_ket(PATHS3, [1, -1, 1], normalize=True)
        doc = "three-box problem: i = (1,1,1)/sqrt3, f = (1,-1,1)/sqrt3"
    elif variant == "experimental":
        r2 = math.sqrt(2)
        pre = make_ket(PATHS3, [1 / (2 * r2), 1 / 2, 1 / r2], normalize=True)
        post = make_ket(PATHS3, [1 / r2, -1 / 2, 1 / (2 * r2)], normalize=True)
        doc = "three-box interferometer: detection at the D1 port"
    else:
        raise ValueError(f"unknown three-box variant {variant!r}")
    return ScenarioSpec(f"three-box-{variant}", PrePost(pre, post), Circuit(PATHS3), doc)


def hardy(overlaps: Iterable = ()) -> ScenarioSpec:
    """Hardy's two-particle interferometers with optional extra overlaps.

    Each requested overlap (a composite label such as ``("NO+", "O-")``)
    annihilates the pair whenever both particles take those arms.
    """
    pre = Ket(HARDY, np.array([1, 1, 1, 0]) / math.sqrt(3))
    minus_pos = np.array([1, -1])
    minus_ele = np.array([1, -1])
    post = Ket(HARDY, np.kron(minus_pos, minus_ele) / 2)

    labels = []
    for ov in overlaps:
        label = HARDY.labels[HARDY.index(ov)]
        if label not in labels:
            labels.append(label)
    labels.sort(key=HARDY.index)
    elements = tuple(JointShutter((label,)) for label in labels)
    doc = "Hardy's paradox"
    if labels:
        doc += "; added overlaps at " + ", ".join(HARDY.label_str(l) for l in labels)
    return ScenarioSpec("hardy", PrePost(pre, post), Circuit(HARDY, None, elements), doc)


def rotation(phi: float) -> Operator:
    """U(phi) = [[cos, sin], [-sin, cos]] on (H, V)."""
    c, s = math.cos(phi), math.sin(phi)
    return Operator(POLARIZATION, [[c, s], [-s, c]])


def rotation_angle(ket: Ket) -> float:
    """Angle theta with ket proportional to U(theta)|H> (real polarizations)."""
    h, v = ket.amps
    return math.atan2(-v.real, h.real)


def appendix_rotation_check(phi: float) -> float:
    """Frobenius distance between 2I - U(phi) and U(-phi)."""
    if abs(phi) > math.pi / 4:
        raise ValueError(f"|phi| = {abs(phi)!r} exceeds pi/4")
    lhs = 2 * np.eye(2) - rotation(phi).matrix
    return float(np.linalg.norm(lhs - rotation(-phi).matrix))


def negative_weight_shift(phi: float) -> float:
    """Polarization angle left by U(phi) weighted with w = -1 (others sum to 2).

    The state is ``(2I - U(phi))|H>``; for small phi the angle is about -phi.
    """
    h = basis_ket(POLARIZATION, "H")
    out = Ket(POLARIZATION, (2 * np.eye(2) - rotation(phi).matrix) @ h.amps)
    return rotation_angle(out)


def design_prepost(targets: Sequence[complex], labels: Optional[Sequence[str]] = None, floor: float = DESIGN_FLOOR) -> PrePost:
    """Pre/post states whose path projectors have the given weak values.

    Picks ``<k|i> = sqrt(max(|w_k|, floor))`` and ``<f|k> = w_k / <k|i>`` so
    that ``<f|i> = sum w_k = 1`` before normalization; normalizing both
    states leaves every weak value unchanged.
    """
    w = np.asarray(targets, dtype=np.complex128).reshape(-1)
    if w.size == 0 or np.all(w == 0):
        raise DegenerateTargets("all target weak values are zero")
    residual = abs(w.sum() - 1.0)
    if residual > 1e-9:
        raise SumRuleViolation(f"targets sum to {w.sum():.12g} (residual {residual:.3e}), need 1")
    if labels is None:
        labels = [str(k + 1) for k in range(w.size)]
    space = Space.single(labels, name="path")
    pre_amps = np.sqrt(np.maximum(np.abs(w), floor))
    bra_amps = w / pre_amps
    pre = Ket(space, pre_amps)
    post = Ket(space, bra_amps.conj())
    return PrePost(pre, post)


def design_scenario(targets: Sequence[complex], name: str = "designed") -> ScenarioSpec:
    pp = design_prepost(targets)
    listed = ",".join(f"{complex(t).real:g}" if complex(t).imag == 0 else str(complex(t)) for t in targets)
    return ScenarioSpec(name, pp, Circuit(pp.space), f"designed for target weak values ({listed})")


BUILTIN = {
    "three-box-intro": lambda: three_box("intro"),
    "three-box-experimental": lambda: three_box("experimental"),
    "hardy": lambda: hardy(),
}
