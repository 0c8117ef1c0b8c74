"""Predicting postselected outcomes from path weak values alone.

With weak values ``w_k`` of the path projectors, a unitary ``U_k`` on each
path sends the internal state to ``sum_k w_k U_k |psi>`` (up to
normalization ``N``), and phase-free losses rescale the postselection
probability by ``|sum_k w_k sqrt(T_k)|^2``. Neither needs the time
evolution; :func:`check_oracle_equivalence` compares both against
:func:`postsel.prepost.evolve_full`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import InvalidTransmission, PostselectionSingular, SpaceMismatch, UnsupportedShape
from .prepost import (
    EPS_POST,
    Attenuator,
    Circuit,
    JointShutter,
    PrePost,
    UnitaryOnPath,
    basis_projectors,
    evolve_full,
    weak_value,
)
from .state import Ket, Operator, basis_ket, identity, inner


@dataclass(frozen=True, eq=False)
class ShortcutPrediction:
    conditional_state: Ket
    normalizer: float
    success_probability: float


@dataclass(frozen=True)
class LossAssignment:
    """Transmission probability per path, in basis order."""

    T: tuple

    def __post_init__(self):
        values = []
        for t in self.T:
            if isinstance(t, complex) or not np.isreal(t):
                raise InvalidTransmission(f"transmission must be real, got {t!r}")
            t = float(t)
            if not 0.0 <= t <= 1.0:
                raise InvalidTransmission(f"transmission {t!r} outside [0, 1]")
            values.append(t)
        object.__setattr__(self, "T", tuple(values))

    @classmethod
    def on_paths(cls, space, losses: Mapping) -> "LossAssignment":
        """Lossless everywhere except the given ``{label: T}`` paths."""
        T = [1.0] * space.dim
        for label, t in losses.items():
            T[space.index(label)] = t
        return cls(tuple(T))


def path_weak_values(pp: PrePost) -> np.ndarray:
    """Weak values of every basis projector of the selection space."""
    return np.array([weak_value(p, pp) for p in basis_projectors(pp.space)])


def _combine(pp: PrePost, factors: Sequence[Operator], psi: Ket) -> ShortcutPrediction:
    w = path_weak_values(pp)
    amps = sum(wk * (f @ psi).amps for wk, f in zip(w, factors))
    out = Ket(psi.space, amps)
    N = out.norm2
    if N <= EPS_POST**2:
        raise PostselectionSingular(f"weighted sum vanishes (N = {N:.3e}): complete destructive interference", np.sqrt(N))
    return ShortcutPrediction(out.normalized(), N, N * pp.probability)


def predict_conditional(
    unitaries: Union[Sequence[Optional[Operator]], Mapping],
    pp: PrePost,
    psi: Ket,
) -> ShortcutPrediction:
    """Internal state after one unitary per path and postselection.

    ``unitaries`` is either a sequence in basis order or a ``{label: U}``
    mapping; missing paths and ``None`` entries mean the identity.
    """
    k = pp.space.dim
    eye = identity(psi.space)
    if isinstance(unitaries, Mapping):
        ops = [eye] * k
        for label, u in unitaries.items():
            ops[pp.space.index(label)] = u
    else:
        if len(unitaries) != k:
            raise SpaceMismatch(f"{len(unitaries)} unitaries for {k} paths")
        ops = list(unitaries)
    ops = [eye if u is None else u for u in ops]
    for u in ops:
        if u.space != psi.space:
            raise SpaceMismatch("unitary does not act on the internal state space")
    return _combine(pp, ops, psi)


def loss_amplitude_factor(weak_values, loss: LossAssignment) -> complex:
    """sum_k w_k sqrt(T_k)."""
    if not isinstance(loss, LossAssignment):
        loss = LossAssignment(tuple(loss))
    w = np.asarray(weak_values, dtype=np.complex128)
    if w.size != len(loss.T):
        raise SpaceMismatch(f"{w.size} weak values for {len(loss.T)} transmissions")
    return complex(np.sum(w * np.sqrt(np.asarray(loss.T))))


def predict_success_probability(pp: PrePost, loss: LossAssignment) -> float:
    """|<f|i>|^2 |sum_k w_k sqrt(T_k)|^2."""
    factor = loss_amplitude_factor(path_weak_values(pp), loss)
    return pp.probability * abs(factor) ** 2


def per_path_factors(circuit: Circuit) -> list[Operator]:
    """One internal operator per selection mode, or UnsupportedShape.

    Attenuators become ``sqrt(T) I``; a joint shutter zeroes each listed
    mode. A mode touched by more than one element is rejected.
    """
    sel, internal = circuit.selection, circuit.internal_space
    eye = identity(internal)
    factors = [eye] * sel.dim
    seen = set()
    for el in circuit.elements:
        if isinstance(el, UnitaryOnPath):
            pairs = [(sel.index(el.path), el.op)]
        elif isinstance(el, Attenuator):
            pairs = [(sel.index(el.path), eye * np.sqrt(el.T))]
        elif isinstance(el, JointShutter):
            pairs = [(sel.index(label), eye * 0.0) for label in el.labels]
        else:
            raise UnsupportedShape(f"unknown element {el!r}")
        for idx, op in pairs:
            if idx in seen:
                raise UnsupportedShape(f"more than one element on mode {sel.labels[idx]!r}")
            seen.add(idx)
            factors[idx] = op
    return factors


def predict_circuit(circuit: Circuit, pp: PrePost, psi: Optional[Ket] = None) -> ShortcutPrediction:
    """Weak-value prediction for a circuit in per-path form."""
    internal = circuit.internal_space
    if psi is None:
        psi = basis_ket(internal, internal.labels[0])
    if pp.space != circuit.selection:
        raise SpaceMismatch("circuit and pre/post states use different selection spaces")
    return _combine(pp, per_path_factors(circuit), psi)


def state_deficit(a: Ket, b: Ket) -> float:
    """1 - |<a|b>| for normalized kets; insensitive to global phase."""
    return max(0.0, 1.0 - abs(inner(a.normalized(), b.normalized())))


def check_oracle_equivalence(circuit: Circuit, pp: PrePost, psi: Optional[Ket] = None) -> float:
    """Largest gap between the shortcut and brute-force evolution.

    Compares the success probability and, when postselection can succeed,
    the conditional internal state up to global phase.
    """
    factors = per_path_factors(circuit)
    internal = circuit.internal_space
    if psi is None:
        psi = basis_ket(internal, internal.labels[0])
    full = evolve_full(circuit, pp, psi)
    try:
        short = _combine(pp, factors, psi)
    except PostselectionSingular:
        return full.success_probability
    gap = abs(short.success_probability - full.success_probability)
    if full.success_probability > EPS_POST**2:
        gap = max(gap, state_deficit(short.conditional_state, full.conditional_state))
    return gap
