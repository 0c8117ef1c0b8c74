"""Pre/postselected systems: weak values and brute-force evolution.

The brute-force route builds the joint ket ``|i> (x) |psi>`` over the
selection space and an internal degree of freedom, applies every circuit
element as a full operator on that joint space, and contracts the selection
factor with ``<f|``. It never looks at a weak value, which is what makes it a
useful oracle for :mod:`postsel.shortcut`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    IncompleteDecomposition,
    InvalidVisibility,
    InvalidTransmission,
    PostselectionSingular,
    SpaceMismatch,
)
from .state import (
    TOL,
    Ket,
    Operator,
    Space,
    basis_ket,
    identity,
    inner,
    partial_inner,
    projector_of,
    tensor,
)

logger = logging.getLogger(__name__)

#: Postselection overlaps |<f|i>| at or below this are treated as singular.
EPS_POST = 1e-9

#: Stand-in internal space for circuits that only touch the selection modes.
TRIVIAL = Space.single(("0",), name="_")


@dataclass(frozen=True, eq=False)
class PrePost:
    """A preselected ket ``pre`` and postselected ket ``post``.

    Both are normalized on construction, so states given "up to
    normalization" are accepted as-is.
    """

    pre: Ket
    post: Ket
    eps: float = EPS_POST

    def __post_init__(self):
        if self.pre.space != self.post.space:
            raise SpaceMismatch("pre- and postselected states live on different spaces")
        object.__setattr__(self, "pre", _unit(self.pre))
        object.__setattr__(self, "post", _unit(self.post))
        ov = abs(self.overlap)
        if ov <= self.eps:
            raise PostselectionSingular(f"|<f|i>| = {ov:.3e} is at or below {self.eps:g}", ov)

    @property
    def space(self) -> Space:
        return self.pre.space

    @property
    def overlap(self) -> complex:
        """<f|i>."""
        return inner(self.post, self.pre)

    @property
    def probability(self) -> float:
        """Bare postselection probability |<f|i>|^2."""
        return abs(self.overlap) ** 2


def _unit(ket: Ket) -> Ket:
    # already-normalized input is kept bit-for-bit so files roundtrip exactly
    return ket if ket.is_normalized() else ket.normalized()


# --- circuit elements -------------------------------------------------------


@dataclass(frozen=True)
class UnitaryOnPath:
    """A unitary on the internal degree of freedom, placed on one path."""

    path: Union[str, tuple]
    op: Operator

    def __post_init__(self):
        if not self.op.is_unitary():
            raise ValueError(f"operator on path {self.path!r} is not unitary")


@dataclass(frozen=True)
class Attenuator:
    """Phase-free loss: the path amplitude is multiplied by sqrt(T)."""

    path: Union[str, tuple]
    T: float

    def __post_init__(self):
        T = self.T
        if isinstance(T, complex) or not np.isreal(T):
            raise InvalidTransmission(f"transmission must be real, got {T!r}")
        T = float(T)
        if not 0.0 <= T <= 1.0:
            raise InvalidTransmission(f"transmission {T!r} outside [0, 1]")
        object.__setattr__(self, "T", T)


def Shutter(path) -> Attenuator:
    """A fully blocking element, i.e. an attenuator with T = 0."""
    return Attenuator(path, 0.0)


@dataclass(frozen=True)
class JointShutter:
    """Removes the listed composite basis modes (e.g. a pair annihilation)."""

    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))


Element = Union[UnitaryOnPath, Attenuator, JointShutter]


@dataclass(frozen=True)
class Circuit:
    """Ordered per-path elements between pre- and postselection."""

    selection: Space
    internal: Optional[Space] = None
    elements: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for el in self.elements:
            for label in _element_labels(el):
                self.selection.index(label)  # raises SpaceMismatch
            if isinstance(el, UnitaryOnPath):
                if self.internal is None:
                    raise SpaceMismatch("unitary element in a circuit without an internal subsystem")
                if el.op.space != self.internal:
                    raise SpaceMismatch(f"unitary on path {el.path!r} does not act on {self.internal!r}")

    @property
    def internal_space(self) -> Space:
        return self.internal if self.internal is not None else TRIVIAL

    def with_elements(self, *extra: Element) -> "Circuit":
        return Circuit(self.selection, self.internal, self.elements + tuple(extra))


def _element_labels(el) -> tuple:
    if isinstance(el, JointShutter):
        return el.labels
    return (el.path,)


def element_operator(el: Element, selection: Space, internal: Space) -> Operator:
    """Full operator of one element on ``selection (x) internal``."""
    k = selection.dim
    if isinstance(el, Attenuator):
        d = np.ones(k)
        d[selection.index(el.path)] = np.sqrt(el.T)
        return tensor(Operator(selection, np.diag(d)), identity(internal))
    if isinstance(el, JointShutter):
        d = np.ones(k)
        for label in el.labels:
            d[selection.index(label)] = 0.0
        return tensor(Operator(selection, np.diag(d)), identity(internal))
    if isinstance(el, UnitaryOnPath):
        p = projector_of(basis_ket(selection, el.path))
        rest = identity(selection) - p
        return tensor(p, el.op) + tensor(rest, identity(internal))
    raise TypeError(f"unknown circuit element {el!r}")


# --- weak values ------------------------------------------------------------


def weak_value(obs: Operator, pp: PrePost) -> complex:
    """<f|O|i> / <f|i>."""
    if obs.space != pp.space:
        raise SpaceMismatch(f"observable on {obs.space!r}, states on {pp.space!r}")
    ov = pp.overlap
    if abs(ov) <= pp.eps:
        raise PostselectionSingular(f"|<f|i>| = {abs(ov):.3e}", abs(ov))
    if abs(ov) < 1e-6:
        logger.warning("weak value is ill-conditioned: |<f|i>| = %.3e", abs(ov))
    return inner(pp.post, obs @ pp.pre) / ov


def joint_weak_value(obs: Operator, pp: PrePost) -> complex:
    """Weak value of an observable on a multi-particle (composite) space."""
    if len(pp.space.subsystems) < 2:
        raise SpaceMismatch("joint weak values need a composite selection space")
    return weak_value(obs, pp)


def basis_projectors(space: Space) -> list[Operator]:
    """|k><k| for every basis mode, in storage order."""
    return [projector_of(basis_ket(space, label)) for label in space.labels]


def marginal_projectors(space: Space, name: str) -> dict[str, Operator]:
    """Single-particle projectors |m><m| (x) I on subsystem ``name``."""
    pos = space.names.index(name) if name in space.names else None
    if pos is None:
        raise SpaceMismatch(f"no subsystem {name!r} in {space!r}")
    sub = space.subsystems[pos]
    out = {}
    for label in sub.labels:
        e = np.zeros(sub.dim)
        e[sub.labels.index(label)] = 1.0
        mats = [np.eye(s.dim) for s in space.subsystems]
        mats[pos] = np.outer(e, e)
        m = mats[0]
        for other in mats[1:]:
            m = np.kron(m, other)
        out[label] = Operator(space, m)
    return out


def sum_rule_residual(projectors: Sequence[Operator], pp: PrePost) -> float:
    """|sum_k w_k - 1| for a set of projectors resolving the identity."""
    if not projectors:
        raise IncompleteDecomposition("empty projector set")
    total = np.zeros((pp.space.dim, pp.space.dim), dtype=np.complex128)
    for p in projectors:
        if p.space != pp.space:
            raise SpaceMismatch("projector on the wrong space")
        total = total + p.matrix
    gap = float(np.linalg.norm(total - np.eye(pp.space.dim)))
    if gap > TOL:
        raise IncompleteDecomposition(f"projectors miss the identity by {gap:.3e} (Frobenius)")
    return abs(sum(weak_value(p, pp) for p in projectors) - 1.0)


# --- brute-force evolution --------------------------------------------------


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    """Outcome of evolving through a circuit and postselecting.

    ``conditional_state`` is the unnormalized internal ket after contracting
    with ``<f|``; its squared norm is the postselection success probability.
    ``branches`` holds the same contraction restricted to each selection mode
    (they sum to ``conditional_state``) for visibility-damped probabilities.
    """

    conditional_state: Ket
    success_probability: float
    branches: tuple = ()


def evolve_full(circuit: Circuit, pp: PrePost, internal_init: Optional[Ket] = None) -> EvolutionResult:
    selection, internal = circuit.selection, circuit.internal_space
    if pp.space != selection:
        raise SpaceMismatch(f"circuit selects on {selection!r}, states live on {pp.space!r}")
    if internal_init is None:
        internal_init = basis_ket(internal, internal.labels[0])
    if internal_init.space != internal:
        raise SpaceMismatch(f"internal state on {internal_init.space!r}, circuit expects {internal!r}")

    joint = tensor(pp.pre, internal_init)
    for el in circuit.elements:
        joint = element_operator(el, selection, internal) @ joint

    out = partial_inner(pp.post, joint)
    branches = tuple(
        partial_inner(pp.post, tensor(p, identity(internal)) @ joint)
        for p in basis_projectors(selection)
    )
    return EvolutionResult(out, out.norm2, branches)


def conditional_state(result: EvolutionResult) -> Ket:
    """Normalized internal state given successful postselection."""
    p = result.success_probability
    if p <= EPS_POST**2:
        raise PostselectionSingular(f"postselection probability {p:.3e} is zero", np.sqrt(max(p, 0.0)))
    return result.conditional_state.normalized()


def detection_probability(result: EvolutionResult, visibility: float = 1.0, effect: Optional[Operator] = None) -> float:
    """Joint probability of postselection and an internal ``effect``.

    Interference cross-terms between selection modes are damped by
    ``visibility``; at 1 this is <out|E|out>, at 0 it is the classical sum
    over modes.
    """
    if not 0.0 <= visibility <= 1.0:
        raise InvalidVisibility(f"visibility {visibility!r} outside [0, 1]")
    vecs = np.array([b.amps for b in result.branches])
    if effect is not None:
        gram = vecs.conj() @ effect.matrix @ vecs.T
    else:
        gram = vecs.conj() @ vecs.T
    weights = np.full(gram.shape, float(visibility))
    np.fill_diagonal(weights, 1.0)
    return float(np.sum(weights * gram).real)
