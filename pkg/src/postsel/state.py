"""Dense kets and operators over small labeled Hilbert spaces.

A :class:`Space` is an ordered product of :class:`Subsystem` factors, each of
which names its basis modes. Composite bases are ordered row-major (the first
factor varies slowest), which is what :func:`numpy.kron` produces.

Everything here is immutable; the underlying arrays are marked read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from numbers import Number
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateState, SpaceMismatch

#: Tolerance for identities that hold exactly in real arithmetic.
TOL = 1e-12

Label = Union[str, tuple]


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Subsystem:
    """One tensor factor: a name plus its ordered basis labels."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if not self.labels:
            raise ValueError(f"subsystem {self.name!r} has no basis modes")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate labels in subsystem {self.name!r}")

    @property
    def dim(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Space:
    """Ordered tensor product of subsystems."""

    subsystems: tuple[Subsystem, ...]

    def __post_init__(self):
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        names = [s.name for s in self.subsystems]
        if len(set(names)) != len(names):
            raise SpaceMismatch(f"overlapping subsystem names: {names}")

    @classmethod
    def single(cls, labels: Sequence, name: str = "mode") -> "Space":
        return cls((Subsystem(name, tuple(labels)),))

    @property
    def dim(self) -> int:
        return int(np.prod([s.dim for s in self.subsystems]))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.subsystems)

    @cached_property
    def labels(self) -> tuple:
        """Basis labels in storage order; plain strings for a single factor."""
        if len(self.subsystems) == 1:
            return self.subsystems[0].labels
        return tuple(product(*(s.labels for s in self.subsystems)))

    def label_str(self, label) -> str:
        return label if isinstance(label, str) else ",".join(label)

    def index(self, label) -> int:
        """Position of a basis label.

        Composite labels may be given as tuples or as comma-joined strings
        (``"NO+,O-"``); integers are read as their string form.
        """
        if isinstance(label, (int, np.integer)):
            label = str(label)
        if len(self.subsystems) > 1 and isinstance(label, str):
            label = tuple(part.strip() for part in label.split(","))
        try:
            return self.labels.index(label)
        except ValueError:
            raise SpaceMismatch(f"no basis mode {label!r} in space {self.names}") from None

    def __mul__(self, other: "Space") -> "Space":
        return Space(self.subsystems + other.subsystems)

    def __repr__(self):
        inner = " x ".join(f"{s.name}{list(s.labels)}" for s in self.subsystems)
        return f"Space({inner})"


@dataclass(frozen=True, eq=False)
class Ket:
    """A pure (possibly unnormalized) state vector over a labeled space."""

    space: Space
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps).reshape(-1)
        if amps.shape != (self.space.dim,):
            raise SpaceMismatch(f"{amps.size} amplitudes for a space of dimension {self.space.dim}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("ket amplitudes must be finite")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def is_normalized(self, tol: float = TOL) -> bool:
        return abs(self.norm2 - 1.0) <= tol

    def normalized(self) -> "Ket":
        n2 = self.norm2
        if n2 <= 0.0:
            raise DegenerateState("cannot normalize the zero vector")
        return Ket(self.space, self.amps / np.sqrt(n2))

    def amp(self, label) -> complex:
        return complex(self.amps[self.space.index(label)])

    def __add__(self, other: "Ket") -> "Ket":
        _same_space(self.space, other.space)
        return Ket(self.space, self.amps + other.amps)

    def __sub__(self, other: "Ket") -> "Ket":
        _same_space(self.space, other.space)
        return Ket(self.space, self.amps - other.amps)

    def __mul__(self, scalar: Number) -> "Ket":
        return Ket(self.space, self.amps * complex(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        terms = [f"{a:.6g}|{self.space.label_str(l)}>" for l, a in zip(self.space.labels, self.amps) if a != 0]
        return "Ket(" + (" + ".join(terms) or "0") + ")"


@dataclass(frozen=True, eq=False)
class Operator:
    """A dense square matrix acting on a labeled space."""

    space: Space
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        d = self.space.dim
        if m.shape != (d, d):
            raise SpaceMismatch(f"matrix of shape {m.shape} on a space of dimension {d}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.space.dim

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def is_unitary(self, tol: float = TOL) -> bool:
        err = self.matrix.conj().T @ self.matrix - np.eye(self.dim)
        return float(np.linalg.norm(err)) <= tol

    def is_projector(self, tol: float = TOL) -> bool:
        m = self.matrix
        return (
            float(np.linalg.norm(m @ m - m)) <= tol
            and float(np.linalg.norm(m - m.conj().T)) <= tol
        )

    def __add__(self, other: "Operator") -> "Operator":
        _same_space(self.space, other.space)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        _same_space(self.space, other.space)
        return Operator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: Number) -> "Operator":
        return Operator(self.space, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Ket):
            return apply(self, other)
        _same_space(self.space, other.space)
        return Operator(self.space, self.matrix @ other.matrix)

    def __repr__(self):
        return f"Operator({self.space!r},\n{np.array2string(self.matrix, precision=4)})"


def _same_space(a: Space, b: Space):
    if a != b:
        raise SpaceMismatch(f"{a!r} does not match {b!r}")


def make_ket(labels, amps, normalize: bool = False, name: str = "mode") -> Ket:
    """Build a ket over a single subsystem whose basis is ``labels``.

    ``labels`` may also be a :class:`Space`, in which case ``amps`` follows
    its storage order.
    """
    space = labels if isinstance(labels, Space) else Space.single(labels, name)
    amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
    if amps.size != space.dim:
        raise SpaceMismatch(f"{space.dim} labels but {amps.size} amplitudes")
    ket = Ket(space, amps)
    if normalize:
        if ket.norm2 == 0.0:
            raise DegenerateState("cannot normalize the zero vector")
        ket = ket.normalized()
    return ket


def basis_ket(space: Space, label) -> Ket:
    amps = np.zeros(space.dim, dtype=np.complex128)
    amps[space.index(label)] = 1.0
    return Ket(space, amps)


def identity(space: Space) -> Operator:
    return Operator(space, np.eye(space.dim))


def operator(space: Space, matrix) -> Operator:
    return Operator(space, matrix)


def inner(bra: Ket, ket: Ket) -> complex:
    """<bra|ket>, conjugate-linear in the first argument."""
    _same_space(bra.space, ket.space)
    return complex(np.vdot(bra.amps, ket.amps))


def tensor(a, b):
    """Tensor product of two kets or two operators on disjoint subsystems."""
    space = a.space * b.space
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(space, np.kron(a.amps, b.amps))
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(space, np.kron(a.matrix, b.matrix))
    raise TypeError("tensor() needs two kets or two operators")


def apply(op: Operator, ket: Ket) -> Ket:
    _same_space(op.space, ket.space)
    return Ket(ket.space, op.matrix @ ket.amps)


def projector_of(ket: Ket) -> Operator:
    """|v><v| for a normalized ket."""
    if not ket.is_normalized():
        raise DegenerateState(f"projector_of needs a normalized ket (norm^2 = {ket.norm2!r})")
    return Operator(ket.space, np.outer(ket.amps, ket.amps.conj()))


def partial_inner(bra: Ket, ket: Ket) -> Ket:
    """Contract ``bra`` against the leading factors of ``ket``.

    ``ket.space`` must be ``bra.space * rest``; returns the (unnormalized)
    ket on ``rest``.
    """
    n = len(bra.space.subsystems)
    if ket.space.subsystems[:n] != bra.space.subsystems or len(ket.space.subsystems) == n:
        raise SpaceMismatch(f"{bra.space!r} is not a leading factor of {ket.space!r}")
    rest = Space(ket.space.subsystems[n:])
    block = ket.amps.reshape(bra.dim, rest.dim)
    return Ket(rest, bra.amps.conj() @ block)
