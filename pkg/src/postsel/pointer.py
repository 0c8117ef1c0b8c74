"""Weak measurement of a path projector through the photon's polarization.

A half-wave plate on the marked path takes ``|H>`` to
``cos(2a)|H> + sin(2a)|V>``; the other paths stay horizontal. After
postselection the polarization is analysed in the basis
``|+-> = cos(a +- pi/4)|H> + sin(a +- pi/4)|V>``, giving

    R = [P(+|f) - sin^2 b] / G,   G = cos^2 b - sin^2 b,   b = pi/4 - a,

which tends to ``Re w`` of the marked path's projector as ``G -> 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import InsufficientData, InvalidStrength, PostselectionSingular, StrengthZero
from .prepost import EPS_POST, Circuit, PrePost, UnitaryOnPath, detection_probability, evolve_full
from .state import Operator, Space, basis_ket, make_ket, projector_of

POLARIZATION = Space.single(("H", "V"), name="pol")

#: Default strength grid for sweeps.
DEFAULT_G_GRID = tuple(round(0.1 * n, 10) for n in range(1, 11))


@dataclass(frozen=True)
class MarkingConfig:
    path: object
    alpha: float

    def __post_init__(self):
        if not -1e-15 <= self.alpha <= math.pi / 4 + 1e-15:
            raise ValueError(f"marking angle {self.alpha!r} outside [0, pi/4]")

    @classmethod
    def from_strength(cls, path, G: float) -> "MarkingConfig":
        if not 0.0 < G <= 1.0:
            raise InvalidStrength(f"strength {G!r} outside (0, 1]")
        return cls(path, math.asin(G) / 2)

    @property
    def beta(self) -> float:
        return math.pi / 4 - self.alpha

    @property
    def strength(self) -> float:
        return math.sin(2 * self.alpha)


@dataclass(frozen=True)
class PointerSample:
    G: float
    P_plus: float
    R: float
    P_minus: float = float("nan")


@dataclass(frozen=True)
class WeakValueEstimate:
    intercept: float
    slope: float
    residual: float
    model: str = "pointer"


def half_wave_plate(alpha: float) -> Operator:
    c, s = math.cos(2 * alpha), math.sin(2 * alpha)
    return Operator(POLARIZATION, [[c, s], [s, -c]])


def analyzer_states(alpha: float):
    plus = make_ket(POLARIZATION, [math.cos(alpha + math.pi / 4), math.sin(alpha + math.pi / 4)])
    minus = make_ket(POLARIZATION, [math.cos(alpha - math.pi / 4), math.sin(alpha - math.pi / 4)])
    return plus, minus


def joint_outcome_probabilities(pp: PrePost, cfg: MarkingConfig, visibility: float = 1.0) -> tuple[float, float]:
    """P(f and +), P(f and -) for a marked path; they sum to P(f)."""
    circuit = Circuit(pp.space, POLARIZATION, (UnitaryOnPath(cfg.path, half_wave_plate(cfg.alpha)),))
    result = evolve_full(circuit, pp, basis_ket(POLARIZATION, "H"))
    plus, minus = analyzer_states(cfg.alpha)
    jp = detection_probability(result, visibility, projector_of(plus))
    jm = detection_probability(result, visibility, projector_of(minus))
    return max(jp, 0.0), max(jm, 0.0)


def mark_and_readout(pp: PrePost, cfg: MarkingConfig, visibility: float = 1.0) -> PointerSample:
    """Mark ``cfg.path``, postselect, and read out the analyser."""
    G = cfg.strength
    if cfg.alpha == 0.0 or G == 0.0:
        raise StrengthZero("readout is 0/0 at zero measurement strength")
    jp, jm = joint_outcome_probabilities(pp, cfg, visibility)
    total = jp + jm
    if total <= EPS_POST**2:
        raise PostselectionSingular(f"postselection probability {total:.3e} is zero", math.sqrt(max(total, 0.0)))
    p_plus, p_minus = jp / total, jm / total
    return PointerSample(G, p_plus, readout(p_plus, cfg.alpha), p_minus)


def readout(p_plus: float, alpha: float) -> float:
    """Normalized readout R from P(+|f) at marking angle ``alpha``."""
    beta = math.pi / 4 - alpha
    s2 = math.sin(beta) ** 2
    # cos^2 b - sin^2 b, written as sin(2a) so that a = 0 gives exactly 0
    G = math.sin(2 * alpha)
    if G == 0.0:
        raise StrengthZero("readout is 0/0 at zero measurement strength")
    return (p_plus - s2) / G


def check_grid(G_grid: Sequence[float]) -> list[float]:
    grid = [float(g) for g in G_grid]
    for g in grid:
        if not 0.0 < g <= 1.0:
            raise InvalidStrength(f"strength {g!r} outside (0, 1]")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidStrength("strength grid must be strictly increasing")
    return grid


def sweep_strength(pp: PrePost, path, G_grid: Sequence[float] = DEFAULT_G_GRID, visibility: float = 1.0) -> list[PointerSample]:
    return [
        mark_and_readout(pp, MarkingConfig.from_strength(path, g), visibility)
        for g in check_grid(G_grid)
    ]


def pointer_response(w: float, G):
    """Ideal readout R(G) for a marked path with real weak value ``w``.

    Closed form of the noiseless model; even in G, with R(0) = w.
    """
    G = np.asarray(G, dtype=float)
    c = np.sqrt(1.0 - G**2)
    h = 1.0 - w * (1.0 - c)
    return w * (h * c + w * G**2) / (h**2 + (w * G) ** 2)


def extrapolate_weak_value(samples: Sequence[PointerSample], model: str = "pointer") -> WeakValueEstimate:
    """Least-squares estimate of R at G = 0.

    ``model="pointer"`` fits the one-parameter ideal response
    :func:`pointer_response` (its intercept is the fitted weak value, and its
    slope at G = 0 is zero). ``model="linear"`` fits a straight line in G.
    """
    G = np.array([s.G for s in samples], dtype=float)
    R = np.array([s.R for s in samples], dtype=float)
    if len(np.unique(G)) < 3:
        raise InsufficientData(f"need at least 3 distinct strengths, got {len(np.unique(G))}")

    slope, intercept = np.polyfit(G, R, 1)
    if model == "linear":
        rms = float(np.sqrt(np.mean((intercept + slope * G - R) ** 2)))
        return WeakValueEstimate(float(intercept), float(slope), rms, "linear")
    if model != "pointer":
        raise ValueError(f"unknown fit model {model!r}")

    fit = least_squares(
        lambda p: pointer_response(p[0], G) - R,
        x0=[intercept],
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
    )
    w = float(fit.x[0])
    rms = float(np.sqrt(np.mean(fit.fun**2)))
    return WeakValueEstimate(w, 0.0, rms, "pointer")
