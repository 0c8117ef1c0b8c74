"""Monte Carlo emulation of coincidence counting.

Every grid point draws from its own Philox substream keyed by
``(seed, setting index)``, so a sweep gives the same counts whether it is
evaluated sequentially, in parallel, or one point at a time.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidProbability, InvalidTransmission, InvalidVisibility
from .pointer import MarkingConfig, PointerSample, check_grid, joint_outcome_probabilities, readout
from .prepost import Attenuator, detection_probability, evolve_full
from .scenarios import ScenarioSpec

DEFAULT_TRIALS = 100_000


@dataclass(frozen=True)
class RunConfig:
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    visibility: Optional[float] = None

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")
        if self.visibility is not None and not 0.0 <= self.visibility <= 1.0:
            raise InvalidVisibility(f"visibility {self.visibility!r} outside [0, 1]")


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one grid point."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def simulate_counts(p: float, cfg: RunConfig, index: int = 0) -> int:
    """Binomial number of postselection successes out of ``cfg.trials``."""
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise InvalidProbability(f"probability {p!r} outside [0, 1]")
    return int(substream(cfg.seed, index).binomial(cfg.trials, p))


@dataclass(frozen=True)
class CountSeries:
    """Sampled coincidence counts over a swept transmission."""

    values: tuple
    counts: tuple
    analytic: tuple
    trials: int
    seed: int
    paths: tuple = ()

    @property
    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.trials

    @property
    def sigma(self) -> np.ndarray:
        """Binomial standard deviation of each count."""
        p = np.asarray(self.analytic)
        return np.sqrt(self.trials * p * (1.0 - p))

    def z_scores(self) -> np.ndarray:
        """(count - expected) / sigma; exact matches at sigma = 0 give 0."""
        dev = np.asarray(self.counts, dtype=float) - self.trials * np.asarray(self.analytic)
        sig = self.sigma
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(sig > 0, dev / np.where(sig > 0, sig, 1.0), np.where(np.abs(dev) < 0.5, 0.0, np.inf))
        return z

    def slope(self) -> tuple[float, float]:
        """OLS slope of counts against T and its binomial standard error."""
        x = np.asarray(self.values, dtype=float)
        y = np.asarray(self.counts, dtype=float)
        dx = x - x.mean()
        sxx = float(dx @ dx)
        slope = float(dx @ (y - y.mean())) / sxx
        err = math.sqrt(float(dx**2 @ self.sigma**2)) / sxx
        return slope, err


def effective_visibility(scenario: ScenarioSpec, cfg: Optional[RunConfig] = None) -> float:
    if cfg is not None and cfg.visibility is not None:
        return cfg.visibility
    return scenario.visibility


def apply_visibility(scenario: ScenarioSpec, V: float) -> ScenarioSpec:
    """Copy of ``scenario`` whose interference cross-terms are damped by V."""
    if not 0.0 <= V <= 1.0:
        raise InvalidVisibility(f"visibility {V!r} outside [0, 1]")
    return replace(scenario, visibility=float(V))


def analytic_probability(scenario: ScenarioSpec, visibility: Optional[float] = None) -> float:
    """Postselection probability of a scenario via brute-force evolution."""
    V = scenario.visibility if visibility is None else visibility
    result = evolve_full(scenario.circuit, scenario.prepost, scenario.internal_init)
    return min(max(detection_probability(result, V), 0.0), 1.0)


def with_losses(scenario: ScenarioSpec, lossy_paths: Iterable, T: float) -> ScenarioSpec:
    return scenario.with_elements(*(Attenuator(path, T) for path in lossy_paths))


def sweep_loss(
    scenario: ScenarioSpec,
    lossy_paths: Sequence,
    T_grid: Sequence[float],
    cfg: RunConfig = RunConfig(),
    workers: Optional[int] = None,
) -> CountSeries:
    """Counts with the same transmission T on every lossy path, per grid T."""
    paths = tuple(str(p) for p in lossy_paths)
    for p in paths:
        scenario.space.index(p)  # SpaceMismatch on unknown paths
    grid = [float(t) for t in T_grid]
    for t in grid:
        if not 0.0 <= t <= 1.0:
            raise InvalidTransmission(f"transmission {t!r} outside [0, 1]")
    V = effective_visibility(scenario, cfg)

    def point(args):
        index, t = args
        p = analytic_probability(with_losses(scenario, paths, t), V)
        return p, simulate_counts(p, cfg, index)

    jobs = list(enumerate(grid))
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(point, jobs))
    else:
        results = [point(job) for job in jobs]
    return CountSeries(
        values=tuple(grid),
        counts=tuple(c for _, c in results),
        analytic=tuple(p for p, _ in results),
        trials=cfg.trials,
        seed=cfg.seed,
        paths=paths,
    )


def sweep_pointer_counts(
    scenario: ScenarioSpec,
    path,
    G_grid: Sequence[float],
    cfg: RunConfig = RunConfig(),
) -> list[PointerSample]:
    """Pointer readouts estimated from sampled analyser counts.

    Each photon pair either fails postselection or lands in the ``+`` or
    ``-`` analyser port; P(+|f) is estimated as n+ / (n+ + n-).
    """
    V = effective_visibility(scenario, cfg)
    samples = []
    for index, g in enumerate(check_grid(G_grid)):
        mark = MarkingConfig.from_strength(path, g)
        jp, jm = joint_outcome_probabilities(scenario.prepost, mark, V)
        pvals = np.array([jp, jm, max(0.0, 1.0 - jp - jm)])
        n_plus, n_minus, _ = substream(cfg.seed, index).multinomial(cfg.trials, pvals / pvals.sum())
        kept = n_plus + n_minus
        if kept == 0:
            continue
        p_plus = n_plus / kept
        samples.append(PointerSample(mark.strength, p_plus, readout(p_plus, mark.alpha), n_minus / kept))
    return samples
