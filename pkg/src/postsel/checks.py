"""Batch verification suites behind ``postsel check``.

Each suite returns a list of :class:`Check` records: the worst deviation it
saw and the tolerance it was held to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .pointer import POLARIZATION
from .prepost import (
    TRIVIAL,
    Attenuator,
    Circuit,
    PrePost,
    UnitaryOnPath,
    basis_projectors,
    evolve_full,
    joint_weak_value,
    marginal_projectors,
    sum_rule_residual,
    weak_value,
)
from .scenarios import (
    HARDY,
    appendix_rotation_check,
    design_prepost,
    hardy,
    three_box,
)
from .shortcut import LossAssignment, check_oracle_equivalence, predict_conditional, predict_success_probability
from .state import TOL, Ket, Operator, Space

SUITES = ("oracle", "negation", "sumrule", "appendix", "hardy")
ORACLE_TOL = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)


def random_ket(space: Space, rng: np.random.Generator) -> Ket:
    z = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    return Ket(space, z).normalized()


def random_prepost(space: Space, rng: np.random.Generator, min_overlap: float = 0.05) -> PrePost:
    while True:
        pre, post = random_ket(space, rng), random_ket(space, rng)
        if abs(np.vdot(post.amps, pre.amps)) > min_overlap:
            return PrePost(pre, post)


def random_unitary(space: Space, rng: np.random.Generator) -> Operator:
    if space.dim == 1:
        return Operator(space, [[np.exp(1j * rng.uniform(0, 2 * np.pi))]])
    return Operator(space, unitary_group.rvs(space.dim, random_state=rng))


def random_per_path_circuit(rng: np.random.Generator, max_paths: int = 4, max_internal: int = 2):
    """A random circuit with at most one unitary or attenuator per path.

    Returns ``(circuit, prepost, psi)``.
    """
    k = int(rng.integers(2, max_paths + 1))
    d = int(rng.integers(1, max_internal + 1))
    sel = Space.single([str(n + 1) for n in range(k)], name="path")
    internal = POLARIZATION if d == 2 else TRIVIAL
    elements = []
    for label in sel.labels:
        kind = rng.integers(0, 3)
        if kind == 1:
            elements.append(UnitaryOnPath(label, random_unitary(internal, rng)))
        elif kind == 2:
            elements.append(Attenuator(label, float(rng.uniform(0.0, 1.0))))
    order = rng.permutation(len(elements))
    circuit = Circuit(sel, internal, tuple(elements[i] for i in order))
    return circuit, random_prepost(sel, rng), random_ket(internal, rng)


def random_decomposition(space: Space, rng: np.random.Generator) -> list[Operator]:
    """Projectors onto random blocks of a random orthonormal basis."""
    q = unitary_group.rvs(space.dim, random_state=rng) if space.dim > 1 else np.eye(1)
    cuts = sorted(rng.choice(np.arange(1, space.dim), size=int(rng.integers(0, space.dim)), replace=False))
    blocks = np.split(np.arange(space.dim), cuts)
    return [Operator(space, q[:, b] @ q[:, b].conj().T) for b in blocks]


# --- suites -----------------------------------------------------------------


def suite_oracle(seed: int = 0, circuits: int = 100) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(circuits):
        circuit, pp, psi = random_per_path_circuit(rng)
        worst = max(worst, check_oracle_equivalence(circuit, pp, psi))
    return [Check(f"shortcut-vs-evolution ({circuits} random circuits)", worst, ORACLE_TOL)]


def suite_negation(seed: int = 0) -> list[Check]:
    box = three_box("intro")
    pp = box.prepost
    grid = np.linspace(0.0, 1.0, 11)
    base = pp.probability

    loss12 = max(abs(predict_success_probability(pp, LossAssignment((t, t, 1.0))) - base) for t in grid)
    full12 = max(
        abs(evolve_full(box.circuit.with_elements(Attenuator("1", t), Attenuator("2", t)), pp).success_probability - base)
        for t in grid
    )
    loss1 = max(abs(predict_success_probability(pp, LossAssignment((t, 1.0, 1.0))) - t * base) for t in grid)

    rng = np.random.default_rng(seed)
    u = Operator(POLARIZATION, unitary_group.rvs(2, random_state=rng))
    psi = random_ket(POLARIZATION, rng)
    both = predict_conditional({"1": u, "2": u}, pp, psi).conditional_state
    unitary12 = max(0.0, 1.0 - abs(np.vdot(both.amps, psi.amps)))

    designed = design_prepost([2, -2, 1])
    pm2 = max(
        abs(predict_success_probability(designed, LossAssignment((t, t, 1.0))) - designed.probability)
        for t in grid
    )
    return [
        Check("loss on paths 1,2 is flat in T (shortcut)", loss12, TOL),
        Check("loss on paths 1,2 is flat in T (evolution)", full12, TOL),
        Check("loss on path 1 gives T|<f|i>|^2", loss1, TOL),
        Check("same unitary on paths 1,2 cancels", unitary12, TOL),
        Check("weak values +2/-2 cancel equal losses", pm2, TOL),
    ]


def suite_sumrule(seed: int = 0, trials: int = 100) -> list[Check]:
    out = []
    for variant in ("intro", "experimental"):
        pp = three_box(variant).prepost
        out.append(Check(f"three-box-{variant} path projectors", sum_rule_residual(basis_projectors(pp.space), pp), TOL))
    hpp = hardy().prepost
    out.append(Check("hardy joint projectors", sum_rule_residual(basis_projectors(HARDY), hpp), TOL))
    for name in HARDY.names:
        out.append(Check(f"hardy {name} marginals", sum_rule_residual(list(marginal_projectors(HARDY, name).values()), hpp), TOL))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        space = Space.single([str(n) for n in range(int(rng.integers(2, 7)))])
        pp = random_prepost(space, rng)
        worst = max(worst, sum_rule_residual(random_decomposition(space, rng), pp))
    out.append(Check(f"random decompositions ({trials})", worst, 1e-12))
    return out


def suite_appendix(phis=(0.01, 0.05, 0.1)) -> list[Check]:
    out = []
    for phi in phis:
        gap = appendix_rotation_check(phi)
        closed = math.sqrt(2) * (2 - 2 * math.cos(phi))
        out.append(Check(f"|(2I-U) - U(-phi)| <= 2 phi^2 at phi={phi:g}", gap, 2 * phi**2))
        out.append(Check(f"closed form sqrt2(2-2cos phi) at phi={phi:g}", abs(gap - closed), TOL))
    return out


def hardy_weak_values() -> dict[str, complex]:
    pp = hardy().prepost
    return {HARDY.label_str(l): joint_weak_value(p, pp) for l, p in zip(HARDY.labels, basis_projectors(HARDY))}


def hardy_probabilities() -> dict[str, float]:
    cases = {
        "none": (),
        "NO+,O-": (("NO+", "O-"),),
        "NO+,O- and NO+,NO-": (("NO+", "O-"), ("NO+", "NO-")),
    }
    out = {}
    for name, overlaps in cases.items():
        spec = hardy(overlaps)
        out[name] = evolve_full(spec.circuit, spec.prepost).success_probability
    return out


def suite_hardy() -> list[Check]:
    expected = {"NO+,O-": 1, "O+,NO-": 1, "O+,O-": 0, "NO+,NO-": -1}
    wv = hardy_weak_values()
    pp = hardy().prepost
    probs = hardy_probabilities()
    marg = [
        weak_value(marginal_projectors(HARDY, "positron")["O+"], pp),
        weak_value(marginal_projectors(HARDY, "electron")["O-"], pp),
    ]
    return [
        Check("joint weak values (1, 1, 0, -1)", max(abs(wv[k] - v) for k, v in expected.items()), TOL),
        Check("joint sum rule", sum_rule_residual(basis_projectors(HARDY), pp), TOL),
        Check("marginal weak values O+ and O- are 1", max(abs(w - 1) for w in marg), TOL),
        Check("no overlaps: probability 1/12", abs(probs["none"] - 1 / 12), TOL),
        Check("overlap NO+,O-: probability 0", abs(probs["NO+,O-"]), TOL),
        Check("overlaps NO+,O- and NO+,NO-: probability 1/12", abs(probs["NO+,O- and NO+,NO-"] - 1 / 12), TOL),
    ]


def run_suite(name: str, seed: int = 0, phis=(0.01, 0.05, 0.1)) -> list[Check]:
    if name == "oracle":
        return suite_oracle(seed)
    if name == "negation":
        return suite_negation(seed)
    if name == "sumrule":
        return suite_sumrule(seed)
    if name == "appendix":
        return suite_appendix(phis)
    if name == "hardy":
        return suite_hardy()
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
