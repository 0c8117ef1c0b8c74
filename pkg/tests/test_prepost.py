import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from postsel.checks import random_decomposition, random_prepost, random_unitary
from postsel.errors import (
    IncompleteDecomposition,
    InvalidTransmission,
    InvalidVisibility,
    PostselectionSingular,
    SpaceMismatch,
)
from postsel.pointer import POLARIZATION
from postsel.prepost import (
    Attenuator,
    Circuit,
    JointShutter,
    PrePost,
    Shutter,
    UnitaryOnPath,
    basis_projectors,
    conditional_state,
    detection_probability,
    evolve_full,
    joint_weak_value,
    marginal_projectors,
    sum_rule_residual,
    weak_value,
)
from postsel.scenarios import HARDY, PATHS3
from postsel.state import TOL, Ket, Operator, Space, basis_ket, identity, make_ket, projector_of


def brute_success(pre, post, transmissions):
    # oracle: sum_k <f|k> sqrt(T_k) <k|i>, written out directly
    amp = sum(np.conj(f) * math.sqrt(t) * i for f, i, t in zip(post, pre, transmissions))
    return abs(amp) ** 2


# --- PrePost ----------------------------------------------------------------


def test_prepost_normalizes_inputs(box_exp):
    pp = box_exp.prepost
    assert pp.pre.is_normalized() and pp.post.is_normalized()


def test_prepost_rejects_orthogonal_states():
    with pytest.raises(PostselectionSingular):
        PrePost(make_ket(PATHS3, [1, 0, 0]), make_ket(PATHS3, [0, 1, 0]))


def test_prepost_rejects_space_mismatch():
    with pytest.raises(SpaceMismatch):
        PrePost(make_ket(PATHS3, [1, 0, 0]), basis_ket(POLARIZATION, "H"))


# --- weak values ------------------------------------------------------------


def test_three_box_weak_values(box):
    w = [weak_value(p, box.prepost) for p in basis_projectors(PATHS3)]
    np.testing.assert_allclose(w, [1, -1, 1], atol=TOL)


def test_identity_weak_value_is_one(rng):
    for _ in range(10):
        pp = random_prepost(PATHS3, rng)
        assert weak_value(identity(PATHS3), pp) == pytest.approx(1, abs=TOL)


def test_experimental_path_two_weak_value(box_exp):
    # before normalization every product <f|k><k|i> is +-1/4, so <f|i> = 1/4
    r2 = math.sqrt(2)
    i = [1 / (2 * r2), 1 / 2, 1 / r2]
    f = [1 / r2, -1 / 2, 1 / (2 * r2)]
    overlap = sum(a * b for a, b in zip(f, i))
    assert overlap == pytest.approx(1 / 4)
    assert f[1] * i[1] / overlap == pytest.approx(-1)
    assert weak_value(projector_of(basis_ket(PATHS3, "2")), box_exp.prepost) == pytest.approx(-1, abs=TOL)


def test_hardy_joint_weak_values(hardy_spec):
    pp = hardy_spec.prepost
    expect = {"NO+,O-": 1, "O+,NO-": 1, "O+,O-": 0, "NO+,NO-": -1}
    for label, w in expect.items():
        assert joint_weak_value(projector_of(basis_ket(HARDY, label)), pp) == pytest.approx(w, abs=TOL)


def test_hardy_marginals(hardy_spec):
    pp = hardy_spec.prepost
    assert weak_value(marginal_projectors(HARDY, "positron")["O+"], pp) == pytest.approx(1, abs=TOL)
    assert weak_value(marginal_projectors(HARDY, "electron")["O-"], pp) == pytest.approx(1, abs=TOL)
    assert weak_value(marginal_projectors(HARDY, "positron")["NO+"], pp) == pytest.approx(0, abs=TOL)


def test_joint_weak_value_needs_composite(box):
    with pytest.raises(SpaceMismatch):
        joint_weak_value(identity(PATHS3), box.prepost)


def test_weak_value_space_mismatch(box):
    with pytest.raises(SpaceMismatch):
        weak_value(identity(HARDY), box.prepost)


def test_weak_value_linearity(rng):
    for _ in range(25):
        pp = random_prepost(PATHS3, rng)
        a = Operator(PATHS3, rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        b = Operator(PATHS3, rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        alpha, beta = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        lhs = weak_value(a * alpha + b * beta, pp)
        rhs = alpha * weak_value(a, pp) + beta * weak_value(b, pp)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


# --- sum rule ---------------------------------------------------------------


def test_sum_rule_three_box_and_hardy(box, hardy_spec):
    assert sum_rule_residual(basis_projectors(PATHS3), box.prepost) <= TOL
    assert sum_rule_residual(basis_projectors(HARDY), hardy_spec.prepost) <= TOL


def test_sum_rule_random_decompositions(rng):
    for _ in range(50):
        space = Space.single([str(n) for n in range(int(rng.integers(2, 6)))])
        pp = random_prepost(space, rng)
        projs = random_decomposition(space, rng)
        # oracle: direct summation of <f|P|i>/<f|i>
        direct = sum(np.vdot(pp.post.amps, p.matrix @ pp.pre.amps) for p in projs) / np.vdot(pp.post.amps, pp.pre.amps)
        assert abs(direct - 1) <= 1e-12
        assert sum_rule_residual(projs, pp) <= 1e-12


def test_sum_rule_incomplete_set(box):
    with pytest.raises(IncompleteDecomposition):
        sum_rule_residual(basis_projectors(PATHS3)[:2], box.prepost)


# --- elements ---------------------------------------------------------------


def test_attenuator_bounds():
    with pytest.raises(InvalidTransmission):
        Attenuator("1", 1.5)
    with pytest.raises(InvalidTransmission):
        Attenuator("1", -0.1)
    with pytest.raises(InvalidTransmission):
        Attenuator("1", 0.5 + 0.1j)
    assert Shutter("2") == Attenuator("2", 0.0)


def test_dangling_path_rejected():
    with pytest.raises(SpaceMismatch):
        Circuit(PATHS3, None, (Attenuator("4", 0.5),))
    with pytest.raises(SpaceMismatch):
        Circuit(HARDY, None, (JointShutter((("NO+", "X"),)),))


def test_unitary_needs_internal_space():
    with pytest.raises(SpaceMismatch):
        Circuit(PATHS3, None, (UnitaryOnPath("1", identity(POLARIZATION)),))


# --- evolve_full --------------------------------------------------------------


@pytest.mark.parametrize("T", [0.0, 0.25, 0.5, 1.0])
def test_loss_on_path_one(box, T):
    res = evolve_full(box.circuit.with_elements(Attenuator("1", T)), box.prepost)
    assert res.success_probability == pytest.approx(T / 9, abs=TOL)
    assert res.success_probability == pytest.approx(brute_success(box.prepost.pre.amps, box.prepost.post.amps, [T, 1, 1]), abs=TOL)


@pytest.mark.parametrize("T", np.linspace(0, 1, 11))
def test_loss_on_paths_one_and_two(box, T):
    res = evolve_full(box.circuit.with_elements(Attenuator("1", T), Attenuator("2", T)), box.prepost)
    assert res.success_probability == pytest.approx(1 / 9, abs=TOL)


def test_empty_circuit(rng):
    pp = random_prepost(PATHS3, rng)
    psi = Ket(POLARIZATION, [0.6, 0.8j])
    res = evolve_full(Circuit(PATHS3, POLARIZATION), pp, psi)
    assert res.success_probability == pytest.approx(pp.probability, abs=TOL)
    np.testing.assert_allclose(conditional_state(res).amps * np.exp(-1j * np.angle(conditional_state(res).amps[0])),
                               psi.amps * np.exp(-1j * np.angle(psi.amps[0])), atol=1e-12)


def test_unitary_on_path_one_acts_with_certainty(box, rng):
    u = random_unitary(POLARIZATION, rng)
    psi = Ket(POLARIZATION, [1, 0])
    circuit = Circuit(PATHS3, POLARIZATION, (UnitaryOnPath("1", u),))
    res = evolve_full(circuit, box.prepost, psi)
    out = conditional_state(res)
    assert abs(np.vdot(out.amps, (u @ psi).amps)) == pytest.approx(1, abs=TOL)
    assert res.success_probability == pytest.approx(1 / 9, abs=TOL)


def test_same_unitary_on_paths_one_and_two_cancels(box, rng):
    u = random_unitary(POLARIZATION, rng)
    psi = Ket(POLARIZATION, [0.6, 0.8])
    circuit = Circuit(PATHS3, POLARIZATION, (UnitaryOnPath("1", u), UnitaryOnPath("2", u)))
    out = conditional_state(evolve_full(circuit, box.prepost, psi))
    assert abs(np.vdot(out.amps, psi.amps)) == pytest.approx(1, abs=TOL)


def test_hardy_overlap_makes_postselection_impossible():
    from postsel.scenarios import hardy

    spec = hardy([("NO+", "O-")])
    res = evolve_full(spec.circuit, spec.prepost)
    assert res.success_probability == 0.0
    with pytest.raises(PostselectionSingular):
        conditional_state(res)


def test_unit_transmission_equals_no_element(rng):
    for _ in range(20):
        pp = random_prepost(PATHS3, rng)
        u = random_unitary(POLARIZATION, rng)
        psi = Ket(POLARIZATION, rng.normal(size=2)).normalized()
        base = Circuit(PATHS3, POLARIZATION, (UnitaryOnPath("2", u),))
        lossless = base.with_elements(Attenuator("1", 1.0), Attenuator("3", 1.0))
        a = evolve_full(base, pp, psi).conditional_state.amps
        b = evolve_full(lossless, pp, psi).conditional_state.amps
        assert np.max(np.abs(a - b)) <= 1e-12


def test_distinct_path_elements_commute(rng):
    for _ in range(10):
        pp = random_prepost(PATHS3, rng)
        psi = Ket(POLARIZATION, rng.normal(size=2)).normalized()
        elements = [
            UnitaryOnPath("1", random_unitary(POLARIZATION, rng)),
            Attenuator("2", float(rng.uniform())),
            UnitaryOnPath("3", random_unitary(POLARIZATION, rng)),
        ]
        ref = evolve_full(Circuit(PATHS3, POLARIZATION, elements), pp, psi).conditional_state.amps
        for perm in itertools.permutations(elements):
            out = evolve_full(Circuit(PATHS3, POLARIZATION, perm), pp, psi).conditional_state.amps
            assert np.max(np.abs(out - ref)) <= 1e-12


def test_negative_weak_value_loss_raises_probability(box):
    blocked = evolve_full(box.circuit.with_elements(Attenuator("2", 0.0)), box.prepost).success_probability
    open_ = evolve_full(box.circuit.with_elements(Attenuator("2", 1.0)), box.prepost).success_probability
    assert blocked > open_
    assert blocked == pytest.approx(4 / 9, abs=TOL)


def test_branches_sum_to_conditional_state(rng):
    pp = random_prepost(PATHS3, rng)
    circuit = Circuit(PATHS3, POLARIZATION, (UnitaryOnPath("1", random_unitary(POLARIZATION, rng)),))
    res = evolve_full(circuit, pp)
    total = sum(b.amps for b in res.branches)
    np.testing.assert_allclose(total, res.conditional_state.amps, atol=1e-14)


def test_detection_probability_visibility_limits(box):
    res = evolve_full(box.circuit, box.prepost)
    assert detection_probability(res, 1.0) == pytest.approx(res.success_probability, abs=TOL)
    # no interference: sum_k |<f|k><k|i>|^2 with every <f|k><k|i> = +-1/3
    assert detection_probability(res, 0.0) == pytest.approx(3 * (1 / 3) ** 2, abs=TOL)
    with pytest.raises(InvalidVisibility):
        detection_probability(res, 1.2)


def test_space_mismatch_on_internal_state(box):
    with pytest.raises(SpaceMismatch):
        evolve_full(Circuit(PATHS3, POLARIZATION), box.prepost, basis_ket(PATHS3, "1"))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=3, max_size=3))
def test_success_probability_is_a_probability(ts):
    pp = PrePost(make_ket(PATHS3, [1, 1, 1]), make_ket(PATHS3, [1, -1, 1]))
    circuit = Circuit(PATHS3, None, tuple(Attenuator(str(k + 1), t) for k, t in enumerate(ts)))
    p = evolve_full(circuit, pp).success_probability
    assert -TOL <= p <= 1 + TOL
    assert p == pytest.approx(brute_success(pp.pre.amps, pp.post.amps, ts), abs=TOL)
