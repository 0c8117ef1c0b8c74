import math

import numpy as np
import pytest

from postsel.errors import InsufficientData, InvalidStrength, StrengthZero
from postsel.pointer import (
    DEFAULT_G_GRID,
    MarkingConfig,
    PointerSample,
    analyzer_states,
    extrapolate_weak_value,
    half_wave_plate,
    joint_outcome_probabilities,
    mark_and_readout,
    pointer_response,
    readout,
    sweep_strength,
)
from postsel.scenarios import design_prepost

FIT_GRID = [round(0.05 * n, 10) for n in range(1, 11)]


def test_strength_mapping_roundtrip():
    for g in (0.05, 0.3, 0.7, 1.0):
        cfg = MarkingConfig.from_strength("1", g)
        assert cfg.strength == pytest.approx(g, abs=1e-14)
        assert cfg.beta == pytest.approx(math.pi / 4 - cfg.alpha)


def test_half_wave_plate_rotates_horizontal():
    a = 0.3
    out = half_wave_plate(a).matrix @ np.array([1, 0])
    np.testing.assert_allclose(out, [math.cos(2 * a), math.sin(2 * a)], atol=1e-15)
    assert half_wave_plate(a).is_unitary()


def test_analyzer_states_are_orthonormal():
    plus, minus = analyzer_states(0.2)
    assert abs(np.vdot(plus.amps, minus.amps)) <= 1e-15
    assert plus.norm2 == pytest.approx(1) and minus.norm2 == pytest.approx(1)


def test_strong_marking_on_certain_path(box):
    s = mark_and_readout(box.prepost, MarkingConfig.from_strength("1", 1.0))
    assert s.R == pytest.approx(1, abs=1e-12)


def test_strong_marking_on_negative_path(box):
    # closed form at G = 1 with w = -1: (-1)(0 - 1)/(4 + 1)
    s = mark_and_readout(box.prepost, MarkingConfig.from_strength("2", 1.0))
    assert s.R == pytest.approx(1 / 5, abs=1e-12)


@pytest.mark.parametrize("path", ["1", "3"])
def test_unit_weak_value_paths_read_one_at_every_strength(box, path):
    for s in sweep_strength(box.prepost, path, DEFAULT_G_GRID):
        assert s.R == pytest.approx(1, abs=1e-12)


def test_outcome_probabilities_sum_to_one(box):
    for path in ("1", "2", "3"):
        for s in sweep_strength(box.prepost, path, FIT_GRID):
            assert s.P_plus + s.P_minus == pytest.approx(1, abs=1e-12)
            assert 0 <= s.P_plus <= 1


def test_joint_probabilities_bounded_by_postselection(box):
    for g in FIT_GRID:
        jp, jm = joint_outcome_probabilities(box.prepost, MarkingConfig.from_strength("2", g))
        assert 0 <= jp + jm <= 1


@pytest.mark.parametrize("w", [1.0, -1.0, 0.5, 2.0, -0.3])
def test_closed_form_matches_evolution(w):
    # a two-path selection with weak value w on path 1 (and 1 - w on path 2)
    pp = design_prepost([w, 1 - w])
    for s in sweep_strength(pp, "1", DEFAULT_G_GRID):
        assert s.R == pytest.approx(float(pointer_response(w, s.G)), abs=1e-10)


def test_closed_form_limit_and_symmetry():
    for w in (-1.0, 0.4, 3.0):
        assert float(pointer_response(w, 0.0)) == pytest.approx(w, abs=1e-15)
        g = np.linspace(0.01, 0.9, 7)
        np.testing.assert_allclose(pointer_response(w, g), pointer_response(w, -g), atol=1e-15)


def test_weak_limit_convergence(box):
    grid = [10.0**-k for k in range(1, 6)][::-1]
    errors = [abs(s.R + 1) for s in sweep_strength(box.prepost, "2", grid)]
    # shrinking G shrinks the gap to the weak value
    assert all(a < b for a, b in zip(errors, errors[1:]))
    assert errors[0] < 1e-8


def test_eigenvalue_zero_path_reads_zero():
    pp = design_prepost([0.6, 0.0, 0.4])
    for s in sweep_strength(pp, "2", FIT_GRID):
        assert s.R == pytest.approx(0, abs=1e-12)


def test_readout_formula():
    a = MarkingConfig.from_strength("1", 0.5).alpha
    b = math.pi / 4 - a
    assert readout(0.7, a) == pytest.approx((0.7 - math.sin(b) ** 2) / 0.5, abs=1e-12)


def test_zero_strength_rejected(box):
    with pytest.raises(StrengthZero):
        mark_and_readout(box.prepost, MarkingConfig("1", 0.0))
    with pytest.raises(StrengthZero):
        readout(0.5, 0.0)


@pytest.mark.parametrize("grid", [[0.0, 0.1, 0.2], [0.1, 1.2], [-0.1, 0.2], [0.3, 0.2, 0.4]])
def test_invalid_strength_grid(box, grid):
    with pytest.raises(InvalidStrength):
        sweep_strength(box.prepost, "1", grid)


def test_fit_needs_three_strengths():
    samples = [PointerSample(0.1, 0.5, 1.0), PointerSample(0.2, 0.5, 1.0), PointerSample(0.2, 0.5, 1.0)]
    with pytest.raises(InsufficientData):
        extrapolate_weak_value(samples)


def test_linear_fit_of_constant_samples():
    samples = [PointerSample(g, 0.5, 0.37) for g in (0.1, 0.2, 0.3, 0.4)]
    est = extrapolate_weak_value(samples, model="linear")
    assert est.intercept == pytest.approx(0.37, abs=1e-12)
    assert est.slope == pytest.approx(0, abs=1e-12)
    assert est.residual == pytest.approx(0, abs=1e-12)


def test_unknown_fit_model():
    samples = [PointerSample(g, 0.5, 0.37) for g in (0.1, 0.2, 0.3)]
    with pytest.raises(ValueError):
        extrapolate_weak_value(samples, model="cubic")


@pytest.mark.parametrize("path, w", [("1", 1.0), ("2", -1.0), ("3", 1.0)])
def test_fitted_intercepts_recover_weak_values(box, path, w):
    est = extrapolate_weak_value(sweep_strength(box.prepost, path, FIT_GRID))
    assert est.intercept == pytest.approx(w, abs=1e-3)
    est_default = extrapolate_weak_value(sweep_strength(box.prepost, path, DEFAULT_G_GRID))
    assert est_default.intercept == pytest.approx(w, abs=1e-3)


def test_linear_fit_is_biased_for_negative_weak_value(box):
    # the curvature of R(G) near G = 0 drags a straight-line intercept away from -1
    est = extrapolate_weak_value(sweep_strength(box.prepost, "2", FIT_GRID), model="linear")
    assert est.intercept < -1.05


def test_visibility_shrinks_negative_weak_value(box):
    ideal = extrapolate_weak_value(sweep_strength(box.prepost, "2", FIT_GRID)).intercept
    damped = extrapolate_weak_value(sweep_strength(box.prepost, "2", FIT_GRID, visibility=0.95)).intercept
    assert damped < 0
    assert abs(damped) < 1
    assert abs(damped) < abs(ideal)


def test_visibility_one_changes_nothing(box):
    a = sweep_strength(box.prepost, "2", FIT_GRID)
    b = sweep_strength(box.prepost, "2", FIT_GRID, visibility=1.0)
    assert [s.R for s in a] == [s.R for s in b]
