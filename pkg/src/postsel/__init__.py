"""Weak values, losses and their negation under pre/postselection."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .state import TOL, Ket, Operator, Space, Subsystem, apply, basis_ket, identity, inner, make_ket, projector_of, tensor
from .prepost import (
    EPS_POST,
    Attenuator,
    Circuit,
    EvolutionResult,
    JointShutter,
    PrePost,
    Shutter,
    UnitaryOnPath,
    conditional_state,
    evolve_full,
    joint_weak_value,
    sum_rule_residual,
    weak_value,
)
from .shortcut import (
    LossAssignment,
    ShortcutPrediction,
    check_oracle_equivalence,
    loss_amplitude_factor,
    predict_conditional,
    predict_success_probability,
)
from .pointer import MarkingConfig, PointerSample, WeakValueEstimate, extrapolate_weak_value, mark_and_readout, sweep_strength
from .scenarios import ScenarioSpec, appendix_rotation_check, design_prepost, hardy, three_box
from .counting import CountSeries, RunConfig, apply_visibility, simulate_counts, sweep_loss
