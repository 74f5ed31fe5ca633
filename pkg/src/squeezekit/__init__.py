"""squeezekit: Gaussian-state simulation of light-mediated spin squeezing.

Covariance-matrix dynamics of a collective atomic spin coupled to optical
probe pulses, with the four protocol families (QND measurement, double-pass
coherent feedback, quantum-eraser feedback, phase-matched segmenting),
photon-scattering decoherence, optical loss and detector noise, an exact
small-system simulator for validation, and analysis tools for decoherence
sweeps and optical-density scaling laws.
"""

from .states import (
    GaussianState,
    SymplecticMap,
    NoiseChannel,
    ModeError,
    UncertaintyViolation,
    new_state,
    apply_symplectic,
    apply_channel,
    attach_vacuum,
    trace_out,
    homodyne_condition,
    min_variance,
    symplectic_form,
    VACUUM_VAR,
)
from .channels import (
    ImperfectionSettings,
    DecayRates,
    PhysicalParams,
    coupling_from_physical,
    faraday_pass,
    waveplate_quarter,
    double_pass,
    eraser_step,
    atom_rotation,
    scattering_channel,
    loss_channel,
)
from .protocols import (
    ProtocolSchedule,
    SqueezingRecord,
    run_protocol,
    zeta_qnd,
    zeta_dp,
    zeta_qe,
    zeta_pm,
    theta_min_qe,
    squeezing_db,
)
from .analysis import (
    ScalingFit,
    SimpleNoiseModel,
    SweepResult,
    optimize_rotation,
    sweep_eta,
    fit_scaling,
    simple_model_min,
)

__version__ = "0.1.0"

__all__ = [
    "GaussianState",
    "SymplecticMap",
    "NoiseChannel",
    "ModeError",
    "UncertaintyViolation",
    "new_state",
    "apply_symplectic",
    "apply_channel",
    "attach_vacuum",
    "trace_out",
    "homodyne_condition",
    "min_variance",
    "symplectic_form",
    "VACUUM_VAR",
    "ImperfectionSettings",
    "DecayRates",
    "PhysicalParams",
    "coupling_from_physical",
    "faraday_pass",
    "waveplate_quarter",
    "double_pass",
    "eraser_step",
    "atom_rotation",
    "scattering_channel",
    "loss_channel",
    "ProtocolSchedule",
    "SqueezingRecord",
    "run_protocol",
    "zeta_qnd",
    "zeta_dp",
    "zeta_qe",
    "zeta_pm",
    "theta_min_qe",
    "squeezing_db",
    "ScalingFit",
    "SimpleNoiseModel",
    "SweepResult",
    "optimize_rotation",
    "sweep_eta",
    "fit_scaling",
    "simple_model_min",
    "__version__",
]
