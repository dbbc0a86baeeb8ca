"""resolab: a numerical laboratory for resonant propagation speeds.

Builds explicit speeds that resonate with single spectral components of the
abstract damped wave equation, certifies the exponential energy growth they
induce, estimates Hölder constants on grids, evaluates the spectral scale
norms that quantify derivative loss, and reproduces the loss phenomena per
frequency with finite, deterministic certificates.
"""

from .activator import (
    ActivatorSpeed,
    DerivedConstants,
    ResonanceParams,
    SmoothBaseSpeed,
    amplitude_exponent,
    amplitude_exponent_floor,
    amplitude_exponent_rate,
    amplitude_for_frequency,
    build_activator,
    closed_form_log_energy,
    closed_form_residual,
    closed_form_state,
    cos_phase_integral,
    oscillation_phase,
    resonant_speed,
)
from .errors import (
    AdmissibilityViolation,
    ConfigError,
    IntegrationFailure,
    InvalidInputError,
    UnsupportedComparison,
)
from .experiments import (
    CkReport,
    CriticalDampingConfig,
    CriticalGevreyConfig,
    EscapeReport,
    LossReport,
    blowup_time,
    empty_interior_probe,
    log_psi_damping,
    log_psi_gevrey,
    nonactivator_test,
    run_damping_critical,
    run_gevrey_critical,
)
from .oscillator import (
    EnergyTrace,
    OscillatorProblem,
    constant_speed_log_energy,
    growth_exponent_fit,
    integrate_renormalized,
)
from .scales import (
    LOG_ZERO,
    EigenvalueSequence,
    SpectralCoefficients,
    SpectralScale,
    Trend,
    divergence_probe,
    embedding_check,
    log_squared_norm_partial,
    log_weight,
    partial_log_norms,
)
from .speeds import (
    AdmissibilityReport,
    HolderEstimate,
    SampledSpeed,
    SpeedClassParams,
    SumHolderReport,
    holder_constant_on_grid,
    sum_holder_probe,
    tail_max,
    verify_admissible,
)

__version__ = "0.1.0"
