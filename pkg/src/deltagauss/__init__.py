"""Correlated Gaussian packets scattering off a repulsive delta barrier.

Closed-form time evolution, asymptotic transmission coefficients, and two
independent numerical oracles (a Crank-Nicolson grid solver and direct
propagator quadrature) for cross-validation.  Natural units hbar = m = 1.
"""

from .barrier import (
    BarrierSpec,
    WavefunctionGrid,
    asymptotic_density,
    asymptotic_left_wavefunction,
    complex_width_sq,
    erfc_argument,
    evolved_wavefunction,
    sample_evolved,
)
from .errors import (
    BoundaryContaminationError,
    NumericsError,
    QuadratureError,
    RegimeError,
    RegimeWarning,
    ValidationError,
)
from .packet import (
    MomentSet,
    PacketSpec,
    effective_planck,
    free_evolution,
    free_position_variance,
    initial_moments,
    initial_wavefunction,
    natural_time_scale,
    r_to_rho,
    rho_to_r,
    to_natural_units,
)
from .special import erfc_complex, erfcx_complex, gaussian_halfline_integral
from .tdse import (
    ConvergenceReport,
    ScatteringOutcome,
    SolverConfig,
    convergence_study,
    default_final_time,
    evolve_numeric,
    propagator_direct,
    suggest_l2_config,
    suggest_transmission_config,
)
from .transmission import (
    DimensionlessPoint,
    Regime,
    RegimeResult,
    SweepRow,
    TransmissionResult,
    classify_regime,
    dimensionless_from_parameters,
    interpolation_estimate,
    momentum_average_transmission,
    plane_wave_transmission,
    point_from_physical,
    sweep,
    transmission_coefficient,
)

__version__ = "0.1.0"
