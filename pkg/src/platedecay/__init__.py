"""platedecay: spectral simulation and verification toolkit for the plate
equation with mass term, u_tt + Laplacian^2 u + u = f(u).

Subpackages:
  theory       exact rational exponent arithmetic of the linear decay theory
  spectral     exact-in-Fourier evolution on periodic grids
  radial       Bessel-representation oracle and stationary-phase machinery
  decaylab     decay experiments: data, slope fits, verdicts
  semilinear   Duhamel solver for the power nonlinearity
  nonexistence test-function method scaling checks
  cli          batch experiment runner
"""

from .theory import (
    Admissibility,
    CriticalExponents,
    LebesguePair,
    TheoryPrediction,
    admissibility_index,
    classify,
    critical_exponents,
    exponent_table,
    log_power,
    mass_correction,
    nonsingular_small_time,
    predict,
)
from .spectral import (
    EvolutionState,
    GridGeometry,
    SpectralField,
    cosine_symbol,
    dispersion,
    dyadic_piece,
    energy,
    frequency_split,
    kernel_symbol,
    lp_norm,
    propagate,
    required_half_width,
    zero_state,
)
from .radial import (
    OptimalityPoint,
    QuadratureBudgetError,
    RadialProfile,
    StationaryData,
    bessel_j,
    choose_annulus,
    optimality_sequence,
    radial_convolution,
    stationary_phase_value,
    stationary_point,
    vdc_bound_check,
)
from .decaylab import (
    DatumKind,
    DatumSpec,
    DecaySeries,
    SlopeFit,
    Verdict,
    fit_slope,
    make_datum,
    run_decay,
    verdict,
)
from .semilinear import (
    NonlinearQuadrature,
    RunRecord,
    RunStatus,
    SemilinearConfig,
    auxiliary_integral,
    contraction_diagnostic,
    duhamel_step,
    find_epsilon0,
    nonlinearity,
)
from .nonexistence import (
    NonexistenceOutcome,
    NonexistenceVerdict,
    SpaceTimeField,
    TestFunctionPair,
    datum_pairing,
    exponent_conditions,
    weak_pairing,
)

__version__ = "0.1.0"
