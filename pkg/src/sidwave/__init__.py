"""Radial finite-difference experiments for the semilinear wave equation with
scale-invariant damping ``u_tt - Lap u + mu/(1+t) u_t = f(u)``."""

from .diagnostics import (
    BLOWUP,
    COMPLETED,
    UNSTABLE,
    DecayFit,
    RunRecord,
    WeightSpec,
    classify_termination,
    fit_decay_rate,
    m_functional,
    weighted_energy,
    weighted_l2,
)
from .model import (
    ConfigurationError,
    InitialData,
    ModelSpec,
    PolynomialBump,
    PowerLaw,
    RadialGrid,
    ScaleInvariant,
    TruncatedGaussian,
    Undamped,
    make_damping,
    make_grid,
    radial_integral,
    sample_initial_data,
)
from .solver import NumericalInstability, SolutionState, StepControl, first_step, run, step

__version__ = "0.1.0"
