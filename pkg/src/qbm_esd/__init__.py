"""Entanglement sudden death of two Brownian particles in a common-type heat bath.

Exact Gaussian evolution of a correlated two-particle state, each particle
undergoing independent quantum Brownian motion, with the Duan separability
test applied along the trajectory.
"""
from .bath import PhysicalParams, im_alpha, mu_tilde, response_alpha
from .covariance import (
    CovarianceMatrix,
    ExponentEvaluator,
    MeasurementSpec,
    UnitsSpec,
    assemble,
    assemble_free,
    exponent_eval,
    extract_covariance,
    initial_covariance,
    make_exponent,
)
from .duan import (
    CrossingReport,
    ReducedForm,
    SeparabilityVerdict,
    block_invariants,
    duan_verdict,
    esd_crossings,
    reduce,
)
from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    NoCrossingError,
    NonQuadraticError,
    NumericalError,
    StructureError,
    UnphysicalInputError,
)
from .kernels import KernelSet, green_function, msd, oscillator_correlation, velocity_variance
from .oracles import ppt_simon_oracle, quadrature_kernel_oracle
from .pipeline import Evolution, Trajectory
from .poles import PoleSet, pole_decomposition
from .validation import OracleReport, reference_suite

__version__ = "0.1.0"
