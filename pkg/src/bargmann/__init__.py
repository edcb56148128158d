"""Quantum optics with Gaussian kernels in the holomorphic representation.

Submodules
----------
gaussian     Gaussian forms and their exact integrals
transforms   kernels of Bogoliubov transformations and quadratic Hamiltonians
devices      lasers, squeezers, beam splitters, homodyne detection
cv_teleport  continuous-variable teleportation
qubit        qubit teleportation and coincidence Bell detection
fock         truncated Fock-space oracle
validation   symbolic-vs-oracle cross checks
cli          command-line interface
"""

from .errors import (
    BargmannError,
    ConfigError,
    CutoffError,
    CutoffWarning,
    DeltaNormalizationError,
    DimensionMismatchError,
    DivergentIntegralError,
    InternalConsistencyError,
    MeasurementError,
    SectorError,
    SingularBlockError,
    SymplecticConstraintError,
)
from .gaussian import (
    GaussianForm,
    adjoint,
    apply,
    compose,
    identity_kernel,
    inner_product,
    norm,
    partial_contract,
    state,
    tensor,
    vacuum,
)

__version__ = "0.1.0"

__all__ = [
    "BargmannError", "ConfigError", "CutoffError", "CutoffWarning", "DeltaNormalizationError",
    "DimensionMismatchError", "DivergentIntegralError", "InternalConsistencyError",
    "MeasurementError", "SectorError", "SingularBlockError", "SymplecticConstraintError",
    "GaussianForm", "adjoint", "apply", "compose", "identity_kernel", "inner_product", "norm",
    "partial_contract", "state", "tensor", "vacuum",
]
