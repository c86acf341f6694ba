"""Quantum Fisher information for unitary families with a unitary disturbance."""

__version__ = "0.1.0"

from .linalg import SpectralDecomposition, eig_hermitian, matrix_function, uhlmann_fidelity
from .model import (
    DensityMatrix,
    DisturbedModel,
    HermitianOperator,
    QfiReport,
    SchemaError,
    ValidationError,
    crlb,
    hamiltonian_at,
    validate_density,
    validate_hermitian,
)
from .multiparam import QfiMatrix2, offdiag_via_reparam, qfi_matrix
from .multiprobe import ProbeEnsemble, build_collective, heisenberg_scaling_check
from .oracle import average_hamiltonian_quadrature, first_order_factorization_check, qfi_fd
from .qfi_core import (
    AverageHamiltonian,
    average_hamiltonian,
    qfi_max,
    qfi_mixed,
    qfi_pure,
    spectral_width_contraction_check,
)
from .qubit import BlochModel, dithering_interval, m_vector, qmax_qubit, sweep

__all__ = [
    "AverageHamiltonian",
    "BlochModel",
    "DensityMatrix",
    "DisturbedModel",
    "HermitianOperator",
    "ProbeEnsemble",
    "QfiMatrix2",
    "QfiReport",
    "SchemaError",
    "SpectralDecomposition",
    "ValidationError",
    "average_hamiltonian",
    "average_hamiltonian_quadrature",
    "build_collective",
    "crlb",
    "dithering_interval",
    "eig_hermitian",
    "first_order_factorization_check",
    "hamiltonian_at",
    "heisenberg_scaling_check",
    "m_vector",
    "matrix_function",
    "offdiag_via_reparam",
    "qfi_fd",
    "qfi_matrix",
    "qfi_max",
    "qfi_mixed",
    "qfi_pure",
    "qmax_qubit",
    "sweep",
    "spectral_width_contraction_check",
    "uhlmann_fidelity",
    "validate_density",
    "validate_hermitian",
]
