"""Spectral data of complex symmetric Jacobi matrices on finite truncations."""

from .core import (
    DEFAULT_TOL,
    BlockJacobi,
    ComplexJacobi,
    DiscreteMeasure,
    MomentSequence,
    SpectralData,
    Tolerances,
    block_embed,
    dense,
    random_jacobi,
    unembed,
    validate,
    with_arguments,
)
from .direct import (
    moment_sequence,
    phase_from_moments,
    phase_function,
    spectral_measure,
    verify_strong_psi,
)
from .errors import NumericalError, SpectralError, ValidationError
from .example_omega import (
    DensityModel,
    chebyshev_q,
    closed_form_moments,
    closed_form_spectral,
    jacobi_omega,
)
from .inverse import (
    MatrixMeasure2x2,
    RawBlocks,
    block_lanczos,
    gauge_fix,
    matrix_measure,
    reconstruct,
    reconstruct_from_moments,
)
from .moments import enumerate_paths, extremal_path, path_moment, path_product
from .polys import QPolynomial, orthogonality_gram, q_polynomials, selfadjoint_split

__version__ = "0.1.0"
