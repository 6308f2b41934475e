"""Exception hierarchy.

Validation problems (bad shapes, inconsistent inputs) derive from
:class:`ValidationError`; failures of a numerical procedure on otherwise
well-formed input derive from :class:`NumericalError`. The CLI maps the two
families to exit codes 1 and 2.
"""


class SpectralError(Exception):
    code = "spectral_error"


class ValidationError(SpectralError, ValueError):
    code = "validation_error"


class NumericalError(SpectralError, ArithmeticError):
    code = "numerical_error"


class ShapeError(ValidationError):
    code = "shape_error"


class ZeroOffDiagonal(ValidationError):
    code = "zero_off_diagonal"


class ArgMismatch(ValidationError):
    code = "arg_mismatch"


class PhaseOutOfRange(ValidationError):
    code = "phase_out_of_range"


class NotSelfAdjointData(ValidationError):
    code = "not_self_adjoint_data"


class DomainError(ValidationError):
    code = "domain_error"


class MismatchError(ValidationError):
    code = "mismatch_error"


class TooLarge(ValidationError):
    code = "too_large"


class DepthError(ValidationError):
    code = "depth_error"


class SvdFailure(NumericalError):
    code = "svd_failure"


class ZeroWeightAtom(NumericalError):
    code = "zero_weight_atom"


class IllConditioned(NumericalError):
    code = "ill_conditioned"


class DegenerateStart(NumericalError):
    code = "degenerate_start"


class GaugeViolation(NumericalError):
    code = "gauge_violation"


class MomentInconsistency(NumericalError):
    code = "moment_inconsistency"


class QuadratureFailure(NumericalError):
    code = "quadrature_failure"
