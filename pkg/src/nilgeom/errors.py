"""Exception taxonomy for nilgeom.

Every structural failure raises one of these; generic ValueError is reserved
for plain API misuse (wrong argument combinations, contract violations that
are caller bugs rather than data conditions).
"""


class NilgeomError(Exception):
    """Base class for all nilgeom errors."""


class DimensionMismatch(NilgeomError):
    """Coordinate array length does not match the algebra dimension."""


class AntisymmetryViolation(NilgeomError):
    """Structure constants fail c(i,j) = -c(j,i)."""


class GradingViolation(NilgeomError):
    """Nonzero bracket coefficient outside the graded layer pattern."""


class JacobiViolation(NilgeomError):
    """Jacobi identity fails on a basis triple."""


class NonpositiveScale(NilgeomError):
    """Dilation or magnification factor must be positive."""


class UncalibratedNorm(NilgeomError):
    """Homogeneous norm used before calibration certified it."""


class NotInFirstLayer(NilgeomError):
    """Frame vector has components outside the first layer."""


class NotAbelian(NilgeomError):
    """Candidate horizontal frame spans a non-abelian subspace."""


class NoHorizontalSubgroup(NilgeomError):
    """No horizontal subgroup of the requested dimension was found."""


class ValidationFailure(NilgeomError):
    """A sampled certificate (norm margin, projection bound) failed."""


class SolverFailure(NilgeomError):
    """Numerical minimization returned a non-finite or inconsistent value."""


class EmptyInput(NilgeomError):
    """An estimator received no points."""


class ResolutionExceeded(NilgeomError):
    """Requested scale is below the resolution of the point measure."""


class EmptyNet(NilgeomError):
    """A Grassmannian net with no elements was supplied."""


class HypothesisUnmet(NilgeomError):
    """A theorem hypothesis failed at a sampled configuration."""


class ConeNotEmpty(NilgeomError):
    """Cone-emptiness precondition violated by a sample pair."""


class NonconvergentResidual(NilgeomError):
    """Differentiation residuals did not decrease across scales."""


class OracleDisagreement(NilgeomError):
    """Two independent estimators disagree beyond tolerance."""


class UnknownFixture(NilgeomError):
    """gen_fixture received an unknown fixture name."""


class EmptyProfile(NilgeomError):
    """A decay profile with no rows cannot be plotted or summarized."""
