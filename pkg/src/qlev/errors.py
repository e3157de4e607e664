"""Exception hierarchy for qlev.

Every failure mode that callers are expected to catch gets its own class;
the CLI maps ``QlevUsageError`` to exit code 2 and ``QlevNumericalError``
to exit code 3.
"""

from __future__ import annotations


class QlevError(Exception):
    """Base class for all qlev errors."""


class QlevUsageError(QlevError):
    """Bad inputs: malformed files, out-of-domain arguments, bad flags."""


class QlevNumericalError(QlevError):
    """A numerical procedure failed to converge or left its valid regime."""


# --- airy ------------------------------------------------------------------

class Overflow(QlevNumericalError):
    """Airy evaluation produced a non-finite value."""


class DomainTooLarge(QlevUsageError):
    """Argument magnitude beyond the supported evaluation domain."""


class BranchTrackingFailure(QlevNumericalError):
    """Continuous phase tracking lost the branch between two points."""


# --- potential --------------------------------------------------------------

class NonPositiveAltitude(QlevUsageError):
    """Potential requested at altitude <= 0 where the model diverges."""


class TableTooSparse(QlevUsageError):
    """Tabulated potential has too few rows to interpolate reliably."""


# --- liouville ---------------------------------------------------------------

class NearBoundary(QlevUsageError):
    """Finite-difference stencil would reach outside the provided domain."""


class MultipleTurningPoints(QlevNumericalError):
    """More than one sign change of F found where exactly one is required."""


class SingularityExpansionFailure(QlevNumericalError):
    """Local series around the turning point failed its self-consistency check."""


class AtTurningPoint(QlevUsageError):
    """Quantity undefined exactly at the classical turning point."""


class OutsideMappedDomain(QlevUsageError):
    """Coordinate-map evaluation requested outside the constructed grid."""


# --- scatter -----------------------------------------------------------------

class NoWkbWindow(QlevNumericalError):
    """No altitude found where the semiclassical launch condition holds."""


class StiffIntegration(QlevNumericalError):
    """Wave-equation integrator exceeded its step budget or underflowed."""


# --- effrange ----------------------------------------------------------------

class ModelNonPhysical(QlevUsageError):
    """Coefficients violate the passivity constraint Im(alpha0) <= 0."""


class DegenerateR(QlevUsageError):
    """Reflection amplitude too close to -1 to invert for the scattering term."""


class IllConditionedFit(QlevNumericalError):
    """Least-squares design matrix is numerically rank deficient."""


class WindowTooNarrow(QlevUsageError):
    """Energy window provides too few samples for a stable fit."""


# --- cavity ------------------------------------------------------------------

class BracketFailure(QlevNumericalError):
    """Root bracketing for a resonance failed inside its search window."""


class PhaseUnwrapError(QlevNumericalError):
    """Round-trip phase jumped by more than pi between adjacent samples."""


class NewtonDivergence(QlevNumericalError):
    """Complex Newton iteration failed to converge to a pole."""


class WrongBasin(QlevNumericalError):
    """Newton iteration converged to a pole far from the seeded level."""


class PeakOverlap(QlevUsageError):
    """Requested line-shape fit window contains more than one resonance."""


class FitDiverged(QlevNumericalError):
    """Nonlinear line-shape fit failed to converge."""
