"""Exceptions and warning categories raised by geogates.

Every error derives from :class:`GeoGatesError` so callers (and the
command-line tool) can map an error family to a single handler.
"""


class GeoGatesError(Exception):
    """Base class for errors raised by geogates."""


class ConfigError(GeoGatesError, ValueError):
    """A scenario, command-line value, or configuration object is invalid."""


class DimensionMismatchError(GeoGatesError, ValueError):
    """Operands do not live in spaces of the same dimension."""


class NonCyclicError(GeoGatesError):
    """A basis state is not an eigenvector of the evolution operator."""


class OpenCurveError(GeoGatesError):
    """The parameter curve does not return to its starting point."""


class DiscontinuousCurveError(GeoGatesError):
    """Consecutive segments of a curve do not meet."""


class CurveDomainError(GeoGatesError, ValueError):
    """A curve cannot be built or integrated for the requested parameters."""


class FrameNotOrthonormalError(GeoGatesError):
    """The auxiliary frame vectors are not orthonormal."""


class NonCyclicFrameError(GeoGatesError):
    """The auxiliary frame at the final time differs from the initial frame."""


class ComplexEnvelopeError(GeoGatesError):
    """The drive envelope has a varying phase on the requested window."""


class UnitarityLostError(GeoGatesError):
    """The propagated operator drifted away from unitarity."""


class BlockStructureError(GeoGatesError):
    """A two-qubit evolution leaked out of the exchange block."""


class SweepTooLargeError(GeoGatesError, ValueError):
    """A latitude arc would need to sweep more than a full turn."""


class CutoffTooSmallError(GeoGatesError):
    """The Fock-space truncation is too small for the vibrational dynamics."""


class DetuningTooSmallError(GeoGatesError):
    """The detuning is too small for the effective Hamiltonian to hold."""


class LambDickeError(GeoGatesError):
    """The parameters are far outside the Lamb-Dicke regime."""


class VerificationError(GeoGatesError):
    """A simulated fidelity fell below its required floor."""


class QuadratureWarning(UserWarning):
    """Adaptive quadrature stopped before reaching its tolerance."""


class LambDickeWarning(UserWarning):
    """The parameters are at the edge of the Lamb-Dicke regime."""
