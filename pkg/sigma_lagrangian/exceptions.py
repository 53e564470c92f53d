"""Custom exceptions for the sigma-lagrangian toolkit.

This module defines the exception classes raised throughout the package. Input and
configuration problems derive from :class:`ValidationError`; failures of a numerical
procedure derive from :class:`NumericError`. The command line maps the first family
to exit code 1 and the second to exit code 2.
"""

from typing import Tuple


class SigmaError(Exception):
    """Base exception for sigma-lagrangian errors."""

    pass


class ValidationError(SigmaError):
    """Raised when input validation fails."""

    pass


class ConstructionError(ValidationError):
    """Raised when a preset or foliated spec cannot be built."""

    pass


class DomainError(ValidationError):
    """Raised when an arclength parameter lies outside a curve's domain."""

    def __init__(self, s: float, domain: Tuple[float, float]):
        """Store the offending parameter and the domain it missed.

        :param s: The arclength parameter that was requested.
        :type s: float
        :param domain: The closed interval on which the curve is defined.
        :type domain: Tuple[float, float]
        """
        self.s = s
        self.domain = domain
        super().__init__(
            f"Parameter s={s!r} is outside the domain [{domain[0]!r}, {domain[1]!r}]"
        )


class NoFixedPointError(ValidationError):
    """Raised when fixed points are requested for a vanishing flux constant."""

    pass


class MeshExportError(ValidationError):
    """Raised when a triangulated mesh is requested for n > 3."""

    pass


class NumericError(SigmaError):
    """Raised when a numerical procedure fails."""

    pass


class SingularityError(NumericError):
    """Raised when a quantity needing 1/r is evaluated where r vanishes."""

    def __init__(self, quantity: str, s: float):
        """Record which quantity hit the singular radius and where.

        :param quantity: Name of the quantity being evaluated.
        :type quantity: str
        :param s: Arclength parameter at which r vanished.
        :type s: float
        """
        self.quantity = quantity
        self.s = s
        super().__init__(f"Cannot evaluate {quantity} at s={s!r}: radius vanishes")


class UndefinedAngleError(NumericError):
    """Raised where e^{i alpha} + <W, x> vanishes and the angle is undefined."""

    pass


class QuadratureError(NumericError):
    """Raised when an adaptive quadrature misses its tolerance."""

    pass


class BranchResolutionError(NumericError):
    """Raised when r(alpha) cannot be pinned on the requested orbit branch."""

    def __init__(self, alpha: float, energy: float, diagnostic: str):
        """Store the failing point of the energy level together with a diagnostic.

        :param alpha: Phase-plane angle at which the radius was sought.
        :type alpha: float
        :param energy: Energy level of the orbit.
        :type energy: float
        :param diagnostic: Human readable reason.
        :type diagnostic: str
        """
        self.alpha = alpha
        self.energy = energy
        self.diagnostic = diagnostic
        super().__init__(
            f"Could not resolve r(alpha) at alpha={alpha!r}, E={energy!r}: {diagnostic}"
        )


class WrongComponentError(NumericError):
    """Raised when alpha is not monotone on an orbit expected to be bounded."""

    pass


class InternalError(SigmaError):
    """Raised when an internal invariant is violated."""

    pass


class ArtifactIOError(SigmaError):
    """Raised when an artifact cannot be written or read."""

    def __init__(self, path: str, reason: str):
        """Attach the path that failed to the error message.

        :param path: File system path of the artifact.
        :type path: str
        :param reason: Underlying failure description.
        :type reason: str
        """
        self.path = path
        super().__init__(f"Artifact I/O failed for {path}: {reason}")
