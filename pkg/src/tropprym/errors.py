"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class TropPrymError(Exception):
    """Base class for all domain errors raised by the library."""


class InvalidGraphError(TropPrymError):
    """A metric graph violates a structural invariant."""


class InvalidPointError(TropPrymError):
    """A point does not lie on the graph it is used with."""


class InvalidFunctionError(TropPrymError):
    """A piecewise-linear function is discontinuous or has a non-integer slope."""


class InvalidMorphismError(TropPrymError):
    """Map data is not a harmonic morphism of metric graphs."""


class InvalidCoverError(InvalidMorphismError):
    """A harmonic morphism is not an unramified double cover."""


class ClassificationError(TropPrymError):
    """A pushforward matrix cannot be brought into the expected block shape."""


class InvalidTableauError(TropPrymError):
    """A filling violates the displacement or Prym conditions."""


class NotApplicableError(TropPrymError):
    """The inputs fall outside the hypotheses of a criterion."""


class UnsupportedGonalityError(TropPrymError):
    """Odd torsion at most 2r - 2 is outside the supported range."""


class ParseError(TropPrymError):
    """Malformed JSON input.

    Args:
        message: Human-readable description.
        location: Path into the document, such as ``edges[3].length``.
    """

    def __init__(self, message: str, location: str = "") -> None:
        self.message = message
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)

    def nested(self, prefix: str) -> ParseError:
        """The same error with its location placed under ``prefix``."""
        return ParseError(self.message, f"{prefix}.{self.location}" if self.location else prefix)


class DegreeMismatchError(TropPrymError):
    """Divisors of different degrees cannot be linearly equivalent."""
