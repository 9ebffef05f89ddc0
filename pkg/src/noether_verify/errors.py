"""Exception hierarchy for noether-verify.

Every error also derives from the builtin it specializes, so callers can
catch ``ValueError``/``KeyError`` the usual way.
"""


class NoetherError(Exception):
    """Base class for all engine errors."""


class ExpressionSyntaxError(NoetherError, ValueError):
    """Malformed expression text."""

    def __init__(self, message: str, text: str = "", position: int = 0):
        """Initialize syntax error.

        Args:
            message: What went wrong
            text: The full source text
            position: Character offset of the offending token
        """
        self.text = text
        self.position = position
        self.line = text.count("\n", 0, position) + 1
        self.column = position - (text.rfind("\n", 0, position) + 1) + 1
        super().__init__(f"{message} (line {self.line}, column {self.column})")


class UnknownFamilyError(NoetherError, KeyError):
    """Reference to a family the BundleSpec does not declare."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class IndexRangeError(NoetherError, ValueError):
    """Component index outside the declared range or of the wrong arity."""


class BundleMismatchError(NoetherError, ValueError):
    """Operands live over different BundleSpecs or family groups."""


class UnboundVariableError(NoetherError, KeyError):
    """A variable needed by substitution or evaluation has no binding."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class MissingComponentError(NoetherError, KeyError):
    """A section or vector field lacks a required component."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class RoleError(NoetherError, ValueError):
    """Operator role does not fit the requested operation."""


class UnsupportedOrderError(NoetherError, ValueError):
    """Lagrangian order outside what an operation supports."""


class NotASymmetryError(NoetherError, ValueError):
    """Supplied current does not integrate the Lie derivative."""


class ConservationError(NoetherError, AssertionError):
    """A Noether current failed its own conservation identity."""


class AntisymmetryError(NoetherError, ValueError):
    """Cofactor table violates T^{i,j,L,S} = -T^{j,i,S,L}."""


class ModelParameterError(NoetherError, ValueError):
    """Invalid model selector or model parameters."""


class BinomialDomainError(NoetherError, ValueError):
    """binomial_C called with a > b."""


class DocumentError(NoetherError, ValueError):
    """Input document lacks a required key or has the wrong shape."""
