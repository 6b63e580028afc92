"""Exception hierarchy for the Kirchhoff relations toolkit."""

from typing import Any


class KirrelError(Exception):
    """Base class for every error raised by the toolkit."""

    def __init__(self, message: str, *, details: Any | None = None) -> None:
        super().__init__(message)
        self.details = details


class ParseError(KirrelError):
    """Raised when a matrix, relation or netlist file cannot be read."""


class ModulusMismatchError(KirrelError, ValueError):
    """Raised when operands live over different prime fields."""


class ShapeError(KirrelError, ValueError):
    """Raised on dimension or boundary mismatches."""


class FieldDivisionError(KirrelError, ZeroDivisionError):
    """Raised when inverting zero."""


class AffineRelationError(KirrelError, ValueError):
    """Raised when a linear-only operation receives an affine or empty relation."""


class NotLagrangianError(KirrelError, ValueError):
    """Raised when a Lagrangian relation is required."""


class NotKirchhoffError(KirrelError, ValueError):
    """Raised when a Kirchhoff relation is required."""


class NotDeterministicError(KirrelError, ValueError):
    """Raised when a position partition is requested for a non-deterministic relation."""


class NotGraphStateError(KirrelError, ValueError):
    """Raised when an admittance matrix is requested for a state with extra wires."""


class NetlistError(KirrelError, ValueError):
    """Raised for structural netlist defects."""


class NotInRelationError(KirrelError, ValueError):
    """Raised when a vector is evaluated against a relation it does not belong to."""


class InvalidParameterError(KirrelError, ValueError):
    """Raised for out-of-range generator parameters (divider weights, wire indices)."""
