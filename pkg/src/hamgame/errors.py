"""Exception hierarchy shared by all hamgame modules."""


class HamGameError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(HamGameError, ValueError):
    """Operands whose shapes do not fit together."""


class NotHermitianError(HamGameError, ValueError):
    """A matrix required to be Hermitian is not, within tolerance."""


class InvalidStateError(HamGameError, ValueError):
    """A matrix that should be a density matrix is not (trace, PSD, Hermitian)."""


class SpanError(HamGameError, ValueError):
    """An operator or basis lies outside the span it is supposed to live in."""


class UnknownNameError(HamGameError, KeyError):
    """Lookup of an unknown builtin game, operator, or strategy label."""

    def __str__(self):
        # KeyError quotes its argument; keep messages readable.
        return str(self.args[0]) if self.args else ""


class ModeError(HamGameError, ValueError):
    """A solver or equilibrium mode that does not fit the given game."""


class NumericalResidueError(HamGameError, ArithmeticError):
    """A quantity that must be real came out with a significant imaginary part."""
