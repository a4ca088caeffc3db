"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`FCVTError`.
The CLI maps :class:`NumericalError` subclasses to exit code 3 and
:class:`InputError` subclasses to exit code 2.
"""

from __future__ import annotations


class FCVTError(Exception):
    """Base class for all package errors."""


class InputError(FCVTError, ValueError):
    """Malformed or out-of-range input."""


class NumericalError(FCVTError, ArithmeticError):
    """Input is well formed but numerically degenerate for the test."""


class DimensionMismatch(InputError):
    pass


class RankDeficient(NumericalError):
    """Design matrix does not have full column rank.

    Parameters
    ----------
    columns : tuple of int
        Column indices taking part in a (numerical) linear dependency.
    rank : int
        Numerical rank that was found.
    """

    def __init__(self, columns, rank, ncols, names=None):
        self.columns = tuple(int(c) for c in columns)
        self.rank = int(rank)
        self.ncols = int(ncols)
        if names is not None:
            label = ", ".join(str(names[c]) for c in self.columns)
        else:
            label = ", ".join(str(c) for c in self.columns)
        super().__init__(
            f"RankDeficient: design has rank {self.rank} < {self.ncols} columns; "
            f"dependent columns: {label}"
        )


class NonPositiveSigma(InputError):
    pass


class InvalidMomentSequence(InputError):
    pass


class NonPositiveVariance(NumericalError):
    pass


class ZeroDenominator(NumericalError):
    pass


class DegenerateResiduals(NumericalError):
    pass


class TooLarge(InputError):
    pass


class PatternInvalid(InputError):
    pass


class UnknownLaw(InputError):
    pass


class OddPForModel2(NumericalError, ValueError):
    """Model 2 splits the covariates in half and needs an even ``p``."""


class PersistentRankDeficiency(NumericalError):
    pass
