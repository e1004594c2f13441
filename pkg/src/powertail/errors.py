"""Exception hierarchy shared by every stage of the pipeline."""


class PowerTailError(Exception):
    """Base class for all errors raised by powertail."""


class InputError(PowerTailError, ValueError):
    """Bad or insufficient input data.

    ``problems`` holds one human-readable message per offending item
    (e.g. a line of an input file) when more than one issue was found.
    """

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems or [])


class DegenerateDataError(InputError):
    """Data for which an estimator is undefined (e.g. every tail value equal)."""


class DomainError(PowerTailError, ValueError):
    """Argument outside the support of a distribution."""


class NumericalError(PowerTailError, ArithmeticError):
    """A numerical routine produced an inconsistent or non-finite result."""


class DegenerateComparisonError(NumericalError):
    """Two models have identical pointwise likelihoods, so the Vuong statistic is 0/0."""
