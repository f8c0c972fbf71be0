"""Exception hierarchy shared across the package.

The CLI maps :class:`InputError` to exit code 2 and :class:`NumericalError`
to exit code 3.
"""


class GenlangError(Exception):
    """Base class for all package errors."""


class InputError(GenlangError, ValueError):
    """Bad user input: out-of-domain values, malformed files, unknown names."""


class ConfigurationError(InputError):
    """Inconsistent model/data configuration (e.g. an unmapped item)."""


class NumericalError(GenlangError, ArithmeticError):
    """A computation produced no usable probability mass or likelihood."""


class DegeneratePriorError(NumericalError):
    """A density evaluated to zero everywhere on the grid."""


class VacuousUtteranceError(NumericalError):
    """An utterance is false at every point of the prior's support."""
