"""Module defining the exceptions raised by `infoflow`.

All exceptions derive from `ValueError`, so callers can catch either the
specific class or `ValueError`.

"""


class InfoFlowError(ValueError):
    """Base class for all `infoflow` errors."""


class PanelParseError(InfoFlowError):
    """A row of a delimited price file could not be parsed."""

    def __init__(self, msg, line=None):
        if line is not None:
            msg = 'Line {}: {}'.format(line, msg)
        super().__init__(msg)
        self.line = line


class PriceDomainError(InfoFlowError):
    """A price is not strictly positive and finite."""

    def __init__(self, date, label, value):
        msg = ('Price for label "{}" on {} must be strictly positive and '
               'finite, but is {}.'.format(label, date, value))
        super().__init__(msg)
        self.date = date
        self.label = label
        self.value = value


class PanelSchemaError(InfoFlowError):
    """The header or column layout of a panel is invalid."""


class EmptyColumnError(InfoFlowError):
    """A panel column has no observations at all."""

    def __init__(self, labels):
        msg = 'Columns with zero observations: {}'.format(list(labels))
        super().__init__(msg)
        self.labels = list(labels)


class DegenerateSpecError(InfoFlowError):
    """A series is constant, so equal-width bins cannot be fitted."""


class DegenerateColumnsError(DegenerateSpecError):
    """One or more panel columns are constant."""

    def __init__(self, labels):
        msg = 'Cannot symbolize constant columns: {}'.format(list(labels))
        super().__init__(msg)
        self.labels = list(labels)


class SymbolRangeError(InfoFlowError):
    """A value lies outside the range of a fitted binning spec."""

    def __init__(self, index, value, x_min, x_max):
        msg = ('Value {!r} at index {} lies outside the binning range '
               '[{!r}, {!r}].'.format(value, index, x_min, x_max))
        super().__init__(msg)
        self.index = index


class ShapeError(InfoFlowError):
    """Arrays or series have inconsistent shapes."""


class InsufficientDataError(InfoFlowError):
    """Too few observations for the requested estimate."""


class MatrixKindError(InfoFlowError):
    """A matrix of the wrong kind was passed."""


class EstimatorError(InfoFlowError):
    """An estimate violated an analytic bound."""


class DegenerateRegressionError(InfoFlowError):
    """The regressor has zero variance, or there are too few points."""


class NoValidWindowsError(InfoFlowError):
    """Every analysis window was dropped."""


class SpecValidationError(InfoFlowError):
    """A configuration or process specification is invalid."""
