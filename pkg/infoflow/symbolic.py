"""Module containing functions to discretise real-valued series into symbols
using equal-width amplitude bins.

A series is split into `q` bins of width `delta = (x_max - x_min) / q`, where
`x_min` and `x_max` are the extremes of the sample under investigation. Bin
`k` (one-based) covers `[x_min + (k - 1) * delta, x_min + k * delta)`; the top
bin is closed so that `x_max` maps to `q`.

"""

import logging
from dataclasses import dataclass

import numpy as np

from infoflow.errors import (
    DegenerateColumnsError,
    DegenerateSpecError,
    InsufficientDataError,
    ShapeError,
    SymbolRangeError,
)

logger = logging.getLogger(__name__)

DEFAULT_Q = 15


def _validate_q(q):
    if isinstance(q, bool) or int(q) != q or q < 2:
        raise ValueError('`q` must be an integer of at least 2, but is '
                         '{!r}.'.format(q))
    return int(q)


@dataclass(frozen=True)
class BinningSpec:
    """Equal-width bins fitted to a sample."""
    q: int
    x_min: float
    x_max: float
    delta: float

    def __post_init__(self):
        _validate_q(self.q)
        if not self.x_max > self.x_min or not self.delta > 0:
            raise DegenerateSpecError(
                'Binning range must be non-degenerate, but is [{!r}, {!r}] '
                'with width {!r}.'.format(self.x_min, self.x_max, self.delta))

    @property
    def edges(self):
        """Bin edges, as an array of length `q + 1`."""
        edges = self.x_min + self.delta * np.arange(self.q + 1)
        edges[-1] = self.x_max
        return edges


@dataclass(frozen=True, eq=False)
class SymbolSeries:
    """Integer symbols in [1, q], with the spec that produced them."""
    symbols: np.ndarray
    spec: BinningSpec
    label: str = ''

    def __post_init__(self):
        symbols = np.asarray(self.symbols)
        if symbols.ndim != 1:
            raise ShapeError('`symbols` must be one-dimensional, but has shape '
                             '{}.'.format(symbols.shape))
        symbols = symbols.astype(np.int64)
        outside = (symbols < 1) | (symbols > self.spec.q)
        if np.any(outside):
            idx = int(np.flatnonzero(outside)[0])
            raise SymbolRangeError(idx, int(symbols[idx]), 1, self.spec.q)
        object.__setattr__(self, 'symbols', symbols)

    def __len__(self):
        return self.symbols.size

    @property
    def q(self):
        return self.spec.q

    @classmethod
    def from_symbols(cls, symbols, q, label=''):
        """Wrap natively discrete symbols, bypassing binning.

        The attached spec is the identity binning of the integers 1..q onto
        themselves (`x_min = 1`, `x_max = q + 1`, unit width).

        """
        spec = BinningSpec(q=q, x_min=1.0, x_max=float(q + 1), delta=1.0)
        return cls(np.asarray(symbols), spec, label)


def fit_bins(series, q=DEFAULT_Q):
    """Fit `q` equal-width bins spanning the range of a sample.

    Parameters
    ----------
    series : array_like of float
        Non-empty, finite sample.
    q : int, optional
        Number of bins. By default, 15.

    Returns
    -------
    BinningSpec

    Raises
    ------
    DegenerateSpecError
        If the sample is constant.

    """

    q = _validate_q(q)
    series = np.asarray(series, dtype=float)

    if series.ndim != 1 or series.size == 0:
        raise InsufficientDataError('`series` must be a non-empty 1D sequence.')
    if not np.all(np.isfinite(series)):
        raise ValueError('`series` must contain only finite values.')

    x_min = float(series.min())
    x_max = float(series.max())
    if x_max == x_min:
        raise DegenerateSpecError(
            'Cannot fit bins to a constant series (value {!r}).'.format(x_min))

    return BinningSpec(q=q, x_min=x_min, x_max=x_max, delta=(x_max - x_min) / q)


def symbolize(series, spec, label=''):
    """Map each value of a series to the one-based index of its bin.

    Parameters
    ----------
    series : array_like of float
    spec : BinningSpec
    label : str, optional

    Returns
    -------
    SymbolSeries

    Raises
    ------
    SymbolRangeError
        If a value lies outside `[spec.x_min, spec.x_max]`. This can only
        happen when a spec fitted on one sample is applied to another.

    """

    series = np.asarray(series, dtype=float)
    if series.ndim != 1:
        raise ShapeError('`series` must be one-dimensional, but has shape '
                         '{}.'.format(series.shape))

    outside = ~((series >= spec.x_min) & (series <= spec.x_max))
    if np.any(outside):
        idx = int(np.flatnonzero(outside)[0])
        raise SymbolRangeError(idx, series[idx], spec.x_min, spec.x_max)

    symbols = np.floor((series - spec.x_min) / spec.delta).astype(np.int64) + 1
    # Close the top bin so that `x_max` is assigned to `q`:
    np.clip(symbols, 1, spec.q, out=symbols)

    return SymbolSeries(symbols, spec, label)


def fit_panel_bins(panel, q=DEFAULT_Q):
    """Fit bins independently to each column of a return panel.

    Returns
    -------
    list of BinningSpec

    Raises
    ------
    DegenerateColumnsError
        Naming every constant column.

    """

    specs = []
    degenerate = []
    for label, col in zip(panel.labels, panel.returns.T):
        try:
            specs.append(fit_bins(col, q))
        except DegenerateSpecError:
            degenerate.append(label)

    if degenerate:
        raise DegenerateColumnsError(degenerate)

    return specs


def symbolize_panel(panel, q=DEFAULT_Q, specs=None):
    """Symbolize each column of a return panel.

    Parameters
    ----------
    panel : ReturnPanel
    q : int, optional
    specs : list of BinningSpec, optional
        Pre-fitted specs, one per column. If None, bins are fitted to each
        column independently.

    Returns
    -------
    list of SymbolSeries

    """

    if specs is None:
        specs = fit_panel_bins(panel, q)
    elif len(specs) != len(panel.labels):
        raise ShapeError('Expected {} binning specs, but got {}.'.format(
            len(panel.labels), len(specs)))

    return [symbolize(col, spec, label)
            for label, col, spec in zip(panel.labels, panel.returns.T, specs)]


def symbol_histogram(series):
    """Get the number of occurrences of each symbol 1..q.

    Parameters
    ----------
    series : SymbolSeries

    Returns
    -------
    ndarray of int of shape (q,)

    """
    return np.bincount(series.symbols, minlength=series.q + 1)[1:]
