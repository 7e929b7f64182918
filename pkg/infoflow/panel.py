"""Module containing functions for loading, aligning and differencing panels
of closing prices.

A panel has one row per calendar date and one column per labelled component
(e.g. a stock market sector index).

"""

import logging
import re
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np
import pandas as pd

from infoflow.errors import (
    EmptyColumnError,
    PanelParseError,
    PanelSchemaError,
    PriceDomainError,
    ShapeError,
    SpecValidationError,
)
from infoflow.utils import FLOAT_FORMAT, validate_array_args

logger = logging.getLogger(__name__)

ALIGNMENT_KINDS = ('drop', 'ffill')


@dataclass(frozen=True)
class PanelFormat:
    """Layout of a delimited price file.

    Parameters
    ----------
    date_column : str
        Header of the leading date column (matched case-insensitively).
    date_format : str
        `strftime` pattern of the dates. ISO-8601 calendar dates by default.
    delimiter : str

    """
    date_column: str = 'date'
    date_format: str = '%Y-%m-%d'
    delimiter: str = ','


@dataclass(frozen=True)
class AlignmentPolicy:
    """How missing cells are resolved.

    Parameters
    ----------
    kind : str
        Either "drop" (keep only dates on which every label has a price) or
        "ffill" (carry the last observation forward over gaps of at most
        `max_gap` rows; rows inside longer gaps are dropped).
    max_gap : int

    """
    kind: str = 'drop'
    max_gap: int = 1

    def __post_init__(self):
        if self.kind not in ALIGNMENT_KINDS:
            raise SpecValidationError('Alignment `kind` must be one of {}, but '
                                      'is "{}".'.format(ALIGNMENT_KINDS, self.kind))
        if self.kind == 'ffill' and self.max_gap < 1:
            raise SpecValidationError('`max_gap` must be at least 1, but is '
                                      '{}.'.format(self.max_gap))


def _as_dates(dates):
    return np.asarray(dates, dtype='datetime64[D]')


@dataclass(frozen=True, eq=False)
class PricePanel:
    """Date-aligned closing prices, one column per label.

    Missing cells are NaN until the panel is passed through `align_panel`.

    """
    dates: np.ndarray
    labels: tuple
    prices: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'dates', _as_dates(self.dates))
        object.__setattr__(self, 'labels', tuple(str(i) for i in self.labels))
        object.__setattr__(self, 'prices', np.asarray(self.prices, dtype=float))

        validate_array_args(
            ('dates', self.dates, ('L',)),
            ('prices', self.prices, ('L', len(self.labels))),
        )
        if len(set(self.labels)) != len(self.labels):
            raise PanelSchemaError('Duplicate labels: {}'.format(
                sorted({i for i in self.labels if self.labels.count(i) > 1})))
        if self.dates.size > 1 and np.any(np.diff(self.dates) <= np.timedelta64(0, 'D')):
            raise ShapeError('`dates` must be strictly increasing.')

        observed = ~np.isnan(self.prices)
        bad = observed & ~(np.isfinite(self.prices) & (self.prices > 0))
        if np.any(bad):
            row, col = np.argwhere(bad)[0]
            raise PriceDomainError(self.dates[row], self.labels[col],
                                   self.prices[row, col])

    @property
    def is_complete(self):
        return not np.any(np.isnan(self.prices))


@dataclass(frozen=True, eq=False)
class ReturnPanel:
    """Log returns of a complete `PricePanel`.

    Each return is dated by the later of the two prices it differences.

    """
    dates: np.ndarray
    labels: tuple
    returns: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'dates', _as_dates(self.dates))
        object.__setattr__(self, 'labels', tuple(str(i) for i in self.labels))
        object.__setattr__(self, 'returns', np.asarray(self.returns, dtype=float))

        validate_array_args(
            ('dates', self.dates, ('L',)),
            ('returns', self.returns, ('L', len(self.labels))),
        )
        if not np.all(np.isfinite(self.returns)):
            raise ShapeError('All returns must be finite.')

    @property
    def n_observations(self):
        return self.dates.size

    def select(self, rows):
        """Get a new panel restricted to a row slice or index array."""
        return ReturnPanel(self.dates[rows], self.labels, self.returns[rows],
                           meta=dict(self.meta))


def _parser_error_line(exc):
    match = re.search(r'line (\d+)', str(exc))
    return int(match.group(1)) if match else None


def _parse_dates(cells, date_format):
    """Parse date strings to `datetime64[D]`, with NaT where parsing fails.

    Dates are held at day resolution, so any year from 1 to 9999 is valid.

    """
    parsed = {}
    for text in pd.unique(cells):
        try:
            parsed[text] = datetime.strptime(text, date_format).date()
        except ValueError:
            parsed[text] = None

    return np.array([parsed[i] for i in cells], dtype='datetime64[D]')


def _format_dates(dates, date_format):
    return [day.strftime(date_format) for day in dates.astype(object)]


def load_price_panel(source, fmt=None):
    """Load a panel of closing prices from delimited text.

    Parameters
    ----------
    source : str or path-like or file-like
        Delimited text whose header row is the date column followed by one
        column per label.
    fmt : PanelFormat, optional

    Returns
    -------
    PricePanel
        Rows sorted by date. Empty cells are kept as NaN; use `align_panel`
        to resolve them.

    Raises
    ------
    PanelParseError
        If a row is malformed, a date or price cannot be parsed, or a date is
        repeated. The message names the line number.
    PanelSchemaError
        If the header is invalid or repeats a label.
    PriceDomainError
        If a price is zero, negative or infinite.

    """

    fmt = fmt or PanelFormat()

    try:
        raw = pd.read_csv(source, sep=fmt.delimiter, header=None, dtype=str,
                          keep_default_na=False, skip_blank_lines=False,
                          encoding='utf-8')
    except pd.errors.EmptyDataError:
        raise PanelSchemaError('Price file is empty.') from None
    except pd.errors.ParserError as exc:
        raise PanelParseError('malformed row ({})'.format(exc),
                              line=_parser_error_line(exc)) from None
    except UnicodeDecodeError as exc:
        raise PanelParseError('price file is not valid UTF-8 ({}).'.format(
            exc.reason)) from None

    header = [str(i).strip() for i in raw.iloc[0].fillna('')]
    if len(header) < 2:
        raise PanelSchemaError('Header must contain a date column and at least '
                               'one label, but is {}.'.format(header))
    if header[0].lower() != fmt.date_column.lower():
        raise PanelSchemaError('First column must be "{}", but is "{}".'.format(
            fmt.date_column, header[0]))

    labels = header[1:]
    dup = sorted({i for i in labels if labels.count(i) > 1})
    if dup:
        raise PanelSchemaError('Duplicate labels: {}'.format(dup))
    if any(not i for i in labels):
        raise PanelSchemaError('Labels must be non-empty.')

    # Fields absent from a short row are NaN; empty fields are ''.
    absent = raw.iloc[1:].isna()
    body = raw.iloc[1:].fillna('').apply(lambda col: col.str.strip())
    # Line numbers of each body row in the source file (header is line 1).
    lines = np.arange(2, len(raw) + 1)

    blank = (body == '').all(axis=1).to_numpy()
    short = absent.any(axis=1).to_numpy() & ~blank
    if short.any():
        idx = np.flatnonzero(short)[0]
        n_fields = len(header) - int(absent.iloc[idx].sum())
        raise PanelParseError('malformed row: expected {} fields, saw {}.'.format(
            len(header), n_fields), line=int(lines[idx]))

    body = body.loc[~blank]
    lines = lines[~blank]

    day_dates = _parse_dates(body.iloc[:, 0].to_numpy(), fmt.date_format)
    bad_date = np.isnat(day_dates)
    if bad_date.any():
        idx = np.flatnonzero(bad_date)[0]
        raise PanelParseError('cannot parse date "{}" with format "{}".'.format(
            body.iloc[idx, 0], fmt.date_format), line=int(lines[idx]))

    prices = np.full((len(body), len(labels)), np.nan)
    for col_idx, label in enumerate(labels):
        cells = body.iloc[:, col_idx + 1]
        values = pd.to_numeric(cells.where(cells != ''), errors='coerce')
        bad_num = (values.isna() & (cells != '')).to_numpy()
        if bad_num.any():
            idx = np.flatnonzero(bad_num)[0]
            raise PanelParseError('cannot parse price "{}" for label "{}".'.format(
                cells.iloc[idx], label), line=int(lines[idx]))
        prices[:, col_idx] = values.to_numpy(dtype=float)

    order = np.argsort(day_dates, kind='stable')
    day_dates = day_dates[order]
    prices = prices[order]
    lines = lines[order]

    repeated = np.flatnonzero(day_dates[1:] == day_dates[:-1])
    if repeated.size:
        idx = repeated[0] + 1
        raise PanelParseError('duplicate date {}.'.format(day_dates[idx]),
                              line=int(lines[idx]))

    panel = PricePanel(day_dates, labels, prices)
    logger.info('Loaded price panel with %d dates and %d labels.',
                day_dates.size, len(labels))

    return panel


def align_panel(panel, policy=None):
    """Resolve missing cells so that every row of the panel is complete.

    Parameters
    ----------
    panel : PricePanel
    policy : AlignmentPolicy, optional
        Drop incomplete rows by default.

    Returns
    -------
    PricePanel
        Complete panel. Its `meta` records the policy, the number of dropped
        rows and the number of filled cells.

    Raises
    ------
    EmptyColumnError
        If a label has no observations at all.

    """

    policy = policy or AlignmentPolicy()
    missing = np.isnan(panel.prices)

    empty = [lab for lab, col in zip(panel.labels, missing.T) if col.all()]
    if empty:
        raise EmptyColumnError(empty)

    prices = panel.prices.copy()
    filled = 0

    if policy.kind == 'ffill':
        frame = pd.DataFrame(prices)
        for col_idx in frame.columns:
            col = frame[col_idx]
            is_na = col.isna()
            # Each gap shares a run id with the observation preceding it.
            run_id = (~is_na).cumsum()
            run_len = is_na.groupby(run_id).transform('sum')
            fillable = is_na & (run_id > 0) & (run_len <= policy.max_gap)
            frame.loc[fillable, col_idx] = col.ffill()[fillable]
            filled += int(fillable.sum())
        prices = frame.to_numpy(dtype=float)

    keep = ~np.any(np.isnan(prices), axis=1)
    dropped = int((~keep).sum())
    if dropped or filled:
        logger.warning('Alignment (%s) dropped %d of %d rows and filled %d '
                       'cells.', policy.kind, dropped, keep.size, filled)

    meta = dict(panel.meta)
    meta['alignment'] = {
        'policy': policy.kind,
        'max_gap': policy.max_gap if policy.kind == 'ffill' else None,
        'rows_dropped': dropped,
        'cells_filled': filled,
    }

    return PricePanel(panel.dates[keep], panel.labels, prices[keep], meta=meta)


def compute_log_returns(panel):
    """Get the log returns of each column of a complete price panel.

    Parameters
    ----------
    panel : PricePanel

    Returns
    -------
    ReturnPanel
        One row fewer than `panel`; the return between rows t and t + 1 is
        dated by row t + 1.

    """

    if not panel.is_complete:
        raise ShapeError('Price panel has missing cells; align it first.')
    if panel.dates.size < 2:
        raise ShapeError('At least two dates are needed to compute returns, '
                         'but panel has {}.'.format(panel.dates.size))

    log_prices = np.log(panel.prices)
    returns = log_prices[1:] - log_prices[:-1]

    return ReturnPanel(panel.dates[1:], panel.labels, returns,
                       meta=dict(panel.meta))


def reconstruct_prices(first_prices, returns):
    """Rebuild price columns from their first prices and log returns.

    Parameters
    ----------
    first_prices : ndarray of shape (n,)
    returns : ndarray of shape (L - 1, n)

    Returns
    -------
    ndarray of shape (L, n)

    """

    first_prices = np.asarray(first_prices, dtype=float)
    returns = np.asarray(returns, dtype=float)
    cum = np.vstack([np.zeros((1, returns.shape[1])),
                     np.cumsum(returns, axis=0)])

    return first_prices[None] * np.exp(cum)


def write_price_panel(panel, path, fmt=None):
    """Write a price panel in the canonical delimited schema."""

    fmt = fmt or PanelFormat()
    frame = pd.DataFrame(panel.prices, columns=list(panel.labels))
    frame.insert(0, fmt.date_column, _format_dates(panel.dates, fmt.date_format))
    frame.to_csv(path, sep=fmt.delimiter, index=False, float_format=FLOAT_FORMAT,
                 lineterminator='\n', encoding='utf-8')
