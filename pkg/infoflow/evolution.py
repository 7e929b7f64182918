"""Module containing windowed transfer entropy analysis and market-wide
averages of transfer entropy matrices.

For an n-node transfer entropy matrix T and its asymmetry matrix D:

    mean_te            = sum_{i != j} T[i, j] / (n (n - 1))
    mean_abs_asymmetry = 2 sum_{i < j} |D[i, j]| / (n (n - 1))

"""

import logging
import re
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from infoflow.entropy import (
    ASYMMETRY,
    TRANSFER_ENTROPY,
    EstimatorConfig,
    asymmetry_matrix,
    te_matrix,
)
from infoflow.errors import (
    DegenerateSpecError,
    InsufficientDataError,
    NoValidWindowsError,
    SpecValidationError,
)
from infoflow.symbolic import fit_panel_bins, symbolize_panel
from infoflow.utils import map_maybe_parallel

logger = logging.getLogger(__name__)

CALENDAR_YEAR = 'calendar-year'
FIXED_LENGTH = 'fixed'
WINDOW_SCHEMES = (CALENDAR_YEAR, FIXED_LENGTH)

PER_WINDOW = 'per-window'
FULL_SAMPLE = 'full-sample'
BINNING_MODES = (PER_WINDOW, FULL_SAMPLE)

DEFAULT_Q_RANGE = (2, 22)
MAX_SCAN_Q = 64


@dataclass(frozen=True)
class WindowSpec:
    """How a return panel is cut into analysis windows.

    Parameters
    ----------
    scheme : str
        "calendar-year" groups returns by the year of their date; "fixed"
        takes `length` consecutive rows every `stride` rows.
    length : int, optional
    stride : int, optional
    min_observations : int, optional
        Windows with fewer rows are dropped. By default, 50.

    """
    scheme: str = CALENDAR_YEAR
    length: int = None
    stride: int = None
    min_observations: int = 50

    def __post_init__(self):
        if self.scheme not in WINDOW_SCHEMES:
            raise SpecValidationError('Window `scheme` must be one of {}, but '
                                      'is "{}".'.format(WINDOW_SCHEMES, self.scheme))
        if self.min_observations < 3:
            raise SpecValidationError('`min_observations` must be at least 3, '
                                      'but is {}.'.format(self.min_observations))
        if self.scheme == FIXED_LENGTH:
            if self.length is None or self.length < self.min_observations:
                raise SpecValidationError(
                    'Fixed window length ({}) must be at least '
                    '`min_observations` ({}).'.format(self.length,
                                                      self.min_observations))
            if self.stride is None or self.stride < 1:
                raise SpecValidationError('Window stride must be at least 1, '
                                          'but is {}.'.format(self.stride))

    @classmethod
    def parse(cls, text, min_observations=50):
        """Parse "calendar-year" or "fixed:w,s"."""

        if text == CALENDAR_YEAR:
            return cls(CALENDAR_YEAR, min_observations=min_observations)

        match = re.fullmatch(r'fixed:(\d+),(\d+)', text.strip())
        if not match:
            raise SpecValidationError('Window must be "calendar-year" or '
                                      '"fixed:w,s", but is "{}".'.format(text))

        return cls(FIXED_LENGTH, length=int(match.group(1)),
                   stride=int(match.group(2)),
                   min_observations=min_observations)


@dataclass(frozen=True)
class SkippedWindow:
    """A window left out of an analysis, and why."""
    label: str
    reason: str
    n_observations: int


@dataclass(frozen=True, eq=False)
class EvolutionSeries:
    """Market-wide averages per analysis window, in bits."""
    window_labels: tuple
    mean_te: np.ndarray
    mean_abs_asymmetry: np.ndarray
    n_observations: np.ndarray
    binning: str = PER_WINDOW
    per_window_matrices: tuple = None
    skipped: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.window_labels)

    def to_frame(self):
        return pd.DataFrame({
            'window_label': list(self.window_labels),
            'mean_te': self.mean_te,
            'mean_abs_asymmetry': self.mean_abs_asymmetry,
            'n_observations': self.n_observations,
        })


def _skip(skipped, label, reason, n_obs):
    logger.warning('Skipping window %s (%d observations): %s', label, n_obs,
                   reason)
    if skipped is not None:
        skipped.append(SkippedWindow(label, reason, n_obs))


def split_windows(panel, spec, skipped=None):
    """Cut a return panel into analysis windows.

    Calendar-year windows group returns by the year of their date, i.e. the
    later of the two prices each return differences.

    Parameters
    ----------
    panel : ReturnPanel
    spec : WindowSpec
    skipped : list, optional
        If given, a `SkippedWindow` is appended for every dropped window.

    Returns
    -------
    list of tuple of (str, ReturnPanel)
        In chronological order.

    Raises
    ------
    NoValidWindowsError
        If no window is kept.

    """

    windows = []

    if spec.scheme == CALENDAR_YEAR:
        years = panel.dates.astype('datetime64[Y]').astype(int) + 1970
        for year in np.unique(years):
            rows = np.flatnonzero(years == year)
            label = str(year)
            if rows.size < spec.min_observations:
                _skip(skipped, label, 'fewer than {} observations'.format(
                    spec.min_observations), rows.size)
                continue
            windows.append((label, panel.select(rows)))

    else:
        n_rows = panel.n_observations
        for start in range(0, n_rows - spec.length + 1, spec.stride):
            rows = slice(start, start + spec.length)
            label = '{}_{}'.format(panel.dates[start],
                                   panel.dates[start + spec.length - 1])
            windows.append((label, panel.select(rows)))

    if not windows:
        raise NoValidWindowsError(
            'No window of the {} scheme has at least {} observations.'.format(
                spec.scheme, spec.min_observations))

    return windows


def mean_te_of_matrix(te):
    """Average the off-diagonal entries of a transfer entropy matrix.

    Parameters
    ----------
    te : TEMatrix
        Of kind "transfer-entropy".

    Returns
    -------
    float

    """

    te.require_kind(TRANSFER_ENTROPY)
    n = te.n
    if n < 2:
        raise InsufficientDataError('At least two nodes are needed, but matrix '
                                    'has {}.'.format(n))

    off_diag = ~np.eye(n, dtype=bool)

    return float(np.sum(te.values[off_diag]) / (n * (n - 1)))


def mean_abs_asymmetry(dte):
    """Average the absolute asymmetry over each unordered pair.

    Parameters
    ----------
    dte : TEMatrix
        Of kind "asymmetry".

    Returns
    -------
    float

    """

    dte.require_kind(ASYMMETRY)
    n = dte.n
    if n < 2:
        raise InsufficientDataError('At least two nodes are needed, but matrix '
                                    'has {}.'.format(n))

    upper = np.triu_indices(n, k=1)

    return float(2.0 * np.sum(np.abs(dte.values[upper])) / (n * (n - 1)))


def _analyse_window(label, window, cfg, specs):
    """Symbolize one window and compute its matrices.

    Returns `(result, None)`, or `(None, reason)` if the window has a
    constant column.

    """

    try:
        series = symbolize_panel(window, cfg.q, specs=specs)
    except DegenerateSpecError as exc:
        return None, str(exc)

    te = te_matrix(series, cfg)
    dte = asymmetry_matrix(te)

    return (label, window.n_observations, te, dte), None


def windowed_te(panel, spec, cfg=None, binning=PER_WINDOW,
                retain_matrices=False, n_workers=1):
    """Compute market-wide transfer entropy averages for each window.

    Parameters
    ----------
    panel : ReturnPanel
    spec : WindowSpec
    cfg : EstimatorConfig, optional
    binning : str, optional
        "per-window" (the default) refits the bins of each column to each
        window; "full-sample" fits them once to the whole panel.
    retain_matrices : bool, optional
        If True, keep each window's `(te, asymmetry)` matrices.
    n_workers : int, optional
        Number of threads over which windows are distributed.

    Returns
    -------
    EvolutionSeries
        Windows with a constant column are skipped with a warning.

    """

    cfg = cfg or EstimatorConfig()
    if binning not in BINNING_MODES:
        raise SpecValidationError('`binning` must be one of {}, but is '
                                  '"{}".'.format(BINNING_MODES, binning))

    specs = fit_panel_bins(panel, cfg.q) if binning == FULL_SAMPLE else None

    skipped = []
    windows = split_windows(panel, spec, skipped)
    logger.info('Analysing %d windows (%s binning, q=%d).', len(windows),
                binning, cfg.q)

    outcomes = map_maybe_parallel(
        lambda lw: _analyse_window(lw[0], lw[1], cfg, specs), windows, n_workers)

    results = []
    for (label, window), (result, reason) in zip(windows, outcomes):
        if result is None:
            _skip(skipped, label, reason, window.n_observations)
        else:
            results.append(result)

    if not results:
        raise NoValidWindowsError('Every window was skipped.')

    results.sort(key=lambda res: res[0])

    return EvolutionSeries(
        window_labels=tuple(res[0] for res in results),
        mean_te=np.array([mean_te_of_matrix(res[2]) for res in results]),
        mean_abs_asymmetry=np.array([mean_abs_asymmetry(res[3]) for res in results]),
        n_observations=np.array([res[1] for res in results]),
        binning=binning,
        per_window_matrices=(tuple((res[2], res[3]) for res in results)
                             if retain_matrices else None),
        skipped=tuple(skipped),
    )


def validate_q_range(q_range):
    """Check `(q_min, q_max)` lies within [2, 64] and is non-empty."""

    q_min, q_max = (int(i) for i in q_range)
    if not 2 <= q_min <= q_max <= MAX_SCAN_Q:
        raise SpecValidationError(
            '`q_range` must satisfy 2 <= q_min <= q_max <= {}, but is '
            '({}, {}).'.format(MAX_SCAN_Q, q_min, q_max))

    return q_min, q_max


def scan_q(panel, q_range=DEFAULT_Q_RANGE, cfg=None, n_workers=1):
    """Compute full-sample market-wide averages over a range of bin counts.

    Parameters
    ----------
    panel : ReturnPanel
    q_range : tuple of (int, int), optional
        Inclusive range of bin counts, by default (2, 22).
    cfg : EstimatorConfig, optional
        Template whose `q` is replaced by each scanned value.
    n_workers : int, optional

    Returns
    -------
    pandas.DataFrame
        Columns `q`, `mean_te` and `mean_abs_asymmetry`, one row per `q`.

    """

    q_min, q_max = validate_q_range(q_range)
    cfg = cfg or EstimatorConfig()

    rows = []
    for q in range(q_min, q_max + 1):
        q_cfg = replace(cfg, q=q)
        series = symbolize_panel(panel, q)
        te = te_matrix(series, q_cfg, n_workers=n_workers)
        rows.append({
            'q': q,
            'mean_te': mean_te_of_matrix(te),
            'mean_abs_asymmetry': mean_abs_asymmetry(asymmetry_matrix(te)),
        })
        logger.debug('q=%d: mean_te=%.6g', q, rows[-1]['mean_te'])

    return pd.DataFrame(rows, columns=['q', 'mean_te', 'mean_abs_asymmetry'])
