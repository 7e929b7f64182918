"""Module containing the symbolic transfer entropy estimator.

Transfer entropy from a source series `y` to a target series `x`, with one
step of history for each, is estimated from the empirical distribution of
triples `(x[t + 1], x[t], y[t])`:

    T(y -> x) = sum p(x1, x0, y0) log2[ p(x1, x0, y0) p(x0) / (p(x1, x0) p(x0, y0)) ]

All distributions are normalised by the number of triples, and every marginal
is built from the same index range as the triples.

Matrices follow a single convention throughout: entry (i, j) is the flow FROM
label i TO label j.

"""

import itertools
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np
import pandas as pd

from infoflow.errors import (
    EstimatorError,
    InsufficientDataError,
    MatrixKindError,
    PanelParseError,
    PanelSchemaError,
    ShapeError,
    SpecValidationError,
)
from infoflow.symbolic import DEFAULT_Q
from infoflow.utils import FLOAT_FORMAT, map_maybe_parallel, validate_array_args

logger = logging.getLogger(__name__)

TRANSFER_ENTROPY = 'transfer-entropy'
ASYMMETRY = 'asymmetry'
MATRIX_KINDS = (TRANSFER_ENTROPY, ASYMMETRY)

# Plug-in estimates below this are not floating-point noise.
NEGATIVE_TOLERANCE = 1e-12

MIN_SERIES_LENGTH = 3


@dataclass(frozen=True)
class EstimatorConfig:
    """Parameters of the symbolic transfer entropy estimator.

    Only one step of own (`l`) and other (`m`) history, and base-2
    logarithms, are supported.

    """
    q: int = DEFAULT_Q
    l: int = 1
    m: int = 1
    log_base: int = 2

    def __post_init__(self):
        if isinstance(self.q, bool) or int(self.q) != self.q or self.q < 2:
            raise SpecValidationError('`q` must be an integer of at least 2, '
                                      'but is {!r}.'.format(self.q))
        if self.l != 1 or self.m != 1:
            raise SpecValidationError('Only history lengths l = m = 1 are '
                                      'supported, but got l={}, m={}.'.format(
                                          self.l, self.m))
        if self.log_base != 2:
            raise SpecValidationError('`log_base` must be 2, but is '
                                      '{}.'.format(self.log_base))


@dataclass(frozen=True)
class JointCounts:
    """Sparse symbol-tuple counts over t = 1..L-1.

    Keys are `(k_next, k_self, k_other)` for triples, `(k_next, k_self)` and
    `(k_self, k_other)` for pairs and `k_self` for singles.

    """
    triple_counts: dict
    pair_self_next: dict
    pair_self_other: dict
    single_self: dict
    total_triples: int


def _symbols_of(series):
    return np.asarray(getattr(series, 'symbols', series), dtype=np.int64)


def _label_of(series, default):
    return getattr(series, 'label', '') or default


def _count_rows(*cols):
    """Count distinct rows of equal-length integer columns, as a sparse map."""

    shape = (int(max(c.max() for c in cols)) + 1,) * len(cols)
    codes = np.ravel_multi_index(cols, shape)
    uniq, counts = np.unique(codes, return_counts=True)
    rows = np.column_stack(np.unravel_index(uniq, shape))

    return {tuple(int(k) for k in row): int(c) for row, c in zip(rows, counts)}


def accumulate_counts(x, y):
    """Count the symbol triples `(x[t + 1], x[t], y[t])` and their marginals.

    Parameters
    ----------
    x : SymbolSeries or array_like of int
        Target series.
    y : SymbolSeries or array_like of int
        Source series, of the same length as `x`.

    Returns
    -------
    JointCounts

    """

    x_sym = _symbols_of(x)
    y_sym = _symbols_of(y)

    if x_sym.shape != y_sym.shape or x_sym.ndim != 1:
        raise ShapeError('`x` and `y` must be 1D series of equal length, but '
                         'have shapes {} and {}.'.format(x_sym.shape, y_sym.shape))
    if x_sym.size < MIN_SERIES_LENGTH:
        raise InsufficientDataError(
            'Series must have at least {} symbols, but have {}.'.format(
                MIN_SERIES_LENGTH, x_sym.size))

    nxt = x_sym[1:]
    slf = x_sym[:-1]
    oth = y_sym[:-1]

    singles = _count_rows(slf)

    return JointCounts(
        triple_counts=_count_rows(nxt, slf, oth),
        pair_self_next=_count_rows(nxt, slf),
        pair_self_other=_count_rows(slf, oth),
        single_self={k[0]: v for k, v in singles.items()},
        total_triples=int(nxt.size),
    )


def transfer_entropy_pair(counts):
    """Compute the plug-in symbolic transfer entropy from joint counts.

    Parameters
    ----------
    counts : JointCounts

    Returns
    -------
    float
        Transfer entropy in bits. Analytically non-negative; values down to
        `-NEGATIVE_TOLERANCE` are floating-point noise and returned as is.

    Raises
    ------
    EstimatorError
        If the estimate is more negative than `-NEGATIVE_TOLERANCE`.

    """

    total = counts.total_triples
    if total < 1:
        raise InsufficientDataError('`counts` contains no triples.')

    keys = list(counts.triple_counts)
    n_abc = np.array([counts.triple_counts[k] for k in keys], dtype=float)
    n_b = np.array([counts.single_self[k[1]] for k in keys], dtype=float)
    n_ab = np.array([counts.pair_self_next[k[:2]] for k in keys], dtype=float)
    n_bc = np.array([counts.pair_self_other[k[1:]] for k in keys], dtype=float)

    # Zero-count triples are absent from the sparse map, so contribute 0.
    te = float(np.sum((n_abc / total) * np.log2((n_abc * n_b) / (n_ab * n_bc))))

    if te < -NEGATIVE_TOLERANCE:
        raise EstimatorError('Transfer entropy estimate {!r} is negative beyond '
                             'tolerance.'.format(te))

    return te


def transfer_entropy(source, target):
    """Estimate the symbolic transfer entropy from `source` to `target`."""
    return transfer_entropy_pair(accumulate_counts(x=target, y=source))


def brute_force_te(x, y):
    """Compute transfer entropy from `y` to `x` by explicit enumeration.

    Builds the conditional probabilities `p(x1 | x0, y0)` and `p(x1 | x0)`
    directly from an enumeration of the triples. Intended as an independent
    check of `transfer_entropy_pair`, for small alphabets (q <= 6) and short
    series (at most 1000 symbols).

    Parameters
    ----------
    x : SymbolSeries or array_like of int
        Target series.
    y : SymbolSeries or array_like of int
        Source series.

    Returns
    -------
    float
        Transfer entropy in bits.

    """

    x_sym = [int(i) for i in _symbols_of(x)]
    y_sym = [int(i) for i in _symbols_of(y)]

    if len(x_sym) != len(y_sym):
        raise ShapeError('`x` and `y` must have equal lengths, but have {} and '
                         '{}.'.format(len(x_sym), len(y_sym)))
    if len(x_sym) < MIN_SERIES_LENGTH:
        raise InsufficientDataError(
            'Series must have at least {} symbols, but have {}.'.format(
                MIN_SERIES_LENGTH, len(x_sym)))
    if len(x_sym) > 1000 or max(x_sym + y_sym) > 6:
        raise ValueError('`brute_force_te` is limited to series of at most '
                         '1000 symbols drawn from at most 6 values.')

    triples = [(x_sym[t + 1], x_sym[t], y_sym[t]) for t in range(len(x_sym) - 1)]
    n_triples = len(triples)
    occurrences = Counter(triples)

    # Next values observed after each conditioning state:
    next_given_x0_y0 = defaultdict(list)
    next_given_x0 = defaultdict(list)
    for x1, x0, y0 in triples:
        next_given_x0_y0[(x0, y0)].append(x1)
        next_given_x0[x0].append(x1)

    alphabet = sorted(set(x_sym) | set(y_sym))
    te = 0.0
    for x1, x0, y0 in itertools.product(alphabet, repeat=3):

        n_joint = occurrences[(x1, x0, y0)]
        if not n_joint:
            continue

        after_x0_y0 = next_given_x0_y0[(x0, y0)]
        after_x0 = next_given_x0[x0]

        p_joint = n_joint / n_triples
        p_cond_full = after_x0_y0.count(x1) / len(after_x0_y0)
        p_cond_own = after_x0.count(x1) / len(after_x0)

        te += p_joint * math.log2(p_cond_full / p_cond_own)

    return te


@dataclass(frozen=True, eq=False)
class TEMatrix:
    """Square matrix of pairwise flows; entry (i, j) is the flow from i to j."""
    labels: tuple
    values: np.ndarray
    kind: str = TRANSFER_ENTROPY

    def __post_init__(self):
        object.__setattr__(self, 'labels', tuple(str(i) for i in self.labels))
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=float))

        if self.kind not in MATRIX_KINDS:
            raise MatrixKindError('`kind` must be one of {}, but is "{}".'.format(
                MATRIX_KINDS, self.kind))

        validate_array_args(('values', self.values, (len(self.labels),) * 2))

        if np.any(np.diag(self.values) != 0):
            raise ShapeError('Diagonal of a {} matrix must be zero.'.format(
                self.kind))
        if self.kind == TRANSFER_ENTROPY and np.any(self.values < -NEGATIVE_TOLERANCE):
            raise EstimatorError('Transfer entropy matrix has negative entries.')
        if self.kind == ASYMMETRY and np.any(self.values != -self.values.T):
            raise ShapeError('Asymmetry matrix must be exactly antisymmetric.')

    @property
    def n(self):
        return len(self.labels)

    def require_kind(self, kind):
        if self.kind != kind:
            raise MatrixKindError('Expected a {} matrix, but got a {} '
                                  'matrix.'.format(kind, self.kind))

    def to_frame(self):
        frame = pd.DataFrame(self.values, index=list(self.labels),
                             columns=list(self.labels))
        frame.index.name = 'source'
        return frame


def _pair_flows(series_i, series_j):
    """Flows i -> j and j -> i for one unordered pair."""

    label_i = _label_of(series_i, '?')
    label_j = _label_of(series_j, '?')
    try:
        te_ij = transfer_entropy_pair(accumulate_counts(x=series_j, y=series_i))
        te_ji = transfer_entropy_pair(accumulate_counts(x=series_i, y=series_j))
    except (ShapeError, InsufficientDataError) as exc:
        raise type(exc)('Pair ("{}", "{}"): {}'.format(
            label_i, label_j, exc)) from exc

    return te_ij, te_ji


def te_matrix(panel, cfg=None, n_workers=1):
    """Compute the matrix of pairwise symbolic transfer entropies.

    Parameters
    ----------
    panel : list of SymbolSeries
        At least two series of equal length.
    cfg : EstimatorConfig, optional
        Its `q` must equal that of every `SymbolSeries` in `panel`. By
        default, `q` is taken from the series.
    n_workers : int, optional
        Number of threads over which the unordered pairs are distributed.

    Returns
    -------
    TEMatrix
        Of kind "transfer-entropy"; entry (i, j) is the transfer entropy from
        series i to series j.

    Raises
    ------
    SpecValidationError
        If the series were symbolized with a `q` other than `cfg.q`, or with
        differing `q` when `cfg` is not given.

    """

    n = len(panel)
    if n < 2:
        raise InsufficientDataError('At least two series are needed, but got '
                                    '{}.'.format(n))

    labels = [_label_of(s, str(idx)) for idx, s in enumerate(panel)]
    series_q = {lab: s.q for lab, s in zip(labels, panel) if hasattr(s, 'q')}
    if cfg is None:
        distinct = set(series_q.values())
        q = distinct.pop() if len(distinct) == 1 else DEFAULT_Q
        cfg = EstimatorConfig(q=q)
    mismatched = {lab: q for lab, q in series_q.items() if q != cfg.q}
    if mismatched:
        raise SpecValidationError('Series symbolized with q other than {}: '
                                  '{}.'.format(cfg.q, mismatched))

    pairs = list(itertools.combinations(range(n), 2))
    logger.debug('Computing %d pairwise flows (q=%d) on %d worker(s).',
                 2 * len(pairs), cfg.q, n_workers)

    flows = map_maybe_parallel(
        lambda ij: _pair_flows(panel[ij[0]], panel[ij[1]]), pairs, n_workers)

    values = np.zeros((n, n))
    for (i, j), (te_ij, te_ji) in zip(pairs, flows):
        values[i, j] = te_ij
        values[j, i] = te_ji

    return TEMatrix(labels, values, TRANSFER_ENTROPY)


def asymmetry_matrix(te):
    """Get the degree of asymmetric flow, `te[i, j] - te[j, i]`.

    Parameters
    ----------
    te : TEMatrix
        Of kind "transfer-entropy".

    Returns
    -------
    TEMatrix
        Of kind "asymmetry". Each unordered pair is differenced once and
        negated, so the result is exactly antisymmetric.

    """

    te.require_kind(TRANSFER_ENTROPY)

    upper = np.triu_indices(te.n, k=1)
    delta = te.values[upper] - te.values.T[upper]

    values = np.zeros_like(te.values)
    values[upper] = delta
    values.T[upper] = -delta

    return TEMatrix(te.labels, values, ASYMMETRY)


@dataclass(frozen=True, eq=False)
class PermutationNull:
    """Observed transfer entropy against a shuffled-source null."""
    observed: float
    null: np.ndarray

    @property
    def n_shuffles(self):
        return self.null.size

    @property
    def p_value(self):
        """One-sided permutation p-value, counting the observed value."""
        return (1 + int(np.sum(self.null >= self.observed))) / (1 + self.n_shuffles)

    def percentile(self, pct=95):
        return float(np.percentile(self.null, pct))


def permutation_null(target, source, n_shuffles=100, seed=None):
    """Build a permutation null for the flow from `source` to `target`.

    Shuffling the source destroys its temporal relation to the target while
    keeping its symbol distribution. The null is a diagnostic only; it is
    never subtracted from estimates.

    Parameters
    ----------
    target : SymbolSeries or array_like of int
    source : SymbolSeries or array_like of int
    n_shuffles : int, optional
    seed : int, optional

    Returns
    -------
    PermutationNull

    """

    if n_shuffles < 1:
        raise ValueError('`n_shuffles` must be positive, but is {}.'.format(
            n_shuffles))

    rng = np.random.default_rng(seed)
    target_sym = _symbols_of(target)
    source_sym = _symbols_of(source)

    observed = transfer_entropy(source_sym, target_sym)
    null = np.array([
        transfer_entropy(rng.permutation(source_sym), target_sym)
        for _ in range(n_shuffles)
    ])

    return PermutationNull(observed, null)


def write_matrix_csv(matrix, path):
    """Write a matrix as CSV; row labels are sources, column labels targets."""
    matrix.to_frame().to_csv(path, float_format=FLOAT_FORMAT,
                             lineterminator='\n', encoding='utf-8')


def read_matrix_csv(path, kind=TRANSFER_ENTROPY):
    """Read a matrix written by `write_matrix_csv`.

    Raises
    ------
    PanelSchemaError
        If the file is empty or its row and column labels differ.
    PanelParseError
        If the file cannot be parsed or a cell is not a number.

    """

    try:
        frame = pd.read_csv(path, index_col=0, dtype=str, encoding='utf-8')
    except pd.errors.EmptyDataError:
        raise PanelSchemaError('Matrix file is empty: {}'.format(path)) from None
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise PanelParseError('malformed matrix file ({}).'.format(exc)) from None
    row_labels = [str(i) for i in frame.index]
    col_labels = [str(i) for i in frame.columns]
    if row_labels != col_labels:
        raise PanelSchemaError('Matrix row labels {} do not match column labels '
                               '{}.'.format(row_labels, col_labels))

    values = frame.apply(pd.to_numeric, errors='coerce')
    bad = values.isna().to_numpy()
    if bad.any():
        row, col = np.argwhere(bad)[0]
        # Header is line 1.
        raise PanelParseError('cannot parse matrix entry "{}" ({} -> {}).'.format(
            frame.iloc[row, col], row_labels[row], col_labels[col]),
                              line=int(row) + 2)

    return TEMatrix(col_labels, values.to_numpy(dtype=float), kind)
