"""Module containing coupled stochastic processes with closed-form transfer
entropy, used as ground truth for the estimator.

Process kinds, each generating a source `x` and a target `y`:

    coupled-binary
        `x` i.i.d. uniform over {1, 2}; `y[t + 1] = x[t]`, flipped with
        probability `epsilon`. T(x -> y) = 1 - H2(epsilon).
    lagged-copy
        `x` i.i.d. uniform over `alphabet` symbols; `y[t + 1] = x[t]`.
        T(x -> y) = log2(alphabet).
    independent
        `x` and `y` i.i.d. uniform and independent. T = 0 both ways.

In every kind `y[0]` is uniform and T(y -> x) = 0. Random numbers come from
NumPy's PCG64 bit generator, so a spec and seed fix the output on every
platform.

"""

import logging
from dataclasses import dataclass

import numpy as np

from infoflow.errors import SpecValidationError
from infoflow.panel import PricePanel, ReturnPanel, reconstruct_prices
from infoflow.symbolic import SymbolSeries

logger = logging.getLogger(__name__)

GENERATOR = 'PCG64'

COUPLED_BINARY = 'coupled-binary'
LAGGED_COPY = 'lagged-copy'
INDEPENDENT = 'independent'
PROCESS_KINDS = (COUPLED_BINARY, LAGGED_COPY, INDEPENDENT)

MIN_LENGTH = 10


@dataclass(frozen=True)
class CoupledProcessSpec:
    """A coupled process to sample.

    Parameters
    ----------
    kind : str
        One of `PROCESS_KINDS`.
    length : int
        Number of time steps, at least 10.
    seed : int
        Unsigned 64-bit seed.
    epsilon : float, optional
        Flip probability of the coupled-binary channel, in [0, 0.5].
    alphabet : int, optional
        Alphabet size of the lagged-copy and independent kinds, at least 2.
        Coupled-binary processes always use two symbols.

    """
    kind: str
    length: int
    seed: int
    epsilon: float = 0.0
    alphabet: int = 2

    def __post_init__(self):
        if self.kind not in PROCESS_KINDS:
            raise SpecValidationError('`kind` must be one of {}, but is '
                                      '"{}".'.format(PROCESS_KINDS, self.kind))
        if not 0.0 <= self.epsilon <= 0.5:
            raise SpecValidationError('`epsilon` must lie in [0, 0.5], but is '
                                      '{!r}.'.format(self.epsilon))
        if self.alphabet < 2:
            raise SpecValidationError('`alphabet` must be at least 2, but is '
                                      '{}.'.format(self.alphabet))
        if self.length < MIN_LENGTH:
            raise SpecValidationError('`length` must be at least {}, but is '
                                      '{}.'.format(MIN_LENGTH, self.length))
        if not 0 <= self.seed < 2 ** 64:
            raise SpecValidationError('`seed` must be an unsigned 64-bit '
                                      'integer, but is {}.'.format(self.seed))

    @property
    def n_symbols(self):
        return 2 if self.kind == COUPLED_BINARY else self.alphabet


def _generator(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _draw_symbols(spec, rng):

    a = spec.n_symbols
    x_sym = rng.integers(1, a + 1, size=spec.length)
    y_first = rng.integers(1, a + 1)

    if spec.kind == INDEPENDENT:
        y_sym = rng.integers(1, a + 1, size=spec.length)

    elif spec.kind == LAGGED_COPY:
        y_sym = np.concatenate([[y_first], x_sym[:-1]])

    else:
        flips = rng.random(spec.length - 1) < spec.epsilon
        y_sym = np.concatenate([[y_first], np.where(flips, 3 - x_sym[:-1],
                                                    x_sym[:-1])])

    return x_sym, y_sym


def generate(spec):
    """Sample a source and target symbol series.

    Parameters
    ----------
    spec : CoupledProcessSpec

    Returns
    -------
    tuple of (SymbolSeries, SymbolSeries)
        The source `x` and the target `y`.

    """

    x_sym, y_sym = _draw_symbols(spec, _generator(spec.seed))
    a = spec.n_symbols

    return (SymbolSeries.from_symbols(x_sym, a, label='x'),
            SymbolSeries.from_symbols(y_sym, a, label='y'))


def binary_entropy(eps):
    """Entropy in bits of a Bernoulli(`eps`) variable, with H2(0) = H2(1) = 0."""

    if not 0.0 <= eps <= 1.0:
        raise ValueError('`eps` must lie in [0, 1], but is {!r}.'.format(eps))
    if eps in (0.0, 1.0):
        return 0.0

    return float(-eps * np.log2(eps) - (1 - eps) * np.log2(1 - eps))


def analytic_te(spec):
    """Get the true transfer entropies of a process.

    Returns
    -------
    tuple of (float, float)
        `(te_xy, te_yx)` in bits.

    """

    if spec.kind == COUPLED_BINARY:
        return 1.0 - binary_entropy(spec.epsilon), 0.0
    if spec.kind == LAGGED_COPY:
        return float(np.log2(spec.alphabet)), 0.0

    return 0.0, 0.0


def symbols_to_returns(symbols, n_symbols, rng, scale=0.01):
    """Embed symbols in continuous returns that bin back to the same symbols.

    Symbol `s` maps to `(s - (n_symbols + 1) / 2) * scale` plus a uniform
    jitter of half-width `scale / (4 * n_symbols)`; the jitter of the lowest
    and highest symbols points inward. Fitting `n_symbols` equal-width bins
    to the result recovers the symbols exactly, provided both extreme symbols
    occur.

    """

    symbols = np.asarray(symbols)
    half_width = scale / (4 * n_symbols)
    jitter = rng.uniform(-half_width, half_width, size=symbols.shape)
    jitter[symbols == 1] = np.abs(jitter[symbols == 1])
    jitter[symbols == n_symbols] = -np.abs(jitter[symbols == n_symbols])

    return (symbols - 0.5 * (n_symbols + 1)) * scale + jitter


def generate_returns(spec, scale=0.01):
    """Sample a process as a pair of continuous return series.

    Returns
    -------
    ndarray of shape (length, 2)
        Columns are the source `x` and the target `y`.

    """

    rng = _generator(spec.seed)
    x_sym, y_sym = _draw_symbols(spec, rng)
    a = spec.n_symbols

    return np.column_stack([symbols_to_returns(x_sym, a, rng, scale),
                            symbols_to_returns(y_sym, a, rng, scale)])


def _business_days(start, count):
    """`count` consecutive weekdays from the first weekday on or after `start`."""
    return np.busday_offset(np.datetime64(start, 'D'), np.arange(count),
                            roll='forward')


def generate_price_panel(spec, start='2000-01-03', p0=100.0, scale=0.01):
    """Sample a process as a business-day dated panel of prices.

    Prices are `p0` times the exponentiated cumulative returns of
    `generate_returns`, so the panel has `spec.length + 1` dates.

    Returns
    -------
    PricePanel
        With labels "x" (source) and "y" (target).

    """

    returns = generate_returns(spec, scale=scale)
    prices = reconstruct_prices([p0, p0], returns)
    dates = _business_days(start, prices.shape[0])
    logger.info('Generated %s panel with %d prices (seed %d).', spec.kind,
                prices.shape[0], spec.seed)

    return PricePanel(dates, ('x', 'y'), prices)


def generate_regime_panel(epsilons, window_length, seed, start='2000-01-04',
                          scale=0.01):
    """Sample a coupled-binary process whose flip probability changes in
    consecutive blocks.

    Parameters
    ----------
    epsilons : sequence of float
        Flip probability of each block.
    window_length : int
        Number of time steps per block.
    seed : int
    start : str, optional
        Date of the first return.
    scale : float, optional

    Returns
    -------
    ReturnPanel
        Business-day dated returns with labels "x" (source) and "y" (target).

    """

    for eps in epsilons:
        CoupledProcessSpec(COUPLED_BINARY, window_length, seed, epsilon=eps)

    rng = _generator(seed)
    length = window_length * len(epsilons)
    eps_t = np.repeat(np.asarray(epsilons, dtype=float), window_length)

    x_sym = rng.integers(1, 3, size=length)
    y_first = rng.integers(1, 3)
    flips = rng.random(length - 1) < eps_t[1:]
    y_sym = np.concatenate([[y_first], np.where(flips, 3 - x_sym[:-1], x_sym[:-1])])

    returns = np.column_stack([symbols_to_returns(x_sym, 2, rng, scale),
                               symbols_to_returns(y_sym, 2, rng, scale)])
    dates = _business_days(start, length)

    return ReturnPanel(dates, ('x', 'y'), returns)
