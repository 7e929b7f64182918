"""Module containing per-node flow statistics derived from a transfer entropy
matrix, and the regression of average outflow on average inflow.

For node i of an n-node matrix T (entry (i, j) = flow from i to j):

    f_out[i] = sum_{p != i} T[i, p] / (n - 1)
    f_in[i]  = sum_{p != i} T[p, i] / (n - 1)
    delta_f[i] = f_out[i] - f_in[i]

"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd
from scipy.special import betainc
from scipy.stats import linregress

from infoflow.entropy import TRANSFER_ENTROPY
from infoflow.errors import DegenerateRegressionError, InsufficientDataError

logger = logging.getLogger(__name__)

# Relative spread below which a regression variable counts as constant.
CONSTANT_TOLERANCE = 1e-12

# Published fits of f_out on f_in for daily sector indices, 2000-2017. Kept
# for reference only; the underlying index data are proprietary.
REFERENCE_SECTOR_FITS = {
    'china': {'n_points': 28, 'slope': 0.724, 'intercept': 0.037,
              'p_slope': 3e-15, 'p_intercept': 2e-6, 'r2_adjusted': 0.908},
    'usa': {'n_points': 16, 'slope': 0.291, 'intercept': 0.046,
            'p_slope': 6e-4, 'p_intercept': 5e-8, 'r2_adjusted': 0.548},
}


@dataclass(frozen=True, eq=False)
class FlowSummary:
    """Average outflow, inflow and net flow of each node, in bits."""
    labels: tuple
    f_out: np.ndarray
    f_in: np.ndarray
    delta_f: np.ndarray

    @property
    def n(self):
        return len(self.labels)

    @property
    def source(self):
        """Label with the largest net outflow."""
        return rank_by_net_flow(self)[0][0]

    @property
    def sink(self):
        """Label with the largest net inflow."""
        return rank_by_net_flow(self)[-1][0]

    def to_frame(self):
        frame = pd.DataFrame({
            'label': list(self.labels),
            'f_out': self.f_out,
            'f_in': self.f_in,
            'delta_f': self.delta_f,
        })
        return frame


@dataclass(frozen=True)
class RegressionResult:
    """Ordinary least squares fit `f_out = slope * f_in + intercept`."""
    slope: float
    intercept: float
    p_slope: float
    p_intercept: float
    r2: float
    r2_adjusted: float
    n_points: int
    se_slope: float
    se_intercept: float

    def to_dict(self):
        return asdict(self)


def flow_summary(te):
    """Compute the average outflow, inflow and net flow of each node.

    Parameters
    ----------
    te : TEMatrix
        Of kind "transfer-entropy", with at least two nodes.

    Returns
    -------
    FlowSummary

    """

    te.require_kind(TRANSFER_ENTROPY)
    n = te.n
    if n < 2:
        raise InsufficientDataError('At least two nodes are needed, but matrix '
                                    'has {}.'.format(n))

    off_diag = te.values * (1 - np.eye(n))
    f_out = off_diag.sum(axis=1) / (n - 1)
    f_in = off_diag.sum(axis=0) / (n - 1)

    return FlowSummary(te.labels, f_out, f_in, f_out - f_in)


def rank_by_net_flow(summary):
    """Order nodes from information source to information sink.

    Parameters
    ----------
    summary : FlowSummary

    Returns
    -------
    list of tuple of (str, float)
        `(label, delta_f)` by descending `delta_f`; ties are ordered by
        ascending label.

    """
    pairs = zip(summary.labels, (float(i) for i in summary.delta_f))
    return sorted(pairs, key=lambda pair: (-pair[1], pair[0]))


def rank_by_activity(summary):
    """Order nodes by total exchanged information, `f_out + f_in`.

    Ties are ordered by ascending label.

    """
    totals = summary.f_out + summary.f_in
    pairs = zip(summary.labels, (float(i) for i in totals))
    return sorted(pairs, key=lambda pair: (-pair[1], pair[0]))


def student_t_sf(t_stat, df):
    """Two-sided tail probability of Student's t distribution.

    Parameters
    ----------
    t_stat : float or ndarray
    df : int
        Degrees of freedom.

    Returns
    -------
    float or ndarray
        `P(|T| >= |t_stat|)`, from the regularized incomplete beta function
        `I_x(df / 2, 1 / 2)` with `x = df / (df + t_stat ** 2)`.

    """
    t_stat = np.asarray(t_stat, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        x = np.where(np.isinf(t_stat), 0.0, df / (df + t_stat ** 2))
    p_val = betainc(0.5 * df, 0.5, x)
    return p_val if p_val.ndim else float(p_val)


def _coef_p_value(coef, std_err, df):
    if std_err == 0:
        return 0.0 if coef != 0 else 1.0
    return float(np.clip(student_t_sf(coef / std_err, df), 0.0, 1.0))


def _is_constant(values):
    """True if `values` has no spread beyond floating-point rounding."""
    scale = np.max(np.abs(values))
    return np.ptp(values) <= CONSTANT_TOLERANCE * scale


def ols_outflow_on_inflow(summary):
    """Regress average outflow on average inflow by ordinary least squares.

    Parameters
    ----------
    summary : FlowSummary
        With at least three nodes.

    Returns
    -------
    RegressionResult
        Coefficient p-values are two-sided, from Student's t distribution with
        `n - 2` degrees of freedom.

    Raises
    ------
    DegenerateRegressionError
        If there are fewer than three nodes, or if `f_in` or `f_out` is
        constant (R2 is undefined for a constant response).

    """

    x_val = np.asarray(summary.f_in, dtype=float)
    y_val = np.asarray(summary.f_out, dtype=float)
    n = x_val.size

    if n < 3:
        raise DegenerateRegressionError('At least three points are needed, but '
                                        'got {}.'.format(n))
    if _is_constant(x_val):
        raise DegenerateRegressionError('Regressor `f_in` has zero variance.')
    if _is_constant(y_val):
        raise DegenerateRegressionError('Response `f_out` has zero variance, so '
                                        'R2 is undefined.')

    fit = linregress(x_val, y_val)
    r2 = min(float(fit.rvalue) ** 2, 1.0)
    df = n - 2

    result = RegressionResult(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        p_slope=_coef_p_value(fit.slope, fit.stderr, df),
        p_intercept=_coef_p_value(fit.intercept, fit.intercept_stderr, df),
        r2=r2,
        r2_adjusted=1.0 - (1.0 - r2) * (n - 1) / df,
        n_points=n,
        se_slope=float(fit.stderr),
        se_intercept=float(fit.intercept_stderr),
    )
    logger.info('Outflow on inflow: slope=%.4g, intercept=%.4g, adj. R2=%.4g.',
                result.slope, result.intercept, result.r2_adjusted)

    return result
