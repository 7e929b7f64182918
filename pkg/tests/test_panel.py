"""Module containing unit tests on the `infoflow.panel` module."""

import io
import os
import tempfile
import unittest

import numpy as np

from infoflow.errors import (
    EmptyColumnError,
    PanelParseError,
    PanelSchemaError,
    PriceDomainError,
    ShapeError,
)
from infoflow.panel import (
    AlignmentPolicy,
    PanelFormat,
    PricePanel,
    align_panel,
    compute_log_returns,
    load_price_panel,
    reconstruct_prices,
    write_price_panel,
)


def _panel(prices, start='2001-01-01', labels=None):
    prices = np.asarray(prices, dtype=float)
    dates = np.datetime64(start) + np.arange(prices.shape[0])
    labels = labels or ['s{}'.format(i) for i in range(prices.shape[1])]
    return PricePanel(dates, labels, prices)


class LoadPricePanelTestCase(unittest.TestCase):
    """Tests on the function `load_price_panel`."""

    def test_minimal_panel(self):
        """Test a well-formed three-row file with two labels."""
        text = ('date,801010,801020\n'
                '2001-01-02,100.0,20.5\n'
                '2001-01-03,101.5,20.0\n'
                '2001-01-04,99.0,21.0\n')
        panel = load_price_panel(io.StringIO(text))
        self.assertEqual(panel.labels, ('801010', '801020'))
        self.assertEqual(panel.prices.shape, (3, 2))
        self.assertEqual(panel.dates[0], np.datetime64('2001-01-02'))
        self.assertTrue(panel.is_complete)

    def test_zero_price(self):
        """Test a zero price raises an error naming the date and label."""
        text = ('date,a,b\n'
                '2001-01-02,100,20\n'
                '2001-01-03,0.0,20\n')
        with self.assertRaises(PriceDomainError) as ctx:
            load_price_panel(io.StringIO(text))
        self.assertEqual(ctx.exception.label, 'a')
        self.assertIn('2001-01-03', str(ctx.exception))

    def test_rows_sorted(self):
        """Test rows out of date order are sorted ascending."""
        text = ('date,a\n'
                '2001-01-04,3\n'
                '2001-01-02,1\n'
                '2001-01-03,2\n')
        panel = load_price_panel(io.StringIO(text))
        self.assertTrue(np.array_equal(panel.prices[:, 0], [1, 2, 3]))
        self.assertTrue(np.all(np.diff(panel.dates).astype(int) > 0))

    def test_malformed_row_line_number(self):
        """Test a row with too many fields reports its line number."""
        text = ('date,a,b\n'
                '2001-01-02,1,2\n'
                '2001-01-03,1,2,3\n')
        with self.assertRaises(PanelParseError) as ctx:
            load_price_panel(io.StringIO(text))
        self.assertEqual(ctx.exception.line, 3)

    def test_short_row_line_number(self):
        """Test a row with too few fields reports its line number."""
        text = ('date,a,b\n'
                '2000-01-03,1,2\n'
                '2000-01-04,3\n'
                '2000-01-05,4,5\n')
        with self.assertRaises(PanelParseError) as ctx:
            load_price_panel(io.StringIO(text))
        self.assertEqual(ctx.exception.line, 3)

    def test_invalid_utf8(self):
        """Test bytes that are not UTF-8 raise a parse error."""
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, 'prices.csv')
            with open(path, 'wb') as handle:
                handle.write(b'date,\xff\n2000-01-03,1\n2000-01-04,2\n')
            with self.assertRaises(PanelParseError):
                load_price_panel(path)

    def test_dates_after_2262(self):
        """Test dates beyond the nanosecond timestamp range are loaded."""
        text = 'date,a\n2383-06-01,1\n2383-06-02,2\n'
        panel = load_price_panel(io.StringIO(text))
        self.assertEqual(panel.dates[-1], np.datetime64('2383-06-02'))

    def test_bad_price_line_number(self):
        """Test an unparseable price reports its line number."""
        text = ('date,a\n'
                '2001-01-02,1\n'
                '2001-01-03,1\n'
                '2001-01-04,abc\n')
        with self.assertRaises(PanelParseError) as ctx:
            load_price_panel(io.StringIO(text))
        self.assertEqual(ctx.exception.line, 4)
        self.assertIn('Line 4', str(ctx.exception))

    def test_bad_date(self):
        """Test an unparseable date raises a parse error."""
        text = 'date,a\n2001-13-45,1\n'
        with self.assertRaises(PanelParseError) as ctx:
            load_price_panel(io.StringIO(text))
        self.assertEqual(ctx.exception.line, 2)

    def test_duplicate_label(self):
        """Test a repeated label raises a schema error."""
        text = 'date,a,a\n2001-01-02,1,2\n'
        with self.assertRaises(PanelSchemaError):
            load_price_panel(io.StringIO(text))

    def test_duplicate_date(self):
        """Test a repeated date raises a parse error."""
        text = 'date,a\n2001-01-02,1\n2001-01-02,2\n'
        with self.assertRaises(PanelParseError):
            load_price_panel(io.StringIO(text))

    def test_empty_cells_are_missing(self):
        """Test empty cells are loaded as NaN."""
        text = 'date,a,b\n2001-01-02,1,\n2001-01-03,1,2\n'
        panel = load_price_panel(io.StringIO(text))
        self.assertTrue(np.isnan(panel.prices[0, 1]))
        self.assertFalse(panel.is_complete)

    def test_custom_format(self):
        """Test a semicolon-delimited file with day-first dates."""
        fmt = PanelFormat(date_column='Day', date_format='%d/%m/%Y',
                          delimiter=';')
        text = 'Day;a\n02/01/2001;1\n03/01/2001;2\n'
        panel = load_price_panel(io.StringIO(text), fmt)
        self.assertEqual(panel.dates[1], np.datetime64('2001-01-03'))

    def test_catch_value_error(self):
        """Test panel errors can be caught as ValueError."""
        with self.assertRaises(ValueError):
            load_price_panel(io.StringIO('date,a\n2001-01-02,-1\n'))


class AlignPanelTestCase(unittest.TestCase):
    """Tests on the function `align_panel`."""

    def test_drop_incomplete_row(self):
        """Test the drop policy removes a row with one missing cell."""
        panel = _panel([[1, 2], [np.nan, 2], [3, 4]])
        aligned = align_panel(panel, AlignmentPolicy('drop'))
        self.assertEqual(aligned.prices.shape, (2, 2))
        self.assertEqual(aligned.meta['alignment']['rows_dropped'], 1)

    def test_ffill_single_gap(self):
        """Test a single-row gap is filled with the prior price."""
        panel = _panel([[1, 2], [np.nan, 3], [5, 4]])
        aligned = align_panel(panel, AlignmentPolicy('ffill', max_gap=1))
        self.assertTrue(np.array_equal(aligned.prices[:, 0], [1, 1, 5]))
        self.assertEqual(aligned.meta['alignment']['cells_filled'], 1)

    def test_ffill_long_gap_dropped(self):
        """Test both rows of a two-row gap are dropped when max_gap is 1."""
        panel = _panel([[1, 1], [2, 2], [np.nan, 3], [np.nan, 4], [5, 5]])
        aligned = align_panel(panel, AlignmentPolicy('ffill', max_gap=1))
        self.assertTrue(np.array_equal(aligned.prices[:, 1], [1, 2, 5]))
        self.assertEqual(aligned.meta['alignment']['rows_dropped'], 2)

    def test_ffill_leading_gap_dropped(self):
        """Test a gap without a prior observation is not filled."""
        panel = _panel([[np.nan, 1], [2, 2], [3, 3]])
        aligned = align_panel(panel, AlignmentPolicy('ffill', max_gap=3))
        self.assertEqual(aligned.prices.shape[0], 2)

    def test_empty_column(self):
        """Test a label without observations raises an error naming it."""
        panel = _panel([[1, np.nan], [2, np.nan]], labels=['a', 'b'])
        with self.assertRaises(EmptyColumnError) as ctx:
            align_panel(panel)
        self.assertEqual(ctx.exception.labels, ['b'])


class ComputeLogReturnsTestCase(unittest.TestCase):
    """Tests on the function `compute_log_returns`."""

    def test_constant_prices(self):
        """Test constant prices give zero returns."""
        returns = compute_log_returns(_panel(np.full((5, 1), 100.0)))
        self.assertTrue(np.all(returns.returns == 0))

    def test_unit_return(self):
        """Test prices (100, 100 e) give a return of one."""
        returns = compute_log_returns(_panel([[100.0], [100.0 * np.e]]))
        self.assertAlmostEqual(returns.returns[0, 0], 1.0, places=14)

    def test_known_returns(self):
        """Test prices (50, 55, 52.25) give returns (ln 1.1, ln 0.95)."""
        returns = compute_log_returns(_panel([[50.0], [55.0], [52.25]]))
        self.assertTrue(np.allclose(returns.returns[:, 0],
                                    [np.log(1.1), np.log(0.95)], atol=1e-14))

    def test_scale_invariance(self):
        """Test scaling a price column leaves its returns unchanged."""
        rng = np.random.default_rng(3)
        prices = rng.uniform(50.0, 150.0, (40, 2))
        scaled = prices * np.array([1.0, 1234.5])
        returns = compute_log_returns(_panel(prices)).returns
        returns_scaled = compute_log_returns(_panel(scaled)).returns
        self.assertTrue(np.allclose(returns_scaled, returns, rtol=0, atol=1e-12))

    def test_dated_by_later_price(self):
        """Test each return carries the date of its later price."""
        panel = _panel([[1.0], [2.0], [3.0]])
        returns = compute_log_returns(panel)
        self.assertTrue(np.array_equal(returns.dates, panel.dates[1:]))

    def test_incomplete_panel(self):
        """Test an unaligned panel is rejected."""
        with self.assertRaises(ShapeError):
            compute_log_returns(_panel([[1.0], [np.nan], [2.0]]))

    def test_reconstruct_prices(self):
        """Test prices are rebuilt from their first row and returns."""
        rng = np.random.default_rng(3)
        prices = np.exp(rng.normal(size=(20, 3)).cumsum(axis=0))
        returns = compute_log_returns(_panel(prices))
        rebuilt = reconstruct_prices(prices[0], returns.returns)
        self.assertTrue(np.allclose(rebuilt, prices, rtol=1e-10))


class PricePanelTestCase(unittest.TestCase):
    """Tests on the class `PricePanel` and `write_price_panel`."""

    def test_negative_price(self):
        """Test a negative price is rejected."""
        with self.assertRaises(PriceDomainError):
            _panel([[1.0], [-1.0]])

    def test_duplicate_labels(self):
        """Test duplicate labels are rejected."""
        with self.assertRaises(PanelSchemaError):
            _panel([[1.0, 2.0]], labels=['a', 'a'])

    def test_write_and_load(self):
        """Test a written panel loads back with the same dates and prices."""
        panel = _panel([[1.5, 20.25], [1.75, 19.5], [2.0, 21.0]],
                       labels=['a', 'b'])
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, 'prices.csv')
            write_price_panel(panel, path)
            loaded = load_price_panel(path)
        self.assertEqual(loaded.labels, panel.labels)
        self.assertTrue(np.array_equal(loaded.dates, panel.dates))
        self.assertTrue(np.array_equal(loaded.prices, panel.prices))

    def test_write_and_load_far_future(self):
        """Test a panel dated past 2262 is written and loaded back."""
        panel = _panel([[1.0], [2.0]], start='2400-02-28')
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, 'prices.csv')
            write_price_panel(panel, path)
            loaded = load_price_panel(path)
        self.assertTrue(np.array_equal(loaded.dates, panel.dates))
