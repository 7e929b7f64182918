"""Module containing unit tests on the `infoflow.utils` module."""

import hashlib
import os
import tempfile
import threading
import unittest

import numpy as np

from infoflow.errors import ShapeError
from infoflow.utils import file_digest, map_maybe_parallel, validate_array_args


class ValidateArrayArgsTestCase(unittest.TestCase):
    """Tests on the `validate_array_args` function."""

    def test_raises_on_bad_shape(self):
        """Test ShapeError raised when a single array does not have
        the expected shape."""

        my_arr = np.random.randint(0, 9, (3, 2))

        with self.assertRaises(ShapeError):
            validate_array_args(('my_arr', my_arr, (2, 2)))

    def test_returns_symbols_on_good_shape(self):
        """Test the size bound to each symbol is returned."""

        my_arr = np.random.randint(0, 9, (3, 2))

        self.assertEqual(validate_array_args(('my_arr', my_arr, ('L', 2))),
                         {'L': 3})

    def test_raises_on_inconsistent_symbol_single(self):
        """Test ShapeError raised when a symbol is associated with two distinct
        dimension lengths within a single array."""

        my_arr = np.random.randint(0, 9, (2, 3, 3))

        with self.assertRaises(ShapeError):
            validate_array_args(('my_arr', my_arr, ('N', 'N', 3)))

    def test_raises_on_inconsistent_symbol_multi(self):
        """Test ShapeError raised when a symbol is associated with two distinct
        dimension lengths across two arrays."""

        my_arr_1 = np.random.randint(0, 9, (2, 2))
        my_arr_2 = np.random.randint(0, 9, (3, 5))

        with self.assertRaises(ShapeError):
            validate_array_args(
                ('my_arr_1', my_arr_1, ('N', 2)),
                ('my_arr_2', my_arr_2, (3, 'N'))
            )

    def test_raises_on_non_array(self):
        """Test ShapeError raised for a list in place of an array."""

        with self.assertRaises(ShapeError):
            validate_array_args(('my_list', [1, 2], (2,)))


class MapMaybeParallelTestCase(unittest.TestCase):
    """Tests on the `map_maybe_parallel` function."""

    def test_order_preserved(self):
        """Test results follow the order of the parameters."""
        params = list(range(50))
        self.assertEqual(map_maybe_parallel(lambda i: i ** 2, params, 4),
                         [i ** 2 for i in params])

    def test_serial_in_calling_thread(self):
        """Test a single worker runs in the calling thread."""
        names = map_maybe_parallel(lambda _: threading.current_thread().name,
                                   range(3))
        self.assertEqual(set(names), {threading.current_thread().name})

    def test_bad_workers(self):
        """Test fewer than one worker is rejected."""
        with self.assertRaises(ValueError):
            map_maybe_parallel(abs, [1, 2], 0)


class FileDigestTestCase(unittest.TestCase):
    """Tests on the `file_digest` function."""

    def test_matches_hashlib(self):
        """Test the digest of a file equals that of its contents."""
        content = b'date,a\n2001-01-02,1\n' * 10000
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, 'prices.csv')
            with open(path, 'wb') as handle:
                handle.write(content)
            self.assertEqual(file_digest(path),
                             hashlib.sha256(content).hexdigest())


if __name__ == '__main__':
    unittest.main()
