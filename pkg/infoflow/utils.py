"""Module containing general utility functions."""

import concurrent.futures
import hashlib

import numpy as np

from infoflow.errors import ShapeError

# Written precision of all numeric output.
FLOAT_FORMAT = '%.12g'


def validate_array_args(*args):
    """Validate the shapes of a set of Numpy arrays.

    Parameters
    ----------
    arg : tuple of (str, ndarray, tuple of (str or int))
        Each arg has: the name of a Numpy array, the array itself, and the
        expected shape of the array. The expected shape is passed as a tuple,
        whose elements may be integers or strings; if a string, the element
        is a symbol standing for the size in that dimension.

    Returns
    -------
    symbols : dict of (str: int)
        The size bound to each shape symbol.

    Notes
    -----
    If a symbol is repeated across the expected shapes, the corresponding
    dimension sizes must agree.

    Examples
    --------
    >>> validate_array_args(('te', np.zeros((3, 3)), ('n', 'n')))
    {'n': 3}

    """

    symbols = {}
    arr_msg = '`{}` must be a Numpy array of shape {}, but has shape {}.'
    multi_msg = ('Inconsistent size for dimension symbol "{}" of `{}`: '
                 'expected {}, but found {}.')

    for name, arr, shape in args:

        if not isinstance(arr, np.ndarray) or (arr.ndim != len(shape)):
            raise ShapeError(arr_msg.format(
                name, shape, getattr(arr, 'shape', None)))

        for dim_idx, dim in enumerate(shape):

            if isinstance(dim, str):
                if dim not in symbols:
                    symbols[dim] = arr.shape[dim_idx]
                elif arr.shape[dim_idx] != symbols[dim]:
                    raise ShapeError(multi_msg.format(
                        dim, name, symbols[dim], arr.shape[dim_idx]))
                continue

            if arr.shape[dim_idx] != dim:
                raise ShapeError(arr_msg.format(name, shape, arr.shape))

    return symbols


def map_maybe_parallel(func, params, n_workers=1):
    """Apply a function to each parameter, optionally on a thread pool.

    Parameters
    ----------
    func : callable
    params : sequence
    n_workers : int, optional
        Number of worker threads. With 1 (the default), or fewer than two
        tasks, the work is done in the calling thread.

    Returns
    -------
    list
        Results in the same order as `params`, regardless of completion
        order.

    """

    params = list(params)
    if n_workers is None or n_workers < 1:
        raise ValueError('`n_workers` must be a positive integer, but is '
                         '{}.'.format(n_workers))

    if n_workers == 1 or len(params) < 2:
        return [func(i) for i in params]

    with concurrent.futures.ThreadPoolExecutor(
            n_workers, thread_name_prefix='infoflow-work') as executor:
        return list(executor.map(func, params))


def file_digest(path, chunk_size=1 << 16):
    """Get the SHA-256 hex digest of a file's contents."""

    sha = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(chunk_size), b''):
            sha.update(chunk)

    return sha.hexdigest()
