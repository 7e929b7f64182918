"""Module for the bundled sector metadata, used only to label output.

The table lists the 28 Shenyin & Wanguo sector codes of the Chinese stock
market and 16 Thomson Reuters sector mnemonics of the USA stock market.

"""

import functools
from pathlib import Path

import pandas as pd

SECTORS_FILE = Path(__file__).parent / 'data' / 'sectors.csv'


@functools.lru_cache(maxsize=None)
def load_sector_table():
    """Load the bundled sector table.

    Returns
    -------
    pandas.DataFrame
        Columns `market`, `code`, `short` and `name`, all strings.

    """
    return pd.read_csv(SECTORS_FILE, dtype=str, keep_default_na=False,
                       encoding='utf-8')


def display_name(label):
    """Get the display name of a sector label.

    Labels are matched against both the full code and its short form; unknown
    labels are returned unchanged.

    """

    table = load_sector_table()
    label = str(label)
    match = table[(table['code'] == label) | (table['short'] == label)]
    if match.empty:
        return label

    return match['name'].iloc[0]


def short_label(label):
    """Get the short heat-map form of a label (last three digits of SWS codes)."""

    table = load_sector_table()
    match = table[table['code'] == str(label)]
    if match.empty:
        return str(label)

    return match['short'].iloc[0]
