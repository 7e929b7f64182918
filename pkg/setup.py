"""Pip installation script for `infoflow`."""

import os
import re
from setuptools import find_packages, setup


def get_version():

    ver_file = os.path.join('infoflow', '_version.py')
    with open(ver_file) as handle:
        ver_str_line = handle.read()

    ver_pattern = r'^__version__ = [\'"]([^\'"]*)[\'"]'
    match = re.search(ver_pattern, ver_str_line, re.M)
    if match:
        ver_str = match.group(1)
    else:
        msg = 'Unable to find version string in "{}"'.format(ver_file)
        raise RuntimeError(msg)

    return ver_str


def get_long_description():

    readme_file = 'README.md'
    with open(readme_file, encoding='utf-8') as handle:
        contents = handle.read()

    return contents


setup(
    name='info-flow',
    version=get_version(),
    description=("Symbolic transfer entropy and directed information flow "
                 "between the components of a multivariate time-series panel."),
    long_description=get_long_description(),
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests']),
    package_data={
        'infoflow': ['data/*.csv'],
    },
    python_requires='>=3.8',
    install_requires=[
        'numpy',
        'pandas>=1.5',
        'scipy',
    ],
    entry_points={
        'console_scripts': [
            'infoflow=infoflow.cli:main',
        ],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering',
        'Topic :: Scientific/Engineering :: Information Analysis',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'License :: OSI Approved :: Mozilla Public License 2.0 (MPL 2.0)',
        'Operating System :: OS Independent',
    ],
)
