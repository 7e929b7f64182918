from infoflow._version import __version__
