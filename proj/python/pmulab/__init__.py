"""Synchrophasor estimation and compliance lab, python surface."""

try:
    from ._pmu import *  # noqa: F401,F403
except ImportError:  # in-tree builds put _pmu next to this package on sys.path
    from _pmu import *  # noqa: F401,F403
