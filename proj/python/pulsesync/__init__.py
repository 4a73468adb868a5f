"""Traveling pulses under periodic multiplicative noise."""

from ._pulsesync import *  # noqa: F401,F403
from ._pulsesync import __doc__  # noqa: F401

__version__ = "0.1.0"
