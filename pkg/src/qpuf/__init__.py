"""Quaternary PUF key generation with wiretap polar coding.

Simulation library covering the PUF reliability model, quaternary response
extraction, channel modelling, GF(4) polar coding with an RS4 kernel, the
chosen-secret fuzzy extractor and the secrecy-leakage upper bound.
"""

__version__ = "0.1.0"

from qpuf._accel import USE_NUMBA  # noqa: F401
