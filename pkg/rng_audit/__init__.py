"""
RNG Audit Tool

Statevector simulation and independence auditing for random-number
generation circuits entangled with an unknown environment.
"""

from rng_audit.__version__ import __version__

__all__ = ["__version__"]
