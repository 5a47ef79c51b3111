"""Version information for rng-audit"""

__version__ = "0.1.0"
