"""
Deterministic seeded random generation

Every random draw in the package goes through a numpy ``Generator`` on
the PCG64 bit generator, whose output for a given seed does not depend on
platform. Child seeds for batches are derived by hashing the parent seed
with a path, so each item is reproducible on its own.
"""

import hashlib
from typing import Any

import numpy as np


PRNG_NAME = "numpy.random.PCG64"
PRNG_VERSION = np.__version__

U64_MAX = (1 << 64) - 1


def prng_description() -> str:
    """Name and version recorded in report metadata"""
    return f"{PRNG_NAME} (numpy {PRNG_VERSION})"


def check_seed(seed: int) -> int:
    """
    Validate a 64-bit unsigned seed

    Raises:
        ValueError: If the seed is negative or wider than 64 bits
    """
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) <= U64_MAX:
        raise ValueError(f"seed must be in [0, 2^64 - 1], got {seed}")
    return int(seed)


def make_generator(seed: int) -> np.random.Generator:
    """Generator on PCG64 seeded with a 64-bit unsigned integer"""
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def derive_seed(seed: int, *path_components: Any) -> int:
    """
    Derive a child seed from a parent seed and a path

    Args:
        seed: Parent seed
        *path_components: Path identifying the child (e.g. "circuit", 17)

    Returns:
        int: 64-bit child seed
    """
    path_str = "/".join(str(c) for c in path_components)
    combined = f"{check_seed(seed):016x}/{path_str}"
    digest = hashlib.sha256(combined.encode()).digest()
    return int.from_bytes(digest[:8], "big")
