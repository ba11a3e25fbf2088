"""Deterministic random stream derivation.

Every random draw in the package comes from a PCG64 generator keyed by a
``SeedSequence`` over an integer tuple ``(seed, *path)``.  Components that
run in parallel (trials, bands, trees, ECOC columns, repetitions) each get
their own path, so results do not depend on execution order and any piece
of the pipeline can be re-run in isolation.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the PCG64 generator keyed by ``(seed, *path)``."""
    if seed < 0 or any(p < 0 for p in path):
        raise ValueError("seed and path entries must be non-negative integers")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, *path))))


def child_seed(seed: int, *path: int) -> int:
    """Derive a plain integer seed keyed by ``(seed, *path)``.

    Used where an API takes an integer seed rather than a generator.
    """
    if seed < 0 or any(p < 0 for p in path):
        raise ValueError("seed and path entries must be non-negative integers")
    return int(np.random.SeedSequence((seed, *path)).generate_state(1)[0])
