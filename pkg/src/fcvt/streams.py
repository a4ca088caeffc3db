"""Seeded random streams and unit-variance symmetric error laws.

Each replication ``r`` of a study seeded with ``seed`` draws from its own
Philox stream keyed by ``SeedSequence(seed, spawn_key=(r,))``. Results do not
depend on the order or the thread in which replications are run.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import UnknownLaw
from .moments import GAUSSIAN, LAPLACE, TWO_POINT, UNIFORM

ERROR_PROFILES = {
    "normal": GAUSSIAN,
    "two_point": TWO_POINT,
    "uniform": UNIFORM,
    "laplace": LAPLACE,
}


def stream(seed, *key) -> np.random.Generator:
    """Counter-based generator for the sub-stream ``key`` of ``seed``."""
    if isinstance(seed, np.random.SeedSequence):
        ss = np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(key))
    else:
        ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return stream(seed)


def sample_errors(law: str, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. draws with mean 0 and variance 1 from ``law``."""
    if law == "normal":
        return rng.standard_normal(n)
    if law == "two_point":
        return np.where(rng.random(n) < 0.5, -1.0, 1.0)
    if law == "uniform":
        s3 = math.sqrt(3.0)
        return rng.uniform(-s3, s3, n)
    if law == "laplace":
        return rng.laplace(0.0, 1.0 / math.sqrt(2.0), n)
    raise UnknownLaw(f"unknown error law {law!r}; choose from {sorted(ERROR_PROFILES)}")


def worker_count(workers=None) -> int:
    """Resolve a worker count; ``FCVT_THREADS`` caps it (0 means auto)."""
    if workers is None:
        workers = int(os.environ.get("FCVT_THREADS", "1") or 1)
    workers = int(workers)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers
