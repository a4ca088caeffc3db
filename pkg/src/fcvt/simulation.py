"""Monte Carlo size and power studies of the test.

Designs have i.i.d. entries from one of the laws in ``DESIGN_LAWS``; errors
are standard normal or Rademacher. Responses follow

* ``null``:   ``y_i = e_i``
* ``model1``: ``y_i = e_i (1 + x_i h)`` with ``h = (1, 0, ..., 0)``
* ``model2``: ``y_i = e_i (1 + x_i h)`` with ``h = (1_{p/2}, 0_{p/2})``

The regression coefficient is zero throughout; the residuals, hence the
test, do not depend on it.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .design import design_matrix, ols_fit, projection_functionals, projection_matrix
from .errors import InputError, OddPForModel2, PersistentRankDeficiency, RankDeficient, UnknownLaw
from .hetero import report_from_residuals
from .streams import ERROR_PROFILES, sample_errors, stream, worker_count

__all__ = [
    "DESIGN_LAWS",
    "SIM_ERROR_LAWS",
    "MODELS",
    "SimulationConfig",
    "SimulationResult",
    "gen_design",
    "gen_errors",
    "apply_model",
    "simulate",
    "empirical_rate",
    "wilson_interval",
]


def _lognormal(rng, size, scale=1.0):
    # N(5, 3) is read as mean 5, standard deviation 3
    return np.exp(rng.normal(5.0, 3.0, size)) / scale


DESIGN_LAWS = {
    "normal": lambda rng, size: rng.standard_normal(size),
    "t1": lambda rng, size: rng.standard_t(1, size),
    "f32": lambda rng, size: rng.f(3, 2, size),
    "lognormal_e_N53": _lognormal,
    "gamma22": lambda rng, size: rng.gamma(2.0, 2.0, size),
    "uniform01": lambda rng, size: rng.random(size),
    "lognormal_scaled": lambda rng, size: _lognormal(rng, size, 100.0),
}
SIM_ERROR_LAWS = ("normal", "two_point")
MODELS = ("null", "model1", "model2")

_DESIGN_ATTEMPTS = 3


def _seed_seq(seed, *key):
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + key)
    return np.random.SeedSequence(int(seed), spawn_key=key)


def gen_design(law: str, n: int, p: int, seed):
    """Draw an ``n x p`` design with i.i.d. entries from ``law``.

    A rank-deficient draw is replaced by a draw from the next sub-stream, up
    to three attempts in total.
    """
    try:
        draw = DESIGN_LAWS[law]
    except KeyError:
        raise UnknownLaw(f"unknown design law {law!r}; choose from {sorted(DESIGN_LAWS)}") from None
    for attempt in range(_DESIGN_ATTEMPTS):
        X = draw(stream(_seed_seq(seed, attempt)), (n, p))
        try:
            return design_matrix(X)
        except RankDeficient:
            continue
    raise PersistentRankDeficiency(
        f"PersistentRankDeficiency: {_DESIGN_ATTEMPTS} rank-deficient {law} designs in a row (n={n}, p={p})"
    )


def gen_errors(law: str, n: int, seed) -> np.ndarray:
    if law not in SIM_ERROR_LAWS:
        raise UnknownLaw(f"unknown error law {law!r}; choose from {list(SIM_ERROR_LAWS)}")
    return sample_errors(law, n, stream(_seed_seq(seed)))


def _h(model, p):
    h = np.zeros(p)
    if model == "model1":
        h[0] = 1.0
    elif model == "model2":
        if p % 2:
            raise OddPForModel2(f"OddPForModel2: model2 needs an even p, got p={p}")
        h[: p // 2] = 1.0
    return h


def apply_model(model: str, X, errors) -> np.ndarray:
    """Response of the named variance model with zero regression coefficient."""
    errors = np.asarray(errors, dtype=np.float64)
    if model == "null":
        return errors.copy()
    if model not in MODELS:
        raise InputError(f"unknown model {model!r}; choose from {list(MODELS)}")
    X = getattr(X, "entries", X)
    X = np.asarray(X, dtype=np.float64)
    return errors * (1.0 + X @ _h(model, X.shape[1]))


def error_scales(model: str, X) -> np.ndarray:
    """Per-observation error standard deviations ``|1 + x_i h|``."""
    X = np.asarray(getattr(X, "entries", X), dtype=np.float64)
    if model == "null":
        return np.ones(X.shape[0])
    return np.abs(1.0 + X @ _h(model, X.shape[1]))


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    p: int
    design_law: str = "normal"
    error_law: str = "normal"
    model: str = "null"
    reps: int = 1000
    alpha: float = 0.05
    seed: int = 0
    fixed_design: bool = False
    workers: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.n > self.p >= 1):
            raise InputError(f"need n > p >= 1, got n={self.n}, p={self.p}")
        if self.reps < 100:
            raise InputError(f"need reps >= 100, got {self.reps}")
        if not (0.0 < self.alpha < 1.0):
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.design_law not in DESIGN_LAWS:
            raise UnknownLaw(f"unknown design law {self.design_law!r}")
        if self.error_law not in SIM_ERROR_LAWS:
            raise UnknownLaw(f"unknown error law {self.error_law!r}")
        if self.model not in MODELS:
            raise InputError(f"unknown model {self.model!r}")
        if self.model == "model2" and self.p % 2:
            raise OddPForModel2(f"OddPForModel2: model2 needs an even p, got p={self.p}")


@dataclass(frozen=True)
class SimulationResult:
    rejection_rate: float
    wilson_ci: tuple
    reps_used: int
    mean_T: float
    mean_a: float
    rejections: int

    def to_dict(self, config: Optional[SimulationConfig] = None) -> dict:
        d = asdict(self)
        d["wilson_ci"] = list(self.wilson_ci)
        if config is not None:
            c = asdict(config)
            c.pop("workers")
            d["config"] = c
        return d


def wilson_interval(k: int, n: int, level: float = 0.95) -> tuple:
    ci = stats.binomtest(int(k), int(n)).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def _design_for(config, r):
    if config.fixed_design:
        return gen_design(config.design_law, config.n, config.p, _seed_seq(config.seed, 0))
    return gen_design(config.design_law, config.n, config.p, _seed_seq(config.seed, 1, r))


def simulate(config: SimulationConfig) -> np.ndarray:
    """Run every replication; returns a ``(reps, 5)`` array of ``T, a, b, z, p_value``."""
    profile = ERROR_PROFILES[config.error_law]
    light = profile.is_gaussian
    fixed = None
    if config.fixed_design:
        dm = _design_for(config, 0)
        fixed = (dm, projection_functionals(projection_matrix(dm), cumulant_terms=not light))

    def one(r):
        if fixed is None:
            dm = _design_for(config, r)
            summary = projection_functionals(projection_matrix(dm), cumulant_terms=not light)
        else:
            dm, summary = fixed
        errors = sample_errors(config.error_law, config.n, stream(_seed_seq(config.seed, 2, r)))
        y = apply_model(config.model, dm, errors)
        _, resid = ols_fit(dm, y)
        rep = report_from_residuals(resid, summary, profile)
        return rep.T, rep.a, rep.b, rep.z, rep.p_value

    workers = worker_count(config.workers)
    if workers == 1:
        rows = [one(r) for r in range(config.reps)]
    else:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(one, range(config.reps)))
    return np.array(rows)


def empirical_rate(config: SimulationConfig) -> SimulationResult:
    """Rejection rate of the one-sided test at level ``config.alpha``."""
    rows = simulate(config)
    k = int(np.sum(rows[:, 4] < config.alpha))
    reps = rows.shape[0]
    return SimulationResult(
        rejection_rate=k / reps,
        wilson_ci=wilson_interval(k, reps),
        reps_used=reps,
        mean_T=float(rows[:, 0].mean()),
        mean_a=float(rows[:, 1].mean()),
        rejections=k,
    )
