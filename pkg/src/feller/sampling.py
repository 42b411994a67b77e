"""Exact-in-distribution path generation for the absorbed square-root
diffusion, plus an independent Euler-Maruyama oracle.

One transition over ``dt`` starting from ``x`` is drawn exactly: with
``c = sigma2*dt/4`` and noncentrality ``lam = x/c``, draw
``N ~ Poisson(lam/2)``; the path is absorbed (value 0, forever) when
``N = 0`` and otherwise moves to ``c * ChiSquared(2N)``.  Because the
draw follows the true transition law, the time step can be arbitrarily
large without bias -- the grid resolution is purely a matter of how
finely the path should be observed.

Paths are generated from per-path :class:`~feller.rng.RandomStream`
states, so an ensemble is a pure function of its configuration: results
are identical whatever the worker count or evaluation order.  After a
path hits zero no further randomness is consumed (a Poisson(0) draw is
deterministically zero, so skipping it leaves the law unchanged) and the
remaining grid is filled with zeros.

The Euler-Maruyama scheme with full truncation
(``x += sigma*sqrt(max(x,0))*sqrt(h)*Z``, absorb on the first crossing
below zero) discretizes the SDE directly and shares nothing with the
exact sampler except the streams; it exists to cross-validate the
transition law end to end.
"""

import math
import os
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numba
import numpy as np
from numba import float64, int64, njit, prange

from .analytic import ProcessParams
from .rng import RandomStream, gamma_draw, next_normal_pair, poisson_draw, stream_state

__all__ = [
    "SimConfig",
    "Path",
    "PathEnsemble",
    "sample_poisson",
    "sample_chi_squared_even",
    "feller_step",
    "generate_path",
    "generate_ensemble",
    "euler_maruyama_path",
    "euler_maruyama_finals",
]

# full-storage ensembles beyond this many values must use checkpoints
_MAX_FULL_VALUES = 1 << 27


@dataclass(frozen=True)
class SimConfig:
    """One experiment's sampling plan: process parameters, a uniform time
    grid from ``process.t0`` to ``tn`` with step ``dt``, a path count and
    the master seed all randomness derives from."""

    process: ProcessParams
    tn: float
    dt: float
    n_paths: int
    seed: int

    def __post_init__(self):
        if not self.tn > self.process.t0:
            raise ValueError(f"tn must be > t0={self.process.t0}, got {self.tn}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def t0(self) -> float:
        return self.process.t0

    @property
    def n_steps(self) -> int:
        """Grid length: ceil((tn - t0)/dt) + 1 points including t0."""
        return math.ceil((self.tn - self.t0) / self.dt) + 1

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps)

    def grid_index(self, t: float) -> int:
        """Index of grid time ``t``; raises if ``t`` is off the grid."""
        i = round((t - self.t0) / self.dt)
        if i < 0 or i >= self.n_steps or abs(self.t0 + i * self.dt - t) > 1e-9 * max(
            self.dt, abs(t), 1.0
        ):
            raise ValueError(f"time {t} does not lie on the simulation grid")
        return i


class Path(NamedTuple):
    """A single simulated trajectory on the configured grid."""

    times: np.ndarray
    positions: np.ndarray
    absorbed_at: Optional[int]  # grid index of the first zero, if any


@dataclass(frozen=True)
class PathEnsemble:
    """Positions of ``n_paths`` trajectories observed at ``times`` (the
    full grid, or just the requested checkpoints) plus each path's
    absorption step on the full grid (-1 when the path never absorbed)."""

    cfg: SimConfig
    times: np.ndarray
    positions: np.ndarray
    absorbed_at: np.ndarray

    @property
    def n_paths(self) -> int:
        return self.positions.shape[0]

    def absorbed_by_index(self, i: int) -> np.ndarray:
        """Boolean mask of paths absorbed at or before full-grid step ``i``."""
        return (self.absorbed_at >= 0) & (self.absorbed_at <= i)

    def absorption_times(self) -> np.ndarray:
        """Absorption times per path, NaN for paths still alive at tn."""
        out = np.full(self.n_paths, np.nan)
        hit = self.absorbed_at >= 0
        out[hit] = self.cfg.t0 + self.cfg.dt * self.absorbed_at[hit]
        return out


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True, inline="always")
def _step(s, x_prev, sigma2, dt):
    c = 0.25 * sigma2 * dt
    n = poisson_draw(s, 0.5 * x_prev / c)
    if n == 0:
        return 0.0
    return 2.0 * c * gamma_draw(s, float64(n))


@njit(cache=True)
def _path_kernel(state, n_steps, sigma2, dt, x0):
    pos = np.zeros(n_steps)
    pos[0] = x0
    absorbed = int64(-1)
    if x0 == 0.0:
        return pos, int64(0)
    x = x0
    for i in range(1, n_steps):
        x = _step(state, x, sigma2, dt)
        pos[i] = x
        if x == 0.0:
            absorbed = int64(i)
            break
    return pos, absorbed


@njit(cache=True, parallel=True)
def _ensemble_full_kernel(seed, n_paths, n_steps, sigma2, dt, x0):
    pos = np.zeros((n_paths, n_steps))
    absorbed = np.full(n_paths, -1, dtype=np.int64)
    for p in prange(n_paths):
        s = stream_state(seed, p)
        pos[p, 0] = x0
        if x0 == 0.0:
            absorbed[p] = 0
            continue
        x = x0
        for i in range(1, n_steps):
            x = _step(s, x, sigma2, dt)
            pos[p, i] = x
            if x == 0.0:
                absorbed[p] = i
                break
    return pos, absorbed


@njit(cache=True, parallel=True)
def _ensemble_checkpoint_kernel(seed, n_paths, n_steps, sigma2, dt, x0, cp_idx):
    n_cp = cp_idx.size
    pos = np.zeros((n_paths, n_cp))
    absorbed = np.full(n_paths, -1, dtype=np.int64)
    for p in prange(n_paths):
        s = stream_state(seed, p)
        x = x0
        j = 0
        while j < n_cp and cp_idx[j] == 0:
            pos[p, j] = x
            j += 1
        if x0 == 0.0:
            absorbed[p] = 0
            continue
        for i in range(1, n_steps):
            x = _step(s, x, sigma2, dt)
            while j < n_cp and cp_idx[j] == i:
                pos[p, j] = x
                j += 1
            if x == 0.0:
                absorbed[p] = i
                break
    return pos, absorbed


@njit(cache=True)
def _em_path_kernel(state, n_steps, substeps, sigma2, dt, x0):
    sigma = math.sqrt(sigma2)
    h = dt / substeps
    sqh = math.sqrt(h)
    pos = np.zeros(n_steps)
    pos[0] = x0
    absorbed = int64(-1)
    if x0 == 0.0:
        return pos, int64(0)
    x = x0
    for i in range(1, n_steps):
        j = 0
        while j < substeps:
            z1, z2 = next_normal_pair(state)
            x += sigma * math.sqrt(x) * sqh * z1
            if x <= 0.0:
                x = 0.0
                break
            j += 1
            if j >= substeps:
                break
            x += sigma * math.sqrt(x) * sqh * z2
            if x <= 0.0:
                x = 0.0
                break
            j += 1
        pos[i] = x
        if x == 0.0:
            absorbed = int64(i)
            break
    return pos, absorbed


@njit(cache=True, parallel=True)
def _em_finals_kernel(seed, n_paths, n_steps, substeps, sigma2, dt, x0):
    out = np.zeros(n_paths)
    for p in prange(n_paths):
        s = stream_state(seed, p)
        pos, _ = _em_path_kernel(s, n_steps, substeps, sigma2, dt, x0)
        out[p] = pos[n_steps - 1]
    return out


# ---------------------------------------------------------------------------
# public operations


def sample_poisson(stream: RandomStream, mean: float) -> int:
    """Exact Poisson draw from ``stream``; valid for any finite mean >= 0
    (no normal approximation even for means around 1e6)."""
    if not (math.isfinite(mean) and mean >= 0.0):
        raise ValueError(f"Poisson mean must be finite and >= 0, got {mean}")
    return int(poisson_draw(stream.state, mean))


def sample_chi_squared_even(stream: RandomStream, half_df: int) -> float:
    """Exact chi-squared draw with ``2 * half_df`` degrees of freedom,
    sampled as ``2 * Gamma(half_df, 1)``."""
    if half_df < 1:
        raise ValueError(f"half_df must be >= 1, got {half_df}")
    return 2.0 * gamma_draw(stream.state, float(half_df))


def feller_step(stream: RandomStream, x_prev: float, sigma2: float, dt: float) -> float:
    """One exact transition of the diffusion over ``dt`` from ``x_prev``.

    Returns 0 with probability ``exp(-2*x_prev/(sigma2*dt))`` (absorption)
    and otherwise a draw from the continuous part of the transition law.
    """
    if not x_prev >= 0.0:
        raise ValueError(f"x_prev must be >= 0, got {x_prev}")
    if not sigma2 > 0.0:
        raise ValueError(f"sigma2 must be > 0, got {sigma2}")
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    return float(_step(stream.state, x_prev, sigma2, dt))


def generate_path(stream: RandomStream, cfg: SimConfig) -> Path:
    """Generate a single path along the configured grid from ``stream``.

    Absorption short-circuits the walk: later grid entries are zero and
    consume no randomness.
    """
    pos, absorbed = _path_kernel(
        stream.state, cfg.n_steps, cfg.process.sigma2, cfg.dt, cfg.process.x0
    )
    return Path(cfg.times(), pos, None if absorbed < 0 else int(absorbed))


def _thread_count() -> int:
    env = os.environ.get("FELLER_THREADS", "0")
    try:
        requested = int(env)
    except ValueError as exc:
        raise ValueError(f"FELLER_THREADS must be an integer, got {env!r}") from exc
    limit = numba.config.NUMBA_NUM_THREADS
    if requested <= 0:
        return limit
    return min(requested, limit)


def generate_ensemble(
    cfg: SimConfig, checkpoints: Optional[Sequence[float]] = None
) -> PathEnsemble:
    """Generate ``cfg.n_paths`` independent paths.

    Path ``p`` is drawn from ``RandomStream(cfg.seed, p)``, so the result
    is reproducible and independent of worker count (cap workers with the
    ``FELLER_THREADS`` environment variable, 0 = automatic).  With
    ``checkpoints`` given, only positions at those grid times are kept --
    absorption steps are still tracked on the full grid -- which keeps
    table-scale runs (1e4 paths x 2e4 steps) in a few megabytes.  Without
    checkpoints the full position matrix is returned; absurdly large
    requests are rejected rather than silently truncated.
    """
    p = cfg.process
    if checkpoints is None:
        if cfg.n_paths * cfg.n_steps > _MAX_FULL_VALUES:
            raise ValueError(
                f"full storage of {cfg.n_paths} x {cfg.n_steps} positions exceeds "
                f"{_MAX_FULL_VALUES} values; pass checkpoints to keep summaries only"
            )
        numba.set_num_threads(_thread_count())
        pos, absorbed = _ensemble_full_kernel(
            np.uint64(cfg.seed), cfg.n_paths, cfg.n_steps, p.sigma2, cfg.dt, p.x0
        )
        return PathEnsemble(cfg, cfg.times(), pos, absorbed)
    cp_idx = np.array(sorted(cfg.grid_index(t) for t in checkpoints), dtype=np.int64)
    if cp_idx.size == 0:
        raise ValueError("checkpoints must be non-empty")
    numba.set_num_threads(_thread_count())
    pos, absorbed = _ensemble_checkpoint_kernel(
        np.uint64(cfg.seed), cfg.n_paths, cfg.n_steps, p.sigma2, cfg.dt, p.x0, cp_idx
    )
    return PathEnsemble(cfg, cfg.t0 + cfg.dt * cp_idx.astype(float), pos, absorbed)


def euler_maruyama_path(stream: RandomStream, cfg: SimConfig, substeps: int) -> Path:
    """Discretized path from the Euler-Maruyama oracle.

    Each grid interval is split into ``substeps`` fine steps of the full
    truncation scheme; the path absorbs permanently on its first crossing
    below zero.  Biased at any finite ``substeps`` (unlike
    :func:`generate_path`) but converging, which is exactly what makes it
    an independent check.
    """
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    pos, absorbed = _em_path_kernel(
        stream.state, cfg.n_steps, substeps, cfg.process.sigma2, cfg.dt, cfg.process.x0
    )
    return Path(cfg.times(), pos, None if absorbed < 0 else int(absorbed))


def euler_maruyama_finals(cfg: SimConfig, substeps: int) -> np.ndarray:
    """Final-time positions of ``cfg.n_paths`` Euler-Maruyama paths, one
    per-path stream each; the batch equivalent of taking the last value
    of :func:`euler_maruyama_path` for indices ``0..n_paths-1``."""
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    numba.set_num_threads(_thread_count())
    return _em_finals_kernel(
        np.uint64(cfg.seed),
        cfg.n_paths,
        cfg.n_steps,
        substeps,
        cfg.process.sigma2,
        cfg.dt,
        cfg.process.x0,
    )
