"""Bootstrap distributions of n-day cumulative abnormal returns.

Each scenario draws ``n_days`` one-day abnormal returns uniformly, with
replacement, from a pool and combines them by summing (additive mode) or
compounding (multiplicative mode).

Random draws are counter based so a result never depends on how scenarios
are split across workers. Draw ``j`` of scenario ``s`` uses output number
``c = s * n_days + j`` of a SplitMix64 stream keyed by the seed::

    key   = mix64(seed)
    state = key + (c + 1) * 0x9E3779B97F4A7C15         (mod 2**64)
    index = ((mix64(state) >> 32) * len(pool)) >> 32

where ``mix64`` is the SplitMix64 output finalizer. :func:`draw_indices`
is a plain numpy implementation of the same mapping.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from .abnormal_returns import ModelKind
from .errors import DomainError

DEFAULT_SCENARIOS = 5_000_000

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_count: int = DEFAULT_SCENARIOS
    seed: int = 0
    combine_mode: ModelKind = ModelKind.ADDITIVE

    def __post_init__(self):
        if int(self.scenario_count) < 1:
            raise ValueError("scenario_count must be at least 1")
        if not 0 <= int(self.seed) <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "scenario_count", int(self.scenario_count))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "combine_mode", ModelKind(self.combine_mode))

    def with_mode(self, mode: ModelKind) -> "ScenarioConfig":
        return ScenarioConfig(self.scenario_count, self.seed, mode)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted bootstrap scenarios for one pool, horizon and combine mode."""

    values: np.ndarray
    n_days: int
    combine_mode: ModelKind
    seed: int
    scenario_count: int
    pool_fingerprint: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size != self.scenario_count:
            raise ValueError("values must hold exactly scenario_count scenarios")
        if values.size > 1 and np.any(values[1:] < values[:-1]):
            raise ValueError("values must be sorted ascending")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def mix64(x: int) -> int:
    """SplitMix64 output finalizer on a Python int."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK64
    return x ^ (x >> 31)


def stream_key(seed: int) -> int:
    return mix64(int(seed))


def pool_fingerprint(pool: np.ndarray) -> str:
    data = np.ascontiguousarray(pool, dtype="<f8").tobytes()
    return hashlib.sha256(data).hexdigest()[:16]


def draw_indices(seed: int, n_days: int, start: int, stop: int, pool_size: int) -> np.ndarray:
    """Pool indices drawn by scenarios ``start..stop-1``, shape ``(stop-start, n_days)``."""
    u64 = np.uint64
    counters = np.arange(start * n_days, stop * n_days, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = u64(stream_key(seed)) + (counters + u64(1)) * u64(_GAMMA)
        x = (x ^ (x >> u64(30))) * u64(_MIX1)
        x = (x ^ (x >> u64(27))) * u64(_MIX2)
        x = x ^ (x >> u64(31))
        idx = ((x >> u64(32)) * u64(pool_size)) >> u64(32)
    return idx.astype(np.intp).reshape(stop - start, n_days)


@numba.njit(nogil=True, cache=True)
def _scenario_kernel(pool, n_days, key, start, stop, multiplicative, out):
    m = np.uint64(pool.size)
    gamma = np.uint64(_GAMMA)
    mix1 = np.uint64(_MIX1)
    mix2 = np.uint64(_MIX2)
    s30 = np.uint64(30)
    s27 = np.uint64(27)
    s31 = np.uint64(31)
    s32 = np.uint64(32)
    n = np.uint64(n_days)
    for s in range(start, stop):
        c = np.uint64(s) * n
        acc = 1.0 if multiplicative else 0.0
        for j in range(n_days):
            x = key + (c + np.uint64(j) + np.uint64(1)) * gamma
            x = (x ^ (x >> s30)) * mix1
            x = (x ^ (x >> s27)) * mix2
            x = x ^ (x >> s31)
            a = pool[((x >> s32) * m) >> s32]
            if multiplicative:
                acc *= a
            else:
                acc += a
        out[s - start] = acc - 1.0 if multiplicative else acc


def _validate_pool(pool, mode: ModelKind) -> np.ndarray:
    arr = np.ascontiguousarray(pool, dtype=np.float64).ravel()
    if arr.size < 2:
        raise ValueError(f"bootstrap pool needs at least 2 values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("bootstrap pool contains non-finite values")
    if mode is ModelKind.MULTIPLICATIVE and np.any(arr <= -1):
        raise DomainError("multiplicative pool values must exceed -1")
    return arr


def scenario_values(pool: Sequence[float], n_days: int, config: ScenarioConfig, workers: int = 1) -> np.ndarray:
    """Unsorted scenario values, in scenario order."""
    mode = config.combine_mode
    arr = _validate_pool(pool, mode)
    if n_days < 1:
        raise ValueError("n_days must be at least 1")
    multiplicative = mode is ModelKind.MULTIPLICATIVE
    kernel_pool = 1.0 + arr if multiplicative else arr
    key = np.uint64(stream_key(config.seed))
    total = config.scenario_count
    out = np.empty(total, dtype=np.float64)

    workers = max(1, min(int(workers), total))
    bounds = np.linspace(0, total, workers + 1).astype(np.int64)

    def run(i: int) -> None:
        lo, hi = int(bounds[i]), int(bounds[i + 1])
        _scenario_kernel(kernel_pool, n_days, key, lo, hi, multiplicative, out[lo:hi])

    if workers == 1:
        run(0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(run, range(workers)))
    return out


def generate(pool: Sequence[float], n_days: int, config: ScenarioConfig, workers: int = 1) -> EmpiricalDistribution:
    """Bootstrap ``config.scenario_count`` n-day cumulative returns from ``pool``.

    Output is bit-identical for identical ``(pool, n_days, config)`` whatever
    the value of ``workers``.
    """
    values = scenario_values(pool, n_days, config, workers)
    values.sort()
    return EmpiricalDistribution(
        values=values,
        n_days=int(n_days),
        combine_mode=config.combine_mode,
        seed=config.seed,
        scenario_count=config.scenario_count,
        pool_fingerprint=pool_fingerprint(np.asarray(pool, dtype=np.float64)),
    )


def percentile_of(dist: EmpiricalDistribution, observed: float) -> float:
    """Mid-rank position of ``observed``: ``(#below + #equal / 2) / N``."""
    values = dist.values
    if values.size == 0:
        raise ValueError("empty distribution")
    below = int(np.searchsorted(values, observed, side="left"))
    not_above = int(np.searchsorted(values, observed, side="right"))
    return (below + 0.5 * (not_above - below)) / values.size
