"""Verdicts: normal-theory Z tests and empirical tail tests."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .abnormal_returns import CumulativeStat, ModelKind, mean_acar, std_acar
from .bootstrap import EmpiricalDistribution, percentile_of
from .errors import EventStudyError
from .timeseries import Offsets


class Direction(str, enum.Enum):
    POSITIVE = "Positive"
    NO_IMPACT = "NoImpact"
    NEGATIVE = "Negative"


# Row/column order of every cross-table.
DIRECTIONS = (Direction.POSITIVE, Direction.NO_IMPACT, Direction.NEGATIVE)


class Method(str, enum.Enum):
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"

    @classmethod
    def parse(cls, text: str) -> "Method":
        return cls(text.strip().upper())


ALL_METHODS = (Method.M1, Method.M2, Method.M3)


class DegenerateStatisticError(EventStudyError):
    """A test statistic would divide by a zero standard deviation."""


class DistributionMismatchError(EventStudyError):
    """An observed statistic was compared with a distribution of another shape."""


@dataclass(frozen=True)
class Verdict:
    """Outcome of one method on one event window.

    ``statistic`` is a Z value for M1 and a percentile in [0, 1] otherwise.
    """

    direction: Direction
    statistic: float
    method: Method
    window: Optional[Offsets] = None


@dataclass(frozen=True)
class TestConfig:
    __test__ = False

    z_critical: float = 1.282
    tail_fraction: float = 0.10

    def __post_init__(self):
        if not self.z_critical > 0:
            raise ValueError("z_critical must be positive")
        if not 0 < self.tail_fraction < 0.5:
            raise ValueError("tail_fraction must lie in (0, 0.5)")


def z_direction(z: float, z_critical: float) -> Direction:
    if z >= z_critical:
        return Direction.POSITIVE
    if z <= -z_critical:
        return Direction.NEGATIVE
    return Direction.NO_IMPACT


def method1_per_event(
    acar_value: float,
    window_length: int,
    estimation_residual_std: float,
    config: TestConfig = TestConfig(),
    window: Optional[Offsets] = None,
) -> Verdict:
    """Z test of one event's ACAR against its estimation-window noise.

    ``Z = acar / (sqrt(window_length) * residual_std)``; ``|Z| >= z_critical``
    rejects, with the sign of Z giving the direction.
    """
    if window_length < 1:
        raise ValueError("window_length must be at least 1")
    if not estimation_residual_std > 0:
        raise DegenerateStatisticError("estimation residual standard deviation is zero")
    z = acar_value / (math.sqrt(window_length) * estimation_residual_std)
    return Verdict(z_direction(z, config.z_critical), z, Method.M1, window)


def method1_aggregate(acar_values: Sequence[float]) -> float:
    """Cross-sectional Z of the mean ACAR over K events."""
    k = len(acar_values)
    if k < 2:
        raise DegenerateStatisticError(f"need at least 2 events, got {k}")
    sd = std_acar(acar_values)
    if sd == 0:
        raise DegenerateStatisticError("cross-sectional standard deviation is zero")
    return mean_acar(acar_values) / (sd / math.sqrt(k))


def empirical_verdict(
    dist: EmpiricalDistribution,
    observed_cumulative: Union[CumulativeStat, float],
    config: TestConfig = TestConfig(),
) -> Verdict:
    """Tail test of an observed cumulative return against a bootstrap distribution.

    Negative needs a negative observation at or below the ``tail_fraction``
    percentile; Positive needs a positive one at or above ``1 - tail_fraction``.
    Plain floats skip the window/mode consistency check.
    """
    window = None
    if isinstance(observed_cumulative, CumulativeStat):
        if observed_cumulative.n_days != dist.n_days:
            raise DistributionMismatchError(
                f"window {observed_cumulative.window} has {observed_cumulative.n_days} days, "
                f"distribution has {dist.n_days}"
            )
        if observed_cumulative.model_kind is not dist.combine_mode:
            raise DistributionMismatchError(
                f"{observed_cumulative.model_kind.value} statistic against "
                f"{dist.combine_mode.value} distribution"
            )
        window = observed_cumulative.window
        observed = observed_cumulative.value
    else:
        observed = float(observed_cumulative)

    p = percentile_of(dist, observed)
    f = config.tail_fraction
    if observed < 0 and p <= f:
        direction = Direction.NEGATIVE
    elif observed > 0 and p >= 1 - f:
        direction = Direction.POSITIVE
    else:
        direction = Direction.NO_IMPACT
    method = Method.M2 if dist.combine_mode is ModelKind.ADDITIVE else Method.M3
    return Verdict(direction, p, method, window)
