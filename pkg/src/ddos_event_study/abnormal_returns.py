"""Abnormal returns and their cumulation over event windows."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .market_model import AdditiveFit, MultiplicativeFit, predict_multiplicative
from .timeseries import AlignedReturns, Offsets, window_length


class ModelKind(str, enum.Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


@dataclass(frozen=True)
class AbnormalSeries:
    model_kind: ModelKind
    offsets: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        offsets = np.array(self.offsets, dtype=np.int64)
        values = np.array(self.values, dtype=np.float64)
        if offsets.shape != values.shape:
            raise ValueError("offsets and values differ in length")
        if offsets.size > 1 and not np.all(np.diff(offsets) > 0):
            raise ValueError("offsets must be strictly increasing")
        if self.model_kind is ModelKind.MULTIPLICATIVE and np.any(values <= -1):
            raise DomainError("multiplicative abnormal returns must exceed -1")
        offsets.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "values", values)

    @property
    def window(self) -> Offsets:
        return int(self.offsets[0]), int(self.offsets[-1])


@dataclass(frozen=True)
class CumulativeStat:
    """A cumulative abnormal return tagged with the window it covers."""

    window: Offsets
    value: float
    model_kind: ModelKind

    def __post_init__(self):
        if self.model_kind is ModelKind.MULTIPLICATIVE and not self.value > -1:
            raise DomainError("multiplicative cumulative return must exceed -1")

    @property
    def n_days(self) -> int:
        return window_length(self.window)


def aar(fit: AdditiveFit, stock_return, market_return):
    """Additive abnormal return: actual minus ``alpha + beta * market``."""
    return stock_return - (fit.alpha_hat + fit.beta_hat * market_return)


def ar_multiplicative(fit: MultiplicativeFit, stock_return, market_return):
    """Multiplicative abnormal return: actual gross over predicted gross, minus one."""
    return (1.0 + stock_return) / predict_multiplicative(fit, market_return) - 1.0


def acar(abnormals: Sequence[float]) -> float:
    """Sum of abnormal returns, accumulated left to right."""
    values = np.asarray(abnormals, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("acar of an empty sequence")
    total = 0.0
    for a in values.tolist():
        total += a
    return total


def car(abnormals: Sequence[float]) -> float:
    """Compounded abnormal return ``prod(1 + a) - 1``, accumulated left to right."""
    values = np.asarray(abnormals, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("car of an empty sequence")
    if np.any(values <= -1):
        raise DomainError("car: every abnormal return must exceed -1")
    gross = 1.0
    for a in values.tolist():
        gross *= 1.0 + a
    return gross - 1.0


def mean_acar(values: Sequence[float]) -> float:
    """Cross-sectional mean of cumulative abnormal returns over K events."""
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("mean_acar of an empty sequence")
    if np.all(arr == arr[0]):
        return float(arr[0])
    return math.fsum(arr.tolist()) / arr.size


def std_acar(values: Sequence[float]) -> float:
    """Cross-sectional standard deviation with a ``K - 1`` denominator.

    Returns exactly 0.0 when all values are identical.
    """
    arr = np.asarray(values, dtype=np.float64).ravel()
    k = arr.size
    if k < 2:
        raise ValueError(f"std_acar needs K >= 2 values, K-1 = {k - 1}")
    if np.all(arr == arr[0]):
        return 0.0
    dev = arr - mean_acar(arr)
    return math.sqrt(math.fsum((dev * dev).tolist()) / (k - 1))


def additive_abnormal_series(fit: AdditiveFit, window: AlignedReturns, first_offset: int) -> AbnormalSeries:
    values = aar(fit, window.stock, window.market)
    offsets = np.arange(first_offset, first_offset + len(window))
    return AbnormalSeries(ModelKind.ADDITIVE, offsets, values)


def multiplicative_abnormal_series(
    fit: MultiplicativeFit, window: AlignedReturns, first_offset: int
) -> AbnormalSeries:
    values = ar_multiplicative(fit, window.stock, window.market)
    offsets = np.arange(first_offset, first_offset + len(window))
    return AbnormalSeries(ModelKind.MULTIPLICATIVE, offsets, values)


def cumulate(series: AbnormalSeries) -> CumulativeStat:
    """ACAR for an additive series, CAR for a multiplicative one."""
    combine = acar if series.model_kind is ModelKind.ADDITIVE else car
    return CumulativeStat(series.window, combine(series.values), series.model_kind)
