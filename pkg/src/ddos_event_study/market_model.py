"""Additive and multiplicative market models fitted by simple OLS."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRegressorError, DomainError
from .timeseries import AlignedReturns


@dataclass(frozen=True)
class AdditiveFit:
    """``r_stock = alpha + beta * r_market + eps`` estimated over a window.

    ``residual_std`` uses an ``n_obs - 2`` denominator.
    """

    alpha_hat: float
    beta_hat: float
    residuals: np.ndarray
    residual_std: float
    n_obs: int


@dataclass(frozen=True)
class MultiplicativeFit:
    """``1 + r_stock = alpha * (1 + r_market) ** beta`` estimated in log space.

    ``alpha_hat`` is the ratio estimator, not ``exp(ln_alpha_hat)``: it
    makes the summed fitted gross returns equal the summed actual ones.
    ``residuals`` are multiplicative abnormal returns over the window and
    ``log_residuals`` are the residuals of the log-space regression.
    """

    ln_alpha_hat: float
    beta_hat: float
    alpha_hat: float
    residuals: np.ndarray
    log_residuals: np.ndarray
    n_obs: int


def _ols(x: np.ndarray, y: np.ndarray, what: str) -> tuple[float, float]:
    n = x.size
    if n < 3:
        raise ValueError(f"{what}: need at least 3 observations, got {n}")
    if np.all(x == x[0]):
        raise DegenerateRegressorError(f"{what}: regressor has zero variance")
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateRegressorError(f"{what}: regressor has zero variance")
    y_mean = y.mean()
    beta = float(dx @ (y - y_mean)) / sxx
    alpha = float(y_mean - beta * x.mean())
    return alpha, beta


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def fit_additive(window: AlignedReturns) -> AdditiveFit:
    """OLS of stock returns on market returns over ``window``."""
    x, y = window.market, window.stock
    alpha, beta = _ols(x, y, "additive fit")
    residuals = y - (alpha + beta * x)
    n = residuals.size
    residual_std = float(np.sqrt(residuals @ residuals / (n - 2)))
    return AdditiveFit(alpha, beta, _readonly(residuals), residual_std, n)


def fit_multiplicative(window: AlignedReturns) -> MultiplicativeFit:
    """Log-space OLS plus the ratio estimator of alpha over ``window``."""
    gross_stock = 1.0 + window.stock
    gross_market = 1.0 + window.market
    if np.any(gross_stock <= 0) or np.any(gross_market <= 0):
        raise DomainError("multiplicative fit: returns must exceed -1")
    ln_x = np.log(gross_market)
    ln_y = np.log(gross_stock)
    ln_alpha, beta = _ols(ln_x, ln_y, "multiplicative fit")
    log_residuals = ln_y - (ln_alpha + beta * ln_x)
    powered = gross_market**beta
    alpha = float(gross_stock.sum() / powered.sum())
    residuals = gross_stock / (alpha * powered) - 1.0
    return MultiplicativeFit(
        ln_alpha, beta, alpha, _readonly(residuals), _readonly(log_residuals), residuals.size
    )


def predict_additive(fit: AdditiveFit, market_return):
    """Expected stock return ``alpha + beta * market_return``."""
    return fit.alpha_hat + fit.beta_hat * market_return


def predict_multiplicative(fit: MultiplicativeFit, market_return):
    """Expected gross stock return ``alpha * (1 + market_return) ** beta``."""
    gross = 1.0 + np.asarray(market_return, dtype=np.float64)
    if np.any(gross <= 0):
        raise DomainError("market return must exceed -1")
    out = fit.alpha_hat * gross**fit.beta_hat
    return float(out) if out.ndim == 0 else out
