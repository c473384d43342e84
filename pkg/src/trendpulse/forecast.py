"""Additive monthly forecaster: piecewise-linear trend + Fourier seasonality.

The model is y(i) = g(t_i) + s(i) with t_i = i / (n - 1) over n observed
months. The trend g is linear with rate shifts at fixed changepoints,
written in hinge form so continuity is structural:

    g(t) = k * t + m + sum_j delta_j * max(0, t - s_j)

Seasonality uses Fourier pairs at the calendar frequency, sin/cos of
2 pi r i / seasonal_period, and turns itself off when the history is
shorter than two full periods. Fitting is ridge-regularized least squares
(penalty on rate shifts and seasonal coefficients, none on k and m),
solved through the normal equations with a Cholesky factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

__all__ = [
    "ForecastParams",
    "ForecastModel",
    "FitError",
    "ClassificationError",
    "TrendVerdict",
    "changepoint_indices",
    "fit",
    "fitted_values",
    "forecast",
    "trend_values",
    "seasonal_values",
    "classify_trend",
]

GROWTH_BAND = 0.10


class FitError(ValueError):
    """The series cannot support a fit (too short or non-finite)."""


class ClassificationError(ValueError):
    """The series cannot support a verdict (too short a base window)."""


@dataclass(frozen=True)
class ForecastParams:
    n_changepoints: int = 5
    changepoint_range: float = 0.8
    fourier_order: int = 3
    seasonal_period: int = 12
    ridge_delta: float = 1.0
    ridge_seasonal: float = 0.1
    horizon: int = 12

    def __post_init__(self) -> None:
        if self.n_changepoints < 0:
            raise ValueError("n_changepoints must be >= 0")
        if not 0.0 < self.changepoint_range <= 1.0:
            raise ValueError("changepoint_range must be in (0, 1]")
        if self.fourier_order < 0:
            raise ValueError("fourier_order must be >= 0")
        if self.seasonal_period < 2:
            raise ValueError("seasonal_period must be >= 2")
        if self.ridge_delta < 0 or self.ridge_seasonal < 0:
            raise ValueError("ridge penalties must be >= 0")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass(frozen=True, eq=False)
class ForecastModel:
    """Fitted coefficients; month index i maps to t = i / (n_history - 1)."""

    n_history: int
    k: float
    m: float
    changepoints: np.ndarray  # s_j in t units, strictly increasing
    deltas: np.ndarray
    seasonal_sin: np.ndarray
    seasonal_cos: np.ndarray
    fourier_order: int  # effective order; 0 means seasonality disabled
    seasonal_period: int

    @property
    def gammas(self) -> np.ndarray:
        """Offsets -s_j * delta_j of the segment-form trend; with these the
        piecewise trend is continuous at every changepoint."""
        return -self.changepoints * self.deltas


def changepoint_indices(n: int, params: ForecastParams) -> np.ndarray:
    """Candidate rate-shift positions: month indices evenly spread over the
    first ``changepoint_range`` of the history, excluding index 0."""
    if params.n_changepoints == 0 or n < 3:
        return np.array([], dtype=np.int64)
    last = math.floor(params.changepoint_range * (n - 1))
    if last < 1:
        return np.array([], dtype=np.int64)
    grid = np.linspace(0.0, float(last), params.n_changepoints + 1)
    indices = np.unique(np.round(grid).astype(np.int64))
    return indices[indices >= 1]


def _effective_order(n: int, params: ForecastParams) -> int:
    if params.fourier_order == 0 or n < 2 * params.seasonal_period:
        return 0
    return params.fourier_order


def _design(
    indices: np.ndarray,
    n_history: int,
    changepoints: np.ndarray,
    order: int,
    period: int,
) -> np.ndarray:
    t = indices / (n_history - 1)
    columns = [t]
    for s_j in changepoints:
        columns.append(np.maximum(0.0, t - s_j))
    for r in range(1, order + 1):
        angle = 2.0 * np.pi * r * indices / period
        columns.append(np.sin(angle))
        columns.append(np.cos(angle))
    columns.append(np.ones_like(t))
    return np.column_stack(columns)


def fit(values: Sequence[float], params: ForecastParams | None = None) -> ForecastModel:
    """Fit the additive model to one monthly series.

    Needs at least 3 finite values. The normal equations get a ridge
    diagonal on the rate shifts and seasonal coefficients only, so a
    clean line is recovered exactly (deltas ~ 0) and adding a constant
    to the series shifts predictions by exactly that constant.
    """
    params = params or ForecastParams()
    y = np.asarray(values, dtype=np.float64)
    if y.ndim != 1 or y.size < 3:
        raise FitError(f"need at least 3 observations, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise FitError("series contains non-finite values")

    n = y.size
    cp_index = changepoint_indices(n, params)
    cps = cp_index / (n - 1)
    order = _effective_order(n, params)
    design = _design(np.arange(n, dtype=np.float64), n, cps, order, params.seasonal_period)

    penalties = np.concatenate(
        [
            [0.0],  # k
            np.full(cps.size, params.ridge_delta),
            np.full(2 * order, params.ridge_seasonal),
            [0.0],  # m
        ]
    )
    gram = design.T @ design + np.diag(penalties)
    rhs = design.T @ y
    try:
        beta = cho_solve(cho_factor(gram), rhs)
    except np.linalg.LinAlgError:
        # Nearly singular gram matrix (pathological but possible with a
        # degenerate series); a tiny jitter keeps the solve honest.
        beta = cho_solve(cho_factor(gram + 1e-10 * np.eye(gram.shape[0])), rhs)

    pos = 1 + cps.size
    return ForecastModel(
        n_history=n,
        k=float(beta[0]),
        m=float(beta[-1]),
        changepoints=cps,
        deltas=beta[1:pos].copy(),
        seasonal_sin=beta[pos : pos + 2 * order : 2].copy(),
        seasonal_cos=beta[pos + 1 : pos + 2 * order : 2].copy(),
        fourier_order=order,
        seasonal_period=params.seasonal_period,
    )


def _predict_indices(model: ForecastModel, indices: np.ndarray) -> np.ndarray:
    return trend_values(model, indices) + seasonal_values(model, indices)


def trend_values(model: ForecastModel, indices: np.ndarray | Sequence[float]) -> np.ndarray:
    """Trend component g at (possibly fractional) month indices."""
    idx = np.asarray(indices, dtype=np.float64)
    t = idx / (model.n_history - 1)
    out = model.k * t + model.m
    for s_j, delta in zip(model.changepoints, model.deltas):
        out = out + delta * np.maximum(0.0, t - s_j)
    return out


def seasonal_values(model: ForecastModel, indices: np.ndarray | Sequence[float]) -> np.ndarray:
    """Seasonal component at month indices; zero when disabled."""
    idx = np.asarray(indices, dtype=np.float64)
    out = np.zeros_like(idx)
    for r in range(1, model.fourier_order + 1):
        angle = 2.0 * np.pi * r * idx / model.seasonal_period
        out = out + model.seasonal_sin[r - 1] * np.sin(angle)
        out = out + model.seasonal_cos[r - 1] * np.cos(angle)
    return out


def fitted_values(model: ForecastModel) -> np.ndarray:
    """In-sample predictions for months 0..n-1."""
    return _predict_indices(model, np.arange(model.n_history, dtype=np.float64))


def forecast(model: ForecastModel, horizon: int) -> np.ndarray:
    """Out-of-sample predictions for the ``horizon`` months after history."""
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    if horizon == 0:
        return np.array([], dtype=np.float64)
    start = model.n_history
    return _predict_indices(model, np.arange(start, start + horizon, dtype=np.float64))


@dataclass(frozen=True)
class TrendVerdict:
    """Growth call for one topic: forecast mean against recent-history mean."""

    verdict: str  # growing | diminishing | stable
    ratio: float
    base: float
    future: float


def classify_trend(
    observed: Sequence[float],
    model: ForecastModel,
    horizon: int,
    *,
    base_window: int = 6,
    band: float = GROWTH_BAND,
    eps: float = 1e-9,
) -> TrendVerdict:
    """Compare the forecast-mean to the mean of the last ``base_window``
    observations: growing when the ratio clears 1 + band, diminishing when
    it falls below 1 - band, stable in between.

    The ratio test is sign-safe: a negative series decaying toward zero
    has ratio < 1 and reads diminishing. A near-zero base (|base| < eps)
    falls back to comparing the forecast mean against +/- eps directly.
    """
    values = np.asarray(observed, dtype=np.float64)
    if values.size < base_window:
        raise ClassificationError(
            f"need at least {base_window} observed values, got {values.size}"
        )
    if horizon < 1:
        raise ClassificationError(f"horizon must be >= 1, got {horizon}")
    base = float(values[-base_window:].mean())
    future = float(forecast(model, horizon).mean())

    if abs(base) < eps:
        ratio = future / eps
        if future > eps:
            verdict = "growing"
        elif future < -eps:
            verdict = "diminishing"
        else:
            verdict = "stable"
        return TrendVerdict(verdict=verdict, ratio=ratio, base=base, future=future)

    ratio = future / base
    if ratio >= 1.0 + band:
        verdict = "growing"
    elif ratio <= 1.0 - band:
        verdict = "diminishing"
    else:
        verdict = "stable"
    return TrendVerdict(verdict=verdict, ratio=ratio, base=base, future=future)
