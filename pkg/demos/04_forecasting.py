"""
Monthly pulse forecasting and trend verdicts
============================================

Builds a three-year synthetic pulse series with a slope change and an
annual cycle, fits the additive model, inspects its pieces, extends it
a year and classifies the trend.
"""

import numpy as np

from trendpulse.forecast import (
    ForecastParams,
    classify_trend,
    fit,
    fitted_values,
    forecast,
    seasonal_values,
    trend_values,
)

## A series that accelerates after month 18, with a mild annual swing
months = np.arange(36, dtype=float)
trend = np.where(months < 18, 40 + 1.0 * months, 58 + 3.0 * (months - 18))
season = 6.0 * np.sin(2 * np.pi * months / 12)
rng = np.random.default_rng(1)
series = trend + season + rng.normal(0, 1.5, 36)

## Fit: piecewise-linear trend plus Fourier seasonality, ridge-solved
params = ForecastParams(n_changepoints=5, fourier_order=3, seasonal_period=12)
model = fit(series, params)
print("base rate k:", round(model.k, 1), "| offset m:", round(model.m, 1))
print("changepoints (month):", [round(s * 35) for s in model.changepoints])
print("rate shifts:", np.round(model.deltas, 1).tolist())

## In-sample quality
resid = series - fitted_values(model)
print("\nin-sample RMSE:", round(float(np.sqrt((resid**2).mean())), 2))
print("R^2:", round(1 - float(resid.var() / series.var()), 4))

## The components can be read separately
idx = np.array([6.0, 17.0, 18.0, 30.0])
print("\ntrend at months", idx.astype(int).tolist(), "->", np.round(trend_values(model, idx), 1).tolist())
print("season at same months        ->", np.round(seasonal_values(model, idx), 1).tolist())

## Twelve months ahead, then the verdict
future = forecast(model, 12)
print("\nforecast months 36-47:", np.round(future, 1).tolist())
verdict = classify_trend(series, model, horizon=12)
print(
    f"verdict: {verdict.verdict} "
    f"(future mean {verdict.future:.1f} vs recent mean {verdict.base:.1f}, ratio {verdict.ratio:.2f})"
)

## A decaying series lands on the other side of the band
decay = 80.0 * 0.88**months
decay_model = fit(decay, params)
decay_verdict = classify_trend(decay, decay_model, horizon=12)
print(f"decaying series: {decay_verdict.verdict} (ratio {decay_verdict.ratio:.2f})")
