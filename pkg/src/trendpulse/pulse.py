"""Monthly pulse scoring: how hard a topic resonates, month by month.

For one topic in one calendar month, the pulse potential is

    PP = sum over that month's posts of S_i * E_i

where S_i is the post's sentiment value and E_i its engagement
(likes + shares + comments; saves deliberately excluded). A post assigned
to several topics contributes its full S*E to each of them, so monthly PP
is not additive across topics by design.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Post, month_range

__all__ = [
    "engagement",
    "pulse_potential",
    "MonthlyTrendPoint",
    "TrendSeries",
    "build_series",
]


def engagement(post: Post) -> int:
    """E_i = likes + shares + comments."""
    return post.likes + post.shares + post.comments


def pulse_potential(contributions: Iterable[tuple[float, float]]) -> float:
    """Sum of S*E over (sentiment value, engagement) pairs; empty -> 0.0."""
    total = 0.0
    for sentiment_value, engagement_value in contributions:
        total += sentiment_value * engagement_value
    return total


@dataclass(frozen=True)
class MonthlyTrendPoint:
    topic_id: int
    month: str  # YYYY-MM
    n_posts: int
    engagement_sum: int
    pp: float


@dataclass(frozen=True)
class TrendSeries:
    """One topic's month-by-month pulse, on a gap-free month grid."""

    topic_id: int
    points: tuple[MonthlyTrendPoint, ...]

    @property
    def months(self) -> tuple[str, ...]:
        return tuple(point.month for point in self.points)

    def pp_values(self) -> np.ndarray:
        return np.array([point.pp for point in self.points], dtype=np.float64)

    def volume_values(self) -> np.ndarray:
        return np.array([point.n_posts for point in self.points], dtype=np.float64)


def build_series(
    posts: Sequence[Post],
    assignments: Mapping[str, frozenset[int] | set[int]],
    sentiment_values: Mapping[str, float],
    topic_ids: Iterable[int],
    months: Sequence[str] | None = None,
) -> dict[int, TrendSeries]:
    """Aggregate per-(topic, month) pulse series over assigned posts.

    ``assignments`` maps post id to its topic ids (possibly empty);
    posts absent from it are skipped. Every assigned post must have a
    sentiment value or a ValueError names it. ``months`` fixes the grid;
    when None it spans min..max month over posts with a non-empty
    assignment. Months without posts zero-fill. Sums accumulate in post
    input order, so output is deterministic for a given corpus order.
    """
    active = [
        post
        for post in posts
        if post.id in assignments and assignments[post.id]
    ]
    for post in active:
        if post.id not in sentiment_values:
            raise ValueError(f"post {post.id!r} is assigned to a topic but has no sentiment")

    if months is None:
        if active:
            keys = sorted(post.month for post in active)
            months = month_range(keys[0], keys[-1])
        else:
            months = []
    month_index = {month: i for i, month in enumerate(months)}

    topic_list = sorted(set(int(t) for t in topic_ids))
    counts = {tid: [0] * len(months) for tid in topic_list}
    engagements = {tid: [0] * len(months) for tid in topic_list}
    pulses = {tid: [0.0] * len(months) for tid in topic_list}

    for post in active:
        slot = month_index.get(post.month)
        if slot is None:
            continue  # outside the requested grid
        e_i = engagement(post)
        s_i = sentiment_values[post.id]
        for tid in assignments[post.id]:
            if tid not in counts:
                raise ValueError(f"post {post.id!r} assigned to unknown topic {tid}")
            counts[tid][slot] += 1
            engagements[tid][slot] += e_i
            pulses[tid][slot] += s_i * e_i

    series: dict[int, TrendSeries] = {}
    for tid in topic_list:
        points = tuple(
            MonthlyTrendPoint(
                topic_id=tid,
                month=month,
                n_posts=counts[tid][i],
                engagement_sum=engagements[tid][i],
                pp=pulses[tid][i],
            )
            for i, month in enumerate(months)
        )
        series[tid] = TrendSeries(topic_id=tid, points=points)
    return series
