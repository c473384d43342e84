"""Raw post ingest: parsing, validation, dedup, relevance, calendar buckets.

Input is JSON Lines, one post object per line. Parsing is strict: a record
that fails validation is reported with its 1-based line number and never
silently patched. Timestamps must carry an explicit UTC offset and are
normalized to UTC on load.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Post",
    "RecordParseError",
    "RelevanceConfig",
    "TimeBucket",
    "DEFAULT_BUCKETS",
    "parse_post_record",
    "load_posts",
    "read_corpus_file",
    "write_corpus_file",
    "post_to_record",
    "dedupe_posts",
    "is_relevant",
    "filter_relevant",
    "monthly_key",
    "month_range",
    "add_months",
    "validate_buckets",
    "bucket_for",
]

_COUNTER_FIELDS = ("likes", "shares", "comments", "saves")
_HASHTAG_RE = re.compile(r"#(\w+)", re.UNICODE)


class RecordParseError(ValueError):
    """A malformed input record, tagged with its 1-based line number."""

    def __init__(self, line_no: int, reason: str) -> None:
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


@dataclass(frozen=True)
class Post:
    """One validated social-media post.

    ``timestamp`` is always timezone-aware UTC. Engagement counters are
    non-negative ints; ``saves`` is carried for completeness but excluded
    from engagement scoring (see :mod:`trendpulse.pulse`).
    """

    id: str
    platform: str
    timestamp: datetime
    text: str
    lang: str | None = None
    geo: str | None = None
    hashtags: frozenset[str] = frozenset()
    likes: int = 0
    shares: int = 0
    comments: int = 0
    saves: int = 0

    @property
    def month(self) -> str:
        return monthly_key(self.timestamp)


def _parse_timestamp(raw: object, line_no: int) -> datetime:
    if not isinstance(raw, str) or not raw.strip():
        raise RecordParseError(line_no, "timestamp must be an ISO-8601 string")
    text = raw.strip()
    # Python 3.10 fromisoformat rejects the military 'Z' suffix.
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        stamp = datetime.fromisoformat(text)
    except ValueError as exc:
        raise RecordParseError(line_no, f"bad timestamp {raw!r}: {exc}") from None
    if stamp.tzinfo is None:
        raise RecordParseError(line_no, f"timestamp {raw!r} has no UTC offset")
    return stamp.astimezone(timezone.utc)


def _parse_counter(record: Mapping[str, object], name: str, line_no: int) -> int:
    value = record.get(name, 0)
    if isinstance(value, bool) or not isinstance(value, int):
        raise RecordParseError(line_no, f"{name} must be an integer")
    if value < 0:
        raise RecordParseError(line_no, f"{name} must be >= 0, got {value}")
    return value


def _parse_hashtags(record: Mapping[str, object], line_no: int) -> frozenset[str]:
    value = record.get("hashtags")
    if value is None:
        return frozenset()
    if not isinstance(value, list) or any(not isinstance(tag, str) for tag in value):
        raise RecordParseError(line_no, "hashtags must be a list of strings")
    return frozenset(tag.lstrip("#").casefold() for tag in value if tag.lstrip("#"))


def parse_post_record(line: str, line_no: int = 1) -> Post:
    """Parse one JSONL line into a :class:`Post`.

    Raises :class:`RecordParseError` (carrying ``line_no``) on malformed
    JSON, a missing/empty required field, a bad timestamp, or a negative
    or non-integer engagement counter.
    """
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordParseError(line_no, f"invalid JSON: {exc.msg}") from None
    if not isinstance(record, dict):
        raise RecordParseError(line_no, "record must be a JSON object")

    def required_str(name: str, allow_empty: bool = False) -> str:
        value = record.get(name)
        if not isinstance(value, str) or (not allow_empty and not value.strip()):
            raise RecordParseError(line_no, f"missing or empty required field {name!r}")
        return value

    post_id = required_str("id")
    platform = required_str("platform")
    text = required_str("text", allow_empty=True)
    if "timestamp" not in record:
        raise RecordParseError(line_no, "missing or empty required field 'timestamp'")
    stamp = _parse_timestamp(record["timestamp"], line_no)

    optional: dict[str, str | None] = {}
    for name in ("lang", "geo"):
        value = record.get(name)
        if value is not None and not isinstance(value, str):
            raise RecordParseError(line_no, f"{name} must be a string when present")
        optional[name] = value

    counters = {name: _parse_counter(record, name, line_no) for name in _COUNTER_FIELDS}
    return Post(
        id=post_id,
        platform=platform,
        timestamp=stamp,
        text=text,
        lang=optional["lang"],
        geo=optional["geo"],
        hashtags=_parse_hashtags(record, line_no),
        **counters,
    )


def load_posts(lines: Iterable[str]) -> tuple[list[Post], list[RecordParseError]]:
    """Parse every line, splitting results into posts and per-line errors."""
    posts: list[Post] = []
    errors: list[RecordParseError] = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            errors.append(RecordParseError(line_no, "blank line"))
            continue
        try:
            posts.append(parse_post_record(line, line_no))
        except RecordParseError as exc:
            errors.append(exc)
    return posts, errors


def post_to_record(post: Post) -> dict[str, object]:
    """Back-convert a post to the canonical JSON record shape."""
    return {
        "id": post.id,
        "platform": post.platform,
        "timestamp": post.timestamp.astimezone(timezone.utc).isoformat(),
        "text": post.text,
        "lang": post.lang,
        "geo": post.geo,
        "hashtags": sorted(post.hashtags),
        "likes": post.likes,
        "shares": post.shares,
        "comments": post.comments,
        "saves": post.saves,
    }


def write_corpus_file(posts: Sequence[Post], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for post in posts:
            handle.write(json.dumps(post_to_record(post), ensure_ascii=False, sort_keys=True))
            handle.write("\n")


def read_corpus_file(path: str) -> tuple[list[Post], list[RecordParseError]]:
    with open(path, "r", encoding="utf-8") as handle:
        return load_posts(handle.read().splitlines())


def dedupe_posts(posts: Iterable[Post]) -> list[Post]:
    """Drop posts whose id was already seen; first occurrence wins."""
    seen: set[str] = set()
    kept: list[Post] = []
    for post in posts:
        if post.id in seen:
            continue
        seen.add(post.id)
        kept.append(post)
    return kept


@dataclass(frozen=True)
class RelevanceConfig:
    """Keep a post when its geo OR any hashtag matches a target set.

    Matching is case-insensitive on both sides. An empty config keeps
    everything (no filter configured).
    """

    target_geo: frozenset[str] = frozenset()
    target_hashtags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "target_geo", frozenset(g.casefold() for g in self.target_geo))
        object.__setattr__(
            self,
            "target_hashtags",
            frozenset(tag.lstrip("#").casefold() for tag in self.target_hashtags),
        )

    @property
    def empty(self) -> bool:
        return not self.target_geo and not self.target_hashtags


def _text_hashtags(text: str) -> set[str]:
    return {match.casefold() for match in _HASHTAG_RE.findall(text)}


def is_relevant(post: Post, config: RelevanceConfig) -> bool:
    if config.empty:
        return True
    if post.geo is not None and post.geo.casefold() in config.target_geo:
        return True
    tags = set(post.hashtags) | _text_hashtags(post.text)
    return bool(tags & config.target_hashtags)


def filter_relevant(posts: Iterable[Post], config: RelevanceConfig) -> list[Post]:
    return [post for post in posts if is_relevant(post, config)]


def monthly_key(stamp: datetime) -> str:
    """Calendar month key ``YYYY-MM`` of a UTC timestamp."""
    utc = stamp.astimezone(timezone.utc)
    return f"{utc.year:04d}-{utc.month:02d}"


def add_months(month: str, offset: int) -> str:
    """Shift a ``YYYY-MM`` key by ``offset`` months (offset may be negative)."""
    year, mon = (int(part) for part in month.split("-"))
    index = year * 12 + (mon - 1) + offset
    return f"{index // 12:04d}-{index % 12 + 1:02d}"


def month_range(first: str, last: str) -> list[str]:
    """Inclusive list of month keys from ``first`` through ``last``."""
    y0, m0 = (int(part) for part in first.split("-"))
    y1, m1 = (int(part) for part in last.split("-"))
    start, stop = y0 * 12 + m0 - 1, y1 * 12 + m1 - 1
    if stop < start:
        raise ValueError(f"month range {first}..{last} is reversed")
    return [f"{index // 12:04d}-{index % 12 + 1:02d}" for index in range(start, stop + 1)]


@dataclass(frozen=True)
class TimeBucket:
    """A labeled inclusive year span used for period reporting."""

    label: str
    start_year: int
    end_year: int

    def __post_init__(self) -> None:
        if self.end_year < self.start_year:
            raise ValueError(f"bucket {self.label!r}: end year before start year")

    def contains(self, stamp: datetime) -> bool:
        return self.start_year <= stamp.astimezone(timezone.utc).year <= self.end_year


# Default analysis periods; override per run via config or --buckets.
DEFAULT_BUCKETS: tuple[TimeBucket, ...] = (
    TimeBucket("2014-2017", 2014, 2017),
    TimeBucket("2018-2020", 2018, 2020),
    TimeBucket("2021-2022", 2021, 2022),
)


def validate_buckets(buckets: Sequence[TimeBucket]) -> tuple[TimeBucket, ...]:
    """Check buckets are non-overlapping; returns them sorted by start year."""
    ordered = sorted(buckets, key=lambda b: (b.start_year, b.end_year))
    for earlier, later in zip(ordered, ordered[1:]):
        if later.start_year <= earlier.end_year:
            raise ValueError(
                f"buckets {earlier.label!r} and {later.label!r} overlap"
            )
    return tuple(ordered)


def bucket_for(stamp: datetime, buckets: Sequence[TimeBucket]) -> str | None:
    """Label of the bucket containing ``stamp``, or None when out of range."""
    for bucket in buckets:
        if bucket.contains(stamp):
            return bucket.label
    return None
