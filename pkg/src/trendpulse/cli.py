"""Command-line pipeline: ingest -> topics -> score -> forecast (or run).

Stages communicate through files in the output directory, so each stage
can run alone or chained via ``run``. Outputs are deterministic: rows are
written in fixed key order with 6-decimal floats, worker fan-out never
reorders results, and SVG plots carry no timestamps or random ids.

Exit codes: 0 success, 2 unreadable input, 3 malformed input data,
4 missing upstream stage output, 5 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import multiprocessing
import os
import re
import sys
from dataclasses import dataclass, replace
from functools import lru_cache, partial
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import cluster, corpus, embed, pulse, sentiment, textprep, topics
from . import forecast as forecast_mod

__all__ = [
    "EXIT_OK",
    "EXIT_IO",
    "EXIT_FORMAT",
    "EXIT_MISSING_STAGE",
    "EXIT_CONFIG",
    "ConfigError",
    "PipelineConfig",
    "load_config",
    "cmd_ingest",
    "cmd_topics",
    "cmd_score",
    "cmd_forecast",
    "cmd_run",
    "main",
    "entrypoint",
]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 2
EXIT_FORMAT = 3
EXIT_MISSING_STAGE = 4
EXIT_CONFIG = 5

CORPUS_FILE = "corpus.jsonl"
REJECTS_FILE = "rejects.tsv"
TOPICS_FILE = "topics.tsv"
ASSIGNMENTS_FILE = "assignments.tsv"
BUCKET_REPORT_FILE = "bucket_topic_counts.tsv"
TREE_FILE = "condensed_tree.txt"
SENTIMENT_FILE = "sentiment.tsv"
SENTIMENT_DIST_FILE = "sentiment_distribution.tsv"
SENTIMENT_PLOT_FILE = "sentiment_distribution.svg"
TOPIC_SENTIMENT_FILE = "topic_sentiment.tsv"
SERIES_FILE = "series.tsv"
FORECAST_FILE = "forecast.tsv"
VERDICTS_FILE = "verdicts.tsv"
TREND_PLOT_PATTERN = "trend_topic_{topic_id}.svg"

_BUCKET_RE = re.compile(r"^(\d{4})-(\d{4})$")


class ConfigError(ValueError):
    """Invalid pipeline configuration (maps to exit code 5)."""


@dataclass(frozen=True)
class PipelineConfig:
    input: str | None
    out_dir: str
    workers: int
    relevance: corpus.RelevanceConfig
    buckets: tuple[corpus.TimeBucket, ...]
    embedding_dim: int
    vectors_file: str | None
    cluster_params: cluster.ClusterParams
    merge_threshold: float
    assign_threshold: float
    top_k: int
    discard_labels: tuple[str, ...]
    lexicon_file: str | None
    precomputed_sentiment: str | None
    pp_scale: str
    forecast_params: forecast_mod.ForecastParams
    ngram_orders: tuple[int, ...]
    stopword_files: tuple[str, ...]
    dump_tree: bool
    series_mode: str


def _section(data: Mapping[str, object], name: str, allowed: Iterable[str]) -> dict:
    raw = data.get(name, {})
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be an object")
    unknown = set(raw) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    return dict(raw)


def _typed(section: Mapping[str, object], key: str, kind: type, default):
    value = section.get(key, default)
    if value is None:
        return None
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{key!r} must be {kind.__name__}, got {value!r}")
    return value


def parse_bucket_spec(spec: str) -> tuple[corpus.TimeBucket, ...]:
    """Parse a comma-separated list of YYYY-YYYY year spans."""
    labels = [part.strip() for part in spec.split(",") if part.strip()]
    if not labels:
        raise ConfigError("bucket spec is empty")
    out = []
    for label in labels:
        match = _BUCKET_RE.match(label)
        if not match:
            raise ConfigError(f"bad bucket {label!r}, expected YYYY-YYYY")
        try:
            out.append(corpus.TimeBucket(label, int(match.group(1)), int(match.group(2))))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    try:
        return corpus.validate_buckets(out)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


_TOP_KEYS = (
    "input",
    "out_dir",
    "workers",
    "relevance",
    "buckets",
    "embedding",
    "cluster",
    "topics",
    "sentiment",
    "forecast",
    "ngram_orders",
    "stopword_files",
    "dump_condensed_tree",
    "series",
)


def _build_config(data: Mapping[str, object]) -> PipelineConfig:
    unknown = set(data) - set(_TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    rel = _section(data, "relevance", ("geo", "hashtags"))
    geo = rel.get("geo", [])
    tags = rel.get("hashtags", [])
    if not isinstance(geo, list) or not isinstance(tags, list):
        raise ConfigError("relevance geo/hashtags must be lists of strings")
    relevance = corpus.RelevanceConfig(
        target_geo=frozenset(str(g) for g in geo),
        target_hashtags=frozenset(str(t) for t in tags),
    )

    raw_buckets = data.get("buckets")
    if raw_buckets is None:
        buckets = corpus.DEFAULT_BUCKETS
    elif isinstance(raw_buckets, list) and all(isinstance(b, str) for b in raw_buckets):
        buckets = parse_bucket_spec(",".join(raw_buckets))
    else:
        raise ConfigError("buckets must be a list of YYYY-YYYY strings")

    emb = _section(data, "embedding", ("dim", "vectors_file"))
    clu = _section(data, "cluster", ("min_cluster_size", "min_samples"))
    top = _section(
        data, "topics", ("merge_threshold", "assign_threshold", "top_k", "discard_labels")
    )
    sen = _section(data, "sentiment", ("lexicon_file", "precomputed_file", "pp_scale"))
    fca = _section(
        data,
        "forecast",
        (
            "n_changepoints",
            "changepoint_range",
            "fourier_order",
            "seasonal_period",
            "ridge_delta",
            "ridge_seasonal",
            "horizon",
        ),
    )

    try:
        cluster_params = cluster.ClusterParams(
            min_cluster_size=_typed(clu, "min_cluster_size", int, 10),
            min_samples=_typed(clu, "min_samples", int, None),
        )
        forecast_params = forecast_mod.ForecastParams(
            n_changepoints=_typed(fca, "n_changepoints", int, 5),
            changepoint_range=_typed(fca, "changepoint_range", float, 0.8),
            fourier_order=_typed(fca, "fourier_order", int, 3),
            seasonal_period=_typed(fca, "seasonal_period", int, 12),
            ridge_delta=_typed(fca, "ridge_delta", float, 1.0),
            ridge_seasonal=_typed(fca, "ridge_seasonal", float, 0.1),
            horizon=_typed(fca, "horizon", int, 12),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    discard = top.get("discard_labels", [])
    if not isinstance(discard, list) or any(not isinstance(d, str) for d in discard):
        raise ConfigError("discard_labels must be a list of strings")

    orders = data.get("ngram_orders", [2, 3])
    if (
        not isinstance(orders, list)
        or not orders
        or any(isinstance(o, bool) or not isinstance(o, int) or o < 1 for o in orders)
    ):
        raise ConfigError("ngram_orders must be a non-empty list of positive ints")

    stop_files = data.get("stopword_files", [])
    if not isinstance(stop_files, list) or any(not isinstance(s, str) for s in stop_files):
        raise ConfigError("stopword_files must be a list of paths")

    pp_scale = _typed(sen, "pp_scale", str, "auto")
    if pp_scale not in ("auto", "class", "continuous"):
        raise ConfigError(f"sentiment.pp_scale must be auto/class/continuous, got {pp_scale!r}")

    series_mode = _typed(data, "series", str, "pp")
    if series_mode not in ("pp", "volume"):
        raise ConfigError(f"series must be 'pp' or 'volume', got {series_mode!r}")

    workers = _typed(data, "workers", int, 1)
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")

    dim = _typed(emb, "dim", int, 256)
    if dim < 2:
        raise ConfigError(f"embedding.dim must be >= 2, got {dim}")

    merge_threshold = _typed(top, "merge_threshold", float, 0.7)
    assign_threshold = _typed(top, "assign_threshold", float, 0.3)
    top_k = _typed(top, "top_k", int, 10)
    if top_k < 1:
        raise ConfigError(f"topics.top_k must be >= 1, got {top_k}")

    config = PipelineConfig(
        input=_typed(data, "input", str, None),
        out_dir=_typed(data, "out_dir", str, "out"),
        workers=workers,
        relevance=relevance,
        buckets=buckets,
        embedding_dim=dim,
        vectors_file=_typed(emb, "vectors_file", str, None),
        cluster_params=cluster_params,
        merge_threshold=merge_threshold,
        assign_threshold=assign_threshold,
        top_k=top_k,
        discard_labels=tuple(discard),
        lexicon_file=_typed(sen, "lexicon_file", str, None),
        precomputed_sentiment=_typed(sen, "precomputed_file", str, None),
        pp_scale=pp_scale,
        forecast_params=forecast_params,
        ngram_orders=tuple(sorted(set(orders))),
        stopword_files=tuple(stop_files),
        dump_tree=bool(data.get("dump_condensed_tree", False)),
        series_mode=series_mode,
    )

    for label, path in (
        ("embedding.vectors_file", config.vectors_file),
        ("sentiment.lexicon_file", config.lexicon_file),
        ("sentiment.precomputed_file", config.precomputed_sentiment),
        *(("stopword_files entry", p) for p in config.stopword_files),
    ):
        if path is not None and not os.path.isfile(path):
            raise ConfigError(f"{label} points to a missing file: {path}")
    return config


def load_config(path: str) -> PipelineConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return _build_config(data)


# ---------------------------------------------------------------------------
# worker functions (top level so they pickle cleanly)


def _prepare_one(
    text: str,
    stopwords: frozenset[str],
    orders: tuple[int, ...],
    dim: int,
    hashed: bool,
) -> tuple[textprep.TokenStream, np.ndarray | None]:
    stream = textprep.topic_stream(text, stopwords=stopwords, ngram_orders=orders)
    vector = embed.embed_terms(stream.terms, dim) if hashed else None
    return stream, vector


def _score_one(text: str, lexicon: sentiment.Lexicon) -> sentiment.SentimentResult:
    return sentiment.score_lexicon(textprep.sentiment_tokens(text), lexicon)


def _map_parallel(func: Callable, items: Sequence, workers: int) -> list:
    """Order-preserving map, fanned out across processes when workers > 1."""
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    chunk = max(1, math.ceil(len(items) / (workers * 4)))
    with multiprocessing.Pool(processes=workers) as pool:
        return pool.map(func, items, chunksize=chunk)


# ---------------------------------------------------------------------------
# output helpers


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _write_tsv(path: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\t".join(header) + "\n")
        for row in rows:
            handle.write("\t".join(row) + "\n")


@lru_cache(maxsize=1)
def _plt():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "trendpulse"
    return plt


def _save_figure(fig, path: str) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    _plt().close(fig)


# ---------------------------------------------------------------------------
# stages


def _load_stage_corpus(cfg: PipelineConfig) -> tuple[list[corpus.Post] | None, int]:
    path = os.path.join(cfg.out_dir, CORPUS_FILE)
    if not os.path.isfile(path):
        logger.error("%s not found; run the ingest stage first", path)
        return None, EXIT_MISSING_STAGE
    posts, errors = corpus.read_corpus_file(path)
    if errors:
        logger.error("%s is corrupt: %s", path, errors[0])
        return None, EXIT_FORMAT
    if not posts:
        logger.error("%s holds no posts; nothing to analyze", path)
        return None, EXIT_MISSING_STAGE
    return posts, EXIT_OK


def cmd_ingest(cfg: PipelineConfig) -> int:
    """Parse, validate, dedupe, relevance-filter; write corpus + rejects."""
    if cfg.input is None:
        logger.error("config has no 'input' path; ingest needs one")
        return EXIT_CONFIG
    try:
        with open(cfg.input, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        logger.error("cannot read input %s: %s", cfg.input, exc)
        return EXIT_IO

    posts, errors = corpus.load_posts(lines)
    if lines and len(errors) > len(lines) / 2:
        logger.error(
            "%d of %d lines failed to parse; input does not look like post records",
            len(errors),
            len(lines),
        )
        return EXIT_FORMAT

    unique = corpus.dedupe_posts(posts)
    kept = corpus.filter_relevant(unique, cfg.relevance)
    os.makedirs(cfg.out_dir, exist_ok=True)
    corpus.write_corpus_file(kept, os.path.join(cfg.out_dir, CORPUS_FILE))
    _write_tsv(
        os.path.join(cfg.out_dir, REJECTS_FILE),
        ("line", "reason"),
        ((str(err.line_no), err.reason) for err in errors),
    )
    logger.info(
        "kept %d/%d records (%d parse failures, %d duplicates, %d irrelevant)",
        len(kept),
        len(lines),
        len(errors),
        len(posts) - len(unique),
        len(unique) - len(kept),
    )
    return EXIT_OK


def _post_vectors(
    cfg: PipelineConfig,
    posts: Sequence[corpus.Post],
    streams: Sequence[textprep.TokenStream],
    hashed: Sequence[np.ndarray | None],
) -> tuple[np.ndarray | None, int]:
    if cfg.vectors_file is None:
        return np.vstack([vec for vec in hashed]), EXIT_OK
    try:
        table = embed.load_vectors(cfg.vectors_file, expected_dim=None)
    except embed.VectorLoadError as exc:
        logger.error("bad vectors file %s: %s", cfg.vectors_file, exc)
        return None, EXIT_FORMAT
    missing = [post.id for post in posts if post.id not in table]
    if missing:
        logger.error(
            "vectors file %s lacks %d post ids (first: %s)",
            cfg.vectors_file,
            len(missing),
            missing[0],
        )
        return None, EXIT_FORMAT
    return np.vstack([table[post.id] for post in posts]), EXIT_OK


def _stopwords(cfg: PipelineConfig) -> frozenset[str]:
    if not cfg.stopword_files:
        return textprep.default_stopwords()
    out: frozenset[str] = frozenset()
    for path in cfg.stopword_files:
        out |= textprep.load_stopword_file(path)
    return out


def cmd_topics(cfg: PipelineConfig) -> int:
    """Embed, cluster, describe, and assign every post to topics."""
    posts, code = _load_stage_corpus(cfg)
    if posts is None:
        return code

    prepare = partial(
        _prepare_one,
        stopwords=_stopwords(cfg),
        orders=cfg.ngram_orders,
        dim=cfg.embedding_dim,
        hashed=cfg.vectors_file is None,
    )
    prepared = _map_parallel(prepare, [post.text for post in posts], cfg.workers)
    streams = [stream for stream, _ in prepared]
    vectors, code = _post_vectors(cfg, posts, streams, [vec for _, vec in prepared])
    if vectors is None:
        return code

    distances = embed.pairwise_cosine_distances(vectors)
    result = cluster.cluster_distance_matrix(distances, cfg.cluster_params)
    noise = int(np.sum(result.labels < 0))
    model = topics.build_topic_model(
        result.labels,
        streams,
        vectors,
        top_k=cfg.top_k,
        merge_threshold=cfg.merge_threshold,
        assign_threshold=cfg.assign_threshold,
        discard_labels=cfg.discard_labels,
    )
    logger.info(
        "%d posts -> %d clusters (%d noise) -> %d topics",
        len(posts),
        result.n_clusters,
        noise,
        len(model.topics),
    )

    assigned = {
        post.id: topics.assign_post(model, int(result.labels[i]), vectors[i])
        for i, post in enumerate(posts)
    }

    _write_tsv(
        os.path.join(cfg.out_dir, TOPICS_FILE),
        ("topic_id", "label", "n_posts", "top_terms"),
        (
            (
                str(topic.id),
                topic.label,
                str(topic.member_count),
                ",".join(f"{term}:{_fmt(weight)}" for term, weight in topic.top_terms),
            )
            for topic in model.topics
        ),
    )
    _write_tsv(
        os.path.join(cfg.out_dir, ASSIGNMENTS_FILE),
        ("post_id", "topic_ids"),
        ((post.id, ",".join(str(t) for t in sorted(assigned[post.id]))) for post in posts),
    )

    bucket_rows: list[tuple[str, str, str]] = []
    labels_order = [bucket.label for bucket in cfg.buckets] + ["outside"]
    counts = {label: {topic.id: 0 for topic in model.topics} for label in labels_order}
    for post in posts:
        slot = corpus.bucket_for(post.timestamp, cfg.buckets) or "outside"
        for tid in assigned[post.id]:
            counts[slot][tid] += 1
    for label in labels_order:
        for topic in model.topics:
            bucket_rows.append((label, str(topic.id), str(counts[label][topic.id])))
    _write_tsv(
        os.path.join(cfg.out_dir, BUCKET_REPORT_FILE),
        ("bucket", "topic_id", "n_posts"),
        bucket_rows,
    )

    if cfg.dump_tree:
        with open(os.path.join(cfg.out_dir, TREE_FILE), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(cluster.dump_condensed_tree(result.tree))
    return EXIT_OK


def _read_assignments(path: str) -> dict[str, frozenset[int]]:
    out: dict[str, frozenset[int]] = {}
    with open(path, "r", encoding="utf-8") as handle:
        next(handle, None)  # header
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            post_id, _, ids = line.partition("\t")
            out[post_id] = frozenset(int(part) for part in ids.split(",") if part)
    return out


def _read_topic_labels(path: str) -> dict[int, str]:
    out: dict[int, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        next(handle, None)
        for line in handle:
            parts = line.rstrip("\n").split("\t")
            if len(parts) >= 2:
                out[int(parts[0])] = parts[1]
    return out


def cmd_score(cfg: PipelineConfig) -> int:
    """Sentiment per post, distribution reports, and the monthly pulse series."""
    posts, code = _load_stage_corpus(cfg)
    if posts is None:
        return code
    for name in (ASSIGNMENTS_FILE, TOPICS_FILE):
        if not os.path.isfile(os.path.join(cfg.out_dir, name)):
            logger.error("%s not found; run the topics stage first", name)
            return EXIT_MISSING_STAGE
    assignments = _read_assignments(os.path.join(cfg.out_dir, ASSIGNMENTS_FILE))
    topic_labels = _read_topic_labels(os.path.join(cfg.out_dir, TOPICS_FILE))

    overrides: dict[str, sentiment.SentimentResult] = {}
    if cfg.precomputed_sentiment is not None:
        try:
            overrides = sentiment.load_precomputed(cfg.precomputed_sentiment)
        except sentiment.SentimentLoadError as exc:
            logger.error("bad precomputed sentiment %s: %s", cfg.precomputed_sentiment, exc)
            return EXIT_FORMAT
    try:
        lex = (
            sentiment.load_lexicon(cfg.lexicon_file)
            if cfg.lexicon_file is not None
            else sentiment.default_lexicon()
        )
    except sentiment.LexiconError as exc:
        logger.error("bad lexicon %s: %s", cfg.lexicon_file, exc)
        return EXIT_FORMAT

    to_score = [post for post in posts if post.id not in overrides]
    scored = _map_parallel(partial(_score_one, lexicon=lex), [p.text for p in to_score], cfg.workers)
    results: dict[str, sentiment.SentimentResult] = {
        post.id: result for post, result in zip(to_score, scored)
    }
    used_overrides = 0
    for post in posts:
        if post.id in overrides:
            results[post.id] = overrides[post.id]
            used_overrides += 1
    if overrides:
        logger.info("precomputed sentiment overrides %d/%d posts", used_overrides, len(posts))

    _write_tsv(
        os.path.join(cfg.out_dir, SENTIMENT_FILE),
        ("post_id", "label", "score", "source"),
        (
            (
                post.id,
                results[post.id].label,
                _fmt(results[post.id].score),
                "precomputed" if post.id in overrides else "lexicon",
            )
            for post in posts
        ),
    )

    dist = {label: 0 for label in sentiment.LABELS}
    for post in posts:
        dist[results[post.id].label] += 1
    total = len(posts)
    _write_tsv(
        os.path.join(cfg.out_dir, SENTIMENT_DIST_FILE),
        ("label", "n_posts", "share"),
        ((label, str(dist[label]), _fmt(dist[label] / total)) for label in sentiment.LABELS),
    )
    _plot_sentiment(os.path.join(cfg.out_dir, SENTIMENT_PLOT_FILE), dist, total)

    values = {post.id: sentiment.numeric_for_pp(results[post.id], cfg.pp_scale) for post in posts}
    series = pulse.build_series(posts, assignments, values, topic_labels.keys())
    _write_tsv(
        os.path.join(cfg.out_dir, SERIES_FILE),
        ("topic_id", "topic_label", "month", "n_posts", "engagement_sum", "pp"),
        (
            (
                str(tid),
                topic_labels[tid],
                point.month,
                str(point.n_posts),
                str(point.engagement_sum),
                _fmt(point.pp),
            )
            for tid in sorted(series)
            for point in series[tid].points
        ),
    )

    topic_rows = []
    for tid in sorted(topic_labels):
        members = [post for post in posts if tid in assignments.get(post.id, frozenset())]
        tally = {label: 0 for label in sentiment.LABELS}
        for post in members:
            tally[results[post.id].label] += 1
        count = len(members)
        topic_rows.append(
            (
                str(tid),
                topic_labels[tid],
                str(count),
                str(sum(pulse.engagement(post) for post in members)),
                _fmt(tally["positive"] / count if count else 0.0),
                _fmt(tally["neutral"] / count if count else 0.0),
                _fmt(tally["negative"] / count if count else 0.0),
            )
        )
    _write_tsv(
        os.path.join(cfg.out_dir, TOPIC_SENTIMENT_FILE),
        (
            "topic_id",
            "topic_label",
            "n_posts",
            "engagement_sum",
            "share_positive",
            "share_neutral",
            "share_negative",
        ),
        topic_rows,
    )
    return EXIT_OK


def _plot_sentiment(path: str, dist: Mapping[str, int], total: int) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    labels = list(sentiment.LABELS)
    shares = [dist[label] / total if total else 0.0 for label in labels]
    ax.bar(labels, shares)
    ax.set_ylabel("share of posts")
    ax.set_title("sentiment distribution")
    fig.tight_layout()
    _save_figure(fig, path)


def _read_series(path: str) -> dict[int, list[tuple[str, int, float]]]:
    out: dict[int, list[tuple[str, int, float]]] = {}
    with open(path, "r", encoding="utf-8") as handle:
        next(handle, None)
        for line in handle:
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 6:
                continue
            tid = int(parts[0])
            out.setdefault(tid, []).append((parts[2], int(parts[3]), float(parts[5])))
    return out


def _plot_trend(path: str, topic_id: int, observed: np.ndarray, predicted: np.ndarray, ylabel: str) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(8, 4))
    n = observed.size
    ax.plot(np.arange(n), observed, "-", label="observed")
    if predicted.size:
        ax.plot(np.arange(n, n + predicted.size), predicted, ":", label="forecast")
    ax.set_xlabel("month index")
    ax.set_ylabel(ylabel)
    ax.set_title(f"topic {topic_id}")
    ax.legend()
    fig.tight_layout()
    _save_figure(fig, path)


def cmd_forecast(cfg: PipelineConfig) -> int:
    """Fit each topic's series, extend it, and call the trend verdict."""
    series_path = os.path.join(cfg.out_dir, SERIES_FILE)
    if not os.path.isfile(series_path):
        logger.error("%s not found; run the score stage first", series_path)
        return EXIT_MISSING_STAGE
    series = _read_series(series_path)
    horizon = cfg.forecast_params.horizon
    ylabel = "pulse potential" if cfg.series_mode == "pp" else "post volume"

    forecast_rows: list[tuple[str, str, str, str]] = []
    verdict_rows: list[tuple[str, str, str]] = []
    for tid in sorted(series):
        months = [month for month, _, _ in series[tid]]
        volumes = np.array([count for _, count, _ in series[tid]], dtype=np.float64)
        pps = np.array([value for _, _, value in series[tid]], dtype=np.float64)
        values = pps if cfg.series_mode == "pp" else volumes
        for month, value in zip(months, values):
            forecast_rows.append((str(tid), month, "observed", _fmt(value)))
        try:
            model = forecast_mod.fit(values, cfg.forecast_params)
        except forecast_mod.FitError as exc:
            logger.warning("topic %d: skipping forecast (%s)", tid, exc)
            continue
        predicted = forecast_mod.forecast(model, horizon)
        for step, value in enumerate(predicted, start=1):
            forecast_rows.append(
                (str(tid), corpus.add_months(months[-1], step), "forecast", _fmt(value))
            )
        try:
            verdict = forecast_mod.classify_trend(values, model, horizon)
            verdict_rows.append((str(tid), verdict.verdict, _fmt(verdict.ratio)))
        except forecast_mod.ClassificationError as exc:
            logger.warning("topic %d: skipping verdict (%s)", tid, exc)
        _plot_trend(
            os.path.join(cfg.out_dir, TREND_PLOT_PATTERN.format(topic_id=tid)),
            tid,
            values,
            predicted,
            ylabel,
        )

    _write_tsv(
        os.path.join(cfg.out_dir, FORECAST_FILE),
        ("topic_id", "month", "kind", "value"),
        forecast_rows,
    )
    _write_tsv(os.path.join(cfg.out_dir, VERDICTS_FILE), ("topic_id", "verdict", "ratio"), verdict_rows)
    logger.info("forecast %d topics over %d months", len(series), horizon)
    return EXIT_OK


def cmd_run(cfg: PipelineConfig) -> int:
    """All four stages in order, stopping at the first failure."""
    for stage in (cmd_ingest, cmd_topics, cmd_score, cmd_forecast):
        code = stage(cfg)
        if code != EXIT_OK:
            return code
    return EXIT_OK


_COMMANDS: dict[str, Callable[[PipelineConfig], int]] = {
    "ingest": cmd_ingest,
    "topics": cmd_topics,
    "score": cmd_score,
    "forecast": cmd_forecast,
    "run": cmd_run,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trendpulse",
        description="Topic trend detection over social-media posts",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "ingest": "parse, validate, and filter raw posts",
        "topics": "embed, cluster, and describe topics",
        "score": "sentiment and monthly pulse series",
        "forecast": "extend each topic series and call verdicts",
        "run": "all stages in order",
    }
    for name, text in helps.items():
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", required=True, help="JSON pipeline configuration")
        cmd.add_argument("--out", help="output directory (overrides config out_dir)")
        cmd.add_argument("--workers", type=int, help="parallel worker processes")
        cmd.add_argument("--buckets", help="comma-separated YYYY-YYYY period buckets")
        cmd.add_argument(
            "--forecast-horizon", type=int, dest="forecast_horizon", help="months to forecast"
        )
        cmd.add_argument("--series", choices=("pp", "volume"), help="series to forecast")
    return parser


def _apply_overrides(cfg: PipelineConfig, args: argparse.Namespace) -> PipelineConfig:
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {args.workers}")
        cfg = replace(cfg, workers=args.workers)
    if args.buckets is not None:
        cfg = replace(cfg, buckets=parse_bucket_spec(args.buckets))
    if args.forecast_horizon is not None:
        try:
            cfg = replace(
                cfg,
                forecast_params=replace(cfg.forecast_params, horizon=args.forecast_horizon),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if args.series is not None:
        cfg = replace(cfg, series_mode=args.series)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    if not logging.getLogger().handlers:
        logging.basicConfig(
            level=logging.INFO,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except ConfigError as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG
    os.makedirs(cfg.out_dir, exist_ok=True)
    return _COMMANDS[args.command](cfg)


def entrypoint() -> None:
    sys.exit(main())
