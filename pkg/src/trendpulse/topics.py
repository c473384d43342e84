"""Topic descriptions over clustered documents via class-based TF-IDF.

Clusters come from :mod:`trendpulse.cluster`; this module turns each
cluster into a topic: pooled term counts, c-TF-IDF term weights, a label
from the top three terms, and a unit centroid for similarity queries.
Near-duplicate topics merge on centroid similarity; named topics can be
discarded (their posts drop out of downstream scoring).

The weight of term t in class c is tf(t, c) * ln(1 + A / f(t)) where
f(t) is the term's total count over all classes and A is the average
total term count per class.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .textprep import TokenStream

__all__ = [
    "Topic",
    "TopicModel",
    "class_term_frequencies",
    "ctfidf_weights",
    "top_terms",
    "build_topic_model",
    "assign_post",
]

logger = logging.getLogger(__name__)

_SIMILARITY_BAND = 0.05  # soft assignment keeps topics this close to the best
_LABEL_TERMS = 3


def class_term_frequencies(
    labels: Sequence[int], streams: Sequence[TokenStream]
) -> dict[int, Counter[str]]:
    """Pool term counts (unigrams + n-grams) per cluster; noise excluded."""
    if len(labels) != len(streams):
        raise ValueError(f"{len(labels)} labels vs {len(streams)} streams")
    freqs: dict[int, Counter[str]] = {}
    for label, stream in zip(labels, streams):
        if label < 0:
            continue
        freqs.setdefault(int(label), Counter()).update(stream.terms)
    return freqs


def ctfidf_weights(
    freqs: Mapping[int, Mapping[str, int]]
) -> dict[int, dict[str, float]]:
    """c-TF-IDF weights per class; requires at least one non-empty class."""
    if not freqs or all(sum(counts.values()) == 0 for counts in freqs.values()):
        raise ValueError("need at least one class with at least one term")
    totals = {cls: sum(counts.values()) for cls, counts in freqs.items()}
    average_total = sum(totals.values()) / len(totals)
    corpus_freq: Counter[str] = Counter()
    for counts in freqs.values():
        corpus_freq.update(counts)
    weights: dict[int, dict[str, float]] = {}
    for cls, counts in freqs.items():
        weights[cls] = {
            term: count * math.log(1.0 + average_total / corpus_freq[term])
            for term, count in counts.items()
        }
    return weights


def top_terms(weights: Mapping[str, float], k: int = 10) -> list[tuple[str, float]]:
    """Top-k terms by (descending weight, ascending term)."""
    ranked = sorted(weights.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]


def _label_from(ranked: Sequence[tuple[str, float]]) -> str:
    return "_".join(term for term, _ in ranked[:_LABEL_TERMS])


@dataclass(frozen=True)
class Topic:
    """One surviving topic: description plus similarity centroid."""

    id: int
    label: str
    top_terms: tuple[tuple[str, float], ...]
    centroid: np.ndarray
    member_count: int
    members: tuple[int, ...]  # document indices


@dataclass(frozen=True)
class TopicModel:
    topics: tuple[Topic, ...]
    cluster_to_topic: dict[int, int]  # original cluster label -> topic id
    assign_threshold: float = 0.3

    def topic_by_id(self, topic_id: int) -> Topic:
        return self.topics[topic_id]


class _Draft:
    """Mutable working state for one class during merge/discard."""

    __slots__ = ("source_labels", "members", "counts", "vector_sum")

    def __init__(self, label: int, members: list[int], counts: Counter[str], vector_sum: np.ndarray):
        self.source_labels = [label]
        self.members = members
        self.counts = counts
        self.vector_sum = vector_sum

    def centroid(self) -> np.ndarray:
        norm = float(np.linalg.norm(self.vector_sum))
        if norm == 0.0:
            return np.zeros_like(self.vector_sum)
        return self.vector_sum / norm

    def absorb(self, other: "_Draft") -> None:
        self.source_labels.extend(other.source_labels)
        self.members.extend(other.members)
        self.counts.update(other.counts)
        self.vector_sum = self.vector_sum + other.vector_sum


def _merge_drafts(drafts: dict[int, _Draft], threshold: float) -> dict[int, _Draft]:
    """Repeatedly merge the most similar centroid pair at or above threshold.

    Ties break on the smaller (i, j) id pair; the smaller id survives.
    """
    while len(drafts) > 1:
        ids = sorted(drafts)
        centroids = {i: drafts[i].centroid() for i in ids}
        best: tuple[float, int, int] | None = None
        for pos, i in enumerate(ids):
            for j in ids[pos + 1 :]:
                sim = float(np.dot(centroids[i], centroids[j]))
                if sim < threshold:
                    continue
                if best is None or sim > best[0] or (sim == best[0] and (i, j) < best[1:]):
                    best = (sim, i, j)
        if best is None:
            break
        _, keep, gone = best
        drafts[keep].absorb(drafts.pop(gone))
    return drafts


def build_topic_model(
    labels: Sequence[int],
    streams: Sequence[TokenStream],
    vectors: np.ndarray,
    *,
    top_k: int = 10,
    merge_threshold: float = 0.7,
    assign_threshold: float = 0.3,
    discard_labels: Iterable[str] = (),
) -> TopicModel:
    """Build topics from cluster labels: describe, merge, discard, renumber.

    ``discard_labels`` names topics (by their post-merge label string) to
    drop entirely; unknown names log a warning rather than failing.
    Surviving topics are renumbered by (descending member count,
    smallest member document index) and their weights recomputed over the
    surviving classes only.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    freqs = class_term_frequencies(labels, streams)
    drafts: dict[int, _Draft] = {}
    for cls in sorted(freqs):
        members = [idx for idx, label in enumerate(labels) if label == cls]
        vector_sum = vectors[members].sum(axis=0) if members else np.zeros(vectors.shape[1])
        drafts[cls] = _Draft(cls, members, Counter(freqs[cls]), vector_sum)

    if not drafts:
        return TopicModel(topics=(), cluster_to_topic={}, assign_threshold=assign_threshold)

    drafts = _merge_drafts(drafts, merge_threshold)

    # Labels for the discard match come from the merged (pre-discard) weights.
    merged_weights = ctfidf_weights({i: d.counts for i, d in drafts.items()})
    merged_labels = {i: _label_from(top_terms(merged_weights[i], top_k)) for i in drafts}

    wanted = set(discard_labels)
    matched = {name for name in wanted if name in merged_labels.values()}
    for name in sorted(wanted - matched):
        logger.warning("discard label %r matched no topic", name)
    survivors = {i: d for i, d in drafts.items() if merged_labels[i] not in wanted}

    if not survivors:
        return TopicModel(topics=(), cluster_to_topic={}, assign_threshold=assign_threshold)

    final_weights = ctfidf_weights({i: d.counts for i, d in survivors.items()})
    order = sorted(
        survivors,
        key=lambda i: (-len(survivors[i].members), min(survivors[i].members)),
    )
    topics: list[Topic] = []
    cluster_to_topic: dict[int, int] = {}
    for topic_id, draft_id in enumerate(order):
        draft = survivors[draft_id]
        ranked = tuple(top_terms(final_weights[draft_id], top_k))
        topics.append(
            Topic(
                id=topic_id,
                label=_label_from(ranked),
                top_terms=ranked,
                centroid=draft.centroid(),
                member_count=len(draft.members),
                members=tuple(sorted(draft.members)),
            )
        )
        for source in draft.source_labels:
            cluster_to_topic[source] = topic_id
    return TopicModel(
        topics=tuple(topics),
        cluster_to_topic=cluster_to_topic,
        assign_threshold=assign_threshold,
    )


def assign_post(model: TopicModel, cluster_label: int, vector: np.ndarray) -> frozenset[int]:
    """Topic ids for one post.

    Clustered posts map straight to their topic (empty set if the topic
    was discarded). Noise posts soft-assign to every topic whose centroid
    similarity clears the threshold AND sits within 0.05 of the best
    similarity; an empty set means the post stays unassigned.
    """
    if cluster_label >= 0:
        topic_id = model.cluster_to_topic.get(int(cluster_label))
        return frozenset() if topic_id is None else frozenset({topic_id})
    if not model.topics:
        return frozenset()
    vec = np.asarray(vector, dtype=np.float64)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return frozenset()
    unit = vec / norm
    sims = {topic.id: float(np.dot(unit, topic.centroid)) for topic in model.topics}
    best = max(sims.values())
    if best < model.assign_threshold:
        return frozenset()
    return frozenset(
        tid
        for tid, sim in sims.items()
        if sim >= model.assign_threshold and sim >= best - _SIMILARITY_BAND
    )
