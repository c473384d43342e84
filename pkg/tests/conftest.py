"""Shared fixtures: synthetic corpora and pipeline config scaffolding.

The synthetic corpus holds two vocabulary-disjoint topics. Topic A
("solar") grows 10% a month and its posts carry positive lexicon words;
topic B ("traffic") decays 10% a month with negative words. Everything is
seeded, so the same fixture bytes are produced on every run.
"""

from __future__ import annotations

import json
import random
import sys

import pytest

TOPIC_A_WORDS = [
    "solar", "panels", "desert", "energy", "electricity", "inverter",
    "station", "megawatt", "farm", "sunlight", "turbine", "storage",
]
TOPIC_B_WORDS = [
    "traffic", "congestion", "roadworks", "detour", "commute", "highway",
    "intersection", "gridlock", "potholes", "roundabout", "overpass", "lanes",
]
POSITIVE_WORDS = ["love", "great", "excellent", "amazing"]
NEGATIVE_WORDS = ["terrible", "awful", "hate", "bad"]


def synthetic_records(
    n_months: int = 36,
    start_year: int = 2021,
    grow_start: float = 3.0,
    decay_start: float = 40.0,
    seed: int = 7,
) -> list[dict]:
    """Post records for two disjoint topics with opposing volume trends."""
    rng = random.Random(seed)
    records: list[dict] = []
    pid = 0
    for m in range(n_months):
        year, mon = start_year + m // 12, m % 12 + 1
        plans = (
            ("a", max(1, round(grow_start * 1.1**m)), TOPIC_A_WORDS, POSITIVE_WORDS),
            ("b", max(1, round(decay_start * 0.9**m)), TOPIC_B_WORDS, NEGATIVE_WORDS),
        )
        for tag, count, vocab, moods in plans:
            for _ in range(count):
                words = vocab[:4] + rng.sample(vocab[4:], 3) + rng.sample(moods, 2)
                rng.shuffle(words)
                records.append(
                    {
                        "id": f"p{pid:05d}{tag}",
                        "platform": "x",
                        "timestamp": f"{year:04d}-{mon:02d}-{rng.randint(1, 28):02d}T12:00:00Z",
                        "text": " ".join(words),
                        "lang": "en",
                        "geo": "SA",
                        "hashtags": ["trend"],
                        "likes": rng.randint(3, 7),
                        "shares": rng.randint(1, 4),
                        "comments": rng.randint(0, 3),
                        "saves": rng.randint(0, 2),
                    }
                )
                pid += 1
    return records


def write_raw_input(path, records, *, dirty: bool = True) -> int:
    """Write records as JSONL; optionally mix in duplicates, irrelevant
    posts, and malformed lines (all deterministic). Returns line count."""
    lines = [json.dumps(record, sort_keys=True) for record in records]
    if dirty:
        foreign = dict(records[0])
        foreign.update(id="foreign0", geo="US", hashtags=[], text="unrelated chatter")
        lines.append(json.dumps(foreign, sort_keys=True))
        lines.append(json.dumps(dict(records[1]), sort_keys=True))  # duplicate id
        lines.append("{not json at all")
        lines.append(json.dumps({"id": "bad1", "platform": "x", "text": "no timestamp"}))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(lines)


def pipeline_config(
    input_path,
    out_dir,
    *,
    workers: int = 1,
    min_cluster_size: int = 15,
    dim: int = 256,
    horizon: int = 12,
    extra: dict | None = None,
) -> dict:
    config = {
        "input": str(input_path),
        "out_dir": str(out_dir),
        "workers": workers,
        "relevance": {"geo": ["SA"], "hashtags": ["trend"]},
        "buckets": ["2019-2020", "2021-2022", "2023-2024"],
        "embedding": {"dim": dim},
        "cluster": {"min_cluster_size": min_cluster_size},
        "forecast": {"horizon": horizon},
    }
    if extra:
        config.update(extra)
    return config


def write_config(path, config: dict) -> str:
    path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return str(path)


@pytest.fixture(scope="session")
def e2e_corpus_file(tmp_path_factory):
    """The full 36-month corpus (about 1200 posts), written once."""
    path = tmp_path_factory.mktemp("e2e") / "raw.jsonl"
    write_raw_input(path, synthetic_records())
    return path


@pytest.fixture(scope="session")
def small_corpus_file(tmp_path_factory):
    """A 10-month corpus (about 140 posts) for fast CLI and determinism runs."""
    path = tmp_path_factory.mktemp("small") / "raw.jsonl"
    write_raw_input(path, synthetic_records(n_months=10, grow_start=4.0, decay_start=12.0, seed=11))
    return path


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Repeat the acceptance criterion verdicts where capture cannot hide them."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "CRITERIA", None) if module else None
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(results):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{status} criterion {number} ({title}): {detail}")
