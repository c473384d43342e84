"""
The full pipeline, end to end
=============================

Generates a raw JSONL corpus with one growing and one shrinking topic,
writes a pipeline config, runs all four stages through the CLI entry
point, and reads back the artifacts it produced.
"""

import json
import random
import tempfile
from pathlib import Path

from trendpulse.cli import main

## Synthesize 18 months of posts: solar chatter grows, traffic gripes fade
SOLAR = ["solar", "panels", "energy", "farm", "storage", "grid", "inverter"]
TRAFFIC = ["traffic", "congestion", "detour", "gridlock", "commute", "potholes", "roadworks"]
rng = random.Random(42)
records = []
for month in range(18):
    year, mon = 2023 + month // 12, month % 12 + 1
    plans = [
        (max(1, round(4 * 1.12**month)), SOLAR, ["love", "great"]),
        (max(1, round(30 * 0.88**month)), TRAFFIC, ["awful", "terrible"]),
    ]
    for count, vocab, moods in plans:
        for _ in range(count):
            words = vocab[:3] + rng.sample(vocab[3:], 3) + moods
            rng.shuffle(words)
            records.append(
                {
                    "id": f"post{len(records):05d}",
                    "platform": "x",
                    "timestamp": f"{year}-{mon:02d}-{rng.randint(1, 28):02d}T09:30:00Z",
                    "text": " ".join(words),
                    "geo": "SA",
                    "hashtags": ["city"],
                    "likes": rng.randint(2, 9),
                    "shares": rng.randint(0, 4),
                    "comments": rng.randint(0, 3),
                }
            )

work = Path(tempfile.mkdtemp(prefix="trendpulse_demo_"))
raw = work / "raw.jsonl"
raw.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
print("raw posts:", len(records), "->", raw)

## Pipeline configuration: relevance filter, clustering, horizon
config = {
    "input": str(raw),
    "out_dir": str(work / "out"),
    "relevance": {"geo": ["SA"], "hashtags": ["city"]},
    "buckets": ["2023-2023", "2024-2024"],
    "cluster": {"min_cluster_size": 10},
    "forecast": {"horizon": 6},
}
cfg_path = work / "pipeline.json"
cfg_path.write_text(json.dumps(config, indent=2), encoding="utf-8")

## One command chains ingest -> topics -> score -> forecast
code = main(["run", "--config", str(cfg_path)])
print("pipeline exit code:", code)

## Read back the artifacts
out = work / "out"
print("\nartifacts:")
for path in sorted(out.iterdir()):
    print("  ", path.name)

print("\ndiscovered topics:")
for line in (out / "topics.tsv").read_text(encoding="utf-8").splitlines()[1:]:
    tid, label, n_posts, terms = line.split("\t")
    print(f"  topic {tid} ({n_posts} posts): {label}")

print("\nverdicts:")
for line in (out / "verdicts.tsv").read_text(encoding="utf-8").splitlines()[1:]:
    tid, verdict, ratio = line.split("\t")
    print(f"  topic {tid}: {verdict} (ratio {float(ratio):.2f})")

print("\nlast observed + first forecast rows for topic 0:")
rows = [line.split("\t") for line in (out / "forecast.tsv").read_text().splitlines()[1:]]
topic0 = [row for row in rows if row[0] == "0"]
for row in topic0[16:20]:
    print("  ", "\t".join(row))
