"""
Topic discovery and sentiment scoring
=====================================

Hashes a handful of posts into vectors, clusters them, describes each
cluster with class-based TF-IDF terms, then scores post polarity with
the negation-aware lexicon.
"""

import numpy as np

from trendpulse.cluster import ClusterParams, cluster_distance_matrix
from trendpulse.embed import embed_terms, pairwise_cosine_distances
from trendpulse.sentiment import default_lexicon, score_lexicon
from trendpulse.textprep import sentiment_tokens, topic_stream
from trendpulse.topics import assign_post, build_topic_model

## A toy corpus: two themes, eight posts each.  Density clustering needs
## repeated vocabulary, so every post keeps its theme's anchor words.
solar_posts = [
    "the desert solar farm lifted its energy output to a record peak",
    "solar energy storage at the farm doubled ahead of summer",
    "cheap solar energy from the farm now feeds the evening grid",
    "engineers tuned the solar farm for steady energy flow all week",
    "the solar farm added panels and its energy yield keeps climbing",
    "night storage lets the solar farm sell energy after sunset",
    "the city buys most of its energy from the new solar farm",
    "cloudy days barely dent the solar farm energy numbers anymore",
]
traffic_posts = [
    "another morning traffic jam choked the ring road before eight",
    "the traffic jam on the coast road stretched past two hours",
    "a stalled truck turned the road into a solid traffic jam",
    "commuters sat in the traffic jam while the road crews dug",
    "every detour road ends in the same downtown traffic jam",
    "the bridge road traffic jam made the evening commute brutal",
    "rain and one closed road created a citywide traffic jam",
    "the old river road is a rolling traffic jam by noon",
]
texts = solar_posts + traffic_posts

## Token streams and hashed vectors.  Unigrams only: n-gram shingles are
## unique per sentence and would dilute cosine similarity on a corpus
## this small.
streams = [topic_stream(text, ngram_orders=()) for text in texts]
vectors = np.vstack([embed_terms(stream.terms, dim=128) for stream in streams])
print("vector block:", vectors.shape, "| unit norms:", np.allclose(np.linalg.norm(vectors, axis=1), 1.0))

## Cluster on cosine distances
result = cluster_distance_matrix(pairwise_cosine_distances(vectors), ClusterParams(min_cluster_size=4))
print("cluster labels:", result.labels.tolist())

## Class-based TF-IDF names each cluster by its most characteristic terms
model = build_topic_model(result.labels, streams, vectors)
for topic in model.topics:
    head = ", ".join(f"{term} ({weight:.2f})" for term, weight in topic.top_terms[:5])
    print(f"topic {topic.id} [{topic.member_count} posts] {topic.label}: {head}")

## A new post routes to the nearest topic centroid
fresh = "they are installing solar energy storage near the farm"
vector = embed_terms(topic_stream(fresh, ngram_orders=()).terms, dim=128)
print("\nassignment for fresh post:", sorted(assign_post(model, -1, vector)))

## Lexicon sentiment with negation handling
lexicon = default_lexicon()
for text in (
    "i love the new solar farm, great progress",
    "terrible commute, i hate this endless congestion",
    "the schedule is not great to be honest",
    "الملعب الجديد جميل ورائع",
):
    scored = score_lexicon(sentiment_tokens(text), lexicon)
    print(f"{scored.label:<8} {scored.score:+.3f}  {text}")
