"""Topic trend detection over social-media posts.

End-to-end flow: ingest raw posts (:mod:`trendpulse.corpus`), prepare
Arabic-aware token streams (:mod:`trendpulse.textprep`), embed documents
(:mod:`trendpulse.embed`), density-cluster them (:mod:`trendpulse.cluster`),
describe topics with class-based TF-IDF (:mod:`trendpulse.topics`), score
polarity (:mod:`trendpulse.sentiment`), aggregate a monthly pulse series
(:mod:`trendpulse.pulse`), and extend it with an additive forecaster that
calls growing/diminishing/stable verdicts (:mod:`trendpulse.forecast`).
:mod:`trendpulse.cli` chains the stages behind one command.
"""

from .cluster import ClusterParams, cluster_distance_matrix, hdbscan_labels
from .corpus import Post, RelevanceConfig, TimeBucket, parse_post_record
from .embed import cosine_distance, embed_terms, pairwise_cosine_distances
from .forecast import ForecastParams, classify_trend, fit
from .pulse import TrendSeries, build_series, engagement, pulse_potential
from .sentiment import Lexicon, SentimentResult, default_lexicon, score_lexicon
from .textprep import TokenStream, normalize, sentiment_tokens, topic_stream
from .topics import TopicModel, assign_post, build_topic_model

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Post",
    "RelevanceConfig",
    "TimeBucket",
    "parse_post_record",
    "TokenStream",
    "normalize",
    "topic_stream",
    "sentiment_tokens",
    "embed_terms",
    "cosine_distance",
    "pairwise_cosine_distances",
    "ClusterParams",
    "hdbscan_labels",
    "cluster_distance_matrix",
    "TopicModel",
    "build_topic_model",
    "assign_post",
    "Lexicon",
    "SentimentResult",
    "default_lexicon",
    "score_lexicon",
    "engagement",
    "pulse_potential",
    "TrendSeries",
    "build_series",
    "ForecastParams",
    "fit",
    "classify_trend",
]
