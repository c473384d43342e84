"""Post polarity: a negation-aware lexicon scorer plus loaders.

The lexicon path scores normalized, stemmed tokens (stopwords kept, so
negators survive; see :func:`trendpulse.textprep.sentiment_tokens`) and
classifies on symmetric thresholds. Results from an external classifier
can be loaded per post id and override the lexicon downstream; those
carry a continuous score in [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .textprep import NormalizationConfig, normalize, stem, tokenize

__all__ = [
    "LABELS",
    "CLASS_VALUES",
    "SentimentResult",
    "Lexicon",
    "LexiconError",
    "SentimentLoadError",
    "load_lexicon",
    "default_lexicon",
    "score_lexicon",
    "load_precomputed",
    "numeric_for_pp",
]

LABELS = ("negative", "neutral", "positive")
CLASS_VALUES = {"positive": 1.0, "neutral": 0.0, "negative": -1.0}

POSITIVE_THRESHOLD = 0.05
NEGATIVE_THRESHOLD = -0.05


class LexiconError(ValueError):
    """A malformed lexicon line, tagged with its 1-based line number."""

    def __init__(self, line_no: int, reason: str) -> None:
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class SentimentLoadError(ValueError):
    """A malformed precomputed-sentiment row, tagged with its 1-based row."""

    def __init__(self, row_no: int, reason: str) -> None:
        super().__init__(f"row {row_no}: {reason}")
        self.row_no = row_no
        self.reason = reason


@dataclass(frozen=True)
class SentimentResult:
    """A post's polarity: continuous score plus three-class label.

    ``continuous`` marks scores from an external provider; the lexicon
    path produces ratio scores but is treated as three-class downstream.
    """

    score: float
    label: str
    continuous: bool = False

    def __post_init__(self) -> None:
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")


@dataclass(frozen=True)
class Lexicon:
    """Signed unigram polarity terms plus negator tokens (disjoint sets)."""

    polarity: Mapping[str, int]
    negators: frozenset[str]

    def __post_init__(self) -> None:
        overlap = set(self.polarity) & self.negators
        if overlap:
            raise ValueError(f"terms cannot be both polar and negators: {sorted(overlap)}")


def _canonical_term(raw: str, line_no: int, config: NormalizationConfig | None) -> str:
    """Entries pass through the same normalize/stem chain as post text."""
    tokens = stem(tokenize(normalize(raw, config)))
    if len(tokens) != 1:
        raise LexiconError(line_no, f"entry {raw!r} is not a single token after normalization")
    return tokens[0]


def parse_lexicon(lines: Iterable[str], config: NormalizationConfig | None = None) -> Lexicon:
    """Parse lexicon lines: ``term<TAB>+1|-1`` rows, then a ``[negators]``
    section with one token per line. '#' comments and blanks are skipped.
    Conflicting duplicate polarities are an error; agreeing ones collapse.
    """
    polarity: dict[str, int] = {}
    negators: set[str] = set()
    section = "polarity"
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower() == "[negators]":
            section = "negators"
            continue
        if section == "negators":
            negators.add(_canonical_term(line, line_no, config))
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(line_no, "expected term<TAB>polarity")
        term = _canonical_term(parts[0], line_no, config)
        value_text = parts[1].strip()
        if value_text in ("+1", "1"):
            value = 1
        elif value_text == "-1":
            value = -1
        else:
            raise LexiconError(line_no, f"polarity must be +1 or -1, got {value_text!r}")
        if term in polarity and polarity[term] != value:
            raise LexiconError(line_no, f"conflicting polarity for {term!r}")
        polarity[term] = value
    return Lexicon(polarity=polarity, negators=frozenset(negators))


def load_lexicon(path: str, config: NormalizationConfig | None = None) -> Lexicon:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_lexicon(handle, config)


def default_lexicon() -> Lexicon:
    text = (resources.files("trendpulse") / "data" / "lexicon_default.txt").read_text(
        encoding="utf-8"
    )
    return parse_lexicon(text.splitlines())


def score_lexicon(tokens: Sequence[str], lexicon: Lexicon) -> SentimentResult:
    """Mean signed polarity over tokens, with single-token negation flips.

    A negator flips the polarity of the immediately following token only;
    the flip is consumed whether or not that token is in the lexicon.
    score = (sum of signed hits) / max(1, len(tokens)).
    """
    total = 0
    negate = False
    for token in tokens:
        if token in lexicon.negators:
            negate = True
            continue
        value = lexicon.polarity.get(token)
        if value is not None:
            total += -value if negate else value
        negate = False
    score = total / max(1, len(tokens))
    if score > POSITIVE_THRESHOLD:
        label = "positive"
    elif score < NEGATIVE_THRESHOLD:
        label = "negative"
    else:
        label = "neutral"
    return SentimentResult(score=score, label=label, continuous=False)


def load_precomputed(path: str) -> dict[str, SentimentResult]:
    """Load ``id<TAB>label[<TAB>score]`` rows from an external classifier.

    Labels must be negative/neutral/positive; scores, when present, must
    be finite floats in [-1, 1]. A missing score falls back to the class
    value. Duplicate ids and malformed rows raise
    :class:`SentimentLoadError` naming the 1-based row.
    """
    out: dict[str, SentimentResult] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for row_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3) or not parts[0]:
                raise SentimentLoadError(row_no, "expected id<TAB>label[<TAB>score]")
            post_id, label = parts[0], parts[1].strip()
            if label not in LABELS:
                raise SentimentLoadError(row_no, f"unknown label {label!r}")
            if post_id in out:
                raise SentimentLoadError(row_no, f"duplicate id {post_id!r}")
            if len(parts) == 3:
                try:
                    score = float(parts[2])
                except ValueError:
                    raise SentimentLoadError(row_no, f"bad score {parts[2]!r}") from None
                if not -1.0 <= score <= 1.0:
                    raise SentimentLoadError(row_no, f"score {score} outside [-1, 1]")
            else:
                score = CLASS_VALUES[label]
            out[post_id] = SentimentResult(score=score, label=label, continuous=True)
    return out


def numeric_for_pp(result: SentimentResult, mode: str = "auto") -> float:
    """Sentiment value S fed into pulse scoring.

    ``auto`` uses the continuous score for external-provider results and
    the {+1, 0, -1} class value for lexicon results; ``class`` and
    ``continuous`` force one representation.
    """
    if mode == "auto":
        return result.score if result.continuous else CLASS_VALUES[result.label]
    if mode == "class":
        return CLASS_VALUES[result.label]
    if mode == "continuous":
        return result.score
    raise ValueError(f"unknown pp scale mode {mode!r}")
