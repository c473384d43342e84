"""Text preprocessing for Arabic-heavy social-media posts.

The full chain is strip_noise -> normalize -> tokenize -> remove_stopwords
-> stem, with n-grams built over the surviving token stream. normalize is
idempotent: applying it to its own output changes nothing. Two prepared
streams exist because sentiment needs negator tokens that the stopword
lists would otherwise delete:

* topic stream: stopwords removed, unigrams + n-grams
* sentiment stream: stopwords kept, unigrams only
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Sequence

__all__ = [
    "NormalizationConfig",
    "TokenStream",
    "default_config",
    "default_stopwords",
    "load_fold_table",
    "load_wordlist",
    "strip_noise",
    "normalize",
    "tokenize",
    "remove_stopwords",
    "stem_token",
    "stem",
    "ngrams",
    "topic_stream",
    "sentiment_tokens",
]

# Arabic harakat/tanween marks U+064B..U+065F plus tatweel are deleted
# outright during normalization.
_DELETE_TABLE: dict[int, None] = {cp: None for cp in range(0x064B, 0x0660)}
_DELETE_TABLE[0x0640] = None  # tatweel

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+", re.UNICODE)
_EMOJI_RE = re.compile(
    "["
    "\U0001f300-\U0001f5ff"  # misc symbols and pictographs
    "\U0001f600-\U0001f64f"  # emoticons
    "\U0001f680-\U0001f6ff"  # transport and map symbols
    "\U0001f900-\U0001f9ff"  # supplemental symbols and pictographs
    "\U0001f1e6-\U0001f1ff"  # regional indicator pairs (flags)
    "️"                 # variation selector 16
    "‍"                 # zero-width joiner
    "]"
)
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class NormalizationConfig:
    """Character folds plus noise-stripping switches.

    ``fold_table`` maps source strings (usually single codepoints) to
    replacements; replacements must be fixed points of normalize, which
    :func:`load_fold_table` and :func:`default_config` verify.
    """

    fold_table: Mapping[str, str]
    strip_urls: bool = True
    strip_mentions: bool = True
    strip_emoji: bool = True


def _apply_folds(text: str, table: Mapping[str, str]) -> str:
    multi = [src for src in table if len(src) > 1]
    for src in sorted(multi, key=lambda s: (-len(s), s)):
        text = text.replace(src, table[src])
    single = {ord(src): dst for src, dst in table.items() if len(src) == 1}
    return text.translate(single)


def _normalize_with_table(text: str, table: Mapping[str, str]) -> str:
    out = unicodedata.normalize("NFC", text)
    out = out.translate(_DELETE_TABLE)
    out = _apply_folds(out, table)
    out = out.lower()
    return unicodedata.normalize("NFC", out)


def _check_fold_targets(table: Mapping[str, str]) -> None:
    for src, dst in table.items():
        if not src:
            raise ValueError("fold table has an empty source")
        if _normalize_with_table(dst, table) != dst:
            raise ValueError(
                f"fold replacement {dst!r} (for {src!r}) is not normalization-stable"
            )


def load_fold_table(lines: Iterable[str]) -> dict[str, str]:
    """Parse ``source<TAB>replacement`` lines; '#' lines and blanks skipped."""
    table: dict[str, str] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0]:
            raise ValueError(f"fold table line {line_no}: expected source<TAB>replacement")
        table[parts[0]] = parts[1]
    _check_fold_targets(table)
    return table


def _package_text(name: str) -> str:
    return (resources.files("trendpulse") / "data" / name).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def default_config() -> NormalizationConfig:
    """Shipped configuration: Arabic alef/ya/ta-marbuta folds, all strips on."""
    table = load_fold_table(_package_text("arabic_folds.txt").splitlines())
    return NormalizationConfig(fold_table=table)


def strip_noise(text: str, config: NormalizationConfig | None = None) -> str:
    """Remove URLs, @mentions, and emoji, then collapse whitespace runs."""
    config = config or default_config()
    out = text
    if config.strip_urls:
        out = _URL_RE.sub(" ", out)
    if config.strip_mentions:
        out = _MENTION_RE.sub(" ", out)
    if config.strip_emoji:
        out = _EMOJI_RE.sub(" ", out)
    return _WS_RE.sub(" ", out).strip()


def normalize(text: str, config: NormalizationConfig | None = None) -> str:
    """Canonicalize text: NFC, drop Arabic diacritics and tatweel, fold
    alef variants to bare alef, alef maqsura to ya, ta marbuta to ha,
    lowercase. Idempotent by construction; a property test fuzzes this.
    """
    config = config or default_config()
    return _normalize_with_table(text, config.fold_table)


def tokenize(text: str) -> list[str]:
    """Split on whitespace and Unicode punctuation; empty tokens dropped."""
    tokens: list[str] = []
    current: list[str] = []
    for char in text:
        if char.isspace() or unicodedata.category(char).startswith("P"):
            if current:
                tokens.append("".join(current))
                current = []
        else:
            current.append(char)
    if current:
        tokens.append("".join(current))
    return tokens


def remove_stopwords(tokens: Iterable[str], stopwords: frozenset[str]) -> list[str]:
    return [token for token in tokens if token not in stopwords]


@lru_cache(maxsize=4)
def load_wordlist(name: str) -> frozenset[str]:
    """Load a packaged word list, normalizing entries with the default chain."""
    entries = (
        normalize(line.strip())
        for line in _package_text(name).splitlines()
        if line.strip()
    )
    return frozenset(entry for entry in entries if entry)


def default_stopwords() -> frozenset[str]:
    """Union of the shipped Arabic and English stopword lists."""
    return load_wordlist("stopwords_ar.txt") | load_wordlist("stopwords_en.txt")


def load_stopword_file(path: str, config: NormalizationConfig | None = None) -> frozenset[str]:
    """Load a custom stopword file (one entry per line), normalized."""
    with open(path, "r", encoding="utf-8") as handle:
        return frozenset(
            normalize(line.strip(), config)
            for line in handle
            if line.strip()
        )


# One prefix then one suffix, longest candidates first; never strip below
# two letters. Non-Arabic tokens pass through untouched.
_PREFIXES = ("وال", "فال", "بال", "كال", "لل", "ال", "و")
_SUFFIXES = ("ها", "ان", "ات", "ون", "ين", "يه", "ية", "ه", "ي")


def _has_arabic(token: str) -> bool:
    return any("؀" <= char <= "ۿ" for char in token)


def stem_token(token: str) -> str:
    """Light stemmer: strip at most one known prefix and one known suffix."""
    if not _has_arabic(token):
        return token
    for prefix in _PREFIXES:
        if token.startswith(prefix) and len(token) - len(prefix) >= 2:
            token = token[len(prefix):]
            break
    for suffix in _SUFFIXES:
        if token.endswith(suffix) and len(token) - len(suffix) >= 2:
            token = token[: -len(suffix)]
            break
    return token


def stem(tokens: Iterable[str]) -> list[str]:
    return [stem_token(token) for token in tokens]


def ngrams(tokens: Sequence[str], orders: Iterable[int] = (2, 3)) -> list[str]:
    """Contiguous n-grams joined with '_', grouped by ascending order."""
    out: list[str] = []
    for size in sorted(set(orders)):
        if size < 1:
            raise ValueError(f"n-gram order must be >= 1, got {size}")
        out.extend(
            "_".join(tokens[i : i + size]) for i in range(len(tokens) - size + 1)
        )
    return out


@dataclass(frozen=True)
class TokenStream:
    """Prepared tokens for one document: unigrams plus derived n-grams."""

    unigrams: tuple[str, ...]
    ngrams: tuple[str, ...] = ()

    @property
    def terms(self) -> tuple[str, ...]:
        return self.unigrams + self.ngrams


def topic_stream(
    text: str,
    *,
    config: NormalizationConfig | None = None,
    stopwords: frozenset[str] | None = None,
    ngram_orders: Iterable[int] = (2, 3),
) -> TokenStream:
    """Full chain for topic modeling: stopwords removed, n-grams included."""
    config = config or default_config()
    stopwords = default_stopwords() if stopwords is None else stopwords
    tokens = stem(remove_stopwords(tokenize(normalize(strip_noise(text, config), config)), stopwords))
    return TokenStream(unigrams=tuple(tokens), ngrams=tuple(ngrams(tokens, ngram_orders)))


def sentiment_tokens(text: str, config: NormalizationConfig | None = None) -> tuple[str, ...]:
    """Chain for polarity scoring: stopwords kept so negators survive."""
    config = config or default_config()
    return tuple(stem(tokenize(normalize(strip_noise(text, config), config))))
