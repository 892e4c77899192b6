"""Tweet ingestion, deterministic preprocessing, and the synthetic fixture generator."""

from __future__ import annotations

import json
import math
import random
import unicodedata
from dataclasses import dataclass

from .stopwords import DEFAULT_STOPWORDS


class CorpusFormatError(ValueError):
    """Raised on malformed input files or invariant violations during load."""


@dataclass(frozen=True)
class RawTweet:
    id: str
    text: str
    created_at: str | None = None


@dataclass(frozen=True)
class ProcessedTweet:
    id: str
    tokens: tuple[str, ...]


@dataclass
class Corpus:
    tweets: list[ProcessedTweet]
    vocabulary: dict[str, int]  # token -> number of tweets containing it


@dataclass
class PreprocessConfig:
    stopwords: frozenset = DEFAULT_STOPWORDS
    lemma_map: dict[str, str] | None = None  # applied after lowercasing
    drop_retweets: bool = False  # drop raw tweets whose text starts with "RT "


@dataclass
class Stats:
    tweet_count: int
    unique_tokens: int
    mean_tokens: float
    std_tokens: float


def load_corpus(path) -> list[RawTweet]:
    """Load raw tweets from a JSONL file: one object per line with `id` and `text`.

    Extra keys are ignored; `created_at` is kept when present. Order preserved.
    """
    tweets = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise CorpusFormatError(f"line {lineno}: object must have 'id' and 'text'")
            tid = str(obj["id"])
            text = obj["text"]
            if not tid:
                raise CorpusFormatError(f"line {lineno}: empty id")
            if not isinstance(text, str) or not text:
                raise CorpusFormatError(f"line {lineno}: empty or non-string text")
            if tid in seen:
                raise CorpusFormatError(f"line {lineno}: duplicate id {tid!r}")
            seen.add(tid)
            tweets.append(RawTweet(id=tid, text=text, created_at=obj.get("created_at")))
    return tweets


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _split_on_punctuation(token: str) -> list[str]:
    """Split a whitespace token at punctuation, keeping '#' and internal apostrophes."""
    parts: list[str] = []
    cur: list[str] = []
    n = len(token)
    for i, ch in enumerate(token):
        keep = False
        if ch == "#" or not _is_punct(ch):
            keep = True
        elif ch in ("'", "’") and 0 < i < n - 1:
            # apostrophe is internal when flanked by non-punctuation characters
            keep = not _is_punct(token[i - 1]) and not _is_punct(token[i + 1])
        if keep:
            cur.append(ch)
        elif cur:
            parts.append("".join(cur))
            cur = []
    if cur:
        parts.append("".join(cur))
    return parts


def preprocess_tweet(text: str, rules: PreprocessConfig | None = None) -> list[str]:
    """Lowercase, strip URLs/@-mentions/punctuation, lemmatize, drop stopwords."""
    rules = rules or PreprocessConfig()
    lemma = rules.lemma_map or {}
    tokens: list[str] = []
    for raw in text.split():
        low = raw.lower()
        if low.startswith("http") or low.startswith("@"):
            continue
        for tok in _split_on_punctuation(low):
            if tok.startswith("http"):  # URL fragments freed by punctuation splits
                continue
            tok = lemma.get(tok, tok)
            if tok and tok not in rules.stopwords:
                tokens.append(tok)
    return tokens


def preprocess_corpus(raw: list[RawTweet], rules: PreprocessConfig | None = None,
                      threads: int = 1) -> Corpus:
    """Preprocess every tweet; tweets whose token list comes out empty are dropped."""
    rules = rules or PreprocessConfig()
    if rules.drop_retweets:
        raw = [t for t in raw if not t.text.startswith("RT ")]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            token_lists = list(pool.map(lambda t: preprocess_tweet(t.text, rules), raw))
    else:
        token_lists = [preprocess_tweet(t.text, rules) for t in raw]
    tweets = [ProcessedTweet(id=t.id, tokens=tuple(toks))
              for t, toks in zip(raw, token_lists) if toks]
    vocabulary: dict[str, int] = {}
    for pt in tweets:
        for tok in set(pt.tokens):
            vocabulary[tok] = vocabulary.get(tok, 0) + 1
    return Corpus(tweets=tweets, vocabulary=vocabulary)


def corpus_stats(corpus: Corpus) -> Stats:
    counts = [len(t.tokens) for t in corpus.tweets]
    if not counts:
        return Stats(0, 0, 0.0, 0.0)
    mean = sum(counts) / len(counts)
    var = sum((c - mean) ** 2 for c in counts) / len(counts)  # population std
    return Stats(
        tweet_count=len(counts),
        unique_tokens=len(corpus.vocabulary),
        mean_tokens=mean,
        std_tokens=math.sqrt(var),
    )


# --- synthetic fixture generator -------------------------------------------

_DEFAULT_NOISE_VOCAB = (
    "weather sunny rainfall music concert guitar dinner recipe pasta travel "
    "airport luggage soccer stadium referee painting gallery canvas garden "
    "tomato harvest cinema trailer popcorn coding laptop keyboard mountain "
    "hiking trail coffee espresso bakery novel library chapter puzzle chess"
).split()


@dataclass(frozen=True)
class EventTemplate:
    name: str
    keywords: tuple[str, ...]  # core keywords present in every tweet of the event
    variants: tuple[str, ...] = ()  # per-tweet paraphrase filler


@dataclass
class SyntheticConfig:
    templates: list[EventTemplate]
    n_tweets: int = 200
    noise_rate: float = 0.0
    variants_per_tweet: int = 5
    noise_tokens_per_tweet: int = 8
    noise_vocab: tuple[str, ...] = tuple(_DEFAULT_NOISE_VOCAB)


def generate_synthetic(config: SyntheticConfig, seed: int) -> tuple[list[RawTweet], dict[str, str]]:
    """Generate a labeled corpus: returns (raw tweets, tweet id -> template name or 'noise')."""
    if not config.templates:
        raise ValueError("at least one event template is required")
    rng = random.Random(seed)
    tweets: list[RawTweet] = []
    labels: dict[str, str] = {}
    for i in range(config.n_tweets):
        tid = f"synth_{i:05d}"
        if rng.random() < config.noise_rate:
            words = rng.sample(config.noise_vocab,
                               min(config.noise_tokens_per_tweet, len(config.noise_vocab)))
            labels[tid] = "noise"
        else:
            tpl = config.templates[rng.randrange(len(config.templates))]
            words = list(tpl.keywords)
            if tpl.variants:
                words += rng.sample(tpl.variants,
                                    min(config.variants_per_tweet, len(tpl.variants)))
            rng.shuffle(words)
            labels[tid] = tpl.name
        tweets.append(RawTweet(id=tid, text=" ".join(words)))
    return tweets, labels


def _context_pool(prefix: str, size: int) -> tuple[str, ...]:
    """Deterministic pseudo-word pool for per-tweet paraphrase variation."""
    rng = random.Random(sum(ord(c) for c in prefix))
    syllables = ("ba be bi bo bu da de di do du ka ke ki ko ku la le li lo lu "
                 "ma me mi mo mu na ne ni no nu ra re ri ro ru sa se si so su "
                 "ta te ti to tu").split()
    pool: list[str] = []
    while len(pool) < size:
        word = prefix + "".join(rng.choice(syllables) for _ in range(3))
        if word not in pool:
            pool.append(word)
    return tuple(pool)


def default_event_templates() -> list[EventTemplate]:
    """Three planted events with core keywords and wide paraphrase pools.

    The wide pools keep the co-occurrence graph sparse enough that reduction
    leaves several distinct tweet nodes per event, as in organic corpora.
    """
    return [
        EventTemplate(
            name="quake",
            keywords=("earthquake", "magnitude", "epicenter", "aftershock", "tremor"),
            variants=_context_pool("q", 25),
        ),
        EventTemplate(
            name="election",
            keywords=("election", "ballot", "turnout", "candidate", "polling"),
            variants=_context_pool("e", 25),
        ),
        EventTemplate(
            name="final",
            keywords=("championship", "overtime", "goal", "striker", "stadium"),
            variants=_context_pool("f", 25),
        ),
    ]


def write_jsonl(tweets: list[RawTweet], path, labels: dict[str, str] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in tweets:
            obj = {"id": t.id, "text": t.text}
            if t.created_at is not None:
                obj["created_at"] = t.created_at
            if labels is not None and t.id in labels:
                obj["template"] = labels[t.id]
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_lemma_map(path) -> dict[str, str]:
    """Lemma table: TSV lines `surface<TAB>lemma`."""
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise CorpusFormatError(f"line {lineno}: expected `surface<TAB>lemma`")
            table[parts[0].lower()] = parts[1].lower()
    return table
