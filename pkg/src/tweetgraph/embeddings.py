"""Word vectors: loading, subword composition, similarity queries, and a
minimal deterministic subword skip-gram trainer with negative sampling."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus


class WordNotFoundError(KeyError):
    """Raised when a word cannot be resolved to a vector."""


class VectorFormatError(ValueError):
    """Raised on malformed word2vec text files."""


# FNV-1a (32-bit) over UTF-8 bytes: fixed hash for reproducible n-gram buckets
_FNV_OFFSET = 0x811C9DC5
_FNV_PRIME = 0x01000193


def fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & 0xFFFFFFFF
    return h


def char_ngrams(word: str, min_n: int, max_n: int) -> list[str]:
    """Character n-grams of the boundary-padded word `<word>`."""
    padded = "<" + word + ">"
    grams = []
    for n in range(min_n, max_n + 1):
        for i in range(len(padded) - n + 1):
            grams.append(padded[i:i + n])
    return grams


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]
    subword_buckets: np.ndarray | None = None  # shape (bucket_count, dim)
    ngram_range: tuple[int, int] = (3, 6)
    epoch_losses: list[float] | None = None
    _matrix: np.ndarray | None = field(default=None, repr=False, compare=False)
    _words: list[str] | None = field(default=None, repr=False, compare=False)

    def bucket_ids(self, word: str) -> list[int]:
        if self.subword_buckets is None:
            return []
        count = self.subword_buckets.shape[0]
        return [fnv1a(g.encode("utf-8")) % count
                for g in char_ngrams(word, *self.ngram_range)]


def load_vectors(path) -> EmbeddingTable:
    """Parse word2vec text format: header `count dim`, then `word f1 ... fdim`."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise VectorFormatError("line 1: header must be `count dim`")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise VectorFormatError("line 1: header must be two integers") from exc
        if dim <= 0:
            raise VectorFormatError("line 1: dim must be positive")
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(" ")
            word = parts[0]
            vals = [p for p in parts[1:] if p]
            if len(vals) != dim:
                raise VectorFormatError(
                    f"line {lineno}: expected {dim} floats, got {len(vals)}")
            vectors[word] = np.array([float(v) for v in vals], dtype=np.float64)
        if len(vectors) != count:
            raise VectorFormatError(
                f"header declared {count} entries, file has {len(vectors)}")
    return EmbeddingTable(dim=dim, vectors=vectors)


def save_vectors(table: EmbeddingTable, path) -> None:
    """Write composed word vectors in word2vec text format."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.vectors)} {table.dim}\n")
        for word in table.vectors:
            vec = word_vector(word, table)
            fh.write(word + " " + " ".join(f"{v:.9g}" for v in vec) + "\n")


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity is undefined for zero vectors")
    return float(np.dot(a, b) / (na * nb))


def word_vector(word: str, table: EmbeddingTable) -> np.ndarray:
    """Resolve a word to a vector.

    In-vocabulary words return their stored vector, averaged together with the
    hashed n-gram bucket vectors when a subword table is present. Out-of-vocabulary
    words fall back to the average of their n-gram bucket vectors.
    """
    stored = table.vectors.get(word)
    if table.subword_buckets is None:
        if stored is None:
            raise WordNotFoundError(word)
        return stored
    ids = table.bucket_ids(word)
    if stored is not None:
        if not ids:
            return stored
        return (stored + table.subword_buckets[ids].sum(axis=0)) / (1 + len(ids))
    if not ids:
        raise WordNotFoundError(word)
    return table.subword_buckets[ids].mean(axis=0)


def _composed_matrix(table: EmbeddingTable) -> tuple[list[str], np.ndarray]:
    # cached: tables are immutable after load/train
    if table._matrix is None:
        words = list(table.vectors)
        mat = np.empty((len(words), table.dim), dtype=np.float64)
        for i, w in enumerate(words):
            mat[i] = word_vector(w, table)
        table._words = words
        table._matrix = mat
    return table._words, table._matrix


def most_similar(word: str, top_n: int, table: EmbeddingTable) -> list[tuple[str, float]]:
    """Top-N in-vocabulary words by cosine similarity to `word`, descending.

    The query word itself is excluded; ties break lexicographically.
    """
    if top_n <= 0:
        raise ValueError("top_n must be positive")
    query = word_vector(word, table)
    qnorm = np.linalg.norm(query)
    if qnorm == 0.0:
        raise WordNotFoundError(word)
    words, mat = _composed_matrix(table)
    if not words:
        return []
    norms = np.linalg.norm(mat, axis=1)
    safe = norms > 0.0
    scores = np.zeros(len(words))
    scores[safe] = (mat[safe] @ query) / (norms[safe] * qnorm)
    ranked = sorted(
        ((w, float(s)) for w, s, ok in zip(words, scores, safe) if ok and w != word),
        key=lambda ws: (-ws[1], ws[0]),
    )
    return ranked[:top_n]


# --- trainer ----------------------------------------------------------------

@dataclass
class TrainerConfig:
    dim: int = 300
    window: int = 5
    epochs: int = 30
    negative: int = 5
    learning_rate: float = 0.05
    min_learning_rate: float = 0.0005
    min_count: int = 5
    ngram_range: tuple[int, int] = (3, 6)
    bucket_count: int = 2_000_000
    seed: int = 1

    def validate(self) -> None:
        if min(self.dim, self.window, self.epochs, self.negative,
               self.min_count, self.bucket_count) <= 0:
            raise ValueError("all trainer counts must be positive")
        if self.learning_rate <= 0 or self.min_learning_rate <= 0:
            raise ValueError("learning rates must be positive")
        if self.learning_rate < self.min_learning_rate:
            raise ValueError("initial learning rate must be >= min learning rate")
        if self.ngram_range[0] > self.ngram_range[1]:
            raise ValueError("ngram_range must satisfy min_n <= max_n")


def negative_sampling_loss(v_in: np.ndarray, u_pos: np.ndarray, u_negs: np.ndarray):
    """Logistic negative-sampling loss and analytic gradients.

    loss = -log sigmoid(u_pos . v) - sum_n log sigmoid(-u_n . v)
    Returns (loss, grad_v_in, grad_u_pos, grad_u_negs).
    """
    s_pos = 1.0 / (1.0 + np.exp(-np.dot(u_pos, v_in)))
    z_neg = u_negs @ v_in if len(u_negs) else np.zeros(0)
    s_neg = 1.0 / (1.0 + np.exp(-z_neg))
    # log(1+exp(x)) via logaddexp for stability
    loss = float(np.logaddexp(0.0, -np.dot(u_pos, v_in)) + np.logaddexp(0.0, z_neg).sum())
    g_pos = (s_pos - 1.0) * v_in
    g_negs = s_neg[:, None] * v_in if len(u_negs) else np.zeros_like(u_negs)
    g_in = (s_pos - 1.0) * u_pos
    if len(u_negs):
        g_in = g_in + s_neg @ u_negs
    return loss, g_in, g_pos, g_negs


def train_subword_skipgram(corpus: Corpus, config: TrainerConfig | None = None) -> EmbeddingTable:
    """Train subword skip-gram embeddings with negative sampling.

    Deterministic for a fixed seed (single-threaded). Words below min_count get
    no stored vector but remain reachable through the subword bucket table.
    """
    config = config or TrainerConfig()
    config.validate()
    if not corpus.tweets:
        raise ValueError("corpus is empty")

    freq = Counter()
    for t in corpus.tweets:
        freq.update(t.tokens)
    vocab = sorted((w for w, c in freq.items() if c >= config.min_count),
                   key=lambda w: (-freq[w], w))
    if not vocab:
        raise ValueError("no word meets min_count; effective vocabulary is empty")
    w2i = {w: i for i, w in enumerate(vocab)}

    min_n, max_n = config.ngram_range
    bucket_lists = []
    for w in vocab:
        grams = char_ngrams(w, min_n, max_n)
        bucket_lists.append(np.array(
            [fnv1a(g.encode("utf-8")) % config.bucket_count for g in grams], dtype=np.int64))

    rng = np.random.default_rng(config.seed)
    init = 0.5 / config.dim
    w_in = rng.uniform(-init, init, size=(len(vocab), config.dim))
    buckets = rng.uniform(-init, init, size=(config.bucket_count, config.dim))
    w_out = np.zeros((len(vocab), config.dim))

    # unigram^0.75 negative-sampling distribution
    probs = np.array([freq[w] for w in vocab], dtype=np.float64) ** 0.75
    cum = np.cumsum(probs / probs.sum())

    sentences = [np.array([w2i[tok] for tok in t.tokens if tok in w2i], dtype=np.int64)
                 for t in corpus.tweets]
    sentences = [s for s in sentences if len(s) >= 2]

    lr0, lr_min = config.learning_rate, config.min_learning_rate
    total_units = max(config.epochs * len(sentences), 1)
    epoch_losses: list[float] = []
    unit = 0
    for _ in range(config.epochs):
        loss_sum, pair_count = 0.0, 0
        for sent in sentences:
            lr = lr0 - (lr0 - lr_min) * (unit / total_units)
            unit += 1
            for i, center in enumerate(sent):
                b = int(rng.integers(1, config.window + 1))
                lo, hi = max(0, i - b), min(len(sent), i + b + 1)
                blist = bucket_lists[center]
                denom = 1 + len(blist)
                for j in range(lo, hi):
                    if j == i:
                        continue
                    ctx = int(sent[j])
                    v_in = (w_in[center] + buckets[blist].sum(axis=0)) / denom
                    draws = np.searchsorted(cum, rng.random(config.negative))
                    negs = draws[draws != ctx]
                    loss, g_in, g_pos, g_negs = negative_sampling_loss(
                        v_in, w_out[ctx], w_out[negs])
                    loss_sum += loss
                    pair_count += 1
                    w_out[ctx] -= lr * g_pos
                    if len(negs):
                        np.subtract.at(w_out, negs, lr * g_negs)
                    share = lr / denom
                    w_in[center] -= share * g_in
                    if len(blist):
                        np.subtract.at(buckets, blist, share * g_in)
        epoch_losses.append(loss_sum / max(pair_count, 1))

    table = EmbeddingTable(
        dim=config.dim,
        vectors={w: w_in[i] for i, w in enumerate(vocab)},
        subword_buckets=buckets,
        ngram_range=config.ngram_range,
        epoch_losses=epoch_losses,
    )
    return table
