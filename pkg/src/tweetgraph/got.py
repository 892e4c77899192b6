"""Graph-of-Tweets: deduplicated tweet nodes over merged token nodes, scored with
a normalized mutual-information measure over token-set overlap."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

from .corpus import Corpus
from .gow import GoW


class GotBuildError(ValueError):
    """Raised when the corpus and reduced GoW disagree."""


@dataclass(frozen=True)
class TweetNode:
    id: int
    token_nodes: frozenset[int]
    frequency: int  # number of original tweets collapsing to this set
    source_ids: tuple[str, ...]


@dataclass
class GoT:
    nodes: dict[int, TweetNode]
    m: int  # live token-node count after keyword exclusion
    token_to_tweets: dict[int, set[int]] = field(default_factory=dict)
    dropped_tweets: int = 0  # tweets whose representation became empty
    member_only_matches: list[int] = field(default_factory=list)


def build_got(corpus: Corpus, reduced_gow: GoW,
              exclude_keywords: tuple[str, ...] = ()) -> GoT:
    """Map each tweet to its set of live token-node ids and deduplicate.

    A token node is dropped wholesale when its leading token contains an exclude
    keyword (case-insensitive substring). Nodes where only a non-leading member
    matches are kept but recorded in member_only_matches; substring matching on
    merged bags is noisy, so the conservative rule applies.
    """
    keywords = tuple(k.lower() for k in exclude_keywords)
    excluded: set[int] = set()
    member_only: list[int] = []
    if keywords:
        for nid, node in reduced_gow.nodes.items():
            lead = node.leading_token.lower()
            if any(k in lead for k in keywords):
                excluded.add(nid)
            elif any(k in m.lower() for k in keywords for m in node.members):
                member_only.append(nid)

    by_set: dict[frozenset[int], list[str]] = {}
    dropped = 0
    for tweet in corpus.tweets:
        ids = set()
        for tok in tweet.tokens:
            nid = reduced_gow.token_index.get(tok)
            if nid is None:
                raise GotBuildError(
                    f"token {tok!r} of tweet {tweet.id} is missing from the GoW index")
            if nid not in excluded:
                ids.add(nid)
        if not ids:
            dropped += 1
            continue
        by_set.setdefault(frozenset(ids), []).append(tweet.id)

    nodes: dict[int, TweetNode] = {}
    token_to_tweets: dict[int, set[int]] = {}
    for tid, (tokens, sources) in enumerate(by_set.items()):
        nodes[tid] = TweetNode(id=tid, token_nodes=tokens,
                               frequency=len(sources), source_ids=tuple(sources))
        for nid in tokens:
            token_to_tweets.setdefault(nid, set()).add(tid)

    m = len(reduced_gow.nodes) - len(excluded)
    return GoT(nodes=nodes, m=m, token_to_tweets=token_to_tweets,
               dropped_tweets=dropped, member_only_matches=sorted(member_only))


def pmi(f_x: float, f_y: float, f_xy: float, w: float) -> float:
    """Pointwise mutual information (natural log) from raw counts."""
    if w <= 0:
        raise ValueError("total count W must be positive")
    if f_x <= 0 or f_y <= 0:
        raise ValueError("marginal counts must be positive")
    if f_xy < 0:
        raise ValueError("joint count must be nonnegative")
    if f_xy == 0:
        return float("-inf")
    return math.log((f_xy / w) / ((f_x / w) * (f_y / w)))


def nmi_from_counts(x: int, y: int, c: int, m: int) -> float:
    """Normalized MI from set sizes x, y, intersection c, and universe size m.

    Disjoint sets score exactly -1; the max-marginal normalization bounds the
    result above by 1 and values below -1 are clamped to the boundary.
    """
    if not (1 <= x <= m and 1 <= y <= m):
        raise ValueError(f"set sizes must satisfy 1 <= x,y <= m (x={x}, y={y}, m={m})")
    if not (0 <= c <= min(x, y)):
        raise ValueError(f"intersection must satisfy 0 <= c <= min(x, y), got {c}")
    if c == 0:
        return -1.0
    if x == m or y == m:
        raise ValueError("degenerate input: a set spanning all m token nodes has "
                         "zero self-information, the normalization is undefined")
    mi = math.log((c * m) / (x * y))
    norm = max(-math.log(x / m), -math.log(y / m))
    return max(mi / norm, -1.0)


def nmi(t_i: TweetNode, t_j: TweetNode, m: int) -> float:
    x, y = len(t_i.token_nodes), len(t_j.token_nodes)
    c = len(t_i.token_nodes & t_j.token_nodes)
    return nmi_from_counts(x, y, c, m)


class NmiEdge(NamedTuple):
    u: int
    v: int
    nmi: float


def top_k_edges(got: GoT, k: int) -> list[NmiEdge]:
    """Top-k tweet pairs by NMI, descending; ties break on ascending id pairs.

    Candidates are generated through the inverted index: only pairs sharing at
    least one token node are scored, since disjoint pairs sit at the -1 boundary.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if len(got.nodes) < 2:
        raise ValueError("top_k_edges needs at least 2 tweet nodes")
    pairs: set[tuple[int, int]] = set()
    for tweet_ids in got.token_to_tweets.values():
        if len(tweet_ids) > 1:
            pairs.update(combinations(sorted(tweet_ids), 2))
    if k > len(pairs):
        warnings.warn(
            f"requested k={k} exceeds the {len(pairs)} candidate pairs with "
            "nonempty intersection", stacklevel=2)
    edges = [NmiEdge(u, v, nmi(got.nodes[u], got.nodes[v], got.m)) for u, v in pairs]
    edges.sort(key=lambda e: (-e.nmi, e.u, e.v))
    return edges[:k]
