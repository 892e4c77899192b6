"""Graph-of-Words: token nodes, fractional co-occurrence edges, similarity lookups."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .corpus import Corpus
from .embeddings import EmbeddingTable, cosine, word_vector


class GraphError(ValueError):
    """Raised on unknown nodes or invalid graph operations."""


@dataclass
class TokenNode:
    id: int
    leading_token: str
    members: set[str]
    tweet_ids: set[int]  # indices of tweets containing any member token

    @property
    def tweet_df(self) -> int:
        return len(self.tweet_ids)


class CoEdge(NamedTuple):
    u: int
    v: int
    w_co: float


class SimEdge(NamedTuple):
    u: int
    v: int
    w_s: float


@dataclass
class GoW:
    nodes: dict[int, TokenNode] = field(default_factory=dict)
    adj: dict[int, dict[int, float]] = field(default_factory=dict)  # symmetric
    token_index: dict[str, int] = field(default_factory=dict)
    merge_log: list = field(default_factory=list)  # list[MergeEvent]
    phase1_unresolved: list[int] = field(default_factory=list)

    def neighbors(self, v: int) -> dict[int, float]:
        if v not in self.nodes:
            raise GraphError(f"unknown node {v}")
        return self.adj.get(v, {})

    def co_edges(self) -> Iterator[CoEdge]:
        for u, nbrs in self.adj.items():
            for v, w in nbrs.items():
                if u < v:
                    yield CoEdge(u, v, w)

    def total_co_weight(self) -> float:
        return sum(e.w_co for e in self.co_edges())

    def node_count(self) -> int:
        return len(self.nodes)


def co_weight_contribution(n_i: int) -> float:
    """Per-tweet contribution 1/(n_i - 1) to every token pair of that tweet."""
    if n_i < 2:
        raise ValueError(f"a tweet needs at least 2 unique tokens, got {n_i}")
    return 1.0 / (n_i - 1)


def build_gow(corpus: Corpus) -> GoW:
    """One node per unique token; each tweet adds 1/(n_i - 1) to all its token pairs.

    Duplicate tokens within a tweet collapse to the unique set first. Node ids are
    dense integers in first-appearance order.
    """
    gow = GoW()
    for tweet_idx, tweet in enumerate(corpus.tweets):
        uniq: list[str] = []
        seen = set()
        for tok in tweet.tokens:
            if tok not in seen:
                seen.add(tok)
                uniq.append(tok)
        ids = []
        for tok in uniq:
            nid = gow.token_index.get(tok)
            if nid is None:
                nid = len(gow.nodes)
                gow.nodes[nid] = TokenNode(id=nid, leading_token=tok,
                                           members={tok}, tweet_ids=set())
                gow.adj[nid] = {}
                gow.token_index[tok] = nid
            gow.nodes[nid].tweet_ids.add(tweet_idx)
            ids.append(nid)
        if len(ids) >= 2:
            w = co_weight_contribution(len(ids))
            for a in range(len(ids)):
                for b in range(a + 1, len(ids)):
                    u, v = ids[a], ids[b]
                    gow.adj[u][v] = gow.adj[u].get(v, 0.0) + w
                    gow.adj[v][u] = gow.adj[u][v]
    return gow


def node_degree(gow: GoW, v: int) -> float:
    """Sum of co-occurrence weights over the node's incident edges."""
    if v not in gow.nodes:
        raise GraphError(f"unknown node {v}")
    return sum(gow.adj.get(v, {}).values())


def sim_weight(v1: TokenNode, v2: TokenNode, table: EmbeddingTable) -> float:
    """Cosine similarity of the two leading tokens; members never enter into it."""
    if v1.id == v2.id:
        return 1.0
    return cosine(word_vector(v1.leading_token, table),
                  word_vector(v2.leading_token, table))


def sim_edge(gow: GoW, u: int, v: int, table: EmbeddingTable) -> SimEdge:
    if u not in gow.nodes or v not in gow.nodes:
        raise GraphError(f"unknown node in pair ({u}, {v})")
    return SimEdge(u, v, sim_weight(gow.nodes[u], gow.nodes[v], table))
