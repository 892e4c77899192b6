"""Shared fixture builders and brute-force oracles used across test modules."""

from __future__ import annotations

import random
from itertools import combinations

import numpy as np

from tweetgraph.corpus import Corpus, ProcessedTweet
from tweetgraph.embeddings import EmbeddingTable
from tweetgraph.got import GoT, NmiEdge, TweetNode, nmi
from tweetgraph.gow import GoW, TokenNode


def make_corpus(token_lists, ids=None) -> Corpus:
    tweets = [ProcessedTweet(id=ids[i] if ids else f"t{i}", tokens=tuple(toks))
              for i, toks in enumerate(token_lists)]
    vocab: dict[str, int] = {}
    for t in tweets:
        for tok in set(t.tokens):
            vocab[tok] = vocab.get(tok, 0) + 1
    return Corpus(tweets=tweets, vocabulary=vocab)


def planted_table(vectors: dict[str, list[float]]) -> EmbeddingTable:
    dim = len(next(iter(vectors.values())))
    return EmbeddingTable(dim=dim,
                          vectors={w: np.array(v, float) for w, v in vectors.items()})


def make_gow(tokens: list[str], edges: list[tuple[int, int, float]],
             tweet_dfs: list[int] | None = None) -> GoW:
    """Build a GoW directly from a token list and weighted edge list."""
    gow = GoW()
    for i, tok in enumerate(tokens):
        df = tweet_dfs[i] if tweet_dfs else 1
        gow.nodes[i] = TokenNode(id=i, leading_token=tok, members={tok},
                                 tweet_ids=set(range(df)))
        gow.adj[i] = {}
        gow.token_index[tok] = i
    for u, v, w in edges:
        gow.adj[u][v] = w
        gow.adj[v][u] = w
    return gow


def random_gow(rng: random.Random, max_nodes: int = 200) -> GoW:
    n = rng.randint(2, max_nodes)
    tokens = [f"w{i}" for i in range(n)]
    edges = []
    for u, v in combinations(range(n), 2):
        if rng.random() < min(1.0, 4.0 / n):
            edges.append((u, v, rng.uniform(0.1, 5.0)))
    return make_gow(tokens, edges)


def make_got(token_sets: list[set[int]], m: int) -> GoT:
    nodes = {}
    token_to_tweets: dict[int, set[int]] = {}
    for i, s in enumerate(token_sets):
        nodes[i] = TweetNode(id=i, token_nodes=frozenset(s), frequency=1,
                             source_ids=(f"src{i}",))
        for tok in s:
            token_to_tweets.setdefault(tok, set()).add(i)
    return GoT(nodes=nodes, m=m, token_to_tweets=token_to_tweets)


def random_got(rng: random.Random, max_tweets: int = 100) -> GoT:
    m = rng.randint(4, 30)
    n = rng.randint(2, max_tweets)
    sets = []
    for _ in range(n):
        size = rng.randint(1, m - 1)
        s = set(rng.sample(range(m), size))
        if s not in sets:
            sets.append(s)
    return make_got(sets, m)


def brute_force_top_k(got: GoT, k: int) -> list[NmiEdge]:
    """Full sort + truncate over every intersecting pair."""
    edges = []
    for u, v in combinations(sorted(got.nodes), 2):
        if got.nodes[u].token_nodes & got.nodes[v].token_nodes:
            edges.append(NmiEdge(u, v, nmi(got.nodes[u], got.nodes[v], got.m)))
    edges.sort(key=lambda e: (-e.nmi, e.u, e.v))
    return edges[:k]


def brute_force_cliques(n: int, edge_set: set[tuple[int, int]],
                        min_size: int) -> list[tuple[int, ...]]:
    """Maximal cliques by exhaustive subset enumeration over bitmasks (n <= ~15)."""
    adj = [0] * n
    for u, v in edge_set:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    is_clique = [False] * (1 << n)
    is_clique[0] = True
    for s in range(1, 1 << n):
        v = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        is_clique[s] = is_clique[rest] and (rest & adj[v]) == rest
    out = []
    for s in range(1, 1 << n):
        if not is_clique[s] or bin(s).count("1") < min_size:
            continue
        maximal = True
        for u in range(n):
            if not (s >> u) & 1 and (adj[u] & s) == s:
                maximal = False
                break
        if maximal:
            out.append(tuple(i for i in range(n) if (s >> i) & 1))
    return sorted(out)
