"""Two-phase GoW compression: frequency-based merging, then semantic node collapse.

Merge order is semantically significant, so everything here is strictly sequential;
the merge log makes runs replayable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .embeddings import EmbeddingTable, WordNotFoundError, most_similar
from .gow import GoW, GraphError, node_degree


@dataclass(frozen=True)
class MergeEvent:
    src: int
    dst: int
    phase: int  # 0 = manual, 1 = frequency, 2 = semantic
    trigger_similarity: float
    sequence: int
    src_leading: str
    dst_leading: str


@dataclass
class ReductionConfig:
    min_tweet_df: int = 5  # Phase I threshold: merge nodes seen in fewer tweets
    top_n: int = 10  # similarity depth for Phase II neighbor matching
    phase1_candidate_pool: int = 50  # most_similar hits scanned for a live node

    def validate(self) -> None:
        if min(self.min_tweet_df, self.top_n, self.phase1_candidate_pool) <= 0:
            raise ValueError("all reduction parameters must be positive")


def merge_nodes(gow: GoW, src: int, dst: int, phase: int = 0,
                trigger_similarity: float = 0.0) -> GoW:
    """Merge node `src` into `dst`: union members, migrate edge weights by addition.

    The (src, dst) edge, if any, is discarded (no self-loops); dst keeps its
    leading token; the token index is remapped and a MergeEvent appended.
    """
    if src == dst:
        raise GraphError(f"cannot merge node {src} into itself")
    if src not in gow.nodes or dst not in gow.nodes:
        raise GraphError(f"unknown node in merge ({src} -> {dst})")
    src_node, dst_node = gow.nodes[src], gow.nodes[dst]

    for nb, w in list(gow.adj.get(src, {}).items()):
        del gow.adj[nb][src]
        if nb == dst:
            continue
        new_w = gow.adj[dst].get(nb, 0.0) + w
        gow.adj[dst][nb] = new_w
        gow.adj[nb][dst] = new_w
    gow.adj.pop(src, None)

    dst_node.members |= src_node.members
    dst_node.tweet_ids |= src_node.tweet_ids  # union, so tweet_df never double counts
    for tok in src_node.members:
        gow.token_index[tok] = dst
    del gow.nodes[src]

    gow.merge_log.append(MergeEvent(
        src=src, dst=dst, phase=phase, trigger_similarity=trigger_similarity,
        sequence=len(gow.merge_log),
        src_leading=src_node.leading_token, dst_leading=dst_node.leading_token,
    ))
    return gow


def phase1_reduce(gow: GoW, table: EmbeddingTable,
                  config: ReductionConfig | None = None) -> GoW:
    """Merge rare nodes (tweet_df below threshold) into their most similar live node.

    Nodes are visited in ascending tweet_df order (ties: leading token). A node's
    candidate pool is scanned until a hit resolves through the live token index to
    a different node; nodes with no resolvable candidate are recorded in
    gow.phase1_unresolved and left in place.
    """
    config = config or ReductionConfig()
    config.validate()
    order = sorted(
        (v for v in gow.nodes if gow.nodes[v].tweet_df < config.min_tweet_df),
        key=lambda v: (gow.nodes[v].tweet_df, gow.nodes[v].leading_token),
    )
    for vid in order:
        if vid not in gow.nodes:
            continue  # already merged away
        leading = gow.nodes[vid].leading_token
        try:
            hits = most_similar(leading, config.phase1_candidate_pool, table)
        except (WordNotFoundError, ValueError):
            gow.phase1_unresolved.append(vid)
            continue
        for word, score in hits:
            target = gow.token_index.get(word)
            if target is not None and target != vid:
                merge_nodes(gow, vid, target, phase=1, trigger_similarity=score)
                break
        else:
            gow.phase1_unresolved.append(vid)
    return gow


def phase2_reduce(gow: GoW, table: EmbeddingTable,
                  config: ReductionConfig | None = None) -> GoW:
    """Semantic node collapse.

    Hubs are visited in ascending degree order on a snapshot taken at phase start
    (ties: leading token). At each live hub, live neighbors are scanned in ascending
    co-weight order; a neighbor is merged into the other neighbor with the highest
    similarity score among those appearing (by leading or member token) in its
    most_similar list.
    """
    config = config or ReductionConfig()
    config.validate()
    degrees = {v: node_degree(gow, v) for v in gow.nodes}
    order = sorted(gow.nodes, key=lambda v: (degrees[v], gow.nodes[v].leading_token))
    for hub in order:
        if hub not in gow.nodes:
            continue
        scan = sorted(gow.adj.get(hub, {}).items(),
                      key=lambda nw: (nw[1], gow.nodes[nw[0]].leading_token))
        for vij, _w in scan:
            if vij not in gow.nodes or vij not in gow.adj.get(hub, {}):
                continue  # merged away earlier in this scan
            try:
                hits = most_similar(gow.nodes[vij].leading_token, config.top_n, table)
            except (WordNotFoundError, ValueError):
                continue
            live_others = set(gow.adj[hub]) - {vij}
            best: dict[int, float] = {}
            for word, score in hits:  # descending, so first match per node is its max
                target = gow.token_index.get(word)
                if target in live_others and target not in best:
                    best[target] = score
            if not best:
                continue
            parent = min(best, key=lambda t: (-best[t], gow.nodes[t].leading_token))
            merge_nodes(gow, vij, parent, phase=2, trigger_similarity=best[parent])
    return gow


def merge_counts(gow: GoW) -> dict[int, int]:
    """Number of merges per phase, from the audit log."""
    counts: dict[int, int] = {}
    for ev in gow.merge_log:
        counts[ev.phase] = counts.get(ev.phase, 0) + 1
    return counts
