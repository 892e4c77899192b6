"""Top-k NMI subgraph, maximal clique enumeration, and sub-event keyword reports."""

from __future__ import annotations

from dataclasses import dataclass, field

from .got import GoT, NmiEdge
from .gow import GoW


@dataclass
class Subgraph:
    vertices: set[int] = field(default_factory=set)
    edges: dict[tuple[int, int], float] = field(default_factory=dict)  # (u<v) -> nmi

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class Clique:
    members: tuple[int, ...]  # sorted tweet node ids
    shared_tokens: frozenset[int] = frozenset()
    all_tokens: frozenset[int] = frozenset()


def induce_subgraph(edges: list[NmiEdge]) -> Subgraph:
    """Subgraph over exactly the given edges; vertices are the endpoint union."""
    g = Subgraph()
    for e in edges:
        u, v = min(e.u, e.v), max(e.u, e.v)
        g.vertices.update((u, v))
        g.edges[(u, v)] = e.nmi
    return g


def _degeneracy_order(adj: dict[int, set[int]]) -> list[int]:
    remaining = {v: set(nbrs) for v, nbrs in adj.items()}
    order = []
    while remaining:
        v = min(remaining, key=lambda x: (len(remaining[x]), x))
        order.append(v)
        for nb in remaining[v]:
            remaining[nb].discard(v)
        del remaining[v]
    return order


def _bron_kerbosch_pivot(adj, r: set, p: set, x: set, out: list) -> None:
    if not p and not x:
        out.append(frozenset(r))
        return
    pivot = max(p | x, key=lambda u: (len(p & adj[u]), -u))
    for v in sorted(p - adj[pivot]):
        _bron_kerbosch_pivot(adj, r | {v}, p & adj[v], x & adj[v], out)
        p.discard(v)
        x.add(v)


def maximal_cliques(g: Subgraph, min_size: int = 3, got: GoT | None = None) -> list[Clique]:
    """All maximal cliques of size >= min_size, Bron-Kerbosch with pivoting over a
    degeneracy ordering. Output canonical: members sorted, cliques sorted.

    When a GoT is given, shared/all token sets are filled from tweet membership.
    """
    adj = g.adjacency()
    raw: list[frozenset] = []
    p, x = set(adj), set()
    for v in _degeneracy_order(adj):
        _bron_kerbosch_pivot(adj, {v}, p & adj[v], x & adj[v], raw)
        p.discard(v)
        x.add(v)
    cliques = []
    for members in sorted((tuple(sorted(c)) for c in raw if len(c) >= min_size)):
        shared: frozenset[int] = frozenset()
        union: frozenset[int] = frozenset()
        if got is not None:
            sets = [got.nodes[v].token_nodes for v in members]
            shared = frozenset.intersection(*sets)
            union = frozenset.union(*sets)
        cliques.append(Clique(members=members, shared_tokens=shared, all_tokens=union))
    return cliques


def clique_report(c: Clique, got: GoT, gow: GoW) -> dict:
    """Report record for one clique: member/source ids and token leading strings."""
    for v in c.members:
        if v not in got.nodes:
            raise KeyError(f"clique member {v} is not a GoT node")
    sets = [got.nodes[v].token_nodes for v in c.members]
    shared = frozenset.intersection(*sets)
    union = frozenset.union(*sets)

    def leadings(ids):
        return sorted(gow.nodes[i].leading_token for i in ids)

    return {
        "members": list(c.members),
        "size": len(c.members),
        "source_tweet_ids": sorted(
            sid for v in c.members for sid in got.nodes[v].source_ids),
        "shared_tokens": leadings(shared),
        "all_tokens": leadings(union),
    }


def render_reports(reports: list[dict]) -> str:
    """Human-readable summary, largest cliques first."""
    lines = [f"{len(reports)} maximal clique(s)"]
    for i, rep in enumerate(sorted(reports, key=lambda r: (-r["size"], r["members"]))):
        lines.append("")
        lines.append(f"clique {i + 1}: {rep['size']} tweet nodes "
                     f"(ids {', '.join(str(m) for m in rep['members'])})")
        lines.append(f"  shared tokens: {', '.join(rep['shared_tokens']) or '(none)'}")
        lines.append(f"  all tokens:    {', '.join(rep['all_tokens'])}")
    return "\n".join(lines) + "\n"
