"""Serialization: JSON round-trips plus DOT/GraphML exports for inspection.

All floats go through a fixed 9-significant-digit format so reruns with the same
config produce byte-identical artifacts.
"""

from __future__ import annotations

import json
from xml.sax.saxutils import escape

from .got import GoT, NmiEdge, TweetNode
from .gow import GoW, TokenNode
from .reduction import MergeEvent
from .subevents import Subgraph


def round_floats(obj):
    """Recursively pin floats to 9 significant digits for stable serialization."""
    if isinstance(obj, float):
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(round_floats(obj), fh, ensure_ascii=False, indent=1)
        fh.write("\n")


# --- GoW --------------------------------------------------------------------

def gow_to_dict(gow: GoW) -> dict:
    return {
        "nodes": [
            {
                "id": nid,
                "leading_token": node.leading_token,
                "members": sorted(node.members),
                "tweet_ids": sorted(node.tweet_ids),
            }
            for nid, node in sorted(gow.nodes.items())
        ],
        "edges": [[e.u, e.v, e.w_co] for e in sorted(gow.co_edges())],
    }


def gow_from_dict(data: dict) -> GoW:
    gow = GoW()
    for nd in data["nodes"]:
        node = TokenNode(id=nd["id"], leading_token=nd["leading_token"],
                         members=set(nd["members"]), tweet_ids=set(nd["tweet_ids"]))
        gow.nodes[node.id] = node
        gow.adj[node.id] = {}
        for tok in node.members:
            gow.token_index[tok] = node.id
    for u, v, w in data["edges"]:
        gow.adj[u][v] = w
        gow.adj[v][u] = w
    return gow


# --- GoT --------------------------------------------------------------------

def got_to_dict(got: GoT) -> dict:
    return {
        "m": got.m,
        "dropped_tweets": got.dropped_tweets,
        "member_only_matches": got.member_only_matches,
        "nodes": [
            {
                "id": nid,
                "token_nodes": sorted(node.token_nodes),
                "frequency": node.frequency,
                "source_ids": list(node.source_ids),
            }
            for nid, node in sorted(got.nodes.items())
        ],
    }


def got_from_dict(data: dict) -> GoT:
    nodes = {}
    token_to_tweets: dict[int, set[int]] = {}
    for nd in data["nodes"]:
        node = TweetNode(id=nd["id"], token_nodes=frozenset(nd["token_nodes"]),
                         frequency=nd["frequency"], source_ids=tuple(nd["source_ids"]))
        nodes[node.id] = node
        for tok in node.token_nodes:
            token_to_tweets.setdefault(tok, set()).add(node.id)
    return GoT(nodes=nodes, m=data["m"], token_to_tweets=token_to_tweets,
               dropped_tweets=data.get("dropped_tweets", 0),
               member_only_matches=list(data.get("member_only_matches", [])))


# --- merge log --------------------------------------------------------------

def write_merge_log(events: list[MergeEvent], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(json.dumps(round_floats({
                "sequence": ev.sequence, "phase": ev.phase,
                "src": ev.src, "dst": ev.dst,
                "src_leading": ev.src_leading, "dst_leading": ev.dst_leading,
                "trigger_similarity": ev.trigger_similarity,
            }), ensure_ascii=False) + "\n")


def read_merge_log(path) -> list[MergeEvent]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                events.append(MergeEvent(
                    src=d["src"], dst=d["dst"], phase=d["phase"],
                    trigger_similarity=d["trigger_similarity"],
                    sequence=d["sequence"], src_leading=d["src_leading"],
                    dst_leading=d["dst_leading"]))
    return events


# --- edge lists -------------------------------------------------------------

def write_edges_tsv(edges: list[NmiEdge], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in edges:
            fh.write(f"{e.u}\t{e.v}\t{e.nmi:.9g}\n")


def read_edges_tsv(path) -> list[NmiEdge]:
    edges = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                u, v, w = line.split("\t")
                edges.append(NmiEdge(int(u), int(v), float(w)))
    return edges


# --- generic graph views for DOT / GraphML ----------------------------------

def _graph_view(graph):
    """Normalize GoW/Subgraph into (nodes: id->label, edges: (u,v,w), attr name)."""
    if isinstance(graph, GoW):
        nodes = {nid: node.leading_token for nid, node in sorted(graph.nodes.items())}
        edges = [(e.u, e.v, e.w_co) for e in sorted(graph.co_edges())]
        return nodes, edges, "w_co"
    if isinstance(graph, Subgraph):
        nodes = {v: str(v) for v in sorted(graph.vertices)}
        edges = [(u, v, w) for (u, v), w in sorted(graph.edges.items())]
        return nodes, edges, "nmi"
    raise TypeError(f"cannot export graph of type {type(graph).__name__}")


def export_graph(graph, fmt: str, path) -> None:
    """Write a GoW or Subgraph as json, dot, or graphml."""
    if fmt == "json":
        if isinstance(graph, GoW):
            dump_json(gow_to_dict(graph), path)
        elif isinstance(graph, Subgraph):
            dump_json({
                "vertices": sorted(graph.vertices),
                "edges": [[u, v, w] for (u, v), w in sorted(graph.edges.items())],
            }, path)
        else:
            raise TypeError(f"cannot export graph of type {type(graph).__name__}")
        return
    nodes, edges, attr = _graph_view(graph)
    if fmt == "dot":
        lines = ["graph {"]
        for nid, label in nodes.items():
            lines.append(f'  n{nid} [label="{_dot_escape(label)}"];')
        for u, v, w in edges:
            lines.append(f"  n{u} -- n{v} [{attr}={w:.9g}];")
        lines.append("}")
        text = "\n".join(lines) + "\n"
    elif fmt == "graphml":
        parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
            '  <key id="label" for="node" attr.name="label" attr.type="string"/>',
            f'  <key id="weight" for="edge" attr.name="{attr}" attr.type="double"/>',
            '  <graph edgedefault="undirected">',
        ]
        for nid, label in nodes.items():
            parts.append(f'    <node id="n{nid}"><data key="label">'
                         f"{escape(label)}</data></node>")
        for u, v, w in edges:
            parts.append(f'    <edge source="n{u}" target="n{v}">'
                         f'<data key="weight">{w:.9g}</data></edge>')
        parts += ["  </graph>", "</graphml>"]
        text = "\n".join(parts) + "\n"
    else:
        raise ValueError(f"unknown export format {fmt!r}; use json, dot, or graphml")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _dot_escape(label: str) -> str:
    return label.replace("\\", "\\\\").replace('"', '\\"')
