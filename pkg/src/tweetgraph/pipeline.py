"""Staged pipeline: preprocess -> embeddings -> GoW -> reduction -> GoT ->
top-k edges -> cliques -> reports. Each stage writes an artifact so the CLI can
re-run stages independently; a manifest records counts, timings, and hashes."""

from __future__ import annotations

import hashlib
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import corpus as corpus_mod
from . import exports
from .corpus import Corpus, PreprocessConfig, corpus_stats
from .embeddings import TrainerConfig, load_vectors, save_vectors, \
    train_subword_skipgram
from .got import GoT, NmiEdge, build_got, nmi, top_k_edges
from .gow import GoW, build_gow
from .reduction import ReductionConfig, merge_counts, phase1_reduce, phase2_reduce
from .stopwords import load_stopwords
from .subevents import Clique, clique_report, induce_subgraph, maximal_cliques, \
    render_reports

log = logging.getLogger("tweetgraph")


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    input: str = ""
    output_dir: str = "out"
    stopwords_path: str | None = None
    lemma_path: str | None = None
    drop_retweets: bool = False
    embeddings: str = "train"  # "train" or "load:<path>"
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    reduction: ReductionConfig = field(default_factory=ReductionConfig)
    exclude_keywords: tuple[str, ...] = ("corona", "covid")
    k: int = 1000
    min_clique_size: int = 3
    clique_edge_source: str = "topk"  # "topk" or "induced"
    export_format: str = "json"  # extra graph export: json, dot, graphml
    seed: int = 1
    threads: int = 1

    def validate(self) -> None:
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.min_clique_size < 1:
            raise ValueError("min_clique_size must be positive")
        if self.clique_edge_source not in ("topk", "induced"):
            raise ValueError("clique_edge_source must be 'topk' or 'induced'")
        if not (self.embeddings == "train" or self.embeddings.startswith("load:")):
            raise ValueError("embeddings must be 'train' or 'load:<path>'")
        self.trainer.validate()
        self.reduction.validate()

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["trainer"] = dict(self.trainer.__dict__)
        d["trainer"]["ngram_range"] = list(self.trainer.ngram_range)
        d["reduction"] = dict(self.reduction.__dict__)
        d["exclude_keywords"] = list(self.exclude_keywords)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        trainer = data.pop("trainer", {})
        if isinstance(trainer, dict):
            if "ngram_range" in trainer:
                trainer["ngram_range"] = tuple(trainer["ngram_range"])
            trainer = TrainerConfig(**trainer)
        reduction = data.pop("reduction", {})
        if isinstance(reduction, dict):
            reduction = ReductionConfig(**reduction)
        if "exclude_keywords" in data:
            data["exclude_keywords"] = tuple(data["exclude_keywords"])
        return cls(trainer=trainer, reduction=reduction, **data)


def preprocess_rules(config: PipelineConfig) -> PreprocessConfig:
    stop = load_stopwords(config.stopwords_path) if config.stopwords_path else None
    lemma = corpus_mod.load_lemma_map(config.lemma_path) if config.lemma_path else None
    rules = PreprocessConfig(lemma_map=lemma, drop_retweets=config.drop_retweets)
    if stop is not None:
        rules.stopwords = stop
    return rules


# --- corpus artifact --------------------------------------------------------

def save_corpus(corpus: Corpus, raw_count: int, path) -> None:
    exports.dump_json({
        "raw_tweets": raw_count,
        "tweets": [{"id": t.id, "tokens": list(t.tokens)} for t in corpus.tweets],
    }, path)


def load_processed_corpus(path) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    tweets = [corpus_mod.ProcessedTweet(id=t["id"], tokens=tuple(t["tokens"]))
              for t in data["tweets"]]
    vocabulary: dict[str, int] = {}
    for t in tweets:
        for tok in set(t.tokens):
            vocabulary[tok] = vocabulary.get(tok, 0) + 1
    return Corpus(tweets=tweets, vocabulary=vocabulary)


# --- stats ------------------------------------------------------------------

def _dist(values: list[int]) -> dict:
    if not values:
        return {"max": 0, "min": 0, "mean": 0.0, "std": 0.0}
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return {"max": max(values), "min": min(values),
            "mean": mean, "std": math.sqrt(var)}


def compute_stats(corpus: Corpus, raw_count: int, initial_nodes: int,
                  reduced: GoW, got: GoT, edges: list[NmiEdge],
                  cliques: list[Clique]) -> dict:
    cs = corpus_stats(corpus)
    per_phase = merge_counts(reduced)
    final_nodes = reduced.node_count()
    member_counts = [len(n.members) for n in reduced.nodes.values()]
    hist: dict[str, int] = {}
    for c in cliques:
        key = str(len(c.members))
        hist[key] = hist.get(key, 0) + 1

    # minimum NMI both over the top-k edges and over every intersecting pair
    # among the subgraph vertices (the two readings of "within the subgraph")
    min_topk = min((e.nmi for e in edges), default=None)
    vertices = sorted({v for e in edges for v in (e.u, e.v)})
    min_induced = min_topk
    for i, u in enumerate(vertices):
        for v in vertices[i + 1:]:
            if got.nodes[u].token_nodes & got.nodes[v].token_nodes:
                val = nmi(got.nodes[u], got.nodes[v], got.m)
                if min_induced is None or val < min_induced:
                    min_induced = val

    return {
        "corpus": {
            "raw_tweets": raw_count,
            "processed_tweets": cs.tweet_count,
            "unique_tokens": cs.unique_tokens,
            "mean_tokens_per_tweet": cs.mean_tokens,
            "std_tokens_per_tweet": cs.std_tokens,
        },
        "reduction": {
            "initial_nodes": initial_nodes,
            "phase1_merges": per_phase.get(1, 0),
            "phase2_merges": per_phase.get(2, 0),
            "phase1_unresolved": len(reduced.phase1_unresolved),
            "final_nodes": final_nodes,
            "reduction_pct": (1 - final_nodes / initial_nodes) if initial_nodes else 0.0,
            "node_size": _dist(member_counts),
        },
        "got": {
            "tweet_nodes": len(got.nodes),
            "dropped_tweets": got.dropped_tweets,
            "m": got.m,
        },
        "edges": {
            "count": len(edges),
            "min_nmi_topk": min_topk,
            "max_nmi_topk": max((e.nmi for e in edges), default=None),
            "min_nmi_induced_intersecting": min_induced,
        },
        "cliques": {
            "count": len(cliques),
            "size_histogram": hist,
        },
    }


def write_stats_tsv(stats: dict, path) -> None:
    def flatten(prefix, obj, out):
        for k, v in obj.items():
            if isinstance(v, dict):
                flatten(f"{prefix}{k}.", v, out)
            else:
                out.append((f"{prefix}{k}", v))
        return out

    rows = flatten("", stats, [])
    with open(path, "w", encoding="utf-8") as fh:
        for key, val in rows:
            if isinstance(val, float):
                val = f"{val:.9g}"
            fh.write(f"{key}\t{val}\n")


# --- the 8-stage run --------------------------------------------------------

def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_pipeline(config: PipelineConfig) -> dict:
    config.validate()
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"config": config.to_dict(), "stages": []}
    state: dict = {}

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            counts, paths = fn()
        except Exception as exc:
            manifest["failed_stage"] = name
            manifest["error"] = str(exc)
            exports.dump_json(manifest, out / "manifest.json")
            raise StageError(name, exc) from exc
        entry = {
            "stage": name,
            "seconds": round(time.perf_counter() - t0, 3),
            "counts": counts,
            "outputs": {str(p.name): _sha256(p) for p in paths},
        }
        manifest["stages"].append(entry)
        log.info("stage %s done in %.3fs: %s", name, entry["seconds"], counts)

    def s1_preprocess():
        raw = corpus_mod.load_corpus(config.input)
        corpus = corpus_mod.preprocess_corpus(raw, preprocess_rules(config),
                                              threads=config.threads)
        state["raw_count"] = len(raw)
        state["corpus"] = corpus
        path = out / "corpus.json"
        save_corpus(corpus, len(raw), path)
        return ({"raw_tweets": len(raw), "processed_tweets": len(corpus.tweets),
                 "unique_tokens": len(corpus.vocabulary)}, [path])

    def s2_embeddings():
        if config.embeddings == "train":
            trainer = TrainerConfig(**{**config.trainer.__dict__, "seed": config.seed})
            table = train_subword_skipgram(state["corpus"], trainer)
        else:
            src = config.embeddings.split(":", 1)[1]
            if not Path(src).exists():
                raise FileNotFoundError(f"embedding file not found: {src}")
            table = load_vectors(src)
        state["table"] = table
        path = out / "vectors.txt"
        save_vectors(table, path)
        return ({"words": len(table.vectors), "dim": table.dim}, [path])

    def s3_build_gow():
        gow = build_gow(state["corpus"])
        state["gow_initial_nodes"] = gow.node_count()
        state["gow"] = gow
        path = out / "gow.json"
        exports.dump_json(exports.gow_to_dict(gow), path)
        paths = [path]
        if config.export_format != "json":
            extra = out / f"gow.{config.export_format}"
            exports.export_graph(gow, config.export_format, extra)
            paths.append(extra)
        return ({"nodes": gow.node_count(),
                 "edges": sum(1 for _ in gow.co_edges())}, paths)

    def s4_reduce():
        gow = state["gow"]
        phase1_reduce(gow, state["table"], config.reduction)
        phase1 = len(gow.merge_log)
        phase2_reduce(gow, state["table"], config.reduction)
        log_path = out / "merge_log.jsonl"
        exports.write_merge_log(gow.merge_log, log_path)
        red_path = out / "reduced_gow.json"
        exports.dump_json(exports.gow_to_dict(gow), red_path)
        return ({"phase1_merges": phase1,
                 "phase2_merges": len(gow.merge_log) - phase1,
                 "unresolved": len(gow.phase1_unresolved),
                 "final_nodes": gow.node_count()}, [log_path, red_path])

    def s5_build_got():
        got = build_got(state["corpus"], state["gow"], config.exclude_keywords)
        state["got"] = got
        path = out / "got.json"
        exports.dump_json(exports.got_to_dict(got), path)
        return ({"tweet_nodes": len(got.nodes), "m": got.m,
                 "dropped_tweets": got.dropped_tweets}, [path])

    def s6_top_edges():
        import warnings as _warnings
        if len(state["got"].nodes) < 2:
            edges = []
        else:
            with _warnings.catch_warnings():
                _warnings.simplefilter("ignore")
                edges = top_k_edges(state["got"], config.k)
        state["edges"] = edges
        path = out / "edges.tsv"
        exports.write_edges_tsv(edges, path)
        return ({"edges": len(edges)}, [path])

    def s7_cliques():
        subgraph = induce_subgraph(state["edges"]) if state["edges"] else None
        if subgraph is not None and config.clique_edge_source == "induced":
            # alternative reading: complete the subgraph with every intersecting pair
            verts = sorted(subgraph.vertices)
            got: GoT = state["got"]
            for i, u in enumerate(verts):
                for v in verts[i + 1:]:
                    if (u, v) not in subgraph.edges and \
                            got.nodes[u].token_nodes & got.nodes[v].token_nodes:
                        subgraph.edges[(u, v)] = nmi(got.nodes[u], got.nodes[v], got.m)
        cliques = maximal_cliques(subgraph, config.min_clique_size, state["got"]) \
            if subgraph is not None else []
        state["subgraph"] = subgraph
        state["cliques"] = cliques
        reports = [clique_report(c, state["got"], state["gow"]) for c in cliques]
        json_path = out / "cliques.json"
        exports.dump_json(reports, json_path)
        txt_path = out / "cliques.txt"
        txt_path.write_text(render_reports(reports), encoding="utf-8")
        paths = [json_path, txt_path]
        if subgraph is not None and config.export_format != "json":
            extra = out / f"subgraph.{config.export_format}"
            exports.export_graph(subgraph, config.export_format, extra)
            paths.append(extra)
        return ({"cliques": len(cliques)}, paths)

    def s8_report():
        stats = compute_stats(state["corpus"], state["raw_count"],
                              state["gow_initial_nodes"], state["gow"],
                              state["got"], state["edges"], state["cliques"])
        json_path = out / "stats.json"
        exports.dump_json(stats, json_path)
        tsv_path = out / "stats.tsv"
        write_stats_tsv(exports.round_floats(stats), tsv_path)
        return ({"cliques": stats["cliques"]["count"],
                 "reduction_pct": stats["reduction"]["reduction_pct"]},
                [json_path, tsv_path])

    stage("preprocess", s1_preprocess)
    stage("embeddings", s2_embeddings)
    stage("build-gow", s3_build_gow)
    stage("reduce", s4_reduce)
    stage("build-got", s5_build_got)
    stage("top-edges", s6_top_edges)
    stage("cliques", s7_cliques)
    stage("report", s8_report)

    exports.dump_json(manifest, out / "manifest.json")
    return manifest
