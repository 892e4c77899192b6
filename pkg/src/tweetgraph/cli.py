"""Command-line interface.

Subcommands mirror the pipeline stages so each one can be re-run from the
previous stage's artifact; `run` executes all eight stages. Exit codes:
0 success, 1 usage error, 2 stage failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import exports
from .corpus import EventTemplate, SyntheticConfig, default_event_templates, \
    generate_synthetic, write_jsonl
from .embeddings import load_vectors, save_vectors, train_subword_skipgram
from .got import build_got, top_k_edges
from .gow import build_gow
from .pipeline import PipelineConfig, StageError, compute_stats, load_processed_corpus, \
    preprocess_rules, run_pipeline, save_corpus, write_stats_tsv
from .reduction import phase1_reduce, phase2_reduce
from .subevents import clique_report, induce_subgraph, maximal_cliques, render_reports



class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tweetgraph",
                     description="Sub-event detection via graph merging over tweets")
    parser.add_argument("--verbose", action="store_true", help="log stage progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--input", help="input JSONL corpus")
        p.add_argument("--output-dir", help="artifact directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--k", type=int, help="top NMI edges to keep")
        p.add_argument("--min-tweet-df", type=int, help="Phase I rarity threshold")
        p.add_argument("--top-n", type=int, help="Phase II similarity depth")
        p.add_argument("--min-clique-size", type=int)
        p.add_argument("--exclude", help="comma-separated keyword exclusions")
        p.add_argument("--embeddings", help="'train' or 'load:<path>'")
        p.add_argument("--format", choices=["json", "dot", "graphml"],
                       help="extra graph export format")
        p.add_argument("--stopwords", help="stopword file, one token per line")
        p.add_argument("--lemmas", help="lemma table, TSV surface<TAB>lemma")
        p.add_argument("--drop-retweets", action="store_true", default=None)

    for name, hlp in [
        ("run", "run the full 8-stage pipeline"),
        ("preprocess", "stage 1: load and preprocess the corpus"),
        ("train-embeddings", "stage 2: train or import word vectors"),
        ("build-gow", "stage 3: build the token co-occurrence graph"),
        ("reduce", "stage 4: two-phase node merging"),
        ("build-got", "stage 5: build the tweet graph"),
        ("extract", "stages 6-8: top-k edges, cliques, reports"),
    ]:
        add_common(sub.add_parser(name, help=hlp))

    synth = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    synth.add_argument("--out", required=True, help="output JSONL path")
    synth.add_argument("--seed", type=int, default=7)
    synth.add_argument("--n-tweets", type=int, default=200)
    synth.add_argument("--noise-rate", type=float, default=0.2)
    synth.add_argument("--templates", help="JSON file with event templates")
    return parser


def _config_from_args(args) -> PipelineConfig:
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    config = PipelineConfig.from_dict(data)
    if args.input is not None:
        config.input = args.input
    if args.output_dir is not None:
        config.output_dir = args.output_dir
    if args.seed is not None:
        config.seed = args.seed
        config.trainer.seed = args.seed
    if args.threads is not None:
        config.threads = args.threads
    if args.k is not None:
        config.k = args.k
    if args.min_tweet_df is not None:
        config.reduction.min_tweet_df = args.min_tweet_df
    if args.top_n is not None:
        config.reduction.top_n = args.top_n
    if args.min_clique_size is not None:
        config.min_clique_size = args.min_clique_size
    if args.exclude is not None:
        config.exclude_keywords = tuple(
            k.strip().lower() for k in args.exclude.split(",") if k.strip())
    if args.embeddings is not None:
        config.embeddings = args.embeddings
    if args.format is not None:
        config.export_format = args.format
    if args.stopwords is not None:
        config.stopwords_path = args.stopwords
    if args.lemmas is not None:
        config.lemma_path = args.lemmas
    if args.drop_retweets is not None:
        config.drop_retweets = args.drop_retweets
    config.validate()
    return config


def _cmd_synth(args) -> int:
    templates = default_event_templates()
    if args.templates:
        with open(args.templates, encoding="utf-8") as fh:
            templates = [EventTemplate(name=t["name"],
                                       keywords=tuple(t["keywords"]),
                                       variants=tuple(t.get("variants", ())))
                         for t in json.load(fh)]
    config = SyntheticConfig(templates=templates, n_tweets=args.n_tweets,
                             noise_rate=args.noise_rate)
    tweets, labels = generate_synthetic(config, args.seed)
    write_jsonl(tweets, args.out, labels)
    print(f"wrote {len(tweets)} tweets to {args.out}")
    return 0


def _load_gow(path):
    with open(path, encoding="utf-8") as fh:
        return exports.gow_from_dict(json.load(fh))


def _run_stage(name, fn) -> int:
    try:
        fn()
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: stage {name!r} failed: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "synth":
        return _cmd_synth(args)

    config = _config_from_args(args)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    if args.command == "run":
        return _run_stage("run", lambda: run_pipeline(config))

    def preprocess():
        raw = corpus_mod.load_corpus(config.input)
        corpus = corpus_mod.preprocess_corpus(raw, preprocess_rules(config),
                                              threads=config.threads)
        save_corpus(corpus, len(raw), out / "corpus.json")
        print(f"{len(corpus.tweets)} processed tweets, "
              f"{len(corpus.vocabulary)} unique tokens")

    def train_embeddings():
        if config.embeddings == "train":
            corpus = load_processed_corpus(out / "corpus.json")
            config.trainer.seed = config.seed
            table = train_subword_skipgram(corpus, config.trainer)
        else:
            table = load_vectors(config.embeddings.split(":", 1)[1])
        save_vectors(table, out / "vectors.txt")
        print(f"{len(table.vectors)} word vectors of dim {table.dim}")

    def build_gow_stage():
        corpus = load_processed_corpus(out / "corpus.json")
        gow = build_gow(corpus)
        exports.dump_json(exports.gow_to_dict(gow), out / "gow.json")
        if config.export_format != "json":
            exports.export_graph(gow, config.export_format,
                                 out / f"gow.{config.export_format}")
        print(f"GoW: {gow.node_count()} nodes, {sum(1 for _ in gow.co_edges())} edges")

    def reduce_stage():
        # staged reloads lose the subword table; OOV leading tokens are then
        # recorded as unresolved rather than composed from n-grams
        gow = _load_gow(out / "gow.json")
        table = load_vectors(out / "vectors.txt")
        phase1_reduce(gow, table, config.reduction)
        phase1 = len(gow.merge_log)
        phase2_reduce(gow, table, config.reduction)
        exports.write_merge_log(gow.merge_log, out / "merge_log.jsonl")
        exports.dump_json(exports.gow_to_dict(gow), out / "reduced_gow.json")
        print(f"phase1 merges: {phase1}, phase2 merges: "
              f"{len(gow.merge_log) - phase1}, final nodes: {gow.node_count()}")

    def build_got_stage():
        corpus = load_processed_corpus(out / "corpus.json")
        gow = _load_gow(out / "reduced_gow.json")
        got = build_got(corpus, gow, config.exclude_keywords)
        exports.dump_json(exports.got_to_dict(got), out / "got.json")
        print(f"GoT: {len(got.nodes)} tweet nodes over m={got.m} token nodes")

    def extract_stage():
        import warnings
        corpus = load_processed_corpus(out / "corpus.json")
        gow = _load_gow(out / "reduced_gow.json")
        with open(out / "got.json", encoding="utf-8") as fh:
            got = exports.got_from_dict(json.load(fh))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            edges = top_k_edges(got, config.k) if len(got.nodes) >= 2 else []
        exports.write_edges_tsv(edges, out / "edges.tsv")
        subgraph = induce_subgraph(edges) if edges else None
        cliques = maximal_cliques(subgraph, config.min_clique_size, got) \
            if subgraph else []
        reports = [clique_report(c, got, gow) for c in cliques]
        exports.dump_json(reports, out / "cliques.json")
        (out / "cliques.txt").write_text(render_reports(reports), encoding="utf-8")
        if subgraph and config.export_format != "json":
            exports.export_graph(subgraph, config.export_format,
                                 out / f"subgraph.{config.export_format}")
        with open(out / "corpus.json", encoding="utf-8") as fh:
            raw_count = json.load(fh)["raw_tweets"]
        initial = raw_count  # unknown here unless gow.json is present
        gow_path = out / "gow.json"
        if gow_path.exists():
            with open(gow_path, encoding="utf-8") as fh:
                initial = len(json.load(fh)["nodes"])
        stats = compute_stats(corpus, raw_count, initial, gow, got, edges, cliques)
        exports.dump_json(stats, out / "stats.json")
        write_stats_tsv(exports.round_floats(stats), out / "stats.tsv")
        print(f"{len(edges)} edges, {len(cliques)} cliques")

    stages = {
        "preprocess": preprocess,
        "train-embeddings": train_embeddings,
        "build-gow": build_gow_stage,
        "reduce": reduce_stage,
        "build-got": build_got_stage,
        "extract": extract_stage,
    }
    return _run_stage(args.command, stages[args.command])


if __name__ == "__main__":
    sys.exit(main())
