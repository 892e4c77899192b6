"""tweetgraph: sub-event detection in tweet corpora.

Builds a token co-occurrence graph, compresses it with embedding-guided node
merging, scores tweet pairs with a normalized mutual-information measure over
merged token sets, and extracts maximal cliques as sub-event keyword groups.
"""

from .corpus import (
    Corpus,
    EventTemplate,
    PreprocessConfig,
    ProcessedTweet,
    RawTweet,
    SyntheticConfig,
    corpus_stats,
    default_event_templates,
    generate_synthetic,
    load_corpus,
    preprocess_corpus,
    preprocess_tweet,
)
from .embeddings import (
    EmbeddingTable,
    TrainerConfig,
    cosine,
    load_vectors,
    most_similar,
    save_vectors,
    train_subword_skipgram,
    word_vector,
)
from .got import GoT, NmiEdge, TweetNode, build_got, nmi, nmi_from_counts, pmi, top_k_edges
from .gow import GoW, TokenNode, build_gow, co_weight_contribution, node_degree, sim_weight
from .pipeline import PipelineConfig, run_pipeline
from .reduction import MergeEvent, ReductionConfig, merge_nodes, phase1_reduce, phase2_reduce
from .subevents import Clique, Subgraph, clique_report, induce_subgraph, maximal_cliques

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
