import random

import pytest

from tweetgraph.gow import GraphError, build_gow, node_degree
from tweetgraph.reduction import (
    ReductionConfig,
    merge_counts,
    merge_nodes,
    phase1_reduce,
    phase2_reduce,
)

from helpers import make_corpus, make_gow, planted_table, random_gow

FIG2 = [["virus", "test", "positive"], ["corona", "test"]]


class TestMergeNodes:
    def test_fig2_merge(self):
        gow = build_gow(make_corpus(FIG2))
        corona, virus = gow.token_index["corona"], gow.token_index["virus"]
        test = gow.token_index["test"]
        merge_nodes(gow, corona, virus)
        assert gow.adj[virus][test] == pytest.approx(1.5)
        assert corona not in gow.nodes
        assert gow.nodes[virus].members == {"virus", "corona"}
        assert gow.nodes[virus].leading_token == "virus"
        assert gow.token_index["corona"] == virus

    def test_self_loop_discarded(self):
        # two mutually linked nodes, no shared neighbor: the weight vanishes
        gow = make_gow(["a", "b"], [(0, 1, 2.5)])
        total_before = gow.total_co_weight()
        merge_nodes(gow, 0, 1)
        assert gow.total_co_weight() == total_before - 2.5
        assert gow.adj[1] == {}

    def test_degree_growth_when_neighbors_subset(self):
        # src neighbors {dst, c} and dst neighbors {src, c, d}
        gow = make_gow(["src", "dst", "c", "d"],
                       [(0, 1, 1.0), (0, 2, 2.0), (1, 2, 0.5), (1, 3, 0.25)])
        d_src = node_degree(gow, 0)
        d_dst = node_degree(gow, 1)
        w_sd = gow.adj[0][1]
        merge_nodes(gow, 0, 1)
        assert node_degree(gow, 1) == pytest.approx(d_dst + d_src - 2 * w_sd)

    def test_merge_into_self_rejected(self):
        gow = make_gow(["a"], [])
        with pytest.raises(GraphError):
            merge_nodes(gow, 0, 0)

    def test_unknown_node_rejected(self):
        gow = make_gow(["a", "b"], [(0, 1, 1.0)])
        with pytest.raises(GraphError):
            merge_nodes(gow, 0, 5)

    def test_weight_conservation_random(self):
        rng = random.Random(123)
        for _ in range(60):
            gow = random_gow(rng, max_nodes=40)
            for _ in range(6):
                if gow.node_count() < 2:
                    break
                src, dst = rng.sample(sorted(gow.nodes), 2)
                discarded = gow.adj[src].get(dst, 0.0)
                before = gow.total_co_weight()
                merge_nodes(gow, src, dst)
                assert gow.total_co_weight() == pytest.approx(before - discarded,
                                                              abs=1e-9)

    def test_member_partition_invariant(self):
        rng = random.Random(5)
        gow = random_gow(rng, max_nodes=30)
        all_tokens = {tok for n in gow.nodes.values() for tok in n.members}
        for _ in range(10):
            src, dst = rng.sample(sorted(gow.nodes), 2)
            merge_nodes(gow, src, dst)
            seen = set()
            for nid, node in gow.nodes.items():
                assert not (node.members & seen)
                seen |= node.members
                for tok in node.members:
                    assert gow.token_index[tok] == nid
            assert seen == all_tokens

    def test_node_count_drops_by_one_per_merge(self):
        gow = build_gow(make_corpus(FIG2))
        initial = gow.node_count()
        merge_nodes(gow, 0, 1)
        merge_nodes(gow, 2, 1)
        assert gow.node_count() == initial - len(gow.merge_log)
        assert [ev.sequence for ev in gow.merge_log] == [0, 1]


def df_corpus():
    """floridah appears once; florida and friends are frequent."""
    docs = [["florida", "beach", "storm"]] * 6 + \
           [["beach", "storm", "warning"]] * 6 + \
           [["floridah", "storm"]]
    return make_corpus(docs)


PHASE1_TABLE = planted_table({
    "florida": [1.0, 0.0, 0.0],
    "floridah": [0.98, 0.2, 0.0],
    "beach": [0.0, 1.0, 0.0],
    "storm": [0.0, 0.0, 1.0],
    "warning": [0.1, 0.6, 0.6],
})


class TestPhase1:
    def test_rare_word_merges_into_intended(self):
        gow = build_gow(df_corpus())
        phase1_reduce(gow, PHASE1_TABLE, ReductionConfig(min_tweet_df=5))
        florida = gow.token_index["florida"]
        assert gow.token_index["floridah"] == florida
        assert "floridah" in gow.nodes[florida].members
        assert merge_counts(gow) == {1: 1}
        assert gow.merge_log[0].phase == 1
        assert gow.merge_log[0].trigger_similarity > 0.9

    def test_no_rare_nodes_leaves_graph_unchanged(self):
        gow = build_gow(df_corpus())
        before = gow.node_count()
        phase1_reduce(gow, PHASE1_TABLE, ReductionConfig(min_tweet_df=1))
        assert gow.node_count() == before
        assert gow.merge_log == []

    def test_unresolvable_node_recorded(self):
        gow = build_gow(make_corpus([["aaa", "bbb"]] * 6 + [["zzz", "aaa"]]))
        table = planted_table({"aaa": [1.0, 0.0], "bbb": [0.0, 1.0]})
        phase1_reduce(gow, table, ReductionConfig(min_tweet_df=5))
        zzz = gow.token_index["zzz"]
        assert zzz in gow.nodes
        assert gow.phase1_unresolved == [zzz]

    def test_rare_candidates_resolve_through_parents(self):
        # beta merges first (df 1), then alpha's top hit beta resolves to gamma
        docs = [["gamma", "filler"]] * 8 + [["beta"]] + [["alpha"]] * 2
        gow = build_gow(make_corpus(docs))
        table = planted_table({
            "gamma": [1.0, 0.0, 0.0],
            "beta": [0.95, 0.3, 0.0],
            "alpha": [0.9, 0.43, 0.0],  # closest to beta, then gamma
            "filler": [0.0, 0.0, 1.0],
        })
        assert abs(0.95 * 0.9 + 0.3 * 0.43) > 0.9  # alpha-beta above alpha-gamma
        phase1_reduce(gow, table, ReductionConfig(min_tweet_df=5))
        gamma = gow.token_index["gamma"]
        assert gow.token_index["beta"] == gamma
        assert gow.token_index["alpha"] == gamma
        assert gow.nodes[gamma].members >= {"gamma", "beta", "alpha"}

    def test_postcondition_no_rare_live_nodes(self):
        gow = build_gow(df_corpus())
        config = ReductionConfig(min_tweet_df=5)
        phase1_reduce(gow, PHASE1_TABLE, config)
        for nid, node in gow.nodes.items():
            assert node.tweet_df >= config.min_tweet_df or \
                nid in gow.phase1_unresolved


PHASE2_TABLE = planted_table({
    "test": [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
    "virus": [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    "corona": [0.9, 0.1, 0.0, 0.0, 0.0, 0.0],
    "positive": [0.0, 0.0, 0.0, 1.0, 0.2, 0.0],
    "zzz": [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
    "yyy": [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
})


def phase2_corpus():
    return make_corpus([["test", "virus"], ["test", "corona"],
                        ["test", "positive"], ["zzz", "yyy"]])


class TestPhase2:
    def test_similar_neighbor_merged_with_trigger(self):
        gow = build_gow(phase2_corpus())
        phase2_reduce(gow, PHASE2_TABLE, ReductionConfig(top_n=1))
        virus = gow.token_index["virus"]
        assert gow.token_index["corona"] == virus
        events = [ev for ev in gow.merge_log if ev.phase == 2]
        assert len(events) == 1
        assert events[0].src_leading == "corona"
        assert events[0].dst_leading == "virus"
        expected = 0.9 / (0.9 ** 2 + 0.1 ** 2) ** 0.5
        assert events[0].trigger_similarity == pytest.approx(expected, abs=1e-9)

    def test_dissimilar_neighbors_untouched(self):
        gow = build_gow(make_corpus([["test", "virus"], ["test", "positive"],
                                     ["zzz", "yyy"]]))
        phase2_reduce(gow, PHASE2_TABLE, ReductionConfig(top_n=1))
        assert not [ev for ev in gow.merge_log if ev.phase == 2]

    def test_max_similarity_wins(self):
        # hub h; neighbor a's top-2 contains both b (0.9-ish) and c (lower)
        table = planted_table({
            "h": [0.0, 0.0, 0.0, 1.0],
            "a": [0.9, 0.436, 0.0, 0.0],
            "b": [1.0, 0.0, 0.0, 0.0],
            "c": [0.0, 1.0, 0.0, 0.0],
        })
        gow = build_gow(make_corpus([["h", "a"], ["h", "b"], ["h", "c"]]))
        phase2_reduce(gow, table, ReductionConfig(top_n=3))
        b = gow.token_index["b"]
        assert gow.token_index["a"] == b
        ev = [e for e in gow.merge_log if e.src_leading == "a"][0]
        assert ev.dst_leading == "b"

    def test_member_tokens_match_too(self):
        # "corona" was merged into "virus"; a hit on the member "corona"
        # must still resolve to the virus node
        gow = build_gow(phase2_corpus())
        merge_nodes(gow, gow.token_index["corona"], gow.token_index["virus"])
        table = planted_table({
            "test": [0.0, 0.0, 1.0, 0.0],
            "virus": [1.0, 0.0, 0.0, 0.0],
            "corona": [0.0, 1.0, 0.0, 0.0],
            "positive": [0.05, 0.99, 0.0, 0.0],  # nearest: corona (a member)
            "zzz": [0.0, 0.0, 0.0, 1.0],
            "yyy": [0.0, 0.0, 0.5, 0.5],
        })
        phase2_reduce(gow, table, ReductionConfig(top_n=1))
        assert gow.token_index["positive"] == gow.token_index["virus"]


class TestDeterminism:
    def test_identical_merge_sequences(self):
        def run():
            gow = build_gow(phase2_corpus())
            phase1_reduce(gow, PHASE2_TABLE, ReductionConfig(min_tweet_df=2, top_n=1))
            phase2_reduce(gow, PHASE2_TABLE, ReductionConfig(min_tweet_df=2, top_n=1))
            return gow.merge_log

        assert run() == run()


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ReductionConfig(min_tweet_df=0).validate()
        ReductionConfig().validate()
