import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ccemap.analysis import (
    CooccurrenceMatrix,
    apply_block_order,
    block_order,
    cluster_keywords,
    cluster_srs,
    cooccurrence,
    describe_clusters,
    dominant_cluster,
    record_tokens,
    sr_counts,
    sr_frequency_report,
    term_frequency_report,
    tokenize,
)
from ccemap.corpus import CceRecord, Corpus, SrId
from ccemap.errors import CcemapError

from conftest import make_catalog


def corpus_from_bits(bits_rows, texts=None, catalog=None):
    catalog = catalog or make_catalog(len(bits_rows[0]) if bits_rows else 0)
    records = []
    label_sets = {}
    for i, bits in enumerate(bits_rows):
        cce_id = f"CCE-5{i:04d}-1"
        text = texts[i] if texts else f"record {i} text"
        records.append(CceRecord.make(cce_id, "source", {"description": text}))
        label_sets[cce_id] = frozenset(
            sr for sr, b in zip(catalog, bits) if b
        )
    return Corpus(product="source", records=records, sr_catalog=catalog, label_sets=label_sets)


class TestSrCounts:
    def test_hand_tally(self):
        corpus = corpus_from_bits([[1, 0], [1, 1], [0, 0]])
        counts = sr_counts(corpus)
        assert counts.counts.tolist() == [2, 1]
        assert counts.zero_labels == 1

    def test_empty_corpus(self):
        corpus = corpus_from_bits([], catalog=make_catalog(3))
        counts = sr_counts(corpus)
        assert counts.counts.tolist() == [0, 0, 0]
        assert counts.zero_labels == 0

    def test_matches_diagonal_of_cooccurrence(self, rng):
        bits = (rng.random((12, 6)) < 0.4).astype(int).tolist()
        corpus = corpus_from_bits(bits)
        assert (
            sr_counts(corpus).counts.tolist()
            == np.diag(cooccurrence(corpus).values).tolist()
        )


class TestCooccurrence:
    def test_single_record_pair(self):
        corpus = corpus_from_bits([[1, 1, 0]])
        c = cooccurrence(corpus).values
        assert c[0, 1] == 1 and c[1, 0] == 1 and c[2, 2] == 0

    def test_disjoint_labels_block_diagonal(self):
        corpus = corpus_from_bits([[1, 1, 0, 0], [0, 0, 1, 1]])
        c = cooccurrence(corpus).values
        assert c[0, 2] == 0 and c[0, 3] == 0 and c[1, 2] == 0 and c[1, 3] == 0
        assert c[0, 1] == 1 and c[2, 3] == 1

    def test_matches_pairwise_loop_oracle(self, rng):
        bits = (rng.random((15, 5)) < 0.45).astype(int).tolist()
        corpus = corpus_from_bits(bits)
        assert cooccurrence(corpus).values.tolist() == oracles.cooccurrence(bits, 5)

    @given(
        st.lists(
            st.lists(st.integers(0, 1), min_size=4, max_size=4), min_size=0, max_size=12
        )
    )
    @settings(max_examples=40, deadline=None)
    def test_symmetry_and_diagonal_bound(self, bits):
        corpus = corpus_from_bits(bits, catalog=make_catalog(4))
        c = cooccurrence(corpus).values
        assert (c == c.T).all()
        for a in range(4):
            for b in range(4):
                assert c[a, b] <= max(min(c[a, a], c[b, b]), 0) or a == b


def planted_corpus(rng, n_blocks=3, srs_per_block=4, records_per_block=30, noise=0.05):
    """Records cite SRs inside one block, with light cross-block noise."""
    n_req = n_blocks * srs_per_block
    catalog = make_catalog(n_req)
    bits_rows = []
    truth = {}
    for block in range(n_blocks):
        lo = block * srs_per_block
        for sr in catalog[lo : lo + srs_per_block]:
            truth[sr] = block
        for _ in range(records_per_block):
            bits = [0] * n_req
            members = rng.choice(srs_per_block, size=2, replace=False)
            for m in members:
                bits[lo + int(m)] = 1
            if rng.random() < noise:
                bits[int(rng.integers(0, n_req))] = 1
            bits_rows.append(bits)
    return corpus_from_bits(bits_rows, catalog=catalog), truth


def adjusted_rand(assignment_a: dict, assignment_b: dict) -> float:
    # contingency-based ARI
    from collections import Counter

    keys = sorted(assignment_a)
    n = len(keys)
    labels_a = Counter(assignment_a[k] for k in keys)
    labels_b = Counter(assignment_b[k] for k in keys)
    joint = Counter((assignment_a[k], assignment_b[k]) for k in keys)
    sum_joint = sum(math.comb(v, 2) for v in joint.values())
    sum_a = sum(math.comb(v, 2) for v in labels_a.values())
    sum_b = sum(math.comb(v, 2) for v in labels_b.values())
    total = math.comb(n, 2)
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        return 1.0
    return (sum_joint - expected) / (max_index - expected)


class TestClustering:
    def test_two_block_separable_case(self):
        corpus = corpus_from_bits([[1, 1, 0, 0]] * 3 + [[0, 0, 1, 1]] * 3)
        clusters = cluster_srs(cooccurrence(corpus), 2)
        members = sorted(tuple(sr.render() for sr in c.members) for c in clusters)
        assert members == [("SR 1.1", "SR 1.2"), ("SR 1.3", "SR 1.4")]

    def test_singletons_when_cluster_count_equals_srs(self):
        corpus = corpus_from_bits([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        clusters = cluster_srs(cooccurrence(corpus), 3)
        assert all(len(c.members) == 1 for c in clusters)

    def test_planted_three_blocks_recovered(self, rng):
        corpus, truth = planted_corpus(rng)
        clusters = cluster_srs(cooccurrence(corpus), 3)
        found = {sr: c.cluster_id for c in clusters for sr in c.members}
        assert adjusted_rand(truth, found) >= 0.9

    def test_partition_of_referenced_srs(self, rng):
        bits = (rng.random((20, 6)) < 0.3).astype(int)
        bits[:, 5] = 0  # SR never referenced
        corpus = corpus_from_bits(bits.tolist())
        clusters = cluster_srs(cooccurrence(corpus), 2)
        referenced = [sr for c in clusters if c.cluster_id != 0 for sr in c.members]
        assert len(referenced) == len(set(referenced))
        assert set(referenced) == {
            sr
            for i, sr in enumerate(corpus.sr_catalog)
            if cooccurrence(corpus).values[i, i] > 0
        }
        unref = [c for c in clusters if c.cluster_id == 0]
        assert len(unref) == 1 and unref[0].members == (corpus.sr_catalog[5],)

    def test_out_of_range_cluster_count(self):
        corpus = corpus_from_bits([[1, 1]])
        with pytest.raises(CcemapError):
            cluster_srs(cooccurrence(corpus), 3)
        with pytest.raises(CcemapError):
            cluster_srs(cooccurrence(corpus), 0)

    def test_deterministic_across_runs(self, rng):
        corpus, _ = planted_corpus(rng)
        one = cluster_srs(cooccurrence(corpus), 3)
        two = cluster_srs(cooccurrence(corpus), 3)
        assert [(c.cluster_id, c.members) for c in one] == [
            (c.cluster_id, c.members) for c in two
        ]


class TestKeywords:
    def test_exclusive_term_ranks_first(self):
        corpus = corpus_from_bits(
            [[1, 0], [1, 0], [0, 1], [0, 1]],
            texts=[
                "auditd daemon watches events",
                "auditd rules cover commands",
                "firewall zone setting",
                "firewall interface policy",
            ],
        )
        clusters = cluster_srs(cooccurrence(corpus), 2)
        first = next(c for c in clusters if SrId(1, 1) in c.members)
        keywords = cluster_keywords(first, corpus, n=5)
        assert keywords[0][0] == "auditd"

    def test_universal_terms_weigh_zero(self):
        corpus = corpus_from_bits(
            [[1, 0], [0, 1]], texts=["shared words here", "shared words here"]
        )
        clusters = cluster_srs(cooccurrence(corpus), 2)
        assert cluster_keywords(clusters[0], corpus, n=5) == []

    def test_topic_vocabulary_in_top_terms(self):
        # one cluster of audit-flavored records among unrelated ones
        texts = [
            "auditd collects information on privileged commands use",
            "ensure auditd collects privileged commands information",
            "auditd collects use of privileged commands",
            "disk space configure ensure partition",
            "network interface redirects disable",
            "password quality enforce length",
        ]
        bits = [[1, 0, 0], [1, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 1]]
        corpus = corpus_from_bits(bits, texts=texts)
        clusters = cluster_srs(cooccurrence(corpus), 3)
        audit = next(c for c in clusters if SrId(1, 1) in c.members)
        top = [term for term, _ in cluster_keywords(audit, corpus, n=10)]
        for expected in ["auditd", "collects", "commands", "information", "privileged"]:
            assert expected in top

    def test_tokenizer_drops_stopwords_and_numbers(self):
        assert tokenize("The policy MUST be enabled on 100 hosts ipv4") == [
            "policy",
            "enabled",
            "hosts",
            "ipv4",
        ]


class TestDominantCluster:
    def setup_method(self):
        self.clusters = cluster_srs(
            cooccurrence(corpus_from_bits([[1, 1, 0, 0]] * 2 + [[0, 0, 1, 1]] * 2)), 2
        )

    def test_both_srs_same_cluster(self):
        cid = dominant_cluster([SrId(1, 1), SrId(1, 2)], self.clusters)
        assert cid == next(
            c.cluster_id for c in self.clusters if SrId(1, 1) in c.members
        )

    def test_majority_wins(self):
        cid = dominant_cluster([SrId(1, 1), SrId(1, 2), SrId(1, 3)], self.clusters)
        assert cid == next(c.cluster_id for c in self.clusters if SrId(1, 1) in c.members)

    def test_tie_takes_lower_cluster_id(self):
        cid = dominant_cluster([SrId(1, 1), SrId(1, 3)], self.clusters)
        assert cid == min(c.cluster_id for c in self.clusters)

    def test_no_labels_returns_none(self):
        assert dominant_cluster([], self.clusters) is None


class TestBlockOrder:
    def test_single_cluster_identity(self):
        corpus = corpus_from_bits([[1, 1], [1, 1]])
        perm = block_order(cooccurrence(corpus), 1)
        assert perm == [0, 1]

    def test_block_diagonal_already_sorted(self):
        corpus = corpus_from_bits([[1, 1, 0, 0]] * 3 + [[0, 0, 1, 1]] * 2)
        perm = block_order(cooccurrence(corpus), 2)
        assert perm == [0, 1, 2, 3]  # larger block first, catalog order inside

    def test_planted_blocks_become_contiguous(self, rng):
        corpus, truth = planted_corpus(rng)
        matrix = cooccurrence(corpus)
        perm = block_order(matrix, 3)
        assert sorted(perm) == list(range(len(corpus.sr_catalog)))
        blocks = [truth[corpus.sr_catalog[i]] for i in perm]
        # each planted block occupies one contiguous run
        runs = [b for i, b in enumerate(blocks) if i == 0 or blocks[i - 1] != b]
        assert len(runs) == 3

    def test_apply_permutation(self):
        corpus = corpus_from_bits([[1, 0, 1], [0, 1, 0]])
        matrix = cooccurrence(corpus)
        perm = [2, 0, 1]
        permuted = apply_block_order(matrix, perm)
        assert permuted.values[0, 0] == matrix.values[2, 2]
        assert permuted.catalog[0] == matrix.catalog[2]


class TestTermFrequency:
    def test_dominant_terms_lead(self):
        texts = ["configured enabled auditing"] * 3 + ["rare words"]
        corpus = corpus_from_bits([[1]] * 4, texts=texts)
        top = term_frequency_report(corpus.records, n=3)
        assert [t for t, _ in top] == ["auditing", "configured", "enabled"]
        assert all(count == 3 for _, count in top)

    def test_empty_records(self):
        assert term_frequency_report([], n=5) == []

    def test_matches_counter_oracle(self, rng):
        words = ["alpha", "beta", "gamma", "delta"]
        texts = [
            " ".join(rng.choice(words, size=rng.integers(1, 6)).tolist()) for _ in range(10)
        ]
        corpus = corpus_from_bits([[1]] * 10, texts=texts)
        expected = {}
        for text in texts:
            for token in text.split():
                expected[token] = expected.get(token, 0) + 1
        report = dict(term_frequency_report(corpus.records, n=10))
        assert report == expected


class TestSrFrequency:
    def test_reproduces_reference_counts(self):
        relations = []
        relations += [(SrId(5, 2), "yes")] * 155 + [(SrId(5, 2), "no")] * 245
        relations += [(SrId(7, 6), "yes")] * 282 + [(SrId(7, 6), "maybe")] * 50
        rows = sr_frequency_report(relations)
        assert rows[0] == (SrId(5, 2), 400, 155)
        assert rows[1] == (SrId(7, 6), 332, 282)

    def test_no_accepted_relations(self):
        rows = sr_frequency_report([(SrId(1, 1), "no"), (SrId(1, 1), "maybe")])
        assert rows == [(SrId(1, 1), 2, 0)]

    def test_matches_groupby_oracle(self, rng):
        catalog = make_catalog(5)
        labels = ["yes", "no", "maybe", "pending"]
        relations = [
            (catalog[int(rng.integers(0, 5))], labels[int(rng.integers(0, 4))])
            for _ in range(200)
        ]
        totals = {}
        accepted = {}
        for sr, label in relations:
            totals[sr] = totals.get(sr, 0) + 1
            if label == "yes":
                accepted[sr] = accepted.get(sr, 0) + 1
        for sr, total, acc in sr_frequency_report(relations):
            assert totals[sr] == total and accepted.get(sr, 0) == acc


class TestDescribeClusters:
    def test_representatives_sorted_by_overlap(self):
        corpus = corpus_from_bits(
            [[1, 1], [1, 0], [0, 0]],
            texts=["audit log policy", "audit trail", "unrelated"],
        )
        clusters = describe_clusters(cluster_srs(cooccurrence(corpus), 1), corpus)
        assert clusters[0].representatives[0] == "CCE-50000-1"
        assert "CCE-50002-1" not in clusters[0].representatives
        assert clusters[0].keywords  # non-empty when members have records
