"""Clustering tests, including the brute-force BFS component oracle."""

import random
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from launchlab.bundles import (
    Bundle,
    BundleTrace,
    CexList,
    cluster,
    extract_in_tx_traces,
    bundle_stats,
)
from launchlab.txparse import ParsedEvent


def bfs_partition(traces):
    """Independent oracle: connected components over the bipartite graph."""
    adj = {}
    for t in traces:
        id_node = ("id", t.identifier_kind, t.identifier)
        acct = ("acct", t.account)
        adj.setdefault(id_node, set()).add(acct)
        adj.setdefault(acct, set()).add(id_node)
    seen = set()
    groups = []
    for node in adj:
        if node in seen or node[0] != "acct":
            continue
        queue = deque([node])
        seen.add(node)
        component = set()
        while queue:
            current = queue.popleft()
            if current[0] == "acct":
                component.add(current[1])
            for other in adj[current]:
                if other not in seen:
                    seen.add(other)
                    queue.append(other)
        if len(component) >= 2:
            groups.append(frozenset(component))
    return sorted(groups, key=min)


def partition_of(bundles):
    return sorted((b.accounts for b in bundles), key=min)


def test_transitive_union():
    traces = [
        BundleTrace("A", "jito", "J1"),
        BundleTrace("B", "jito", "J1"),
        BundleTrace("B", "funder", "F1"),
        BundleTrace("C", "funder", "F1"),
    ]
    bundles = cluster(traces)
    assert partition_of(bundles) == [frozenset({"A", "B", "C"})]
    assert bundles[0].evidence == {("jito", "J1"), ("funder", "F1")}


def test_cex_funder_excluded():
    traces = [BundleTrace("A", "funder", "EXCH"), BundleTrace("B", "funder", "EXCH")]
    assert cluster(traces, CexList(frozenset({"EXCH"}))) == []


def test_cex_only_applies_to_funder_kind():
    traces = [BundleTrace("A", "jito", "EXCH"), BundleTrace("B", "jito", "EXCH")]
    assert len(cluster(traces, CexList(frozenset({"EXCH"})))) == 1


def test_two_disjoint_bundles():
    traces = [
        BundleTrace("A", "in_tx", "T1"),
        BundleTrace("B", "in_tx", "T1"),
        BundleTrace("C", "in_tx", "T2"),
        BundleTrace("D", "in_tx", "T2"),
    ]
    assert partition_of(cluster(traces)) == [frozenset({"A", "B"}), frozenset({"C", "D"})]


def test_identifiers_namespaced_by_kind():
    # the same identifier string under different kinds must not merge
    traces = [
        BundleTrace("A", "jito", "X"),
        BundleTrace("B", "jito", "X"),
        BundleTrace("C", "funder", "X"),
        BundleTrace("D", "funder", "X"),
    ]
    assert partition_of(cluster(traces)) == [frozenset({"A", "B"}), frozenset({"C", "D"})]


def test_singletons_are_not_bundles():
    assert cluster([BundleTrace("A", "jito", "J1")]) == []


def test_empty_input():
    assert cluster([]) == []


def test_bundle_ids_deterministic_by_smallest_member():
    traces = [
        BundleTrace("Z", "in_tx", "T1"),
        BundleTrace("Y", "in_tx", "T1"),
        BundleTrace("A", "in_tx", "T2"),
        BundleTrace("B", "in_tx", "T2"),
    ]
    bundles = cluster(traces)
    assert [b.bundle_id for b in bundles] == [0, 1]
    assert min(bundles[0].accounts) == "A"
    assert min(bundles[1].accounts) == "Y"


def random_traces(rng, n_accounts=20, n_traces=25):
    accounts = [f"A{i:02d}" for i in range(n_accounts)]
    kinds = ("in_tx", "funder", "jito")
    return [
        BundleTrace(rng.choice(accounts), rng.choice(kinds), f"I{rng.randrange(8)}")
        for _ in range(n_traces)
    ]


def test_matches_bfs_oracle_on_random_instances():
    rng = random.Random(7)
    for _ in range(300):
        traces = random_traces(rng)
        assert partition_of(cluster(traces)) == bfs_partition(traces)


def test_idempotent_on_own_output():
    rng = random.Random(11)
    for _ in range(50):
        traces = random_traces(rng)
        bundles = cluster(traces)
        rederived = [
            BundleTrace(account, "in_tx", f"bundle{b.bundle_id}")
            for b in bundles
            for account in b.accounts
        ]
        assert partition_of(cluster(rederived)) == partition_of(bundles)


@given(st.integers(min_value=0, max_value=2**30), st.integers(min_value=0, max_value=2**30))
@settings(max_examples=30)
def test_permutation_invariance(seed, shuffle_seed):
    traces = random_traces(random.Random(seed))
    shuffled = list(traces)
    random.Random(shuffle_seed).shuffle(shuffled)
    assert partition_of(cluster(traces)) == partition_of(cluster(shuffled))


@given(st.integers(min_value=0, max_value=2**30))
@settings(max_examples=30)
def test_adding_trace_never_splits(seed):
    rng = random.Random(seed)
    traces = random_traces(rng)
    before = partition_of(cluster(traces))
    extra = BundleTrace(f"A{rng.randrange(20):02d}", "funder", f"I{rng.randrange(8)}")
    after = partition_of(cluster(traces + [extra]))
    for group in before:
        assert any(group <= merged for merged in after)


class TestInTxTraces:
    def _buy(self, tx_id, actor, ts=0):
        return ParsedEvent(tx_id, "buy", actor, 10, 5, ts)

    def test_multi_buyer_tx(self):
        traces = extract_in_tx_traces([self._buy("T", "A"), self._buy("T", "B")])
        assert sorted((t.account, t.identifier_kind, t.identifier) for t in traces) == [
            ("A", "in_tx", "T"),
            ("B", "in_tx", "T"),
        ]

    def test_single_buyer_no_trace(self):
        assert extract_in_tx_traces([self._buy("T", "A")]) == []

    def test_five_account_bundle_recovered(self):
        accounts = [f"A{i}" for i in range(5)]
        events = [self._buy("T", a) for a in accounts]
        bundles = cluster(extract_in_tx_traces(events))
        assert partition_of(bundles) == [frozenset(accounts)]


class TestBundleStats:
    def test_no_bundles(self):
        ratio, pct = bundle_stats([], {"A": 10}, {"A"})
        assert (ratio, pct) == (0.0, 0.0)

    def test_all_holders_bundled(self):
        bundles = [Bundle(0, frozenset({"A", "B"}), frozenset())]
        ratio, pct = bundle_stats(bundles, {"A": 60, "B": 40}, {"A", "B"})
        assert (ratio, pct) == (1.0, 1.0)

    def test_partial(self):
        bundles = [Bundle(0, frozenset({"A", "B"}), frozenset())]
        holdings = {"A": 10, "B": 20, **{f"H{i}": 70 / 8 for i in range(8)}}
        holders = set(holdings)
        ratio, pct = bundle_stats(bundles, holdings, holders)
        assert ratio == pytest.approx(0.2)
        assert pct == pytest.approx(0.3)

    def test_zero_holders_is_null(self):
        assert bundle_stats([], {}, set()) == (None, None)
