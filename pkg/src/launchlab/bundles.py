"""Same-entity account clustering from bundle traces.

Three trace sources link user accounts to shared identifiers: co-purchase
inside one transaction (``in_tx``), a common funding address (``funder``,
with centralized-exchange funders excluded), and a shared relay bundle id
(``jito``). Accounts and identifiers form a bipartite graph; connected
components with at least two accounts become bundles.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .txparse import KIND_BUY, ParsedEvent

TRACE_KINDS = ("in_tx", "funder", "jito")

# Small built-in exchange hot-wallet list; extend via CexList at load time.
DEFAULT_CEX_ADDRESSES = frozenset(
    {
        "CEXBINANCEHOTWALLET000000000000000001",
        "CEXCOINBASEHOTWALLET00000000000000001",
        "CEXOKXHOTWALLET0000000000000000000001",
        "CEXBYBITHOTWALLET000000000000000000001",
    }
)


@dataclass(frozen=True)
class BundleTrace:
    account: str
    identifier_kind: str
    identifier: str

    def __post_init__(self) -> None:
        if self.identifier_kind not in TRACE_KINDS:
            raise ValueError(f"unknown identifier kind {self.identifier_kind!r}")
        if not self.identifier:
            raise ValueError("identifier must be non-empty")


@dataclass(frozen=True)
class Bundle:
    bundle_id: int
    accounts: frozenset[str]
    evidence: frozenset[tuple[str, str]]


@dataclass(frozen=True)
class CexList:
    """Known centralized-exchange funder addresses, excluded from clustering."""

    addresses: frozenset[str] = frozenset()

    @classmethod
    def from_iterable(cls, addresses) -> "CexList":
        return cls(frozenset(addresses))


class UnionFind:
    """Disjoint sets over strings with path compression and union by rank."""

    def __init__(self) -> None:
        self._parent: dict[str, str] = {}
        self._rank: dict[str, int] = defaultdict(int)

    def find(self, x: str) -> str:
        parent = self._parent
        if x not in parent:
            parent[x] = x
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: str, y: str) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self._rank[rx] < self._rank[ry]:
            rx, ry = ry, rx
        self._parent[ry] = rx
        if self._rank[rx] == self._rank[ry]:
            self._rank[rx] += 1

    def components(self) -> list[set[str]]:
        groups: dict[str, set[str]] = defaultdict(set)
        for x in self._parent:
            groups[self.find(x)].add(x)
        return list(groups.values())


def cluster(traces: list[BundleTrace], cex: CexList | None = None) -> list[Bundle]:
    """Merge accounts sharing identifiers into disjoint bundles.

    Funder traces whose identifier is a known exchange are dropped first;
    the built-in exchange list applies unless a CexList is given. The
    partition is independent of trace order; bundle ids are assigned by the
    lexicographically smallest member address, so output is fully
    deterministic. Singleton components are not bundles.
    """
    if cex is None:
        cex = CexList(DEFAULT_CEX_ADDRESSES)
    kept = [
        t
        for t in set(traces)
        if not (t.identifier_kind == "funder" and t.identifier in cex.addresses)
    ]
    uf = UnionFind()
    accounts: set[str] = set()
    id_evidence: dict[str, tuple[str, str]] = {}
    for t in kept:
        id_node = f"\x00{t.identifier_kind}:{t.identifier}"
        id_evidence[id_node] = (t.identifier_kind, t.identifier)
        uf.union(t.account, id_node)
        accounts.add(t.account)

    members: dict[str, set[str]] = defaultdict(set)
    evidence: dict[str, set[tuple[str, str]]] = defaultdict(set)
    for node in accounts:
        members[uf.find(node)].add(node)
    for id_node, ev in id_evidence.items():
        evidence[uf.find(id_node)].add(ev)

    bundles = []
    groups = [(min(g), g, evidence[root]) for root, g in members.items() if len(g) >= 2]
    for i, (_, group, ev) in enumerate(sorted(groups, key=lambda item: item[0])):
        bundles.append(Bundle(i, frozenset(group), frozenset(ev)))
    return bundles


def extract_in_tx_traces(events: list[ParsedEvent]) -> list[BundleTrace]:
    """Co-purchase traces: one per buyer for transactions with >= 2 buyers."""
    buyers: dict[str, set[str]] = defaultdict(set)
    for e in events:
        if e.kind == KIND_BUY:
            buyers[e.tx_id].add(e.actor)
    traces = []
    for tx_id in sorted(buyers):
        actors = buyers[tx_id]
        if len(actors) >= 2:
            traces.extend(BundleTrace(a, "in_tx", tx_id) for a in sorted(actors))
    return traces


def bundle_stats(
    bundles: list[Bundle],
    holdings: dict[str, int],
    holders: set[str],
) -> tuple[float | None, float | None]:
    """(bundled share of holders, bundled share of circulating supply).

    Circulating supply is the sum of holder balances. Returns (None, None)
    when there are no holders.
    """
    if not holders:
        return None, None
    bundled = set()
    for b in bundles:
        bundled |= b.accounts
    bundled_holders = bundled & holders
    circulating = sum(holdings.get(h, 0) for h in holders)
    holder_ratio = len(bundled_holders) / len(holders)
    if circulating <= 0:
        return holder_ratio, None
    holding_pct = sum(holdings.get(h, 0) for h in bundled_holders) / circulating
    return holder_ratio, holding_pct
