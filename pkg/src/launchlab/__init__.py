"""Launchpad token-launch analysis toolkit.

Parses launch-phase transactions from net balance changes, clusters
same-entity account bundles, computes launch features, annotates risk
levels, and ships a deterministic launchpad/AMM simulator that generates
fully labeled synthetic corpora for end-to-end verification.
"""

__version__ = "0.1.0"
