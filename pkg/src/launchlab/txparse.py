"""Transaction classification from net balance changes.

A transaction is classified by where the launch token flowed: freshly minted
(create / create-and-buy), between a user and a program-owned pool vault
(buy / sell), both directions for one user inside a single transaction
(wash trade), or strictly between user accounts (transfer).

Net deltas alone cannot see a wash trade whose legs cancel, so transactions
optionally carry per-leg gross swap flows; when absent, legs are derived
from the net deltas.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

KIND_CREATE = "create"
KIND_CREATE_AND_BUY = "create_and_buy"
KIND_BUY = "buy"
KIND_SELL = "sell"
KIND_WASH = "wash"
KIND_TRANSFER = "transfer"
KIND_UNKNOWN = "unknown"

EVENT_KINDS = (
    KIND_CREATE,
    KIND_CREATE_AND_BUY,
    KIND_BUY,
    KIND_SELL,
    KIND_WASH,
    KIND_TRANSFER,
    KIND_UNKNOWN,
)

# Transaction-level report classes: buy and sell collapse into "swap".
REPORT_CLASSES = (KIND_CREATE, KIND_CREATE_AND_BUY, "swap", KIND_WASH, KIND_TRANSFER, KIND_UNKNOWN)


class ParseError(Exception):
    """A transaction violated the raw-record invariants."""


@dataclass(frozen=True)
class BalanceDelta:
    """Net balance change of one account within one transaction."""

    account: str
    sol_delta: int = 0
    token_delta: int = 0


@dataclass(frozen=True)
class SwapLeg:
    """Gross user-side flow of one swap leg against a pool vault.

    A buy leg has ``token_delta > 0`` and ``sol_delta <= 0``; a sell leg the
    mirror. Legs let the parser see wash trades whose net deltas cancel.
    """

    account: str
    token_delta: int
    sol_delta: int


@dataclass(frozen=True)
class RawTransaction:
    tx_id: str
    slot_time: int
    signer: str
    deltas: tuple[BalanceDelta, ...]
    involves_mint_instruction: bool = False
    pool_accounts: frozenset[str] = frozenset()
    legs: tuple[SwapLeg, ...] = ()


@dataclass(frozen=True)
class ParsedEvent:
    tx_id: str
    kind: str
    actor: str
    token_amount: int
    base_amount: int
    timestamp: int
    counterparty: str = ""  # transfer receiver when unambiguous
    note: str = ""


@dataclass
class BreakdownReport:
    """Per-class transaction counts mirroring the launch-sale breakdown table."""

    counts: Counter = field(default_factory=Counter)
    total: int = 0
    reorder_warnings: int = 0

    def percentage(self, klass: str) -> float:
        if self.total == 0:
            return 0.0
        return 100.0 * self.counts.get(klass, 0) / self.total

    def rows(self) -> list[tuple[str, int, float]]:
        """(class, count, percentage) rows; unknown omitted when empty."""
        out = []
        for klass in REPORT_CLASSES:
            if klass == KIND_UNKNOWN and self.counts.get(klass, 0) == 0:
                continue
            out.append((klass, self.counts.get(klass, 0), self.percentage(klass)))
        return out


def _validate(tx: RawTransaction, dust: int) -> None:
    token_sum = sum(d.token_delta for d in tx.deltas)
    if not tx.involves_mint_instruction and abs(token_sum) > dust:
        raise ParseError(f"{tx.tx_id}: token deltas sum to {token_sum} without a mint")
    sol_sum = sum(d.sol_delta for d in tx.deltas)
    if sol_sum > 0:
        raise ParseError(f"{tx.tx_id}: net SOL created out of thin air ({sol_sum})")


def _derived_legs(tx: RawTransaction) -> tuple[SwapLeg, ...]:
    """One leg per user account whose net token delta is matched by a pool."""
    pool_token = sum(d.token_delta for d in tx.deltas if d.account in tx.pool_accounts)
    if pool_token == 0:
        return ()
    legs = []
    for d in tx.deltas:
        if d.account in tx.pool_accounts or d.token_delta == 0:
            continue
        legs.append(SwapLeg(d.account, d.token_delta, d.sol_delta))
    return tuple(legs)


def parse_transaction(tx: RawTransaction, dust: int = 0) -> list[ParsedEvent]:
    """Classify one transaction into parsed events.

    Rules, in order: mint instruction -> create / create_and_buy; a single
    pool-matched user inflow or outflow -> buy / sell; one user with gross
    legs in both directions -> wash; user-to-user token flow with no pool
    delta -> transfer; several pool-matched buyers -> one buy per account.
    Anything else is an explicit ``unknown`` event, never dropped.

    ``dust`` ignores |token_delta| at or below the threshold (rounding noise).
    """
    _validate(tx, dust)
    ts = tx.slot_time
    pool = tx.pool_accounts
    user_deltas = [d for d in tx.deltas if d.account not in pool]
    pool_token = sum(d.token_delta for d in tx.deltas if d.account in pool)
    pool_sol = sum(d.sol_delta for d in tx.deltas if d.account in pool)
    inflows = [d for d in user_deltas if d.token_delta > dust]
    outflows = [d for d in user_deltas if d.token_delta < -dust]
    legs = tx.legs or _derived_legs(tx)

    if tx.involves_mint_instruction:
        bought = sum(d.token_delta for d in inflows)
        if bought > 0:
            paid = max(pool_sol, 0)
            return [ParsedEvent(tx.tx_id, KIND_CREATE_AND_BUY, tx.signer, bought, paid, ts)]
        return [ParsedEvent(tx.tx_id, KIND_CREATE, tx.signer, 0, 0, ts)]

    if len(inflows) == 1 and not outflows and pool_token == -inflows[0].token_delta:
        d = inflows[0]
        if d.sol_delta <= 0 and pool_sol >= 0:
            paid = max(pool_sol, -d.sol_delta)
            return [ParsedEvent(tx.tx_id, KIND_BUY, d.account, d.token_delta, paid, ts)]
    if len(outflows) == 1 and not inflows and pool_token == -outflows[0].token_delta:
        d = outflows[0]
        if d.sol_delta >= 0 and pool_sol <= 0:
            got = max(-pool_sol, d.sol_delta)
            return [ParsedEvent(tx.tx_id, KIND_SELL, d.account, -d.token_delta, got, ts)]

    by_account: dict[str, list[SwapLeg]] = {}
    for leg in legs:
        by_account.setdefault(leg.account, []).append(leg)
    washers = [
        acct
        for acct, acct_legs in by_account.items()
        if any(l.token_delta > dust for l in acct_legs)
        and any(l.token_delta < -dust for l in acct_legs)
    ]
    if washers:
        events = []
        for acct in sorted(washers):
            gross_in = sum(l.token_delta for l in by_account[acct] if l.token_delta > 0)
            gross_paid = sum(-l.sol_delta for l in by_account[acct] if l.sol_delta < 0)
            events.append(ParsedEvent(tx.tx_id, KIND_WASH, acct, gross_in, gross_paid, ts))
        return events

    if pool_token == 0 and not legs and inflows and outflows:
        receiver = inflows[0].account if len(inflows) == 1 else ""
        return [
            ParsedEvent(tx.tx_id, KIND_TRANSFER, d.account, -d.token_delta, 0, ts, receiver)
            for d in outflows
        ]

    if len(inflows) >= 2 and not outflows and pool_token == -sum(d.token_delta for d in inflows):
        return [
            ParsedEvent(tx.tx_id, KIND_BUY, d.account, d.token_delta, max(-d.sol_delta, 0), ts)
            for d in inflows
        ]
    if len(outflows) >= 2 and not inflows and pool_token == -sum(d.token_delta for d in outflows):
        return [
            ParsedEvent(tx.tx_id, KIND_SELL, d.account, -d.token_delta, max(d.sol_delta, 0), ts)
            for d in outflows
        ]

    note = (
        f"unclassified: {len(inflows)} user inflows, {len(outflows)} outflows, "
        f"pool token delta {pool_token}"
    )
    return [ParsedEvent(tx.tx_id, KIND_UNKNOWN, tx.signer, 0, 0, ts, note=note)]


def _tx_class(events: list[ParsedEvent]) -> str:
    kinds = {e.kind for e in events}
    for klass in (KIND_CREATE_AND_BUY, KIND_CREATE, KIND_WASH):
        if klass in kinds:
            return klass
    if KIND_BUY in kinds or KIND_SELL in kinds:
        return "swap"
    if KIND_TRANSFER in kinds:
        return KIND_TRANSFER
    return KIND_UNKNOWN


def parse_corpus(
    txs: list[RawTransaction], dust: int | None = None
) -> tuple[list[ParsedEvent], BreakdownReport]:
    """Parse a time-ordered transaction stream for one token.

    Out-of-order timestamps are repaired with a stable sort and counted as
    warnings. The report counts whole transactions per class (buy/sell
    collapse into "swap"), with percentages over all transactions. When
    ``dust`` is None it defaults to one millionth of the minted supply,
    read off the stream's mint transaction.
    """
    report = BreakdownReport()
    ordered = list(txs)
    if any(a.slot_time > b.slot_time for a, b in zip(ordered, ordered[1:])):
        report.reorder_warnings = sum(
            1 for a, b in zip(ordered, ordered[1:]) if a.slot_time > b.slot_time
        )
        ordered.sort(key=lambda t: t.slot_time)

    if dust is None:
        dust = 0
        for tx in ordered:
            if tx.involves_mint_instruction:
                minted = sum(d.token_delta for d in tx.deltas)
                dust = minted // 1_000_000
                break

    events: list[ParsedEvent] = []
    for tx in ordered:
        tx_events = parse_transaction(tx, dust=dust)
        events.extend(tx_events)
        report.counts[_tx_class(tx_events)] += 1
        report.total += 1
    return events, report
