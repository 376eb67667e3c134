"""Deterministic agent-based launch lifecycle simulator.

Generates complete synthetic launches with ground truth: a create
transaction (usually with a developer pre-buy in the same transaction),
a bonding-curve sale driven by snipers, bundled insider groups, wash
traders, and organic buyers, the migration of remaining inventory plus
collected base into a constant-product pool, and one hour of post-migration
per-second trading channels. Every random draw comes from one seeded
generator, so a seed fully determines the output byte for byte.

Risk profiles differ in who accumulates the curve and what happens after
migration: ``high`` concentrates supply in early unwinders that dump into
the pool, ``medium`` unwinds partially, ``low`` leaves the pool to organic
flow, and ``manipulated`` runs a scripted bot that sells into buying waves
and buys into capitulation inside a price band, keeping the price ratio
high while leaving a strongly structured flow signature.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .bundles import DEFAULT_CEX_ADDRESSES, BundleTrace
from .dataio import TokenLaunchRecord
from .market import (
    AmmPool,
    BondingCurve,
    DustTrade,
    buy_on_curve,
    check_migration,
    create_pool,
    geometric_tiers,
    remaining_migration_cost,
    sell_on_curve,
    spot_price,
    swap_amm,
)
from .risk import POST_WINDOW_SECONDS, PostSeries
from .txparse import (
    KIND_BUY,
    KIND_CREATE,
    KIND_CREATE_AND_BUY,
    KIND_SELL,
    KIND_TRANSFER,
    KIND_WASH,
    BalanceDelta,
    RawTransaction,
    SwapLeg,
)

PROFILES = ("high", "medium", "low", "manipulated")
TRUE_LEVEL = {"high": "high", "medium": "medium", "low": "low", "manipulated": "high"}
TX_FEE = 5_000  # flat per-transaction base fee leaked to validators

# Launch window used for create timestamps (Dec 2024 .. Mar 2025, UTC).
CREATE_TS_RANGE = (1_733_011_200, 1_740_787_200)


class NonMigrating(Exception):
    """The configured budgets cannot carry the curve to migration."""


@dataclass(frozen=True)
class CurveConfig:
    """Flat curve parameters; tier prices follow a rounded geometric ramp."""

    p0: int = 28
    ratio: float = 1.12
    tiers: int = 20
    tier_allocation: int = 50_000_000
    migrate_fraction: Fraction = Fraction(4, 5)

    @property
    def total_supply(self) -> int:
        return self.tiers * self.tier_allocation

    def build(self) -> BondingCurve:
        return BondingCurve(
            tier_prices=geometric_tiers(self.p0, self.ratio, self.tiers),
            tier_allocation=self.tier_allocation,
            total_curve_supply=self.total_supply,
            migrate_fraction=self.migrate_fraction,
        )


@dataclass(frozen=True)
class AgentConfig:
    """Counts and budget ranges (base units) for the curve-phase agents."""

    dev_prebuy_prob: float = 0.987
    dev_budget: int = 2_872_500_000
    sniper_count: int = 2
    sniper_budget: tuple[int, int] = (300_000_000, 600_000_000)
    insider_groups: int = 1
    insider_group_size: int = 2
    insider_account_budget: tuple[int, int] = (400_000_000, 700_000_000)
    organic_max: int = 600
    organic_budget: tuple[int, int] = (120_000_000, 330_000_000)
    organic_rate: tuple[float, float] = (0.18, 0.28)  # arrivals per second
    organic_sell_prob: float = 0.06
    transfer_prob: float = 0.07
    wash_rate: float = 0.214
    wash_trader_count: int = 3
    wash_budget: tuple[int, int] = (50_000_000, 150_000_000)


@dataclass(frozen=True)
class PostFlowConfig:
    """Post-migration flow: organic noise, unwind targets, or the bot."""

    organic_rate: float = 3.2  # expected trades per second at t=0
    organic_buy_bias: float = 0.55
    trade_base: int = 100_000_000  # median organic trade size, base units
    target_ratio: tuple[float, float] = (0.82, 0.96)
    unwind_fraction_spent: float = 0.0  # share of unwinder tokens dumped
    unwind_steps: int = 0
    unwind_trigger_frac: float = 0.012  # organic buy-volume step per dump
    manipulator: bool = False
    bot_push: int = 450_000_000  # steady per-second pressure, base units
    bot_counter: float = 1.2  # multiplier on countered organic flow
    momentum_lag: tuple[int, int] = (20, 45)
    band: tuple[float, float] = (0.74, 0.99)


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int
    risk_profile: str
    curve: CurveConfig = CurveConfig()
    agents: AgentConfig = AgentConfig()
    post: PostFlowConfig = PostFlowConfig()
    bundle_split_factor: int = 2
    emit_in_tx: bool = True
    emit_funder: bool = True
    emit_jito: bool = True

    def __post_init__(self) -> None:
        if self.risk_profile not in PROFILES:
            raise ValueError(f"unknown risk profile {self.risk_profile!r}")


@dataclass
class GroundTruth:
    profile: str
    true_level: str
    kinds: dict[str, tuple[tuple[str, str], ...]]  # tx_id -> ((kind, actor), ...)
    partition: tuple[frozenset[str], ...]
    manipulator_actions: tuple[tuple[int, str, int], ...]
    fees_total: int
    mint_amount: int
    unwinders: frozenset[str] = frozenset()


@dataclass
class SimulatedLaunch:
    record: TokenLaunchRecord
    txs: list[RawTransaction]
    traces: list[BundleTrace]
    post: PostSeries
    truth: GroundTruth
    migration_price: float
    pool: AmmPool


def preset(profile: str) -> tuple[AgentConfig, PostFlowConfig, int]:
    """Tuned agent/post configs per risk profile: (agents, post, split)."""
    if profile == "high":
        agents = AgentConfig(
            sniper_count=6,
            sniper_budget=(1_200_000_000, 2_000_000_000),
            insider_groups=3,
            insider_group_size=4,
            insider_account_budget=(450_000_000, 700_000_000),
            organic_budget=(260_000_000, 430_000_000),
            organic_rate=(0.45, 0.75),
        )
        post = PostFlowConfig(
            organic_buy_bias=0.53,
            target_ratio=(0.07, 0.18),
            unwind_fraction_spent=1.0,
            unwind_steps=4,
        )
        return agents, post, 4
    if profile == "medium":
        agents = AgentConfig(
            sniper_count=3,
            sniper_budget=(700_000_000, 1_200_000_000),
            insider_groups=2,
            insider_group_size=3,
            insider_account_budget=(350_000_000, 600_000_000),
            organic_budget=(180_000_000, 360_000_000),
            organic_rate=(0.30, 0.50),
        )
        post = PostFlowConfig(
            organic_buy_bias=0.54,
            target_ratio=(0.42, 0.58),
            unwind_fraction_spent=1.0,
            unwind_steps=3,
        )
        return agents, post, 3
    if profile == "low":
        agents = AgentConfig()
        post = PostFlowConfig()
        return agents, post, 2
    # manipulated: curve phase like medium, bot-managed pool afterwards
    agents = AgentConfig(
        sniper_count=3,
        sniper_budget=(600_000_000, 1_000_000_000),
        insider_groups=2,
        insider_group_size=3,
        insider_account_budget=(400_000_000, 650_000_000),
        organic_budget=(180_000_000, 360_000_000),
        organic_rate=(0.30, 0.50),
    )
    post = PostFlowConfig(
        organic_rate=2.0,
        organic_buy_bias=0.50,
        target_ratio=(0.70, 0.95),
        manipulator=True,
    )
    return agents, post, 3


def scenario_for_profile(profile: str, seed: int, curve: CurveConfig = CurveConfig()) -> ScenarioConfig:
    agents, post, split = preset(profile)
    return ScenarioConfig(
        seed=seed,
        risk_profile=profile,
        curve=curve,
        agents=agents,
        post=post,
        bundle_split_factor=split,
    )


def _addr(rng: random.Random, prefix: str) -> str:
    return f"{prefix}{rng.getrandbits(64):016x}"


class _LaunchBuilder:
    """Stateful helper that assembles one launch from a single RNG stream."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.rng = random.Random(config.seed)
        self.curve = config.curve.build()
        self.mint = _addr(self.rng, "MINT")
        self.vault = f"VAULT{self.mint[4:]}"
        self.dev = _addr(self.rng, "DEV")
        self.create_ts = self.rng.randint(*CREATE_TS_RANGE)
        self.txs: list[RawTransaction] = []
        self.traces: list[BundleTrace] = []
        self.kinds: dict[str, tuple[tuple[str, str], ...]] = {}
        self.holdings: dict[str, int] = {}
        self.vault_sol = 0
        self.fees = 0
        self.tx_seq = 0
        self.unwinders: set[str] = set()

    def _tx_id(self) -> str:
        self.tx_seq += 1
        return f"{self.mint[4:12]}tx{self.tx_seq:06d}"

    def _emit(self, tx: RawTransaction, truth: tuple[tuple[str, str], ...]) -> None:
        self.txs.append(tx)
        self.kinds[tx.tx_id] = truth
        self.fees += TX_FEE

    def create_token(self) -> None:
        tx_id = self._tx_id()
        supply = self.config.curve.total_supply
        prebuy = self.rng.random() < self.config.agents.dev_prebuy_prob
        if prebuy:
            trade, self.curve = buy_on_curve(self.curve, self.config.agents.dev_budget)
            cost = int(trade.base_amount)
            self.vault_sol += cost
            self.holdings[self.dev] = trade.token_amount
            deltas = (
                BalanceDelta(self.dev, -cost - TX_FEE, trade.token_amount),
                BalanceDelta(self.vault, cost, supply - trade.token_amount),
            )
            tx = RawTransaction(
                tx_id, self.create_ts, self.dev, deltas,
                involves_mint_instruction=True, pool_accounts=frozenset({self.vault}),
            )
            self._emit(tx, ((KIND_CREATE_AND_BUY, self.dev),))
        else:
            deltas = (
                BalanceDelta(self.dev, -TX_FEE, 0),
                BalanceDelta(self.vault, 0, supply),
            )
            tx = RawTransaction(
                tx_id, self.create_ts, self.dev, deltas,
                involves_mint_instruction=True, pool_accounts=frozenset({self.vault}),
            )
            self._emit(tx, ((KIND_CREATE, self.dev),))

    def buy(self, ts: int, account: str, budget: int) -> bool:
        """Single-account curve buy; returns False on dust."""
        try:
            trade, self.curve = buy_on_curve(self.curve, budget)
        except DustTrade:
            return False
        cost = int(trade.base_amount)
        self.vault_sol += cost
        self.holdings[account] = self.holdings.get(account, 0) + trade.token_amount
        deltas = (
            BalanceDelta(account, -cost - TX_FEE, trade.token_amount),
            BalanceDelta(self.vault, cost, -trade.token_amount),
        )
        tx = RawTransaction(
            self._tx_id(), ts, account, deltas, pool_accounts=frozenset({self.vault})
        )
        self._emit(tx, ((KIND_BUY, account),))
        return True

    def multi_buy(self, ts: int, accounts: list[str], budgets: list[int]) -> list[str]:
        """Several accounts buy inside one transaction (bundled purchase)."""
        fills: list[tuple[str, int, int]] = []
        for account, budget in zip(accounts, budgets):
            if self.curve.remaining == 0:
                break
            try:
                trade, self.curve = buy_on_curve(self.curve, budget)
            except DustTrade:
                continue
            fills.append((account, trade.token_amount, int(trade.base_amount)))
        if not fills:
            return []
        deltas = []
        total_tokens = 0
        total_cost = 0
        for account, tokens, cost in fills:
            fee = TX_FEE if account == fills[0][0] else 0
            deltas.append(BalanceDelta(account, -cost - fee, tokens))
            self.holdings[account] = self.holdings.get(account, 0) + tokens
            total_tokens += tokens
            total_cost += cost
        self.vault_sol += total_cost
        deltas.append(BalanceDelta(self.vault, total_cost, -total_tokens))
        tx = RawTransaction(
            self._tx_id(), ts, fills[0][0], tuple(deltas),
            pool_accounts=frozenset({self.vault}),
        )
        self._emit(tx, tuple((KIND_BUY, account) for account, _, _ in fills))
        return [account for account, _, _ in fills]

    def sell(self, ts: int, account: str, tokens: int) -> bool:
        held = self.holdings.get(account, 0)
        tokens = min(tokens, held)
        if tokens <= 0 or tokens > self.curve.sold:
            return False
        trade, new_curve = sell_on_curve(self.curve, tokens)
        refund = int(trade.base_amount)
        if refund > self.vault_sol:  # cannot refund more than collected
            return False
        self.curve = new_curve
        self.vault_sol -= refund
        self.holdings[account] = held - tokens
        deltas = (
            BalanceDelta(account, refund - TX_FEE, -tokens),
            BalanceDelta(self.vault, -refund, tokens),
        )
        tx = RawTransaction(
            self._tx_id(), ts, account, deltas, pool_accounts=frozenset({self.vault})
        )
        self._emit(tx, ((KIND_SELL, account),))
        return True

    def wash(self, ts: int, account: str, budget: int) -> bool:
        """Buy and sell the same amount inside one transaction (net zero)."""
        if self.curve.remaining == 0:
            return False
        try:
            trade, mid_curve = buy_on_curve(self.curve, budget)
        except DustTrade:
            return False
        back, end_curve = sell_on_curve(mid_curve, trade.token_amount)
        cost = int(trade.base_amount)
        if int(back.base_amount) != cost:  # LIFO reversal must refund exactly
            raise AssertionError("wash legs failed to cancel")
        self.curve = end_curve
        deltas = (BalanceDelta(account, -TX_FEE, 0),)
        legs = (
            SwapLeg(account, trade.token_amount, -cost),
            SwapLeg(account, -trade.token_amount, cost),
        )
        tx = RawTransaction(
            self._tx_id(), ts, account, deltas,
            pool_accounts=frozenset({self.vault}), legs=legs,
        )
        self._emit(tx, ((KIND_WASH, account),))
        return True

    def transfer(self, ts: int, sender: str, receiver: str, tokens: int) -> bool:
        held = self.holdings.get(sender, 0)
        tokens = min(tokens, held)
        if tokens <= 0:
            return False
        self.holdings[sender] = held - tokens
        self.holdings[receiver] = self.holdings.get(receiver, 0) + tokens
        deltas = (
            BalanceDelta(sender, -TX_FEE, -tokens),
            BalanceDelta(receiver, 0, tokens),
        )
        tx = RawTransaction(
            self._tx_id(), ts, sender, deltas, pool_accounts=frozenset({self.vault})
        )
        self._emit(tx, ((KIND_TRANSFER, sender),))
        return True


def _largest_remainder(n: int, shares: dict[str, float]) -> dict[str, int]:
    exact = {k: n * v for k, v in shares.items()}
    counts = {k: int(math.floor(x)) for k, x in exact.items()}
    leftover = n - sum(counts.values())
    order = sorted(shares, key=lambda k: (-(exact[k] - counts[k]), k))
    for k in order[:leftover]:
        counts[k] += 1
    return counts


def simulate_launch(config: ScenarioConfig) -> SimulatedLaunch:
    """Run one full lifecycle; raises NonMigrating when budgets cannot finish."""
    builder = _LaunchBuilder(config)
    agents = config.agents
    rng = builder.rng

    # Upfront feasibility: all configured budgets vs the curve cost to the
    # migration threshold.
    full_cost = remaining_migration_cost(builder.curve)
    budget_cap = (
        agents.dev_budget * agents.dev_prebuy_prob
        + agents.sniper_count * agents.sniper_budget[1]
        + agents.insider_groups * agents.insider_group_size * agents.insider_account_budget[1]
        + agents.organic_max * agents.organic_budget[1]
    )
    if budget_cap < full_cost:
        raise NonMigrating(
            f"configured budgets ({budget_cap:.0f}) below curve cost ({full_cost})"
        )

    builder.create_token()
    t = builder.create_ts

    # Scheduled early actors: snipers then bundled insider groups.
    heap: list[tuple[int, int, tuple]] = []
    seq = 0

    def push(ts: int, action: tuple) -> None:
        nonlocal seq
        heapq.heappush(heap, (ts, seq, action))
        seq += 1

    snipers = [_addr(rng, "SNIPE") for _ in range(agents.sniper_count)]
    for account in snipers:
        push(t + rng.randint(0, 4), ("buy", account, rng.randint(*agents.sniper_budget)))
        builder.unwinders.add(account)

    partition: list[frozenset[str]] = []
    group_size = max(2, config.bundle_split_factor)
    for g in range(agents.insider_groups):
        members = [_addr(rng, "INSD") for _ in range(group_size)]
        partition.append(frozenset(members))
        builder.unwinders.update(members)
        funder = _addr(rng, "FUND")
        jito_id = _addr(rng, "JITO")
        if config.emit_funder:
            builder.traces.extend(BundleTrace(m, "funder", funder) for m in members)
        # Split the group into co-purchase chunks of at least two accounts.
        chunks: list[list[str]] = []
        i = 0
        while i < len(members):
            take = 3 if len(members) - i >= 5 else min(len(members) - i, 3)
            if len(members) - i == 4:
                take = 2
            chunks.append(members[i : i + take])
            i += take
        start = t + rng.randint(1, 6)
        for j, chunk in enumerate(chunks):
            budgets = [rng.randint(*agents.insider_account_budget) for _ in chunk]
            push(start + j, ("multi_buy", chunk, budgets, jito_id))

    wash_accounts = [_addr(rng, "WASH") for _ in range(agents.wash_trader_count)]
    cex_funder = sorted(DEFAULT_CEX_ADDRESSES)[0]

    organic_rate = rng.uniform(*agents.organic_rate)
    p_wash = agents.wash_rate / (1.0 - agents.wash_rate)
    next_organic = t + 3 + rng.expovariate(organic_rate)
    organic_spawned = 0
    wash_i = 0

    while not check_migration(builder.curve):
        emitted_before = len(builder.txs)
        if heap and heap[0][0] <= next_organic:
            ts, _, action = heapq.heappop(heap)
            ts = int(ts)
            if action[0] == "buy":
                builder.buy(ts, action[1], action[2])
            elif action[0] == "multi_buy":
                bought = builder.multi_buy(ts, action[1], action[2])
                if config.emit_jito:
                    builder.traces.extend(BundleTrace(a, "jito", action[3]) for a in bought)
            elif action[0] == "sell":
                builder.sell(ts, action[1], action[2])
            elif action[0] == "transfer":
                builder.transfer(ts, action[1], action[2], action[3])
        else:
            if organic_spawned >= agents.organic_max:
                raise NonMigrating("organic budget pool exhausted before migration")
            ts = int(next_organic)
            next_organic += rng.expovariate(organic_rate)
            organic_spawned += 1
            account = _addr(rng, "ORGN")
            builder.buy(ts, account, rng.randint(*agents.organic_budget))
            cex_funded = rng.random() < 0.12  # buyer withdrew from an exchange
            if cex_funded and config.emit_funder:
                builder.traces.append(BundleTrace(account, "funder", cex_funder))
            if rng.random() < agents.organic_sell_prob:
                frac = rng.uniform(0.2, 0.5)
                tokens = int(builder.holdings.get(account, 0) * frac)
                push(ts + rng.randint(5, 40), ("sell", account, tokens))
            if rng.random() < agents.transfer_prob:
                frac = rng.uniform(0.1, 0.3)
                tokens = int(builder.holdings.get(account, 0) * frac)
                push(ts + rng.randint(3, 30), ("transfer", account, _addr(rng, "COLD"), tokens))
        # Wash trades run at a configured share of all transactions.
        if len(builder.txs) > emitted_before and not check_migration(builder.curve):
            if rng.random() < p_wash:
                washer = wash_accounts[wash_i % len(wash_accounts)]
                wash_i += 1
                builder.wash(ts + rng.randint(0, 1), washer, rng.randint(*agents.wash_budget))

    migrate_ts = max(tx.slot_time for tx in builder.txs) + 1
    remaining = config.curve.total_supply - builder.curve.sold
    pool = create_pool(remaining, builder.vault_sol)
    migration_price = float(spot_price(pool))

    unwind_tokens = sum(builder.holdings.get(a, 0) for a in builder.unwinders)
    held_total = sum(v for v in builder.holdings.values() if v > 0)
    initial_float = int((held_total - unwind_tokens) * 0.3)
    post, actions, _ = _run_post_phase(
        rng, pool, config.post, unwind_tokens, migration_price, initial_float
    )

    record = TokenLaunchRecord(
        mint=builder.mint,
        name=f"Launch {builder.mint[4:10]}",
        symbol=builder.mint[4:8].upper(),
        uri=f"https://meta.invalid/{builder.mint}.json",
        creator=builder.dev,
        create_ts=builder.create_ts,
        migrate_ts=migrate_ts,
        amm_address=f"AMM{builder.mint[4:]}",
    )
    truth = GroundTruth(
        profile=config.risk_profile,
        true_level=TRUE_LEVEL[config.risk_profile],
        kinds=builder.kinds,
        partition=tuple(partition),
        manipulator_actions=tuple(actions),
        fees_total=builder.fees,
        mint_amount=config.curve.total_supply,
        unwinders=frozenset(builder.unwinders),
    )
    return SimulatedLaunch(
        record=record,
        txs=builder.txs,
        traces=builder.traces,
        post=post,
        truth=truth,
        migration_price=migration_price,
        pool=pool,
    )


def _run_post_phase(
    rng: random.Random,
    pool: AmmPool,
    cfg: PostFlowConfig,
    unwind_tokens: int,
    migration_price: float,
    initial_float: int = 0,
) -> tuple[PostSeries, list[tuple[int, str, int]], AmmPool]:
    """One hour of per-second AMM trading; returns channels and bot actions."""
    n = POST_WINDOW_SECONDS
    price = [0.0] * n
    buy_vol = [0.0] * n
    sell_vol = [0.0] * n
    tx_count = [0] * n
    net_flow = [0.0] * n

    last_price = migration_price
    x0 = pool.token_reserve  # price ratio vs migration is (x0 / x)^2
    public_float = initial_float  # tokens sellable by non-unwinding holders
    actions: list[tuple[int, str, int]] = []

    # Unwind plan: stepped target ratios, each step triggered by cumulative
    # organic buy volume. Step sizes are computed against the live pool, so
    # the trough lands inside the target band regardless of interleaved flow.
    target = rng.uniform(*cfg.target_ratio)
    unwind_left = int(unwind_tokens * cfg.unwind_fraction_spent * 0.97)
    triggers: list[tuple[float, float]] = []
    if cfg.unwind_steps > 0 and unwind_left > 0:
        hourly_buy_base = cfg.organic_rate * 3600 * cfg.trade_base * cfg.organic_buy_bias
        cum = 0.0
        for k in range(1, cfg.unwind_steps + 1):
            cum += cfg.unwind_trigger_frac * hourly_buy_base * rng.uniform(0.7, 1.3)
            step_ratio = 1.0 + (target - 1.0) * k / cfg.unwind_steps
            triggers.append((cum, step_ratio))

    bot_tokens = unwind_tokens if cfg.manipulator else 0
    bot_base = int(pool.base_reserve * 0.6) if cfg.manipulator else 0
    bot_state = "suppress"  # price starts at the top of the band
    lag = rng.randint(*cfg.momentum_lag)
    band_lo, band_hi = cfg.band

    organic_buy_base_cum = 0.0
    trigger_i = 0

    def do_swap(second: int, side: str, amount_in: int) -> int:
        nonlocal pool, last_price
        if amount_in <= 0:
            return 0
        try:
            trade, pool = swap_amm(pool, side, amount_in)
        except DustTrade:
            return 0
        last_price = trade.base_amount / trade.token_amount
        tx_count[second] += 1
        if side == "buy":
            buy_vol[second] += trade.token_amount
            net_flow[second] += trade.token_amount
        else:
            sell_vol[second] += trade.token_amount
            net_flow[second] -= trade.token_amount
        return trade.token_amount

    for s in range(n):
        if s > 0:
            rate = cfg.organic_rate * (0.35 + 0.65 * math.exp(-s / 1500.0))
            n_trades = int(rate)
            if rng.random() < rate - n_trades:
                n_trades += 1

            past = price[s - lag] if s > lag else migration_price
            momentum = math.log(last_price) - math.log(past)
            bias = cfg.organic_buy_bias
            herd = 1.0
            if cfg.manipulator:
                # Herding: buy waves on rising momentum, capitulation on
                # falling momentum.
                if momentum > 0.004:
                    bias, herd = 0.78, 1.4
                elif momentum < -0.004:
                    bias, herd = 0.22, 1.4

            # Aggregate the second's organic trades into one buy and one
            # sell swap; tx_count still records the individual trades.
            buy_base = 0
            sell_base = 0
            n_buys = 0
            n_sells = 0
            for _ in range(n_trades):
                size = int(herd * cfg.trade_base * math.exp(rng.gauss(0.0, 0.7)))
                if rng.random() < bias:
                    buy_base += size
                    n_buys += 1
                else:
                    sell_base += size
                    n_sells += 1
            organic_second_flow = 0.0  # base-equivalent, signed
            if buy_base > 0:
                got = do_swap(s, "buy", buy_base)
                if got:
                    tx_count[s] += n_buys - 1
                    organic_buy_base_cum += buy_base
                    organic_second_flow += buy_base
                    public_float += got
            if sell_base > 0:
                tokens = min(public_float, int(sell_base / max(last_price, 1e-12)))
                if tokens > 0:
                    sold = do_swap(s, "sell", tokens)
                    if sold:
                        tx_count[s] += n_sells - 1
                        public_float -= sold
                        organic_second_flow -= sold * last_price

            # Scheduled unwind dumps once organic buying accumulates.
            while trigger_i < len(triggers) and organic_buy_base_cum >= triggers[trigger_i][0]:
                _, step_ratio = triggers[trigger_i]
                trigger_i += 1
                x_needed = int(x0 / math.sqrt(step_ratio))
                dump = min(max(x_needed - pool.token_reserve, 0), unwind_left)
                if dump > 0:
                    unwind_left -= do_swap(s, "sell", dump)

            if cfg.manipulator:
                # Scripted cycle: sell the price down to the bottom of the
                # band (into any buying), then buy it back up to the top
                # (into the capitulation), and repeat. Countered organic
                # flow is added on top of the steady push.
                ratio = last_price / migration_price
                if bot_state == "suppress" and ratio <= band_lo:
                    bot_state = "support"
                elif bot_state == "support" and ratio >= band_hi:
                    bot_state = "suppress"
                push = cfg.bot_push * rng.uniform(0.8, 1.25)
                if bot_state == "suppress":
                    base_out = push + cfg.bot_counter * max(organic_second_flow, 0.0)
                    tokens = min(int(base_out / max(last_price, 1e-12)), bot_tokens)
                    sold = do_swap(s, "sell", tokens)
                    if sold:
                        bot_tokens -= sold
                        bot_base += int(sold * last_price)
                        actions.append((s, "sell", sold))
                else:
                    base_in = push + cfg.bot_counter * max(-organic_second_flow, 0.0)
                    size = min(int(base_in), bot_base)
                    got = do_swap(s, "buy", size)
                    if got:
                        bot_base -= size
                        bot_tokens += got
                        actions.append((s, "buy", size))

        price[s] = last_price

    series = PostSeries(
        price=tuple(price),
        buy_volume=tuple(buy_vol),
        sell_volume=tuple(sell_vol),
        tx_count=tuple(tx_count),
        net_flow=tuple(net_flow),
    )
    return series, actions, pool


def synthetic_post_series(profile: str, seed: int) -> PostSeries:
    """Standalone post-migration series for one profile (fixed standard pool).

    Used to study the annotator's score separation without running the
    curve phase: the pool and unwinder inventory match the profile presets'
    typical migration state.
    """
    _, post, _ = preset(profile)
    rng = random.Random(seed)
    pool = create_pool(200_000_000, 60_000_000_000)
    unwind_tokens = {
        "high": 360_000_000,
        "medium": 140_000_000,
        "low": 20_000_000,
        "manipulated": 150_000_000,
    }[profile]
    initial_float = int((800_000_000 - unwind_tokens) * 0.3)
    series, _, _ = _run_post_phase(rng, pool, post, unwind_tokens, 300.0, initial_float)
    return series


def profile_mix_counts(n: int, mix: dict[str, float]) -> dict[str, int]:
    """Deterministic largest-remainder allocation of n launches to profiles."""
    if n <= 0:
        raise ValueError("n must be positive")
    total = sum(mix.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"profile mix must sum to 1, got {total}")
    for profile in mix:
        if profile not in PROFILES:
            raise ValueError(f"unknown profile {profile!r}")
    return _largest_remainder(n, mix)


def corpus_launches(n: int, mix: dict[str, float], seed: int) -> list[SimulatedLaunch]:
    """n deterministic launches with profile counts matching the mix."""
    counts = profile_mix_counts(n, mix)
    rng = random.Random(seed)
    profiles: list[str] = []
    for profile in sorted(counts):
        profiles.extend([profile] * counts[profile])
    rng.shuffle(profiles)
    launches = []
    for profile in profiles:
        launch_seed = rng.getrandbits(63)
        launches.append(simulate_launch(scenario_for_profile(profile, launch_seed)))
    return launches


def synthetic_sol_feed(seed: int, start_ts: int, end_ts: int) -> list[tuple[int, float]]:
    """Hourly USD price random walk covering [start_ts, end_ts]."""
    rng = random.Random(seed ^ 0x501FEED)
    t = start_ts - start_ts % 3600
    price = rng.uniform(170.0, 240.0)
    feed = []
    while t <= end_ts + 3600:
        feed.append((t, round(price, 2)))
        price = max(80.0, price * (1.0 + rng.gauss(0.0, 0.004)))
        t += 3600
    return feed


def simulate_corpus(
    n: int, mix: dict[str, float], seed: int, out_dir
) -> list[SimulatedLaunch]:
    """Generate n launches and persist the corpus files under out_dir."""
    from pathlib import Path

    from . import dataio

    launches = corpus_launches(n, mix, seed)
    paths = dataio.CorpusPaths(Path(out_dir))
    dataio.write_launches(paths.launches, [l.record for l in launches])
    dataio.write_manifest(
        paths.manifest,
        [(l.record.mint, l.truth.profile, l.truth.true_level) for l in launches],
    )
    first = min(l.record.create_ts for l in launches)
    last = max(l.record.migrate_ts for l in launches) + POST_WINDOW_SECONDS
    dataio.write_sol_feed(paths.sol_feed, synthetic_sol_feed(seed, first, last))
    for launch in launches:
        mint = launch.record.mint
        dataio.write_transactions(paths.txs(mint), launch.txs)
        dataio.write_traces(paths.traces(mint), launch.traces)
        dataio.write_post_series(paths.post(mint), launch.post)
    return launches
