"""Stepwise bonding-curve and constant-product AMM arithmetic.

All token and base-asset amounts are integers in minimal units. Prices are
exact `fractions.Fraction` values (base units per token unit), so curve
accounting is exact and invariant tests are free of float drift. Curve sells
reverse the tier walk LIFO, which makes a buy followed by a sell of the same
tokens refund exactly what was spent. The AMM swaps round output amounts down
to whole units and re-anchor reserves to the creation-time product ``k``, so
the reserve product stays within one rounding quantum of ``k`` forever.

Everything here is value-semantic: operations return a new curve/pool and
never mutate their inputs, so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Union

Price = Fraction
Amount = Union[int, Fraction]


class MarketError(Exception):
    """Base class for curve/pool arithmetic errors."""


class SoldOut(MarketError):
    """The bonding curve has no inventory left."""


class InvalidAmount(MarketError):
    """A trade amount was zero or negative."""


class InsufficientInventory(MarketError):
    """A curve sell exceeds the cumulative amount sold."""


class DustTrade(MarketError):
    """A swap's output rounds down to zero units."""


def _exact(value: Fraction) -> Amount:
    """Collapse an integral Fraction to int; keep exact otherwise."""
    return int(value) if value.denominator == 1 else value


@dataclass(frozen=True)
class BondingCurve:
    """Stepwise tiered price schedule over a fixed token inventory.

    ``tier_prices`` must be strictly increasing; every tier offers exactly
    ``tier_allocation`` tokens, and ``total_curve_supply`` equals
    ``tier_allocation * len(tier_prices)``. ``sold`` is cumulative units sold.
    ``migrate_fraction`` is the sold-fraction threshold at which the launch
    migrates to an AMM pool.
    """

    tier_prices: tuple[Price, ...]
    tier_allocation: int
    total_curve_supply: int
    sold: int = 0
    migrate_fraction: Fraction = Fraction(4, 5)

    def __post_init__(self) -> None:
        if not self.tier_prices:
            raise ValueError("curve needs at least one tier")
        if any(p <= 0 for p in self.tier_prices):
            raise ValueError("tier prices must be positive")
        if any(a >= b for a, b in zip(self.tier_prices, self.tier_prices[1:])):
            raise ValueError("tier prices must be strictly increasing")
        if self.tier_allocation <= 0:
            raise ValueError("tier_allocation must be positive")
        if self.total_curve_supply != self.tier_allocation * len(self.tier_prices):
            raise ValueError("total_curve_supply must equal tier_allocation * tiers")
        if not 0 <= self.sold <= self.total_curve_supply:
            raise ValueError("sold out of range")
        if not 0 < self.migrate_fraction <= 1:
            raise ValueError("migrate_fraction must be in (0, 1]")

    @property
    def remaining(self) -> int:
        return self.total_curve_supply - self.sold


@dataclass(frozen=True)
class AmmPool:
    """Constant-product pool: ``token_reserve * base_reserve`` pinned to ``k``.

    ``k`` is fixed at creation; swaps keep the live product in
    ``[k, k + max(token_reserve, base_reserve)]``.
    """

    token_reserve: int
    base_reserve: int
    k: int

    def __post_init__(self) -> None:
        if self.token_reserve <= 0 or self.base_reserve <= 0:
            raise ValueError("reserves must be positive")
        product = self.token_reserve * self.base_reserve
        if product < self.k:
            raise ValueError("reserve product below invariant k")
        if product - self.k > max(self.token_reserve, self.base_reserve):
            raise ValueError("reserve product exceeds rounding slack above k")


def create_pool(token_reserve: int, base_reserve: int) -> AmmPool:
    """Create a pool whose invariant k is the initial reserve product."""
    if token_reserve <= 0 or base_reserve <= 0:
        raise ValueError("reserves must be positive")
    return AmmPool(token_reserve, base_reserve, token_reserve * base_reserve)


@dataclass(frozen=True)
class Trade:
    """One executed trade: side, amounts, and the realized average price."""

    side: str  # "buy" | "sell"
    token_amount: int
    base_amount: Amount
    unit_price: Price

    def __post_init__(self) -> None:
        if self.side not in ("buy", "sell"):
            raise ValueError("side must be 'buy' or 'sell'")
        if self.token_amount <= 0:
            raise ValueError("token_amount must be positive")
        if self.base_amount <= 0:
            raise ValueError("base_amount must be positive")


def curve_price(curve: BondingCurve) -> Price:
    """Posted price of the next token unit (the current tier's price)."""
    if curve.sold >= curve.total_curve_supply:
        raise SoldOut("bonding curve inventory exhausted")
    return curve.tier_prices[curve.sold // curve.tier_allocation]


def buy_on_curve(curve: BondingCurve, base_budget: int) -> tuple[Trade, BondingCurve]:
    """Spend ``base_budget`` walking tiers greedily from the current one.

    Each tier is consumed at its posted price until the budget can no longer
    afford a whole token unit or the curve sells out. Returns the trade (with
    the exact amount spent, which may be below the budget) and the advanced
    curve. Leftover budget is ``base_budget - trade.base_amount``.
    """
    if base_budget <= 0:
        raise InvalidAmount("base_budget must be positive")
    if curve.sold >= curve.total_curve_supply:
        raise SoldOut("bonding curve inventory exhausted")

    budget = Fraction(base_budget)
    position = curve.sold
    tokens = 0
    cost = Fraction(0)
    while position < curve.total_curve_supply:
        price = curve.tier_prices[position // curve.tier_allocation]
        tier_left = curve.tier_allocation - position % curve.tier_allocation
        affordable = int(budget / price)
        take = min(tier_left, affordable)
        if take == 0:
            break
        spend = take * price
        tokens += take
        cost += spend
        budget -= spend
        position += take

    if tokens == 0:
        raise DustTrade("budget below the price of one token unit")
    trade = Trade("buy", tokens, _exact(cost), cost / tokens)
    return trade, replace(curve, sold=position)


def sell_on_curve(curve: BondingCurve, token_amount: int) -> tuple[Trade, BondingCurve]:
    """Sell back ``token_amount`` units, refunding the most recent tiers first.

    The LIFO reversal means the refund for the last N bought tokens equals
    exactly what they cost.
    """
    if token_amount <= 0:
        raise InvalidAmount("token_amount must be positive")
    if token_amount > curve.sold:
        raise InsufficientInventory(
            f"cannot sell {token_amount} units, only {curve.sold} sold"
        )

    refund = Fraction(0)
    position = curve.sold
    remaining = token_amount
    while remaining > 0:
        tier = (position - 1) // curve.tier_allocation
        into_tier = position - tier * curve.tier_allocation
        give_back = min(into_tier, remaining)
        refund += give_back * curve.tier_prices[tier]
        position -= give_back
        remaining -= give_back

    trade = Trade("sell", token_amount, _exact(refund), refund / token_amount)
    return trade, replace(curve, sold=position)


def swap_amm(pool: AmmPool, side: str, amount_in: int) -> tuple[Trade, AmmPool]:
    """Swap against the pool, rounding the output down to whole units.

    ``side="sell"`` puts ``amount_in`` tokens in and takes base out;
    ``side="buy"`` puts ``amount_in`` base in and takes tokens out. The
    depleted reserve is recomputed as ``ceil(k / grown_reserve)``, which keeps
    the product in ``[k, k + max(reserves))`` after every swap.
    """
    if amount_in <= 0:
        raise InvalidAmount("amount_in must be positive")
    if side == "sell":
        new_tokens = pool.token_reserve + amount_in
        new_base = -(-pool.k // new_tokens)  # ceil division
        base_out = pool.base_reserve - new_base
        if base_out <= 0:
            raise DustTrade("sell output rounds to zero base units")
        trade = Trade("sell", amount_in, base_out, Fraction(base_out, amount_in))
        return trade, AmmPool(new_tokens, new_base, pool.k)
    if side == "buy":
        new_base = pool.base_reserve + amount_in
        new_tokens = -(-pool.k // new_base)
        tokens_out = pool.token_reserve - new_tokens
        if tokens_out <= 0:
            raise DustTrade("buy output rounds to zero token units")
        trade = Trade("buy", tokens_out, amount_in, Fraction(amount_in, tokens_out))
        return trade, AmmPool(new_tokens, new_base, pool.k)
    raise ValueError("side must be 'buy' or 'sell'")


def spot_price(pool: AmmPool) -> Price:
    """Marginal price in base units per token unit: base_reserve / token_reserve."""
    return Fraction(pool.base_reserve, pool.token_reserve)


def check_migration(curve: BondingCurve) -> bool:
    """True once the sold fraction reaches the migration threshold (inclusive)."""
    return curve.sold >= curve.migrate_fraction * curve.total_curve_supply


def remaining_migration_cost(curve: BondingCurve) -> Amount:
    """Exact base cost of buying from ``sold`` up to the migration threshold."""
    threshold = curve.migrate_fraction * curve.total_curve_supply
    target = int(threshold) if threshold.denominator == 1 else int(threshold) + 1
    cost = Fraction(0)
    position = curve.sold
    while position < target:
        tier = position // curve.tier_allocation
        tier_end = (tier + 1) * curve.tier_allocation
        take = min(tier_end, target) - position
        cost += take * curve.tier_prices[tier]
        position += take
    return _exact(cost)


def geometric_tiers(p0: int, ratio: float, tiers: int) -> tuple[Price, ...]:
    """Integer tier prices ``round(p0 * ratio**i)``, forced strictly increasing."""
    if p0 <= 0:
        raise ValueError("p0 must be positive")
    if tiers <= 0:
        raise ValueError("tiers must be positive")
    if ratio <= 1.0:
        raise ValueError("ratio must exceed 1 for increasing tiers")
    prices: list[Price] = []
    prev = 0
    for i in range(tiers):
        p = max(prev + 1, round(p0 * ratio**i))
        prices.append(Fraction(p))
        prev = p
    return tuple(prices)
