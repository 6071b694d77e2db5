"""Integer fixed-point helpers.

Coins are tracked in cents (1 coin = 100 cents), payment multipliers in
milli-units, and labor/utility in micro-units. Keeping ledgers in integers
makes conservation and reward-telescoping identities exact instead of
approximately true under floating point.
"""

CENTS_PER_COIN = 100
MILLI = 1000
MICRO = 1_000_000


def coins_to_cents(coins: float) -> int:
    return round(coins * CENTS_PER_COIN)


def cents_to_coins(cents: int) -> float:
    return cents / CENTS_PER_COIN


def to_milli(value: float) -> int:
    return round(value * MILLI)


def milli_to_float(milli: int) -> float:
    return milli / MILLI


def to_micro(value: float) -> int:
    return round(value * MICRO)


def micro_to_float(micro: int) -> float:
    return micro / MICRO
