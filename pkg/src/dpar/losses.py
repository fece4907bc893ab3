"""Iterated multiplicative-plus-additive loss bounds.

Tracks how a quantity degrades across rounds when round i multiplies it by
(1 +- gamma_i) and shifts it by +-gamma_i, and provides the closed-form
envelopes that the round schedules are validated against:

    f(Z, 0) = Z                f'(Z, 0) = Z
    f(Z, i) = (1 + g_i) f(Z, i-1) + g_i
    f'(Z, i) = (1 - g_i) f'(Z, i-1) - g_i
    g(Z, i) = Z * prod(1 + 2 g_j) + sum(2 g_j)      (upper envelope)
    g'(Z, i) = Z * prod(1 - 2 g_j) - sum(2 g_j)     (lower envelope)

Valid whenever the gammas are nonnegative and sum to at most 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LossSchedule:
    gammas: tuple[float, ...]

    def __post_init__(self) -> None:
        g = np.asarray(self.gammas, dtype=np.float64)
        if g.size and g.min() < 0.0:
            raise ValueError("gammas must be nonnegative")
        if float(g.sum()) > 0.5:
            raise ValueError("invalid schedule: sum of gammas exceeds 1/2")

    def __len__(self) -> int:
        return len(self.gammas)


def iterative_loss_bound(
    schedule: LossSchedule, z: float, rounds: int | None = None
) -> tuple[float, float, float, float]:
    """Return (f, g, f_prime, g_prime) after the given number of rounds.

    The envelope inequalities f <= g and f' >= g' hold for every prefix of a
    valid schedule with z >= 0.
    """
    if z < 0:
        raise ValueError("z must be nonnegative")
    if rounds is None:
        rounds = len(schedule)
    if rounds < 0 or rounds > len(schedule):
        raise ValueError("rounds out of range for schedule")
    f = fp = float(z)
    prod_up = prod_dn = 1.0
    add = 0.0
    for i in range(rounds):
        gi = float(schedule.gammas[i])
        f = (1.0 + gi) * f + gi
        fp = (1.0 - gi) * fp - gi
        prod_up *= 1.0 + 2.0 * gi
        prod_dn *= 1.0 - 2.0 * gi
        add += 2.0 * gi
    g = z * prod_up + add
    gp = z * prod_dn - add
    return f, g, fp, gp
