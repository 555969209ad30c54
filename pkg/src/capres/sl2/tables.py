"""Stable-range data for the pairs ``(Sp_2n(R), O_{p,p})`` and ``(O_{p,p}, Sp_2n(R))``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import DomainError

GROUPS = ("sp2n", "opp")


@dataclass(frozen=True)
class StableRangeRow:
    group: str
    n: int
    p: int
    r_minus_1: int
    lambda_max: Fraction
    condition_holds: bool


def stable_range_table(group: str, n: int, p: int) -> StableRangeRow:
    """The tabulated row for ``G`` the smaller member paired with its partner.

    ``sp2n``: ``r - 1 = 2n``, ``lambda_max = (2p - 1)/(2n)``, stable when ``p >= 2n``.
    ``opp``: ``r - 1 = 2p - 1``, ``lambda_max = 2n/(2p - 1)``, stable when ``n >= 2p``.
    """
    if n < 1 or p < 1:
        raise DomainError("n and p are positive integers")
    if group == "sp2n":
        return StableRangeRow(group, n, p, 2 * n, Fraction(2 * p - 1, 2 * n), p >= 2 * n)
    if group == "opp":
        return StableRangeRow(group, n, p, 2 * p - 1, Fraction(2 * n, 2 * p - 1), n >= 2 * p)
    raise DomainError(f"group must be one of {GROUPS}")


@dataclass(frozen=True)
class StableRangeFromDimensions:
    """``r = 2 dim g / dim V`` and ``lambda_max = dim V' / (r - 1)`` from the group dimensions."""

    dim_g: int
    dim_v: int
    dim_v_partner: int

    @property
    def r_minus_1(self) -> Fraction:
        return Fraction(2 * self.dim_g, self.dim_v) - 1

    @property
    def lambda_max(self) -> Fraction:
        return Fraction(self.dim_v_partner) / self.r_minus_1


def stable_range_from_dimensions(group: str, n: int, p: int) -> StableRangeFromDimensions:
    """The same quantities recomputed from ``dim g``, ``dim V`` and ``dim V'``.

    For ``Sp_2n`` this reproduces ``r - 1 = 2n`` but gives ``2p/(2n)`` instead of
    the tabulated ``(2p - 1)/(2n)``; for ``O_{p,p}`` it gives ``r - 1 = 2p - 2``.
    For ``O_{1,1}`` the dimension count gives ``r - 1 = 0`` and no finite exponent.
    """
    if group == "sp2n":
        return StableRangeFromDimensions(n * (2 * n + 1), 2 * n, 2 * p)
    if group == "opp":
        return StableRangeFromDimensions(p * (2 * p - 1), 2 * p, 2 * n)
    raise DomainError(f"group must be one of {GROUPS}")
