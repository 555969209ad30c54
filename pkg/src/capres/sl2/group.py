"""Elements of SL2(R), the Iwasawa decomposition ``G = KAN`` and representation labels."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

DET_TOL = 1e-12


def rotation(theta):
    """``k_theta = [[cos, sin], [-sin, cos]]``, broadcast over an array of angles."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, s], -1), np.stack([-s, c], -1)], -2)


def diagonal(t):
    """``h_a = diag(a, 1/a)`` with ``a = e^t``."""
    t = np.asarray(t, dtype=float)
    z = np.zeros_like(t)
    return np.stack([np.stack([np.exp(t), z], -1), np.stack([z, np.exp(-t)], -1)], -2)


def unipotent(r):
    """``n_r = [[1, r], [0, 1]]``."""
    r = np.asarray(r, dtype=float)
    one, z = np.ones_like(r), np.zeros_like(r)
    return np.stack([np.stack([one, r], -1), np.stack([z, one], -1)], -2)


@dataclass(frozen=True)
class SL2Element:
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.shape != (2, 2):
            raise DomainError("an SL2 element is a 2x2 matrix")
        # Rounding in a product of SL2 matrices grows with the squared entries.
        if abs(np.linalg.det(m) - 1.0) > DET_TOL * max(1.0, float(np.sum(m * m))):
            raise DomainError(f"determinant {np.linalg.det(m)} differs from 1")
        object.__setattr__(self, "entries", m)

    @classmethod
    def identity(cls) -> "SL2Element":
        return cls(np.eye(2))

    @classmethod
    def from_iwasawa(cls, coords: "IwasawaCoords") -> "SL2Element":
        return cls(coords.matrix())

    def __matmul__(self, other: "SL2Element") -> "SL2Element":
        return SL2Element(self.entries @ other.entries)

    def inverse(self) -> "SL2Element":
        (a, b), (c, d) = self.entries
        return SL2Element(np.array([[d, -b], [-c, a]]))

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    @property
    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))

    def iwasawa(self) -> "IwasawaCoords":
        return IwasawaCoords.decompose(self)


@dataclass(frozen=True)
class IwasawaCoords:
    """``g = k_theta h_{e^t} n_r``."""

    theta: float
    t: float
    r: float

    def matrix(self) -> np.ndarray:
        return rotation(self.theta) @ diagonal(self.t) @ unipotent(self.r)

    def compose(self) -> SL2Element:
        return SL2Element(self.matrix())

    @classmethod
    def decompose(cls, g: SL2Element | np.ndarray) -> "IwasawaCoords":
        m = g.entries if isinstance(g, SL2Element) else np.asarray(g, dtype=float)
        # The first column of k h n is e^t times the first column of k.
        a = math.hypot(m[0, 0], m[1, 0])
        theta = math.atan2(-m[1, 0], m[0, 0])
        an = rotation(-theta) @ m
        return cls(theta, math.log(a), float(an[0, 1] / a))


@dataclass(frozen=True)
class PrincipalSeriesLabel:
    """The principal series ``pi_{epsilon, i lam}``; unitary for real ``lam``."""

    epsilon: int
    lam: complex

    def __post_init__(self):
        if self.epsilon not in (0, 1):
            raise DomainError("epsilon is 0 or 1")

    def character_on_diagonal(self, t):
        """``sign^eps (e^{i lam t} + e^{-i lam t}) / |e^t - e^{-t}|`` on ``h_a``, ``a = e^t > 0``."""
        t = np.asarray(t, dtype=float)
        if np.any(np.abs(t) < 1e-8):
            raise DomainError("the character is singular at the identity")
        return 2.0 * np.cos(self.lam * t) / np.abs(2.0 * np.sinh(t))


SUBQUOTIENT_KINDS = ("discrete_plus", "discrete_minus", "limit_plus", "limit_minus", "finite_dim")


@dataclass(frozen=True)
class SubquotientLabel:
    """A constituent of a reducible principal series: discrete series, limits, or the finite quotient."""

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in SUBQUOTIENT_KINDS:
            raise DomainError(f"unknown subquotient kind {self.kind!r}")
        if self.kind in ("discrete_plus", "discrete_minus", "finite_dim") and self.n < 1:
            raise DomainError("discrete series and finite quotients need n >= 1")

    def ktypes(self, m_max: int) -> list[int]:
        """The K-types (up to ``|m| <= m_max``) of this constituent of ``pi_{eps, n}``."""
        n = self.n
        if self.kind == "discrete_plus":
            return [m for m in range(n + 1, m_max + 1, 2)]
        if self.kind == "discrete_minus":
            return [m for m in range(-m_max, -n, 1) if (m - n - 1) % 2 == 0]
        if self.kind == "finite_dim":
            return list(range(-(n - 1), n, 2))
        if self.kind == "limit_plus":
            return list(range(1, m_max + 1, 2))
        return list(range(-m_max + (1 - m_max) % 2, 0, 2))
