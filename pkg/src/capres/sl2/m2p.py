"""Test functions on 2 x p real matrices supported in the maximal-rank locus.

A function of the Gram matrix ``S = x x^T`` is written in the coordinates

    c = tr(S)/2,   E = (S11 - S22)/2 + i S12,

so that the eigenvalues of ``S`` are ``c +- |E|`` and the rotation
``x -> k_theta^{-1} x`` acts by ``E -> e^{2 i theta} E``.  The factor
``(conj E / c)^{m/2}`` therefore carries the K-type ``m`` (even).

The pushforward of Lebesgue measure on ``M_{2,p}`` under ``x -> x x^T`` is

    pi^{p - 1/2} / (Gamma(p/2) Gamma((p-1)/2)) * det(S)^{(p-3)/2} dS,

and ``dS = 2 dc d(Re E) d(Im E)``.  :class:`GramQuadrature` discretises it with
Gauss-Legendre rules in ``c`` and ``|E|`` and the trapezoid rule in ``arg E``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from ..errors import DomainError, InvalidSupport
from ..numerics import mollifier


def smooth_step(y):
    """C-infinity transition: 0 for ``y <= 0``, 1 for ``y >= 1``, built from ``exp(-1/y)``."""
    y = np.asarray(y, dtype=float)
    a = np.where(y > 0, np.exp(-1.0 / np.where(y > 0, y, 1.0)), 0.0)
    b = np.where(y < 1, np.exp(-1.0 / np.where(y < 1, 1.0 - y, 1.0)), 0.0)
    return a / (a + b)


def gram_coordinates(x):
    """``(c, E)`` of ``S = x x^T`` for ``x`` of shape ``(..., 2, p)``."""
    x = np.asarray(x, dtype=float)
    s11 = np.sum(x[..., 0, :] ** 2, axis=-1)
    s22 = np.sum(x[..., 1, :] ** 2, axis=-1)
    s12 = np.sum(x[..., 0, :] * x[..., 1, :], axis=-1)
    return 0.5 * (s11 + s22), 0.5 * (s11 - s22) + 1j * s12


def sigma_min(x):
    """Smallest singular value of each ``2 x p`` matrix, from the Gram eigenvalues."""
    c, e = gram_coordinates(x)
    return np.sqrt(np.maximum(c - np.abs(e), 0.0))


def gram_entries(c, e):
    """``(S11, S12, S22)`` from ``(c, E)``."""
    return c + e.real, e.imag, c - e.real


def congruence(g: np.ndarray, c, e):
    """Gram coordinates of ``g S g^T`` for a 2x2 matrix ``g`` (or an array of them)."""
    s11, s12, s22 = gram_entries(c, e)
    g = np.asarray(g, dtype=float)
    a, b = g[..., 0, 0], g[..., 0, 1]
    cc, d = g[..., 1, 0], g[..., 1, 1]
    n11 = a * a * s11 + 2 * a * b * s12 + b * b * s22
    n22 = cc * cc * s11 + 2 * cc * d * s12 + d * d * s22
    n12 = a * cc * s11 + (a * d + b * cc) * s12 + b * d * s22
    return 0.5 * (n11 + n22), 0.5 * (n11 - n22) + 1j * n12


def ktype_factor(m: int, c, e):
    """``(conj E / c)^{m/2}`` for ``m >= 0`` and ``(E / c)^{|m|/2}`` for ``m < 0``."""
    if m % 2:
        raise DomainError("functions of the Gram matrix only carry even K-types")
    base = np.conj(e) / c if m >= 0 else e / c
    return base ** (abs(m) // 2)


@dataclass(frozen=True)
class GramProfile:
    """``U(S) = bump(|x|) * step(sigma_min(x)) * sum_m coeff_m (K-type m angular factor)``.

    ``|x|^2 = tr S = 2c`` and ``sigma_min^2 = c - |E|``.  The radial bump is the
    mollifier on ``r_inner < |x| < r_outer``; the step rises from 0 at
    ``sigma_floor`` to 1 at ``step_ratio * sigma_floor``.
    """

    r_inner: float
    r_outer: float
    sigma_floor: float
    angular: tuple = ((0, 1.0),)
    step_ratio: float = 1.25

    def __post_init__(self):
        if not 0 < self.r_inner < self.r_outer:
            raise InvalidSupport("need 0 < r_inner < r_outer")
        if not 0 < self.sigma_floor:
            raise InvalidSupport("sigma_floor must be positive")
        if self.sigma_floor * math.sqrt(2.0) >= self.r_outer:
            raise InvalidSupport("sigma_floor leaves no maximal-rank matrices in the support")

    @property
    def ktypes(self) -> tuple:
        return tuple(m for m, _ in self.angular)

    def radial(self, c, abs_e):
        r = np.sqrt(2.0 * c)
        mid = 0.5 * (self.r_inner + self.r_outer)
        half = 0.5 * (self.r_outer - self.r_inner)
        smin = np.sqrt(np.maximum(c - abs_e, 0.0))
        step = smooth_step((smin - self.sigma_floor) / ((self.step_ratio - 1.0) * self.sigma_floor))
        return mollifier((r - mid) / half) * step

    def angular_part(self, c, e):
        out = np.zeros(np.broadcast(c, e).shape, dtype=complex)
        for m, coeff in self.angular:
            out = out + coeff * ktype_factor(m, c, e)
        return out

    def __call__(self, c, e):
        cb, eb = np.broadcast_arrays(np.asarray(c, dtype=float), np.asarray(e, dtype=complex))
        out = np.zeros(cb.shape, dtype=complex)
        inside = (cb > 0.5 * self.r_inner ** 2) & (cb < 0.5 * self.r_outer ** 2)
        inside &= cb - np.abs(eb) > self.sigma_floor ** 2
        ci, ei = cb[inside], eb[inside]
        out[inside] = self.radial(ci, np.abs(ei)) * self.angular_part(ci, ei)
        return out

    def c_range(self) -> tuple[float, float]:
        return 0.5 * self.r_inner ** 2, 0.5 * self.r_outer ** 2


@dataclass(frozen=True)
class KFilter:
    """Multiplier ``m -> weight`` on K-types, applied by circle quadrature with ``n_points`` nodes."""

    weights: tuple
    n_points: int = 32

    def weight(self, m: int) -> complex:
        return dict(self.weights).get(m, 0.0)


@dataclass(frozen=True)
class TestFunctionM2p:
    """A smooth function on ``M_{2,p}`` vanishing unless ``sigma_min(x) >= floor`` and ``|x| <= radius``.

    ``value`` maps an array of shape ``(..., 2, p)`` to ``(...)``.  Functions of
    the Gram matrix also carry their :class:`GramProfile` and, once projected
    to K-types, the :class:`KFilter` that was applied; the orbital integrals
    use both to work on the three-dimensional space of Gram matrices.
    """

    __test__ = False  # not a pytest class

    p: int
    value: Callable
    sigma_min_floor: float
    support_radius: float
    gram: GramProfile | None = None
    kfilter: KFilter | None = None
    label: str = ""

    def __post_init__(self):
        if self.p < 2:
            raise DomainError("p must be at least 2")
        if not 0 < self.sigma_min_floor < self.support_radius:
            raise InvalidSupport("need 0 < sigma_min_floor < support_radius")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-2:] != (2, self.p):
            x = x.reshape(x.shape[:-1] + (2, self.p))
        out = np.asarray(self.value(x))
        return out[()] if out.ndim == 0 else out

    def gram_orbit(self, c, e, n_points: int) -> np.ndarray:
        """``u(k_l^{-1} x)`` for ``theta_l = pi l / n_points``; trailing axis of length ``n_points``.

        ``x -> -x`` fixes the Gram matrix, so half a circle of rotations suffices.
        Projected functions apply their K-type filter to these samples by FFT.
        """
        if self.gram is None:
            raise DomainError("orbit samples need a function of the Gram matrix")
        fine = n_points if self.kfilter is None else self.kfilter.n_points // 2
        if fine % n_points:
            raise DomainError(f"{n_points} rotations do not subdivide the filter grid of {fine}")
        theta = math.pi * np.arange(fine) / fine
        phase = np.exp(2j * theta)
        c = np.asarray(c, dtype=float)[..., None]
        e = np.asarray(e, dtype=complex)[..., None] * phase
        samples = self.gram(c, e)
        if self.kfilter is not None:
            samples = apply_kfilter(samples, self.kfilter)
        return samples[..., :: fine // n_points]

    def scaled(self, factor: complex) -> "TestFunctionM2p":
        gram = None
        if self.gram is not None:
            gram = GramProfile(self.gram.r_inner, self.gram.r_outer, self.gram.sigma_floor,
                               tuple((m, factor * a) for m, a in self.gram.angular), self.gram.step_ratio)
        return TestFunctionM2p(self.p, lambda x, f=self.value: factor * np.asarray(f(x)),
                               self.sigma_min_floor, self.support_radius, gram, self.kfilter,
                               f"{factor}*{self.label}")


def apply_kfilter(samples: np.ndarray, kfilter: KFilter) -> np.ndarray:
    """Filter orbit samples over ``theta in [0, pi)`` (trailing axis) by the K-type multiplier.

    On the half circle the type ``m`` appears as the frequency ``m/2`` in
    ``e^{2 i theta}`` steps, so even types up to ``|m| < n`` are resolved.
    """
    n = samples.shape[-1]
    # samples[l] = sum_m a_m e^{-i m theta_l} with theta_l = pi l / n, so a_{2k} = ifft(samples)[k].
    coeffs = np.fft.ifft(samples, axis=-1)
    freq = np.rint(np.fft.fftfreq(n, 1.0 / n)).astype(int)
    mult = np.array([kfilter.weight(int(2 * f)) for f in freq])
    return np.fft.fft(coeffs * mult, axis=-1)


def make_gram_test_function(p: int = 2, r_inner: float = 1.2, r_outer: float = 1.8,
                            sigma_floor: float = 0.6, angular=((0, 1.0),), label: str = "") -> TestFunctionM2p:
    """Bump in ``|x|`` times a smooth cutoff in ``sigma_min(x)`` times K-type angular factors.

    ``angular`` lists ``(m, coefficient)`` pairs with even ``m``.
    """
    gram = GramProfile(r_inner, r_outer, sigma_floor, tuple((int(m), complex(a)) for m, a in angular))

    def value(x, gram=gram):
        c, e = gram_coordinates(x)
        return gram(c, e)

    return TestFunctionM2p(p, value, sigma_floor, r_outer, gram, None,
                           label or f"gram({r_inner},{r_outer};{sigma_floor};{list(gram.ktypes)})")


def gram_measure_constant(p: int) -> float:
    return math.pi ** (p - 0.5) / (special.gamma(p / 2) * special.gamma((p - 1) / 2))


@dataclass(frozen=True)
class GramQuadrature:
    """Nodes ``(c, E)`` and weights discretising the pushforward measure over a Gram support."""

    c: np.ndarray
    e: np.ndarray
    weights: np.ndarray

    @classmethod
    def for_profile(cls, gram: GramProfile, p: int, n_c: int = 24, n_d: int = 24,
                    n_alpha: int = 32) -> "GramQuadrature":
        c_lo, c_hi = gram.c_range()
        xc, wc = np.polynomial.legendre.leggauss(n_c)
        c = 0.5 * (c_hi + c_lo) + 0.5 * (c_hi - c_lo) * xc
        wc = 0.5 * (c_hi - c_lo) * wc
        xd, wd = np.polynomial.legendre.leggauss(n_d)
        d_hi = c - gram.sigma_floor ** 2               # sigma_min^2 = c - |E| >= floor^2
        d = 0.5 * d_hi[:, None] * (1.0 + xd[None, :])
        wd = 0.5 * d_hi[:, None] * wd[None, :]
        alpha = 2.0 * math.pi * np.arange(n_alpha) / n_alpha
        cc = np.broadcast_to(c[:, None, None], (n_c, n_d, n_alpha))
        dd = np.broadcast_to(d[:, :, None], (n_c, n_d, n_alpha))
        e = dd * np.exp(1j * alpha)[None, None, :]
        det = cc ** 2 - dd ** 2
        w = (2.0 * gram_measure_constant(p) * det ** ((p - 3) / 2.0) * dd
             * (wc[:, None, None] * wd[:, :, None]) * (2.0 * math.pi / n_alpha))
        return cls(np.ascontiguousarray(cc).ravel(), e.ravel(), w.ravel())

    def integrate(self, values) -> complex:
        return complex(np.sum(self.weights * values))
