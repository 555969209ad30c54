"""Dilation spectral transform on the punctured plane.

A test function ``v`` supported in an annulus is split into homogeneous pieces

    v_lam(w) = int_0^inf a^{-1-i lam} v(w/a) da/a,

each homogeneous of degree ``-1 - i lam``.  Writing ``w = e^s sigma`` with
``sigma`` on the unit circle, ``v_lam(sigma) = int e^{(1+i lam) s} v(e^s sigma) ds``
is a Fourier transform in the log-radius, taken over the compact interval
``[log inner, log outer]``.  The integrand and all its derivatives vanish at
both ends, so the trapezoid rule in ``s`` converges faster than any power of
the step, and the FFT in the angle gives the circle modes.

:class:`MellinTransform` samples ``v`` once on that log-polar grid and then
evaluates mode coefficients at any batch of (possibly complex) ``lam``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .numerics import DEFAULT_CFG, QuadratureConfig, TestFunction2D, integrate_1d

log = logging.getLogger(__name__)

EVEN, ODD = 0, 1


@dataclass(frozen=True)
class HomogeneousComponent:
    """``v_lam(r sigma) = r^{-1-i lam} * sum_k coeffs[k] e^{ik theta}``."""

    lam: complex
    coeffs: np.ndarray
    k_max: int

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.k_max:
            return 0j
        return complex(self.coeffs[k + self.k_max])

    def on_circle(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * np.multiply.outer(theta, self.modes)) @ self.coeffs

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        r = np.hypot(w[..., 0], w[..., 1])
        theta = np.arctan2(w[..., 1], w[..., 0])
        out = r ** (-1.0 - 1j * self.lam) * self.on_circle(theta)
        return out[()] if np.ndim(out) == 0 else out

    def restricted(self, mask) -> "HomogeneousComponent":
        """Copy with every coefficient outside ``mask`` (indexed like ``modes``) zeroed."""
        return HomogeneousComponent(self.lam, np.where(mask, self.coeffs, 0), self.k_max)


def _log_radius_nodes(inner: float, outer: float, lambda_resolve: float, min_nodes: int = 257):
    """Trapezoid nodes in ``s = log r`` fine enough to resolve ``e^{i lam s}`` up to ``lambda_resolve``.

    The aliasing error of the rule is the transform of the profile at
    ``2 pi/h - |lam|``, so ``2 pi/h`` is kept well above twice the resolved band.
    """
    s0, s1 = math.log(inner), math.log(outer)
    h = 2.0 * math.pi / (2.0 * lambda_resolve + 400.0)
    n = max(min_nodes, int(math.ceil((s1 - s0) / h)) + 1)
    s = np.linspace(s0, s1, n)
    w = np.full(n, s[1] - s[0])
    return s, w


class MellinTransform:
    """Dilation transform of one test function, sampled once and evaluated on demand."""

    def __init__(self, v: TestFunction2D, k_max: int = 16, lambda_resolve: float = 2000.0,
                 n_theta: int | None = None):
        self.v = v
        self.k_max = int(k_max)
        self.lambda_resolve = float(lambda_resolve)
        n_theta = n_theta or max(8 * (self.k_max + 1), 128)
        s, w = _log_radius_nodes(v.support_inner, v.support_outer, self.lambda_resolve)
        theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
        r = np.exp(s)
        samples = np.asarray(v.polar(r[:, None], theta[None, :]), dtype=complex)
        spectrum = np.fft.fft(samples, axis=1) / n_theta
        idx = np.arange(-self.k_max, self.k_max + 1) % n_theta
        self.s = s
        # weights * e^{s} * (circle coefficient of v(e^s .))
        self._profile = (w * r)[:, None] * spectrum[:, idx]
        self.log_support = (s[0], s[-1])

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    def coefficients(self, lam, chunk: int = 1024) -> np.ndarray:
        """Mode coefficients for every ``lam`` in an array; shape ``lam.shape + (2k_max+1,)``."""
        lam = np.asarray(lam, dtype=complex)
        flat = lam.ravel()
        out = np.empty((flat.size, self._profile.shape[1]), dtype=complex)
        for start in range(0, flat.size, chunk):
            sl = slice(start, start + chunk)
            out[sl] = np.exp(1j * np.multiply.outer(flat[sl], self.s)) @ self._profile
        return out.reshape(lam.shape + (self._profile.shape[1],))

    def component(self, lam: complex) -> HomogeneousComponent:
        return HomogeneousComponent(complex(lam), self.coefficients(np.array([lam]))[0], self.k_max)

    __call__ = component

    def values_at(self, lam, w) -> np.ndarray:
        """``v_lam(w)`` for an array of ``lam`` at one point ``w``."""
        w = np.asarray(w, dtype=float)
        r, theta = float(np.hypot(*w)), float(np.arctan2(w[1], w[0]))
        lam = np.asarray(lam, dtype=complex)
        phases = np.exp(1j * self.modes * theta)
        return r ** (-1.0 - 1j * lam) * (self.coefficients(lam) @ phases)

    def tail_size(self, lam_cut: float) -> float:
        """Largest mode coefficient magnitude on a few real ``lam`` beyond the cutoff."""
        probe = lam_cut * np.array([1.0, 1.1, 1.25, 1.5, 2.0])
        probe = np.concatenate([probe, -probe])
        return float(np.max(np.abs(self.coefficients(probe))))


def mellin_forward(v: TestFunction2D, lam: complex, k_max: int = 16,
                   cfg: QuadratureConfig = DEFAULT_CFG) -> HomogeneousComponent:
    """The homogeneous component ``v_lam`` restricted to the unit circle, as circle modes."""
    resolve = max(200.0, 2.0 * abs(complex(lam).real) + 100.0)
    return MellinTransform(v, k_max, lambda_resolve=resolve).component(lam)


def choose_lambda_cutoff(transform: MellinTransform, rel_tol: float = 1e-12,
                         start: float = 20.0, limit: float | None = None) -> float:
    """Smallest doubling of ``start`` beyond which the mode coefficients are below ``rel_tol`` of their peak.

    The measured tail size is logged so the truncation is reproducible.
    """
    limit = limit or transform.lambda_resolve
    peak = float(np.max(np.abs(transform.coefficients(np.linspace(-5, 5, 41)))))
    cut = start
    while cut < limit and transform.tail_size(cut) > rel_tol * peak:
        cut *= 1.5
    cut = min(cut, limit)
    log.info("lambda cutoff %.1f, tail %.3e (peak %.3e)", cut, transform.tail_size(cut), peak)
    return cut


def _as_transform(v, k_max: int, lambda_resolve: float) -> MellinTransform:
    if isinstance(v, MellinTransform):
        return v
    return MellinTransform(v, k_max, lambda_resolve=lambda_resolve)


def mellin_invert(components, w, lambda_cutoff: float, cfg: QuadratureConfig = DEFAULT_CFG) -> complex:
    """``(1/2pi) int_{-cutoff}^{cutoff} v_lam(w) dlam``.

    ``components`` is either a :class:`MellinTransform` (fast batched path) or
    any callable mapping ``lam`` to a :class:`HomogeneousComponent`.
    """
    w = np.asarray(w, dtype=float)
    if np.hypot(*w) == 0:
        raise DomainError("the dilation transform is not defined at the origin")
    if isinstance(components, MellinTransform):
        if lambda_cutoff > components.lambda_resolve:
            raise DomainError("lambda_cutoff exceeds the band resolved by this transform")
        integrand = lambda lam: components.values_at(lam, w)
    else:
        integrand = lambda lam: np.array([components(float(x))(w) for x in lam])
    val = integrate_1d(integrand, -lambda_cutoff, lambda_cutoff, cfg,
                       breakpoints=np.linspace(-lambda_cutoff, lambda_cutoff, 17)[1:-1])
    return complex(val) / (2.0 * math.pi)


def plancherel_pair(u, v, lambda_cutoff: float | None = None, cfg: QuadratureConfig = DEFAULT_CFG,
                    k_max: int = 16) -> complex:
    """Spectral side ``(1/2pi) int int u_lam conj(v_lam) dsigma dlam`` of the L^2 inner product.

    The circle integral is ``2 pi * sum_k`` of mode products.  Without an explicit
    cutoff one is chosen from the measured decay of both transforms.
    """
    tu = _as_transform(u, k_max, 2000.0)
    tv = _as_transform(v, k_max, 2000.0)
    if lambda_cutoff is None:
        lambda_cutoff = max(choose_lambda_cutoff(tu), choose_lambda_cutoff(tv))

    def integrand(lam):
        return np.sum(tu.coefficients(lam) * np.conj(tv.coefficients(lam)), axis=-1)

    edges = np.linspace(-lambda_cutoff, lambda_cutoff, 33)
    val = integrate_1d(integrand, -lambda_cutoff, lambda_cutoff, cfg, breakpoints=edges[1:-1])
    return complex(val)


def pairing_values(tu: MellinTransform, tv: MellinTransform, lam) -> np.ndarray:
    """``int_{S^1} v_lam(sigma) u_{-lam}(sigma) dsigma`` for an array of ``lam``.

    Only modes ``k`` of ``v_lam`` against ``-k`` of ``u_{-lam}`` survive the circle
    integral, which contributes a factor ``2 pi``.
    """
    lam = np.asarray(lam, dtype=complex)
    cv = tv.coefficients(lam)
    cu = tu.coefficients(-lam)[..., ::-1]
    return 2.0 * math.pi * np.sum(cv * cu, axis=-1)


def bilinear_pair_at(u, v, lam: complex, cfg: QuadratureConfig = DEFAULT_CFG,
                     k_max: int = 16) -> complex:
    """Fibrewise bilinear pairing ``int_{S^1} v_lam(sigma) u_{-lam}(sigma) dsigma`` (no conjugation)."""
    resolve = max(200.0, 2.0 * abs(complex(lam).real) + 100.0)
    tu = _as_transform(u, k_max, resolve)
    tv = _as_transform(v, k_max, resolve)
    return complex(pairing_values(tu, tv, np.array([lam]))[0])


def parity_split(v: TestFunction2D) -> tuple[TestFunction2D, TestFunction2D]:
    """Even and odd parts of ``v`` under ``w -> -w``."""
    even = TestFunction2D(lambda w, f=v.value: 0.5 * (np.asarray(f(w)) + np.asarray(f(-np.asarray(w)))),
                          v.support_inner, v.support_outer, "even", f"even({v.label})")
    odd = TestFunction2D(lambda w, f=v.value: 0.5 * (np.asarray(f(w)) - np.asarray(f(-np.asarray(w)))),
                         v.support_inner, v.support_outer, "odd", f"odd({v.label})")
    return even, odd


def parity_of_modes(component: HomogeneousComponent, tol: float = 1e-10) -> int | None:
    """``EVEN`` or ``ODD`` if the component lives on one parity class of modes, else ``None``."""
    scale = max(float(np.max(np.abs(component.coeffs))), 1e-300)
    odd_mass = float(np.max(np.abs(component.coeffs[component.modes % 2 == 1]), initial=0.0))
    even_mass = float(np.max(np.abs(component.coeffs[component.modes % 2 == 0]), initial=0.0))
    if odd_mass <= tol * scale:
        return EVEN
    if even_mass <= tol * scale:
        return ODD
    return None
