"""Resolvent of the positive Capelli operator for the pair (O(1,1), Sp2(R)).

On homogeneous components the operator ``C+ = -(E+1)^2`` (``E`` the Euler
field ``x d/dx + y d/dy``) acts by ``lam^2``.  The distribution pairing of its
resolvent with a test function is therefore

    R(z) = (1/2pi) int_R P(lam) / (lam^2 - z^2) dlam,      Im z > 0,

where ``P(lam) = int_{S^1} v_lam u_{-lam}`` is entire in ``lam``.  Splitting
``1/(lam^2 - z^2)`` into partial fractions and pushing each half onto a
horizontal line ``R -/+ iN`` continues ``R`` to ``Im z > -N`` with a single
simple pole at ``z = 0``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContourCollision, CrossCheckFailure, DomainError
from .mellin import MellinTransform, pairing_values
from .numerics import DEFAULT_CFG, Contour, QuadratureConfig, TestFunction2D, contour_integrate, integrate_1d

log = logging.getLogger(__name__)

#: Relative floor below which the pairing function is treated as zero when choosing line cutoffs.
TAIL_FLOOR = 1e-15


def capelli_apply_o11(v, step: float = 2e-3) -> TestFunction2D:
    """``-(E+1)^2 v`` by differencing along rays.

    Along a ray ``g(s) = v(e^s sigma)`` and ``E v = g'(s)``, so the operator is
    ``-(g'' + 2g' + g)``.  Fourth-order central differences at steps ``h`` and
    ``h/2`` are combined by one Richardson step (sixth order overall).
    """

    def derivs(w, h):
        w = np.asarray(w, dtype=float)
        vals = {j: np.asarray(v(w * math.exp(j * h)), dtype=complex) for j in (-2, -1, 0, 1, 2)}
        d1 = (vals[-2] - 8 * vals[-1] + 8 * vals[1] - vals[2]) / (12 * h)
        d2 = (-vals[-2] + 16 * vals[-1] - 30 * vals[0] + 16 * vals[1] - vals[2]) / (12 * h * h)
        return -(d2 + 2 * d1 + vals[0])

    def value(w):
        coarse, fine = derivs(w, step), derivs(w, step / 2)
        return fine + (fine - coarse) / 15.0

    inner = getattr(v, "support_inner", None)
    outer = getattr(v, "support_outer", None)
    label = f"capelli({getattr(v, 'label', 'v')})"
    if inner is None:
        raise DomainError("capelli_apply_o11 needs a test function carrying its support annulus")
    return TestFunction2D(value, inner, outer, getattr(v, "parity", None), label)


@dataclass
class ResolventPairing:
    """Pairing data for ``((C+ - z^2)^{-1} v)(u)``.

    ``pairing_fn(lam) = int_{S^1} v_lam(sigma) u_{-lam}(sigma) dsigma`` is
    evaluated from the dilation transforms at complex ``lam`` directly.  It is
    even in ``lam`` only when ``(u, v)`` is a symmetric pair; the measured
    defect is kept in ``evenness_defect`` and logged, and nothing downstream
    relies on evenness.
    """

    u: TestFunction2D
    v: TestFunction2D
    k_max: int = 16
    lambda_resolve: float = 3000.0
    pw_type: float = field(init=False)
    evenness_defect: float = field(init=False)

    def __post_init__(self):
        self._tu = MellinTransform(self.u, self.k_max, self.lambda_resolve)
        self._tv = MellinTransform(self.v, self.k_max, self.lambda_resolve)
        widths = [math.log(f.support_outer / f.support_inner) for f in (self.u, self.v)]
        self.pw_type = max(widths)
        self._cutoffs: dict[float, float] = {}
        probe = np.concatenate([np.linspace(0.1, 6.0, 12), [0.3 + 0.7j, 1.5 - 2.0j]])
        p, q = self.pairing_fn(probe), self.pairing_fn(-probe)
        scale = max(float(np.max(np.abs(p))), 1e-300)
        self.evenness_defect = float(np.max(np.abs(p - q))) / scale
        log.debug("pairing evenness defect %.2e for (%s, %s)", self.evenness_defect, self.u.label, self.v.label)

    def pairing_fn(self, lam) -> np.ndarray:
        return pairing_values(self._tu, self._tv, lam)

    def scale(self) -> float:
        return float(np.max(np.abs(self.pairing_fn(np.linspace(-3, 3, 25)))))

    def line_cutoff(self, shift: float) -> float:
        """Half-length beyond which ``|P(x + i shift)|`` is negligible on that line."""
        key = round(float(shift), 12)
        if key in self._cutoffs:
            return self._cutoffs[key]
        x = np.concatenate([np.linspace(0, 50, 201), np.geomspace(50, 0.8 * self.lambda_resolve, 400)])
        vals = np.abs(self.pairing_fn(np.concatenate([x, -x]) + 1j * shift))
        vals = np.maximum(vals[: x.size], vals[x.size:])
        peak = max(float(vals.max()), 1e-300)
        above = np.nonzero(vals > TAIL_FLOOR * peak)[0]
        cut = float(x[above[-1]]) if above.size else 10.0
        cut = max(20.0, 1.2 * cut + 10.0)
        if cut >= self.lambda_resolve:
            log.warning("pairing tail on line Im=%g not resolved below %g", shift, self.lambda_resolve)
            cut = self.lambda_resolve
        self._cutoffs[key] = cut
        return cut


def _pole_breakpoints(centers, widths, cut):
    pts = []
    for c, w in zip(centers, widths):
        for m in (0.0, 1.0, 4.0, 16.0):
            pts.extend([c - m * w, c + m * w])
    pts.extend(np.linspace(-cut, cut, 17)[1:-1])
    return sorted(p for p in pts if -cut < p < cut)


def _log_interval(c: complex, cut: float) -> complex:
    """``int_{-cut}^{cut} dlam / (lam - c)`` for non-real ``c`` (the principal branch stays continuous)."""
    return complex(np.log(cut - c) - np.log(-cut - c))


def resolvent_pair(rp: ResolventPairing, z: complex, cfg: QuadratureConfig = DEFAULT_CFG) -> complex:
    """``(1/2pi) int_R P(lam) / (lam^2 - z^2) dlam`` for ``Im z > 0``.

    Both poles ``lam = +-z`` are removed by subtracting ``P(+-z)/(lam -+ z)``
    and adding those pieces back in closed form, so points close to the real
    axis cost no more than points far from it.
    """
    z = complex(z)
    if z.imag <= 0:
        raise DomainError(f"resolvent_pair needs Im z > 0, got {z}")
    cut = max(rp.line_cutoff(0.0), 2.0 * abs(z.real) + 20.0)
    brk = _pole_breakpoints([z.real, -z.real], [z.imag, z.imag], cut)
    cfg = cfg.with_(abs_tol=min(cfg.abs_tol, 1e-14 * max(rp.scale(), 1e-300)),
                    max_subdivisions=max(cfg.max_subdivisions, 20000))
    p_plus, p_minus = rp.pairing_fn(np.array([z, -z]))

    def integrand(lam):
        p = rp.pairing_fn(lam)
        return (p - p_plus) / (lam - z) - (p - p_minus) / (lam + z)

    smooth = complex(integrate_1d(integrand, -cut, cut, cfg, breakpoints=brk))
    singular = p_plus * _log_interval(z, cut) - p_minus * _log_interval(-z, cut)
    return (smooth + singular) / (2.0 * z) / (2.0 * math.pi)


def resolvent_pair_partial_fractions(rp: ResolventPairing, z: complex,
                                     cfg: QuadratureConfig = DEFAULT_CFG) -> complex:
    """Same value as :func:`resolvent_pair`, through ``-(1/2z)[1/(z-lam) + 1/(z+lam)]``."""
    z = complex(z)
    if z.imag <= 0:
        raise DomainError(f"needs Im z > 0, got {z}")
    cut = max(rp.line_cutoff(0.0), 2.0 * abs(z.real) + 20.0)
    brk = _pole_breakpoints([z.real, -z.real], [z.imag, z.imag], cut)
    cfg = cfg.with_(abs_tol=min(cfg.abs_tol, 1e-14 * max(rp.scale(), 1e-300)),
                    max_subdivisions=max(cfg.max_subdivisions, 20000))
    first = integrate_1d(lambda lam: rp.pairing_fn(lam) / (z - lam), -cut, cut, cfg, breakpoints=brk)
    second = integrate_1d(lambda lam: rp.pairing_fn(lam) / (z + lam), -cut, cut, cfg, breakpoints=brk)
    return complex(-(first + second) / (2.0 * z) / (2.0 * math.pi))


def _check_continuation_point(z: complex, N: float, collision_tol: float):
    if N <= 0:
        raise DomainError("the contour shift N must be positive")
    if z == 0:
        raise DomainError("z = 0 is the pole of the continued resolvent")
    gap = z.imag + N
    if abs(gap) < collision_tol:
        raise ContourCollision(f"z = {z} lies within {collision_tol} of the shifted line Im = {-N}")
    if gap < 0:
        raise DomainError(f"z = {z} is below the continuation region Im z > {-N}")


def continued_resolvent_many(rp: ResolventPairing, zs, N: float = 1.0, cfg: QuadratureConfig = DEFAULT_CFG,
                             collision_tol: float = 1e-3) -> np.ndarray:
    """Continued resolvent at many points; the pairing is sampled once per quadrature node.

    ``-(1/4pi z)[int_{R-iN} P(lam)/(z-lam) dlam + int_{R+iN} P(lam)/(z+lam) dlam]``
    which equals the resolvent for ``Im z > 0`` and is holomorphic on
    ``Im z > -N`` away from ``z = 0``.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    for z in zs:
        _check_continuation_point(complex(z), N, collision_tol)
    gap = float(np.min(zs.imag + N))
    cut = max(rp.line_cutoff(-N), rp.line_cutoff(N), 2.0 * float(np.max(np.abs(zs.real))) + 20.0)
    centers = list(zs.real) + list(-zs.real)
    brk = _pole_breakpoints(centers, [max(gap, 1e-3)] * len(centers), cut)
    line_scale = max(float(np.max(np.abs(rp.pairing_fn(np.linspace(-5, 5, 21) - 1j * N)))), 1e-300)
    cfg = cfg.with_(abs_tol=min(cfg.abs_tol, 1e-15 * line_scale),
                    max_subdivisions=max(cfg.max_subdivisions, 40000))

    def integrand(x):
        lower = x - 1j * N
        upper = x + 1j * N
        return (rp.pairing_fn(lower)[:, None] / (zs[None, :] - lower[:, None])
                + rp.pairing_fn(upper)[:, None] / (zs[None, :] + upper[:, None]))

    total = integrate_1d(integrand, -cut, cut, cfg, breakpoints=brk)
    return -np.asarray(total) / (4.0 * math.pi * zs)


def continued_resolvent(rp: ResolventPairing, z: complex, N: float = 1.0, cfg: QuadratureConfig = DEFAULT_CFG,
                        collision_tol: float = 1e-3) -> complex:
    """Meromorphic continuation of :func:`resolvent_pair` to ``Im z > -N``."""
    return complex(continued_resolvent_many(rp, [z], N, cfg, collision_tol)[0])


@dataclass(frozen=True)
class ResidueCheck:
    contour_value: complex
    closed_form: complex
    radius: float


def residue_at_zero_paths(rp: ResolventPairing, N: float = 1.0, cfg: QuadratureConfig = DEFAULT_CFG,
                          rel_tol: float = 1e-4, abs_tol: float = 1e-8) -> ResidueCheck:
    """Residue at ``z = 0`` by a circle integral and by ``(i/2) P(0)``, cross-checked."""
    radius = 0.25 * N
    circle = Contour.circle(0.0, radius)
    contour_value = contour_integrate(lambda z: continued_resolvent_many(rp, z, N, cfg), circle, cfg)
    contour_value = complex(contour_value) / (2j * math.pi)
    closed = 0.5j * complex(rp.pairing_fn(np.array([0.0]))[0])
    diff = abs(contour_value - closed)
    if diff > max(abs_tol, rel_tol * abs(closed)):
        raise CrossCheckFailure(
            f"residue at 0: contour {contour_value:.6e} vs closed form {closed:.6e} (difference {diff:.2e})")
    return ResidueCheck(contour_value, closed, radius)


def residue_at_zero(rp: ResolventPairing, cfg: QuadratureConfig = DEFAULT_CFG, N: float = 1.0) -> complex:
    """Residue of the continued resolvent at ``z = 0``; equals ``(i/2) int v_0 u_0``."""
    return residue_at_zero_paths(rp, N, cfg).contour_value
