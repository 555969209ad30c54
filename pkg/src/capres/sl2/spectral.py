"""Resolvent of the shifted Casimir for SL2(R) acting on matrices of rank two.

For test functions ``u, v`` the pairing of ``(C+ - z^2)^{-1}`` splits into a
spherical and a non-spherical channel,

    R(z) = (1/8pi) [ int f0(lam) lam tanh(pi lam/2) / (lam^2 - z^2) dlam
                   + int f1(lam) lam coth(pi lam/2) / (lam^2 - z^2) dlam ],

with ``f0, f1`` even entire functions of Paley-Wiener type.  Moving the
integration lines up past the poles of ``tanh`` and ``coth`` continues ``R``
to ``Im z > -L`` with simple poles at ``z = -in``.  The residue there is
``(i/2pi) f(in)`` in the channel whose parity is opposite to ``n`` (and
``(i/4pi) f1(0)`` at ``z = 0``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ContourCollision, DomainError, PoleProximity
from ..numerics import (DEFAULT_CFG, EvenPWFunction, QuadratureConfig, gauss_legendre_panels,
                        integrate_1d, residue)

log = logging.getLogger(__name__)

SPHERICAL, NON_SPHERICAL = 0, 1
POLE_TOLERANCE = 0.05
RESIDUE_RADIUS = 0.1
LINE_TOLERANCE = 0.05


@dataclass(frozen=True)
class PlancherelDensity:
    epsilon: int

    def __post_init__(self):
        if self.epsilon not in (0, 1):
            raise DomainError("epsilon is 0 (spherical) or 1 (non-spherical)")

    def __call__(self, lam):
        return plancherel_density(self, lam)


def lam_tanh(lam):
    """``lam * tanh(pi lam / 2)``, vectorised and valid for complex arguments."""
    lam = np.asarray(lam)
    return lam * np.tanh(0.5 * math.pi * lam)


def lam_coth(lam):
    """``lam * coth(pi lam / 2)`` with its removable value ``2/pi`` at the origin."""
    lam = np.asarray(lam)
    out = np.empty(lam.shape, dtype=np.result_type(lam, float))
    small = np.abs(lam) < 1e-4
    big = ~small
    out[big] = lam[big] / np.tanh(0.5 * math.pi * lam[big])
    x = lam[small]
    # lam coth(a lam) = (1/a)(1 + (a lam)^2/3 - (a lam)^4/45 + ...)
    a2 = (0.5 * math.pi * x) ** 2
    out[small] = (2.0 / math.pi) * (1.0 + a2 / 3.0 - a2 * a2 / 45.0)
    return out


def plancherel_density(label: PlancherelDensity | int, lam):
    """``(lam/8pi) tanh(pi lam/2)`` (spherical) or ``(lam/8pi) coth(pi lam/2)`` (non-spherical)."""
    eps = label.epsilon if isinstance(label, PlancherelDensity) else int(label)
    lam = np.asarray(lam, dtype=float)
    out = (lam_tanh(lam) if eps == 0 else lam_coth(lam)) / (8.0 * math.pi)
    return float(out) if out.ndim == 0 else out


def _channel_weight(eps: int):
    return lam_tanh if eps == 0 else lam_coth


def _pw_cutoff(f: EvenPWFunction, shift: float, floor: float = 1e-14, limit: float = 1500.0) -> float:
    """Half-length beyond which ``|f(x + i shift)|`` stays below ``floor`` times its peak.

    Never exceeds the band limit of ``f`` when it has one.
    """
    if f.band_limit is not None:
        limit = min(limit, f.band_limit)
    knee = min(40.0, limit)
    x = np.concatenate([np.linspace(0.0, knee, 161), np.geomspace(knee, limit, 300)])
    vals = np.abs(f(x + 1j * shift))
    peak = max(float(np.max(vals)), 1e-300)
    above = np.nonzero(vals > floor * peak)[0]
    cut = float(x[above[-1]]) if above.size else 20.0
    return min(limit, max(min(30.0, limit), 1.1 * cut + 10.0))


def _real_cut(f: EvenPWFunction, z: complex) -> float:
    cut = max(_pw_cutoff(f, 0.0), 2.0 * abs(z.real) + 30.0)
    return cut if f.band_limit is None else min(cut, f.band_limit)


def _check_strip(z: complex):
    if not 0 < z.imag < 1:
        raise DomainError(f"the direct resolvent formula needs 0 < Im z < 1, got {z}")


def _log_interval(c: complex, cut: float) -> complex:
    return complex(np.log(cut - c) - np.log(-cut - c))


def _channel_direct(f: EvenPWFunction, eps: int, z: complex, cfg: QuadratureConfig) -> complex:
    """``int_R f(lam) w(lam) / (lam^2 - z^2) dlam`` with ``w = lam tanh`` or ``lam coth``.

    ``g = f w`` is even and holomorphic near the real axis, so the poles at
    ``+-z`` are removed by subtracting ``g(z)/(lam -+ z)`` and adding those
    terms back in closed form on the truncated interval.
    """
    if f.is_zero:
        return 0j
    weight = _channel_weight(eps)
    cut = _real_cut(f, z)
    g_z = complex(f(np.array([z]))[0] * weight(np.array([z]))[0])

    def integrand(lam):
        g = f(lam) * weight(lam)
        return (g - g_z) / (lam - z) - (g - g_z) / (lam + z)

    brk = sorted({p for c in (z.real, -z.real) for m in (0.0, 1.0, 4.0)
                  for p in (c - m * z.imag, c + m * z.imag) if -cut < p < cut}
                 | set(np.linspace(-cut, cut, 41)[1:-1]))
    cfg = cfg.with_(abs_tol=min(cfg.abs_tol, 1e-14 * max(f.sup_bound, 1e-300)),
                    max_subdivisions=max(cfg.max_subdivisions, 40000))
    smooth = complex(integrate_1d(integrand, -cut, cut, cfg, breakpoints=brk))
    singular = g_z * (_log_interval(z, cut) - _log_interval(-z, cut))
    return (smooth + singular) / (2.0 * z)


def model_resolvent(f0: EvenPWFunction, f1: EvenPWFunction, z: complex,
                    cfg: QuadratureConfig = DEFAULT_CFG) -> complex:
    """``(1/8pi)[int (lam^2-z^2)^{-1} f0 lam tanh + int (lam^2-z^2)^{-1} f1 lam coth]`` for ``0 < Im z < 1``."""
    z = complex(z)
    _check_strip(z)
    total = _channel_direct(f0, SPHERICAL, z, cfg) + _channel_direct(f1, NON_SPHERICAL, z, cfg)
    return total / (8.0 * math.pi)


def model_resolvent_partial_fractions(f0: EvenPWFunction, f1: EvenPWFunction, z: complex,
                                      cfg: QuadratureConfig = DEFAULT_CFG) -> complex:
    """Same value through ``2 lam / (lam^2 - z^2) = 1/(lam - z) + 1/(lam + z)``.

    Each channel becomes ``(1/2) int f(lam) h(pi lam/2) [1/(lam-z) + 1/(lam+z)]``
    with ``h = tanh`` or ``coth``, integrated with plain adaptive quadrature
    and no singularity subtraction.  The origin is a breakpoint, so the
    removable ``coth`` singularity is never sampled.
    """
    z = complex(z)
    _check_strip(z)
    total = 0j
    for f, hyper in ((f0, np.tanh), (f1, lambda x: 1.0 / np.tanh(x))):
        if f.is_zero:
            continue
        cut = _real_cut(f, z)

        def integrand(lam, f=f, hyper=hyper):
            return 0.5 * f(lam) * hyper(0.5 * math.pi * lam) * (1.0 / (lam - z) + 1.0 / (lam + z))

        brk = sorted({0.0} | {c + m * z.imag for c in (z.real, -z.real)
                              for m in (-2.0, -0.5, 0.0, 0.5, 2.0)}
                     | set(np.linspace(-cut, cut, 41)[1:-1]))
        brk = [p for p in brk if -cut < p < cut]
        local = cfg.with_(abs_tol=min(cfg.abs_tol, 1e-14 * max(f.sup_bound, 1e-300)),
                          max_subdivisions=max(cfg.max_subdivisions, 80000))
        total += complex(integrate_1d(integrand, -cut, cut, local, breakpoints=brk))
    return total / (8.0 * math.pi)


# ---------------------------------------------------------------------------
# Continuation past the real axis
# ---------------------------------------------------------------------------

def _line_panels(cut: float, fine_half_width: float, fine_step: float = 0.05,
                 coarse_step: float = 2.0) -> np.ndarray:
    """Panel edges on ``[-cut, cut]``: uniform ``fine_step`` in the middle, ``coarse_step`` outside."""
    fine_half_width = min(fine_half_width, cut)
    fine = np.arange(-fine_half_width, fine_half_width + 0.5 * fine_step, fine_step)
    outer = np.arange(fine_half_width + coarse_step, cut + coarse_step, coarse_step)
    return np.concatenate([-outer[::-1], fine, outer])


@dataclass
class ShiftedLine:
    """Composite Gauss-Legendre samples of ``f(lam) h(pi lam/2)`` on ``R + i*height``.

    The fine middle section uses panels of width 0.05 and order 16, so the
    Cauchy kernel ``1/(lam -+ z)`` is integrated to rounding whenever ``z`` is at
    least ``LINE_TOLERANCE`` from the line and ``|Re z| <= fine_half_width - 1``.
    Away from the middle, panels of width 2 resolve the exponential-type
    oscillation of ``f``.
    """

    height: float
    nodes: np.ndarray
    weighted: np.ndarray
    fine_half_width: float

    @classmethod
    def build(cls, f: EvenPWFunction, hyper, height: float, fine_half_width: float = 8.0,
              order: int = 16) -> "ShiftedLine":
        cut = max(_pw_cutoff(f, height), fine_half_width + 2.0)
        if f.band_limit is not None:
            cut = min(cut, f.band_limit)
        x, w = gauss_legendre_panels(_line_panels(cut, fine_half_width), order)
        lam = x + 1j * height
        return cls(height, lam, w * f(lam) * hyper(0.5 * math.pi * lam), fine_half_width)

    def cauchy(self, z: np.ndarray, sign: int) -> np.ndarray:
        """``int_{R + i height} g(lam) / (lam - sign*z) dlam`` for every ``z``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(np.abs(z.real) > self.fine_half_width - 1.0):
            raise DomainError(f"|Re z| must stay below {self.fine_half_width - 1.0} for the cached line rule")
        out = np.empty(z.shape, dtype=complex)
        for start in range(0, z.size, 256):
            sl = slice(start, start + 256)
            out[sl] = (1.0 / (self.nodes[None, :] - sign * z[sl, None])) @ self.weighted
        return out


def _coth(x):
    return 1.0 / np.tanh(x)


class ContinuedModelResolvent:
    """Meromorphic continuation of :func:`model_resolvent` to ``-shift < Im z < 1``.

    Spherical channel: moving ``int_R f0 tanh/(lam + z)`` up to ``R + i*shift``
    crosses the ``tanh`` poles at odd multiples of ``i``, giving

        I0 = int_{R+iL} f0 tanh/(lam + z) + 4i sum_{odd m < L} f0(mi)/(mi + z).

    Non-spherical channel: the pole of ``1/(lam - z)`` is crossed first, then
    the ``coth`` poles at even multiples of ``i``:

        I1 = i pi f1(z) coth(pi z/2) + (1/2) int_{R+i} f1 coth/(lam - z)
             + (1/2) int_{R+iL} f1 coth/(lam + z) + 2i sum_{0 < 2k < L} f1(2ki)/(2ki + z).

    The resolvent is ``(I0 + I1)/8pi``.  Line samples are cached, so each
    evaluation costs one dense product per line.
    """

    def __init__(self, f0: EvenPWFunction, f1: EvenPWFunction, shift: float = 4.5,
                 fine_half_width: float = 8.0):
        if not shift > 0:
            raise DomainError("the shift height must be positive")
        if abs(shift - round(shift)) < 1e-9:
            raise DomainError(f"the shift height must be non-integer (got {shift}); "
                              "an integer line passes through a tanh or coth pole")
        if max(f0.type_bound, f1.type_bound) * shift > 40:
            log.warning("shift %.2f amplifies f by up to e^%.1f", shift,
                        max(f0.type_bound, f1.type_bound) * shift)
        self.f0, self.f1, self.shift = f0, f1, float(shift)
        self.odd_poles = [m for m in range(1, int(math.ceil(shift)) + 1, 2) if m < shift]
        self.even_poles = [m for m in range(2, int(math.ceil(shift)) + 1, 2) if m < shift]
        self._f0_top = None if f0.is_zero else ShiftedLine.build(f0, np.tanh, shift, fine_half_width)
        self._f1_top = None if f1.is_zero else ShiftedLine.build(f1, _coth, shift, fine_half_width)
        self._f1_unit = None if f1.is_zero else ShiftedLine.build(f1, _coth, 1.0, fine_half_width)
        self.f0_at_poles = {m: complex(f0(1j * m)) for m in self.odd_poles}
        self.f1_at_poles = {m: complex(f1(1j * m)) for m in [0] + self.even_poles}

    # -- validity ----------------------------------------------------------
    def check(self, z: np.ndarray, near_pole_ok: bool = False):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(z.imag >= 1.0) or np.any(z.imag <= -self.shift):
            raise DomainError(f"the continuation is valid for {-self.shift} < Im z < 1")
        for height in (1.0, -self.shift):
            if np.any(np.abs(z.imag - height) < LINE_TOLERANCE):
                raise ContourCollision(f"z is within {LINE_TOLERANCE} of the line Im = {height}")
        if not near_pole_ok:
            poles = -1j * np.arange(0, int(math.ceil(self.shift)))
            gap = np.min(np.abs(z[:, None] - poles[None, :]), axis=1)
            if np.any(gap < POLE_TOLERANCE):
                raise PoleProximity(f"z is within {POLE_TOLERANCE} of a resonance")
        return z

    # -- pieces ------------------------------------------------------------
    def _spherical(self, z):
        if self._f0_top is None:
            return np.zeros(z.shape, dtype=complex)
        out = self._f0_top.cauchy(z, -1)
        for m in self.odd_poles:
            out += 4j * self.f0_at_poles[m] / (1j * m + z)
        return out

    def holomorphic_part(self, z):
        """``F_L(z) = i pi f1(z) coth(pi z/2) - 2i sum_{0 <= 2k < L} f1(2ki)/(2ki + z)``.

        Each pole of ``coth`` below the origin down to ``-iL`` is cancelled by
        one term of the sum, so ``F_L`` is holomorphic on ``-L < Im z < 1``.
        """
        z = np.asarray(z, dtype=complex)
        out = 1j * math.pi * np.asarray(self.f1(z)) * _coth(0.5 * math.pi * z)
        for m, val in self.f1_at_poles.items():
            out -= 2j * val / (1j * m + z)
        return out

    def _non_spherical(self, z):
        if self._f1_top is None:
            return np.zeros(z.shape, dtype=complex)
        out = self.holomorphic_part(z)
        out += 2j * self.f1_at_poles[0] / z
        for m in self.even_poles:
            out += 4j * self.f1_at_poles[m] / (1j * m + z)
        out += 0.5 * self._f1_unit.cauchy(z, 1) + 0.5 * self._f1_top.cauchy(z, -1)
        return out

    def values(self, z, near_pole_ok: bool = False) -> np.ndarray:
        z = self.check(z, near_pole_ok)
        return (self._spherical(z) + self._non_spherical(z)) / (8.0 * math.pi)

    def __call__(self, z, near_pole_ok: bool = False):
        out = self.values(z, near_pole_ok)
        return complex(out[0]) if np.ndim(z) == 0 else out

    # -- poles -------------------------------------------------------------
    def predicted_residue(self, n: int) -> complex:
        """``(i/4pi) f1(0)`` at ``n = 0``, else ``(i/2pi) f_eps(in)`` with ``eps = 1 - n mod 2``."""
        if n == 0:
            return 1j * complex(self.f1(0.0)) / (4.0 * math.pi)
        f = self.f0 if n % 2 else self.f1
        return 1j * complex(f(1j * n)) / (2.0 * math.pi)

    def residue(self, n: int, radius: float = RESIDUE_RADIUS, cfg: QuadratureConfig = DEFAULT_CFG) -> complex:
        """Residue at ``z = -in`` from a circle of the given radius."""
        if not 0 <= n < self.shift - radius:
            raise DomainError(f"-{n}i is not inside the continuation strip")
        return complex(residue(lambda z: self.values(z, near_pole_ok=True), -1j * n, radius,
                               cfg.with_(rel_tol=min(cfg.rel_tol, 1e-12))))


def continued_model_resolvent(f0: EvenPWFunction, f1: EvenPWFunction, z: complex,
                              shift: float = 4.5) -> complex:
    """One-off evaluation of the continued resolvent; see :class:`ContinuedModelResolvent`."""
    return ContinuedModelResolvent(f0, f1, shift)(complex(z))


# ---------------------------------------------------------------------------
# Resonance scan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Resonance:
    location: complex
    residue: complex
    box: tuple


def _box_moments(fn, box, n_moments: int, order: int = 16, panels: int = 12):
    """``(1/2pi i) oint z^k R(z) dz`` over a rectangle for ``k < n_moments``, by composite Gauss-Legendre."""
    x0, x1, y0, y1 = box
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1), complex(x0, y0)]
    t, w = gauss_legendre_panels(np.linspace(0.0, 1.0, panels + 1), order)
    zs, ws = [], []
    for a, b in zip(corners[:-1], corners[1:]):
        zs.append(a + t * (b - a))
        ws.append(w * (b - a))
    z = np.concatenate(zs)
    dz = np.concatenate(ws)
    vals = fn(z) * dz
    centre = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    powers = (z - centre)[None, :] ** np.arange(n_moments)[:, None]
    return powers @ vals / (2j * math.pi), centre


def _poles_from_moments(moments: np.ndarray, scale: float, rel_tol: float):
    """Locations and residues of the simple poles encoded by the moments (Hankel pencil)."""
    k_max = (len(moments) - 1) // 2
    if abs(moments[0]) < rel_tol * scale and np.max(np.abs(moments)) < rel_tol * scale:
        return np.array([]), np.array([])
    count = 0
    for k in range(1, k_max + 1):
        hankel = np.array([[moments[i + j] for j in range(k)] for i in range(k)])
        sv = np.linalg.svd(hankel, compute_uv=False)
        if sv[-1] > rel_tol * scale:
            count = k
        else:
            break
    if count == 0:
        return np.array([]), np.array([])
    h0 = np.array([[moments[i + j] for j in range(count)] for i in range(count)])
    h1 = np.array([[moments[i + j + 1] for j in range(count)] for i in range(count)])
    nodes = np.linalg.eigvals(np.linalg.solve(h0, h1))
    vander = nodes[None, :] ** np.arange(count)[:, None]
    weights = np.linalg.solve(vander, moments[:count])
    return nodes, weights


def resonance_boxes(shift: float, half_width: float = 1.0):
    """Rectangles tiling ``-shift < Im z < 1`` with edges between consecutive ``-in``."""
    edges = [0.5] + [-(n + 0.45) for n in range(int(math.floor(shift - 0.25)))]
    edges = [e for e in edges if e > -shift + LINE_TOLERANCE + 0.2] if len(edges) > 1 else edges
    bottom = -shift + 0.25
    if edges[-1] - bottom > 0.2:
        edges.append(bottom)
    return [(-half_width, half_width, lo, hi) for hi, lo in zip(edges[:-1], edges[1:])]


def locate_resonances(f0: EvenPWFunction, f1: EvenPWFunction, shift: float = 4.5,
                      half_width: float = 1.0, rel_tol: float = 1e-8,
                      resolvent: ContinuedModelResolvent | None = None) -> list[Resonance]:
    """Poles of the continued resolvent in ``|Re z| < half_width``, ``-shift < Im z < 1/2``.

    Contour moments over rectangles whose edges avoid every ``-in`` give the
    pole locations through a Hankel pencil; each residue is then refined on a
    small circle around the located pole.
    """
    cont = resolvent or ContinuedModelResolvent(f0, f1, shift)
    fn = lambda z: cont.values(z, near_pole_ok=True)
    boxes = resonance_boxes(shift, half_width)
    probe = np.array([complex(x, y) for x in (-half_width, 0.0, half_width) for y in (0.5, -0.45)])
    scale = max(float(np.max(np.abs(fn(probe)))), 1e-300)
    found = []
    for box in boxes:
        moments, centre = _box_moments(fn, box, 7)
        nodes, weights = _poles_from_moments(moments, scale, rel_tol)
        for loc, w in zip(nodes + centre, weights):
            if abs(w) < rel_tol * scale:
                continue
            refined = complex(residue(fn, loc, min(RESIDUE_RADIUS, 0.5 * _distance_to_box_edge(loc, box)),
                                      DEFAULT_CFG.with_(rel_tol=1e-12)))
            found.append(Resonance(complex(loc), refined, box))
    return found


def _distance_to_box_edge(z: complex, box) -> float:
    x0, x1, y0, y1 = box
    return max(1e-3, min(z.real - x0, x1 - z.real, z.imag - y0, y1 - z.imag))
