"""Quadrature, special functions, contour integrals and test-function factories.

Everything else in the package is built on the handful of primitives here:

* :func:`integrate_1d` is a batched adaptive Gauss-Kronrod (7/15) integrator.
  Integrands are vectorised callables and may be vector valued, which lets
  callers integrate a whole family of kernels (one per evaluation point) in a
  single adaptive pass.
* :func:`tanh_sinh` handles endpoint singularities.
* :func:`contour_integrate` integrates over circles, horizontal lines and
  polylines.
* :func:`make_bump_radial` and :func:`make_even_pw` build the smooth, compactly
  supported inputs used throughout the tests.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import InvalidSupport, NonConvergence

log = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureConfig:
    """Accuracy budget for one integration.

    ``unbounded_cutoff`` is the radius at which integrals over unbounded
    intervals are truncated when the integrand has not yet decayed below
    ``abs_tol``.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 4000
    unbounded_cutoff: float = 1e3

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")
        if not self.unbounded_cutoff > 0:
            raise ValueError("unbounded_cutoff must be positive")

    def with_(self, **changes) -> "QuadratureConfig":
        values = dict(
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
            max_subdivisions=self.max_subdivisions,
            unbounded_cutoff=self.unbounded_cutoff,
        )
        values.update(changes)
        return QuadratureConfig(**values)


DEFAULT_CFG = QuadratureConfig()


# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15
# ---------------------------------------------------------------------------

_XK_POS = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK_POS = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_POS = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK_NODES = np.concatenate([-_XK_POS[:-1], _XK_POS[::-1]])
GK_WEIGHTS = np.concatenate([_WK_POS[:-1], _WK_POS[::-1]])
# Gauss nodes are every other Kronrod node, starting from index 1.
_GAUSS_IDX = np.arange(1, 15, 2)
GAUSS_WEIGHTS = np.concatenate([_WG_POS[:-1], _WG_POS[::-1]])


def _gk_batch(f: ArrayFn, a: np.ndarray, b: np.ndarray):
    """Apply the 15-point Kronrod rule (and embedded Gauss rule) to many intervals."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid[:, None] + half[:, None] * GK_NODES[None, :]
    y = np.asarray(f(x.ravel()))
    y = y.reshape(x.shape + y.shape[1:])
    extra = (None,) * (y.ndim - 2)
    hk = half[(slice(None),) + extra]
    kron = hk * np.tensordot(GK_WEIGHTS, y, axes=([0], [1]))
    gauss = hk * np.tensordot(GAUSS_WEIGHTS, y[:, _GAUSS_IDX], axes=([0], [1]))
    diff = np.abs(kron - gauss)
    if diff.ndim > 1:
        diff = diff.reshape(diff.shape[0], -1).max(axis=1)
    return kron, diff


def _adaptive_gk(f: ArrayFn, a: float, b: float, cfg: QuadratureConfig,
                 breakpoints: Sequence[float] = ()):
    """Globally adaptive Gauss-Kronrod on a finite interval.

    Every pass evaluates all still-active sub-intervals in one vectorised call.
    An interval is retired once its error estimate is below its length-weighted
    share of the global tolerance; the rest are bisected.
    """
    if a == b:
        probe = np.asarray(f(np.array([a])))
        return np.zeros(probe.shape[1:], dtype=complex), 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = np.unique(np.concatenate([[a, b], [p for p in breakpoints if a < p < b]]))
    lo, hi = edges[:-1].astype(float), edges[1:].astype(float)
    length = b - a
    done_val = None
    done_err = 0.0
    splits = 0
    while True:
        kron, err = _gk_batch(f, lo, hi)
        total = kron.sum(axis=0) if done_val is None else done_val + kron.sum(axis=0)
        total_err = done_err + err.sum()
        scale = float(np.max(np.abs(total))) if np.ndim(total) else abs(total)
        tol = max(cfg.abs_tol, cfg.rel_tol * scale)
        if total_err <= tol:
            return sign * total, total_err
        share = 0.5 * tol * (hi - lo) / length
        keep = err <= share
        if keep.any():
            part = kron[keep].sum(axis=0)
            done_val = part if done_val is None else done_val + part
            done_err += err[keep].sum()
        lo, hi = lo[~keep], hi[~keep]
        if lo.size == 0:
            return sign * total, total_err
        splits += lo.size
        if splits > cfg.max_subdivisions:
            raise NonConvergence(
                f"adaptive quadrature on [{a}, {b}] exhausted {cfg.max_subdivisions} "
                f"subdivisions (error estimate {total_err:.3e}, tolerance {tol:.3e})")
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])


def _semi_infinite(f: ArrayFn, a: float, cfg: QuadratureConfig):
    """Integrate over [a, a + cutoff] in panels of doubling width.

    Marching stops early once two consecutive panels contribute less than a
    quarter of ``abs_tol``; otherwise the integral is truncated at the cutoff.
    """
    total = None
    total_err = 0.0
    width = 1.0
    start = a
    quiet = 0
    end = a + cfg.unbounded_cutoff
    while start < end:
        stop = min(start + width, end)
        val, err = _adaptive_gk(f, start, stop, cfg)
        total = val if total is None else total + val
        total_err += err
        size = float(np.max(np.abs(val))) if np.ndim(val) else abs(val)
        quiet = quiet + 1 if size + err < 0.25 * cfg.abs_tol else 0
        if quiet >= 2:
            break
        start = stop
        width *= 2.0
    else:
        log.debug("semi-infinite integral truncated at %g", end)
    return total, total_err


def integrate_1d(f: ArrayFn, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CFG,
                 breakpoints: Sequence[float] = (), return_error: bool = False):
    """Integrate a vectorised ``f`` over ``[a, b]``; either end may be infinite.

    ``f`` receives a 1-d array of abscissae and returns values of shape
    ``(n,)`` or ``(n, ...)``; vector-valued integrands are integrated
    component-wise with a shared subdivision.
    """
    if a == b:
        val = np.zeros(np.asarray(f(np.array([float(a)]))).shape[1:], dtype=complex)
        return (val, 0.0) if return_error else val
    if math.isinf(a) or math.isinf(b):
        if a > b:
            val, err = integrate_1d(f, b, a, cfg, breakpoints, True)
            return (-val, err) if return_error else -val
        if math.isinf(a) and math.isinf(b):
            left, e1 = _semi_infinite(lambda x: f(-x), 0.0, cfg)
            right, e2 = _semi_infinite(f, 0.0, cfg)
            val, err = left + right, e1 + e2
        elif math.isinf(b):
            val, err = _semi_infinite(f, a, cfg)
        else:
            val, err = _semi_infinite(lambda x: f(-x), -b, cfg)
    else:
        val, err = _adaptive_gk(f, float(a), float(b), cfg, breakpoints)
    if np.ndim(val) == 0:
        val = complex(val)
    return (val, err) if return_error else val


def tanh_sinh(f: ArrayFn, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CFG,
              max_level: int = 12):
    """Double-exponential quadrature on a finite interval.

    Suited to integrands with integrable endpoint singularities; ``f`` is never
    evaluated at the endpoints themselves.
    """
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    t_max = 4.5
    prev = None
    h = 0.5
    for level in range(max_level):
        t = np.arange(-t_max, t_max + 0.5 * h, h)
        u = 0.5 * math.pi * np.sinh(t)
        x = np.tanh(u)
        w = 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
        # Distance to the nearer endpoint, computed without cancellation so that
        # nodes where tanh rounds to +-1 still land strictly inside the interval.
        gap = 1.0 / (np.exp(np.abs(u)) * np.cosh(u))
        pts = np.where(x < 0, a + half * gap, b - half * gap)
        pts = np.where(np.abs(x) < 0.5, mid + half * x, pts)
        pts = np.clip(pts, np.nextafter(a, b), np.nextafter(b, a))
        val = half * h * np.sum(w * np.asarray(f(pts)))
        if prev is not None:
            if abs(val - prev) <= max(cfg.abs_tol, cfg.rel_tol * abs(val)):
                return complex(val)
        prev = val
        h *= 0.5
    raise NonConvergence(f"tanh-sinh did not converge on [{a}, {b}] in {max_level} levels")


def gauss_legendre_panels(edges: np.ndarray, order: int = 20):
    """Composite Gauss-Legendre nodes and weights over consecutive panels."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


# ---------------------------------------------------------------------------
# Contours
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Contour:
    """A closed circle, a horizontal line ``R + i*offset``, or an open polyline."""

    kind: str
    center: complex = 0j
    radius: float = 0.0
    imag_offset: float = 0.0
    vertices: tuple = ()
    orientation: str = "positive"

    def __post_init__(self):
        if self.kind not in ("circle", "horizontal_line", "polyline"):
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if self.orientation not in ("positive", "negative"):
            raise ValueError("orientation must be 'positive' or 'negative'")
        if self.kind == "circle" and not self.radius > 0:
            raise ValueError("circle radius must be positive")
        if self.kind == "polyline" and len(self.vertices) < 2:
            raise ValueError("a polyline needs at least two vertices")

    @classmethod
    def circle(cls, center: complex, radius: float, orientation: str = "positive"):
        return cls("circle", center=complex(center), radius=float(radius), orientation=orientation)

    @classmethod
    def line(cls, imag_offset: float, orientation: str = "positive"):
        return cls("horizontal_line", imag_offset=float(imag_offset), orientation=orientation)

    @classmethod
    def polyline(cls, vertices: Sequence[complex], orientation: str = "positive"):
        return cls("polyline", vertices=tuple(complex(v) for v in vertices), orientation=orientation)

    @classmethod
    def rectangle(cls, x0: float, x1: float, y0: float, y1: float):
        """Counter-clockwise boundary of ``[x0, x1] x [y0, y1]``."""
        return cls.polyline([complex(x0, y0), complex(x1, y0), complex(x1, y1),
                             complex(x0, y1), complex(x0, y0)])


def _circle_integral(f, center, radius, cfg, n0=32, n_max=1 << 15):
    n = n0
    prev = None
    while n <= n_max:
        theta = 2.0 * math.pi * np.arange(n) / n
        e = np.exp(1j * theta)
        z = center + radius * e
        vals = np.asarray(f(z))
        extra = (None,) * (vals.ndim - 1)
        jac = (1j * radius * e)[(slice(None),) + extra]
        val = (2.0 * math.pi / n) * np.sum(vals * jac, axis=0)
        if prev is not None:
            diff = float(np.max(np.abs(val - prev)))
            scale = float(np.max(np.abs(val)))
            if diff <= max(cfg.abs_tol, cfg.rel_tol * scale):
                return val
        prev = val
        n *= 2
    raise NonConvergence(f"circle quadrature did not converge with {n_max} nodes")


def contour_integrate(f: Callable, c: Contour, cfg: QuadratureConfig = DEFAULT_CFG):
    """Return the contour integral of a vectorised holomorphic ``f`` along ``c``."""
    if c.kind == "circle":
        val = _circle_integral(f, c.center, c.radius, cfg)
    elif c.kind == "horizontal_line":
        shift = 1j * c.imag_offset
        val = integrate_1d(lambda x: f(x + shift), -math.inf, math.inf, cfg)
    else:
        val = 0j
        for z0, z1 in zip(c.vertices[:-1], c.vertices[1:]):
            dz = z1 - z0
            val = val + dz * integrate_1d(lambda t, z0=z0, dz=dz: f(z0 + t * dz), 0.0, 1.0, cfg)
    if c.orientation == "negative":
        val = -val
    return complex(val) if np.ndim(val) == 0 else val


def residue(f: Callable, z0: complex, radius: float, cfg: QuadratureConfig = DEFAULT_CFG):
    """Residue of ``f`` at ``z0`` from a positively oriented circle of the given radius."""
    return contour_integrate(f, Contour.circle(z0, radius), cfg) / (2j * math.pi)


# ---------------------------------------------------------------------------
# Special functions and circle Fourier analysis
# ---------------------------------------------------------------------------

def bessel_j(k: int, x):
    """Bessel function of the first kind of integer order ``k``.

    Backed by :func:`scipy.special.jv`; the reflection ``J_{-k} = (-1)^k J_k``
    is applied explicitly so it holds bit-for-bit.
    """
    k = int(k)
    x = np.asarray(x, dtype=float)
    if k < 0:
        out = (-1.0) ** k * special.jv(-k, x)
    else:
        out = special.jv(k, x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FourierCoefficients:
    """Circle Fourier coefficients ``c_k`` for ``-k_max <= k <= k_max``."""

    data: np.ndarray
    k_max: int

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.k_max:
            return 0j
        return complex(self.data[k + self.k_max])

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    def evaluate(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * np.multiply.outer(theta, self.modes)) @ self.data


def circle_fourier(f: Callable, k_max: int, n_samples: int | None = None) -> FourierCoefficients:
    """Coefficients ``(1/2pi) * int f(theta) e^{-ik theta} dtheta`` by the periodic trapezoid rule."""
    if n_samples is None:
        n_samples = max(8 * (k_max + 1), 128)
    theta = 2.0 * math.pi * np.arange(n_samples) / n_samples
    vals = np.asarray(f(theta), dtype=complex)
    spec = np.fft.fft(vals) / n_samples
    idx = np.arange(-k_max, k_max + 1) % n_samples
    return FourierCoefficients(spec[idx], k_max)


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------

def mollifier(u):
    """The classical bump ``exp(-1/(1-u^2))`` on ``|u| < 1``, zero elsewhere."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


@dataclass(frozen=True)
class TestFunction2D:
    """A smooth function on the plane supported in an annulus around the origin.

    ``value`` takes an array of points with trailing dimension 2 and returns an
    array of the leading shape.
    """

    __test__ = False  # not a pytest class

    value: Callable
    support_inner: float
    support_outer: float
    parity: str = "mixed"
    label: str = ""

    def __post_init__(self):
        if not 0 < self.support_inner < self.support_outer < math.inf:
            raise InvalidSupport("support must be an annulus 0 < inner < outer < inf")
        if self.parity not in ("even", "odd", "mixed"):
            raise ValueError("parity must be 'even', 'odd' or 'mixed'")

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        out = np.asarray(self.value(w))
        return out[()] if out.ndim == 0 else out

    def polar(self, r, theta):
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        pts = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
        return np.asarray(self.value(pts))

    def __add__(self, other: "TestFunction2D") -> "TestFunction2D":
        parity = self.parity if self.parity == other.parity else "mixed"
        return TestFunction2D(
            lambda w, f=self.value, g=other.value: np.asarray(f(w)) + np.asarray(g(w)),
            min(self.support_inner, other.support_inner),
            max(self.support_outer, other.support_outer),
            parity,
            f"({self.label}+{other.label})",
        )

    def scaled(self, c: complex) -> "TestFunction2D":
        return TestFunction2D(lambda w, f=self.value: c * np.asarray(f(w)), self.support_inner,
                              self.support_outer, self.parity, f"{c}*{self.label}")


def l2_inner_product(u: TestFunction2D, v: TestFunction2D, panels: int = 48, n_angle: int = 256) -> complex:
    """``int u conj(v) dw`` over the plane in polar coordinates.

    Composite Gauss-Legendre in the radius over the common support annulus and
    the trapezoid rule in the angle, which is exact for the low circle modes.
    """
    inner = max(u.support_inner, v.support_inner)
    outer = min(u.support_outer, v.support_outer)
    if inner >= outer:
        return 0j
    r, wr = gauss_legendre_panels(np.linspace(inner, outer, panels + 1), 20)
    theta = 2.0 * math.pi * np.arange(n_angle) / n_angle
    values_u = u.polar(r[:, None], theta[None, :])
    values_v = v.polar(r[:, None], theta[None, :])
    return complex(np.sum((wr * r)[:, None] * values_u * np.conj(values_v)) * 2.0 * math.pi / n_angle)


def _radius(w):
    w = np.asarray(w, dtype=float)
    return np.hypot(w[..., 0], w[..., 1])


def make_bump_radial(r0: float, width: float) -> TestFunction2D:
    """Radial mollifier centred on the circle of radius ``r0``."""
    if not (r0 > width > 0):
        raise InvalidSupport(f"need r0 > width > 0, got r0={r0}, width={width}")

    def value(w):
        return mollifier((_radius(w) - r0) / width)

    return TestFunction2D(value, r0 - width, r0 + width, "even", f"bump({r0},{width})")


def make_bump_mode(r0: float, width: float, k: int, kind: str = "cos") -> TestFunction2D:
    """Radial bump times ``cos(k theta)``, ``sin(k theta)`` or ``e^{ik theta}``."""
    base = make_bump_radial(r0, width)
    angular = {"cos": np.cos, "sin": np.sin,
               "exp": lambda x: np.exp(1j * x)}[kind]

    def value(w):
        w = np.asarray(w, dtype=float)
        theta = np.arctan2(w[..., 1], w[..., 0])
        return base.value(w) * angular(k * theta)

    parity = "even" if k % 2 == 0 else "odd"
    return TestFunction2D(value, base.support_inner, base.support_outer, parity,
                          f"bump({r0},{width})*{kind}({k}t)")


def make_bump_sector(r0: float, width: float, theta0: float, half_angle: float) -> TestFunction2D:
    """Radial bump times an angular bump centred on ``theta0``; no definite parity."""
    base = make_bump_radial(r0, width)

    def value(w):
        w = np.asarray(w, dtype=float)
        theta = np.arctan2(w[..., 1], w[..., 0])
        d = np.angle(np.exp(1j * (theta - theta0)))
        return base.value(w) * mollifier(d / half_angle)

    return TestFunction2D(value, base.support_inner, base.support_outer, "mixed",
                          f"sector({r0},{width},{theta0:.2f})")


# ---------------------------------------------------------------------------
# Even Paley-Wiener functions
# ---------------------------------------------------------------------------

def fourier_samples(t: np.ndarray, weighted: np.ndarray, lam, chunk: int = 2048):
    """Evaluate ``sum_j weighted_j * exp(i lam t_j)`` for an array of complex ``lam``."""
    lam = np.asarray(lam, dtype=complex)
    flat = lam.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, chunk):
        sl = slice(start, start + chunk)
        out[sl] = np.exp(1j * np.multiply.outer(flat[sl], t)) @ weighted
    return out.reshape(lam.shape)


@dataclass(frozen=True)
class EvenPWFunction:
    """An even entire function of exponential type, vectorised over complex arguments.

    ``band_limit``, when set, is the largest ``|Re lam|`` at which ``value`` is
    trusted (functions sampled from a discrete grid alias beyond it); integrals
    along horizontal lines are truncated there.
    """

    value: Callable
    type_bound: float
    sup_bound: float
    label: str = ""
    band_limit: float | None = None

    def __call__(self, lam):
        out = np.asarray(self.value(np.asarray(lam, dtype=complex)))
        return complex(out) if out.ndim == 0 else out

    @property
    def is_zero(self) -> bool:
        return self.sup_bound == 0.0

    @classmethod
    def zero(cls) -> "EvenPWFunction":
        return cls(lambda lam: np.zeros(np.shape(lam), dtype=complex), 0.0, 0.0, "0")

    def combine(self, other: "EvenPWFunction", a: complex = 1.0, b: complex = 1.0) -> "EvenPWFunction":
        """The linear combination ``a*self + b*other``."""
        return EvenPWFunction(
            lambda lam, f=self.value, g=other.value: a * np.asarray(f(lam)) + b * np.asarray(g(lam)),
            max(self.type_bound, other.type_bound),
            abs(a) * self.sup_bound + abs(b) * other.sup_bound,
            f"{a}*{self.label}+{b}*{other.label}",
            min((x for x in (self.band_limit, other.band_limit) if x is not None), default=None),
        )


def make_even_pw(bump_halfwidth: float, max_real: float | None = None,
                 max_imag: float | None = None) -> EvenPWFunction:
    """Cosine transform of the mollifier supported on ``[-b, b]``.

    The transform is evaluated by the trapezoid rule on a uniform grid; since
    every derivative of the mollifier vanishes at the ends the rule is
    accurate to rounding for ``|Re lam| <= max_real`` and ``|Im lam| <= max_imag``
    (defaults ``5000/b`` and ``10/b``).
    """
    b = float(bump_halfwidth)
    if not b > 0:
        raise InvalidSupport("bump_halfwidth must be positive")
    max_real = 5000.0 / b if max_real is None else max_real
    max_imag = 10.0 / b if max_imag is None else max_imag
    # Aliasing error ~ |phi_hat(2 pi/h - max_real)| e^{b max_imag}; the mollifier's
    # transform decays like exp(-sqrt(b xi)).
    margin = (40.0 + b * max_imag) ** 2 / b
    h = 2.0 * math.pi / (max_real + margin)
    n = int(math.ceil(2.0 * b / h)) | 1
    t = np.linspace(-b, b, n)
    step = t[1] - t[0]
    weighted = step * mollifier(t / b)

    def value(lam):
        return fourier_samples(t, weighted.astype(complex), lam)

    # |lam|^3 |f(lam)| <= e^{b|Im lam|} * int |phi'''|, hence the (1+|Re lam|)^-3 envelope.
    fine = np.linspace(-b, b, 20001)
    phi = mollifier(fine / b)
    d3 = np.gradient(np.gradient(np.gradient(phi, fine), fine), fine)
    integral = float(np.sum(phi) * (fine[1] - fine[0]))
    third = float(np.sum(np.abs(d3)) * (fine[1] - fine[0]))
    sup = 8.0 * max(integral, third)
    return EvenPWFunction(value, b, sup, f"pw({b})")
