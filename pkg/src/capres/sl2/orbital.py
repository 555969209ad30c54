"""Matrix coefficients, orbital integrals and the channel functions ``f_eps``.

For test functions ``u, v`` on ``X = M_{2,p}`` the matrix coefficient

    psi(g) = int_X u(g x) v(x) dx        (or with conj(v) for the hermitian forms)

is compactly supported on SL2(R): ``g = (g x) x^{-1}`` gives
``||g|| <= |g x| / sigma_min(x) <= support_radius(u) / sigma_min_floor(v)``.
Its orbital integral over the split torus is parametrised through
``G/A = K x N``,

    F(t) = |D(h_a)| int_K int_N psi(k n h_a n^{-1} k^{-1}) dn dk,   a = e^t,

with ``dk = dtheta/2pi`` and ``dn = dr``.  Since
``n_r h_a n_r^{-1} = [[a, r(1/a - a)], [0, 1/a]]``, substituting
``s = r (1/a - a)`` cancels ``|D(h_a)| = |a - 1/a|`` and leaves
``F(t) = int_K int_R psi(k [[a, s], [0, 1/a]] k^{-1}) ds dk``.

The channel functions are ``f_eps(lam) = (-1)^eps int e^{i lam t} F(t) dt``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import DomainError, NonConvergence, SingularElement
from ..numerics import DEFAULT_CFG, EvenPWFunction, QuadratureConfig
from .group import SL2Element, rotation
from .m2p import GramQuadrature, KFilter, TestFunctionM2p, congruence

log = logging.getLogger(__name__)

BLOCKS = ("lower", "finite", "upper", "full")


# ---------------------------------------------------------------------------
# Matrix coefficients
# ---------------------------------------------------------------------------

def norm_bound(u: TestFunctionM2p, v: TestFunctionM2p) -> float:
    """Operator-norm bound on the support of ``g -> int u(gx) v(x) dx``."""
    return u.support_radius / v.sigma_min_floor


def _as_matrix(g) -> np.ndarray:
    return g.entries if isinstance(g, SL2Element) else np.asarray(g, dtype=float)


def psi_direct(u: TestFunctionM2p, v: TestFunctionM2p, g, conjugate: bool = False,
               n_radial: int = 40, n_angle: int = 40) -> complex:
    """``int u(g x) v(x) dx`` over ``M_{2,2}`` as a four-dimensional product rule.

    Each row of ``x`` is written in polar coordinates; the radii run over
    ``[sigma_min_floor, support_radius]`` of ``v`` (outside it ``v`` vanishes)
    with Gauss-Legendre nodes and the angles use the trapezoid rule.
    """
    if u.p != 2 or v.p != 2:
        raise DomainError("the direct four-dimensional rule is implemented for p = 2")
    g = _as_matrix(g)
    if np.linalg.norm(g, 2) > norm_bound(u, v) * (1 + 1e-12):
        return 0j
    lo, hi = v.sigma_min_floor, v.support_radius
    xr, wr = np.polynomial.legendre.leggauss(n_radial)
    rho = 0.5 * (hi + lo) + 0.5 * (hi - lo) * xr
    wr = 0.5 * (hi - lo) * wr * rho
    phi = 2.0 * math.pi * np.arange(n_angle) / n_angle
    wphi = 2.0 * math.pi / n_angle
    row = np.stack([np.outer(rho, np.cos(phi)), np.outer(rho, np.sin(phi))], -1).reshape(-1, 2)
    wrow = np.repeat(wr, n_angle) * wphi
    total = 0j
    for i in range(row.shape[0]):
        x = np.empty((row.shape[0], 2, 2))
        x[:, 0, :] = row[i]
        x[:, 1, :] = row
        vx = v(x)
        live = np.abs(vx) > 0
        if not np.any(live):
            continue
        vx = np.conj(vx[live]) if conjugate else vx[live]
        ux = u(np.einsum("ij,njk->nik", g, x[live]))
        total += wrow[i] * np.sum(wrow[live] * ux * vx)
    return complex(total)


@dataclass
class GramPairing:
    """``psi(g) = int U(g S g^T) V(S) dmu(S)`` for Gram-type test functions (any ``p``).

    The nodes discretise the pushforward measure over the support of ``v``.
    """

    u: TestFunctionM2p
    v: TestFunctionM2p
    conjugate: bool = False
    n_c: int = 24
    n_d: int = 24
    n_alpha: int = 32

    def __post_init__(self):
        if self.u.gram is None or self.v.gram is None:
            raise DomainError("the Gram-space rule needs functions of the Gram matrix")
        if self.u.p != self.v.p:
            raise DomainError("u and v must live on the same space")
        self.quad = GramQuadrature.for_profile(self.v.gram, self.v.p, self.n_c, self.n_d, self.n_alpha)
        vals = self.v.gram_orbit(self.quad.c, self.quad.e, 1)[:, 0]
        self.v_weighted = self.quad.weights * (np.conj(vals) if self.conjugate else vals)
        self.bound = norm_bound(self.u, self.v)

    def __call__(self, g) -> complex:
        g = _as_matrix(g)
        if np.linalg.norm(g, 2) > self.bound * (1 + 1e-12):
            return 0j
        c, e = congruence(g, self.quad.c, self.quad.e)
        uvals = self.u.gram_orbit(c, e, 1)[:, 0]
        return complex(np.sum(uvals * self.v_weighted))


def psi_from_pair(u: TestFunctionM2p, v: TestFunctionM2p, g, cfg: QuadratureConfig = DEFAULT_CFG,
                  conjugate: bool = False) -> complex:
    """``psi(g) = int u(g x) v(x) dx``; Gram-space rule when available, else the direct 4-d rule."""
    if u.gram is not None and v.gram is not None:
        return GramPairing(u, v, conjugate)(g)
    return psi_direct(u, v, g, conjugate)


# ---------------------------------------------------------------------------
# Orbital integrals
# ---------------------------------------------------------------------------

def _midpoints(half_width: float, n: int) -> tuple[np.ndarray, float]:
    h = 2.0 * half_width / n
    return -half_width + h * (np.arange(n) + 0.5), h


def orbital_integral(psi: Callable, t: float, bound: float, cfg: QuadratureConfig = DEFAULT_CFG,
                     n_theta: int = 8, n_r: int = 32, tol: float = 0.05) -> complex:
    """``|D(h_a)| int_K int_N psi(k n h_a n^{-1} k^{-1})`` with ``dk = dtheta/2pi``, ``dn = dr``.

    ``psi`` takes one 2x2 matrix and vanishes when its operator norm exceeds
    ``bound``, so ``|r| <= bound / |1/a - a|``.  The trapezoid rule is applied
    with ``2 n_theta`` angles and ``2 n_r`` steps in ``r``; the same sum over
    every other node (the half-resolution rule) must agree to ``tol``
    relative, otherwise ``NonConvergence`` is raised.
    """
    if abs(t) < 1e-8:
        raise SingularElement("h_a is singular at t = 0")
    a = math.exp(t)
    r_max = bound / abs(1.0 / a - a)
    h_a = np.diag([a, 1.0 / a])
    thetas = 2.0 * math.pi * np.arange(2 * n_theta) / (2 * n_theta)
    rs = np.linspace(-r_max, r_max, 2 * n_r + 1)
    hr = rs[1] - rs[0]
    vals = np.zeros((2 * n_theta, 2 * n_r + 1), dtype=complex)
    for i, theta in enumerate(thetas):
        k = rotation(theta)
        for j, r in enumerate(rs):
            n = np.array([[1.0, r], [0.0, 1.0]])
            ninv = np.array([[1.0, -r], [0.0, 1.0]])
            vals[i, j] = psi(k @ n @ h_a @ ninv @ k.T)
    jac = abs(a - 1.0 / a)
    # psi vanishes at r = +-r_max, so the trapezoid end corrections are zero.
    fine = jac * hr * np.sum(vals) / (2 * n_theta)
    coarse = jac * (2 * hr) * np.sum(vals[0::2, 0::2]) / n_theta
    if abs(fine - coarse) > max(10 * cfg.abs_tol, tol * abs(fine)):
        raise NonConvergence(f"orbital integral at t={t}: {fine} vs half grid {coarse}")
    return complex(fine)


@dataclass(frozen=True)
class OrbitalGrid:
    """Node counts for :class:`OrbitalProfile` (t and s midpoints, K rotations, Gram-space rule)."""

    n_t: int = 40
    n_s: int = 48
    n_k: int = 8
    n_c: int = 24
    n_d: int = 24
    n_alpha: int = 32

    @classmethod
    def fine(cls) -> "OrbitalGrid":
        """Node counts at which swapping ``u`` and ``v`` changes the residue form by about 1e-8."""
        return cls(n_t=40, n_s=72, n_k=8, n_c=40, n_d=40, n_alpha=48)

    def refined(self, factor: float = 1.5) -> "OrbitalGrid":
        up = lambda n: int(math.ceil(n * factor))
        return OrbitalGrid(up(self.n_t), up(self.n_s), self.n_k, up(self.n_c), up(self.n_d), up(self.n_alpha))


def _unipotent_range(bound: float, a: float) -> float:
    """Largest ``|s|`` with ``||[[a, s], [0, 1/a]]|| <= bound``.

    The singular values satisfy ``sigma^2 + sigma^{-2} = a^2 + s^2 + a^{-2}``
    and ``x -> x + 1/x`` increases for ``x >= 1``.
    """
    return math.sqrt(max(bound ** 2 + bound ** -2 - a * a - 1.0 / (a * a), 0.0))


class OrbitalProfile:
    """Samples of the orbital integral ``F(t)`` of a Gram-type matrix coefficient.

    The K-average ``(1/n_k) sum_l psi(k_l g k_l^{-1})`` over ``theta_l = pi l/n_k`` is
    computed through orbit samples: ``psi(k g k^{-1}) = int u(k g y) v(k y) dy``,
    and ``u(k .)``, ``v(k .)`` on the Gram nodes are the rotated evaluations of
    the profiles.  The t- and s-integrals use midpoint rules, which are
    spectrally accurate because ``F`` and the s-integrand vanish smoothly at
    the ends of their supports; for each ``t`` the s-range is cut to the
    norm ball that contains the support.
    """

    def __init__(self, u: TestFunctionM2p, v: TestFunctionM2p, conjugate: bool = False,
                 grid: OrbitalGrid = OrbitalGrid(), s_chunk: int = 8):
        if u.gram is None or v.gram is None:
            raise DomainError("fast orbital profiles need functions of the Gram matrix")
        self.u, self.v, self.conjugate, self.grid = u, v, conjugate, grid
        bound = norm_bound(u, v)
        self.t_max = math.log(bound)
        self.t, self.h_t = _midpoints(self.t_max, grid.n_t)
        quad = GramQuadrature.for_profile(v.gram, v.p, grid.n_c, grid.n_d, grid.n_alpha)
        n_k = grid.n_k
        v_orbit = v.gram_orbit(quad.c, quad.e, n_k)
        if conjugate:
            v_orbit = np.conj(v_orbit)
        live = np.any(np.abs(v_orbit) > 0, axis=1)
        c_nodes, e_nodes = quad.c[live], quad.e[live]
        v_weighted = quad.weights[live, None] * v_orbit[live] / n_k
        samples = np.zeros(grid.n_t, dtype=complex)
        for i, t in enumerate(self.t):
            a = math.exp(t)
            s, h_s = _midpoints(_unipotent_range(bound, a), grid.n_s)
            acc = 0j
            for start in range(0, grid.n_s, s_chunk):
                sv = s[start:start + s_chunk]
                b = np.zeros((sv.size, 2, 2))
                b[:, 0, 0], b[:, 0, 1], b[:, 1, 1] = a, sv, 1.0 / a
                c, e = congruence(b[:, None], c_nodes[None, :], e_nodes[None, :])
                acc += np.sum(u.gram_orbit(c, e, n_k) * v_weighted[None])
            samples[i] = h_s * acc
        self.samples = samples

    # -- derived quantities -------------------------------------------------
    def symmetry_defect(self) -> float:
        """``max |F(t) - F(-t)| / max |F|`` (orbital integrals are even in ``t``)."""
        scale = max(float(np.max(np.abs(self.samples))), 1e-300)
        return float(np.max(np.abs(self.samples - self.samples[::-1]))) / scale

    def transform(self, lam) -> np.ndarray:
        """``int e^{i lam t} F(t) dt`` for an array of ``lam``."""
        lam = np.asarray(lam, dtype=complex)
        out = np.exp(1j * np.multiply.outer(lam, self.t)) @ self.samples * self.h_t
        return out[()] if out.ndim == 0 else out

    def cosh_moment(self, n: float) -> complex:
        """``int cosh(n t) F(t) dt``: the transform at ``lam = i n`` with the symmetric character."""
        return complex(np.sum(np.cosh(n * self.t) * self.samples) * self.h_t)

    @property
    def band_limit(self) -> float:
        """Half of the aliasing period ``2 pi / h_t`` of the discrete transform."""
        return math.pi / self.h_t

    def channel_function(self, epsilon: int) -> EvenPWFunction:
        """``f_eps`` as an :class:`EvenPWFunction` of type ``t_max``, trusted up to ``band_limit``."""
        sign = -1.0 if epsilon else 1.0
        t, w = self.t, self.samples * self.h_t * sign

        def value(lam, t=t, w=w):
            lam = np.asarray(lam, dtype=complex)
            out = np.empty(lam.shape, dtype=complex)
            flat = lam.ravel()
            res = out.reshape(-1)
            for start in range(0, flat.size, 4096):
                sl = slice(start, start + 4096)
                res[sl] = np.cos(np.multiply.outer(flat[sl], t)) @ w
            return out

        sup = float(np.sum(np.abs(w)))
        return EvenPWFunction(value, self.t_max, sup, f"f{epsilon}[{self.u.label},{self.v.label}]",
                              band_limit=0.8 * self.band_limit)


_PROFILE_CACHE: dict = {}


def orbital_profile(u: TestFunctionM2p, v: TestFunctionM2p, conjugate: bool = False,
                    grid: OrbitalGrid = OrbitalGrid()) -> OrbitalProfile:
    """Cached :class:`OrbitalProfile` (profiles are immutable once built)."""
    key = (id(u), id(v), conjugate, grid)
    hit = _PROFILE_CACHE.get(key)
    if hit is None or hit[0] is not u or hit[1] is not v:
        hit = (u, v, OrbitalProfile(u, v, conjugate, grid))
        _PROFILE_CACHE[key] = hit
    return hit[2]


def f_epsilon(u: TestFunctionM2p, v: TestFunctionM2p, epsilon: int, lam,
              cfg: QuadratureConfig = DEFAULT_CFG, grid: OrbitalGrid = OrbitalGrid()):
    """``(-1)^eps int e^{i lam t} F(t) dt`` for the bilinear coefficient ``int u(gx) v(x) dx``.

    The integral runs over the identity component ``a = e^t > 0`` of the split
    torus only, so ``f_1 = -f_0`` here.  Including ``-h_a`` as well would make
    ``f_1`` vanish for functions invariant under ``x -> -x``, such as the Gram
    profiles.
    """
    if epsilon not in (0, 1):
        raise DomainError("epsilon is 0 or 1")
    profile = orbital_profile(u, v, False, grid)
    sign = -1.0 if epsilon else 1.0
    return sign * profile.transform(lam)


# ---------------------------------------------------------------------------
# K-types
# ---------------------------------------------------------------------------

def _filter_product(first: KFilter | None, weights: dict, n_points: int) -> KFilter:
    if first is None:
        return KFilter(tuple(sorted(weights.items())), n_points)
    merged = {m: w * first.weight(m) for m, w in weights.items()}
    return KFilter(tuple(sorted(merged.items())), max(n_points, first.n_points))


def project_ktypes(u: TestFunctionM2p, weights: dict, n_points: int = 32, label: str = "") -> TestFunctionM2p:
    """``sum_m weights[m] P_m u`` with ``P_m u(x) = int_K chi_m(k) u(k^{-1} x) dk`` by circle quadrature.

    ``chi_m(k_theta) = e^{i m theta}``; ``n_points`` equispaced rotations resolve
    K-types with ``|m| < n_points / 2`` exactly.
    """
    thetas = 2.0 * math.pi * np.arange(n_points) / n_points
    kernel = np.array([sum(w * np.exp(1j * m * th) for m, w in weights.items()) for th in thetas]) / n_points
    rot_inv = rotation(-thetas)          # k_theta^{-1}

    def value(x, f=u.value, kernel=kernel, rot_inv=rot_inv):
        x = np.asarray(x, dtype=float)
        out = 0j
        for kern, kinv in zip(kernel, rot_inv):
            if kern != 0:
                out = out + kern * np.asarray(f(np.einsum("ij,...jk->...ik", kinv, x)))
        return out

    kfilter = _filter_product(u.kfilter, weights, n_points) if u.gram is not None else None
    return TestFunctionM2p(u.p, value, u.sigma_min_floor, u.support_radius, u.gram, kfilter,
                           label or f"P{sorted(weights)}({u.label})")


def ktype_project(u: TestFunctionM2p, m: int, cfg: QuadratureConfig = DEFAULT_CFG,
                  n_points: int = 32) -> TestFunctionM2p:
    """The isotypic component of K-type ``m``."""
    return project_ktypes(u, {int(m): 1.0}, n_points, f"P{m}({u.label})")


def block_ktypes(block: str, epsilon: int, n: int, m_max: int) -> list[int]:
    """K-types ``m = eps (mod 2)``, ``|m| <= m_max``, below ``-n``, within ``[-n, n]`` or above ``n``."""
    ms = [m for m in range(-m_max, m_max + 1) if (m - epsilon) % 2 == 0]
    if block == "lower":
        return [m for m in ms if m < -n]
    if block == "finite":
        return [m for m in ms if -n <= m <= n]
    if block == "upper":
        return [m for m in ms if m > n]
    raise DomainError(f"unknown block {block!r}")


def block_project(u: TestFunctionM2p, block: str, epsilon: int, n: int, n_points: int = 32) -> TestFunctionM2p:
    ms = block_ktypes(block, epsilon, n, n_points // 2 - 1)
    return project_ktypes(u, {m: 1.0 for m in ms}, n_points, f"P{block}[{epsilon},{n}]({u.label})")


def projection_compatibility(u: TestFunctionM2p, m: int, g, x, n_points: int = 32) -> tuple[complex, complex]:
    """Both sides of ``P_m^G(u_x^vee)(g) = (P_m u)(g x)``, where ``u_x^vee(g) = u(g x)``.

    The left side averages ``chi_m(k) u(k^{-1} g x)`` over K acting on the group
    variable; the right side projects ``u`` first and evaluates at ``g x``.
    """
    g = _as_matrix(g)
    x = np.asarray(x, dtype=float)
    thetas = 2.0 * math.pi * np.arange(n_points) / n_points
    lhs = sum(np.exp(1j * m * th) * complex(u(rotation(-th) @ g @ x)) for th in thetas) / n_points
    rhs = complex(ktype_project(u, m, n_points=n_points)(g @ x))
    return complex(lhs), rhs


# ---------------------------------------------------------------------------
# Residue forms
# ---------------------------------------------------------------------------

def residue_form(u: TestFunctionM2p, v: TestFunctionM2p, epsilon: int, n: int, block: str = "full",
                 cfg: QuadratureConfig = DEFAULT_CFG, grid: OrbitalGrid = OrbitalGrid(),
                 n_points: int = 32) -> complex:
    """The hermitian form ``(u, v)_{eps, n}`` or one of its K-type blocks.

    ``full`` is ``(-1)^eps int cosh(n t) F(t) dt`` with ``F`` the orbital
    integral of ``int u(gx) conj(v(x)) dx``; the character of ``pi_{eps, n}`` on
    the split torus is symmetric in ``t``, hence ``cosh``.  The blocks apply
    ``P_{n,<}``, ``P_{n,fin}`` or ``P_{n,>}`` to both arguments and re-evaluate.
    """
    if epsilon not in (0, 1) or n < 0:
        raise DomainError("need epsilon in {0, 1} and n >= 0")
    if (n - epsilon) % 2 == 0:
        raise DomainError("the residue forms need n and epsilon of opposite parity")
    if block not in BLOCKS:
        raise DomainError(f"block must be one of {BLOCKS}")
    if block != "full":
        u = _cached_block(u, block, epsilon, n, n_points)
        v = _cached_block(v, block, epsilon, n, n_points)
    profile = orbital_profile(u, v, True, grid)
    sign = -1.0 if epsilon else 1.0
    return sign * profile.cosh_moment(n)


_BLOCK_CACHE: dict = {}


def _cached_block(u, block, epsilon, n, n_points):
    key = (id(u), block, epsilon, n, n_points)
    hit = _BLOCK_CACHE.get(key)
    if hit is None or hit[0] is not u:
        hit = (u, block_project(u, block, epsilon, n, n_points))
        _BLOCK_CACHE[key] = hit
    return hit[1]
