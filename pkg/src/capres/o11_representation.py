"""The oscillator action of O(1,1) x Sp2(R) on functions of one row vector ``x = (x1, x2)``.

Dilations ``h_a`` act by ``|a|^{-1} v(x/a)``, the flip ``s`` by the symplectic
Fourier transform ``v -> int exp(-2 pi i x' j x^T) v(x) dx``, and Sp2(R) by right
translation.  The module also carries the metaplectic normalisation data on
``W = M_{2,2}(R)`` (the square of the Theta factor and the Weyl transform of a
function on ``W``) and the mode-by-mode description of the flip on
``r^{-1} e^{ik theta}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, GridTooCoarse
from .mellin import HomogeneousComponent
from .numerics import DEFAULT_CFG, QuadratureConfig, TestFunction2D, bessel_j, integrate_1d

ROTATION_J = np.array([[0.0, 1.0], [-1.0, 0.0]])
FLIP_S = np.array([[0.0, 1.0], [1.0, 0.0]])
GAMMA_ONE = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))

#: The density of the measure on the image of ``s - 1`` against Lebesgue measure on Y.
IMAGE_MEASURE_CONSTANT = 2.0
#: The metaplectic lift of ``s`` is fixed to the ``+`` preimage.
THETA_OF_FLIP = 0.5


def chi(r):
    """The unitary character ``r -> exp(2 pi i r)``."""
    return np.exp(2j * math.pi * np.asarray(r))


# ---------------------------------------------------------------------------
# Group elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class O11Element:
    """``s^with_s * h_a`` with ``h_a = diag(a, 1/a)``."""

    a: float
    with_s: bool = False

    def __post_init__(self):
        if self.a == 0:
            raise DomainError("h_a needs a nonzero a")

    def matrix(self) -> np.ndarray:
        h = np.diag([self.a, 1.0 / self.a])
        return FLIP_S @ h if self.with_s else h

    def __mul__(self, other: "O11Element") -> "O11Element":
        # s h_a s^{-1} = h_{1/a} lets every product be brought to normal form.
        a = self.a if not other.with_s else 1.0 / self.a
        return O11Element(a * other.a, self.with_s != other.with_s)

    def inverse(self) -> "O11Element":
        if self.with_s:
            # (s h_a)^{-1} = h_{1/a} s = s h_a
            return O11Element(self.a, True)
        return O11Element(1.0 / self.a, False)


def _vec_operator(fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """4x4 matrix of a linear map on 2x2 matrices in row-major coordinates."""
    cols = []
    for idx in range(4):
        e = np.zeros(4)
        e[idx] = 1.0
        cols.append(np.asarray(fn(e.reshape(2, 2)), dtype=float).ravel())
    return np.stack(cols, axis=1)


def symplectic_form(w1, w2):
    """``<w1, w2> = tr(w1 j w2^T s)`` on ``W = M_{2,2}(R)``; broadcasts over leading axes."""
    w1 = np.asarray(w1)
    w2 = np.asarray(w2)
    prod = w1 @ ROTATION_J @ np.swapaxes(w2, -1, -2) @ FLIP_S
    return np.trace(prod, axis1=-2, axis2=-1)


def form_gram() -> np.ndarray:
    basis = np.eye(4).reshape(4, 2, 2)
    return np.array([[symplectic_form(p, q) for q in basis] for p in basis])


def complex_structure() -> np.ndarray:
    """``J(w) = -s w j``; ``<Jw, w'> = tr(w w'^T)`` is the Euclidean form."""
    return _vec_operator(lambda w: -FLIP_S @ w @ ROTATION_J)


@dataclass(frozen=True)
class SymplecticMatrix4:
    """A linear map of ``W`` (row-major coordinates) preserving the symplectic form."""

    entries: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.entries, dtype=float)
        if g.shape != (4, 4):
            raise DomainError("a symplectic matrix on W is 4x4")
        omega = form_gram()
        defect = float(np.max(np.abs(g.T @ omega @ g - omega)))
        if defect > 1e-12 * max(1.0, float(np.max(np.abs(g))) ** 2):
            raise DomainError(f"matrix does not preserve the symplectic form (defect {defect:.2e})")
        object.__setattr__(self, "entries", g)

    @classmethod
    def identity(cls) -> "SymplecticMatrix4":
        return cls(np.eye(4))

    @classmethod
    def minus_identity(cls) -> "SymplecticMatrix4":
        return cls(-np.eye(4))

    @classmethod
    def from_o11(cls, h) -> "SymplecticMatrix4":
        """``w -> h w`` for ``h`` in O(1,1) (an :class:`O11Element` or a 2x2 matrix)."""
        m = h.matrix() if isinstance(h, O11Element) else np.asarray(h, dtype=float)
        return cls(_vec_operator(lambda w: m @ w))

    @classmethod
    def from_sp2(cls, g) -> "SymplecticMatrix4":
        """``w -> w g^{-1}`` for ``g`` in SL2(R)."""
        ginv = np.linalg.inv(np.asarray(g, dtype=float))
        return cls(_vec_operator(lambda w: w @ ginv))

    def __matmul__(self, other: "SymplecticMatrix4") -> "SymplecticMatrix4":
        return SymplecticMatrix4(self.entries @ other.entries)

    def apply(self, w) -> np.ndarray:
        return (self.entries @ np.asarray(w, dtype=float).ravel()).reshape(2, 2)


@dataclass(frozen=True)
class MetaplecticSquare:
    theta_squared: complex
    image_dim: int
    determinant: float


def theta_squared(g: SymplecticMatrix4, rank_tol: float = 1e-10) -> MetaplecticSquare:
    """``gamma(1)^{2 dim (g-1)W - 2} / det(g - 1 : W/Ker(g-1) -> (g-1)W)``.

    The determinant between the quotient and the image is taken through the
    complex structure: ``L = J^{-1}(g - 1)`` maps ``W`` onto ``LW = J^{-1}(g-1)W``,
    and ``det(L|_{LW})`` is computed in an orthonormal basis of ``LW`` for the
    Euclidean form ``B``.  An empty image gives determinant 1.
    """
    minus_one = g.entries - np.eye(4)
    lmap = np.linalg.solve(complex_structure(), minus_one)
    u, sing, _ = np.linalg.svd(lmap)
    rank = int(np.sum(sing > rank_tol * max(1.0, float(sing[0]) if sing.size else 1.0)))
    if rank == 0:
        det = 1.0
    else:
        basis = u[:, :rank]
        det = float(np.linalg.det(basis.T @ lmap @ basis))
    value = GAMMA_ONE ** (2 * rank - 2) / det
    return MetaplecticSquare(complex(value), rank, det)


# ---------------------------------------------------------------------------
# Pointwise actions and circle modes
# ---------------------------------------------------------------------------

def apply_dilation(a: float, v: TestFunction2D) -> TestFunction2D:
    """``|a|^{-1} v(x/a)``; the support annulus scales by ``|a|``."""
    if a == 0:
        raise DomainError("h_a needs a nonzero a")
    scale = abs(a)
    value = lambda w, f=v.value: np.asarray(f(np.asarray(w, dtype=float) / a)) / scale
    return TestFunction2D(value, v.support_inner * scale, v.support_outer * scale, v.parity,
                          f"h_{a:g}({v.label})")


def apply_sp2(g, v: TestFunction2D) -> TestFunction2D:
    """Right translation ``v(x g)``; only rotations keep the support annulus."""
    g = np.asarray(g, dtype=float)
    sv = np.linalg.svd(g, compute_uv=False)
    value = lambda w, f=v.value: f(np.asarray(w, dtype=float) @ g)
    return TestFunction2D(value, v.support_inner / sv[0], v.support_outer / sv[-1], v.parity,
                          f"R({v.label})")


@dataclass(frozen=True)
class CircleMode:
    """``g_k(r e^{i theta}) = r^{-1} e^{ik theta}``."""

    k: int

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        r = np.hypot(w[..., 0], w[..., 1])
        return np.exp(1j * self.k * np.arctan2(w[..., 1], w[..., 0])) / r


def dilation_mode_factor(a: float, k: int) -> int:
    """``h_a g_k = sign(a)^k g_k``."""
    return 1 if (a > 0 or k % 2 == 0) else -1


def apply_s_mode(k: int) -> int:
    """Eigenvalue of the flip on ``g_k``: ``1`` for ``k >= 0`` and ``(-1)^k`` for ``k < 0``."""
    return 1 if k >= 0 else (-1) ** (-k)


def lipschitz_closed_form(k: int, t: float, r: float) -> float:
    """``2 pi int_0^inf e^{-2 pi t rho} J_k(2 pi r rho) drho = (sqrt(t^2+r^2) - t)^|k| / (r^|k| sqrt(t^2+r^2))``,
    times ``(-1)^k`` for negative ``k``."""
    rho = math.hypot(t, r)
    m = abs(k)
    val = (rho - t) ** m / (r ** m * rho)
    return val * (-1) ** m if k < 0 else val


def lipschitz_integral(k: int, t: float, r: float, cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """``2 pi int_0^inf e^{-2 pi t rho} J_k(2 pi r rho) drho`` by quadrature.

    The range is cut where the exponential falls below ``1e-18`` and split at
    every few oscillations of the Bessel factor.
    """
    if t <= 0 or r <= 0:
        raise DomainError("the damped Bessel integral needs t > 0 and r > 0")
    end = 42.0 / (2.0 * math.pi * t)
    n_pieces = int(min(200000, max(16, end * r / 2.0)))
    edges = np.linspace(0.0, end, n_pieces + 1)
    f = lambda rho: np.exp(-2.0 * math.pi * t * rho) * bessel_j(k, 2.0 * math.pi * r * rho)
    cfg = cfg.with_(max_subdivisions=max(cfg.max_subdivisions, 4 * n_pieces))
    val = integrate_1d(f, 0.0, end, cfg, breakpoints=edges[1:-1])
    return float(np.real(val)) * 2.0 * math.pi


def verify_s_mode_numeric(k: int, t: float, r: float, cfg: QuadratureConfig = DEFAULT_CFG) -> complex:
    """``F_{k,t}(r) = 2 pi (-1)^k i^k int_0^inf e^{-2 pi t rho} J_k(2 pi r rho) drho`` by quadrature."""
    return complex((-1) ** abs(k) * (1j) ** (k % 4) * lipschitz_integral(k, t, r, cfg))


def s_mode_damped_value(k: int, t: float, r: float = 1.0, cfg: QuadratureConfig = DEFAULT_CFG) -> complex:
    """``r * i^k * F_{k,t}(r)``: the damped flip of ``g_k`` at radius ``r`` relative to ``g_k`` itself."""
    return r * (1j) ** (k % 4) * verify_s_mode_numeric(k, t, r, cfg)


def richardson_to_zero(ts, values) -> complex:
    """Polynomial (Neville) extrapolation of samples ``values[i] = f(ts[i])`` to ``t = 0``."""
    ts = [float(t) for t in ts]
    table = [complex(v) for v in values]
    n = len(ts)
    for level in range(1, n):
        for i in range(n - level):
            t_i, t_j = ts[i], ts[i + level]
            table[i] = (t_j * table[i] - t_i * table[i + 1]) / (t_j - t_i)
    return table[0]


def s_mode_eigenvalue_estimate(k: int, r: float = 1.0, ts=(1e-1, 1e-2, 1e-3, 1e-4),
                               cfg: QuadratureConfig = DEFAULT_CFG) -> complex:
    """Numerical eigenvalue of the flip on ``g_k`` from the damped modes as ``t -> 0``."""
    values = [s_mode_damped_value(k, t, r, cfg) for t in ts]
    return richardson_to_zero(ts, values)


ISOTYPIC_PIECES = ((0, 0), (1, 0), (1, 1))


def isotypic_mask(modes: np.ndarray, piece: tuple[int, int]) -> np.ndarray:
    modes = np.asarray(modes)
    if piece == (0, 0):
        return modes % 2 == 0
    if piece == (1, 0):
        return (modes % 2 == 1) & (modes > 0)
    if piece == (1, 1):
        return (modes % 2 == 1) & (modes < 0)
    raise DomainError(f"unknown isotypic piece {piece}")


def isotypic_project(v0: HomogeneousComponent, piece: tuple[int, int]) -> HomogeneousComponent:
    """Keep the modes of one isotypic piece: even ``k``, odd ``k > 0``, or odd ``k < 0``."""
    if abs(complex(v0.lam)) != 0:
        raise DomainError("isotypic splitting is defined on the lam = 0 component")
    return v0.restricted(isotypic_mask(v0.modes, tuple(piece)))


# ---------------------------------------------------------------------------
# Grids and the flip on sampled functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SquareGrid:
    """Symmetric tensor grid ``x_i = (i - (n-1)/2) h`` in each coordinate."""

    n: int
    h: float

    @property
    def axis(self) -> np.ndarray:
        return (np.arange(self.n) - (self.n - 1) / 2.0) * self.h

    @property
    def half_width(self) -> float:
        return (self.n - 1) / 2.0 * self.h

    @classmethod
    def self_dual(cls, n: int) -> "SquareGrid":
        """Grid with ``h^2 n = 1`` so that the sampled transform is exactly unitary."""
        return cls(n, 1.0 / math.sqrt(n))

    def mesh(self):
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def points(self) -> np.ndarray:
        x1, x2 = self.mesh()
        return np.stack([x1, x2], axis=-1)

    def sample(self, v: Callable) -> np.ndarray:
        return np.asarray(v(self.points()), dtype=complex)

    def l2_norm(self, values) -> float:
        return float(np.sqrt(np.sum(np.abs(values) ** 2)) * self.h)


def check_grid(values: np.ndarray, grid: SquareGrid, support_radius: float | None = None,
               bandwidth: float | None = None, edge_tol: float = 1e-10):
    """Raise :class:`GridTooCoarse` if the grid cannot carry the sampled function.

    The samples must be negligible on the outer frame, a declared support must fit
    inside the grid, and a declared bandwidth must lie below the Nyquist limit.
    """
    values = np.asarray(values)
    if values.shape != (grid.n, grid.n):
        raise DomainError(f"expected samples of shape {(grid.n, grid.n)}, got {values.shape}")
    peak = float(np.max(np.abs(values)))
    frame = max(float(np.max(np.abs(values[[0, -1], :]))), float(np.max(np.abs(values[:, [0, -1]]))))
    if peak > 0 and frame > edge_tol * peak:
        raise GridTooCoarse(f"samples reach the grid frame ({frame:.2e} vs peak {peak:.2e})")
    if support_radius is not None and support_radius > grid.half_width:
        raise GridTooCoarse(f"support radius {support_radius} exceeds grid half width {grid.half_width}")
    if bandwidth is not None and bandwidth > 0.5 / grid.h:
        raise GridTooCoarse(f"bandwidth {bandwidth} exceeds the Nyquist limit {0.5 / grid.h}")


def apply_symplectic_fourier(values: np.ndarray, grid: SquareGrid, out_axis1=None, out_axis2=None,
                             support_radius: float | None = None, bandwidth: float | None = None,
                             cfg: QuadratureConfig = DEFAULT_CFG, check: bool = True) -> np.ndarray:
    """``(flip v)(y) = int exp(-2 pi i y j x^T) v(x) dx`` by the trapezoid rule on ``grid``.

    ``y j x^T = y1 x2 - y2 x1`` so the kernel separates.  Output lives on the
    tensor grid ``out_axis1 x out_axis2`` (the input grid by default).
    """
    if check:
        check_grid(values, grid, support_radius, bandwidth)
    x = grid.axis
    y1 = x if out_axis1 is None else np.asarray(out_axis1, dtype=float)
    y2 = x if out_axis2 is None else np.asarray(out_axis2, dtype=float)
    a = np.exp(-2j * math.pi * np.outer(y1, x))
    b = np.exp(2j * math.pi * np.outer(y2, x))
    return grid.h ** 2 * (a @ np.asarray(values).T @ b.T)


def apply_flip_twice(values: np.ndarray, grid: SquareGrid) -> np.ndarray:
    """The sampled flip applied twice.

    The intermediate transform of a compactly supported function is not
    compactly supported, so the frame check is only applied to the input.  On a
    self-dual grid the sampled flip is an exactly unitary matrix whose square is
    the identity, which is the discrete form of the relation.
    """
    once = apply_symplectic_fourier(values, grid)
    return apply_symplectic_fourier(once, grid, check=False)


def usual_fourier_then_rotation(values: np.ndarray, grid: SquareGrid) -> np.ndarray:
    """``R(j) F v``: the ordinary transform followed by ``v -> v(x j)``; matches the flip."""
    x = grid.axis
    e = np.exp(-2j * math.pi * np.outer(x, x))
    fourier = grid.h ** 2 * (e @ np.asarray(values) @ e.T)
    # (x j) = (-x2, x1): output index (a, b) reads the transform at (-y_b, y_a).
    return fourier.T[:, ::-1]


def omega_s_closed_form(values: np.ndarray, grid: SquareGrid, out_points: np.ndarray | None = None,
                        theta: float = THETA_OF_FLIP, chunk: int = 512) -> np.ndarray:
    """Flip from its metaplectic kernel ``Theta * C * chi(1/2 <(0; x'-x), (x+x'; 0)>)``.

    The kernel is assembled from the symplectic form on ``W`` for every output and
    input pair, with ``Theta = 1/2`` (the ``+`` lift) and ``C = 2``.
    """
    check_grid(values, grid)
    pts_in = grid.points().reshape(-1, 2)
    vals = np.asarray(values).reshape(-1)
    keep = np.abs(vals) > 0
    pts_in, vals = pts_in[keep], vals[keep]
    outs = grid.points() if out_points is None else np.asarray(out_points, dtype=float)
    shape = outs.shape[:-1]
    outs = outs.reshape(-1, 2)
    result = np.empty(outs.shape[0], dtype=complex)
    for start in range(0, outs.shape[0], chunk):
        x = outs[start:start + chunk]
        diff = pts_in[None, :, :] - x[:, None, :]
        total = pts_in[None, :, :] + x[:, None, :]
        y_part = np.zeros(diff.shape[:-1] + (2, 2))
        y_part[..., 1, :] = diff
        x_part = np.zeros(total.shape[:-1] + (2, 2))
        x_part[..., 0, :] = total
        kernel = theta * IMAGE_MEASURE_CONSTANT * chi(0.5 * symplectic_form(y_part, x_part))
        result[start:start + chunk] = kernel @ vals * grid.h ** 2
    return result.reshape(shape)


def weyl_transform(f: Callable, x_points: np.ndarray, x_prime_points: np.ndarray, y_grid: SquareGrid,
                   cfg: QuadratureConfig = DEFAULT_CFG) -> np.ndarray:
    """``K(f)(x, x') = int_Y f(x - x' + y) chi(1/2 <y, x + x'>) dy`` by the trapezoid rule in ``y``.

    ``f`` takes arrays of 2x2 matrices (shape ``(..., 2, 2)``) with ``x`` in the
    first row and ``y`` in the second.  Lebesgue measure on Y is unit-cube
    normalised for the Euclidean form.
    """
    x_points = np.asarray(x_points, dtype=float).reshape(-1, 2)
    xp_points = np.asarray(x_prime_points, dtype=float).reshape(-1, 2)
    ys = y_grid.points().reshape(-1, 2)
    y_mats = np.zeros((ys.shape[0], 2, 2))
    y_mats[:, 1, :] = ys
    out = np.empty((x_points.shape[0], xp_points.shape[0]), dtype=complex)
    for i, x in enumerate(x_points):
        for jdx, xp in enumerate(xp_points):
            w = y_mats.copy()
            w[:, 0, :] = x - xp
            z = np.zeros((2, 2))
            z[0, :] = x + xp
            vals = np.asarray(f(w), dtype=complex)
            edge = vals.reshape(y_grid.n, y_grid.n)
            check_grid(edge, y_grid)
            phase = chi(0.5 * symplectic_form(y_mats, z))
            out[i, jdx] = np.sum(vals * phase) * y_grid.h ** 2
    return out


def gaussian_weyl_kernel(x, xp) -> complex:
    """Closed form of the Weyl transform of ``exp(-pi |w|^2)``."""
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    return complex(np.exp(-math.pi * np.sum((x - xp) ** 2) - math.pi * np.sum((x + xp) ** 2) / 4.0))


def flip_conjugation_sides(v: TestFunction2D, a: float, grid: SquareGrid, out_axis: np.ndarray):
    """Both sides of ``flip . h_a = h_{1/a} . flip`` on ``v``, evaluated on ``out_axis x out_axis``.

    Left: the flip of the dilated function.  Right: ``|a| (flip v)(a y)``, the
    flip of ``v`` itself read at the scaled output points.  Equality of the two
    is the conjugation relation ``flip h_a flip^{-1} = h_{1/a}`` with ``flip^2 = 1``.
    """
    left = apply_symplectic_fourier(grid.sample(apply_dilation(a, v)), grid, out_axis, out_axis)
    right = abs(a) * apply_symplectic_fourier(grid.sample(v), grid, a * out_axis, a * out_axis)
    return left, right
