"""Polynomial-coefficient differential operators on ``M_{2,p}(R)`` and the Capelli identities.

The oscillator representation is built from scratch.  ``W = Hom(V', V)`` holds
2x2p matrices, where ``V = R^2`` carries the symplectic form ``J = [[0,1],[-1,0]]``
and ``V' = R^{2p}`` carries the split form ``[[0, I], [I, 0]]``.  The
symplectic form on ``W`` is ``<w, w'> = tr(w S' w'^T J)``.  The polarization
``W = X + Y`` puts the first ``p`` columns in ``X``, so functions live on
``X = M_{2,p}``.  The Heisenberg derivative is ``-d/dx0`` along ``x0 in X`` and
multiplication by ``2 pi i <y0, x>`` along ``y0 in Y``.  An element ``Z`` of
``sp(W)`` acts by

    omega(Z) = (i / 4 pi) sum_a rho(Z e_a) rho(f_a),    <e_a, f_b> = delta_ab,

which is the unique quadratic expression with ``[omega(Z), rho(w)] = rho(Z w)``;
it needs no symmetrization because ``tr Z = 0``.  SL2 acts on ``W`` by left
multiplication and ``O_{p,p}`` by ``w -> w g'^{-1}``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from ..errors import DomainError

SYMPLECTIC_J = sp.Matrix([[0, 1], [-1, 0]])


def matrix_symbols(p: int) -> tuple[sp.Symbol, ...]:
    """Coordinates ``x_{i,j}`` on ``M_{2,p}``, row-major (row 1 first)."""
    if p < 1:
        raise DomainError("p must be a positive integer")
    return tuple(sp.Symbol(f"x{i}{j}", real=True) for i in (1, 2) for j in range(1, p + 1))


def _add_index(a, b):
    return tuple(i + j for i, j in zip(a, b))


@dataclass
class DifferentialOperator:
    """``sum_alpha c_alpha(x) d^alpha`` with exact sympy coefficients."""

    variables: tuple
    terms: dict = field(default_factory=dict)

    @classmethod
    def multiplication(cls, variables, coefficient) -> "DifferentialOperator":
        return cls(tuple(variables), {(0,) * len(variables): sp.sympify(coefficient)})

    @classmethod
    def derivative(cls, variables, index: int, coefficient=1) -> "DifferentialOperator":
        alpha = tuple(1 if k == index else 0 for k in range(len(variables)))
        return cls(tuple(variables), {alpha: sp.sympify(coefficient)})

    def _check(self, other):
        if self.variables != other.variables:
            raise DomainError("operators act on different coordinates")

    def _cleaned(self) -> "DifferentialOperator":
        out = {}
        for alpha, c in self.terms.items():
            c = sp.expand(c)
            if c != 0:
                out[alpha] = c
        return DifferentialOperator(self.variables, out)

    def __add__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        self._check(other)
        terms = dict(self.terms)
        for alpha, c in other.terms.items():
            terms[alpha] = terms.get(alpha, 0) + c
        return DifferentialOperator(self.variables, terms)._cleaned()

    def __neg__(self) -> "DifferentialOperator":
        return self.scale(-1)

    def __sub__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        return self + (-other)

    def scale(self, c) -> "DifferentialOperator":
        c = sp.sympify(c)
        return DifferentialOperator(self.variables, {a: c * v for a, v in self.terms.items()})._cleaned()

    def __matmul__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        """Composition ``self o other`` by the Leibniz rule."""
        self._check(other)
        terms: dict = {}
        for alpha, a in self.terms.items():
            for beta, b in other.terms.items():
                for gamma in itertools.product(*(range(k + 1) for k in alpha)):
                    weight = math.prod(math.comb(k, g) for k, g in zip(alpha, gamma))
                    db = self._differentiate(b, gamma)
                    if db == 0:
                        continue
                    rest = tuple(k - g for k, g in zip(alpha, gamma))
                    key = _add_index(rest, beta)
                    terms[key] = terms.get(key, 0) + weight * a * db
        return DifferentialOperator(self.variables, terms)._cleaned()

    def _differentiate(self, expr, alpha):
        for var, k in zip(self.variables, alpha):
            if k:
                expr = sp.diff(expr, var, k)
        return expr

    def apply(self, expr):
        """The operator applied to a sympy expression in ``variables``."""
        return sp.expand(sum((c * self._differentiate(expr, a) for a, c in self.terms.items()), sp.Integer(0)))

    @property
    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def scalar_part(self):
        """The constant ``c`` when the operator is multiplication by ``c``, else ``None``."""
        zero = (0,) * len(self.variables)
        if any(a != zero for a in self.terms):
            return None
        c = self.terms.get(zero, sp.Integer(0))
        return c if not c.free_symbols else None

    def equals(self, other: "DifferentialOperator") -> bool:
        return not (self - other).terms


class OscillatorModel:
    """The Weil representation of ``sp(W)`` on polynomial-coefficient operators over ``M_{2,p}``."""

    def __init__(self, p: int):
        self.p = p
        self.variables = matrix_symbols(p)
        self.dim = 4 * p
        split = sp.zeros(2 * p, 2 * p)
        for j in range(p):
            split[j, p + j] = 1
            split[p + j, j] = 1
        self.split_form = split
        basis = [self._unit(a) for a in range(self.dim)]
        gram = sp.Matrix(self.dim, self.dim, lambda a, b: self.form(basis[a], basis[b]))
        inv = gram.inv()
        self.basis = basis
        self.dual_basis = [sum((inv[c, b] * basis[c] for c in range(self.dim)), sp.zeros(2, 2 * p))
                           for b in range(self.dim)]

    def _unit(self, a: int) -> sp.Matrix:
        m = sp.zeros(2, 2 * self.p)
        m[a // (2 * self.p), a % (2 * self.p)] = 1
        return m

    def form(self, w1: sp.Matrix, w2: sp.Matrix):
        return (w1 * self.split_form * w2.T * SYMPLECTIC_J).trace()

    def heisenberg(self, w: sp.Matrix) -> DifferentialOperator:
        """``-d/d(w_X) + 2 pi i <w_Y, x>`` for ``w = w_X + w_Y``."""
        p, xs = self.p, self.variables
        x = sp.Matrix(2, p, list(xs))
        w_x = w[:, :p]
        w_y = sp.zeros(2, 2 * p)
        w_y[:, p:] = w[:, p:]
        x_full = sp.zeros(2, 2 * p)
        x_full[:, :p] = x
        op = DifferentialOperator.multiplication(xs, 2 * sp.pi * sp.I * self.form(w_y, x_full))
        for k in range(2 * p):
            c = w_x[k // p, k % p]
            if c != 0:
                op = op + DifferentialOperator.derivative(xs, k, -c)
        return op

    def omega(self, action) -> DifferentialOperator:
        """``omega(Z)`` for ``Z`` given as a callable ``w -> Z w`` on 2x2p matrices."""
        total = DifferentialOperator(self.variables, {})
        for e, f in zip(self.basis, self.dual_basis):
            ze = action(e)
            if ze == sp.zeros(2, 2 * self.p):
                continue
            total = total + (self.heisenberg(ze) @ self.heisenberg(f))
        return total.scale(sp.I / (4 * sp.pi))

    def omega_sl2(self, z: sp.Matrix) -> DifferentialOperator:
        return self.omega(lambda w: z * w)

    def omega_opp(self, z: sp.Matrix) -> DifferentialOperator:
        """Right translation ``w -> w g'^{-1}`` differentiates to ``w -> -w Z'``."""
        return self.omega(lambda w: -w * z)


SL2_H = sp.Matrix([[1, 0], [0, -1]])
SL2_E_PLUS = sp.Matrix([[0, 1], [0, 0]])
SL2_E_MINUS = sp.Matrix([[0, 0], [1, 0]])


def sl2_vector_fields(p: int) -> dict[str, DifferentialOperator]:
    """The first-order fields of ``v -> v(g^{-1} x)`` for ``h``, ``e+`` and ``e-``."""
    xs = matrix_symbols(p)
    row1, row2 = xs[:p], xs[p:]
    d = lambda k, c: DifferentialOperator.derivative(xs, k, c)
    zero = DifferentialOperator(xs, {})
    h = sum((d(p + j, row2[j]) + d(j, -row1[j]) for j in range(p)), zero)
    e_plus = sum((d(j, -row2[j]) for j in range(p)), zero)
    e_minus = sum((d(p + j, -row1[j]) for j in range(p)), zero)
    return {"h": h, "e_plus": e_plus, "e_minus": e_minus}


def casimir_operator(p: int) -> DifferentialOperator:
    """``omega0(h)^2 - 2 omega0(h) + 4 omega0(e+) omega0(e-)`` on ``M_{2,p}``."""
    f = sl2_vector_fields(p)
    h = f["h"]
    return (h @ h) - h.scale(2) + (f["e_plus"] @ f["e_minus"]).scale(4)


def opp_basis(p: int) -> list[sp.Matrix]:
    """A basis of ``o(p,p)`` preserving ``[[0, I], [I, 0]]``: ``[[A, B], [C, -A^T]]`` with ``B, C`` skew."""
    out = []
    for i in range(p):
        for j in range(p):
            z = sp.zeros(2 * p, 2 * p)
            z[i, j] = 1
            z[p + j, p + i] = -1
            out.append(z)
    for i, j in itertools.combinations(range(p), 2):
        for row, col in ((0, p), (p, 0)):
            z = sp.zeros(2 * p, 2 * p)
            z[row + i, col + j] = 1
            z[row + j, col + i] = -1
            out.append(z)
    return out


HALF_TRACE = sp.Rational(1, 2)
TRACE = sp.Integer(1)


def _dual_form(basis, form_scale):
    """The inverse Gram matrix ``b^{ij}`` of ``B(X, Y) = form_scale * tr(XY)``."""
    scale = HALF_TRACE if form_scale is None else sp.sympify(form_scale)
    gram = sp.Matrix(len(basis), len(basis), lambda i, j: scale * (basis[i] * basis[j]).trace())
    return gram.inv()


def opp_casimir(model: OscillatorModel, form_scale=None) -> DifferentialOperator:
    """``sum b^{ij} omega(X_i) omega(X_j)`` with ``B(X, Y) = form_scale * tr(XY)``.

    The default ``form_scale = 1/2`` is the normalization in which the
    quadratic element of ``o(1,1)`` is ``h'^2``; with the plain trace form the
    difference ``omega0(C') - omega0(C)`` is not a scalar (see
    :func:`capelli_identity_check` with ``form_scale=TRACE``).
    """
    basis = opp_basis(model.p)
    inv = _dual_form(basis, form_scale)
    images = [model.omega_opp(z) for z in basis]
    total = DifferentialOperator(model.variables, {})
    for i, j in itertools.product(range(len(basis)), repeat=2):
        if inv[i, j] != 0:
            total = total + (images[i] @ images[j]).scale(inv[i, j])
    return total


def capelli_target(p: int) -> int:
    return -(p - 1) ** 2 + 1


@dataclass(frozen=True)
class TrialFunction:
    """``P(x) exp(-|x|^2 / 2)`` with ``P`` a polynomial with rational coefficients."""

    polynomial: sp.Expr
    label: str = ""


def make_trial_functions(p: int, count: int = 10, seed: int = 0, degree: int = 3) -> list[TrialFunction]:
    """Random integer-coefficient polynomials of the given degree times a Gaussian."""
    rng = np.random.default_rng(seed)
    xs = matrix_symbols(p)
    monomials = [m for m in sp.itermonomials(xs, degree)]
    monomials.sort(key=sp.default_sort_key)
    out = []
    for k in range(count):
        picks = rng.choice(len(monomials), size=min(6, len(monomials)), replace=False)
        poly = sum(int(rng.integers(-3, 4) or 1) * monomials[i] for i in picks)
        out.append(TrialFunction(sp.expand(poly), f"trial{k}"))
    return out


def apply_to_gaussian(op: DifferentialOperator, polynomial):
    """``Q`` with ``op(P e^{-|x|^2/2}) = Q e^{-|x|^2/2}``, using ``d_k (P G) = (d_k P - x_k P) G``."""
    xs = op.variables
    cache = {(0,) * len(xs): sp.expand(polynomial)}

    def lifted(alpha):
        if alpha in cache:
            return cache[alpha]
        k = next(i for i, a in enumerate(alpha) if a)
        lower = tuple(a - (i == k) for i, a in enumerate(alpha))
        q = lifted(lower)
        cache[alpha] = sp.expand(sp.diff(q, xs[k]) - xs[k] * q)
        return cache[alpha]

    return sp.expand(sum((c * lifted(a) for a, c in op.terms.items()), sp.Integer(0)))


@dataclass(frozen=True)
class CapelliReport:
    p: int
    form_scale: object
    target: int
    operator_constant: complex | None
    fitted_constant: complex
    per_function: tuple
    spread: float
    max_residual: float

    @property
    def matches_target(self) -> bool:
        return abs(self.fitted_constant - self.target) <= 1e-8


def _sequential_opp_casimir(model, form_scale, polynomial):
    """``omega0(C') u`` by applying ``omega(X_j)`` then ``sum_i b^{ij} omega(X_i)``; no operator products."""
    basis = opp_basis(model.p)
    inv = _dual_form(basis, form_scale)
    images = [model.omega_opp(z) for z in basis]
    first = [apply_to_gaussian(op, polynomial) for op in images]
    total = sp.Integer(0)
    for i in range(len(basis)):
        mixed = sp.expand(sum((inv[i, j] * first[j] for j in range(len(basis))), sp.Integer(0)))
        if mixed != 0:
            total += apply_to_gaussian(images[i], mixed)
    return sp.expand(total)


def _sequential_casimir(p, polynomial):
    f = sl2_vector_fields(p)
    h_u = apply_to_gaussian(f["h"], polynomial)
    hh_u = apply_to_gaussian(f["h"], h_u)
    em_u = apply_to_gaussian(f["e_minus"], polynomial)
    ee_u = apply_to_gaussian(f["e_plus"], em_u)
    return sp.expand(hh_u - 2 * h_u + 4 * ee_u)


def capelli_identity_check(p: int, trial_functions: list[TrialFunction] | None = None, form_scale=None,
                           n_points: int = 40, seed: int = 1) -> CapelliReport:
    """Measure ``(omega0(C') - omega0(C)) u / u`` on trial functions.

    Two routes.  The composed operator difference is reduced exactly and its
    scalar value, if it is one, is ``operator_constant``.  Independently, each
    trial function is pushed through the operators one factor at a time and
    the ratio is sampled at random points; ``fitted_constant`` is the
    least-squares ``c`` over all samples and ``spread`` the range of the
    per-function fits.
    """
    if p < 1:
        raise DomainError("p must be a positive integer")
    if form_scale is None:
        form_scale = HALF_TRACE
    model = OscillatorModel(p)
    trials = trial_functions if trial_functions is not None else make_trial_functions(p)
    difference = opp_casimir(model, form_scale) - casimir_operator(p)
    scalar = difference.scalar_part()
    operator_constant = complex(sp.N(scalar, 30)) if scalar is not None else None

    rng = np.random.default_rng(seed)
    points = rng.uniform(-1.5, 1.5, size=(n_points, len(model.variables)))
    fits, numerators, denominators, residual_pairs = [], 0.0, 0.0, []
    for trial in trials:
        lhs = _sequential_opp_casimir(model, form_scale, trial.polynomial) - _sequential_casimir(p, trial.polynomial)
        f_lhs = sp.lambdify(model.variables, lhs, "numpy")
        f_u = sp.lambdify(model.variables, trial.polynomial, "numpy")
        du = np.array([complex(f_lhs(*pt)) for pt in points])
        u = np.array([complex(f_u(*pt)) for pt in points])
        fits.append(complex(np.vdot(u, du) / np.vdot(u, u)))
        numerators += np.vdot(u, du)
        denominators += np.vdot(u, u).real
        residual_pairs.append((du, u))
    fitted = complex(numerators / denominators)
    target = capelli_target(p)
    max_residual = max(float(np.max(np.abs(du - target * u))) for du, u in residual_pairs)
    spread = max(abs(a - b) for a in fits for b in fits)
    return CapelliReport(p, form_scale, target, operator_constant, fitted, tuple(fits), spread, max_residual)


def euler_plus_one_squared(variables=None) -> DifferentialOperator:
    """``(E + 1)^2`` with ``E = x d_x + y d_y`` on the plane."""
    if variables is None:
        variables = (sp.Symbol("x", real=True), sp.Symbol("y", real=True))
    xs = tuple(variables)
    euler = DifferentialOperator.derivative(xs, 0, xs[0]) + DifferentialOperator.derivative(xs, 1, xs[1])
    shifted = euler + DifferentialOperator.multiplication(xs, 1)
    return shifted @ shifted


def o11_casimir_from_oscillator(form_scale=HALF_TRACE) -> DifferentialOperator:
    """``b h'^2`` for the generator ``h'`` of ``o(1,1)`` in the oscillator model with ``p = 1``.

    The default scale makes the quadratic element exactly ``h'^2``.
    """
    model = OscillatorModel(1)
    (z,) = opp_basis(1)
    b = 1 / (sp.sympify(form_scale) * (z * z).trace())
    image = model.omega_opp(z)
    return (image @ image).scale(b)


def homogeneous_sample(lam, k: int, variables=None):
    """``r^{-1 - i lam} e^{i k theta}`` as a sympy expression in ``x, y``."""
    if variables is None:
        variables = (sp.Symbol("x", real=True), sp.Symbol("y", real=True))
    x, y = variables
    r2 = x ** 2 + y ** 2
    return r2 ** ((-1 - sp.I * sp.sympify(lam)) / 2) * ((x + sp.I * y) / sp.sqrt(r2)) ** k


def positive_capelli_eigenvalue(lam, k: int, points) -> np.ndarray:
    """``C+ v / v`` for ``C+ = -(E+1)^2`` and ``v`` homogeneous, sampled at ``points`` (shape (n, 2))."""
    xs = (sp.Symbol("x", real=True), sp.Symbol("y", real=True))
    v = homogeneous_sample(lam, k, xs)
    cv = -euler_plus_one_squared(xs).apply(v)
    ratio = sp.lambdify(xs, cv / v, "numpy")
    points = np.asarray(points, dtype=float)
    return np.array([complex(ratio(px, py)) for px, py in points])
