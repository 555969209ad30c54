import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from capres.errors import ContourCollision, CrossCheckFailure, DomainError
from capres.mellin import bilinear_pair_at, mellin_forward
from capres.numerics import TestFunction2D, make_bump_mode, make_bump_radial
from capres.o11_resolvent import (ResolventPairing, capelli_apply_o11, continued_resolvent,
                                  continued_resolvent_many, resolvent_pair, resolvent_pair_partial_fractions,
                                  residue_at_zero, residue_at_zero_paths)

from oracles import cartesian_capelli, resolvent_by_partial_fractions

RADIAL = make_bump_radial(2.0, 1.0)
MODE2_A = make_bump_mode(2.0, 1.0, 2, "cos")
MODE2_B = make_bump_mode(1.5, 0.8, 2, "cos")
ODD1 = make_bump_mode(2.0, 1.0, 1, "cos")
_SYMMETRIC_MODE_PAIR = ResolventPairing(MODE2_B, MODE2_B)


@pytest.fixture(scope="module")
def radial_pair():
    return ResolventPairing(RADIAL, RADIAL)


@pytest.fixture(scope="module")
def mode_pair():
    return ResolventPairing(MODE2_A, MODE2_B)


# -- the O(1,1) Capelli operator -------------------------------------------------------

def _homogeneous(lam, k):
    def value(w):
        w = np.asarray(w, dtype=float)
        r = np.hypot(w[..., 0], w[..., 1])
        return r ** (-1 - 1j * lam) * np.exp(1j * k * np.arctan2(w[..., 1], w[..., 0]))
    return TestFunction2D(value, 0.5, 4.0, "mixed", f"hom({lam},{k})")


@pytest.mark.parametrize("lam,k", [(1.3, 0), (0.4, 2), (-2.0, -3)])
def test_capelli_eigenvalue_on_homogeneous_functions(lam, k):
    v = _homogeneous(lam, k)
    cv = capelli_apply_o11(v)
    w = np.array([1.1, -0.6])
    assert abs(cv(w) - lam ** 2 * v(w)) < 1e-8 * abs(v(w))


def test_capelli_kills_inverse_radius():
    v = _homogeneous(0.0, 0)
    assert abs(capelli_apply_o11(v)(np.array([0.8, 1.2]))) < 1e-9


def test_capelli_on_bump_against_cartesian_differences():
    rng = np.random.default_rng(3)
    cv = capelli_apply_o11(RADIAL)
    for _ in range(20):
        r, th = rng.uniform(1.05, 2.95), rng.uniform(0, 2 * math.pi)
        w = np.array([r * math.cos(th), r * math.sin(th)])
        assert abs(cv(w) - cartesian_capelli(RADIAL, w)) < 1e-6


# -- the resolvent above the axis --------------------------------------------------------

def test_resolvent_vanishes_across_parity():
    rp = ResolventPairing(MODE2_A, ODD1)
    for z in (0.5j, 1 + 2j):
        assert abs(resolvent_pair(rp, z)) < 1e-14


def test_resolvent_matches_partial_fraction_oracle(radial_pair):
    z = 5j
    cut = radial_pair.line_cutoff(0.0)
    oracle = resolvent_by_partial_fractions(lambda lam: radial_pair.pairing_fn(np.array([lam]))[0], z, cut)
    assert abs(resolvent_pair(radial_pair, z) - oracle) < 1e-9 * abs(oracle)
    assert abs(resolvent_pair_partial_fractions(radial_pair, z) - oracle) < 1e-9 * abs(oracle)


def test_resolvent_reflection_symmetry(radial_pair):
    # For real u = v the pairing is real and even, so R(-conj z) = conj R(z).
    for z in (1 + 1j, 0.3 + 0.2j):
        assert abs(resolvent_pair(radial_pair, -z.conjugate()) - resolvent_pair(radial_pair, z).conjugate()) \
            < 1e-12


def test_resolvent_rejects_lower_half_plane(radial_pair):
    with pytest.raises(DomainError):
        resolvent_pair(radial_pair, 1 - 0.1j)


def test_pairing_evenness_defect_reflects_symmetry(radial_pair, mode_pair):
    assert radial_pair.evenness_defect < 1e-12
    asym = ResolventPairing(RADIAL, make_bump_radial(1.5, 0.8))
    assert asym.evenness_defect > 1e-3


# -- continuation across the axis ---------------------------------------------------------

def test_continuation_agrees_above_axis(radial_pair):
    assert abs(continued_resolvent(radial_pair, 2j, 1.0) - resolvent_pair(radial_pair, 2j)) \
        < 1e-8 * abs(resolvent_pair(radial_pair, 2j))


def test_continuation_is_finite_below_and_has_a_simple_pole_at_zero(radial_pair):
    assert np.isfinite(continued_resolvent(radial_pair, -0.5j, 2.0))
    ts = np.array([0.2, 0.1, 0.05, 0.025])
    scaled = np.abs(ts * continued_resolvent_many(radial_pair, -1j * ts, 2.0))
    assert np.max(scaled) < 2 * np.min(scaled)


def test_continuation_on_real_axis_is_the_boundary_value(radial_pair):
    vals = np.array([resolvent_pair(radial_pair, 3 + e * 1j) for e in (4e-3, 2e-3, 1e-3)])
    # quadratic extrapolation to e = 0 from e = 4, 2, 1 (times 1e-3)
    limit = vals[2] * 8 / 3 - vals[1] * 2 + vals[0] / 3
    assert abs(continued_resolvent(radial_pair, 3.0, 1.0) - limit) < 1e-5 * abs(limit)


def test_continuation_independent_of_shift(mode_pair):
    zs = np.array([0.3 - 0.4j, -1.2 - 0.7j, 0.8 - 0.2j])
    a = continued_resolvent_many(mode_pair, zs, 1.0)
    b = continued_resolvent_many(mode_pair, zs, 2.5)
    assert np.max(np.abs(a - b) / np.abs(b)) < 1e-7


def test_continuation_domain_errors(radial_pair):
    with pytest.raises(ContourCollision):
        continued_resolvent(radial_pair, 0.5 - 1.0j, 1.0)
    with pytest.raises(DomainError):
        continued_resolvent(radial_pair, -2.0j, 1.0)
    with pytest.raises(DomainError):
        continued_resolvent(radial_pair, 0j, 1.0)


# -- the residue at zero ---------------------------------------------------------------------

def _zero_component_pairing_by_quadrature(u, v, n_theta=64):
    """``int_{S^1} v_0(sigma) u_0(sigma) dsigma`` with ``v_0(sigma) = int v(r sigma) dr``."""
    total = 0j
    for th in 2 * math.pi * np.arange(n_theta) / n_theta:
        sigma = np.array([math.cos(th), math.sin(th)])
        line = lambda f: integrate.quad(lambda r: float(np.real(f(r * sigma))), 0.3, 3.5, epsabs=1e-14,
                                        limit=200)[0]
        total += line(v) * line(u)
    return total * 2 * math.pi / n_theta


def test_residue_radial_pair_is_the_zero_channel(radial_pair):
    c0 = mellin_forward(RADIAL, 0.0).coefficient(0)
    closed = 0.5j * 2 * math.pi * c0 * c0
    assert abs(residue_at_zero(radial_pair) - closed) < 1e-4 * abs(closed)


def test_residue_parity_mismatch_is_zero():
    rp = ResolventPairing(ODD1, RADIAL)
    assert abs(residue_at_zero(rp)) < 1e-8


def test_residue_mode_pair_against_quadrature(mode_pair):
    oracle = 0.5j * _zero_component_pairing_by_quadrature(MODE2_A, MODE2_B)
    check = residue_at_zero_paths(mode_pair)
    assert abs(check.contour_value - oracle) < 1e-4 * abs(oracle)
    assert abs(check.closed_form - 0.5j * bilinear_pair_at(MODE2_A, MODE2_B, 0.0)) < 1e-10


def test_residue_cross_check_raises_on_disagreement(radial_pair):
    class Skewed:
        def __init__(self, rp):
            self.rp = rp

        def pairing_fn(self, lam):
            lam = np.asarray(lam, dtype=complex)
            return self.rp.pairing_fn(lam) + np.where(lam == 0, 1.0, 0.0)

        def line_cutoff(self, shift):
            return self.rp.line_cutoff(shift)

    with pytest.raises(CrossCheckFailure):
        residue_at_zero_paths(Skewed(radial_pair))


@settings(max_examples=8, deadline=None)
@given(st.floats(-2, 2), st.floats(0.1, 0.9))
def test_continuation_matches_direct_property(x, y):
    rp = _SYMMETRIC_MODE_PAIR
    z = complex(x, y)
    direct = resolvent_pair(rp, z)
    assert abs(continued_resolvent(rp, z, 1.0) - direct) <= 1e-7 * abs(direct)

