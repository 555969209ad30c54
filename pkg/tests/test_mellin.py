import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capres.errors import DomainError
from capres.mellin import (EVEN, ODD, MellinTransform, bilinear_pair_at, choose_lambda_cutoff, mellin_forward,
                           mellin_invert, pairing_values, parity_of_modes, parity_split, plancherel_pair)
from capres.numerics import l2_inner_product, make_bump_mode, make_bump_radial, make_bump_sector

from oracles import cartesian_inner_product, radial_line_integral

RADIAL = make_bump_radial(2.0, 1.0)
MODE2 = make_bump_mode(1.5, 0.8, 2, "cos")
ODD1 = make_bump_mode(2.0, 1.0, 1, "sin")

# int_1^3 exp(-1/(1-(r-2)^2)) dr, frozen from the scipy oracle
RADIAL_LINE_INTEGRAL = 0.443993816168079


def test_radial_input_has_only_the_zero_mode():
    c = mellin_forward(RADIAL, 0.7, k_max=6)
    assert max(abs(c.coefficient(k)) for k in range(-6, 7) if k != 0) < 1e-14


def test_odd_input_has_only_odd_modes():
    c = mellin_forward(ODD1, 1.3, k_max=6)
    assert max(abs(c.coefficient(k)) for k in range(-6, 7, 2)) < 1e-14
    assert parity_of_modes(c) == ODD


def test_zero_mode_at_zero_is_the_radial_line_integral():
    oracle = radial_line_integral(RADIAL, 1.0, 3.0)
    assert abs(oracle - RADIAL_LINE_INTEGRAL) < 1e-12
    assert abs(mellin_forward(RADIAL, 0.0).coefficient(0) - oracle) < 1e-11


def test_component_is_homogeneous_of_degree_minus_one_minus_i_lambda():
    lam = 1.7
    comp = mellin_forward(MODE2, lam)
    w = np.array([0.4, 0.9])
    a = 2.3
    assert abs(comp(a * w) - a ** (-1 - 1j * lam) * comp(w)) < 1e-12


def test_component_matches_direct_radial_integral():
    # v_lam(sigma) = int_0^inf r^{i lam} v(r sigma) dr
    from scipy import integrate
    lam, theta = 2.5, 0.4
    sigma = np.array([math.cos(theta), math.sin(theta)])
    re, _ = integrate.quad(lambda r: float(np.real(r ** (1j * lam) * MODE2(r * sigma))), 0.7, 2.3, epsabs=1e-14)
    im, _ = integrate.quad(lambda r: float(np.imag(r ** (1j * lam) * MODE2(r * sigma))), 0.7, 2.3, epsabs=1e-14)
    assert abs(mellin_forward(MODE2, lam)(sigma) - complex(re, im)) < 1e-11


def test_inversion_at_bump_center():
    # The transform of this bump decays like exp(-c sqrt(lam)); a cutoff of 1000 is needed for 1e-6.
    t = MellinTransform(RADIAL)
    assert abs(mellin_invert(t, np.array([2.0, 0.0]), 1000.0) - math.exp(-1)) < 1e-6


def test_inversion_outside_support_is_zero():
    t = MellinTransform(RADIAL)
    assert abs(mellin_invert(t, np.array([0.5, 0.2]), 1000.0)) < 1e-6


def test_inversion_of_second_mode_uses_only_that_channel():
    t = MellinTransform(MODE2, k_max=4)
    w = np.array([1.2, 0.7])
    assert abs(mellin_invert(t, w, 1500.0) - MODE2(w)) < 1e-8
    mask = np.abs(t.modes) == 2
    assert np.all(np.abs(t.coefficients(np.array([0.5, 3.0]))[:, ~mask]) < 1e-14)


def test_inversion_accepts_component_callable():
    w = np.array([2.0, 0.0])
    t = MellinTransform(RADIAL, 2)
    via_callable = mellin_invert(t.component, w, 30.0)
    assert abs(via_callable - mellin_invert(t, w, 30.0)) < 1e-8


def test_inversion_rejects_origin():
    with pytest.raises(DomainError):
        mellin_invert(MellinTransform(RADIAL), np.array([0.0, 0.0]), 40.0)


def test_inversion_error_shrinks_with_cutoff():
    t = MellinTransform(RADIAL, 2)
    w = np.array([1.6, 0.9])
    errs = [abs(mellin_invert(t, w, cut) - RADIAL(w)) for cut in (40.0, 200.0, 1000.0)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-9


def test_automatic_cutoff_reaches_tail_floor_or_resolved_band():
    t = MellinTransform(RADIAL, 2)
    peak = float(np.max(np.abs(t.coefficients(np.linspace(-5, 5, 41)))))
    loose = choose_lambda_cutoff(t, rel_tol=1e-4)
    assert t.tail_size(loose) <= 1e-4 * peak
    assert choose_lambda_cutoff(t) == t.lambda_resolve
    assert t.tail_size(loose) > t.tail_size(t.lambda_resolve)


def test_plancherel_norm_against_cartesian_grid():
    ref = cartesian_inner_product(RADIAL, RADIAL, 3.0, 1200)
    assert abs(plancherel_pair(RADIAL, RADIAL) - ref) <= 1e-6 * abs(ref)


def test_plancherel_parity_orthogonality():
    assert abs(plancherel_pair(MODE2, ODD1)) < 1e-12


def test_plancherel_sector_pair_against_direct_quadrature():
    s = make_bump_sector(2.0, 0.7, 0.3, 0.8)
    ref = l2_inner_product(s, MODE2, 96, 512)
    assert abs(plancherel_pair(s, MODE2, k_max=64) - ref) <= 1e-6 * abs(ref)


def test_plancherel_error_decreases_with_cutoff():
    ref = l2_inner_product(RADIAL, MODE2 + RADIAL, 96, 512)
    errs = [abs(plancherel_pair(RADIAL, MODE2 + RADIAL, cut, k_max=4) - ref) for cut in (10.0, 20.0, 40.0)]
    assert errs[0] > errs[1] > errs[2]


def test_bilinear_pairing_radial_at_zero():
    c0 = mellin_forward(RADIAL, 0.0).coefficient(0)
    assert abs(bilinear_pair_at(RADIAL, RADIAL, 0.0) - 2 * math.pi * c0 * c0) < 1e-12


def test_bilinear_pairing_vanishes_across_parity():
    assert abs(bilinear_pair_at(ODD1, MODE2, 1.3)) < 1e-14


def test_bilinear_pairing_integrates_to_the_plane_integral():
    # (1/2pi) int int v_lam u_{-lam} dsigma dlam = int u v dw (no conjugation)
    from capres.numerics import integrate_1d
    u, v = MODE2, MODE2 + RADIAL
    tu, tv = MellinTransform(u, 4), MellinTransform(v, 4)
    total = integrate_1d(lambda lam: pairing_values(tu, tv, lam), -1500, 1500,
                         breakpoints=np.linspace(-1500, 1500, 31)[1:-1]) / (2 * math.pi)
    ref = cartesian_inner_product(u, v, 3.0, 1000)
    assert abs(total - ref) <= 1e-6 * abs(ref)


def test_parity_split_recombines():
    s = make_bump_sector(2.0, 0.7, 0.3, 0.8)
    even, odd = parity_split(s)
    w = np.array([1.9, 0.7])
    assert abs(even(w) + odd(w) - s(w)) < 1e-15
    assert parity_of_modes(mellin_forward(even, 0.3, 8)) == EVEN


@settings(max_examples=15, deadline=None)
@given(st.floats(-8, 8), st.floats(0.3, 3.0), st.floats(0, 2 * math.pi))
def test_homogeneity_property(lam, scale, theta):
    comp = mellin_forward(MODE2, lam, 4)
    w = np.array([math.cos(theta), math.sin(theta)])
    lhs = comp(scale * w)
    rhs = scale ** (-1 - 1j * lam) * comp(w)
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(rhs))


@settings(max_examples=10, deadline=None)
@given(st.floats(-6, 6))
def test_pairing_symmetric_for_equal_inputs_property(lam):
    # For u = v the pairing at lam and -lam pairs the same coefficients.
    t = MellinTransform(MODE2, 4)
    a, b = pairing_values(t, t, np.array([lam, -lam]))
    assert abs(a - b) <= 1e-12 * (1 + abs(a))
