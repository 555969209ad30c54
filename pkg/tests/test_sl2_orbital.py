import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capres.errors import DomainError, SingularElement
from capres.sl2.group import rotation
from capres.sl2.m2p import make_gram_test_function
from capres.sl2.orbital import (GramPairing, OrbitalProfile, block_ktypes, block_project, f_epsilon, ktype_project,
                                norm_bound, orbital_integral, orbital_profile, project_ktypes,
                                projection_compatibility, psi_direct, residue_form)

REAL_U = make_gram_test_function()
REAL_V = make_gram_test_function(r_inner=1.1, r_outer=1.7)
MIXED_U = make_gram_test_function(angular=((0, 1.0), (2, 0.4)))
MIXED_V = make_gram_test_function(r_inner=1.1, r_outer=1.7, angular=((0, 1.0), (-2, 0.3)))
SEVERAL = make_gram_test_function(angular=((0, 1.0), (2, 0.5), (-4, 0.25j)))

GENERIC_G = np.array([[1.1, 0.3], [-0.2, 0.85454545454545454]])
GENERIC_G[1, 1] = (1 + GENERIC_G[0, 1] * GENERIC_G[1, 0]) / GENERIC_G[0, 0]


def _random_points(n, seed=0):
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        x = rng.uniform(-1.4, 1.4, size=(2, 2))
        if 1.25 < np.linalg.norm(x) < 1.75 and np.linalg.svd(x, compute_uv=False)[-1] > 0.65:
            pts.append(x)
    return np.array(pts)


# -- matrix coefficients -------------------------------------------------------------------

@pytest.mark.parametrize("g", [np.eye(2), GENERIC_G])
def test_gram_rule_matches_direct_four_dimensional_rule(g):
    # the sigma_min cutoff cuts across the polar nodes, so the direct rule needs 96 nodes per axis for 1e-5
    direct = psi_direct(MIXED_U, MIXED_V, g, n_radial=96, n_angle=96)
    gram = GramPairing(MIXED_U, MIXED_V, n_c=40, n_d=40, n_alpha=48)(g)
    assert abs(gram - direct) < 1e-5 * abs(direct)


def test_hermitian_coefficient_at_identity_is_the_squared_norm():
    norm_sq = psi_direct(MIXED_U, MIXED_U, np.eye(2), conjugate=True)
    assert abs(norm_sq.imag) < 1e-12 * abs(norm_sq)
    assert norm_sq.real > 0
    # the direct rule at its default 40 nodes is good to a few parts in 1e3
    assert abs(GramPairing(MIXED_U, MIXED_U, conjugate=True)(np.eye(2)) - norm_sq) < 5e-3 * norm_sq.real


def test_coefficient_vanishes_beyond_the_norm_bound():
    bound = norm_bound(REAL_U, REAL_V)
    assert bound == pytest.approx(1.8 / 0.6)
    far = np.diag([1.01 * bound, 1 / (1.01 * bound)])
    assert psi_direct(REAL_U, REAL_V, far) == 0
    assert GramPairing(REAL_U, REAL_V)(far) == 0


def test_coefficient_is_real_for_real_functions():
    psi = GramPairing(REAL_U, REAL_V)
    for g in (np.eye(2), GENERIC_G, rotation(0.7) @ np.diag([1.5, 1 / 1.5])):
        val = psi(g)
        assert abs(val.imag) < 1e-14 * max(1.0, abs(val))


def test_direct_rule_needs_two_columns():
    u3 = make_gram_test_function(p=3)
    with pytest.raises(DomainError):
        psi_direct(u3, u3, np.eye(2))


# -- orbital integrals ------------------------------------------------------------------------

def test_orbital_integral_is_singular_at_the_identity():
    with pytest.raises(SingularElement):
        orbital_integral(GramPairing(REAL_U, REAL_V), 0.0, norm_bound(REAL_U, REAL_V))


def test_orbital_integral_vanishes_outside_the_support():
    bound = norm_bound(REAL_U, REAL_V)
    assert orbital_integral(GramPairing(REAL_U, REAL_V), math.log(bound) + 0.05, bound) == 0


def test_orbital_integral_against_profile_samples():
    # two routes: trapezoid over (theta, r) with |D(h_a)| against midpoints in (K, s) through orbit samples
    profile = orbital_profile(MIXED_U, MIXED_V)
    psi = GramPairing(MIXED_U, MIXED_V)
    bound = norm_bound(MIXED_U, MIXED_V)
    for i in (12, 16, 25):
        t = profile.t[i]
        direct = orbital_integral(psi, t, bound, n_theta=8, n_r=96)
        assert abs(direct - profile.samples[i]) < 2e-3 * abs(profile.samples).max()


def test_orbital_integral_is_even_in_t():
    psi = GramPairing(MIXED_U, MIXED_V)
    bound = norm_bound(MIXED_U, MIXED_V)
    a = orbital_integral(psi, 0.4, bound, n_r=96)
    b = orbital_integral(psi, -0.4, bound, n_r=96)
    assert abs(a - b) < 1e-3 * abs(a)


def test_profile_is_even_and_supported_on_the_norm_ball():
    profile = orbital_profile(MIXED_U, MIXED_V)
    # the default grid resolves F(t) = F(-t) to about 1e-5
    assert profile.symmetry_defect() < 1e-4
    assert profile.t_max == pytest.approx(math.log(norm_bound(MIXED_U, MIXED_V)))


def test_channel_functions_are_even_and_opposite():
    lam = np.array([0.0, 0.7, 2.3, 5.0])
    f0 = f_epsilon(MIXED_U, MIXED_V, 0, lam)
    f1 = f_epsilon(MIXED_U, MIXED_V, 1, lam)
    assert np.allclose(f1, -f0, rtol=0, atol=1e-15)
    back = f_epsilon(MIXED_U, MIXED_V, 0, -lam)
    assert np.max(np.abs(back - f0)) < 1e-5 * np.max(np.abs(f0))
    with pytest.raises(DomainError):
        f_epsilon(MIXED_U, MIXED_V, 2, lam)


def test_channel_function_object_matches_transform():
    profile = orbital_profile(MIXED_U, MIXED_V)
    f1 = profile.channel_function(1)
    lam = np.array([0.3, 1.7])
    # the cosine sum drops the odd part of the samples, which is discretisation noise
    assert np.max(np.abs(f1(lam) + profile.transform(lam))) < 1e-5 * np.max(np.abs(f1(lam)))
    assert np.max(np.abs(f1(lam) + profile.transform(lam).real)) < 1e-12
    assert f1.type_bound == pytest.approx(profile.t_max)


def test_profile_needs_gram_functions():
    plain = make_gram_test_function()
    stripped = type(plain)(2, plain.value, plain.sigma_min_floor, plain.support_radius)
    with pytest.raises(DomainError):
        OrbitalProfile(stripped, plain)


# -- K-types --------------------------------------------------------------------------------------

def test_projection_is_idempotent():
    pts = _random_points(8)
    p2 = ktype_project(SEVERAL, 2)
    p2p2 = ktype_project(p2, 2)
    assert np.max(np.abs(p2p2(pts) - p2(pts))) < 1e-8 * np.max(np.abs(p2(pts)))


def test_projections_are_orthogonal():
    pts = _random_points(8, seed=1)
    scale = np.max(np.abs(SEVERAL(pts)))
    for m, n in ((2, 0), (0, -4), (2, -4)):
        assert np.max(np.abs(ktype_project(ktype_project(SEVERAL, m), n)(pts))) < 1e-8 * scale


def test_projections_pick_the_declared_types():
    pts = _random_points(8, seed=2)
    only_two = make_gram_test_function(angular=((2, 0.5),))
    assert np.max(np.abs(ktype_project(SEVERAL, 2)(pts) - only_two(pts))) < 1e-10
    assert np.max(np.abs(ktype_project(SEVERAL, 6)(pts))) < 1e-10


def test_projections_sum_to_the_identity():
    pts = _random_points(8, seed=3)
    total = project_ktypes(SEVERAL, {m: 1.0 for m in range(-14, 15, 2)})
    assert np.max(np.abs(total(pts) - SEVERAL(pts))) < 1e-10


def test_projection_commutes_with_the_orbit_map():
    x = _random_points(1, seed=4)[0]
    for m in (0, 2, -4):
        lhs, rhs = projection_compatibility(SEVERAL, m, GENERIC_G, x)
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


def test_block_ktypes_partition():
    ms = [m for b in ("lower", "finite", "upper") for m in block_ktypes(b, 1, 3, 9)]
    assert sorted(ms) == list(range(-9, 10, 2))
    assert block_ktypes("finite", 0, 3, 9) == [-2, 0, 2]
    with pytest.raises(DomainError):
        block_ktypes("middle", 0, 1, 5)


def test_block_projections_add_up():
    pts = _random_points(6, seed=5)
    total = sum(block_project(SEVERAL, b, 0, 1)(pts) for b in ("lower", "finite", "upper"))
    assert np.max(np.abs(total - SEVERAL(pts))) < 1e-10


# -- residue forms -----------------------------------------------------------------------------------

def test_residue_form_parity_and_block_validation():
    with pytest.raises(DomainError):
        residue_form(MIXED_U, MIXED_V, 0, 2)
    with pytest.raises(DomainError):
        residue_form(MIXED_U, MIXED_V, 0, 1, block="middle")
    with pytest.raises(DomainError):
        residue_form(MIXED_U, MIXED_V, 2, 1)


def test_residue_form_is_the_cosh_moment():
    profile = orbital_profile(MIXED_U, MIXED_V, True)
    expected = np.sum(np.cosh(profile.t) * profile.samples) * profile.h_t
    assert residue_form(MIXED_U, MIXED_V, 0, 1) == pytest.approx(expected, rel=1e-14)
    assert residue_form(MIXED_U, MIXED_V, 1, 2) == pytest.approx(-profile.cosh_moment(2), rel=1e-14)


def test_residue_form_is_roughly_hermitian_on_the_default_grid():
    # the default grid gives a few parts in 1e5; the acceptance suite checks 1e-6 on the fine grid
    a = residue_form(MIXED_U, MIXED_V, 0, 1)
    b = residue_form(MIXED_V, MIXED_U, 0, 1)
    assert abs(a - b.conjugate()) < 1e-3 * abs(a)


def test_residue_form_of_a_function_with_itself_is_real():
    val = residue_form(MIXED_U, MIXED_U, 0, 1)
    assert abs(val.imag) < 1e-6 * abs(val)


_FINE_REAL_PAIRING = GramPairing(REAL_U, REAL_V, n_c=48, n_d=48, n_alpha=48)
_FINE_REAL_SCALE = abs(_FINE_REAL_PAIRING(np.eye(2)))


@settings(max_examples=5, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(-1.5, 1.5))
def test_coefficient_is_conjugation_equivariant_property(t, theta):
    # psi(k g k^{-1}) for K-invariant u and v equals psi(g)
    psi = _FINE_REAL_PAIRING
    g = np.diag([math.exp(t / 3), math.exp(-t / 3)]) @ np.array([[1.0, 0.4], [0.0, 1.0]])
    k = rotation(theta)
    # the Gram-space nodes are not rotation invariant; with 48 per axis the defect stays
    # below about 3e-6 of the size of psi at the identity
    assert abs(psi(k @ g @ k.T) - psi(g)) < 1e-5 * _FINE_REAL_SCALE
