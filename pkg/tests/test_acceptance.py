"""The eleven acceptance criteria at their stated tolerances.

Every test records one PASS/FAIL line; the lines are printed in a block at the
end of the pytest run (and immediately with ``-s``).  Criteria that are not
attainable with the stated parameters are run as stated and left to fail.
"""

import math
import time
from fractions import Fraction

import numpy as np

from capres.mellin import MellinTransform, bilinear_pair_at, mellin_invert, plancherel_pair
from capres.numerics import (l2_inner_product, make_bump_mode, make_bump_radial, make_bump_sector,
                             make_even_pw)
from capres.o11_representation import (O11Element, SquareGrid, SymplecticMatrix4, apply_flip_twice, apply_s_mode,
                                       flip_conjugation_sides, lipschitz_closed_form, lipschitz_integral,
                                       s_mode_eigenvalue_estimate, theta_squared)
from capres.o11_resolvent import ResolventPairing, continued_resolvent_many, residue_at_zero_paths, resolvent_pair
from capres.sl2.capelli import capelli_identity_check, capelli_target, positive_capelli_eigenvalue
from capres.sl2.m2p import make_gram_test_function
from capres.sl2.orbital import OrbitalGrid, ktype_project, orbital_profile, residue_form
from capres.sl2.spectral import ContinuedModelResolvent, locate_resonances
from capres.sl2.tables import stable_range_table

from conftest import ACCEPTANCE_LINES

BUMPS = [
    make_bump_radial(2.0, 1.0),
    make_bump_mode(1.5, 0.8, 2, "cos"),
    make_bump_mode(2.0, 1.0, 1, "sin"),
    make_bump_sector(2.0, 0.7, 0.3, 0.8),
    make_bump_mode(2.5, 1.2, 3, "cos"),
]
# the sector bump carries every angular mode, so it needs many more than the default 16
SECTOR_MODES = 256


def _modes(*fs):
    return SECTOR_MODES if any(f.parity == "mixed" for f in fs) else 16


def _record(key: str, passed: bool, detail: str) -> None:
    line = f"criterion {key:<4} {'PASS' if passed else 'FAIL'}  {detail}"
    number = "".join(ch for ch in key if ch.isdigit())
    ACCEPTANCE_LINES[number.zfill(2) + key[len(number):]] = line
    print(line)


def _sample_points(v, n, rng):
    r = rng.uniform(v.support_inner, v.support_outer, n)
    theta = rng.uniform(0, 2 * math.pi, n)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


# -- 1 ---------------------------------------------------------------------------------------------

def test_criterion_01_mellin_inversion():
    rng = np.random.default_rng(0)
    start = time.perf_counter()
    worst, failures = 0.0, 0
    for v in BUMPS:
        transform = MellinTransform(v, _modes(v))
        for w in _sample_points(v, 10, rng):
            exact = complex(v(w))
            err = abs(mellin_invert(transform, w, 40.0) - exact)
            bound = 1e-6 * (1 + abs(exact))
            worst = max(worst, err / bound)
            failures += err > bound
    elapsed = time.perf_counter() - start
    passed = failures == 0 and elapsed <= 30
    _record("1", passed, f"Mellin inversion at cutoff 40: {failures}/50 points outside 1e-6(1+|v|), "
                         f"worst error/bound {worst:.3g}, {elapsed:.1f} s")
    assert passed


# -- 2 ---------------------------------------------------------------------------------------------

# pairs with nonzero inner products, so that the relative error is meaningful
PLANCHEREL_PAIRS = [
    (BUMPS[0], make_bump_radial(1.8, 0.9)),
    (BUMPS[1], make_bump_mode(2.0, 1.0, 2, "cos")),
    (BUMPS[2], BUMPS[3]),
    (BUMPS[3], BUMPS[4]),
    (BUMPS[0], BUMPS[3]),
]


def test_criterion_02_plancherel_pairing():
    start = time.perf_counter()
    worst = 0.0
    for u, v in PLANCHEREL_PAIRS:
        spectral = plancherel_pair(u, v, None, k_max=_modes(u, v))
        direct = l2_inner_product(u, v, panels=96, n_angle=512)
        worst = max(worst, abs(spectral - direct) / abs(direct))
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-6 and elapsed <= 60
    _record("2", passed, f"Plancherel pairing vs direct 2-d quadrature: worst relative error {worst:.3g} "
                         f"over 5 pairs, {elapsed:.1f} s")
    assert passed


# -- 3 ---------------------------------------------------------------------------------------------

RESIDUE_PAIRS = [
    (make_bump_radial(2.0, 1.0), make_bump_radial(2.0, 1.0)),
    (make_bump_radial(2.0, 1.0), make_bump_radial(1.5, 0.8)),
    (make_bump_mode(2.0, 1.0, 2, "cos"), make_bump_mode(1.5, 0.8, 2, "cos")),
    (make_bump_mode(2.0, 1.0, 1, "cos"), make_bump_mode(2.5, 1.2, 1, "cos")),
    (make_bump_mode(2.0, 1.0, 1, "cos"), make_bump_radial(2.0, 1.0)),   # odd against even: residue 0
]


def test_criterion_03_o11_residue():
    start = time.perf_counter()
    worst_rel, mismatch_abs = 0.0, None
    for u, v in RESIDUE_PAIRS:
        check = residue_at_zero_paths(ResolventPairing(u, v))
        expected = 0.5j * bilinear_pair_at(u, v, 0.0)
        if u.parity != v.parity:
            mismatch_abs = abs(check.contour_value)
        else:
            worst_rel = max(worst_rel, abs(check.contour_value - expected) / abs(expected))
    elapsed = time.perf_counter() - start
    passed = worst_rel <= 1e-4 and mismatch_abs is not None and mismatch_abs <= 1e-8 and elapsed <= 120
    _record("3", passed, f"O(1,1) residue at 0 vs (i/2) pairing at 0: worst relative error {worst_rel:.3g}, "
                         f"parity-mismatched pair |residue| {mismatch_abs:.3g}, {elapsed:.1f} s")
    assert passed


# -- 4 ---------------------------------------------------------------------------------------------

def test_criterion_04_continuation_consistency():
    rng = np.random.default_rng(4)
    rp = ResolventPairing(make_bump_mode(2.0, 1.0, 2, "cos"), make_bump_mode(1.5, 0.8, 2, "cos"))
    upper = rng.uniform(-2, 2, 20) + 1j * rng.uniform(0.05, 2.0, 20)
    direct = np.array([resolvent_pair(rp, z) for z in upper])
    continued = continued_resolvent_many(rp, upper, 1.0)
    above = float(np.max(np.abs(continued - direct) / np.abs(direct)))
    # lower points stay clear of the line Im z = -1 of the shallower contour
    lower = rng.uniform(-2, 2, 20) - 1j * rng.uniform(0.05, 0.9, 20)
    shallow = continued_resolvent_many(rp, lower, 1.0)
    deep = continued_resolvent_many(rp, lower, 2.5)
    below = float(np.max(np.abs(shallow - deep) / np.abs(deep)))
    passed = above <= 1e-7 and below <= 1e-7
    _record("4", passed, f"continued vs direct above the axis {above:.3g}; N = 1 vs N = 2.5 below {below:.3g} "
                         "(relative, 20 points each)")
    assert passed


# -- 5 ---------------------------------------------------------------------------------------------

def test_criterion_05_mode_eigenvalues():
    eig = max(abs(s_mode_eigenvalue_estimate(k) - apply_s_mode(k)) for k in range(-4, 5))
    lip = max(abs(lipschitz_integral(k, t, r) - lipschitz_closed_form(k, t, r))
              for k in range(-4, 5) for t in (1.0, 0.1) for r in (0.5, 1.0, 2.0))
    passed = eig <= 0.01 and lip <= 1e-8
    _record("5", passed, f"flip eigenvalues on g_k, k = -4..4: worst deviation {eig:.3g}; "
                         f"Lipschitz integral vs closed form: worst {lip:.3g}")
    assert passed


# -- 6 ---------------------------------------------------------------------------------------------

def test_criterion_06a_flip_squares_to_identity():
    grid = SquareGrid.self_dual(401)
    v = grid.sample(make_bump_radial(2.0, 1.0))
    defect = grid.l2_norm(apply_flip_twice(v, grid) - v) / grid.l2_norm(v)
    passed = defect <= 1e-6
    _record("6a", passed, f"flip squared = identity on a grid: relative L2 defect {defect:.3g}")
    assert passed


def test_criterion_06b_flip_conjugates_dilations():
    grid = SquareGrid(1001, 0.01)
    out = np.linspace(-2, 2, 41)
    bump = make_bump_mode(1.0, 0.5, 1, "cos")
    worst = 0.0
    for a in (0.5, -2.0):
        left, right = flip_conjugation_sides(bump, a, grid, out)
        worst = max(worst, float(np.linalg.norm(left - right) / np.linalg.norm(right)))
    passed = worst <= 1e-6
    _record("6b", passed, f"flip conjugates h_a to h_(1/a): relative L2 defect {worst:.3g}")
    assert passed


def test_criterion_06c_metaplectic_square_of_the_flip():
    sq = theta_squared(SymplecticMatrix4.from_o11(O11Element(1.0, True)))
    err = abs(sq.theta_squared - 0.25)
    passed = err <= 1e-12
    _record("6c", passed, f"Theta^2(s) from the determinant formula = {sq.theta_squared:.12g} against 1/4 "
                          f"(|Theta^2(s)| = {abs(sq.theta_squared):.12g})")
    assert passed


# -- 7 ---------------------------------------------------------------------------------------------

def test_criterion_07_sl2_model_resonances():
    start = time.perf_counter()
    f0 = make_even_pw(1.0, max_real=1500)
    f1 = make_even_pw(0.7, max_real=1500)
    cont = ContinuedModelResolvent(f0, f1, 4.5)
    found = locate_resonances(f0, f1, 4.5, resolvent=cont)
    locations = sorted((complex(round(r.location.real, 6), round(r.location.imag, 6)) for r in found),
                       key=lambda z: -z.imag)
    expected_set = [complex(0, -n) for n in range(5)]
    same_set = len(locations) == 5 and all(abs(a - b) < 1e-6 for a, b in zip(locations, expected_set))
    worst = 0.0
    for r in found:
        n = int(round(-r.location.imag))
        predicted = 1j * f1(0.0) / (4 * math.pi) if n == 0 else 1j * (f1 if n % 2 == 0 else f0)(1j * n) / (2 * math.pi)
        worst = max(worst, abs(r.residue - predicted) / abs(predicted))
    elapsed = time.perf_counter() - start
    passed = same_set and worst <= 1e-6 and elapsed <= 60
    _record("7", passed, f"SL2 model at L = 4.5: poles {[f'{-round(-z.imag)}i' for z in locations]}, worst residue "
                         f"relative error {worst:.3g}, {elapsed:.1f} s")
    assert passed


# -- 8 ---------------------------------------------------------------------------------------------

def test_criterion_08_sl2_end_to_end():
    start = time.perf_counter()
    u = make_gram_test_function(angular=((0, 1.0), (2, 0.4)))
    v = make_gram_test_function(r_inner=1.1, r_outer=1.7, angular=((0, 1.0), (-2, 0.3)))
    profile = orbital_profile(u, v)
    f0, f1 = profile.channel_function(0), profile.channel_function(1)
    lam = np.linspace(0.0, 20.0, 81)
    # the transform of the samples themselves, without the cosine symmetrisation of the channel function
    values = profile.transform(lam)
    evenness = float(np.max(np.abs(values - profile.transform(-lam))) / np.max(np.abs(values)))
    residue = ContinuedModelResolvent(f0, f1, 1.5).residue(1)
    predicted = 1j * f0(1j) / (2 * math.pi)
    rel = abs(residue - predicted) / abs(predicted)
    elapsed = time.perf_counter() - start
    passed = evenness <= 0.01 and rel <= 0.05 and elapsed <= 600
    _record("8", passed, f"SL2 end-to-end p = 2: f_0 evenness defect {evenness:.3g} on [0, 20], residue at -i vs "
                         f"(i/2pi) f_0(i) relative error {rel:.3g}, {elapsed:.1f} s")
    assert passed


# -- 9 ---------------------------------------------------------------------------------------------

def test_criterion_09_capelli_identity():
    rng = np.random.default_rng(9)
    pts = rng.uniform(0.3, 2.0, (8, 2)) * rng.choice([-1, 1], (8, 2))
    homogeneous = max(float(np.max(np.abs(positive_capelli_eigenvalue(lam, k, pts) - lam ** 2)))
                      for lam in (0.0, 0.7, 2.5, -1.3) for k in (-2, 0, 3))
    report = capelli_identity_check(2)
    passed = homogeneous <= 1e-8 and report.spread <= 1e-8
    _record("9", passed, f"(E+1)^2 on homogeneous samples: worst deviation from lambda^2 {homogeneous:.3g}; "
                         f"p = 2 constant {report.fitted_constant.real:.3g} (target {capelli_target(2)}), "
                         f"spread {report.spread:.3g} over {len(report.per_function)} trials")
    assert passed


# -- 10 --------------------------------------------------------------------------------------------

KU = make_gram_test_function(angular=((0, 1.0), (2, 0.4), (-2, 0.2j)))
KV = make_gram_test_function(r_inner=1.1, r_outer=1.7, angular=((0, 1.0), (-2, 0.3), (4, 0.1)))


def test_criterion_10a_projection_algebra():
    rng = np.random.default_rng(10)
    pts = []
    while len(pts) < 12:
        x = rng.uniform(-1.4, 1.4, (2, 2))
        if 1.25 < np.linalg.norm(x) < 1.75 and np.linalg.svd(x, compute_uv=False)[-1] > 0.65:
            pts.append(x)
    pts = np.array(pts)
    scale = float(np.max(np.abs(KU(pts))))
    idem = max(float(np.max(np.abs(ktype_project(ktype_project(KU, m), m)(pts) - ktype_project(KU, m)(pts))))
               for m in (-2, 0, 2)) / scale
    orth = max(float(np.max(np.abs(ktype_project(ktype_project(KU, m), n)(pts))))
               for m in (-2, 0, 2) for n in (-2, 0, 2) if m != n) / scale
    passed = idem <= 1e-8 and orth <= 1e-8
    _record("10a", passed, f"K-type projections: idempotence defect {idem:.3g}, orthogonality defect {orth:.3g}")
    assert passed


def test_criterion_10b_block_additivity():
    worst = 0.0
    for n in (1, 3):
        full = residue_form(KU, KV, 0, n)
        blocks = sum(residue_form(KU, KV, 0, n, block=b) for b in ("lower", "finite", "upper"))
        worst = max(worst, abs(blocks - full) / abs(full))
    passed = worst <= 1e-5
    _record("10b", passed, f"residue form equals the sum of its K-type blocks: worst relative defect {worst:.3g}")
    assert passed


def test_criterion_10c_hermitian_symmetry():
    grid = OrbitalGrid.fine()
    a = residue_form(KU, KV, 0, 1, grid=grid)
    b = residue_form(KV, KU, 0, 1, grid=grid)
    rel = abs(a - b.conjugate()) / abs(a)
    passed = rel <= 1e-6
    _record("10c", passed, f"(u, v) against conj (v, u) on the fine orbital grid: relative defect {rel:.3g}")
    assert passed


# -- 11 --------------------------------------------------------------------------------------------

def test_criterion_11_stable_range_table():
    rows = [
        (stable_range_table("sp2n", 1, 2), (2, Fraction(3, 2), True)),
        (stable_range_table("opp", 2, 1), (1, Fraction(4), True)),
        (stable_range_table("sp2n", 2, 2), (4, Fraction(3, 4), False)),
    ]
    exact = all((row.r_minus_1, row.lambda_max, row.condition_holds) == want for row, want in rows)
    passed = exact and all(isinstance(row.lambda_max, Fraction) for row, _ in rows)
    shown = ", ".join(f"{row.group}(n={row.n}, p={row.p}) -> ({row.r_minus_1}, {row.lambda_max})" for row, _ in rows)
    _record("11", passed, f"stable-range rows as exact fractions: {shown}")
    assert passed
