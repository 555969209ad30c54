"""Capelli identities, the Weil representation of the flip, and the stable range.

Run with ``python demos/operators_and_symmetries.py`` (about twenty seconds).
"""

import numpy as np

from capres.numerics import make_bump_radial
from capres.o11_representation import (O11Element, SquareGrid, SymplecticMatrix4, apply_flip_twice, apply_s_mode,
                                       s_mode_eigenvalue_estimate, theta_squared)
from capres.sl2.capelli import (HALF_TRACE, TRACE, OscillatorModel, capelli_identity_check, euler_plus_one_squared,
                                make_trial_functions, o11_casimir_from_oscillator, positive_capelli_eigenvalue)
from capres.sl2.tables import stable_range_from_dimensions, stable_range_table


def main():
    print("1. On the plane the quadratic element of o(1,1) is (E + 1)^2")
    plane = OscillatorModel(1).variables
    same = o11_casimir_from_oscillator(HALF_TRACE).equals(euler_plus_one_squared(plane))
    print(f"   exact operator identity in the oscillator model with p = 1: {same}")
    pts = np.array([[1.0, 0.5], [-0.7, 1.9]])
    print(f"   -(E+1)^2 on r^(-1-1.5i) e^(2i theta) divided by itself: {positive_capelli_eigenvalue(1.5, 2, pts)}")

    print("\n2. The difference of the two Casimirs on 2 x 2 matrices")
    report = capelli_identity_check(2)
    print(f"   fitted constant {report.fitted_constant:.3g} against {report.target}, spread {report.spread:.1e}")
    plain = capelli_identity_check(2, make_trial_functions(2, count=4), form_scale=TRACE, n_points=20)
    print(f"   with the plain trace form the per-function constants spread by {plain.spread:.2f}")

    print("\n3. The flip in the Weil representation")
    for k in (-3, -2, 0, 3):
        numeric = s_mode_eigenvalue_estimate(k).real
        print(f"   eigenvalue on g_{k:+d}: numeric {numeric:+.6f}, exact {apply_s_mode(k):+d}")
    grid = SquareGrid.self_dual(201)
    v = grid.sample(make_bump_radial(2.0, 1.0))
    defect = grid.l2_norm(apply_flip_twice(v, grid) - v) / grid.l2_norm(v)
    print(f"   flip applied twice, relative defect {defect:.1e}")
    sq = theta_squared(SymplecticMatrix4.from_o11(O11Element(1.0, True)))
    print(f"   Theta^2 of the flip from the determinant formula: {sq.theta_squared:.6f} "
          f"(modulus {abs(sq.theta_squared):.6f})")

    print("\n4. Stable range")
    for group, n, p in (("sp2n", 1, 2), ("opp", 2, 1), ("sp2n", 2, 2)):
        row = stable_range_table(group, n, p)
        print(f"   {group}(n={n}, p={p}): r - 1 = {row.r_minus_1}, lambda_max = {row.lambda_max}, "
              f"stable: {row.condition_holds}")
    dims = stable_range_from_dimensions("sp2n", 1, 2)
    print(f"   the dimension count for sp2n(1, 2) gives lambda_max = {dims.lambda_max}")


if __name__ == "__main__":
    main()
