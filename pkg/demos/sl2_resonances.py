"""Resonances of SL2(R) on functions of 2 x 2 matrices.

Run with ``python demos/sl2_resonances.py`` (about half a minute).  First the
model resolvent is built from two synthetic Paley-Wiener channel functions and
its poles are found by contour moments.  Then the channel functions are
computed from two concrete test functions through orbital integrals, and the
residue at ``-i`` is compared with its closed form.
"""

import math

import numpy as np

from capres.numerics import EvenPWFunction, make_even_pw
from capres.sl2.m2p import make_gram_test_function
from capres.sl2.orbital import orbital_profile
from capres.sl2.spectral import ContinuedModelResolvent, locate_resonances


def show_poles(title, f0, f1, shift=4.5):
    print(title)
    cont = ContinuedModelResolvent(f0, f1, shift)
    for res in locate_resonances(f0, f1, shift, resolvent=cont):
        n = int(round(-res.location.imag))
        print(f"   pole at {res.location.real:+.1e} {res.location.imag:+.6f}i, residue {res.residue:.6e}")
        print(f"      closed form at -{n}i:                  {cont.predicted_residue(n):.6e}")


def main():
    f0 = make_even_pw(1.0, max_real=1500)
    f1 = make_even_pw(0.7, max_real=1500)
    zero = EvenPWFunction.zero()
    show_poles("1. The spherical channel alone: odd multiples of -i", f0, zero)
    show_poles("\n2. The other channel alone: even multiples of -i, including 0", zero, f1)

    print("\n3. Channel functions from orbital integrals (p = 2)")
    u = make_gram_test_function(angular=((0, 1.0), (2, 0.4)))
    v = make_gram_test_function(r_inner=1.1, r_outer=1.7, angular=((0, 1.0), (-2, 0.3)))
    profile = orbital_profile(u, v)
    print(f"   orbital integral supported on |t| <= {profile.t_max:.4f}, "
          f"evenness defect {profile.symmetry_defect():.1e}")
    lam = np.linspace(0, 20, 5)
    print("   f_0 on [0, 20]:", np.array2string(profile.channel_function(0)(lam).real, precision=5))
    g0, g1 = profile.channel_function(0), profile.channel_function(1)
    cont = ContinuedModelResolvent(g0, g1, 1.5)
    print(f"   residue at -i {cont.residue(1):.8e}")
    print(f"   (i/2pi) f_0(i) {1j * g0(1j) / (2 * math.pi):.8e}")


if __name__ == "__main__":
    main()
