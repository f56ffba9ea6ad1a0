"""Linear dispersion relation of two counter-streaming Maxwellian beams.

The electrostatic dielectric function of beams with drifts v_s, thermal speed
vt and plasma frequencies w_ps is

    eps(k, w) = 1 - sum_s  w_ps^2 / (2 k^2 vt^2) Z'(zeta_s),
    zeta_s = (w - k v_s) / (sqrt(2) k vt),

with Z the plasma dispersion function, Z(z) = i sqrt(pi) w(z) (Faddeeva).
For symmetric beams the unstable root is purely growing, w = i gamma.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import brentq
from scipy.special import wofz


def plasma_z(z):
    return 1j * np.sqrt(np.pi) * wofz(z)


def plasma_z_prime(z):
    return -2.0 * (1.0 + z * plasma_z(z))


def dielectric(k, omega, v0, vt=1.0, wp2=1.0):
    """eps(k, omega) for beams at +-v0, each carrying half of wp2."""
    total = 1.0 + 0j
    for vs in (v0, -v0):
        zeta = (omega - k * vs) / (np.sqrt(2.0) * k * vt)
        total -= 0.5 * wp2 / (2 * k**2 * vt**2) * plasma_z_prime(zeta)
    return total


def two_stream_growth_rate(k, v0, vt=1.0, wp2=1.0, gamma_max=None):
    """Growth rate of the purely growing mode; 0 when the mode is stable."""
    if k <= 0 or vt <= 0:
        raise ValueError("k and vt must be positive")
    if gamma_max is None:
        gamma_max = 2.0 * np.sqrt(wp2) + k * v0

    def real_eps(g):
        return dielectric(k, 1j * g, v0, vt, wp2).real

    # eps -> 1 as gamma grows; a sign change below marks the unstable root
    lo = 1e-10
    if real_eps(lo) >= 0:
        return 0.0
    return brentq(real_eps, lo, gamma_max, xtol=1e-14, rtol=1e-13)
