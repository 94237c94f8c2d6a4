#!/usr/bin/env python3
"""Accuracy of the plain grid sum for bump-profile moments.

Measures how fast the midpoint sum over a uniform grid converges to the
continuum integral of the bump, as a function of support radius in cells
(R/dx), including worst-case sub-cell offsets of the center.  This fixes the
resolutions at which normalization checks can demand 1e-8 agreement and
justifies the per-deposit normalization factor staying within ~1e-6 of one.

Run:  python3 bump_grid_accuracy.py
"""

import numpy as np
import mpmath as mp

mp.mp.dps = 30
I0 = float(mp.quad(lambda s: s**2 * mp.exp(-1 / (1 - s**2)), [0, 1]))
CONTINUUM = 4 * np.pi * I0  # integral of exp(-1/(1-s^2)) over the unit ball


def grid_sum(r_over_dx, shift):
    """Sum of the unit-radius bump over a grid with spacing 1/r_over_dx."""
    dx = 1.0 / r_over_dx
    m = int(np.ceil(r_over_dx)) + 2
    axis = (np.arange(-m, m + 1))
    x = (axis[:, None, None] + shift[0]) * dx
    y = (axis[None, :, None] + shift[1]) * dx
    z = (axis[None, None, :] + shift[2]) * dx
    r2 = x * x + y * y + z * z
    inside = r2 < 1.0
    vals = np.zeros_like(r2)
    vals[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return vals.sum() * dx**3


if __name__ == "__main__":
    rng = np.random.default_rng(12345)
    shifts = [np.zeros(3)] + [rng.uniform(0, 1, 3) for _ in range(4)]
    print(f"{'R/dx':>6}  {'worst |rel err|':>16}")
    for r_over_dx in [2.0, 2.4, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0, 10.0]:
        worst = max(abs(grid_sum(r_over_dx, s) / CONTINUUM - 1.0) for s in shifts)
        print(f"{r_over_dx:6.1f}  {worst:16.3e}")
