"""One-step maps for the Heston 3/2 volatility model.

The transformed state y = (2/k3) x**(-1/2) has drift (2 k2/k3^2 + 3)/y
- (k1/2) y and unit diffusion; the dt coefficient inside the squared updates
is c_star = 4 k2/k3^2 + 6.  The drift-implicit competitor runs in the unscaled
inverse-root coordinate v = x**(-1/2), for which its map has a closed-form
positive root, and reports x = v**(-2).
"""

import numpy as np

from ..closedform import bernoulli_power


def lsd1_step(p, y, dw, dt):
    A = dw + (1.0 - 0.5 * p.k1 * dt) * y
    return np.sqrt(bernoulli_power(A, 0.5 * p.c_star, 0.0, 1.0, dt))


def lsd2_step(p, y, dw, dt):
    return np.sqrt(bernoulli_power(dw + y, 0.5 * p.c_star, -0.5 * p.k1, 1.0, dt))


def sd_exp_step(p, x, dw, dt):
    """Exponential semi-discrete step; positive by construction."""
    exponent = (p.k1 - p.k2 * x - 0.5 * p.k3**2 * x) * dt + p.k3 * np.sqrt(x) * dw
    return x * np.exp(exponent)


def implicit_map(p, dt):
    """G(v) = (1 + k1 dt/2) v - c_impl dt / v on (0, inf)."""

    def g(v):
        return (1.0 + 0.5 * p.k1 * dt) * v - p.c_impl * dt / v

    return g


def implicit_step(p, v, dw, dt):
    """Advance v = x**(-1/2) through the closed-form inverse of G."""
    u = v - 0.5 * p.k3 * dw
    c1 = 1.0 + 0.5 * p.k1 * dt
    return (u + np.sqrt(u * u + 4.0 * c1 * p.c_impl * dt)) / (2.0 * c1)
