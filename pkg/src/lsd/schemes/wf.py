"""One-step maps for the Wright-Fisher model.

The transformed state y = 2 arcsin(sqrt(x)) lives in (0, pi) with drift
a cot(y/2) - b tan(y/2) and diffusion k3.  Updates that can land outside
(0, pi) are folded back through y -> 2 arcsin(|sin(y/2)|), which leaves the
original-space value sin^2(y/2) untouched; the fold is counted as a clamp.
"""

import numpy as np

from ..closedform import wf_cosine_solution
from ..errors import ConfigurationError, StepSizeError
from ..rootfind import MonotoneSpec, invert_monotone

_DENOMINATOR_TOL = 1e-12


def _fold(y_raw):
    """Map an arbitrary real angle to its representative in (0, pi)."""
    raw = np.asarray(y_raw, float)
    inside = (raw > 0.0) & (raw < np.pi)
    if np.all(inside):
        if raw.ndim == 0:
            return float(raw), False
        return y_raw, np.zeros(raw.shape, dtype=bool)
    folded = 2.0 * np.arcsin(np.abs(np.sin(0.5 * raw)))
    out = np.where(inside, raw, folded)
    if raw.ndim == 0:
        return float(out), True
    return out, ~inside


def lsd1_step(p, y, dw, dt):
    """Cosine-decay variant; returns (y', clamp_mask)."""
    denom = 1.0 + (p.b / y) * np.tan(0.5 * y) * dt
    phi = (p.k3 * dw + y) / denom
    decay = wf_cosine_solution(phi, p.a / denom, dt)
    clipped = np.minimum(decay, 1.0)
    clamped = decay > 1.0
    y_new = 2.0 * np.arccos(clipped)
    if np.ndim(y) == 0:
        return float(y_new), bool(clamped)
    return y_new, clamped


def lsd2_step(p, y, dw, dt):
    """Fully frozen-ratio variant; denominator can vanish for large dt."""
    cot = 1.0 / np.tan(0.5 * y)
    denom = 1.0 - (p.a / y) * cot * dt + (p.b / y) * np.tan(0.5 * y) * dt
    if np.any(np.abs(denom) < _DENOMINATOR_TOL):
        raise StepSizeError(
            "update denominator vanished; decrease the step size")
    return _fold((p.k3 * dw + y) / denom)


def lsd3_step(p, y, dw, dt):
    cot = 1.0 / np.tan(0.5 * y)
    num = p.k3 * dw + y + p.a * cot * dt
    denom = 1.0 + (p.b / y) * np.tan(0.5 * y) * dt
    return _fold(num / denom)


def lsd4_step(p, y, dw, dt):
    cot = 1.0 / np.tan(0.5 * y)
    phi = p.k3 * dw + y - dt / y + (p.a * cot - p.b * np.tan(0.5 * y)) * dt
    root = (phi + np.sqrt(phi * phi + 4.0 * dt)) / 2.0
    return _fold(root)


def _clip_unit(value):
    clipped = np.clip(value, 0.0, 1.0)
    clamped = (value < 0.0) | (value > 1.0)
    if np.ndim(value) == 0:
        return float(clipped), bool(clamped)
    return clipped, clamped


def sd_step(p, x, dw, dt):
    """Semi-discrete step in the original coordinate; clamps the arcsin root."""
    inner = x + (p.a + p.beta * x) * dt
    inner, clamped = _clip_unit(inner)
    out = np.sin(0.5 * p.k3 * dw + np.arcsin(np.sqrt(inner))) ** 2
    return out, clamped


def sd_alt_step(p, x, dw, dt):
    """Alternative semi-discrete step with the prestabilised inner value."""
    inner = (x * (1.0 + p.beta * dt) + p.a * dt) / (1.0 + (p.a + p.beta) * dt)
    inner, clamped = _clip_unit(inner)
    out = np.sin(0.5 * p.k3 * dw + np.arcsin(np.sqrt(inner))) ** 2
    return out, clamped


def biss_step(p, x, dw, dt):
    """Balance implicit split step; result clipped to [0, 1] if it escapes."""
    k1, k2, k3 = p.k1, p.k2, p.k3
    eps = min(k1 * dt, (k2 - k1) * dt, 1.0 - k1 * dt, 1.0 - (k2 - k1) * dt)
    if eps <= 0.0:
        raise StepSizeError("balance control width collapsed; decrease the step size")
    xa = np.asarray(x, float)
    low = np.clip(xa, eps, None)
    high = np.clip(xa, None, 1.0 - eps)
    d1 = np.where(xa < 0.5,
                  k3 * np.sqrt((1.0 - low) / low),
                  k3 * np.sqrt(high / (1.0 - high)))
    noise = k3 * np.sqrt(np.clip(xa * (1.0 - xa), 0.0, None)) * dw
    out = xa + (k1 - k2 * xa) * dt + noise / (1.0 + d1 * np.abs(dw)) * (1.0 - k2 * dt)
    return _clip_unit(out if out.ndim else float(out))


def check_hyb_admissible(p):
    ratio = p.k1 / p.k2
    lo = p.k3**2 / (4.0 * p.k2)
    if not lo < ratio < 1.0 - lo:
        raise ConfigurationError(
            f"splitting scheme needs k1/k2 in ({lo}, {1.0 - lo}), got {ratio}")


def hyb_step(p, x, dw, dt):
    """Splitting scheme: exact linear flow composed with the rotated noise."""
    growth = np.exp(p.beta * dt)
    rotated = np.sin(0.5 * p.k3 * dw + np.arcsin(np.sqrt(x))) ** 2
    return (p.a / p.beta) * (growth - 1.0) + growth * rotated


def implicit_map(p, dt, sign_mode="printed"):
    """Drift-implicit map on (0, pi).

    ``printed`` subtracts both trigonometric drift terms; ``corrected`` adds
    the tangent term back, which is the form consistent with the transformed
    drift a cot - b tan (and the one that is globally monotone).
    """
    tan_sign = -1.0 if sign_mode == "printed" else 1.0

    def g(y):
        return (y - p.a / np.tan(0.5 * y) * dt
                + tan_sign * p.b * np.tan(0.5 * y) * dt)

    return g


def implicit_step(p, y, dw, dt, sign_mode="printed", tol=1e-13):
    target = y + p.k3 * dw
    spec = MonotoneSpec(implicit_map(p, dt, sign_mode), lo=0.0, hi=np.pi,
                        increasing=True)
    return invert_monotone(spec, target, tol=tol, seed=y)
