"""Scalar inversion of monotone maps for the drift-implicit schemes."""

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import InversionError, NumericError

_MAX_EXPANSIONS = 60


@dataclass
class MonotoneSpec:
    """A strictly monotone function on an open interval.

    ``lo``/``hi`` may be 0 and +inf.  ``increasing`` gives the direction used
    to decide which way to expand when hunting for a bracket.  Monotonicity is
    the caller's promise; enable ``check_monotone`` to sample-check it.
    """

    fn: Callable[[float], float]
    lo: float = 0.0
    hi: float = math.inf
    increasing: bool = True
    check_monotone: bool = False

    def sample_check(self, n: int = 64) -> bool:
        lo = self.lo if math.isfinite(self.lo) else 1e-8
        hi = self.hi if math.isfinite(self.hi) else 1e8
        xs = [lo + (hi - lo) * (i + 0.5) / n for i in range(n)]
        vals = [self.fn(x) for x in xs]
        pairs = zip(vals, vals[1:])
        if self.increasing:
            return all(u < v for u, v in pairs)
        return all(u > v for u, v in pairs)


def _toward(endpoint: float, x: float) -> float:
    """Next probe when expanding from x toward an interval endpoint."""
    if math.isinf(endpoint):
        return x * 2.0 if x > 0 else (x * 2.0 if x < 0 else 1.0)
    if endpoint == 0.0:
        return x / 2.0
    return endpoint + (x - endpoint) / 2.0


def invert_monotone(spec: MonotoneSpec, u: float, tol: float = 1e-12,
                    max_iter: int = 100, seed: Optional[float] = None) -> float:
    """Solve fn(x) = u on (lo, hi) to residual tol * max(1, |u|).

    A bracket is found by geometric expansion from an interior seed (the
    previous state, when the caller has one), then tightened by a secant step
    safeguarded with bisection.  Raises InversionError when no bracket appears
    within 60 expansions or the residual target is not met in ``max_iter``
    iterations, and NumericError if fn returns NaN.
    """
    if spec.check_monotone and not spec.sample_check():
        raise NumericError("function is not monotone on the given interval")

    target = tol * max(1.0, abs(u))

    def h(x: float) -> float:
        val = spec.fn(x)
        if math.isnan(val):
            raise NumericError(f"non-finite function value at x={x!r}")
        return val - u

    if seed is None or not spec.lo < seed < spec.hi:
        if math.isinf(spec.hi):
            seed = max(1.0, 2.0 * spec.lo)
        else:
            seed = 0.5 * (spec.lo + spec.hi)

    seed_h = h(seed)
    if abs(seed_h) <= target:
        return seed

    def hunt(endpoint):
        """Expand from the seed toward one endpoint until the sign flips."""
        x0, h0 = seed, seed_h
        for _ in range(_MAX_EXPANSIONS):
            x1 = _toward(endpoint, x0)
            h1 = h(x1)
            if (h0 < 0) != (h1 < 0):
                if x0 < x1:
                    return (x0, h0), (x1, h1)
                return (x1, h1), (x0, h0)
            x0, h0 = x1, h1
        return None

    # Root lies toward hi iff the function still needs to grow there; for a
    # map that is only locally monotone the first direction can be wrong, so
    # fall back to the other endpoint before giving up.
    go_up = (seed_h < 0) == spec.increasing
    first, second = (spec.hi, spec.lo) if go_up else (spec.lo, spec.hi)
    bracket = hunt(first) or hunt(second)
    if bracket is None:
        raise InversionError(
            f"no sign change within {_MAX_EXPANSIONS} expansions from {seed}",
            bracket=(spec.lo, spec.hi))
    (lo_x, lo_h), (hi_x, hi_h) = bracket

    best_x, best_h = (lo_x, lo_h) if abs(lo_h) < abs(hi_h) else (hi_x, hi_h)
    for _ in range(max_iter):
        if hi_h != lo_h:
            x = hi_x - hi_h * (hi_x - lo_x) / (hi_h - lo_h)
        else:
            x = 0.5 * (lo_x + hi_x)
        if not lo_x < x < hi_x:
            x = 0.5 * (lo_x + hi_x)
        hx = h(x)
        if abs(hx) < abs(best_h):
            best_x, best_h = x, hx
        if abs(hx) <= target:
            return x
        if (hx < 0) == (lo_h < 0):
            lo_x, lo_h = x, hx
        else:
            hi_x, hi_h = x, hx
        if hi_x - lo_x <= math.ulp(max(abs(lo_x), abs(hi_x))):
            break

    if abs(best_h) <= target:
        return best_x
    raise InversionError(
        f"residual {best_h!r} above tolerance after {max_iter} iterations",
        bracket=(lo_x, hi_x))
