"""Path simulation, coupled strong-error estimation, and scan experiments.

All Monte-Carlo machinery here is deterministic given (seed, configuration):
each path owns a seed stream derived from the master seed and its index, and
reductions happen in path-index order, so thread count and scheduling never
change a single output bit.

Simulations at several step sizes share one Brownian path per path index via
dyadic coarsening of a finest-level increment lattice, which is what turns
terminal differences into pathwise strong-error estimates.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DataError
from .models import ModelParams
from .schemes import SchemeId, make_stepper
from .wiener import (cir_effective_increment, generate_lattice,
                     halve_increments, path_seed)

_DEFAULT_BATCH = 256


@dataclass
class PathResult:
    """One trajectory in the original coordinate plus event counters."""

    times: np.ndarray
    values: np.ndarray
    non_real_count: int = 0
    clamp_count: int = 0


@dataclass
class ErrorReport:
    """Strong errors on a step-size ladder with the fitted log-log line."""

    step_sizes: np.ndarray
    rms_errors: np.ndarray
    stderrs: np.ndarray
    slope: float
    intercept: float
    sample_count: int
    reference: SchemeId
    ref_step: float


@dataclass
class ScanCounters:
    negative_states: int = 0
    non_real_events: int = 0
    clamp_events: int = 0

    def as_dict(self) -> Dict[str, int]:
        return {"negative_states": self.negative_states,
                "non_real_events": self.non_real_events,
                "clamp_events": self.clamp_events}


@dataclass
class ExactCirPaths:
    """The squared-OU reference path and scheme paths on a shared grid."""

    times: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    exact: np.ndarray
    effective_increments: np.ndarray
    schemes: Dict[str, np.ndarray] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# grid / ladder helpers
# ---------------------------------------------------------------------------

def _steps_for(T: float, dt: float) -> int:
    n = round(T / dt)
    if n < 1 or abs(n * dt - T) > 1e-9 * T:
        raise ConfigurationError(f"step {dt} does not divide the horizon {T}")
    return n


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _dyadic_plan(T: float, step_sizes: Sequence[float], ref_step: float):
    """Base step count, finest level, and per-dt level for one shared lattice."""
    n_ref = _steps_for(T, ref_step)
    n_of = {}
    for dt in step_sizes:
        n = _steps_for(T, dt)
        if n_ref % n != 0 or not _is_pow2(n_ref // n):
            raise ConfigurationError(
                f"step {dt} is not a dyadic multiple of the reference step {ref_step}")
        n_of[dt] = n
    base = min(n_of.values())
    if n_ref % base != 0 or not _is_pow2(n_ref // base):
        raise ConfigurationError("step ladder is not dyadic")
    levels = (n_ref // base).bit_length() - 1
    level_of = {}
    for dt, n in n_of.items():
        if n % base != 0 or not _is_pow2(n // base):
            raise ConfigurationError(
                f"step ladder is not dyadic: {dt} vs coarsest {T / base}")
        level_of[dt] = (n // base).bit_length() - 1
    return base, levels, level_of


def _batches(n_items: int, batch_size: int) -> List[range]:
    return [range(s, min(s + batch_size, n_items))
            for s in range(0, n_items, batch_size)]


def _map_batches(task, n_items: int, batch_size: int, n_jobs: int) -> list:
    """Run `task(range)` per batch; results come back in batch order."""
    chunks = _batches(n_items, batch_size)
    if n_jobs <= 1 or len(chunks) == 1:
        return [task(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        futures = [pool.submit(task, c) for c in chunks]
        return [f.result() for f in futures]


def _batch_increments(master_seed, indices, T, base, levels, drivers=1):
    rows = [generate_lattice(path_seed(master_seed, i), T, base, levels,
                             drivers=drivers).increments
            for i in indices]
    return np.stack(rows)


# ---------------------------------------------------------------------------
# core iteration
# ---------------------------------------------------------------------------

def _count(mask) -> int:
    if mask is None:
        return 0
    return int(np.count_nonzero(mask))


def _terminal_batch(stepper, x0, dt, increments, counters: Optional[ScanCounters] = None):
    """Advance a batch to the horizon; increments is (B, n) or (B, 2, n)."""
    n = increments.shape[-1]
    state = stepper.init(x0, size=increments.shape[0])
    two = stepper.drivers == 2
    for j in range(n):
        dw = (increments[:, 0, j], increments[:, 1, j]) if two else increments[:, j]
        state, events = stepper.step(state, dw, dt)
        if counters is not None:
            counters.non_real_events += _count(events.non_real)
            counters.clamp_events += _count(events.clamped)
            counters.negative_states += _count(stepper.x_of(state) < 0)
    return stepper.x_of(state)


def simulate_path(scheme: SchemeId, params: ModelParams, x0: float, T: float,
                  n: int, driver, theta: float = 1.0,
                  wf_implicit_sign: str = "printed",
                  m_split: float = 0.5) -> PathResult:
    """Run one trajectory on the uniform grid (T, n) from given increments.

    LSD schemes iterate in the transformed coordinate starting from the
    forward transform of ``x0`` and record the inverse transform after every
    step.  Errors raised by a step carry the step index.
    """
    if n < 0:
        raise ConfigurationError(f"step count must be >= 0, got {n}")
    stepper = make_stepper(scheme, params, theta=theta,
                           wf_implicit_sign=wf_implicit_sign, m_split=m_split)
    driver = np.asarray(driver, dtype=float)
    if stepper.drivers == 2:
        if driver.ndim != 2 or driver.shape[0] != 2 or driver.shape[1] < n:
            raise ConfigurationError(
                f"scheme {scheme} needs a (2, >= {n}) driver, got {driver.shape}")
    elif driver.ndim != 1 or driver.shape[0] < n:
        raise ConfigurationError(
            f"driver must provide at least {n} increments, got {driver.shape}")
    dt = T / n if n else 0.0
    times = np.linspace(0.0, T, n + 1)
    values = np.empty(n + 1)
    values[0] = x0
    state = stepper.init(x0)
    non_real = clamped = 0
    for j in range(n):
        dw = (driver[0, j], driver[1, j]) if stepper.drivers == 2 else driver[j]
        try:
            state, events = stepper.step(state, dw, dt)
        except Exception as exc:
            raise type(exc)(f"at step {j}: {exc}") from exc
        non_real += _count(events.non_real)
        clamped += _count(events.clamped)
        values[j + 1] = stepper.x_of(state)
    return PathResult(times=times, values=values,
                      non_real_count=non_real, clamp_count=clamped)


# ---------------------------------------------------------------------------
# strong error and order fitting
# ---------------------------------------------------------------------------

def fit_order(step_sizes, errors):
    """Ordinary least squares of log error against log step size."""
    dts = np.asarray(step_sizes, dtype=float)
    errs = np.asarray(errors, dtype=float)
    if dts.size != errs.size or dts.size < 2:
        raise DataError("need at least two (dt, err) points")
    if np.any(dts <= 0) or np.any(errs <= 0):
        raise DataError("order fit needs strictly positive step sizes and errors")
    x = np.log(dts)
    y = np.log(errs)
    xc = x - x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    intercept = float(y.mean() - slope * x.mean())
    return slope, intercept


def strong_error(scheme: SchemeId, reference: SchemeId, params: ModelParams,
                 x0: float, T: float, step_sizes: Sequence[float],
                 ref_step: float, M: int, seed: int, theta: float = 1.0,
                 wf_implicit_sign: str = "printed", n_jobs: int = 1,
                 batch_size: int = _DEFAULT_BATCH) -> ErrorReport:
    """Root-mean-square terminal distance to a fine-step reference solution.

    All runs for one path index are driven by coarsenings of that path's
    lattice, so the difference at the horizon is a pathwise coupling error.
    """
    if M < 2:
        raise ConfigurationError(f"need at least 2 paths, got {M}")
    if scheme.model != reference.model:
        raise ConfigurationError(
            f"scheme {scheme} and reference {reference} use different models")
    dts = sorted(set(float(d) for d in step_sizes), reverse=True)
    base, levels, level_of = _dyadic_plan(T, dts, ref_step)
    stepper_kw = dict(theta=theta, wf_implicit_sign=wf_implicit_sign)
    run = make_stepper(scheme, params, **stepper_kw)
    ref = make_stepper(reference, params, **stepper_kw)
    if run.drivers != 1 or ref.drivers != 1:
        raise ConfigurationError("strong_error supports single-driver schemes")

    def task(indices):
        inc = _batch_increments(seed, indices, T, base, levels)
        x_ref = _terminal_batch(ref, x0, ref_step, inc)
        out = {}
        for dt in dts:
            inc_dt = halve_increments(inc, levels - level_of[dt])
            x_dt = _terminal_batch(run, x0, dt, inc_dt)
            diff_sq = (x_dt - x_ref) ** 2
            out[dt] = (float(np.sum(diff_sq)), float(np.sum(diff_sq**2)))
        return out

    partials = _map_batches(task, M, batch_size, n_jobs)
    rms, stderr = [], []
    for dt in dts:
        sum2 = sum(p[dt][0] for p in partials)
        sum4 = sum(p[dt][1] for p in partials)
        mean_e = sum2 / M
        r = math.sqrt(mean_e)
        var_e = max(0.0, (sum4 - sum2 * sum2 / M) / (M - 1))
        se = math.sqrt(var_e / M) / (2.0 * r) if r > 0 else 0.0
        rms.append(r)
        stderr.append(se)
    rms_arr = np.array(rms)
    positive = rms_arr > 0
    if np.count_nonzero(positive) >= 2:
        slope, intercept = fit_order(np.array(dts)[positive], rms_arr[positive])
    else:
        slope = intercept = float("nan")
    return ErrorReport(step_sizes=np.array(dts), rms_errors=rms_arr,
                       stderrs=np.array(stderr), slope=slope,
                       intercept=intercept, sample_count=M,
                       reference=reference, ref_step=ref_step)


# ---------------------------------------------------------------------------
# difference trajectories
# ---------------------------------------------------------------------------

@dataclass
class DifferenceSeries:
    dt: float
    times: np.ndarray
    diffs: np.ndarray


def difference_trajectories(scheme_a: SchemeId, scheme_b: SchemeId,
                            params: ModelParams, x0: float, T: float,
                            step_sizes: Sequence[float], seed: int,
                            theta: float = 1.0,
                            wf_implicit_sign: str = "printed",
                            ) -> List[DifferenceSeries]:
    """Pointwise difference of two schemes driven by one path per step size."""
    if scheme_a.model != scheme_b.model:
        raise ConfigurationError(
            f"schemes {scheme_a} and {scheme_b} use different models")
    series = []
    for k, dt in enumerate(step_sizes):
        n = _steps_for(T, dt)
        lattice = generate_lattice(path_seed(seed, k), T, n, 0)
        kwargs = dict(theta=theta, wf_implicit_sign=wf_implicit_sign)
        pa = simulate_path(scheme_a, params, x0, T, n, lattice.increments, **kwargs)
        pb = simulate_path(scheme_b, params, x0, T, n, lattice.increments, **kwargs)
        series.append(DifferenceSeries(dt=dt, times=pa.times,
                                       diffs=pa.values - pb.values))
    return series


# ---------------------------------------------------------------------------
# squared-OU reference experiment
# ---------------------------------------------------------------------------

def _exact_ou_paths(params, x0, m_split, dt, increments):
    """Vectorised squared-OU recursion; increments is (..., 2, n).

    Returns (x1, x2, x, dw_eff) trajectories with the leading batch shape of
    ``increments`` preserved; trajectory arrays have n+1 (n for dw_eff) along
    the last axis.
    """
    from .schemes import ExactOuStepper

    stepper = ExactOuStepper(params, m_split=m_split)
    n = increments.shape[-1]
    batch = increments.shape[:-2]
    x1 = np.empty(batch + (n + 1,))
    x2 = np.empty(batch + (n + 1,))
    dw_eff = np.empty(batch + (n,))
    state = stepper.init(x0, size=batch if batch else None)
    x1[..., 0], x2[..., 0] = state
    for j in range(n):
        dw1 = increments[..., 0, j]
        dw2 = increments[..., 1, j]
        dw_eff[..., j] = cir_effective_increment(x1[..., j], x2[..., j], dw1, dw2)
        state, _ = stepper.step(state, (dw1, dw2), dt)
        x1[..., j + 1], x2[..., j + 1] = state
    x = x1 * x1 + x2 * x2
    return x1, x2, x, dw_eff


def exact_cir_experiment(params: ModelParams, x0: float, m_split: float,
                         dt: float, T: float, seed: int,
                         schemes: Sequence[SchemeId], theta: float = 1.0,
                         ) -> ExactCirPaths:
    """One coupled run of the squared-OU construction against listed schemes.

    Every scheme is driven by the effective increments reconstructed from the
    two OU components at the left endpoint of each step, so all paths live on
    the same probability-space realisation.
    """
    for s in schemes:
        if s.model != "cir" or s.variant == "exact_ou":
            raise ConfigurationError(
                f"only one-driver square-root-model schemes can ride the "
                f"reconstructed increments, got {s}")
    n = _steps_for(T, dt)
    lattice = generate_lattice(path_seed(seed, 0), T, n, 0, drivers=2)
    x1, x2, x, dw_eff = _exact_ou_paths(params, x0, m_split, dt,
                                        lattice.increments[np.newaxis, ...])
    result = ExactCirPaths(times=np.linspace(0.0, T, n + 1), x1=x1[0],
                           x2=x2[0], exact=x[0], effective_increments=dw_eff[0])
    for s in schemes:
        path = simulate_path(s, params, x0, T, n, dw_eff[0], theta=theta)
        result.schemes[s.variant] = path.values
    return result


def exact_cir_error_decay(params: ModelParams, x0: float, m_split: float,
                          step_sizes: Sequence[float], T: float, M: int,
                          seed: int, scheme: SchemeId, theta: float = 1.0,
                          n_jobs: int = 1,
                          batch_size: int = _DEFAULT_BATCH) -> Dict[float, float]:
    """Mean terminal distance between a scheme and the squared-OU path per dt.

    Step sizes must form a dyadic family; each path's two-driver lattice is
    generated at the finest step and coarsened, so refinements stay coupled.
    """
    dts = sorted(set(float(d) for d in step_sizes), reverse=True)
    ref_step = dts[-1]
    base, levels, level_of = _dyadic_plan(T, dts, ref_step)
    stepper = make_stepper(scheme, params, theta=theta)
    if stepper.drivers != 1:
        raise ConfigurationError("decay experiment needs a one-driver scheme")

    def task(indices):
        inc = _batch_increments(seed, indices, T, base, levels, drivers=2)
        out = {}
        for dt in dts:
            inc_dt = halve_increments(inc, levels - level_of[dt])
            _, _, x, dw_eff = _exact_ou_paths(params, x0, m_split, dt, inc_dt)
            x_scheme = _terminal_batch(stepper, x0, dt, dw_eff)
            out[dt] = float(np.sum(np.abs(x_scheme - x[..., -1])))
        return out

    partials = _map_batches(task, M, batch_size, n_jobs)
    return {dt: sum(p[dt] for p in partials) / M for dt in dts}


# ---------------------------------------------------------------------------
# domain-violation scan
# ---------------------------------------------------------------------------

def domain_violation_scan(schemes: Sequence[SchemeId], params: ModelParams,
                          step_sizes: Sequence[float], T: float, M: int,
                          seed: int, x0: float = 4.0, theta: float = 1.0,
                          wf_implicit_sign: str = "printed", n_jobs: int = 1,
                          batch_size: int = _DEFAULT_BATCH,
                          ) -> Dict[str, Dict[float, ScanCounters]]:
    """Tally negative, non-real, and clamped states per scheme and step size.

    The same Brownian paths drive every scheme at a given step size, so the
    counters compare schemes like-for-like.
    """
    results: Dict[str, Dict[float, ScanCounters]] = {str(s): {} for s in schemes}
    for k, dt in enumerate(step_sizes):
        n = _steps_for(T, dt)
        dt_seed = path_seed(seed, k)
        steppers = {str(s): make_stepper(s, params, theta=theta,
                                         wf_implicit_sign=wf_implicit_sign)
                    for s in schemes}
        if any(st.drivers != 1 for st in steppers.values()):
            raise ConfigurationError("scan supports single-driver schemes only")

        def task(indices, _n=n, _dt=dt, _dt_seed=dt_seed, _steppers=steppers):
            inc = _batch_increments(_dt_seed, indices, T, _n, 0)
            out = {}
            for name, st in _steppers.items():
                counters = ScanCounters()
                _terminal_batch(st, x0, _dt, inc, counters=counters)
                out[name] = counters
            return out

        partials = _map_batches(task, M, batch_size, n_jobs)
        for name in results:
            total = ScanCounters()
            for p in partials:
                total.negative_states += p[name].negative_states
                total.non_real_events += p[name].non_real_events
                total.clamp_events += p[name].clamp_events
            results[name][dt] = total
    return results
