import math

import numpy as np
import pytest

from lsd.errors import ConfigurationError, DataError
from lsd.experiments import (_terminal_batch, difference_trajectories,
                             domain_violation_scan, exact_cir_error_decay,
                             exact_cir_experiment, fit_order, simulate_path,
                             strong_error)
from lsd.models import CirParams
from lsd.schemes import SchemeId, make_stepper
from lsd.wiener import generate_lattice, halve_increments, path_seed

CIR_LSD1 = SchemeId("cir", "lsd1")
CIR_LSD2 = SchemeId("cir", "lsd2")


class TestSimulatePath:
    def test_empty_grid(self, cir_params):
        res = simulate_path(CIR_LSD1, cir_params, 4.0, 1.0, 0, np.empty(0))
        assert res.values.tolist() == [4.0]
        assert res.times.tolist() == [0.0]

    def test_zero_noise_wf_steady_state(self, wf_params):
        res = simulate_path(SchemeId("wf", "lsd3"), wf_params, 0.5, 1.0, 100,
                            np.zeros(100))
        assert np.all(np.abs(res.values - 0.5) <= 1e-5)

    def test_cir_lsd1_positivity_at_textbook_params(self, cir_params):
        lat = generate_lattice(path_seed(1, 0), 1.0, 10_000, 0)
        res = simulate_path(CIR_LSD1, cir_params, 4.0, 1.0, 10_000,
                            lat.increments)
        assert np.all(res.values > 0)
        assert res.values[0] == 4.0

    def test_driver_too_short(self, cir_params):
        with pytest.raises(ConfigurationError):
            simulate_path(CIR_LSD1, cir_params, 4.0, 1.0, 10, np.zeros(5))

    def test_error_carries_step_index(self, wf_params):
        # force the vanishing-denominator error mid-path
        y = 0.05
        x0 = wf_params.inverse(y)
        cot = 1.0 / math.tan(0.5 * y)
        c = (wf_params.a / y) * cot - (wf_params.b / y) * math.tan(0.5 * y)
        with pytest.raises(Exception, match="at step 0"):
            simulate_path(SchemeId("wf", "lsd2"), wf_params, x0, 1.0 / c, 1,
                          np.zeros(1))

    def test_batch_matches_single_path(self, cir_params):
        # the vectorised engine and the scalar path recursion agree bitwise
        lat = generate_lattice(path_seed(9, 0), 1.0, 64, 0)
        single = simulate_path(CIR_LSD2, cir_params, 4.0, 1.0, 64, lat.increments)
        stepper = make_stepper(CIR_LSD2, cir_params)
        batch = _terminal_batch(stepper, 4.0, 1.0 / 64, lat.increments[None, :])
        assert batch[0] == single.values[-1]


class TestFitOrder:
    def test_exact_linear(self):
        dts = np.array([0.1, 0.05, 0.025, 0.0125])
        slope, intercept = fit_order(dts, dts)
        assert slope == pytest.approx(1.0, abs=1e-12)
        assert intercept == pytest.approx(0.0, abs=1e-12)

    def test_half_order_with_prefactor(self):
        dts = np.array([0.1, 0.05, 0.025])
        slope, intercept = fit_order(dts, 3.0 * np.sqrt(dts))
        assert slope == pytest.approx(0.5, abs=1e-12)
        assert intercept == pytest.approx(math.log(3.0), abs=1e-12)

    def test_two_point_slope(self):
        slope, _ = fit_order([1e-2, 1e-3], [1e-2, 1.1e-3])
        assert slope == pytest.approx(0.95860731484177496, abs=1e-12)

    def test_synthetic_injection_recovers_unit_slope(self):
        # pretend every terminal value sits exactly dt above the reference
        dts = np.array([2.0**-k for k in range(4, 10)])
        rms = dts.copy()
        slope, _ = fit_order(dts, rms)
        assert abs(slope - 1.0) <= 1e-9

    def test_rejects_nonpositive(self):
        with pytest.raises(DataError):
            fit_order([0.1, 0.05], [0.0, 0.01])
        with pytest.raises(DataError):
            fit_order([0.1], [0.01])


class TestStrongError:
    def test_zero_error_against_self(self, cir_params):
        rep = strong_error(CIR_LSD1, CIR_LSD1, cir_params, 4.0, 1.0, [0.25],
                           0.25, M=4, seed=3)
        assert rep.rms_errors[0] == 0.0
        assert math.isnan(rep.slope)

    def test_deterministic_and_thread_invariant(self, cir_params):
        kwargs = dict(x0=4.0, T=1.0, step_sizes=[2.0**-4, 2.0**-5],
                      ref_step=2.0**-8, M=64, seed=12)
        a = strong_error(CIR_LSD2, CIR_LSD1, cir_params, **kwargs)
        b = strong_error(CIR_LSD2, CIR_LSD1, cir_params, **kwargs)
        c = strong_error(CIR_LSD2, CIR_LSD1, cir_params, **kwargs, n_jobs=4,
                         batch_size=16)
        d = strong_error(CIR_LSD2, CIR_LSD1, cir_params, **kwargs, n_jobs=1,
                         batch_size=16)
        np.testing.assert_array_equal(a.rms_errors, b.rms_errors)
        # thread count never changes a bit; batching is fixed per run
        np.testing.assert_array_equal(c.rms_errors, d.rms_errors)

    def test_non_dyadic_ladder_rejected(self, cir_params):
        with pytest.raises(ConfigurationError):
            strong_error(CIR_LSD1, CIR_LSD1, cir_params, 4.0, 1.0, [0.3],
                         0.1, M=4, seed=1)
        with pytest.raises(ConfigurationError):
            strong_error(CIR_LSD1, CIR_LSD1, cir_params, 4.0, 1.0, [0.25],
                         0.25 / 3.0, M=4, seed=1)

    def test_requires_two_paths(self, cir_params):
        with pytest.raises(ConfigurationError):
            strong_error(CIR_LSD1, CIR_LSD1, cir_params, 4.0, 1.0, [0.25],
                         0.125, M=1, seed=1)

    def test_desk_scale_order_near_one(self, cir_params):
        rep = strong_error(CIR_LSD2, CIR_LSD1, cir_params, 4.0, 1.0,
                           [2.0**-k for k in range(5, 9)], 2.0**-12, M=100,
                           seed=5)
        assert 0.7 <= rep.slope <= 1.3

    @pytest.mark.parametrize("model_case", [
        ("cir", "lsd1", "lsd2"),
        ("cev", "lsd1", "lsd2"),
        ("wf", "lsd1", "lsd2"),
        ("heston32", "lsd1", "lsd2"),
        ("ait", "lsd1", "lsd2"),
    ], ids=lambda c: c[0])
    def test_cross_variant_difference_halves(self, model_case, cir_params,
                                             cev_params, wf_params,
                                             heston_params, ait_params):
        model, va, vb = model_case
        params = {"cir": cir_params, "cev": cev_params, "wf": wf_params,
                  "heston32": heston_params, "ait": ait_params}[model]
        x0 = {"cir": 4.0, "cev": 1.0 / 16.0, "wf": 0.5, "heston32": 1.0,
              "ait": 4.0}[model]
        sa = make_stepper(SchemeId(model, va), params)
        sb = make_stepper(SchemeId(model, vb), params)
        M, T = 200, 1.0
        inc = np.stack([generate_lattice(path_seed(5, i), T, 64, 1).increments
                        for i in range(M)])
        rms = {}
        for level, halvings in ((1, 0), (0, 1)):
            inc_l = halve_increments(inc, halvings)
            dt = T / (64 << level)
            xa = _terminal_batch(sa, x0, dt, inc_l)
            xb = _terminal_batch(sb, x0, dt, inc_l)
            rms[level] = math.sqrt(float(np.mean((xa - xb) ** 2)))
        ratio = rms[0] / rms[1]
        assert 1.5 <= ratio <= 3.0


class TestDifferenceTrajectories:
    def test_identical_schemes_give_zero(self, cir_params):
        series = difference_trajectories(CIR_LSD1, CIR_LSD1, cir_params, 4.0,
                                         1.0, [1e-2], seed=2)
        assert np.all(series[0].diffs == 0.0)

    def test_model_mismatch(self, cir_params):
        with pytest.raises(ConfigurationError):
            difference_trajectories(CIR_LSD1, SchemeId("cev", "lsd1"),
                                    cir_params, 4.0, 1.0, [1e-2], seed=2)

    def test_zero_noise_gap_scales_with_dt(self, cir_params):
        # both variants discretise the same transformed flow to first order
        peaks = {}
        for dt in (1e-2, 1e-3):
            n = round(1.0 / dt)
            pa = simulate_path(CIR_LSD1, cir_params, 4.0, 1.0, n, np.zeros(n))
            pb = simulate_path(CIR_LSD2, cir_params, 4.0, 1.0, n, np.zeros(n))
            peaks[dt] = np.max(np.abs(pa.values - pb.values)) / dt
        assert max(peaks.values()) <= 2.0 * min(peaks.values())

    def test_lsd_vs_companion_stays_sane(self, cir_params):
        series = difference_trajectories(CIR_LSD1, SchemeId("cir", "sd_theta"),
                                         cir_params, 4.0, 1.0, [1e-4], seed=2)
        pa = simulate_path(
            CIR_LSD1, cir_params, 4.0, 1.0, 10_000,
            generate_lattice(path_seed(2, 0), 1.0, 10_000, 0).increments)
        assert np.max(np.abs(series[0].diffs)) < np.max(pa.values)


class TestExactCir:
    def test_identity_holds_exactly(self):
        p = CirParams(2.0, 2.0, 2.0)
        res = exact_cir_experiment(p, 4.0, 0.5, 1e-2, 1.0, seed=4,
                                   schemes=[CIR_LSD1])
        np.testing.assert_array_equal(res.x1**2 + res.x2**2, res.exact)

    def test_split_symmetry(self):
        p = CirParams(2.0, 2.0, 2.0)
        a = exact_cir_experiment(p, 4.0, 0.5, 1e-2, 1.0, seed=4, schemes=[])
        b = exact_cir_experiment(p, 4.0, 0.25, 1e-2, 1.0, seed=4, schemes=[])
        assert a.exact[0] == pytest.approx(4.0, rel=1e-15)
        assert b.exact[0] == pytest.approx(4.0, rel=1e-15)
        assert a.x1[0] != b.x1[0]

    def test_dimension_guard(self, cir_params):
        with pytest.raises(ConfigurationError):
            exact_cir_experiment(cir_params, 4.0, 0.5, 1e-2, 1.0, seed=4,
                                 schemes=[])

    def test_decay_is_deterministic(self):
        p = CirParams(2.0, 2.0, 2.0)
        kwargs = dict(x0=4.0, m_split=0.5, step_sizes=[1e-2, 5e-3], T=1.0,
                      M=16, seed=9, scheme=CIR_LSD1, batch_size=5)
        a = exact_cir_error_decay(p, **kwargs)
        b = exact_cir_error_decay(p, **kwargs, n_jobs=3)
        assert a == b


class TestScan:
    def test_lsd_clean_under_feller(self, cir_params):
        ids = [SchemeId("cir", v) for v in ("lsd1", "lsd2", "lsd3")]
        scan = domain_violation_scan(ids, cir_params, [1e-2], 1.0, 20, seed=6,
                                     x0=4.0)
        for s in ids:
            counters = scan[str(s)][1e-2]
            assert counters.negative_states == 0
            assert counters.non_real_events == 0
            assert counters.clamp_events == 0

    def test_thread_invariance(self):
        p = CirParams(1.0, 2.0, 10.0)
        ids = [SchemeId("cir", "alf")]
        a = domain_violation_scan(ids, p, [1e-2], 1.0, 30, seed=6, x0=4.0)
        b = domain_violation_scan(ids, p, [1e-2], 1.0, 30, seed=6, x0=4.0,
                                  n_jobs=4, batch_size=7)
        assert a[str(ids[0])][1e-2] == b[str(ids[0])][1e-2]
