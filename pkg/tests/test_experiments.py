import math

import numpy as np
import pytest

from resolab import (
    CriticalDampingConfig,
    CriticalGevreyConfig,
    EigenvalueSequence,
    InvalidInputError,
    SpeedClassParams,
    blowup_time,
    empty_interior_probe,
    log_psi_damping,
    log_psi_gevrey,
    nonactivator_test,
    run_damping_critical,
    run_gevrey_critical,
)
from resolab.activator import SmoothBaseSpeed, build_activator
from resolab.experiments import data_log_terms


def damping_class(delta):
    return SpeedClassParams(1.0, 4.0, 0.5, 8.0, damping=delta, damping_power=0.25)


class TestBlowupTime:
    def test_reference_value(self, ref_class):
        t0 = blowup_time(ref_class, 1.0)
        assert t0 == pytest.approx(32 * 4.0**0.75 / 8.0, rel=1e-15)
        assert t0 == pytest.approx(11.3137085, abs=1e-7)

    def test_cancellation_case(self):
        p = SpeedClassParams(0.5, 1.0, 0.37, 32.0)
        assert blowup_time(p, 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_linear_in_radius(self, ref_class):
        assert blowup_time(ref_class, 2.0) == pytest.approx(2 * blowup_time(ref_class, 1.0), rel=1e-15)
        with pytest.raises(InvalidInputError):
            blowup_time(ref_class, 0.0)


class TestPsiFormulas:
    def test_gevrey_reference_points(self, ref_class):
        # direct-substitution oracle at lam = 2^20
        t0 = blowup_time(ref_class, 1.0)
        lam = 2.0**20
        rate = 0.17677669529663687
        for factor in (1.2, 0.8):
            t = factor * t0
            oracle = (
                -2 * math.log(lam)
                - 2 * math.sqrt(lam)
                + rate * math.sqrt(lam) * t
                - 2 * math.sqrt(lam) / math.log(2 + lam)
            )
            assert log_psi_gevrey(ref_class, 1.0, lam, t) == pytest.approx(oracle, rel=1e-12)
        assert log_psi_gevrey(ref_class, 1.0, lam, 1.2 * t0) == pytest.approx(234.1422, abs=1e-3)
        assert log_psi_gevrey(ref_class, 1.0, lam, 0.8 * t0) == pytest.approx(-585.0578, abs=1e-3)

    def test_monotone_split_around_blowup_time(self, ref_class):
        t0 = blowup_time(ref_class, 1.0)
        lams = 2.0 ** np.arange(21)
        up = np.asarray(log_psi_gevrey(ref_class, 1.0, lams, 1.1 * t0))
        down = np.asarray(log_psi_gevrey(ref_class, 1.0, lams, 0.9 * t0))
        d_up = np.diff(up)
        turn = next((i for i in range(len(d_up)) if np.all(d_up[i:] > 0)), None)
        assert turn is not None and up[-1] > 0  # eventually increasing, unbounded
        assert np.all(np.diff(down)[-7:] < 0) and down[-1] < -100

    def test_damping_reference_point(self):
        # lam = 2^20, delta = 0.04, t = 1: the three pieces sum to -224.09
        value = log_psi_damping(damping_class(0.04), 2.0**20, 1.0)
        lam = 2.0**20
        oracle = (
            -2 * math.log(lam)
            - 4 * math.sqrt(lam) / math.log(2 + lam)
            + (0.17677669529663687 - 0.08) * math.sqrt(lam)
        )
        assert value == pytest.approx(oracle, rel=1e-12)
        assert value == pytest.approx(-224.090455, abs=1e-4)

    def test_damping_split_by_threshold(self):
        # below threshold the tail eventually rises without bound; above it
        # the whole sequence sinks; both sides need frequencies high enough
        # that the tempered weight has stopped dominating
        lams = 1e70 * 2.0 ** np.arange(31)
        for t in (0.25, 1.0, 4.0):
            below = np.asarray(log_psi_damping(damping_class(0.04), lams, t))
            above = np.asarray(log_psi_damping(damping_class(0.12), lams, t))
            assert np.all(np.diff(below)[-10:] > 0) and below[-1] > 50
            assert np.all(np.diff(above)[-10:] < 0) and above[-1] < -50

    def test_data_series_terms_are_exactly_squared_eigenvalue_decay(self):
        lams = np.array([2.0, 4.0, 1e70])
        np.testing.assert_allclose(data_log_terms(lams), -2 * np.log(lams), rtol=0, atol=0)


def _gevrey_config(ref_class, base=None, count=9, lam0=64.0, threshold=50.0):
    t0 = blowup_time(ref_class, 1.0)
    return CriticalGevreyConfig(
        params=ref_class,
        r0=1.0,
        eigenvalues=EigenvalueSequence.geometric(lam0, 2.0, count),
        times=np.linspace(0.0, 2 * t0, 33),
        base=base,
        divergence_threshold=threshold,
    )


class TestGevreyCriticalRun:
    def test_reference_run_passes(self, ref_class):
        report = run_gevrey_critical(_gevrey_config(ref_class))
        assert report.passed
        names = {c.name for c in report.certificates}
        assert names == {
            "activation",
            "admissibility",
            "residual",
            "data_regularity",
            "factorization",
            "loss_above_t0",
            "decay_below_t0",
        }
        assert all(fc.admissibility_path == "grid" for fc in report.frequency_certificates)
        assert report.t0 == pytest.approx(blowup_time(ref_class, 1.0))

    def test_factorization_identity_tight(self, ref_class):
        report = run_gevrey_critical(_gevrey_config(ref_class))
        cert = next(c for c in report.certificates if c.name == "factorization")
        assert cert.details["checked"] and cert.details["max_error"] < 1e-9

    def test_rows_cover_the_grid(self, ref_class):
        report = run_gevrey_critical(_gevrey_config(ref_class))
        rows = list(report.rows())
        assert len(rows) == 9 * 33
        # spot value: log_psi at t=0 for the first frequency
        lam0 = report.frequencies[0]
        expected = float(log_psi_gevrey(ref_class, 1.0, lam0, 0.0))
        assert rows[0][4] == pytest.approx(expected, rel=1e-12)

    def test_sinusoidal_base_variant(self, ref_class):
        base = SmoothBaseSpeed.sinusoidal(2.5, 0.25, 1.0)
        # the smaller frequency window needs a matching divergence threshold;
        # any positive value separates the split in exact arithmetic
        report = run_gevrey_critical(
            _gevrey_config(ref_class, base=base, count=8, lam0=16.0, threshold=30.0)
        )
        assert report.passed

    def test_config_validation(self, ref_class):
        with pytest.raises(InvalidInputError):
            CriticalGevreyConfig(  # 2 sigma >= 1 - alpha
                params=damping_class(0.01),
                r0=1.0,
                eigenvalues=EigenvalueSequence.geometric(64.0, 2.0, 9),
                times=np.linspace(0.0, 23.0, 33),
            )
        with pytest.raises(InvalidInputError):
            CriticalGevreyConfig(  # window shorter than 2*t0
                params=ref_class,
                r0=1.0,
                eigenvalues=EigenvalueSequence.geometric(64.0, 2.0, 9),
                times=np.linspace(0.0, 10.0, 33),
            )


class TestDampingCriticalRun:
    def _config(self, delta=0.04, lam0=1e70):
        return CriticalDampingConfig(
            params=damping_class(delta),
            eigenvalues=EigenvalueSequence.geometric(lam0, 2.0, 31),
            times=np.linspace(0.0, 4.0, 17),
        )

    def test_reference_run_passes(self):
        report = run_damping_critical(self._config())
        assert report.passed
        assert all(fc.admissibility_path == "analytic" for fc in report.frequency_certificates)
        assert all(fc.residual_path.startswith("skipped") for fc in report.frequency_certificates)
        psi_cert = next(c for c in report.certificates if c.name == "psi_divergent_all_positive_t")
        assert psi_cert.passed

    def test_factorization_skipped_is_recorded(self):
        report = run_damping_critical(self._config())
        cert = next(c for c in report.certificates if c.name == "factorization")
        assert cert.passed and cert.details["checked"] is False

    def test_threshold_rejection_cites_value(self):
        with pytest.raises(InvalidInputError) as err:
            self._config(delta=0.09)
        assert "0.0883883" in str(err.value)
        with pytest.raises(InvalidInputError):
            self._config(delta=0.0883883476483185)  # at the threshold: rejected

    def test_exact_criticality_required(self):
        params = SpeedClassParams(1.0, 4.0, 0.5, 8.0, damping=0.04, damping_power=0.2)
        with pytest.raises(InvalidInputError):
            CriticalDampingConfig(
                params=params,
                eigenvalues=EigenvalueSequence.geometric(1e70, 2.0, 31),
                times=np.linspace(0.0, 4.0, 17),
            )

    def test_zero_damping_diverges_sooner(self):
        # delta = 0 maximizes the growth coefficient: divergence is visible
        # from a much lower frequency window
        p0 = SpeedClassParams(1.0, 4.0, 0.5, 8.0, damping=0.0, damping_power=0.25)
        lams = 2.0 ** np.arange(40, 71)
        psi0 = np.asarray(log_psi_damping(p0, lams, 1.0))
        psi4 = np.asarray(log_psi_damping(damping_class(0.04), lams, 1.0))
        assert np.all(np.diff(psi0)[-10:] > 0) and psi0[-1] > 50
        assert psi0[-1] > psi4[-1]


class TestNonActivatorTest:
    def test_constant_unit_speed_is_member(self, ref_class):
        eig = EigenvalueSequence.geometric(1.0, 2.0, 37)
        report = nonactivator_test(1.0, 33, eig, imax=36, params=ref_class)
        assert report.member and report.witness_t is not None and report.witness_t > 0
        assert report.imax == 36 and report.index_range == (33, 36)

    def test_smallest_valid_k_is_33(self, ref_class):
        eig = EigenvalueSequence.geometric(1.0, 2.0, 37)
        for k in (1, 20, 32):
            with pytest.raises(InvalidInputError):
                nonactivator_test(1.0, k, eig, imax=36, params=ref_class)
        assert nonactivator_test(1.0, 33, eig, imax=36, params=ref_class).member

    def test_activator_escapes_at_its_own_frequency(self, ref_class, midpoint_base):
        eig = EigenvalueSequence.geometric(1.0, 2.0, 37)
        act = build_activator(ref_class, midpoint_base, float(eig.values[33]))
        report = nonactivator_test(act, 33, eig, imax=33, params=ref_class)
        assert not report.member
        assert set(report.violations.values()) == {33}
        assert len(report.violations) == 133  # every grid time is violated

    def test_single_frequency_window(self, ref_class, midpoint_base):
        eig = EigenvalueSequence.geometric(1.0, 2.0, 37)
        act = build_activator(ref_class, midpoint_base, float(eig.values[33]))
        report = nonactivator_test(
            act, 33, eig, imax=33, params=ref_class, index_range=(33, 33)
        )
        assert not report.member

    def test_integrator_route_for_generic_speeds(self, ref_class):
        # a non-constant, non-resonant speed has no closed form, so the
        # energies come from the renormalizing integrator; the allowance
        # explodes while these energies stay near unit size, so the slow
        # speed is a member
        def wiggle(t):
            return 2.5 + 0.2 * np.sin(3.0 * np.asarray(t, dtype=float))

        eig = EigenvalueSequence(np.array([1.0, 2.0, 4.0, 8.0]))
        grid = np.linspace(0.0, 33.0, 67)
        report = nonactivator_test(
            wiggle, 33, eig, imax=3, params=ref_class, time_grid=grid, index_range=(2, 3)
        )
        assert report.member and report.witness_t is not None and report.witness_t > 0

    def test_infeasible_integration_is_refused(self, ref_class):
        eig = EigenvalueSequence.geometric(1.0, 2.0, 41)

        def mystery_speed(t):
            return 2.5 + 0.1 * np.sin(np.asarray(t))

        with pytest.raises(InvalidInputError):
            nonactivator_test(mystery_speed, 33, eig, imax=40, params=ref_class)


class TestEmptyInteriorProbe:
    def test_reference_probe_finds_small_index(self, ref_class, midpoint_base):
        report = empty_interior_probe(
            midpoint_base, 0.5, 40, ref_class, EigenvalueSequence.geometric(1.0, 2.0, 25)
        )
        assert report.found is not None
        assert report.found.index <= 20
        assert report.found.ok and not report.genuine_ck_escape
        # the distance certificate was the binding one on the way up
        assert all(not a.distance_ok for a in report.attempts[:-1])

    def test_huge_ball_succeeds_immediately(self, ref_class, midpoint_base):
        report = empty_interior_probe(
            midpoint_base, 10.0, 40, ref_class, EigenvalueSequence.geometric(1.0, 2.0, 25)
        )
        assert report.found is not None and report.found.index == 0

    def test_saturated_base_rejected(self, ref_class):
        with pytest.raises(InvalidInputError):
            empty_interior_probe(
                SmoothBaseSpeed.constant(4.0),
                0.5,
                40,
                ref_class,
                EigenvalueSequence.geometric(1.0, 2.0, 10),
            )

    def test_exhausted_search_reports_reasons(self, ref_class, midpoint_base):
        report = empty_interior_probe(
            midpoint_base,
            1e-6,  # unattainably small ball
            40,
            ref_class,
            EigenvalueSequence.geometric(1.0, 2.0, 6),
        )
        assert report.found is None
        assert all(a.failure == "distance" for a in report.attempts)
