import math

import numpy as np
import pytest

from resolab import (
    ActivatorSpeed,
    DerivedConstants,
    InvalidInputError,
    ResonanceParams,
    SpeedClassParams,
    amplitude_exponent,
    amplitude_exponent_floor,
    amplitude_exponent_rate,
    amplitude_for_frequency,
    closed_form_state,
    cos_phase_integral,
    oscillation_phase,
)
from resolab.activator import EXP_GUARD, SmoothBaseSpeed, build_activator
from resolab.experiments import blowup_time

UNIT = SmoothBaseSpeed.constant(1.0)
WOBBLE = SmoothBaseSpeed.sinusoidal(2.5, 0.5, 1.0)


class TestDerivedConstants:
    def test_reference_values(self, ref_class):
        c = DerivedConstants.from_class(ref_class)
        assert c.energy_floor == pytest.approx(0.03125, abs=1e-12)
        assert c.resonant_gain == pytest.approx(0.125, abs=1e-12)
        assert c.critical_rate == pytest.approx(8.0 / (16.0 * 4.0**0.75), abs=1e-12)
        assert c.damping_threshold == pytest.approx(c.critical_rate / 2, abs=1e-15)

    def test_two_rate_formulas_agree(self):
        for mu2, alpha, H in ((2.0, 0.3, 5.0), (9.0, 0.7, 0.5), (4.0, 0.5, 8.0)):
            p = SpeedClassParams(1.0, mu2, alpha, H)
            c = DerivedConstants.from_class(p)
            alt = H / (16.0 * mu2 ** ((1 + alpha) / 2))
            assert abs(c.critical_rate - alt) <= 1e-12


class TestAmplitudeForFrequency:
    def test_reference_value(self, ref_class):
        eps = amplitude_for_frequency(ref_class, 1024.0)
        assert eps == pytest.approx(math.sqrt(2) / 32, rel=1e-12)
        assert eps == pytest.approx(0.0441941738, abs=1e-9)

    def test_scaling_identities(self, ref_class):
        c = DerivedConstants.from_class(ref_class)
        fixed = ref_class.holder_bound / (4 * ref_class.speed_max ** (ref_class.alpha / 2))
        for lam in (2.0, 100.0, 2.0**20, 2.0**40):
            eps = amplitude_for_frequency(ref_class, lam)
            assert eps * lam**ref_class.alpha == pytest.approx(fixed, rel=1e-12)
            assert c.resonant_gain * eps * lam == pytest.approx(
                c.critical_rate * lam ** (1 - ref_class.alpha), rel=1e-12
            )


class TestPhase:
    def test_unit_base(self):
        assert oscillation_phase(UNIT, 1024.0, 0.5) == 512.0

    def test_constant_base_closed_form(self):
        base = SmoothBaseSpeed.constant(9.0)  # m^2 with m = 3
        for t in (0.1, 1.0, 7.0):
            assert oscillation_phase(base, 11.0, t) == pytest.approx(11.0 * 3.0 * t, rel=1e-15)

    def test_sinusoidal_base_matches_brute_force(self):
        # oracle: composite trapezoid with 1e6 panels
        lam, t = 100.0, 1.0
        ss = np.linspace(0.0, t, 1_000_001)
        brute = lam * np.trapezoid(np.sqrt(WOBBLE.value(ss)), ss)
        assert oscillation_phase(WOBBLE, lam, t) == pytest.approx(brute, rel=1e-9)

    def test_negative_time_rejected(self):
        with pytest.raises(InvalidInputError):
            oscillation_phase(UNIT, 10.0, -0.5)


class TestAmplitudeExponent:
    def test_trig_antiderivative_case(self):
        # unit base, delta=0: b = (eps*lam/2)(t/2 - sin(2*lam*t)/(4*lam));
        # at t = 20*pi/100 the sine vanishes and b = pi/2
        p = ResonanceParams(frequency=100.0, amplitude=0.1)
        t = 20 * math.pi / 100
        assert amplitude_exponent(UNIT, p, t) == pytest.approx(math.pi / 2, rel=1e-12)

    def test_zero_at_time_zero(self):
        for base in (UNIT, WOBBLE):
            p = ResonanceParams(frequency=37.0, amplitude=0.2, damping=0.3, damping_power=0.2)
            assert amplitude_exponent(base, p, 0.0) == 0.0

    def test_floor_bound_reference_value(self, ref_class):
        lam = 1024.0
        eps = amplitude_for_frequency(ref_class, lam)
        p = ResonanceParams(frequency=lam, amplitude=eps)
        value = amplitude_exponent_floor(ref_class, 0.0, p, 1.0)
        expected = eps * lam / 8 - eps / 16 - 0.25 * math.log(4.0)
        assert value == pytest.approx(expected, rel=1e-12)
        assert value == pytest.approx(5.3075185, abs=1e-6)

    def test_floor_bound_degenerate_class_limit(self):
        # mu1 = mu2 collapses the bound to eps*lam*t/4 - eps/8
        p = ResonanceParams(frequency=50.0, amplitude=0.2)
        tight = SpeedClassParams(1.0, 1.0 + 1e-12, 0.5, 8.0)
        value = amplitude_exponent_floor(tight, 0.0, p, 2.0)
        assert value == pytest.approx(0.2 * 50 * 2 / 4 - 0.2 / 8, abs=1e-9)

    def test_floor_bound_at_time_zero(self, ref_class):
        p = ResonanceParams(frequency=64.0, amplitude=0.1)
        expected = -0.1 / (8 * math.sqrt(4.0)) - 0.25 * math.log(4.0)
        assert amplitude_exponent_floor(ref_class, 5.0, p, 0.0) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize(
        "base,slope",
        [(SmoothBaseSpeed.constant(2.5), 0.0), (SmoothBaseSpeed.sinusoidal(2.5, 0.4, 1.5), 0.6)],
    )
    def test_exponent_dominates_floor_on_grids(self, ref_class, base, slope):
        grid = np.linspace(0.0, 8.0, 801)
        for k in (4, 6, 8, 10):
            p = ResonanceParams(2.0**k, amplitude_for_frequency(ref_class, 2.0**k))
            b = np.asarray(amplitude_exponent(base, p, grid))
            floor = np.asarray(amplitude_exponent_floor(ref_class, slope, p, grid))
            assert np.all(b >= floor)


class TestOscillatingIntegral:
    @pytest.mark.parametrize(
        "base,slope",
        [(SmoothBaseSpeed.constant(2.5), 0.0), (SmoothBaseSpeed.sinusoidal(2.5, 0.4, 1.5), 0.6)],
    )
    def test_cos_integral_bound(self, ref_class, base, slope):
        grid = np.linspace(0.0, 8.0, 801)
        mu1 = ref_class.speed_min
        for k in (4, 6, 8):
            lam = 2.0**k
            vals = np.abs(np.asarray(cos_phase_integral(base, lam, grid)))
            bound = 1 / (2 * math.sqrt(mu1) * lam) + slope * grid / (4 * mu1**1.5 * lam)
            assert np.all(vals <= bound + 1e-12)


class TestModifiedSpeed:
    def test_quarter_period_value(self):
        act = ActivatorSpeed(UNIT, ResonanceParams(frequency=1000.0, amplitude=0.1))
        t = (math.pi / 4) / 1000.0
        assert act.speed(t) == pytest.approx(0.899375, abs=1e-12)

    def test_full_period_returns_to_base(self):
        act = ActivatorSpeed(UNIT, ResonanceParams(frequency=1000.0, amplitude=0.37))
        assert act.speed(math.pi / 1000.0) == pytest.approx(1.0, abs=1e-12)

    def test_constant_base_reduction(self):
        # for c0 = m^2 and no damping only the three ripple terms survive
        base = SmoothBaseSpeed.constant(6.25)
        act = ActivatorSpeed(base, ResonanceParams(frequency=77.0, amplitude=0.3))
        ts = np.linspace(0.0, 1.0, 257)
        a = 77.0 * 2.5 * ts
        expected = 6.25 - 0.3 * np.sin(2 * a) - (0.3**2 / 4) * np.sin(a) ** 4 / 6.25
        np.testing.assert_allclose(np.asarray(act.speed(ts)), expected, atol=1e-13)

    def test_split_reassembles(self, ref_class):
        act = build_activator(ref_class, WOBBLE, 2.0**7)
        ts = np.linspace(0.0, 3.0, 1001)
        total = np.asarray(act.smooth_part(ts)) + np.asarray(act.oscillatory_part(ts))
        np.testing.assert_allclose(total, np.asarray(act.speed(ts)), atol=1e-12)

    def test_uniform_convergence_to_base(self, ref_class, midpoint_base):
        sups = []
        for k in range(4, 13):
            act = build_activator(ref_class, midpoint_base, 2.0**k)
            sups.append(act.sup_distance_to_base(4.0, samples=4097))
        assert all(b <= a + 1e-12 for a, b in zip(sups, sups[1:]))
        # the distance tracks the ripple amplitude sqrt(2)*lam^(-1/2)
        assert sups[-1] < 1.1 * math.sqrt(2) * 2.0 ** (-12 / 2)
        # analytic envelope dominates the measured distance
        act = build_activator(ref_class, midpoint_base, 2.0**8)
        assert act.sup_distance_to_base(4.0) <= act.analytic_distance_bound()

    def test_holder_tail_within_budget(self, ref_class, midpoint_base):
        from resolab import holder_constant_on_grid, tail_max

        values = []
        for k in range(8, 13):
            act = build_activator(ref_class, midpoint_base, 2.0**k)
            sampled = act.sample(4.0, ref_class)
            values.append(
                holder_constant_on_grid(sampled, ref_class.alpha, 2 * len(sampled.values)).value
            )
        assert tail_max(values) <= ref_class.holder_bound / 2 + 1e-2


class TestClosedFormSolution:
    def test_initial_state(self, midpoint_base):
        p = ResonanceParams(frequency=256.0, amplitude=0.05)
        w, dw = closed_form_state(midpoint_base, p, 0.0)
        assert w == 0.0
        assert dw == pytest.approx(256.0 * math.sqrt(2.5), rel=1e-15)

    def test_peak_phase_magnitude(self):
        # at a = pi/2 the solution equals exp(b)
        p = ResonanceParams(frequency=200.0, amplitude=0.04)
        t = (math.pi / 2) / 200.0
        w, _ = closed_form_state(UNIT, p, t)
        assert w == pytest.approx(math.exp(amplitude_exponent(UNIT, p, t)), rel=1e-12)

    def test_exp_guard(self, ref_class):
        act = build_activator(ref_class, SmoothBaseSpeed.constant(2.5), 2.0**14)
        with pytest.raises(InvalidInputError):
            act.state(np.array([0.0, 2 * blowup_time(ref_class, 1.0)]))
        # log form stays available
        parts = act.log_state(2 * blowup_time(ref_class, 1.0))
        assert np.all(np.isfinite(parts["b"])) and float(parts["b"][0]) > EXP_GUARD

    def test_ansatz_identity(self, ref_class):
        # a'' + 2 a' (b' + damping_rate) = eps*lam^2*sin^2(a) pointwise
        grid = np.linspace(0.0, 4.0, 1001)
        for base in (SmoothBaseSpeed.constant(2.5), WOBBLE):
            for damping in (0.0, 0.3):
                p = ResonanceParams(2.0**7, amplitude_for_frequency(ref_class, 2.0**7),
                                    damping=damping, damping_power=0.25)
                act = ActivatorSpeed(base, p)
                parts = act.log_state(grid)
                a_rate = parts["a_rate"]
                a_accel = p.frequency * base.derivative(grid) / (2 * np.sqrt(base.value(grid)))
                beta_rate = parts["b_rate"] + p.damping_rate
                lhs = a_accel + 2 * a_rate * beta_rate
                rhs = p.amplitude * p.frequency**2 * parts["sin_a"] ** 2
                scale = p.amplitude * p.frequency**2
                assert np.max(np.abs(lhs - rhs)) <= 1e-8 * scale


class TestResidual:
    @pytest.mark.parametrize("k", [6, 8, 10])
    def test_reference_frequencies(self, ref_class, k):
        act = build_activator(ref_class, UNIT, 2.0**k)
        assert act.residual_max(np.linspace(0.0, 5.0, 2001)) < 1e-5

    def test_pure_sine_degenerate_case(self):
        act = ActivatorSpeed(UNIT, ResonanceParams(frequency=64.0, amplitude=0.0))
        assert act.residual_max(np.linspace(0.0, 5.0, 501)) < 1e-8

    def test_sinusoidal_base(self, ref_class):
        act = build_activator(ref_class, WOBBLE, 2.0**8)
        assert act.residual_max(np.linspace(0.0, 3.0, 301)) < 1e-5

    def test_damped(self):
        p = SpeedClassParams(1.0, 4.0, 0.5, 8.0, damping=0.04, damping_power=0.25)
        act = build_activator(p, SmoothBaseSpeed.constant(2.5), 2.0**8)
        assert act.residual_max(np.linspace(0.0, 3.0, 301)) < 1e-5

    def test_rejects_degenerate_grids(self, ref_class):
        act = build_activator(ref_class, UNIT, 64.0)
        with pytest.raises(InvalidInputError):
            act.residual_max(np.array([1.0]))
        with pytest.raises(InvalidInputError):
            act.residual_max(np.array([1.0, 1.0]))


class TestLogEnergy:
    def test_zero_at_start(self, midpoint_base):
        p = ResonanceParams(frequency=512.0, amplitude=0.01)
        assert ActivatorSpeed(midpoint_base, p).log_energy(0.0) == pytest.approx(0.0, abs=1e-12)

    def test_certified_growth_reference_point(self, ref_class):
        # lam = 2^10, t = 1: the certified floor evaluates to
        # log(1/32) + gain*eps*lam = 2.1911...
        consts = DerivedConstants.from_class(ref_class)
        act = build_activator(ref_class, UNIT, 2.0**10)
        floor = math.log(consts.energy_floor) + consts.resonant_gain * act.params.amplitude * 2.0**10
        assert floor == pytest.approx(2.1911183, abs=1e-6)
        assert act.log_energy(1.0) >= floor

    def test_floor_holds_from_smallest_frequency(self, ref_class, midpoint_base):
        # records the empirical threshold: for the reference class the floor
        # already holds at every tested frequency from 2^0 upward
        consts = DerivedConstants.from_class(ref_class)
        grid = np.linspace(0.0, 2 * blowup_time(ref_class, 1.0), 513)
        smallest = None
        for k in range(15):
            act = build_activator(ref_class, midpoint_base, 2.0**k)
            margin = np.asarray(act.log_energy(grid)) - np.asarray(act.energy_floor_log(consts, grid))
            if np.all(margin >= 0):
                smallest = k
                break
        print(f"[threshold] energy floor first holds at lambda = 2^{smallest} for the reference class")
        assert smallest is not None and 2.0**smallest <= 2.0**8

    def test_strong_damping_stays_finite(self):
        p = ResonanceParams(frequency=4.0, amplitude=0.05, damping=1.0, damping_power=0.25)
        value = ActivatorSpeed(UNIT, p).log_energy(3.0)
        assert np.isfinite(value) and value < 0


class TestBaseSpeed:
    def test_margins(self, ref_class):
        assert SmoothBaseSpeed.constant(2.5).margin_to(ref_class) == pytest.approx(1.0)
        with pytest.raises(InvalidInputError):
            SmoothBaseSpeed.constant(4.0).margin_to(ref_class)
        wob = SmoothBaseSpeed.sinusoidal(2.5, 0.5, 2.0)
        assert 0 < wob.margin_to(ref_class) <= 1.0

    def test_derivative_bounds(self):
        wob = SmoothBaseSpeed.sinusoidal(2.0, 0.25, 3.0, phase=0.4)
        assert wob.sup_derivative == pytest.approx(0.75)
        assert wob.c3_bound == pytest.approx(0.25 * (3 + 9 + 27))
        ts = np.linspace(0.0, 5.0, 2001)
        fd = np.gradient(np.asarray(wob.value(ts)), ts)[1:-1]
        assert np.max(np.abs(fd - np.asarray(wob.derivative(ts))[1:-1])) < 1e-3

    def test_parse_round_trip(self):
        for text in ("const:2.5", "sin:2.0,0.25,3.0,0.4"):
            base = SmoothBaseSpeed.parse(text)
            again = SmoothBaseSpeed.parse(base.describe())
            assert again.describe() == base.describe()
        with pytest.raises(InvalidInputError):
            SmoothBaseSpeed.parse("cubic:1,2,3")

    def test_positivity_required(self):
        with pytest.raises(InvalidInputError):
            SmoothBaseSpeed.constant(0.0)
        with pytest.raises(InvalidInputError):
            SmoothBaseSpeed.sinusoidal(1.0, 1.5, 2.0)
