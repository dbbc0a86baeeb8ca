"""Resonant speed construction and its closed-form solution.

Starting from a smooth base speed c0, a frequency lam and a small ripple
amplitude eps, the modified speed below resonates with the natural
oscillation of the spectral component at lam and makes its energy grow
exponentially. The construction is fully explicit:

    phase      a(t)  = lam * integral_0^t sqrt(c0)
    exponent   b(t)  = (eps*lam/2) * integral_0^t sin^2(a)/sqrt(c0)
                       - (1/4) * log(c0(t)/c0(0)) - delta*lam^(2*sigma)*t
    speed      gamma(t) = c0 - eps*sin(2a) - (eps^2/4)*sin^4(a)/c0
                       - (5/16)*(c0'/c0)^2/lam^2
                       + (eps/(2*lam))*(c0'/c0^(3/2))*sin^2(a)
                       + (1/(4*lam^2))*c0''/c0 + delta^2/lam^(2-4*sigma)

and w(t) = sin(a(t)) * exp(b(t)) solves

    w'' + 2*delta*lam^(2*sigma)*w' + lam^2*gamma*w = 0.

Everything exponentially large lives in the log domain; exp(b) is only formed
when b stays below the overflow guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidInputError
from .quadrature import integrate_cumulative
from .speeds import SampledSpeed, SpeedClassParams

ArrayLike = Union[float, np.ndarray]

# exp(b) would overflow well before this; callers get the log-domain form.
EXP_GUARD = 500.0

# Panels per oscillation period of sin(2a); 5 Gauss nodes per panel gives
# far more than the 32 points per period the integrals need.
_PANELS_PER_PERIOD = 64


def _as_grid(t: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if arr.ndim != 1:
        raise InvalidInputError("time input must be scalar or 1-d")
    if np.any(arr < 0):
        raise InvalidInputError("times must be nonnegative")
    if np.any(np.diff(arr) < 0):
        raise InvalidInputError("time grids must be nondecreasing")
    return arr, np.isscalar(t) or getattr(t, "ndim", 1) == 0


class SmoothBaseSpeed:
    """Base speed with analytic derivatives up to third order.

    Two forms are supported, constant and single-harmonic sinusoidal
    (mean + amp*sin(omega*t + phase)); both satisfy the C^3 bound exactly and
    have analytic Lipschitz and Hölder bounds, which is what the resonance
    estimates require of the unperturbed speed.
    """

    def __init__(self, kind: str, mean: float, amp: float = 0.0, omega: float = 0.0, phase: float = 0.0):
        if kind not in ("constant", "sinusoidal"):
            raise InvalidInputError(f"unknown base speed form {kind!r}")
        if kind == "constant":
            amp, omega, phase = 0.0, 0.0, 0.0
        if mean - abs(amp) <= 0:
            raise InvalidInputError("base speed must stay strictly positive")
        if kind == "sinusoidal" and omega <= 0:
            raise InvalidInputError("sinusoidal base needs omega > 0")
        self.kind = kind
        self.mean = float(mean)
        self.amp = float(amp)
        self.omega = float(omega)
        self.phase = float(phase)

    @classmethod
    def constant(cls, value: float) -> "SmoothBaseSpeed":
        return cls("constant", value)

    @classmethod
    def sinusoidal(cls, mean: float, amp: float, omega: float, phase: float = 0.0) -> "SmoothBaseSpeed":
        return cls("sinusoidal", mean, amp, omega, phase)

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def value(self, t: ArrayLike) -> ArrayLike:
        if self.is_constant:
            return self.mean if np.isscalar(t) else np.full_like(np.asarray(t, float), self.mean)
        return self.mean + self.amp * np.sin(self.omega * np.asarray(t, float) + self.phase)

    def derivative(self, t: ArrayLike) -> ArrayLike:
        if self.is_constant:
            return 0.0 if np.isscalar(t) else np.zeros_like(np.asarray(t, float))
        return self.amp * self.omega * np.cos(self.omega * np.asarray(t, float) + self.phase)

    def second_derivative(self, t: ArrayLike) -> ArrayLike:
        if self.is_constant:
            return 0.0 if np.isscalar(t) else np.zeros_like(np.asarray(t, float))
        return -self.amp * self.omega**2 * np.sin(self.omega * np.asarray(t, float) + self.phase)

    @property
    def initial_value(self) -> float:
        return float(self.value(0.0))

    @property
    def min_value(self) -> float:
        return self.mean - abs(self.amp)

    @property
    def max_value(self) -> float:
        return self.mean + abs(self.amp)

    @property
    def sup_derivative(self) -> float:
        """L0 = sup |c0'| over [0, inf)."""
        return abs(self.amp) * self.omega

    @property
    def c3_bound(self) -> float:
        """sup(|c0'| + |c0''| + |c0'''|)."""
        a, w = abs(self.amp), self.omega
        return a * w + a * w**2 + a * w**3

    def holder_alpha_bound(self, alpha: float) -> float:
        """Analytic Hölder-alpha constant bound: sup min(L0*d, 2*amp)/d^alpha."""
        if self.is_constant or self.amp == 0:
            return 0.0
        return self.sup_derivative**alpha * (2 * abs(self.amp)) ** (1 - alpha)

    def margin_to(self, params: SpeedClassParams) -> float:
        """Slack eps1 > 0 with mu1+eps1 <= c0 <= mu2-eps1 and Hold <= (1-eps1)H.

        Raises when the base saturates the admissibility inequalities.
        """
        eps1 = min(
            self.min_value - params.speed_min,
            params.speed_max - self.max_value,
            1.0 - self.holder_alpha_bound(params.alpha) / params.holder_bound,
        )
        if eps1 <= 0:
            raise InvalidInputError(
                "base speed saturates the admissibility bounds (no margin left)"
            )
        return float(eps1)

    def describe(self) -> str:
        if self.is_constant:
            return f"const:{self.mean!r}"
        return f"sin:{self.mean!r},{self.amp!r},{self.omega!r},{self.phase!r}"

    @classmethod
    def parse(cls, text: str) -> "SmoothBaseSpeed":
        """Parse the CLI forms const:V and sin:m,A,omega,phi."""
        head, _, rest = text.partition(":")
        try:
            if head == "const":
                return cls.constant(float(rest))
            if head == "sin":
                m, a, w, p = (float(x) for x in rest.split(","))
                return cls.sinusoidal(m, a, w, p)
        except ValueError as exc:
            raise InvalidInputError(f"cannot parse base speed {text!r}: {exc}") from exc
        raise InvalidInputError(f"unknown base speed form {text!r} (use const:V or sin:m,A,omega,phi)")


@dataclass(frozen=True)
class ResonanceParams:
    """Per-frequency construction parameters: (frequency, ripple amplitude)
    plus the damping pair inherited from the speed class."""

    frequency: float
    amplitude: float
    damping: float = 0.0
    damping_power: float = 0.0

    def __post_init__(self):
        if self.frequency <= 0:
            raise InvalidInputError("frequency must be positive")
        # amplitude 0 is the unperturbed sanity case; activation needs > 0
        if self.amplitude < 0:
            raise InvalidInputError("amplitude must be nonnegative")
        if self.damping < 0:
            raise InvalidInputError("damping must be nonnegative")
        if not (0 <= self.damping_power < 0.5):
            raise InvalidInputError("damping power must lie in [0, 1/2)")

    @property
    def damping_rate(self) -> float:
        """delta * lam^(2*sigma), the damping term coefficient."""
        return self.damping * self.frequency ** (2 * self.damping_power)


@dataclass(frozen=True)
class DerivedConstants:
    """Constants of the activation estimates, derived from the speed class.

    energy_floor    mu1*min(1,mu1)/(2*mu2^2): certified energy prefactor
    resonant_gain   1/(4*sqrt(mu2)): growth rate per unit (amplitude*frequency)
    critical_rate   H*resonant_gain/(4*mu2^(alpha/2)): rate per lam^(1-alpha)
    """

    energy_floor: float
    resonant_gain: float
    critical_rate: float

    @classmethod
    def from_class(cls, params: SpeedClassParams) -> "DerivedConstants":
        mu1, mu2 = params.speed_min, params.speed_max
        floor = mu1 * min(1.0, mu1) / (2 * mu2**2)
        gain = 1.0 / (4 * math.sqrt(mu2))
        rate = params.holder_bound * gain / (4 * mu2 ** (params.alpha / 2))
        alt = params.holder_bound / (16 * mu2 ** ((1 + params.alpha) / 2))
        if abs(rate - alt) > 1e-12 * max(abs(rate), 1.0):
            raise InvalidInputError("critical_rate formulas disagree beyond 1e-12")
        return cls(energy_floor=floor, resonant_gain=gain, critical_rate=rate)

    @property
    def damping_threshold(self) -> float:
        """Largest damping below which the critical-damping loss still occurs."""
        return self.critical_rate / 2


def amplitude_for_frequency(params: SpeedClassParams, frequency: float) -> float:
    """Ripple amplitude H/(4*mu2^(alpha/2)) * lam^(-alpha).

    Chosen so that amplitude*frequency^alpha is constant in the frequency and
    the Hölder budget of the class is only half-used asymptotically.
    """
    if frequency <= 0:
        raise InvalidInputError("frequency must be positive")
    return (
        params.holder_bound
        / (4 * params.speed_max ** (params.alpha / 2))
        * frequency ** (-params.alpha)
    )


def _panel_width(base: SmoothBaseSpeed, lam: float) -> float:
    return 2 * math.pi / (_PANELS_PER_PERIOD * lam * math.sqrt(base.max_value))


def _sqrt_c0(base: SmoothBaseSpeed):
    return lambda s: np.sqrt(base.value(s))


def _phase_grid(base: SmoothBaseSpeed, lam: float, ts: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    if base.is_constant:
        return lam * math.sqrt(base.mean) * ts
    width = min(0.25, 2 * math.pi / (32 * max(base.omega, 1.0)))
    if ts[0] != 0.0:  # the phase integral is anchored at t = 0
        full = np.concatenate(([0.0], ts))
        return lam * integrate_cumulative(_sqrt_c0(base), full, width, rel_tol=rel_tol)[1:]
    # grids already far below the panel rule don't need doubling verification
    doublings = 0 if len(ts) > 1 and float(np.max(np.diff(ts))) <= width / 8 else 2
    return lam * integrate_cumulative(
        _sqrt_c0(base), ts, width, rel_tol=rel_tol, max_doublings=doublings
    )


def _d2_sqrt_c0(base: SmoothBaseSpeed, t: np.ndarray) -> np.ndarray:
    c0 = base.value(t)
    d1 = base.derivative(t)
    d2 = base.second_derivative(t)
    return d2 / (2 * np.sqrt(c0)) - d1**2 / (4 * c0**1.5)


def _oscillatory_cumulative(base: SmoothBaseSpeed, lam: float, ts: np.ndarray, integrand) -> np.ndarray:
    """Cumulative integral of integrand(a(s), c0(s)) along ts.

    The integrand oscillates at frequency ~2*lam*sqrt(c0); panels follow the
    period rule and the phase inside each panel comes from a third-order
    expansion around the panel edge (edge phases are exact cumulative
    integrals, so phase errors do not accumulate coherently).
    """
    if ts[0] != 0.0:  # all integrals here are anchored at t = 0
        full = np.concatenate(([0.0], ts))
        return _oscillatory_cumulative(base, lam, full, integrand)[1:]
    width = _panel_width(base, lam)
    edges_parts = [np.array([ts[0]])]
    for j in range(len(ts) - 1):
        n = max(1, int(math.ceil((ts[j + 1] - ts[j]) / width)))
        edges_parts.append(np.linspace(ts[j], ts[j + 1], n + 1)[1:])
    edges = np.concatenate(edges_parts)
    idx = np.searchsorted(edges, ts)

    a_edges = _phase_grid(base, lam, edges)
    left, right = edges[:-1], edges[1:]
    half = 0.5 * (right - left)
    from .quadrature import _GL_NODES, _GL_WEIGHTS  # shared node set

    tau = half[:, None] * (_GL_NODES[None, :] + 1.0)  # offsets from left edge
    s = left[:, None] + tau
    sq = np.sqrt(base.value(left))
    d_sq = base.derivative(left) / (2 * sq)
    d2_sq = _d2_sqrt_c0(base, left)
    a_nodes = a_edges[:-1, None] + lam * (
        sq[:, None] * tau + 0.5 * d_sq[:, None] * tau**2 + (d2_sq[:, None] / 6) * tau**3
    )
    vals = integrand(a_nodes, base.value(s))
    panel_ints = half * (vals @ _GL_WEIGHTS)
    cum = np.concatenate(([0.0], np.cumsum(panel_ints)))
    return cum[idx]


def _sin2_over_sqrt_grid(base: SmoothBaseSpeed, lam: float, ts: np.ndarray) -> np.ndarray:
    """Cumulative integral of sin^2(a)/sqrt(c0), closed form for constants."""
    if base.is_constant:
        m = math.sqrt(base.mean)
        return (ts / 2 - np.sin(2 * lam * m * ts) / (4 * lam * m)) / m
    return _oscillatory_cumulative(base, lam, ts, lambda a, c0: np.sin(a) ** 2 / np.sqrt(c0))


def cos_phase_integral(base: SmoothBaseSpeed, frequency: float, t: ArrayLike) -> ArrayLike:
    """integral_0^t cos(2 a(s)) ds; bounded by O(1/lam) for smooth bases."""
    ts, scalar = _as_grid(t)
    if base.is_constant:
        m = math.sqrt(base.mean)
        out = np.sin(2 * frequency * m * ts) / (2 * frequency * m)
    else:
        out = _oscillatory_cumulative(base, frequency, ts, lambda a, c0: np.cos(2 * a))
    return float(out[0]) if scalar and out.shape == (1,) else out


def oscillation_phase(base: SmoothBaseSpeed, frequency: float, t: ArrayLike) -> ArrayLike:
    """a(t) = frequency * integral_0^t sqrt(c0); closed form for constants."""
    if frequency <= 0:
        raise InvalidInputError("frequency must be positive")
    ts, scalar = _as_grid(t)
    out = _phase_grid(base, frequency, ts)
    return float(out[0]) if scalar else out


def amplitude_exponent(base: SmoothBaseSpeed, params: ResonanceParams, t: ArrayLike) -> ArrayLike:
    """b(t), the log of the growing amplitude of the closed-form solution."""
    ts, scalar = _as_grid(t)
    lam, eps = params.frequency, params.amplitude
    integral = _sin2_over_sqrt_grid(base, lam, ts)
    out = (
        0.5 * eps * lam * integral
        - 0.25 * np.log(base.value(ts) / base.initial_value)
        - params.damping_rate * ts
    )
    return float(out[0]) if scalar else out


def amplitude_exponent_rate(base: SmoothBaseSpeed, params: ResonanceParams, t: ArrayLike, phase=None) -> ArrayLike:
    """b'(t) evaluated analytically (optionally from a precomputed phase)."""
    ts, scalar = _as_grid(t)
    a = _phase_grid(base, params.frequency, ts) if phase is None else np.asarray(phase)
    c0 = base.value(ts)
    out = (
        0.5 * params.amplitude * params.frequency * np.sin(a) ** 2 / np.sqrt(c0)
        - 0.25 * base.derivative(ts) / c0
        - params.damping_rate
    )
    return float(out[0]) if scalar else out


def amplitude_exponent_floor(
    params: SpeedClassParams, slope_bound: float, res: ResonanceParams, t: ArrayLike
) -> ArrayLike:
    """Certified lower bound for b(t) given sup|c0'| <= slope_bound."""
    ts, scalar = _as_grid(t)
    mu1, mu2 = params.speed_min, params.speed_max
    lam, eps = res.frequency, res.amplitude
    out = (
        (eps * lam / (4 * math.sqrt(mu2)))
        * (1 - slope_bound / (4 * mu1**1.5 * lam))
        * ts
        - res.damping_rate * ts
        - eps / (8 * math.sqrt(mu1 * mu2))
        - 0.25 * math.log(mu2 / mu1)
    )
    return float(out[0]) if scalar else out


# 6th-order central finite-difference stencils on offsets -3..3.
_FD2 = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])
_FD1 = np.array([-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60])
_OFFSETS = np.arange(-3, 4)


class ActivatorSpeed:
    """The modified speed gamma(eps, lam, .) together with its closed forms.

    Immutable; all evaluations are pure and vectorized over time arrays, so
    values are safe to share and reproducible bit-for-bit across calls.
    """

    def __init__(self, base: SmoothBaseSpeed, params: ResonanceParams):
        self.base = base
        self.params = params

    def __call__(self, t: ArrayLike) -> ArrayLike:
        return self.speed(t)

    # -- speed ---------------------------------------------------------------

    def _speed_from_phase(self, ts: np.ndarray, a: np.ndarray) -> np.ndarray:
        base, p = self.base, self.params
        lam, eps = p.frequency, p.amplitude
        c0 = base.value(ts)
        d1 = base.derivative(ts)
        d2 = base.second_derivative(ts)
        sin_a = np.sin(a)
        return (
            c0
            - eps * np.sin(2 * a)
            - (eps**2 / 4) * sin_a**4 / c0
            - (5 / 16) * (d1 / c0) ** 2 / lam**2
            + (eps / (2 * lam)) * (d1 / c0**1.5) * sin_a**2
            + d2 / (4 * lam**2 * c0)
            + p.damping**2 / lam ** (2 - 4 * p.damping_power)
        )

    def speed(self, t: ArrayLike) -> ArrayLike:
        ts, scalar = _as_grid(t)
        out = self._speed_from_phase(ts, _phase_grid(self.base, self.params.frequency, ts))
        return float(out[0]) if scalar else out

    def smooth_part(self, t: ArrayLike) -> ArrayLike:
        """Slowly varying part of the speed (equi-Lipschitz in the frequency)."""
        ts, scalar = _as_grid(t)
        base, p = self.base, self.params
        c0 = base.value(ts)
        out = (
            c0
            - (5 / 16) * (base.derivative(ts) / c0) ** 2 / p.frequency**2
            + base.second_derivative(ts) / (4 * p.frequency**2 * c0)
            + p.damping**2 / p.frequency ** (2 - 4 * p.damping_power)
        )
        return float(out[0]) if scalar else out

    def oscillatory_part(self, t: ArrayLike) -> ArrayLike:
        """Resonant part; decays uniformly like the ripple amplitude."""
        ts, scalar = _as_grid(t)
        base, p = self.base, self.params
        lam, eps = p.frequency, p.amplitude
        a = _phase_grid(base, lam, ts)
        c0 = base.value(ts)
        sin_a = np.sin(a)
        out = (
            -eps * np.sin(2 * a)
            - (eps**2 / 4) * sin_a**4 / c0
            + (eps / (2 * lam)) * (base.derivative(ts) / c0**1.5) * sin_a**2
        )
        return float(out[0]) if scalar else out

    def sup_distance_to_base(self, t_max: float, samples: int = 65537) -> float:
        ts = np.linspace(0.0, t_max, samples)
        return float(np.max(np.abs(self.speed(ts) - self.base.value(ts))))

    def analytic_distance_bound(self) -> float:
        """Uniform bound for |gamma - c0| from the term-by-term envelopes."""
        base, p = self.base, self.params
        lam, eps = p.frequency, p.amplitude
        c_min = base.min_value
        return (
            eps
            + eps**2 / (4 * c_min)
            + (5 / 16) * (base.sup_derivative / c_min) ** 2 / lam**2
            + (eps / (2 * lam)) * base.sup_derivative / c_min**1.5
            + base.c3_bound / (4 * lam**2 * c_min)
            + p.damping**2 / lam ** (2 - 4 * p.damping_power)
        )

    def analytic_range(self) -> tuple[float, float]:
        """Guaranteed enclosure of the speed values (constant bases only)."""
        if not self.base.is_constant:
            raise InvalidInputError("analytic range is only available for constant bases")
        v = self.base.mean
        p = self.params
        eps = p.amplitude
        damp = p.damping**2 / p.frequency ** (2 - 4 * p.damping_power)
        return (v - eps - eps**2 / (4 * v) + damp, v + eps + damp)

    def analytic_holder_bound(self, alpha: float) -> float:
        """Certified Hölder-alpha bound (constant bases only)."""
        if not self.base.is_constant:
            raise InvalidInputError("analytic Hölder bound is only available for constant bases")
        lam, eps = self.params.frequency, self.params.amplitude
        lip_a = lam * math.sqrt(self.base.mean)
        # |sin(2x)-sin(2y)| <= 2|x-y|^alpha and |sin^4 x - sin^4 y| <= 2|x-y|^alpha
        return 2 * eps * lip_a**alpha + (eps**2 / (2 * self.base.mean)) * lip_a**alpha

    def sample(self, t_max: float, params: SpeedClassParams | None = None, points_per_period: int = 32) -> SampledSpeed:
        """Sample on a grid resolving the fastest oscillation (sin(2a))."""
        ref = params.speed_max if params is not None else self.base.max_value
        step = 2 * math.pi / (points_per_period * self.params.frequency * math.sqrt(ref))
        n = int(math.ceil(t_max / step)) + 1
        ts = step * np.arange(n)
        return SampledSpeed(step=step, values=np.asarray(self.speed(ts)))

    # -- closed-form solution --------------------------------------------------

    def log_state(self, t: ArrayLike) -> dict[str, np.ndarray]:
        """Overflow-safe pieces of the solution: a, sin/cos a, a', b, b'."""
        ts, _ = _as_grid(t)
        lam = self.params.frequency
        a = _phase_grid(self.base, lam, ts)
        b = np.asarray(amplitude_exponent(self.base, self.params, ts))
        b_rate = np.asarray(amplitude_exponent_rate(self.base, self.params, ts, phase=a))
        return {
            "a": a,
            "sin_a": np.sin(a),
            "cos_a": np.cos(a),
            "a_rate": lam * np.sqrt(self.base.value(ts)),
            "b": b,
            "b_rate": b_rate,
        }

    def state(self, t: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
        """(w, w') of the closed-form solution; raises when exp(b) would blow up."""
        ts, scalar = _as_grid(t)
        parts = self.log_state(ts)
        if np.any(parts["b"] > EXP_GUARD):
            raise InvalidInputError(
                f"b exceeds {EXP_GUARD}; use log_state/log_energy instead of exp(b)"
            )
        grow = np.exp(parts["b"])
        w = parts["sin_a"] * grow
        dw = (parts["a_rate"] * parts["cos_a"] + parts["b_rate"] * parts["sin_a"]) * grow
        if scalar:
            return float(w[0]), float(dw[0])
        return w, dw

    def log_energy(self, t: ArrayLike) -> ArrayLike:
        """log(|w_n'|^2 + lam^2 |w_n|^2) for the unit-velocity normalization
        w_n = w/(lam*sqrt(c0(0))); never exponentiates b."""
        ts, scalar = _as_grid(t)
        p = self.log_state(ts)
        lam = self.params.frequency
        bracket = (p["a_rate"] * p["cos_a"] + p["b_rate"] * p["sin_a"]) ** 2 + (lam * p["sin_a"]) ** 2
        out = np.log(bracket / (lam**2 * self.base.initial_value)) + 2 * p["b"]
        return float(out[0]) if scalar else out

    def energy_floor_log(self, consts: DerivedConstants, t: ArrayLike) -> ArrayLike:
        """log of the certified lower bound floor * exp((gain*eps*lam - 2*damping)*t)."""
        ts, scalar = _as_grid(t)
        p = self.params
        rate = consts.resonant_gain * p.amplitude * p.frequency - 2 * p.damping_rate
        out = math.log(consts.energy_floor) + rate * ts
        return float(out[0]) if scalar else out

    # -- residual ---------------------------------------------------------------

    def _stencil_states(self, ts: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(D, sin_c, gamma_c) with D_k = w(t + k*h)/exp(b(t)) - sin(a(t)).

        Phase and exponent increments (da, db) are computed locally: exactly
        for constant bases, from a third-order phase expansion plus one Gauss
        panel otherwise. D is assembled through expm1/log1p so every entry
        carries rounding at the scale of the increments, not of the state;
        differencing W directly would round at the scale of a(t) and exp(b)
        and be amplified by 1/h^2 into the residual.
        """
        base, p = self.base, self.params
        lam, eps = p.frequency, p.amplitude
        a_c = _phase_grid(base, lam, ts)
        n = len(ts)
        D = np.zeros((7, n))
        gamma_c = self._speed_from_phase(ts, a_c)
        sin_c, cos_c = np.sin(a_c), np.cos(a_c)
        sin_2c, cos_2c = np.sin(2 * a_c), np.cos(2 * a_c)

        def assemble(idx, da, db):
            # W - sin_c = sin_c*(cos(da)exp(db) - 1) + cos_c*sin(da)exp(db)
            grow = np.expm1(db + np.log1p(-2.0 * np.sin(0.5 * da) ** 2))
            D[idx] = sin_c * grow + cos_c * np.sin(da) * np.exp(db)

        if base.is_constant:
            m = math.sqrt(base.mean)
            for idx, k in enumerate(_OFFSETS):
                if k == 0:
                    continue
                tau = k * h
                da = lam * m * tau
                # sin(2(a_c+da)) - sin(2 a_c), cancellation-free
                delta_sin2 = cos_2c * np.sin(2 * da) - sin_2c * (2 * np.sin(da) ** 2)
                db = (
                    (eps * lam / (4 * m)) * tau
                    - (eps / (8 * base.mean)) * delta_sin2
                    - p.damping_rate * tau
                )
                assemble(idx, da, db)
            return D, sin_c, gamma_c

        from .quadrature import _GL_NODES, _GL_WEIGHTS

        c0_c = base.value(ts)
        sq = np.sqrt(c0_c)
        d_sq = base.derivative(ts) / (2 * sq)
        d2_sq = _d2_sqrt_c0(base, ts)

        def local_phase(tau):
            # tau scalar -> (n,) phases; tau row (1,K) -> (n,K) node phases
            if np.isscalar(tau):
                return lam * (sq * tau + 0.5 * d_sq * tau**2 + (d2_sq / 6) * tau**3)
            return lam * (
                sq[:, None] * tau + 0.5 * d_sq[:, None] * tau**2 + (d2_sq[:, None] / 6) * tau**3
            )

        for idx, k in enumerate(_OFFSETS):
            if k == 0:
                continue
            tau = k * h
            da = local_phase(tau)
            # one 5-point Gauss panel over [0, tau] is exact at this width
            half = tau / 2
            s_off = half * (_GL_NODES[None, :] + 1.0)  # (1,5) offsets, signed
            da_nodes = local_phase(s_off)
            sin_nodes = sin_c[:, None] * np.cos(da_nodes) + cos_c[:, None] * np.sin(da_nodes)
            c0_nodes = base.value(ts[:, None] + s_off)
            integral = half * ((sin_nodes**2 / np.sqrt(c0_nodes)) @ _GL_WEIGHTS)
            db = (
                0.5 * eps * lam * integral
                - 0.25 * (np.log(base.value(ts + tau)) - np.log(c0_c))
                - p.damping_rate * tau
            )
            assemble(idx, da, db)
        return D, sin_c, gamma_c

    def residual_max(self, grid: np.ndarray) -> float:
        """Max normalized residual of w'' + 2*delta*lam^(2s)*w' + lam^2*gamma*w.

        w'' and w' come from 6th-order central differences of the closed form
        at step h = min(1e-4/lam, grid_step/8); the residual is normalized by
        lam^2 * max(|w|, exp(b)/lam).
        """
        ts = np.asarray(grid, dtype=float)
        if ts.ndim != 1 or len(ts) < 2:
            raise InvalidInputError("residual grid needs at least 2 points")
        if np.any(np.diff(ts) <= 0):
            raise InvalidInputError("residual grid must be increasing")
        lam = self.params.frequency
        h = min(1e-4 / lam, float(np.min(np.diff(ts))) / 8)
        t_big = float(ts[-1])
        if t_big + 3 * h == t_big and t_big > 0:
            raise InvalidInputError("stencil step underflows at this frequency/time")

        D, sin_c, gamma_c = self._stencil_states(ts, h)
        # stencil weights sum to zero, so W and D = W - sin(a_c) difference alike
        second = (_FD2 @ D) / h**2
        first = (_FD1 @ D) / h
        res = second + 2 * self.params.damping_rate * first + lam**2 * gamma_c * sin_c
        norm = lam**2 * np.maximum(np.abs(sin_c), 1.0 / lam)
        return float(np.max(np.abs(res) / norm))


def closed_form_residual(base: SmoothBaseSpeed, params: ResonanceParams, grid: np.ndarray) -> float:
    return ActivatorSpeed(base, params).residual_max(grid)


def closed_form_log_energy(base: SmoothBaseSpeed, params: ResonanceParams, t: ArrayLike) -> ArrayLike:
    return ActivatorSpeed(base, params).log_energy(t)


def closed_form_state(base: SmoothBaseSpeed, params: ResonanceParams, t: ArrayLike):
    return ActivatorSpeed(base, params).state(t)


def resonant_speed(base: SmoothBaseSpeed, params: ResonanceParams, t: ArrayLike) -> ArrayLike:
    return ActivatorSpeed(base, params).speed(t)


def build_activator(
    params: SpeedClassParams, base: SmoothBaseSpeed, frequency: float
) -> ActivatorSpeed:
    """Activator for one frequency with the canonical amplitude for the class."""
    return ActivatorSpeed(
        base,
        ResonanceParams(
            frequency=frequency,
            amplitude=amplitude_for_frequency(params, frequency),
            damping=params.damping,
            damping_power=params.damping_power,
        ),
    )
