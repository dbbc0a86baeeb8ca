"""Direct integration of the spectral oscillator family.

u'' + 2*delta*lam^(2*sigma) u' + lam^2 c(t) u = 0 is integrated as a
first-order system with an adaptive Dormand-Prince 5(4) pair, independently
of any closed form, so the two routes can cross-validate each other. Energies
grow like exp(rate*t) with rate up to hundreds, so the state is renormalized
to unit energy norm whenever it crosses a threshold and the accumulated log
scale is carried in a ledger; reported log-energies include the ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.integrate import solve_ivp

from .errors import AdmissibilityViolation, IntegrationFailure, InvalidInputError
from .speeds import SampledSpeed, SpeedClassParams

SpeedLike = Union[SampledSpeed, Callable[[np.ndarray], np.ndarray]]

RENORM_THRESHOLD = 1e20


@dataclass(frozen=True)
class OscillatorProblem:
    frequency: float
    speed: SpeedLike
    damping: float = 0.0
    damping_power: float = 0.0
    initial_state: tuple[float, float] = (0.0, 1.0)
    # optional admissibility enforcement and step-ceiling reference
    class_params: SpeedClassParams | None = None

    def __post_init__(self):
        if self.frequency <= 0:
            raise InvalidInputError("frequency must be positive")
        if self.damping < 0 or not (0 <= self.damping_power < 0.5):
            raise InvalidInputError("need damping >= 0 and damping power in [0, 1/2)")

    @property
    def damping_rate(self) -> float:
        return self.damping * self.frequency ** (2 * self.damping_power)

    def speed_at(self, t):
        c = self.speed(t)
        if self.class_params is not None:
            lo, hi = self.class_params.speed_min, self.class_params.speed_max
            bad = (np.asarray(c) < lo) | (np.asarray(c) > hi)
            if np.any(bad):
                raise AdmissibilityViolation(
                    f"speed sample {np.asarray(c)[bad].flat[0]!r} outside [{lo}, {hi}] at t={t!r}"
                )
        return c

    @property
    def speed_ceiling(self) -> float:
        if self.class_params is not None:
            return self.class_params.speed_max
        if isinstance(self.speed, SampledSpeed):
            return float(np.max(self.speed.values))
        base = getattr(self.speed, "base", None)
        if base is not None:
            return float(base.max_value) + 1.0
        return max(float(np.max(self.speed(np.linspace(0.0, 1.0, 257)))), 1.0)


@dataclass
class EnergyTrace:
    """Per-time log energy log(|u'|^2 + lam^2 |u|^2) with its renorm ledger."""

    times: np.ndarray
    log_energy: np.ndarray
    renorm_log: np.ndarray  # cumulative log scale removed from the raw state
    renorm_events: list[tuple[float, float]] = field(default_factory=list)
    raw_norm_bounds: tuple[float, float] = (1.0, 1.0)

    def to_csv(self, path) -> None:
        from .reports import format_float

        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,log_energy\n")
            for t, le in zip(self.times, self.log_energy):
                fh.write(f"{format_float(t)},{format_float(le)}\n")


def _energy_norm(state: np.ndarray, lam: float) -> float:
    return math.hypot(lam * state[0], state[1])


def integrate_renormalized(
    problem: OscillatorProblem,
    t_end: float,
    rel_tol: float,
    grid: np.ndarray | None = None,
    renorm_threshold: float = RENORM_THRESHOLD,
) -> tuple[EnergyTrace, np.ndarray, float]:
    """Integrate the oscillator to t_end, renormalizing the state as it grows.

    Returns (trace, final normalized state, final log scale). The trace is
    evaluated on `grid` (default: 513 uniform points). Renormalization checks
    happen at grid times; grids must be fine enough that growth between
    checks stays far from overflow, which every caller here satisfies.
    """
    if t_end <= 0:
        raise InvalidInputError("t_end must be positive")
    if not (1e-12 <= rel_tol <= 1e-3):
        raise InvalidInputError("rel_tol must lie in [1e-12, 1e-3]")
    if grid is None:
        grid = np.linspace(0.0, t_end, 513)
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0.0 or np.any(np.diff(grid) <= 0) or abs(grid[-1] - t_end) > 1e-12:
        raise InvalidInputError("grid must increase from 0 to t_end")

    lam = problem.frequency
    two_damp = 2 * problem.damping_rate
    lam2 = lam * lam

    def rhs(t, y):
        c = problem.speed_at(t)
        return (y[1], -two_damp * y[1] - lam2 * c * y[0])

    max_step = 2 * math.pi / (16 * lam * math.sqrt(problem.speed_ceiling))

    y = np.array(problem.initial_state, dtype=float)
    ledger = 0.0
    log_energy = np.empty(len(grid))
    renorm_log = np.empty(len(grid))
    events: list[tuple[float, float]] = []
    raw_lo = raw_hi = _energy_norm(y, lam) if _energy_norm(y, lam) > 0 else 1.0

    norm0 = _energy_norm(y, lam)
    if norm0 == 0:
        raise InvalidInputError("initial state must be nonzero")
    log_energy[0] = 2 * math.log(norm0) + 2 * ledger
    renorm_log[0] = ledger

    for j in range(1, len(grid)):
        t0, t1 = grid[j - 1], grid[j]
        # atol proportional to the segment's starting norm keeps the error
        # control scale-covariant, so renormalization cannot change the path
        atol = rel_tol * max(_energy_norm(y, lam) / max(lam, 1.0), 1e-290)
        sol = solve_ivp(
            rhs,
            (t0, t1),
            y,
            method="RK45",
            rtol=rel_tol,
            atol=atol,
            max_step=max_step,
            dense_output=False,
        )
        if not sol.success or not np.all(np.isfinite(sol.y[:, -1])):
            last = sol.t[-1] if len(sol.t) else t0
            raise IntegrationFailure("integration produced a non-finite state", float(last))
        y = sol.y[:, -1].copy()
        norm = _energy_norm(y, lam)
        if not np.isfinite(norm) or norm == 0:
            raise IntegrationFailure("state norm left the representable range", float(t1))
        raw_lo, raw_hi = min(raw_lo, norm), max(raw_hi, norm)
        log_energy[j] = 2 * math.log(norm) + 2 * ledger
        if norm > renorm_threshold or norm < 1.0 / renorm_threshold:
            ledger += math.log(norm)
            y /= norm
            events.append((float(t1), math.log(norm)))
        renorm_log[j] = ledger

    trace = EnergyTrace(
        times=grid,
        log_energy=log_energy,
        renorm_log=renorm_log,
        renorm_events=events,
        raw_norm_bounds=(raw_lo, raw_hi),
    )
    return trace, y, ledger


def growth_exponent_fit(trace: EnergyTrace, window: tuple[float, float]) -> float:
    """Least-squares slope of log-energy per unit time over a window."""
    lo, hi = window
    if hi <= lo:
        raise InvalidInputError("window must have positive length")
    if lo < trace.times[0] - 1e-12 or hi > trace.times[-1] + 1e-12:
        raise InvalidInputError("window lies outside the trace")
    mask = (trace.times >= lo) & (trace.times <= hi)
    if int(mask.sum()) < 10:
        raise InvalidInputError("window must contain at least 10 trace points")
    coeffs = np.polyfit(trace.times[mask], trace.log_energy[mask], 1)
    return float(coeffs[0])


def constant_speed_log_energy(
    value: float, frequency: float, damping: float, damping_power: float, t
) -> np.ndarray:
    """Exact log energy for a constant speed with data (0, 1).

    For u'' + 2d u' + k^2 v u = 0 (d = delta*lam^(2 sigma), k = lam) the
    underdamped solution is u = exp(-d t) sin(om t)/om, om = sqrt(k^2 v - d^2).
    """
    if value <= 0:
        raise InvalidInputError("constant speed must be positive")
    d = damping * frequency ** (2 * damping_power)
    om_sq = frequency**2 * value - d**2
    if om_sq <= 0:
        raise InvalidInputError("overdamped constant-speed regime is out of scope")
    om = math.sqrt(om_sq)
    ts = np.asarray(t, dtype=float)
    s, c = np.sin(om * ts), np.cos(om * ts)
    bracket = (c - (d / om) * s) ** 2 + (frequency**2 / om_sq) * s**2
    return -2 * d * ts + np.log(bracket)
