"""Propagation speeds: admissibility classes and grid Hölder estimation.

A propagation speed is admissible for parameters (mu1, mu2, alpha, H) when it
stays inside [mu1, mu2] (strict hyperbolicity) and its Hölder constant of
order alpha is at most H. The continuum Hölder constant

    sup |c(t) - c(s)| / |t - s|^alpha   over t != s

is estimated here on finite sample grids; every estimate is a lower bound for
the true constant restricted to the grid, and the grid resolution is recorded
so analytic upper bounds can serve as the other side in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidInputError

# Full pairwise search is O(N^2); beyond this many samples the estimator
# switches to dyadic separations plus a seeded pseudorandom pair sample.
EXACT_PAIR_LIMIT = 4096

_RANDOM_PAIR_CHUNK = 1_000_000


@dataclass(frozen=True)
class SpeedClassParams:
    """Admissibility parameters: speed bounds, Hölder budget, damping pair.

    Config-file key mapping: mu1, mu2, alpha, H, delta, sigma.
    """

    speed_min: float
    speed_max: float
    alpha: float
    holder_bound: float
    damping: float = 0.0
    damping_power: float = 0.0

    def __post_init__(self):
        if not (0 < self.speed_min < self.speed_max):
            raise InvalidInputError("need 0 < mu1 < mu2")
        if not (0 < self.alpha < 1):
            raise InvalidInputError("alpha must lie in (0, 1)")
        if not self.holder_bound > 0:
            raise InvalidInputError("H must be positive")
        if self.damping < 0:
            raise InvalidInputError("delta must be nonnegative")
        if not (0 <= self.damping_power < 0.5):
            raise InvalidInputError("sigma must lie in [0, 1/2)")


@dataclass(frozen=True)
class SampledSpeed:
    """Speed samples c_j = c(j*step) on a uniform grid starting at t = 0."""

    step: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.step <= 0:
            raise InvalidInputError("step must be positive")
        if self.values.ndim != 1 or len(self.values) < 2:
            raise InvalidInputError("need at least 2 samples")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("speed samples must be finite")

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(len(self.values))

    @property
    def t_end(self) -> float:
        return self.step * (len(self.values) - 1)

    def __call__(self, t):
        """Piecewise-linear interpolation (preserves bounds and grid Hölder)."""
        return np.interp(t, self.times, self.values)

    def to_csv(self, path) -> None:
        from .reports import format_float

        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,c\n")
            for t, c in zip(self.times, self.values):
                fh.write(f"{format_float(t)},{format_float(c)}\n")

    @classmethod
    def from_csv(cls, path) -> "SampledSpeed":
        rows = Path(path).read_text(encoding="utf-8").strip().splitlines()
        if not rows or rows[0].strip() != "t,c":
            raise InvalidInputError(f"{path}: expected header 't,c'")
        ts, cs = [], []
        for row in rows[1:]:
            a, b = row.split(",")
            ts.append(float(a))
            cs.append(float(b))
        ts_arr = np.asarray(ts)
        if len(ts_arr) < 2 or np.any(np.diff(ts_arr) <= 0):
            raise InvalidInputError(f"{path}: t column must be increasing with >= 2 rows")
        step = ts_arr[1] - ts_arr[0]
        if not np.allclose(np.diff(ts_arr), step, rtol=1e-9, atol=1e-12):
            raise InvalidInputError(f"{path}: t column must be uniformly spaced")
        return cls(step=float(step), values=np.asarray(cs))


@dataclass(frozen=True)
class HolderEstimate:
    """Grid estimate of a Hölder constant (a lower bound for the true one)."""

    alpha: float
    value: float
    witness_pair: tuple[float, float]
    resolution: float
    pairs_examined: int
    exact: bool


def _best_at_separation(values: np.ndarray, d: int, denom: float):
    diffs = np.abs(values[d:] - values[:-d])
    j = int(np.argmax(diffs))
    return diffs[j] / denom, j


def holder_constant_on_grid(
    speed: SampledSpeed, alpha: float, pair_budget: int, seed: int = 0
) -> HolderEstimate:
    """Max of |c(t1)-c(t2)| / |t1-t2|^alpha over an examined pair set.

    All pairs are examined when the grid has at most EXACT_PAIR_LIMIT samples.
    Larger grids are scanned at every dyadic separation (step, 2*step, ...)
    plus the full span, plus pair_budget seeded pseudorandom pairs, so the
    result is deterministic for a given seed.
    """
    if not (0 < alpha < 1):
        raise InvalidInputError("alpha must lie in (0, 1)")
    n = len(speed.values)
    if pair_budget < n - 1:
        raise InvalidInputError("pair_budget must cover at least the adjacent pairs")

    values, h = speed.values, speed.step
    best = -1.0
    best_pair = (0, 1)
    examined = 0

    if n <= EXACT_PAIR_LIMIT:
        separations: Sequence[int] = range(1, n)
        exact = True
    else:
        separations = sorted(
            {int(d) for d in (2**k for k in range(0, 64)) if d < n} | {n - 1}
        )
        exact = False

    for d in separations:
        q, j = _best_at_separation(values, d, (d * h) ** alpha)
        examined += n - d
        if q > best:
            best, best_pair = q, (j, j + d)

    if not exact:
        rng = np.random.default_rng(seed)
        remaining = int(pair_budget)
        while remaining > 0:
            m = min(remaining, _RANDOM_PAIR_CHUNK)
            i1 = rng.integers(0, n, size=m)
            i2 = rng.integers(0, n, size=m)
            keep = i1 != i2
            i1, i2 = i1[keep], i2[keep]
            lo, hi = np.minimum(i1, i2), np.maximum(i1, i2)
            q = np.abs(values[hi] - values[lo]) / ((hi - lo) * h) ** alpha
            examined += len(q)
            if len(q):
                j = int(np.argmax(q))
                if q[j] > best:
                    best, best_pair = float(q[j]), (int(lo[j]), int(hi[j]))
            remaining -= m

    return HolderEstimate(
        alpha=alpha,
        value=float(max(best, 0.0)),
        witness_pair=(best_pair[0] * h, best_pair[1] * h),
        resolution=h,
        pairs_examined=examined,
        exact=exact,
    )


@dataclass(frozen=True)
class AdmissibilityReport:
    hyperbolicity_ok: bool
    holder_ok: bool
    holder_estimate: HolderEstimate
    speed_min_seen: float
    speed_max_seen: float
    params: SpeedClassParams

    @property
    def admissible(self) -> bool:
        return self.hyperbolicity_ok and self.holder_ok

    def as_keyvalues(self) -> dict[str, object]:
        return {
            "hyperbolicity_ok": self.hyperbolicity_ok,
            "holder_ok": self.holder_ok,
            "admissible": self.admissible,
            "holder_estimate": self.holder_estimate.value,
            "holder_alpha": self.holder_estimate.alpha,
            "holder_witness_t1": self.holder_estimate.witness_pair[0],
            "holder_witness_t2": self.holder_estimate.witness_pair[1],
            "holder_resolution": self.holder_estimate.resolution,
            "holder_exact_pairs": self.holder_estimate.exact,
            "speed_min_seen": self.speed_min_seen,
            "speed_max_seen": self.speed_max_seen,
        }


def verify_admissible(
    speed: SampledSpeed, params: SpeedClassParams, pair_budget: int, seed: int = 0
) -> AdmissibilityReport:
    """Check strict hyperbolicity and the grid Hölder bound for one speed."""
    est = holder_constant_on_grid(speed, params.alpha, pair_budget, seed=seed)
    lo = float(speed.values.min())
    hi = float(speed.values.max())
    return AdmissibilityReport(
        hyperbolicity_ok=bool(params.speed_min <= lo and hi <= params.speed_max),
        holder_ok=bool(est.value <= params.holder_bound),
        holder_estimate=est,
        speed_min_seen=lo,
        speed_max_seen=hi,
        params=params,
    )


def tail_max(values: Sequence[float]) -> float:
    """Max over the last third of a sequence (finite-n stand-in for limsup)."""
    values = list(values)
    if not values:
        raise InvalidInputError("empty sequence")
    k = max(1, len(values) // 3)
    return max(values[-k:])


@dataclass(frozen=True)
class SumHolderReport:
    """Outcome of the asymptotic Hölder-of-a-sum probe.

    The sum of two Hölder functions where one family is equi-Lipschitz and
    the other decays uniformly has asymptotic Hölder constant at most the max
    (not the sum) of the two asymptotic constants; limsup is rendered at
    finite n as the max over the last third of the sequence.
    """

    limsup_sum: float
    limsup_f: float
    limsup_g: float
    inequality_ok: bool
    preconditions_ok: bool
    detail: str = ""
    sum_estimates: tuple[float, ...] = field(default=())
    f_estimates: tuple[float, ...] = field(default=())
    g_estimates: tuple[float, ...] = field(default=())


def sum_holder_probe(
    f_seq: Sequence[SampledSpeed],
    g_seq: Sequence[SampledSpeed],
    alpha: float,
    lipschitz_bound: float,
    tolerance: float = 1e-2,
    pair_budget: int | None = None,
    seed: int = 0,
    decay_tolerance: float = 1e-9,
) -> SumHolderReport:
    """Compare grid Hölder constants of f_n + g_n against max(f_n, g_n).

    Preconditions are checked, not assumed: every f_n must satisfy the
    equi-Lipschitz bound on its grid, and sup|g_n| must be nonincreasing
    (within decay_tolerance). A violated precondition yields a report with
    preconditions_ok=False rather than an exception.
    """
    if len(f_seq) != len(g_seq):
        raise InvalidInputError("f and g sequences must have equal length")
    if len(f_seq) < 3:
        raise InvalidInputError("need at least 3 pairs of functions")

    for k, f in enumerate(f_seq):
        grid_lip = float(np.max(np.abs(np.diff(f.values)))) / f.step
        if grid_lip > lipschitz_bound * (1 + 1e-12) + 1e-12:
            return SumHolderReport(
                np.nan, np.nan, np.nan, False, False,
                detail=f"f[{k}] violates the Lipschitz bound: {grid_lip} > {lipschitz_bound}",
            )

    sups = [float(np.max(np.abs(g.values))) for g in g_seq]
    for k in range(1, len(sups)):
        if sups[k] > sups[k - 1] + decay_tolerance:
            return SumHolderReport(
                np.nan, np.nan, np.nan, False, False,
                detail=f"sup|g| not nonincreasing at index {k}: {sups[k-1]} -> {sups[k]}",
            )

    def estimate(speed: SampledSpeed) -> float:
        budget = pair_budget if pair_budget is not None else 2 * len(speed.values)
        return holder_constant_on_grid(speed, alpha, budget, seed=seed).value

    hs, hf, hg = [], [], []
    for f, g in zip(f_seq, g_seq):
        if len(f.values) != len(g.values) or abs(f.step - g.step) > 1e-15 * f.step:
            raise InvalidInputError("paired f_n and g_n must share their grid")
        hs.append(estimate(SampledSpeed(f.step, f.values + g.values)))
        hf.append(estimate(f))
        hg.append(estimate(g))

    limsup_sum, limsup_f, limsup_g = tail_max(hs), tail_max(hf), tail_max(hg)
    return SumHolderReport(
        limsup_sum=limsup_sum,
        limsup_f=limsup_f,
        limsup_g=limsup_g,
        inequality_ok=bool(limsup_sum <= max(limsup_f, limsup_g) + tolerance),
        preconditions_ok=True,
        sum_estimates=tuple(hs),
        f_estimates=tuple(hf),
        g_estimates=tuple(hg),
    )
