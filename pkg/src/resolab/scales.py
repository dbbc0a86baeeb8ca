"""Spectral scales: Sobolev, Gevrey, ultradistribution, and log variants.

Membership of a coefficient sequence in one of these scales is decided by a
weighted square sum, with per-mode log weight

    sobolev(beta)        4*beta*log(1+lam)
    gevrey(s, r, beta)   ... + 2*r*lam^(1/s)
    hyper(S, R, beta)    ... - 2*R*lam^(1/S)
    gevrey_log(s, beta)  ... + 2*lam^(1/s)/log(2+lam)
    hyper_log(S, beta)   ... - 2*lam^(1/S)/log(2+lam)

Natural logarithms throughout. Infinite sums are never decided from finitely
many terms: the library reports partial sums (always accumulated in the log
domain) plus a trend classification with explicit thresholds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidInputError, UnsupportedComparison

# Sentinel for the logarithm of an empty or all-zero sum.
LOG_ZERO = float("-inf")


@dataclass(frozen=True)
class EigenvalueSequence:
    """Square roots lam_i of the operator eigenvalues, nondecreasing.

    summable marks that sum(lam_i^-2) converges; it is certified (set True)
    only by the geometric constructor, where the tail is a geometric series.
    """

    values: np.ndarray
    summable: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or len(vals) == 0:
            raise InvalidInputError("eigenvalue sequence must be 1-d and nonempty")
        if np.any(vals <= 0) or np.any(np.diff(vals) < 0):
            raise InvalidInputError("eigenvalues must be positive and nondecreasing")

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def geometric(cls, first: float, ratio: float, count: int) -> "EigenvalueSequence":
        if first <= 0 or ratio <= 1 or count < 1:
            raise InvalidInputError("geometric sequence needs first > 0, ratio > 1, count >= 1")
        return cls(values=first * ratio ** np.arange(count), summable=True)


@dataclass(frozen=True)
class SpectralCoefficients:
    """Coefficients a_i aligned with an eigenvalue sequence.

    Stored as log|a_i| so that exponentially small coefficients (the usual
    case here) never underflow; zero coefficients carry LOG_ZERO.
    """

    eigenvalues: EigenvalueSequence
    log_abs: np.ndarray

    def __post_init__(self):
        la = np.asarray(self.log_abs, dtype=float)
        object.__setattr__(self, "log_abs", la)
        if la.shape != (len(self.eigenvalues),):
            raise InvalidInputError("coefficients must align with the eigenvalue sequence")
        if np.any(np.isnan(la)) or np.any(la == np.inf):
            raise InvalidInputError("log|a_i| must be finite or -inf")

    @classmethod
    def from_values(cls, eig: EigenvalueSequence, values) -> "SpectralCoefficients":
        vals = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("coefficient values must be finite")
        with np.errstate(divide="ignore"):
            return cls(eig, np.log(np.abs(vals)))

    def to_csv(self, path) -> None:
        from .reports import format_float

        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("lambda,a\n")
            for lam, la in zip(self.eigenvalues.values, self.log_abs):
                fh.write(f"{format_float(lam)},{format_float(math.exp(la) if la > -700 else 0.0)}\n")

    @classmethod
    def from_csv(cls, path) -> "SpectralCoefficients":
        rows = Path(path).read_text(encoding="utf-8").strip().splitlines()
        if not rows or rows[0].strip() != "lambda,a":
            raise InvalidInputError(f"{path}: expected header 'lambda,a'")
        lams, vals = [], []
        for row in rows[1:]:
            a, b = row.split(",")
            lams.append(float(a))
            vals.append(float(b))
        return cls.from_values(EigenvalueSequence(np.asarray(lams)), vals)


class ScaleKind(enum.Enum):
    SOBOLEV = "sobolev"
    GEVREY = "gevrey"
    HYPER = "hyper"
    GEVREY_LOG = "gevrey_log"
    HYPER_LOG = "hyper_log"


@dataclass(frozen=True)
class SpectralScale:
    """One of the five weight families; use the named constructors."""

    kind: ScaleKind
    beta: float = 0.0
    order: float = 0.0  # s for Gevrey-type, S for hyper-type
    radius: float = 0.0  # r for gevrey, R for hyper

    def __post_init__(self):
        if self.kind in (ScaleKind.GEVREY, ScaleKind.HYPER):
            if self.order <= 0 or self.radius <= 0:
                raise InvalidInputError("order and radius must be positive")
        elif self.kind in (ScaleKind.GEVREY_LOG, ScaleKind.HYPER_LOG):
            if self.order <= 0:
                raise InvalidInputError("order must be positive")

    @classmethod
    def sobolev(cls, beta: float) -> "SpectralScale":
        return cls(ScaleKind.SOBOLEV, beta=beta)

    @classmethod
    def gevrey(cls, s: float, r: float, beta: float = 0.0) -> "SpectralScale":
        return cls(ScaleKind.GEVREY, beta=beta, order=s, radius=r)

    @classmethod
    def hyper(cls, S: float, R: float, beta: float = 0.0) -> "SpectralScale":
        return cls(ScaleKind.HYPER, beta=beta, order=S, radius=R)

    @classmethod
    def gevrey_log(cls, s: float, beta: float = 0.0) -> "SpectralScale":
        return cls(ScaleKind.GEVREY_LOG, beta=beta, order=s)

    @classmethod
    def hyper_log(cls, S: float, beta: float = 0.0) -> "SpectralScale":
        return cls(ScaleKind.HYPER_LOG, beta=beta, order=S)

    def describe(self) -> str:
        k = self.kind.value
        if self.kind is ScaleKind.SOBOLEV:
            return f"{k}(beta={self.beta})"
        if self.kind in (ScaleKind.GEVREY, ScaleKind.HYPER):
            return f"{k}(order={self.order},radius={self.radius},beta={self.beta})"
        return f"{k}(order={self.order},beta={self.beta})"

    @classmethod
    def parse(cls, text: str) -> "SpectralScale":
        """CLI forms: sobolev:beta, gevrey:s,r,beta, hyper:S,R,beta,
        gevrey-log:s,beta, hyper-log:S,beta."""
        head, _, rest = text.partition(":")
        try:
            nums = [float(x) for x in rest.split(",")] if rest else []
            if head == "sobolev" and len(nums) == 1:
                return cls.sobolev(nums[0])
            if head == "gevrey" and len(nums) == 3:
                return cls.gevrey(*nums)
            if head == "hyper" and len(nums) == 3:
                return cls.hyper(*nums)
            if head == "gevrey-log" and len(nums) == 2:
                return cls.gevrey_log(*nums)
            if head == "hyper-log" and len(nums) == 2:
                return cls.hyper_log(*nums)
        except (ValueError, InvalidInputError) as exc:
            raise InvalidInputError(f"cannot parse scale {text!r}: {exc}") from exc
        raise InvalidInputError(f"cannot parse scale {text!r}")


def log_weight(scale: SpectralScale, lam) -> np.ndarray:
    """Log of the weight multiplying a_i^2 in the squared norm."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr < 0):
        raise InvalidInputError("lambda must be nonnegative")
    out = 4 * scale.beta * np.log1p(lam_arr)
    if scale.kind is ScaleKind.GEVREY:
        out = out + 2 * scale.radius * lam_arr ** (1 / scale.order)
    elif scale.kind is ScaleKind.HYPER:
        out = out - 2 * scale.radius * lam_arr ** (1 / scale.order)
    elif scale.kind is ScaleKind.GEVREY_LOG:
        out = out + 2 * lam_arr ** (1 / scale.order) / np.log(2 + lam_arr)
    elif scale.kind is ScaleKind.HYPER_LOG:
        out = out - 2 * lam_arr ** (1 / scale.order) / np.log(2 + lam_arr)
    return float(out) if np.isscalar(lam) else out


def _log_terms(coeffs: SpectralCoefficients, scale: SpectralScale) -> np.ndarray:
    return 2 * coeffs.log_abs + log_weight(scale, coeffs.eigenvalues.values)


def log_squared_norm_partial(
    coeffs: SpectralCoefficients, scale: SpectralScale, n_terms: int
) -> float:
    """log of sum_{i < n_terms} a_i^2 * weight_i via stable log-sum-exp.

    Returns LOG_ZERO for an empty or all-zero truncation.
    """
    if not (0 <= n_terms <= len(coeffs.eigenvalues)):
        raise InvalidInputError("n_terms must lie within the sequence length")
    terms = _log_terms(coeffs, scale)[:n_terms]
    if len(terms) == 0 or np.all(terms == -np.inf):
        return LOG_ZERO
    return float(logsumexp(terms))


def partial_log_norms(coeffs: SpectralCoefficients, scale: SpectralScale) -> np.ndarray:
    """Log partial sums for every truncation 1..len, for trend probing."""
    terms = _log_terms(coeffs, scale)
    out = np.empty(len(terms))
    with np.errstate(invalid="ignore"):
        running = -np.inf
        for i, t in enumerate(terms):
            running = np.logaddexp(running, t)
            out[i] = running
    return out


class Trend(enum.Enum):
    CONVERGENT = "convergent_trend"
    DIVERGENT = "divergent_trend"
    INCONCLUSIVE = "inconclusive"


def divergence_probe(
    log_partial_sums,
    threshold: float = 50.0,
    shrink_ratio: float = 0.9,
    final_increment: float = 1e-6,
) -> Trend:
    """Classify the trend of a log-domain sequence of partial sums.

    divergent: the last-third increments are positive and nondecreasing and
    the final value exceeds `threshold`. convergent: the last-third increments
    shrink geometrically (successive ratio < shrink_ratio) and the last one is
    below `final_increment`. Anything else is inconclusive; no claim about
    the infinite sum is ever made from a finite prefix.
    """
    seq = np.asarray(log_partial_sums, dtype=float)
    if seq.ndim != 1 or len(seq) < 8:
        raise InvalidInputError("need at least 8 partial sums")
    inc = np.diff(seq)
    tail = inc[-max(1, len(inc) // 3):]

    slack = 1e-12 * np.maximum(np.abs(tail[:-1]), 1.0)
    if np.all(tail > 0) and np.all(np.diff(tail) >= -slack) and seq[-1] > threshold:
        return Trend.DIVERGENT

    if np.all(tail >= 0) and tail[-1] < final_increment:
        prev, nxt = tail[:-1], tail[1:]
        ok = np.all(nxt <= shrink_ratio * prev + 1e-300)
        if ok:
            return Trend.CONVERGENT
    return Trend.INCONCLUSIVE


# -- symbolic embedding comparison -------------------------------------------


def _growth_terms(scale: SpectralScale, sign: float) -> list[tuple[float, int, float]]:
    """(exponent, tier, coeff) growth terms of sign*log_weight.

    tier 1 is a pure power lam^p, tier 0 is lam^p/log(2+lam) (strictly smaller
    at the same exponent), tier -1 is log(1+lam).
    """
    terms = [(0.0, -1, sign * 4 * scale.beta)]
    if scale.kind is ScaleKind.GEVREY:
        terms.append((1 / scale.order, 1, sign * 2 * scale.radius))
    elif scale.kind is ScaleKind.HYPER:
        terms.append((1 / scale.order, 1, -sign * 2 * scale.radius))
    elif scale.kind is ScaleKind.GEVREY_LOG:
        terms.append((1 / scale.order, 0, sign * 2))
    elif scale.kind is ScaleKind.HYPER_LOG:
        terms.append((1 / scale.order, 0, -sign * 2))
    elif scale.kind is not ScaleKind.SOBOLEV:
        raise UnsupportedComparison(f"unknown scale kind {scale.kind!r}")
    return terms


def embedding_check(source: SpectralScale, target: SpectralScale) -> bool:
    """True iff log_weight(target) - log_weight(source) -> -inf as lam -> inf.

    Decided symbolically by collecting the growth terms of the difference and
    inspecting the strongest one, so no finite evaluation point is trusted.
    Membership in the source scale then forces membership in the target.
    Identical scales compare False (the difference is bounded, not -> -inf).
    """
    combined: dict[tuple[float, int], float] = {}
    for p, tier, coeff in _growth_terms(target, +1.0) + _growth_terms(source, -1.0):
        combined[(p, tier)] = combined.get((p, tier), 0.0) + coeff
    for (p, tier) in sorted(combined, reverse=True):
        coeff = combined[(p, tier)]
        if coeff != 0.0:
            return coeff < 0
    return False
