"""Config parsing, the acceptance-matrix suites, and the verify-all driver.

Config files are flat key=value text. Keys per suite (spec'd names; the mu*/H
keys map onto SpeedClassParams fields speed_min/speed_max/holder_bound):

  experiment gevrey-critical: mu1 mu2 alpha H delta sigma r0 lambda0
      num_frequencies t_max grid_points seed divergence_threshold
  experiment damping-critical: as above without r0
  probe ck-membership: mu1 mu2 alpha H delta sigma speed k imax lambda0
      grid_points seed          (speed: const:V | activator:N | file:PATH)
  probe empty-interior: mu1 mu2 alpha H delta sigma base eps0 k0 n_max
      lambda0 grid_points seed  (base: const:V | sin:m,A,omega,phi)

Unknown keys are rejected with their line number; numeric keys are parsed at
full precision. Reruns with identical configs produce identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import experiments as xp
from .activator import (
    ActivatorSpeed,
    DerivedConstants,
    ResonanceParams,
    SmoothBaseSpeed,
    amplitude_for_frequency,
    build_activator,
)
from .errors import ConfigError, InvalidInputError
from .experiments import (
    Certificate,
    CriticalDampingConfig,
    CriticalGevreyConfig,
    blowup_time,
    empty_interior_probe,
    nonactivator_test,
    run_damping_critical,
    run_gevrey_critical,
)
from .oscillator import OscillatorProblem, growth_exponent_fit, integrate_renormalized
from .reports import format_float, read_keyvalue_lines, write_keyvalues
from .scales import (
    EigenvalueSequence,
    SpectralCoefficients,
    SpectralScale,
    Trend,
    divergence_probe,
    log_squared_norm_partial,
    embedding_check,
)
from .speeds import SampledSpeed, SpeedClassParams, sum_holder_probe, tail_max, verify_admissible

REFERENCE_CLASS = SpeedClassParams(speed_min=1.0, speed_max=4.0, alpha=0.5, holder_bound=8.0)

_CLASS_KEYS = ("mu1", "mu2", "alpha", "H", "delta", "sigma")
_GEVREY_KEYS = _CLASS_KEYS + (
    "r0", "lambda0", "num_frequencies", "t_max", "grid_points", "seed", "divergence_threshold",
)
_DAMPING_KEYS = tuple(k for k in _GEVREY_KEYS if k != "r0")
_CK_KEYS = _CLASS_KEYS + ("speed", "k", "imax", "lambda0", "grid_points", "seed")
_EMPTY_KEYS = _CLASS_KEYS + ("base", "eps0", "k0", "n_max", "lambda0", "grid_points", "seed")


class _Config:
    def __init__(self, path, allowed: tuple[str, ...]):
        self.path = str(path)
        self.entries: dict[str, tuple[int, str]] = {}
        for no, key, value in read_keyvalue_lines(path):
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} (allowed: {', '.join(allowed)})", line_no=no)
            if key in self.entries:
                raise ConfigError(f"duplicate key {key!r}", line_no=no)
            self.entries[key] = (no, value)
        for key in allowed:
            if key not in self.entries:
                raise ConfigError(f"missing required key {key!r}")

    def line(self, key: str) -> int:
        return self.entries[key][0]

    def str_(self, key: str) -> str:
        return self.entries[key][1]

    def float_(self, key: str) -> float:
        no, raw = self.entries[key]
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: not a number: {raw!r}", line_no=no) from exc

    def int_(self, key: str) -> int:
        no, raw = self.entries[key]
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: not an integer: {raw!r}", line_no=no) from exc

    def class_params(self) -> SpeedClassParams:
        try:
            return SpeedClassParams(
                speed_min=self.float_("mu1"),
                speed_max=self.float_("mu2"),
                alpha=self.float_("alpha"),
                holder_bound=self.float_("H"),
                damping=self.float_("delta"),
                damping_power=self.float_("sigma"),
            )
        except InvalidInputError as exc:
            raise ConfigError(str(exc), line_no=self.line("mu1")) from exc


def _experiment_pieces(cfg: _Config):
    params = cfg.class_params()
    lam0 = cfg.float_("lambda0")
    count = cfg.int_("num_frequencies")
    if count < 8:
        raise ConfigError("num_frequencies must be at least 8", line_no=cfg.line("num_frequencies"))
    grid_points = cfg.int_("grid_points")
    if grid_points < 2:
        raise ConfigError("grid_points must be at least 2", line_no=cfg.line("grid_points"))
    t_max = cfg.float_("t_max")
    if t_max <= 0:
        raise ConfigError("t_max must be positive", line_no=cfg.line("t_max"))
    eig = EigenvalueSequence.geometric(lam0, 2.0, count)
    times = np.linspace(0.0, t_max, grid_points)
    return params, eig, times, cfg.int_("seed"), cfg.float_("divergence_threshold")


def load_gevrey_config(path) -> CriticalGevreyConfig:
    cfg = _Config(path, _GEVREY_KEYS)
    params, eig, times, seed, threshold = _experiment_pieces(cfg)
    try:
        return CriticalGevreyConfig(
            params=params,
            r0=cfg.float_("r0"),
            eigenvalues=eig,
            times=times,
            seed=seed,
            divergence_threshold=threshold,
        )
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from exc


def load_damping_config(path) -> CriticalDampingConfig:
    cfg = _Config(path, _DAMPING_KEYS)
    params, eig, times, seed, threshold = _experiment_pieces(cfg)
    try:
        return CriticalDampingConfig(
            params=params,
            eigenvalues=eig,
            times=times,
            seed=seed,
            divergence_threshold=threshold,
        )
    except InvalidInputError as exc:
        raise ConfigError(str(exc), line_no=cfg.line("delta")) from exc


@dataclass(frozen=True)
class CkProbeConfig:
    params: SpeedClassParams
    speed: object
    k: int
    imax: int
    eigenvalues: EigenvalueSequence
    times: np.ndarray
    seed: int


def _parse_probe_speed(text: str, params: SpeedClassParams, eig: EigenvalueSequence):
    head, _, rest = text.partition(":")
    if head == "const":
        return float(rest)
    if head == "activator":
        idx = int(rest)
        if not (0 <= idx < len(eig)):
            raise InvalidInputError(f"activator index {idx} outside the eigenvalue sequence")
        base = SmoothBaseSpeed.constant(0.5 * (params.speed_min + params.speed_max))
        return build_activator(params, base, float(eig.values[idx]))
    if head == "file":
        return SampledSpeed.from_csv(rest)
    raise InvalidInputError(f"unknown speed spec {text!r} (use const:V, activator:N, or file:PATH)")


def load_ck_config(path) -> CkProbeConfig:
    cfg = _Config(path, _CK_KEYS)
    params = cfg.class_params()
    k = cfg.int_("k")
    imax = cfg.int_("imax")
    eig = EigenvalueSequence.geometric(cfg.float_("lambda0"), 2.0, imax + 1)
    try:
        speed = _parse_probe_speed(cfg.str_("speed"), params, eig)
    except InvalidInputError as exc:
        raise ConfigError(str(exc), line_no=cfg.line("speed")) from exc
    times = np.linspace(0.0, float(k), cfg.int_("grid_points"))
    return CkProbeConfig(params, speed, k, imax, eig, times, cfg.int_("seed"))


@dataclass(frozen=True)
class EmptyInteriorConfig:
    params: SpeedClassParams
    base: SmoothBaseSpeed
    eps0: float
    k0: int
    n_max: int
    eigenvalues: EigenvalueSequence
    grid_points: int
    seed: int


def load_empty_interior_config(path) -> EmptyInteriorConfig:
    cfg = _Config(path, _EMPTY_KEYS)
    params = cfg.class_params()
    try:
        base = SmoothBaseSpeed.parse(cfg.str_("base"))
    except InvalidInputError as exc:
        raise ConfigError(str(exc), line_no=cfg.line("base")) from exc
    n_max = cfg.int_("n_max")
    eig = EigenvalueSequence.geometric(cfg.float_("lambda0"), 2.0, n_max + 1)
    return EmptyInteriorConfig(
        params=params,
        base=base,
        eps0=cfg.float_("eps0"),
        k0=cfg.int_("k0"),
        n_max=n_max,
        eigenvalues=eig,
        grid_points=cfg.int_("grid_points"),
        seed=cfg.int_("seed"),
    )


def reference_config_path(name: str) -> Path:
    """Path of one of the packaged reference configs (*.cfg)."""
    return Path(resources.files("resolab").joinpath(f"configs/{name}.cfg"))


# -- acceptance-matrix suites ---------------------------------------------------


def suite_constants() -> list[Certificate]:
    p = REFERENCE_CLASS
    c = DerivedConstants.from_class(p)
    refs = {
        "energy_floor": (c.energy_floor, 0.03125),
        "resonant_gain": (c.resonant_gain, 0.125),
        "critical_rate": (c.critical_rate, 8.0 / (16.0 * 4.0**0.75)),
        "damping_threshold": (c.damping_threshold, 8.0 / (32.0 * 4.0**0.75)),
        "blowup_time_r0_1": (blowup_time(p, 1.0), 32.0 * 4.0**0.75 / 8.0),
    }
    ok = all(abs(a - b) <= 1e-9 for a, b in refs.values())
    printed = (
        round(c.critical_rate, 7) == 0.1767767
        and round(c.damping_threshold, 7) == 0.0883883
        and round(blowup_time(p, 1.0), 7) == 11.3137085
    )
    cross = abs(c.critical_rate - p.holder_bound * c.resonant_gain / (4 * p.speed_max ** (p.alpha / 2))) <= 1e-12
    linear = abs(blowup_time(p, 2.0) - 2 * blowup_time(p, 1.0)) <= 1e-12
    details = {k: v[0] for k, v in refs.items()}
    details["printed_digits_match"] = printed
    return [Certificate("derived_constants", ok and printed and cross and linear, details)]


def suite_residual() -> list[Certificate]:
    base = SmoothBaseSpeed.constant(1.0)
    grid = np.linspace(0.0, 5.0, 2001)
    certs = []
    for lam in (2.0**6, 2.0**8, 2.0**10):
        act = build_activator(REFERENCE_CLASS, base, lam)
        value = act.residual_max(grid)
        certs.append(
            Certificate(
                f"residual_lambda_{int(lam)}",
                value < 1e-5,
                {"max_relative_residual": value},
            )
        )
    return certs


def suite_integrator() -> list[Certificate]:
    conserved = OscillatorProblem(frequency=32.0, speed=lambda t: np.ones_like(np.asarray(t, float)))
    trace, _, _ = integrate_renormalized(conserved, 10.0, rel_tol=1e-9)
    drift = float(np.max(np.abs(trace.log_energy)))

    act = build_activator(REFERENCE_CLASS, SmoothBaseSpeed.constant(2.5), 2.0**8)
    grid = np.linspace(0.0, 2.0, 201)
    problem = OscillatorProblem(frequency=2.0**8, speed=act, class_params=REFERENCE_CLASS)
    trace2, _, _ = integrate_renormalized(problem, 2.0, rel_tol=1e-9, grid=grid)
    gap = float(np.max(np.abs(trace2.log_energy - np.asarray(act.log_energy(grid)))))
    return [
        Certificate("constant_speed_conservation", drift < 1e-6, {"max_abs_log_energy": drift}),
        Certificate("closed_form_cross_check", gap < 1e-3, {"max_abs_gap": gap}),
    ]


_ENERGY_RANGE = tuple(2.0**k for k in range(8, 15))


def suite_energy_bound() -> list[Certificate]:
    base = SmoothBaseSpeed.constant(2.5)
    consts = DerivedConstants.from_class(REFERENCE_CLASS)
    t_hi = 2 * blowup_time(REFERENCE_CLASS, 1.0)
    grid = np.linspace(0.0, t_hi, 2049)
    worst = math.inf
    violations = 0
    for lam in _ENERGY_RANGE:
        act = build_activator(REFERENCE_CLASS, base, lam)
        margin = np.asarray(act.log_energy(grid)) - np.asarray(act.energy_floor_log(consts, grid))
        violations += int(np.sum(margin < 0))
        worst = min(worst, float(margin.min()))
    return [
        Certificate(
            "energy_lower_bound",
            violations == 0,
            {"violations": violations, "min_margin": worst, "t_max": t_hi},
        )
    ]


def suite_speed_quality(seed: int = 20240811) -> list[Certificate]:
    base = SmoothBaseSpeed.constant(2.5)
    t_hi = 2 * blowup_time(REFERENCE_CLASS, 1.0)
    sup_distances, holders = [], []
    all_admissible = True
    for lam in _ENERGY_RANGE:
        act = build_activator(REFERENCE_CLASS, base, lam)
        sampled = act.sample(t_hi, REFERENCE_CLASS)
        report = verify_admissible(sampled, REFERENCE_CLASS, 2 * len(sampled.values), seed=seed)
        all_admissible &= report.admissible
        holders.append(report.holder_estimate.value)
        sup_distances.append(float(np.max(np.abs(sampled.values - base.value(sampled.times)))))
    nonincreasing = all(b <= a + 1e-12 for a, b in zip(sup_distances, sup_distances[1:]))
    holder_tail = tail_max(holders)
    bound = max(0.0, REFERENCE_CLASS.holder_bound / 2) + 1e-2
    return [
        Certificate("speeds_admissible", all_admissible, {"holder_values": holders}),
        Certificate(
            "sup_distance_decay",
            nonincreasing and sup_distances[-1] < 0.05,
            {"sup_distances": sup_distances},
        ),
        Certificate(
            "holder_tail_bound",
            holder_tail <= bound,
            {"tail_max": holder_tail, "bound": bound},
        ),
    ]


def suite_gevrey_split() -> list[Certificate]:
    p = REFERENCE_CLASS
    base = SmoothBaseSpeed.constant(2.5)
    t0 = blowup_time(p, 1.0)
    lams = 2.0 ** np.arange(21)
    certs = []
    for factor, want_high in ((1.2, True), (0.8, False)):
        t = factor * t0
        psi = np.array([xp.log_psi_gevrey(p, 1.0, lam, t) for lam in lams])
        if want_high:
            terms = np.array(
                [
                    float(np.asarray(build_activator(p, base, lam).log_energy(t)))
                    - float(xp._loss_rate(p, lam)) * t
                    + psi[j]
                    for j, lam in enumerate(lams)
                ]
            )
            partials = np.logaddexp.accumulate(terms)
            trend = divergence_probe(partials)
            certs.append(
                Certificate(
                    "split_above_t0",
                    psi[-1] > 100 and trend is Trend.DIVERGENT,
                    {"log_psi_20": float(psi[-1]), "trend": trend.value},
                )
            )
        else:
            tail = psi[-max(1, len(psi) // 3):]
            certs.append(
                Certificate(
                    "split_below_t0",
                    psi[-1] < -100 and bool(np.all(np.diff(tail) < 0)),
                    {"log_psi_20": float(psi[-1])},
                )
            )
    return certs


DAMPING_SPLIT_LAMBDA0 = 1e70


def suite_damping_split() -> list[Certificate]:
    base_kwargs = dict(speed_min=1.0, speed_max=4.0, alpha=0.5, holder_bound=8.0, damping_power=0.25)
    lams = DAMPING_SPLIT_LAMBDA0 * 2.0 ** np.arange(31)
    certs = []
    low = SpeedClassParams(damping=0.04, **base_kwargs)
    high = SpeedClassParams(damping=0.12, **base_kwargs)
    for t in (0.25, 1.0, 4.0):
        psi_low = xp.log_psi_damping(low, lams, t)
        trend = divergence_probe(psi_low)
        psi_high = xp.log_psi_damping(high, lams, t)
        tail = psi_high[-max(1, len(psi_high) // 3):]
        decreasing = bool(np.all(np.diff(tail) < 0)) and psi_high[-1] < -50
        certs.append(
            Certificate(
                f"damping_split_t_{format_float(t)}",
                trend is Trend.DIVERGENT and decreasing,
                {
                    "below_threshold_trend": trend.value,
                    "below_final": float(psi_low[-1]),
                    "above_final": float(psi_high[-1]),
                },
            )
        )

    threshold = DerivedConstants.from_class(low).damping_threshold
    try:
        CriticalDampingConfig(
            params=SpeedClassParams(damping=0.09, **base_kwargs),
            eigenvalues=EigenvalueSequence.geometric(DAMPING_SPLIT_LAMBDA0, 2.0, 31),
            times=np.linspace(0.0, 4.0, 17),
        )
        rejected, message = False, ""
    except InvalidInputError as exc:
        rejected, message = True, str(exc)
    certs.append(
        Certificate(
            "damping_config_rejection",
            rejected and format_float(threshold)[:9] in message,
            {"message": message},
        )
    )
    return certs


def suite_norms() -> list[Certificate]:
    eig = EigenvalueSequence.geometric(1.0, 2.0, 21)
    coeffs = SpectralCoefficients(eig, -np.log(eig.values) - np.sqrt(eig.values))
    value = log_squared_norm_partial(coeffs, SpectralScale.gevrey(2.0, 1.0), 20)
    expected = math.log(sum(4.0**-i for i in range(20)))
    geometric_ok = abs(value - expected) <= 1e-9

    table = [
        (SpectralScale.gevrey_log(2.0), SpectralScale.gevrey(2.5, 3.0, 7.0), True),
        (SpectralScale.gevrey_log(2.0), SpectralScale.gevrey(2.0, 5.0), False),
        (SpectralScale.gevrey_log(2.0), SpectralScale.gevrey(1.5, 1.0), False),
        (SpectralScale.hyper(2.5, 1.0, 3.0), SpectralScale.hyper_log(2.0), True),
        (SpectralScale.hyper(2.0, 1.0), SpectralScale.hyper_log(2.0), False),
        (SpectralScale.gevrey(2.0, 1.0), SpectralScale.gevrey(2.0, 2.0), False),
        (SpectralScale.gevrey(2.0, 2.0), SpectralScale.gevrey(2.0, 1.0), True),
    ]
    matrix_ok = all(embedding_check(src, dst) is want for src, dst, want in table)
    return [
        Certificate("geometric_norm_value", geometric_ok, {"log_partial": value, "expected": expected}),
        Certificate("embedding_truth_table", matrix_ok, {"pairs": len(table)}),
    ]


def suite_baire() -> list[Certificate]:
    p = REFERENCE_CLASS
    eig = EigenvalueSequence.geometric(1.0, 2.0, 37)
    member = nonactivator_test(1.0, 33, eig, imax=36, params=p)
    act = build_activator(p, SmoothBaseSpeed.constant(2.5), float(eig.values[33]))
    nonmember = nonactivator_test(act, 33, eig, imax=33, params=p)
    probe = empty_interior_probe(
        SmoothBaseSpeed.constant(2.5), 0.5, 40, p, EigenvalueSequence.geometric(1.0, 2.0, 25)
    )
    found = probe.found is not None and probe.found.index <= 20
    return [
        Certificate(
            "ck_constant_speed_member",
            member.member and member.witness_t is not None,
            {"witness_t": member.witness_t or -1.0},
        ),
        Certificate(
            "ck_activator_nonmember",
            not nonmember.member,
            {"violated_times": len(nonmember.violations)},
        ),
        Certificate(
            "empty_interior_escape",
            found,
            probe.as_keyvalues(),
        ),
    ]


def suite_lemma() -> list[Certificate]:
    alpha = 0.5
    certs = []

    # family 1: pure shrinking oscillation, f = 0
    f1, g1 = [], []
    for n in range(1, 7):
        freq = 4.0**n
        step = 2 * math.pi / (32 * 2 * freq)
        ts = step * np.arange(int(1.0 / step) + 1)
        f1.append(SampledSpeed(step, np.zeros_like(ts)))
        g1.append(SampledSpeed(step, np.sin(2 * freq * ts) / n))
    r1 = sum_holder_probe(f1, g1, alpha, lipschitz_bound=0.0)
    certs.append(
        Certificate(
            "lemma_family_oscillatory",
            r1.preconditions_ok and r1.inequality_ok and abs(r1.limsup_sum - r1.limsup_g) < 1e-12,
            {"limsup_sum": r1.limsup_sum, "limsup_g": r1.limsup_g},
        )
    )

    # family 2: shrinking linear ramps, g = 0
    f2, g2 = [], []
    for n in range(1, 7):
        ts = np.linspace(0.0, 1.0, 513)
        f2.append(SampledSpeed(ts[1], ts / (n + 1)))
        g2.append(SampledSpeed(ts[1], np.zeros_like(ts)))
    r2 = sum_holder_probe(f2, g2, alpha, lipschitz_bound=1.0)
    certs.append(
        Certificate(
            "lemma_family_ramp",
            r2.preconditions_ok and r2.inequality_ok and abs(r2.limsup_sum - r2.limsup_f) < 1e-12,
            {"limsup_sum": r2.limsup_sum, "limsup_f": r2.limsup_f},
        )
    )

    # family 3: smooth/oscillatory split of the activator speeds
    base = SmoothBaseSpeed.sinusoidal(2.5, 0.3, 1.0)
    f3, g3 = [], []
    for n in range(4, 11):
        act = build_activator(REFERENCE_CLASS, base, 2.0**n)
        step = 2 * math.pi / (32 * 2.0**n * math.sqrt(base.max_value))
        ts = step * np.arange(int(2.0 / step) + 1)
        f3.append(SampledSpeed(step, np.asarray(act.smooth_part(ts))))
        g3.append(SampledSpeed(step, np.asarray(act.oscillatory_part(ts))))
    r3 = sum_holder_probe(f3, g3, alpha, lipschitz_bound=base.sup_derivative + 1.0)
    consts_bound = 2 * REFERENCE_CLASS.speed_max ** (alpha / 2) * amplitude_for_frequency(
        REFERENCE_CLASS, 2.0**10
    ) * (2.0**10) ** alpha
    certs.append(
        Certificate(
            "lemma_family_activator",
            r3.preconditions_ok and r3.inequality_ok and r3.limsup_g <= consts_bound * (1 + 1e-6),
            {"limsup_sum": r3.limsup_sum, "limsup_f": r3.limsup_f, "limsup_g": r3.limsup_g},
        )
    )
    return certs


SUITES = {
    "constants": suite_constants,
    "residual": suite_residual,
    "integrator": suite_integrator,
    "energy-bound": suite_energy_bound,
    "speed-quality": suite_speed_quality,
    "gevrey-split": suite_gevrey_split,
    "damping-split": suite_damping_split,
    "norms": suite_norms,
    "baire": suite_baire,
    "lemma": suite_lemma,
}


def verify_all(out_dir, suites: list[str] | None = None) -> int:
    """Run the acceptance matrix plus the reference experiment runs.

    Writes one certificates.txt summary (plus per-experiment artifacts) under
    out_dir and returns the exit status: 0 when every certificate passed.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    selected = list(SUITES) if suites is None else suites
    unknown = [s for s in selected if s not in SUITES and s != "reference-runs"]
    if unknown:
        raise ConfigError(f"unknown suites: {', '.join(unknown)}")

    all_certs: list[tuple[str, Certificate]] = []
    for name in selected:
        if name == "reference-runs":
            continue
        for cert in SUITES[name]():
            all_certs.append((name, cert))

    if suites is None or "reference-runs" in selected:
        gevrey = run_gevrey_critical(load_gevrey_config(reference_config_path("gevrey_critical")))
        gevrey.write(out / "gevrey-critical")
        all_certs.append(
            ("reference-runs", Certificate("gevrey_reference_run", gevrey.passed, {}))
        )
        damping = run_damping_critical(load_damping_config(reference_config_path("damping_critical")))
        damping.write(out / "damping-critical")
        all_certs.append(
            ("reference-runs", Certificate("damping_reference_run", damping.passed, {}))
        )

    lines = []
    for suite, cert in all_certs:
        lines.append(f"{suite}.{cert.name}={'pass' if cert.passed else 'fail'}")
    ok = all(cert.passed for _, cert in all_certs)
    lines.append(f"all={'pass' if ok else 'fail'}")
    (out / "certificates.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0 if ok else 1


def run_ck_probe(cfg: CkProbeConfig, out_dir) -> int:
    report = nonactivator_test(
        cfg.speed, cfg.k, cfg.eigenvalues, cfg.imax, cfg.params, time_grid=cfg.times
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_keyvalues(out / "ck_membership.txt", report.as_keyvalues())
    return 0


def run_empty_interior_probe(cfg: EmptyInteriorConfig, out_dir) -> int:
    report = empty_interior_probe(
        cfg.base,
        cfg.eps0,
        cfg.k0,
        cfg.params,
        cfg.eigenvalues,
        n_max=cfg.n_max,
        time_grid_points=cfg.grid_points,
        seed=cfg.seed,
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_keyvalues(out / "empty_interior.txt", report.as_keyvalues())
    return 0 if report.found is not None else 1
