"""Parameter sweeps behind the latency/throughput figures, and their output.

A sweep produces rows of ``(scheme, epsilon, pf, throughput_norm,
latency_mean, latency_p95, latency_p99, trials, truncation_rate)``. Rows
with ``trials == 0`` come from the closed-form latency expressions; rows
with ``trials > 0`` are Monte-Carlo batches.
"""
from dataclasses import asdict, dataclass, field
import csv
import datetime as _dt
import enum
import io
import json
import math
import sys

import numpy as np

from . import __version__, rng
from .detector import Detector, RadioScenario, detection_profile, pf_analytic, threshold_for_pf
from .errors import DivergenceError, DomainError
from .latency import SchemeKind, hd_average_latency, slotted_fd_average_latency, throughput
from .sim import MIN_HORIZON_FRAMES, TrialConfig, frame_false_alarm_rate, run_batch

CSV_HEADER = ("scheme", "epsilon", "pf", "throughput_norm", "latency_mean",
              "latency_p95", "latency_p99", "trials", "truncation_rate")
QUANTILE_LEVELS = (0.95, 0.99)

DEFAULT_BISECTION_ITERATIONS = 20
DEFAULT_LATENCY_RTOL = 0.02
# Upper end of the threshold bracket for the fixed-latency search.
BRACKET_PF = 1e-4
BRACKET_CHECK_TRIALS = 2000


class SweepKind(str, enum.Enum):
    THRESHOLD = "threshold_sweep"
    INR_FIXED_THROUGHPUT = "inr_sweep_fixed_throughput"
    INR_FIXED_LATENCY = "inr_sweep_fixed_latency"
    QUANTILE = "quantile_sweep"


_INR_KINDS = (SweepKind.INR_FIXED_THROUGHPUT, SweepKind.INR_FIXED_LATENCY)


class SpecError(DomainError):
    """The sweep description is inconsistent."""


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep.

    ``grid`` holds thresholds for the threshold and quantile sweeps (or
    false-alarm targets when ``grid_unit == "pf"``), and INR values in dB
    for the INR sweeps. ``target`` is the normalised throughput for
    ``inr_sweep_fixed_throughput`` and the mean latency in samples for
    ``inr_sweep_fixed_latency``.
    """

    kind: SweepKind
    scenario: RadioScenario = field(default_factory=RadioScenario)
    schemes: tuple = (SchemeKind.SLOTTED_FULL_DUPLEX, SchemeKind.SLIDING_FULL_DUPLEX)
    grid: tuple = ()
    trials: int = 100_000
    seed: rng.SeedSpec = field(default_factory=rng.SeedSpec)
    target: float = None
    grid_unit: str = "epsilon"
    workers: int = 1
    bisection_iterations: int = DEFAULT_BISECTION_ITERATIONS
    probe_trials: int = None
    latency_rtol: float = DEFAULT_LATENCY_RTOL

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "kind", SweepKind(self.kind))
        set_(self, "schemes", tuple(SchemeKind.parse(s) for s in self.schemes))
        set_(self, "grid", tuple(float(g) for g in self.grid))
        if not self.schemes:
            raise SpecError("at least one scheme is required")
        if not self.grid:
            raise SpecError("grid must not be empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise SpecError("grid must be strictly increasing")
        if any(math.isnan(g) for g in self.grid):
            raise SpecError("grid contains NaN")
        inr_kind = self.kind in _INR_KINDS
        if inr_kind and self.target is None:
            raise SpecError(f"{self.kind.value} needs a target")
        if not inr_kind and self.target is not None:
            raise SpecError(f"{self.kind.value} takes no target")
        if inr_kind and SchemeKind.HALF_DUPLEX in self.schemes:
            raise SpecError("INR sweeps apply to full-duplex schemes only")
        if self.grid_unit not in ("epsilon", "pf"):
            raise SpecError("grid_unit must be 'epsilon' or 'pf'")
        if self.grid_unit == "pf":
            if inr_kind:
                raise SpecError("grid_unit='pf' applies to threshold and quantile sweeps")
            if not all(0.0 < g < 1.0 for g in self.grid):
                raise SpecError("pf grid values must lie in (0, 1)")
        elif not inr_kind and self.grid[0] < 0:
            raise SpecError("thresholds must be non-negative")
        if inr_kind and self.grid[-1] == math.inf:
            raise SpecError("INR values must be finite or -inf")
        if self.kind is SweepKind.INR_FIXED_THROUGHPUT and not 0.0 < self.target < 1.0:
            raise SpecError("throughput target must lie in (0, 1)")
        if self.kind is SweepKind.INR_FIXED_LATENCY and not self.target >= 1.0:
            raise SpecError("latency target must be at least one sample")
        if self.trials < 0:
            raise SpecError("trials must be non-negative")
        if self.kind is not SweepKind.THRESHOLD and self.trials == 0:
            raise SpecError(f"{self.kind.value} needs Monte-Carlo trials")

    @property
    def probes(self):
        return self.probe_trials or self.trials

    def to_dict(self):
        d = asdict(self)
        d["kind"] = self.kind.value
        d["schemes"] = [s.value for s in self.schemes]
        d["scenario"] = _scenario_dict(self.scenario)
        d["grid"] = [_json_float(g) for g in self.grid]
        return d

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        if "scenario" in data:
            data["scenario"] = RadioScenario(**{k: float(v) if k.endswith("_db") else v
                                                for k, v in data["scenario"].items()})
        if "seed" in data:
            data["seed"] = rng.SeedSpec(**data["seed"])
        if "grid" in data:
            data["grid"] = tuple(float(g) for g in data["grid"])
        if "schemes" in data:
            data["schemes"] = tuple(data["schemes"])
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise SpecError(f"unknown sweep fields: {sorted(unknown)}")
        return cls(**data)


@dataclass
class SweepRow:
    scheme: SchemeKind
    epsilon: float
    pf: float
    throughput_norm: float
    latency_mean: float
    latency_p95: float = math.nan
    latency_p99: float = math.nan
    trials: int = 0
    truncation_rate: float = 0.0
    inr_db: float = None
    status: str = "ok"
    frame_false_alarm_rate: float = None

    def as_dict(self):
        d = asdict(self)
        d["scheme"] = self.scheme.value
        return d


@dataclass
class SweepResult:
    rows: list
    metadata: dict
    fits: dict = field(default_factory=dict)

    def select(self, scheme=None, monte_carlo=None):
        out = self.rows
        if scheme is not None:
            scheme = SchemeKind.parse(scheme)
            out = [r for r in out if r.scheme is scheme]
        if monte_carlo is not None:
            out = [r for r in out if (r.trials > 0) == monte_carlo]
        return out


def _json_float(x):
    return x if math.isfinite(x) else str(x)


def _scenario_dict(sc):
    return {"snr_pu_db": sc.snr_pu_db, "inr_db": _json_float(sc.inr_db),
            "noise_power": sc.noise_power, "n_s": sc.n_s, "n_frame": sc.n_frame}


def _metadata(spec, **extra):
    meta = {
        "kind": spec.kind.value,
        "seed": asdict(spec.seed),
        "scenario": _scenario_dict(spec.scenario),
        "schemes": [s.value for s in spec.schemes],
        "grid": [_json_float(g) for g in spec.grid],
        "grid_unit": "inr_db" if spec.kind in _INR_KINDS else spec.grid_unit,
        "trials": spec.trials,
        "target": spec.target,
        "artifact_version": __version__,
        "rng": rng.RNG_ID,
        "quantile_levels": list(QUANTILE_LEVELS),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    meta.update(extra)
    return meta


def analytic_latency(scheme, detector, scenario):
    """Closed-form mean latency, ``inf`` where the series diverges."""
    scheme = SchemeKind.parse(scheme)
    profile = detection_profile(detector, scenario)
    try:
        if scheme is SchemeKind.HALF_DUPLEX:
            return hd_average_latency(profile, scenario.n_s, scenario.n_frame)
        if scheme is SchemeKind.SLOTTED_FULL_DUPLEX:
            return slotted_fd_average_latency(profile, scenario.n_s)
    except DivergenceError:
        return math.inf
    raise DomainError("no closed form for the sliding scheme")


def _mc_row(config, spec, trials, pf, inr_db=None):
    dist = run_batch(config, trials, workers=spec.workers, levels=QUANTILE_LEVELS)
    sc = config.scenario
    row = SweepRow(
        scheme=config.scheme, epsilon=config.detector.threshold, pf=pf,
        throughput_norm=throughput(config.scheme, pf, sc.n_s, sc.n_frame).normalized_throughput,
        latency_mean=dist.mean, latency_p95=dist.summary.quantiles[0.95],
        latency_p99=dist.summary.quantiles[0.99], trials=trials,
        truncation_rate=dist.truncation_rate, inr_db=inr_db,
        status="ok" if dist.valid else "truncated")
    return row


def _analytic_row(scheme, detector, scenario, pf, inr_db=None):
    return SweepRow(
        scheme=scheme, epsilon=detector.threshold, pf=pf,
        throughput_norm=throughput(scheme, pf, scenario.n_s, scenario.n_frame).normalized_throughput,
        latency_mean=analytic_latency(scheme, detector, scenario), inr_db=inr_db)


def run_threshold_sweep(spec):
    """Latency and throughput per (scheme, threshold).

    HD and slotted rows come from the closed forms, each followed by a
    Monte-Carlo row when ``spec.trials > 0``; sliding rows are Monte-Carlo
    only. A quantile sweep emits Monte-Carlo rows for every scheme.
    """
    if spec.kind not in (SweepKind.THRESHOLD, SweepKind.QUANTILE):
        raise SpecError(f"run_threshold_sweep cannot run {spec.kind.value}")
    sc = spec.scenario
    seed = spec.seed
    rows = []
    for value in spec.grid:
        for scheme in spec.schemes:
            if spec.grid_unit == "pf":
                detector = Detector.for_scheme(sc, scheme, pf=value)
            else:
                detector = Detector.for_scheme(sc, scheme, threshold=value)
            pf = pf_analytic(detector)
            if scheme is not SchemeKind.SLIDING_FULL_DUPLEX and spec.kind is SweepKind.THRESHOLD:
                rows.append(_analytic_row(scheme, detector, sc, pf))
            if spec.trials > 0:
                config = TrialConfig(sc, scheme, detector, seed)
                row = _mc_row(config, spec, spec.trials, pf)
                if scheme is SchemeKind.SLIDING_FULL_DUPLEX:
                    row.frame_false_alarm_rate = frame_false_alarm_rate(
                        detector, sc.n_frame, spec.trials, seed.master_seed)
                rows.append(row)
    return SweepResult(rows, _metadata(spec))


def fit_slope(x, y):
    """Least-squares slope of ``y`` against ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        return math.nan
    return float(np.polyfit(x, y, 1)[0])


def _with_inr(scenario, inr_db):
    return RadioScenario(scenario.snr_pu_db, inr_db, scenario.noise_power,
                         scenario.n_s, scenario.n_frame)


def run_inr_sweep_fixed_throughput(spec):
    """Mean latency against residual self-interference at fixed throughput.

    Every INR uses the threshold giving ``Pf = 1 - target`` for the inflated
    sensing floor. ``fits`` holds the least-squares latency-vs-INR(dB) slope
    per scheme over the finite INR values and the slotted/sliding ratio.
    """
    if spec.kind is not SweepKind.INR_FIXED_THROUGHPUT:
        raise SpecError(f"run_inr_sweep_fixed_throughput cannot run {spec.kind.value}")
    pf = 1.0 - spec.target
    rows = []
    for inr_db in spec.grid:
        sc = _with_inr(spec.scenario, inr_db)
        for scheme in spec.schemes:
            detector = Detector.for_scheme(sc, scheme, pf=pf)
            if scheme is SchemeKind.SLOTTED_FULL_DUPLEX:
                rows.append(_analytic_row(scheme, detector, sc, pf, inr_db))
            config = TrialConfig(sc, scheme, detector, spec.seed)
            rows.append(_mc_row(config, spec, spec.trials, pf, inr_db))
    fits = {}
    for scheme in spec.schemes:
        mc = [r for r in rows if r.scheme is scheme and r.trials > 0 and math.isfinite(r.inr_db)]
        fits[f"slope_{scheme.short_name}"] = fit_slope([r.inr_db for r in mc],
                                                       [r.latency_mean for r in mc])
    if {"slope_slotted", "slope_sliding"} <= fits.keys():
        fits["slope_ratio_slotted_over_sliding"] = fits["slope_slotted"] / fits["slope_sliding"]
    return SweepResult(rows, _metadata(spec), fits)


@dataclass
class BisectionOutcome:
    epsilon: float
    latency: float
    reachable: bool
    probes: list


def bisect_threshold(latency_of, target, lo, hi, rtol=DEFAULT_LATENCY_RTOL,
                     iterations=DEFAULT_BISECTION_ITERATIONS):
    """Find ε in ``[lo, hi]`` with ``latency_of(ε)`` within ``rtol`` of ``target``.

    ``latency_of`` must be non-decreasing in ε. Unreachable when the target
    lies outside ``[latency_of(lo), latency_of(hi)]`` or the iteration
    budget runs out first; the probe closest to the target is returned
    either way.
    """
    probes = []

    def probe(eps):
        value = latency_of(eps)
        probes.append((eps, value))
        return value

    def close(value):
        return abs(value - target) <= rtol * target

    def best(reachable):
        eps, value = min(probes, key=lambda p: abs(p[1] - target))
        return BisectionOutcome(eps, value, reachable and close(value), probes)

    low_value = probe(lo)
    if close(low_value) or low_value > target:
        return best(close(low_value))
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        value = probe(mid)
        if close(value):
            return best(True)
        if value < target:
            lo = mid
        else:
            hi = mid
    return best(False)


def _censored_mean_exceeds(config, target):
    # Cheap bracket check: truncated trials count at the horizon, so this is
    # a lower bound on the mean latency.
    config = TrialConfig(config.scenario, config.scheme, config.detector, config.seed,
                         MIN_HORIZON_FRAMES * config.scenario.n_frame)
    return run_batch(config, BRACKET_CHECK_TRIALS).mean >= target


def run_inr_sweep_fixed_latency(spec):
    """Normalised throughput against residual self-interference at a fixed
    mean latency, found by bisection over the threshold.

    Every probe is a Monte-Carlo batch with the same seed, so the sampled
    mean latency is exactly non-decreasing in the threshold. Slotted rows
    also get a closed-form bisection row (``trials == 0``).
    """
    if spec.kind is not SweepKind.INR_FIXED_LATENCY:
        raise SpecError(f"run_inr_sweep_fixed_latency cannot run {spec.kind.value}")
    target = spec.target
    rows = []
    for inr_db in spec.grid:
        sc = _with_inr(spec.scenario, inr_db)
        for scheme in spec.schemes:
            floor = sc.sensing_floor(scheme)
            hi = threshold_for_pf(BRACKET_PF, sc.n_s, floor)
            if scheme is SchemeKind.SLOTTED_FULL_DUPLEX:
                outcome = bisect_threshold(
                    lambda eps: analytic_latency(scheme, Detector(eps, sc.n_s, floor), sc),
                    target, 0.0, hi, spec.latency_rtol, spec.bisection_iterations)
                rows.append(_fixed_latency_row(scheme, sc, floor, outcome, 0, inr_db))

            def mc_latency(eps, scheme=scheme):
                config = TrialConfig(sc, scheme, Detector(eps, sc.n_s, floor), spec.seed)
                return run_batch(config, spec.probes, workers=spec.workers).mean

            top = TrialConfig(sc, scheme, Detector(hi, sc.n_s, floor), spec.seed)
            if not _censored_mean_exceeds(top, target):
                outcome = BisectionOutcome(hi, math.nan, False, [])
            else:
                outcome = bisect_threshold(mc_latency, target, 0.0, hi,
                                           spec.latency_rtol, spec.bisection_iterations)
            rows.append(_fixed_latency_row(scheme, sc, floor, outcome, spec.probes, inr_db))
    meta = _metadata(spec, bisection={
        "iterations": spec.bisection_iterations, "probe_trials": spec.probes,
        "latency_rtol": spec.latency_rtol, "bracket_pf": BRACKET_PF})
    return SweepResult(rows, meta)


def _fixed_latency_row(scheme, sc, floor, outcome, trials, inr_db):
    pf = pf_analytic(Detector(outcome.epsilon, sc.n_s, floor))
    return SweepRow(
        scheme=scheme, epsilon=outcome.epsilon, pf=pf,
        throughput_norm=throughput(scheme, pf, sc.n_s, sc.n_frame).normalized_throughput,
        latency_mean=outcome.latency, trials=trials, inr_db=inr_db,
        status="ok" if outcome.reachable else "unreachable")


def run_sweep(spec):
    """Dispatch on ``spec.kind``."""
    return {
        SweepKind.THRESHOLD: run_threshold_sweep,
        SweepKind.QUANTILE: run_threshold_sweep,
        SweepKind.INR_FIXED_THROUGHPUT: run_inr_sweep_fixed_throughput,
        SweepKind.INR_FIXED_LATENCY: run_inr_sweep_fixed_latency,
    }[spec.kind](spec)


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".9g")


def to_csv(result):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in result.rows:
        writer.writerow([row.scheme.value] + [_fmt(getattr(row, c)) for c in CSV_HEADER[1:]])
    return buf.getvalue()


def to_json(result):
    doc = {"rows": [r.as_dict() for r in result.rows],
           "fits": result.fits,
           "metadata": result.metadata}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit(result, path, format="csv"):
    """Write ``result`` to ``path`` (``"-"`` for stdout) as CSV or JSON."""
    if not result.rows:
        raise SpecError("refusing to write an empty result")
    text = {"csv": to_csv, "json": to_json}[format](result)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def read_json(path):
    """Load a result written by :func:`emit` with ``format="json"``."""
    with open(path) as fh:
        doc = json.load(fh)
    rows = []
    for d in doc["rows"]:
        d = dict(d)
        d["scheme"] = SchemeKind(d["scheme"])
        rows.append(SweepRow(**d))
    return SweepResult(rows, doc["metadata"], doc.get("fits", {}))
