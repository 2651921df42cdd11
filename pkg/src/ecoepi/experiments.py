"""Figure reproductions, mortality sweeps and oscillation diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig, bundled_config
from .dynamics import Trajectory, integrate, verify_bound
from .equilibria import (
    Equilibrium,
    equilibrium_coexistence,
    equilibrium_predator_free,
    predator_free_state,
)
from .errors import DegenerateDenominator, InsufficientPeaks
from .model import ParameterSet, Variant
from .stability import (
    Classification,
    classify_equilibrium,
    predator_free_discrepancy,
    thresholds,
)

# Reference values for the three figure scenarios, compared against recomputed ones.
REFERENCE_VALUES = {
    1: {"E1": (0.0, 5.993, 3.995), "coexistence": (25.889, 0.013, -5.385), "m_ddagger": 2.737},
    2: {"coexistence": (6.410, 4.799, 1.672), "rh": (2.667, 4.125, 1.103, 1.882)},
    3: {"coexistence": (0.0212, 0.0373, 0.0096), "rh": (0.0035, 0.0699, 0.0500, 8.607e-6)},
}
_DIGITS = {1: 3, 2: 3, 3: 4}

MIN_PEAKS = 4


# -- oscillations -----------------------------------------------------------

@dataclass(frozen=True)
class ComponentOscillation:
    name: str
    peak_times: np.ndarray
    peaks: np.ndarray
    amplitudes: np.ndarray  # (peak - following trough) / 2, one per peak with a trough after it
    center: float
    trend_ratio: float | None
    trend_span: float | None  # time between the centres of the first and last windows

    @property
    def oscillatory(self) -> bool:
        return self.trend_ratio is not None

    @property
    def mean_amplitude(self) -> float:
        return float(np.mean(self.amplitudes)) if self.amplitudes.size else 0.0


@dataclass(frozen=True)
class OscillationDiagnostics:
    components: tuple
    t_start: float

    def __getitem__(self, name) -> ComponentOscillation:
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(name)

    def trend_ratio(self, name) -> float:
        """Amplitude trend of one component.

        Raises:
            InsufficientPeaks: the component has fewer than four peaks.
        """
        c = self[name]
        if c.trend_ratio is None:
            raise InsufficientPeaks(f"component {name} has {c.peaks.size} peaks (need {MIN_PEAKS})")
        return c.trend_ratio

    def lines(self) -> list[str]:
        out = [f"oscillation diagnostics (t >= {self.t_start:.6g}):"]
        for c in self.components:
            if c.oscillatory:
                out.append(f"  {c.name}: {c.peaks.size} peaks, mean amplitude {c.mean_amplitude:.4g}, "
                           f"trend ratio {c.trend_ratio:.6g}, center {c.center:.6g}")
            else:
                out.append(f"  {c.name}: non-oscillatory ({c.peaks.size} peaks), center {c.center:.6g}")
        return out


def _extrema(x: np.ndarray, hysteresis: float):
    """Indices of alternating maxima and minima separated by more than ``hysteresis``.

    The turning point preceding the first confirmed reversal is not
    reported, since the signal may simply have started there.
    """
    peaks, troughs = [], []
    imax = imin = 0
    looking = 0  # +1: climbing toward a peak, -1: descending toward a trough
    for i in range(1, x.size):
        if x[i] > x[imax]:
            imax = i
        if x[i] < x[imin]:
            imin = i
        if looking >= 0 and x[imax] - x[i] > hysteresis:
            if looking == 1:
                peaks.append(imax)
            looking, imin = -1, i
        elif looking <= 0 and x[i] - x[imin] > hysteresis:
            if looking == -1:
                troughs.append(imin)
            looking, imax = 1, i
    return np.array(peaks, dtype=int), np.array(troughs, dtype=int)


def oscillation_diagnostics(traj: Trajectory, discard: float = 0.5,
                            atol: float = 1e-9) -> OscillationDiagnostics:
    """Peak statistics of each component over the latter part of a trajectory.

    Peaks and troughs are turning points of the sampled signal that stand
    out by more than ``atol * max(1, max|x|)``.  The amplitude trend ratio
    compares the geometric-mean amplitude of the last quarter of the peaks
    with that of the first quarter (at least two peaks per window).
    """
    if len(traj.t) < 100:
        raise ValueError(f"need at least 100 samples, got {len(traj.t)}")
    t0 = traj.t[0] + discard * (traj.t[-1] - traj.t[0])
    keep = traj.t >= t0
    t = traj.t[keep]
    comps = []
    for j, name in enumerate(traj.columns):
        x = traj.states[keep, j]
        hyst = atol * max(1.0, float(np.max(np.abs(x))))
        pk, tr = _extrema(x, hyst)
        amps, amp_t = [], []
        for p in pk:
            after = tr[tr > p]
            if after.size:
                amps.append(0.5 * (x[p] - x[after[0]]))
                amp_t.append(t[p])
        amps = np.array(amps)
        amp_t = np.array(amp_t)
        trend = span = None
        if pk.size >= MIN_PEAKS and amps.size >= 2 and np.all(amps > 0):
            w = max(2, amps.size // 4) if amps.size >= 4 else 1
            trend = float(math.exp(np.mean(np.log(amps[-w:])) - np.mean(np.log(amps[:w]))))
            span = float(np.mean(amp_t[-w:]) - np.mean(amp_t[:w]))
        if pk.size and tr.size:
            center = 0.5 * (float(np.mean(x[pk])) + float(np.mean(x[tr])))
        else:
            center = float(np.mean(x))
        comps.append(ComponentOscillation(name=name, peak_times=t[pk], peaks=x[pk],
                                          amplitudes=amps, center=center,
                                          trend_ratio=trend, trend_span=span))
    return OscillationDiagnostics(components=tuple(comps), t_start=float(t0))


# -- sweeps -----------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    m: float
    predator_free: Equilibrium
    predator_free_class: Classification
    coexistence: Equilibrium | None
    coexistence_class: Classification | None


@dataclass(frozen=True)
class SweepResult:
    variant: Variant
    grid: np.ndarray
    points: tuple
    detected_m: float | None

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def rows(self):
        """``(m, label, feasible, classification, *components)`` rows, two per grid point."""
        for pt in self.points:
            yield (pt.m, "predator_free", pt.predator_free.feasible,
                   pt.predator_free_class.value, *pt.predator_free.point)
            if pt.coexistence is None:
                yield (pt.m, "coexistence", False, "degenerate", *([math.nan] * len(pt.predator_free.point)))
            else:
                yield (pt.m, "coexistence", pt.coexistence.feasible,
                       pt.coexistence_class.value, *pt.coexistence.point)


def _sweep_point(params: ParameterSet) -> SweepPoint:
    e1 = equilibrium_predator_free(params)
    c1 = classify_equilibrium(params, e1).classification
    try:
        ec = equilibrium_coexistence(params)
        cc = classify_equilibrium(params, ec).classification
    except DegenerateDenominator:
        ec = cc = None
    return SweepPoint(m=params.m, predator_free=e1, predator_free_class=c1,
                      coexistence=ec, coexistence_class=cc)


def sweep_mortality(params: ParameterSet, m_from: float, m_to: float, steps: int) -> SweepResult:
    """Equilibria and their stability on a uniform grid of predator mortalities.

    The detected threshold is the grid point where ``E1`` is marginal, or the
    midpoint of the first interval across which its stability changes.
    """
    if not (0.0 < m_from < m_to):
        raise ValueError(f"need 0 < m_from < m_to, got {m_from!r}, {m_to!r}")
    if steps < 2:
        raise ValueError(f"need at least 2 grid points, got {steps!r}")
    grid = np.linspace(m_from, m_to, int(steps))
    points = tuple(_sweep_point(params.replace(m=float(m))) for m in grid)
    detected = None
    prev = None
    for pt in points:
        cls = pt.predator_free_class
        if cls is Classification.MARGINAL:
            detected = pt.m
            break
        if prev is not None and cls is not prev.predator_free_class:
            detected = 0.5 * (prev.m + pt.m)
            break
        prev = pt
    return SweepResult(variant=params.variant, grid=grid, points=points, detected_m=detected)


# -- random draws -----------------------------------------------------------

_RANGES = {
    "a": (0.05, 5.0),
    "b": (0.01, 2.0),
    "r": (0.1, 5.0),
    "K": (1.0, 1e4),
    "beta": (0.01, 2.0),
    "mu": (0.05, 5.0),
}


def random_parameter_set(rng: np.random.Generator, variant, m: float | None = None,
                         ranges: dict | None = None) -> ParameterSet:
    """Log-uniformly drawn admissible rates.

    Unless ``m`` is given it is drawn within a factor of three of the
    variant's transcritical threshold.  Toxic draws are redrawn until that
    threshold is positive and the coexistence formula is nondegenerate.
    ``ranges`` overrides the default ``(low, high)`` bounds per rate.
    """
    variant = Variant.parse(variant)
    ranges = {**_RANGES, **(ranges or {})}
    while True:
        v = {k: float(math.exp(rng.uniform(math.log(lo), math.log(hi)))) for k, (lo, hi) in ranges.items()}
        p = ParameterSet(m=1.0, variant=variant, **v)
        m_tc = thresholds(p).transcritical(variant)
        if m_tc <= 0.0:
            continue
        if variant is Variant.TOXIC:
            den = p.a**2 * p.K * p.mu - 2 * p.a * p.b * p.K * p.beta - p.b**2 * p.r
            if abs(den) <= 1e-6 * p.a**2 * p.K * p.mu:
                continue
        mm = m if m is not None else m_tc * float(math.exp(rng.uniform(-math.log(3), math.log(3))))
        return p.replace(m=mm)


# -- figures ----------------------------------------------------------------

@dataclass
class FigureResult:
    figure: int
    config: ScenarioConfig
    trajectory: Trajectory
    predator_free: Equilibrium
    coexistence: Equilibrium
    verdicts: dict
    observations: dict = field(default_factory=dict)
    oscillation: OscillationDiagnostics | None = None
    report: list = field(default_factory=list)

    @property
    def params(self) -> ParameterSet:
        return self.config.params


def _fmt(v, digits):
    return "0" if v == 0 else f"{v:.{digits}f}"


def format_point(point, digits=3) -> str:
    return "(" + ", ".join(_fmt(float(v), digits) for v in point) + ")"


def _compare(name, computed, printed, digits):
    got = ", ".join(f"{c:.{digits + 2}g}" for c in np.atleast_1d(computed))
    ref = ", ".join(f"{c:g}" for c in np.atleast_1d(printed))
    return f"  {name}: computed ({got}) vs reference ({ref})"


def reproduce_figure(figure: int, config: ScenarioConfig | None = None) -> FigureResult:
    """Rerun one of the toxic-variant figure scenarios and compare against its reference values."""
    if figure not in REFERENCE_VALUES:
        raise ValueError(f"figure must be 1, 2 or 3, got {figure!r}")
    cfg = config if config is not None else bundled_config(figure)
    p = cfg.params
    digits = _DIGITS[figure]
    traj = integrate(p, cfg.initial, cfg.integrate)
    e1 = equilibrium_predator_free(p)
    ec = equilibrium_coexistence(p)
    v1 = classify_equilibrium(p, e1)
    vc = classify_equilibrium(p, ec)
    th = thresholds(p)
    cap = REFERENCE_VALUES[figure]

    rep = [f"Figure {figure}: {p.variant.value} variant, "
           + ", ".join(f"{k}={v:g}" for k, v in p.as_dict().items())]
    rep.append(f"E₁ = {format_point(e1.point, digits)}  {v1.classification.value}")
    rep.append(f"{ec.symbol} = {format_point(ec.point, digits)}  "
               f"{'feasible' if ec.feasible else 'infeasible'}, {vc.classification.value}")
    rep.append(f"m‡ = {th.m_ddagger:.3f}   (a S1 - b U1 = {th.m_ddagger_toxic:.3f}, m = {p.m:g})")
    if vc.rh is not None:
        a0, a1, a2, h = vc.rh.as_tuple()
        rep.append(f"a0 = {a0:.{digits}g}, a1 = {a1:.{digits}g}, a2 = {a2:.{digits}g}, "
                   f"a2*a1 - a0 = {h:.4g}")
    rep.append("comparison with reference values:")
    rep.append(_compare(ec.symbol, ec.point, cap["coexistence"], digits))
    if "E1" in cap:
        rep.append(_compare("E₁", e1.point, cap["E1"], digits))
        rep.append(_compare("m‡", th.m_ddagger, cap["m_ddagger"], digits))
    if "rh" in cap:
        rep.append(_compare("(a0, a1, a2, a2*a1-a0)", vc.rh.as_tuple(), cap["rh"], digits))

    result = FigureResult(figure=figure, config=cfg, trajectory=traj, predator_free=e1,
                          coexistence=ec, verdicts={"E1": v1, "coexistence": vc})
    final = traj.final
    rep.append(f"trajectory: t = {traj.t[-1]:g}, final state {format_point(final, digits + 2)}, "
               f"{traj.accepted} steps ({traj.rejected} rejected, {traj.clamp_events} clamps)")
    if traj.bound is not None:
        rep.append(str(verify_bound(traj, traj.bound)))

    if figure in (2, 3):
        dist = float(np.max(np.abs(final - ec.point)))
        result.observations["distance_to_coexistence"] = dist
        result.observations["relative_distance_to_coexistence"] = dist / float(np.max(np.abs(ec.point)))
        rep.append(f"max |x(t_end) - {ec.symbol}| = {dist:.3e}")
    if figure in (1, 3):
        result.oscillation = oscillation_diagnostics(traj)
        rep += result.oscillation.lines()
    if figure == 1:
        dev = predator_free_tail_band(traj, p)
        p_ratio = final[0] / cfg.initial[0] if cfg.initial[0] > 0 else math.nan
        result.observations["tail_relative_deviation_SU"] = float(dev)
        result.observations["predator_final_over_initial"] = float(p_ratio)
        osc = result.oscillation
        persistent = any(c.oscillatory and c.trend_ratio >= 1.0 for c in osc.components[1:])
        result.observations["persistent_oscillation"] = persistent
        rep.append(f"last 20% of horizon: max relative deviation of (S, U) from (S1, U1) = {dev:.3e}")
        rep.append(f"P(t_end)/P(0) = {p_ratio:.3e}; "
                   f"{'persistent oscillation observed' if persistent else 'no persistent oscillation observed'}")
        rep += predator_free_discrepancy(p).lines()
    result.report = rep
    return result


def predator_free_tail_band(traj: Trajectory, params: ParameterSet, fraction: float = 0.2) -> float:
    """Largest relative deviation of ``(S, U)`` from ``(S1, U1)`` over the last ``fraction`` of a run."""
    _, S1, U1 = predator_free_state(params)
    tail = traj.t >= traj.t[0] + (1.0 - fraction) * (traj.t[-1] - traj.t[0])
    return float(np.max(np.abs(traj.states[tail][:, 1:] / np.array([S1, U1]) - 1.0)))
