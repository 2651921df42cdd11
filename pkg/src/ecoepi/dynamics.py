"""Trajectory integration and the total-population bound.

The integrator is an embedded Dormand-Prince 5(4) pair with a standard
step-size controller.  States are kept in the nonnegative orthant:

* the right-hand side is evaluated on the orthant, and a component sitting
  on zero is not allowed to be pushed further down (this matters for
  ``U``, whose derivative at ``U = 0`` is ``(beta S - b P)/2`` and can be
  negative, while ``I = U**2`` then simply stays at zero);
* a step that leaves a component in ``[-atol, 0)`` is accepted and the
  component clamped to zero; anything below ``-atol`` rejects the step and
  halves it.

Samples are produced on a uniform grid by cubic Hermite interpolation
between accepted steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteState, StepSizeUnderflow
from .model import ParameterSet, Variant, _field, as_state

SAFETY = 0.9
MAX_GROWTH = 5.0
MIN_SHRINK = 0.1
UNDERFLOW = 1e-14

_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass(frozen=True)
class IntegrationSettings:
    t_end: float
    rtol: float = 1e-6
    atol: float = 1e-9
    dt_init: float | None = None
    dt_max: float | None = None
    record_every: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end >= 0.0):
            raise ValueError(f"t_end must be a nonnegative number, got {self.t_end!r}")
        if not (0.0 < self.rtol <= 1e-2):
            raise ValueError(f"rtol must lie in (0, 1e-2], got {self.rtol!r}")
        if not self.atol > 0.0:
            raise ValueError(f"atol must be positive, got {self.atol!r}")
        if self.t_end == 0.0:
            return
        if not 0.0 < self.max_step <= self.t_end:
            raise ValueError(f"dt_max must lie in (0, t_end], got {self.dt_max!r}")
        if not 0.0 < self.first_step <= self.max_step:
            raise ValueError(f"dt_init must lie in (0, dt_max], got {self.dt_init!r}")
        if not self.sample_step > 0.0:
            raise ValueError(f"record_every must be positive, got {self.record_every!r}")

    @property
    def max_step(self) -> float:
        return self.t_end if self.dt_max is None else float(self.dt_max)

    @property
    def first_step(self) -> float:
        return min(1e-2, self.max_step) if self.dt_init is None else float(self.dt_init)

    @property
    def sample_step(self) -> float:
        return self.t_end / 1000.0 if self.record_every is None else float(self.record_every)

    def sample_times(self) -> np.ndarray:
        if self.t_end == 0.0:
            return np.zeros(1)
        n = int(math.floor(self.t_end / self.sample_step * (1.0 + 1e-12)))
        t = np.arange(n + 1) * self.sample_step
        if self.t_end - t[-1] > 1e-12 * self.t_end:
            t = np.append(t, self.t_end)
        else:
            t[-1] = self.t_end
        return t


@dataclass(frozen=True)
class BoundednessBound:
    """``T(t) <= max(Psi/q, T(0))`` for ``T = P + S + I`` and ``0 < q < min(mu, m)``."""

    q: float
    M: float
    Psi: float
    T0: float

    @property
    def bound(self) -> float:
        return max(self.Psi / self.q, self.T0)


def total_population(states) -> np.ndarray:
    """``T = P + S + U**2`` for one state or an ``(n, 3)`` array of states."""
    x = np.asarray(states, dtype=float)
    return x[..., 0] + x[..., 1] + x[..., 2] ** 2


def boundedness_bound(params: ParameterSet, x0, q: float | None = None) -> BoundednessBound:
    """Analytic ceiling on the total population along any trajectory from ``x0``.

    The default decay rate is ``q = min(mu, m) / 2``.
    """
    if params.variant is Variant.CLASSICAL:
        raise ValueError("the bound is derived for the ecoepidemic variants only")
    x0 = as_state(params, x0)
    M = min(params.mu, params.m)
    if q is None:
        q = 0.5 * M
    if not 0.0 < q < M:
        raise ValueError(f"q must lie in (0, min(mu, m)) = (0, {M:.6g}), got {q!r}")
    Psi = params.K * (params.r + q) ** 2 / (4.0 * params.r)
    return BoundednessBound(q=float(q), M=float(M), Psi=float(Psi), T0=float(total_population(x0)))


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    variant: Variant
    accepted: int = 0
    rejected: int = 0
    clamp_events: int = 0
    total: np.ndarray | None = None
    bound: BoundednessBound | None = None
    columns: tuple = field(default=("P", "S", "U"))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class BoundReport:
    passed: bool
    max_ratio: float
    worst_time: float

    def __str__(self):
        verdict = "pass" if self.passed else "FAIL"
        return f"boundedness {verdict}: max T/bound = {self.max_ratio:.6g} at t = {self.worst_time:.6g}"


def verify_bound(traj: Trajectory, bb: BoundednessBound, rtol: float = 1e-6) -> BoundReport:
    """Check ``T(t) <= bound * (1 + rtol)`` at every sample of ``traj``."""
    T = traj.total if traj.total is not None else total_population(traj.states)
    ratio = T / bb.bound
    i = int(np.argmax(ratio))
    return BoundReport(passed=bool(np.all(ratio <= 1.0 + rtol)),
                       max_ratio=float(ratio[i]), worst_time=float(traj.t[i]))


def orthant_field(params: ParameterSet):
    """Right-hand side restricted to the nonnegative orthant.

    Components at (or numerically below) zero are evaluated at zero and
    may not decrease further.
    """
    def rhs(y):
        x = np.maximum(y, 0.0)
        f = _field(params, x)
        blocked = (x <= 0.0) & (f < 0.0)
        if blocked.any():
            f[blocked] = 0.0
        return f
    return rhs


def _hermite(t0, h, y0, f0, y1, f1, ts):
    s = ((ts - t0) / h)[:, None]
    s2 = s * s
    s3 = s2 * s
    return ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0
            + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1)


def integrate(params: ParameterSet, x0, settings: IntegrationSettings,
              monitor_bound: bool = True) -> Trajectory:
    """Integrate the selected variant from ``x0`` up to ``settings.t_end``.

    Raises:
        StepSizeUnderflow: the controller needed a step below ``1e-14 * t_end``.
        NonFiniteState: the solution overflowed.
    """
    y = as_state(params, x0)
    if np.any(y < 0.0):
        raise ValueError(f"initial state must be nonnegative, got {y!r}")
    rhs = orthant_field(params)
    sample_t = settings.sample_times()
    out = np.empty((len(sample_t), y.size))
    out[0] = y
    n_out = 1

    accepted = rejected = clamps = 0
    t_end = settings.t_end
    rtol, atol = settings.rtol, settings.atol
    t = 0.0
    if t_end > 0.0:
        dt = settings.first_step
        dt_max = settings.max_step
        dt_min = UNDERFLOW * t_end
        f = rhs(y)
        k = np.empty((7, y.size))
        while t < t_end:
            last = dt >= t_end - t
            h = t_end - t if last else dt
            if h < dt_min:
                raise StepSizeUnderflow(
                    f"step {h:.3e} below {dt_min:.3e} at t = {t:.6g} "
                    f"({accepted} accepted, {rejected} rejected steps, state {y})"
                )
            k[0] = f
            for i in range(1, 6):
                k[i] = rhs(y + h * (np.dot(_A[i], k[:i])))
            y_new = y + h * np.dot(_B5[:6], k[:6])
            if not np.all(np.isfinite(y_new)):
                rejected += 1
                dt = h * MIN_SHRINK
                if dt < dt_min:
                    raise NonFiniteState(f"state overflowed near t = {t:.6g}: {y_new}")
                continue
            k[6] = rhs(y_new)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = float(np.sqrt(np.mean((h * np.dot(_E, k) / scale) ** 2)))
            if err > 1.0:
                rejected += 1
                dt = h * max(MIN_SHRINK, SAFETY * err ** -0.2)
                continue
            if np.any(y_new < -atol):
                rejected += 1
                dt = 0.5 * h
                continue
            neg = y_new < 0.0
            if neg.any():
                clamps += int(neg.sum())
                y_new[neg] = 0.0
                f_new = rhs(y_new)
            else:
                f_new = k[6].copy()

            t_new = t_end if last else t + h
            j = n_out
            while j < len(sample_t) and sample_t[j] <= t_new:
                j += 1
            if j > n_out:
                seg = _hermite(t, h, y, f, y_new, f_new, sample_t[n_out:j])
                out[n_out:j] = np.maximum(seg, 0.0)
                if sample_t[j - 1] == t_new:
                    out[j - 1] = y_new
                n_out = j

            accepted += 1
            t, y, f = t_new, y_new, f_new
            growth = MAX_GROWTH if err == 0.0 else min(MAX_GROWTH, SAFETY * err ** -0.2)
            dt = min(h * growth, dt_max)

    traj = Trajectory(t=sample_t, states=out, variant=params.variant,
                      accepted=accepted, rejected=rejected, clamp_events=clamps,
                      columns=("P", "Q") if params.variant is Variant.CLASSICAL else ("P", "S", "U"))
    if monitor_bound and params.variant is not Variant.CLASSICAL:
        traj.total = total_population(out)
        traj.bound = boundedness_bound(params, out[0])
    return traj

