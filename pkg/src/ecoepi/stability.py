"""Linear stability of the equilibria and the transcritical thresholds.

Eigenvalues always come from the analytic Jacobian.  For interior
equilibria the Routh-Hurwitz coefficients of the monic characteristic cubic

    lambda^3 + a2 lambda^2 + a1 lambda + a0

are evaluated from their closed forms and cross-checked against the
eigenvalue verdict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .equilibria import (
    Equilibrium,
    Label,
    equilibrium_coexistence,
    equilibrium_predator_free,
    predator_free_state,
)
from .errors import InconsistentVerdict, NoExchange
from .model import ParameterSet, Variant, jacobian

MARGINAL_BAND = 1e-9
COALESCENCE_RTOL = 1e-6
EXCHANGE_OFFSET = 1e-3


class Classification(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class RHCoefficients:
    a0: float
    a1: float
    a2: float
    hurwitz: float  # a2*a1 - a0

    @property
    def stable(self) -> bool:
        return self.a0 > 0 and self.a1 > 0 and self.a2 > 0 and self.hurwitz > 0

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a0, self.a1, self.a2, self.hurwitz)


@dataclass(frozen=True)
class StabilityVerdict:
    eigenvalues: np.ndarray
    classification: Classification
    rh: RHCoefficients | None = None
    hopf_possible: bool = False

    @property
    def stable(self) -> bool:
        return self.classification is Classification.STABLE

    @property
    def spectral_abscissa(self) -> float:
        return float(np.max(self.eigenvalues.real))


@dataclass(frozen=True)
class Thresholds:
    """Critical predator mortalities.

    ``m_ddagger`` is ``a S1 + b U1`` as stated for all ecoepidemic variants;
    ``m_ddagger_toxic`` is ``a S1 - b U1``, the value at which the toxic
    Jacobian actually loses stability at ``E1``.
    """

    m_star: float
    m_dagger: float
    m_ddagger: float
    m_ddagger_toxic: float

    def transcritical(self, variant: Variant) -> float:
        """The threshold at which ``E1`` exchanges stability for ``variant``."""
        variant = Variant.parse(variant)
        if variant is Variant.CLASSICAL:
            return self.m_star
        if variant is Variant.AVOIDED:
            return self.m_dagger
        if variant is Variant.TOXIC:
            return self.m_ddagger_toxic
        return self.m_ddagger


def thresholds(params: ParameterSet) -> Thresholds:
    p = params
    _, S1, U1 = predator_free_state(p.replace(variant=Variant.HARMLESS))
    return Thresholds(
        m_star=p.a * p.K,
        m_dagger=p.a * p.K * p.r * p.mu / (p.K * p.beta**2 + p.r * p.mu),
        m_ddagger=float(p.a * S1 + p.b * U1),
        m_ddagger_toxic=float(p.a * S1 - p.b * U1),
    )


def characteristic_coefficients(J: np.ndarray) -> np.ndarray:
    """Coefficients ``[1, c1, ..., cn]`` of ``det(lambda I - J)`` for n = 2 or 3."""
    n = J.shape[0]
    tr = np.trace(J)
    if n == 2:
        return np.array([1.0, -tr, np.linalg.det(J)])
    minors = (J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
              + J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]
              + J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1])
    det = (J[0, 0] * (J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1])
           - J[0, 1] * (J[1, 0] * J[2, 2] - J[1, 2] * J[2, 0])
           + J[0, 2] * (J[1, 0] * J[2, 1] - J[1, 1] * J[2, 0]))
    return np.array([1.0, -tr, minors, -det])


def eigenvalues(J: np.ndarray) -> np.ndarray:
    """Eigenvalues of a small Jacobian, Newton-polished on its characteristic polynomial."""
    lam = np.linalg.eigvals(J).astype(complex)
    coeffs = characteristic_coefficients(J)
    dcoeffs = np.polyder(coeffs)
    for i, z in enumerate(lam):
        pz = np.polyval(coeffs, z)
        dpz = np.polyval(dcoeffs, z)
        if dpz == 0:
            continue
        cand = z - pz / dpz
        if abs(np.polyval(coeffs, cand)) < abs(pz):
            lam[i] = cand
    # keep exactly-real roots real
    lam = np.where(np.abs(lam.imag) <= 1e-14 * max(1.0, float(np.max(np.abs(lam)))), lam.real + 0j, lam)
    return lam[np.lexsort((lam.imag, lam.real))]


def classify_eigenvalues(lam: np.ndarray) -> Classification:
    scale = float(np.max(np.abs(lam))) if lam.size else 0.0
    band = MARGINAL_BAND * max(scale, np.finfo(float).tiny)
    re = lam.real
    if np.any(re > band):
        return Classification.UNSTABLE
    if np.any(np.abs(re) <= band):
        return Classification.MARGINAL
    return Classification.STABLE


def rh_coefficients(params: ParameterSet, eq: Equilibrium) -> RHCoefficients:
    """Routh-Hurwitz quantities at the interior equilibrium of a three-species variant.

    The Hurwitz combination ``a2*a1 - a0`` is evaluated in its expanded form,
    which avoids the cancellation that ``a2*a1 - a0`` suffers when it is small.
    """
    if eq.label is not Label.COEXISTENCE:
        raise ValueError("Routh-Hurwitz coefficients are defined for the coexistence equilibrium only")
    if params.variant is Variant.CLASSICAL:
        raise ValueError("the classical model has a quadratic characteristic polynomial")
    a, b, r, K, be, mu = params.a, params.b, params.r, params.K, params.beta, params.mu
    P, S, _ = eq.point
    a2 = r / K * S + 0.5 * mu
    if params.variant is Variant.TOXIC:
        a0 = 0.5 * (a**2 * mu - b**2 * r / K - 2.0 * a * b * be) * S * P
        a1 = a**2 * S * P + 0.5 * ((r / K * mu + be**2) * S - b**2 * P)
        hurwitz = (r / K * S**2 * (a**2 * P + r * mu / (2.0 * K) + 0.5 * be**2)
                   + 0.25 * mu * S * (r / K * mu + be**2)
                   + a * b * be * S * P
                   - 0.25 * mu * b**2 * P)
    else:
        a0 = 0.5 * (a**2 * mu + b**2 * r / K) * S * P
        a1 = a**2 * S * P + 0.5 * (b**2 * P + (r / K * mu + be**2) * S)
        hurwitz = (r / K * S**2 * (a**2 * P + r * mu / (2.0 * K) + 0.5 * be**2)
                   + 0.25 * mu * (r * mu / K * S + be**2 * S + b**2 * P))
    return RHCoefficients(a0=float(a0), a1=float(a1), a2=float(a2), hurwitz=float(hurwitz))


def classify_equilibrium(params: ParameterSet, eq: Equilibrium) -> StabilityVerdict:
    """Classify ``eq`` from the eigenvalues of the Jacobian.

    For three-species coexistence points the Routh-Hurwitz verdict is
    computed as well and must agree with the eigenvalues unless the
    equilibrium is marginal.

    Raises:
        InconsistentVerdict: the two verdicts disagree outside the marginal band.
    """
    lam = eigenvalues(jacobian(params, eq.point))
    cls = classify_eigenvalues(lam)
    rh = None
    hopf = False
    if eq.label is Label.COEXISTENCE and params.dim == 3:
        rh = rh_coefficients(params, eq)
        if cls is not Classification.MARGINAL and (cls is Classification.STABLE) != rh.stable:
            raise InconsistentVerdict(
                f"eigenvalues {lam} give {cls.value} but Routh-Hurwitz quantities "
                f"{rh.as_tuple()} give {'stable' if rh.stable else 'unstable'}"
            )
        hopf = (rh.a2 > 0 and rh.a0 > 0
                and abs(rh.hurwitz) <= MARGINAL_BAND * max(abs(rh.a2 * rh.a1), abs(rh.a0)))
    return StabilityVerdict(eigenvalues=lam, classification=cls, rh=rh, hopf_possible=hopf)


@dataclass(frozen=True)
class PredatorFreeDiscrepancy:
    """How the stated ``E1`` criterion ``m > a S1 + b U1`` compares with the Jacobian."""

    variant: Variant
    m: float
    m_ddagger: float
    m_jacobian: float
    stated_classification: Classification
    jacobian_classification: Classification

    @property
    def agree(self) -> bool:
        return self.stated_classification is self.jacobian_classification

    def lines(self) -> list[str]:
        out = [
            f"E1 threshold as stated   m‡ = aS1 + bU1 = {self.m_ddagger:.6g}"
            f" -> E1 {self.stated_classification.value} at m = {self.m:.6g}",
            f"E1 threshold of Jacobian      = {self.m_jacobian:.6g}"
            f" -> E1 {self.jacobian_classification.value} at m = {self.m:.6g}",
        ]
        if not self.agree:
            out.append("DISCREPANCY: the stated E1 criterion and the Jacobian disagree; "
                       "the classification above uses the Jacobian")
        return out


def predator_free_discrepancy(params: ParameterSet) -> PredatorFreeDiscrepancy:
    th = thresholds(params)
    m_jac = th.transcritical(params.variant)
    stated = th.m_ddagger if params.variant is not Variant.CLASSICAL else th.m_star
    if params.variant is Variant.AVOIDED:
        stated = th.m_dagger

    def verdict(threshold):
        if abs(params.m - threshold) <= MARGINAL_BAND * max(abs(threshold), params.m):
            return Classification.MARGINAL
        return Classification.STABLE if params.m > threshold else Classification.UNSTABLE

    jac_cls = classify_equilibrium(params, equilibrium_predator_free(params)).classification
    return PredatorFreeDiscrepancy(
        variant=params.variant,
        m=params.m,
        m_ddagger=stated,
        m_jacobian=m_jac,
        stated_classification=verdict(stated),
        jacobian_classification=jac_cls,
    )


@dataclass(frozen=True)
class TranscriticalReport:
    m_tc: float
    below: tuple  # (m, E1 verdict, coexistence equilibrium, coexistence verdict)
    above: tuple
    coalescence: float  # |E*(m_tc) - E1| / |E1|

    def lines(self) -> list[str]:
        out = [f"transcritical threshold m_tc = {self.m_tc:.10g}"]
        for side, (m, v1, eq, vc) in (("below", self.below), ("above", self.above)):
            out.append(
                f"  m = {m:.10g} ({side}): E1 {v1.classification.value}; coexistence "
                f"{'feasible' if eq.feasible else 'infeasible'}, {vc.classification.value}"
            )
        out.append(f"  coalescence |E*(m_tc) - E1| / |E1| = {self.coalescence:.3e}")
        return out


def locate_transcritical(params: ParameterSet, m_range: tuple[float, float] | None = None
                         ) -> TranscriticalReport:
    """Locate and verify the exchange of stability between ``E1`` and coexistence.

    The threshold is analytic; it is then checked by classifying both
    equilibria at ``m_tc * (1 -/+ 1e-3)`` and by measuring how closely the
    coexistence point meets ``E1`` at ``m_tc``.

    Raises:
        NoExchange: the threshold is outside ``m_range`` or the checks fail.
    """
    m_tc = thresholds(params).transcritical(params.variant)
    if m_tc <= 0.0:
        raise NoExchange(f"threshold {m_tc:.6g} is not a positive mortality")
    if m_range is not None:
        lo, hi = m_range
        if not (0.0 < lo < hi):
            raise ValueError(f"invalid scan interval {m_range!r}")
        if not (lo <= m_tc <= hi):
            raise NoExchange(f"threshold {m_tc:.6g} lies outside the scan interval [{lo}, {hi}]")

    def side(m):
        p = params.replace(m=m)
        e1 = equilibrium_predator_free(p)
        ec = equilibrium_coexistence(p)
        return (m, classify_equilibrium(p, e1), ec, classify_equilibrium(p, ec))

    below = side(m_tc * (1.0 - EXCHANGE_OFFSET))
    above = side(m_tc * (1.0 + EXCHANGE_OFFSET))
    at = params.replace(m=m_tc)
    e1 = equilibrium_predator_free(at).point
    coalescence = float(np.linalg.norm(equilibrium_coexistence(at).point - e1) / np.linalg.norm(e1))

    problems = []
    if below[1].classification is not Classification.UNSTABLE:
        problems.append(f"E1 is {below[1].classification.value} below the threshold")
    if above[1].classification is not Classification.STABLE:
        problems.append(f"E1 is {above[1].classification.value} above the threshold")
    if below[3].classification is not Classification.STABLE:
        problems.append(f"coexistence is {below[3].classification.value} below the threshold")
    if above[3].classification is not Classification.UNSTABLE:
        problems.append(f"coexistence is {above[3].classification.value} above the threshold")
    if coalescence > COALESCENCE_RTOL:
        problems.append(f"coexistence does not meet E1 (relative distance {coalescence:.3e})")
    if problems:
        raise NoExchange(f"no verified exchange at m = {m_tc:.6g}: " + "; ".join(problems))
    return TranscriticalReport(m_tc=m_tc, below=below, above=above, coalescence=coalescence)
