"""Closed-form equilibria and their feasibility conditions."""

from __future__ import annotations

import enum
import operator
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDenominator
from .model import ParameterSet, Variant, _field

MARGINAL_RTOL = 1e-9
DEGENERATE_RTOL = 1e-12

_RELATIONS = {">=": operator.ge, "<=": operator.le, ">": operator.gt, "<": operator.lt}


class Label(str, enum.Enum):
    ORIGIN = "origin"
    PREDATOR_FREE = "predator_free"
    COEXISTENCE = "coexistence"


@dataclass(frozen=True)
class Condition:
    """One feasibility inequality ``lhs <relation> rhs`` evaluated numerically.

    ``group`` names the conjunction the inequality belongs to; the toxic
    variant has two alternative groups, every other variant has one.
    """

    id: str
    lhs: float
    relation: str
    rhs: float
    group: str = "all"

    @property
    def marginal(self) -> bool:
        scale = max(abs(self.lhs), abs(self.rhs))
        return abs(self.lhs - self.rhs) <= MARGINAL_RTOL * scale

    @property
    def satisfied(self) -> bool:
        return _RELATIONS[self.relation](self.lhs, self.rhs) or self.marginal

    def __str__(self):
        mark = "ok" if self.satisfied else "FAILS"
        if self.marginal:
            mark += " (marginal)"
        return f"{self.id}: {self.lhs:.6g} {self.relation} {self.rhs:.6g}  [{mark}]"


@dataclass(frozen=True)
class Equilibrium:
    point: np.ndarray
    label: Label
    variant: Variant
    feasible: bool
    marginal: bool = False
    residual: float = 0.0
    conditions: tuple = field(default=())

    @property
    def symbol(self) -> str:
        if self.label is Label.ORIGIN:
            return "E₀"
        if self.label is Label.PREDATOR_FREE:
            return "E₁"
        return _COEX_SYMBOL[self.variant]


_COEX_SYMBOL = {
    Variant.CLASSICAL: "E*c",
    Variant.HARMLESS: "Ê*",
    Variant.AVOIDED: "E*",
    Variant.TOXIC: "E*~",
}


def _residual(params: ParameterSet, point: np.ndarray) -> float:
    return float(np.max(np.abs(_field(params, point))))


def _make(params, point, label, feasible, marginal=False, conditions=()):
    point = np.asarray(point, dtype=float)
    if feasible:
        # marginal points may carry -1e-17 style roundoff on the boundary component
        point = np.where(point < 0.0, 0.0, point)
    return Equilibrium(
        point=point,
        label=label,
        variant=params.variant,
        feasible=bool(feasible),
        marginal=bool(marginal),
        residual=_residual(params, point),
        conditions=tuple(conditions),
    )


def equilibrium_origin(params: ParameterSet) -> Equilibrium:
    """Extinction of all populations; always feasible."""
    return _make(params, np.zeros(params.dim), Label.ORIGIN, True)


def predator_free_state(params: ParameterSet) -> np.ndarray:
    p = params
    if p.variant is Variant.CLASSICAL:
        return np.array([0.0, p.K])
    den = p.beta**2 * p.K + p.r * p.mu
    return np.array([0.0, p.r * p.K * p.mu / den, p.r * p.K * p.beta / den])


def equilibrium_predator_free(params: ParameterSet) -> Equilibrium:
    """Prey-only equilibrium with endemic disease, ``(0, S1, U1)``; always feasible.

    The classical model returns ``(0, K)``.
    """
    return _make(params, predator_free_state(params), Label.PREDATOR_FREE, True)


def _coexistence_point(p: ParameterSet) -> np.ndarray:
    m, a, b, r, K, be, mu = p.m, p.a, p.b, p.r, p.K, p.beta, p.mu
    if p.variant is Variant.CLASSICAL:
        Q = m / a
        return np.array([r / a * (1.0 - Q / K), Q])
    if p.variant is Variant.AVOIDED:
        return np.array([
            (a * r * K * mu - m * be**2 * K - m * r * mu) / (a**2 * K * mu),
            m / a,
            be * m / (mu * a),
        ])
    if p.variant is Variant.HARMLESS:
        den = a**2 * K * mu + b**2 * r
        if abs(den) <= DEGENERATE_RTOL * a**2 * K * mu:
            raise DegenerateDenominator(f"a^2 K mu + b^2 r = {den!r} vanishes")
        return np.array([
            (b * K * r * be + a * K * r * mu - m * r * mu - K * m * be**2) / den,
            K * (a * m * mu + b**2 * r - b * m * be) / den,
            (b * m * r + a * K * m * be - a * b * K * r) / den,
        ])
    den = a**2 * K * mu - 2.0 * a * b * K * be - b**2 * r
    if abs(den) <= DEGENERATE_RTOL * a**2 * K * mu:
        raise DegenerateDenominator(f"a^2 K mu - 2 a b K beta - b^2 r = {den!r} vanishes")
    return np.array([
        (a * K * r * mu - m * r * mu - K * m * be**2 - b * K * r * be) / den,
        (a * K * m * mu - b * K * m * be - b**2 * K * r) / den,
        (a * K * m * be + b * m * r - a * b * K * r) / den,
    ])


def feasibility_report(params: ParameterSet) -> list[Condition]:
    """Evaluate every feasibility inequality of the variant's coexistence point."""
    m, a, b, r, K, be, mu = (params.m, params.a, params.b, params.r,
                             params.K, params.beta, params.mu)
    v = params.variant
    if v is Variant.CLASSICAL:
        return [Condition("m < aK", m, "<", a * K)]
    if v is Variant.AVOIDED:
        return [Condition("m < m_dagger", m, "<", a * K * r * mu / (K * be**2 + r * mu))]
    if v is Variant.HARMLESS:
        return [
            Condition("Kr(b beta + a mu) >= m(r mu + K beta^2)",
                      K * r * (b * be + a * mu), ">=", m * (r * mu + K * be**2)),
            Condition("a m mu + b^2 r >= b m beta", a * m * mu + b**2 * r, ">=", b * m * be),
            Condition("m(b r + a K beta) > a b K r", m * (b * r + a * K * be), ">", a * b * K * r),
        ]
    sides = [
        ("2abK beta + b^2 r", 2 * a * b * K * be + b**2 * r, "a^2 K mu", a**2 * K * mu),
        ("m r mu + K m beta^2 + b K r beta", m * r * mu + K * m * be**2 + b * K * r * be,
         "a K r mu", a * K * r * mu),
        ("b K m beta + b^2 K r", b * K * m * be + b**2 * K * r, "a K m mu", a * K * m * mu),
        ("a b K r", a * b * K * r, "b m r + a K m beta", b * m * r + a * K * m * be),
    ]
    out = []
    for group, rel in (("f1", ">="), ("f2", "<=")):
        for lname, lhs, rname, rhs in sides:
            out.append(Condition(f"{lname} {rel} {rname}", lhs, rel, rhs, group=group))
    return out


def feasibility_verdict(conditions) -> tuple[bool, bool]:
    """Combine a condition list into ``(feasible, marginal)``.

    Conditions sharing a ``group`` form a conjunction; the groups are
    alternatives.
    """
    groups: dict[str, list[Condition]] = {}
    for c in conditions:
        groups.setdefault(c.group, []).append(c)
    feasible = False
    marginal = False
    for members in groups.values():
        if all(c.satisfied for c in members):
            feasible = True
            marginal = marginal or any(c.marginal for c in members)
    return feasible, marginal


def equilibrium_coexistence(params: ParameterSet) -> Equilibrium:
    """Closed-form interior equilibrium together with its feasibility verdict.

    Raises:
        DegenerateDenominator: the closed form is singular for these rates.
    """
    point = _coexistence_point(params)
    conditions = feasibility_report(params)
    feasible, marginal = feasibility_verdict(conditions)
    if not feasible and np.all(point >= 0.0):
        # only reachable on a degenerate boundary; the point itself is the ground truth
        feasible, marginal = True, True
    return _make(params, point, Label.COEXISTENCE, feasible, marginal, conditions)


def all_equilibria(params: ParameterSet) -> list[Equilibrium]:
    """Origin, predator-free and coexistence equilibria (the last omitted if degenerate)."""
    eqs = [equilibrium_origin(params), equilibrium_predator_free(params)]
    try:
        eqs.append(equilibrium_coexistence(params))
    except DegenerateDenominator:
        pass
    return eqs
