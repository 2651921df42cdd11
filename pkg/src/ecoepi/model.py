"""Parameters, vector fields and Jacobians of the predator-prey models.

All three ecoepidemic variants are written in the singularity-free
coordinates ``(P, S, U)`` with ``U = sqrt(I)``:

    dP/dt = P (-m + a S + s b U)
    dS/dt = S [-beta U + r (1 - S/K) - a P]
    dU/dt = (-mu U + beta S - b P) / 2

where ``s = +1`` when infected prey are harmless to predators, ``s = -1``
when they are toxic, and ``b = 0`` when predators avoid them.  The
classical reference model acts on ``(P, Q)``:

    dP/dt = -m P + a P Q
    dQ/dt = r Q (1 - Q/K) - a P Q
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np


class Variant(str, enum.Enum):
    """Model variant, distinguished by how predators treat infected prey."""

    CLASSICAL = "classical"
    HARMLESS = "harmless"
    AVOIDED = "avoided"
    TOXIC = "toxic"

    @property
    def sigma(self) -> int:
        """Sign of the predator's gain from the infected-herd contact term."""
        return _SIGMA[self]

    @property
    def dim(self) -> int:
        return 2 if self is Variant.CLASSICAL else 3

    @classmethod
    def parse(cls, value: "str | Variant") -> "Variant":
        if isinstance(value, Variant):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown variant {value!r} (expected one of {names})") from None


_SIGMA = {
    Variant.CLASSICAL: 0,
    Variant.HARMLESS: 1,
    Variant.AVOIDED: 0,
    Variant.TOXIC: -1,
}

PARAM_NAMES = ("m", "a", "b", "r", "K", "beta", "mu")


@dataclass(frozen=True)
class ParameterSet:
    """The seven rates of the models plus the variant tag.

    ``b`` is forced to zero for the avoided variant, so that every formula
    can use ``params.b`` without special cases.
    """

    m: float
    a: float
    b: float
    r: float
    K: float
    beta: float
    mu: float
    variant: Variant = Variant.HARMLESS

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        for name in PARAM_NAMES:
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"parameter {name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("m", "a", "r", "K", "beta", "mu"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"parameter {name} must be positive, got {getattr(self, name)!r}")
        if self.b < 0.0:
            raise ValueError(f"parameter b must be nonnegative, got {self.b!r}")
        if self.variant is Variant.AVOIDED:
            object.__setattr__(self, "b", 0.0)

    @property
    def sigma(self) -> int:
        return self.variant.sigma

    @property
    def dim(self) -> int:
        return self.variant.dim

    def replace(self, **changes) -> "ParameterSet":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in PARAM_NAMES}


def as_state(params: ParameterSet, x) -> np.ndarray:
    """Validate ``x`` against the variant's state dimension and return a float array."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (params.dim,):
        raise ValueError(
            f"{params.variant.value} model expects a state of length {params.dim}, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"state must be finite, got {arr!r}")
    return arr


def _field(p: ParameterSet, x: np.ndarray) -> np.ndarray:
    if p.variant is Variant.CLASSICAL:
        P, Q = x
        return np.array([P * (-p.m + p.a * Q), Q * (p.r * (1.0 - Q / p.K) - p.a * P)])
    P, S, U = x
    return np.array([
        P * (-p.m + p.a * S + p.sigma * p.b * U),
        S * (-p.beta * U + p.r * (1.0 - S / p.K) - p.a * P),
        0.5 * (-p.mu * U + p.beta * S - p.b * P),
    ])


def vector_field(params: ParameterSet, x) -> np.ndarray:
    """Right-hand side of the selected variant at state ``x``."""
    return _field(params, as_state(params, x))


def jacobian(params: ParameterSet, x) -> np.ndarray:
    """Analytic Jacobian of :func:`vector_field`."""
    p = params
    x = as_state(p, x)
    if p.variant is Variant.CLASSICAL:
        P, Q = x
        return np.array([
            [-p.m + p.a * Q, p.a * P],
            [-p.a * Q, p.r - 2.0 * p.r / p.K * Q - p.a * P],
        ])
    P, S, U = x
    sb = p.sigma * p.b
    return np.array([
        [-p.m + p.a * S + sb * U, p.a * P, sb * P],
        [-p.a * S, -p.beta * U + p.r - 2.0 * p.r / p.K * S - p.a * P, -p.beta * S],
        [-0.5 * p.b, 0.5 * p.beta, -0.5 * p.mu],
    ])


def to_infected_space(x) -> np.ndarray:
    """Map ``(P, S, U)`` to ``(P, S, I)`` with ``I = U**2``."""
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != 3:
        raise ValueError(f"expected (..., 3) states, got shape {arr.shape}")
    if np.any(arr[..., 2] < 0.0):
        raise ValueError("U = sqrt(I) must be nonnegative")
    out = arr.copy()
    out[..., 2] = arr[..., 2] ** 2
    return out


def from_infected_space(y) -> np.ndarray:
    """Inverse of :func:`to_infected_space`."""
    arr = np.asarray(y, dtype=float)
    if arr.shape[-1] != 3:
        raise ValueError(f"expected (..., 3) states, got shape {arr.shape}")
    if np.any(arr[..., 2] < 0.0):
        raise ValueError("infected density I must be nonnegative")
    out = arr.copy()
    out[..., 2] = np.sqrt(arr[..., 2])
    return out


def infected_space_field(params: ParameterSet, y) -> np.ndarray:
    """Original (singular) right-hand side in ``(P, S, I)`` coordinates.

    Only defined for the three ecoepidemic variants; used to cross-check the
    transformed system away from ``I = 0``.
    """
    p = params
    if p.variant is Variant.CLASSICAL:
        raise ValueError("the classical model has no infected class")
    P, S, I = np.asarray(y, dtype=float)
    root = math.sqrt(I)
    return np.array([
        -p.m * P + p.a * P * S + p.sigma * p.b * P * root,
        -p.beta * S * root + p.r * S * (1.0 - S / p.K) - p.a * P * S,
        -p.mu * I + p.beta * S * root - p.b * P * root,
    ])
