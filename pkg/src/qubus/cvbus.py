"""Coherent-state bus analytics: phase-slot arithmetic and capacity bounds.

The bus holds a coherent state on a circle of ``D`` phase slots; a
conditional rotation advances the slot index by the subsystem level.  Slots
are not orthogonal, so the usable dimension is capped by the amplitude: the
adjacent-slot overlap magnitude ``exp(alpha**2 (cos(2*pi/D) - 1))`` must stay
at or below a tolerance ``epsilon``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "CapacityBound",
    "CoherentBusSpec",
    "coherent_overlap",
    "max_dimension",
    "qubit_capacity",
    "sweep",
    "sweep_csv",
    "rotate_label",
]

SWEEP_CSV_HEADER = "alpha,epsilon,theta,d_max_real,d_max,qubit_capacity"


@dataclass(frozen=True, slots=True)
class CoherentBusSpec:
    """A coherent bus with ``dimension`` phase slots at amplitude ``alpha``;
    the slot spacing ``theta`` is always ``2*pi/dimension``."""

    alpha: float
    dimension: int

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")

    @property
    def theta(self) -> float:
        return 2.0 * math.pi / self.dimension


@dataclass(frozen=True, slots=True)
class CapacityBound:
    """Capacity of a coherent bus at one ``(alpha, epsilon)`` point.

    ``theta`` is the smallest slot spacing keeping the adjacent-slot overlap
    at ``epsilon``; ``d_max_real`` the real-valued bound ``2*pi/theta``;
    ``d_max`` its floor; ``qubit_capacity`` is ``floor(log2(d_max))``.  When
    even two slots overlap too much (arccos argument below -1) the bus holds
    a single state: ``theta`` and ``d_max_real`` are NaN, ``d_max`` is 1.
    """

    alpha: float
    epsilon: float
    theta: float
    d_max_real: float
    d_max: int
    qubit_capacity: int


def rotate_label(n: int, k: int, s: int, D: int) -> int:
    """Phase-slot index after ``k`` conditional rotations at subsystem level
    ``s``: ``(n + k*s) mod D``."""
    if not 0 <= n < D:
        raise ValueError(f"slot index {n} outside range(0, {D})")
    if k < 0 or s < 0:
        raise ValueError("repetition count and level must be nonnegative")
    return (n + k * s) % D


def coherent_overlap(alpha: float, n: int, m: int, D: int) -> complex:
    """Inner product of phase slots ``n`` and ``m``:
    ``exp(alpha**2 * (exp(i*dtheta) - 1))`` with ``dtheta = 2*pi*(m - n)/D``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not (0 <= n < D and 0 <= m < D):
        raise ValueError("slot indices must lie in range(0, D)")
    dtheta = 2.0 * math.pi * (m - n) / D
    return cmath.exp(alpha**2 * (cmath.exp(1j * dtheta) - 1.0))


def max_dimension(alpha: float, epsilon: float) -> CapacityBound:
    """Largest slot count keeping the adjacent-slot overlap magnitude at or
    below ``epsilon``.

    The bound is ``D <= 2*pi / arccos(ln(epsilon)/alpha**2 + 1)``; the
    integer capacity is its floor, and the overlap magnitude at ``d_max``
    is <= epsilon while at ``d_max + 1`` it exceeds epsilon.

    Args:
        alpha: coherent amplitude, > 0.
        epsilon: tolerated adjacent-slot overlap magnitude, in (0, 1).

    Raises:
        ValueError: alpha or epsilon outside their domains.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    argument = math.log(epsilon) / alpha**2 + 1.0
    if argument < -1.0:
        return CapacityBound(
            alpha=alpha,
            epsilon=epsilon,
            theta=math.nan,
            d_max_real=math.nan,
            d_max=1,
            qubit_capacity=0,
        )
    theta = math.acos(argument)
    d_max_real = 2.0 * math.pi / theta
    d_max = max(1, math.floor(d_max_real))
    return CapacityBound(
        alpha=alpha,
        epsilon=epsilon,
        theta=theta,
        d_max_real=d_max_real,
        d_max=d_max,
        qubit_capacity=int(math.floor(math.log2(d_max))),
    )


def qubit_capacity(alpha: float, epsilon: float) -> int:
    """Number of qubits a bus of dimension ``max_dimension`` can carry."""
    return max_dimension(alpha, epsilon).qubit_capacity


def sweep(alphas: list[float] | tuple[float, ...], epsilons: list[float] | tuple[float, ...]) -> tuple[CapacityBound, ...]:
    """Capacity bounds over a grid: one row per (epsilon, alpha) pair,
    epsilons outermost so each tolerance forms a contiguous curve."""
    if not alphas or not epsilons:
        raise ValueError("need at least one alpha and one epsilon")
    return tuple(
        max_dimension(alpha, epsilon) for epsilon in epsilons for alpha in alphas
    )


def _csv_number(value: float) -> str:
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".12g")


def sweep_csv(bounds: tuple[CapacityBound, ...] | list[CapacityBound]) -> str:
    """Render sweep rows as CSV with 12-significant-digit reals; capacity-1
    rows keep the fixed header and flag themselves with NaN angle columns."""
    lines = [SWEEP_CSV_HEADER]
    for bound in bounds:
        lines.append(
            ",".join(
                (
                    _csv_number(bound.alpha),
                    _csv_number(bound.epsilon),
                    _csv_number(bound.theta),
                    _csv_number(bound.d_max_real),
                    str(bound.d_max),
                    str(bound.qubit_capacity),
                )
            )
        )
    return "\n".join(lines) + "\n"
