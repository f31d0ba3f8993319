"""Rational rogue-wave solutions of i psi_t + psi_xx/2 + |psi|^2 psi = 0.

The closed forms are the first-order (Peregrine) and second-order
(Akhmediev-Peregrine) rational solitons on a unit background. A Strang
split-step propagator is provided as an independent numerical check.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteValue, StepTooLarge
from .wavelet import is_power_of_two

logger = logging.getLogger(__name__)

DEFAULT_N = 1024
DEFAULT_X_MIN = -20.0
DEFAULT_X_MAX = 20.0
STEPS_PER_UNIT_TIME = 1000
# bound on the nonlinear phase |psi|^2 * dt accumulated in one step
MAX_STEP_PHASE = 0.5


class SolitonKind(enum.Enum):
    PEREGRINE = "peregrine"
    AKHMEDIEV_PEREGRINE = "ap"

    @classmethod
    def parse(cls, name: str) -> "SolitonKind":
        key = name.strip().lower().replace("-", "_")
        aliases = {
            "peregrine": cls.PEREGRINE,
            "p": cls.PEREGRINE,
            "ap": cls.AKHMEDIEV_PEREGRINE,
            "akhmediev_peregrine": cls.AKHMEDIEV_PEREGRINE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown soliton kind {name!r}") from None


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid x_j = x_min + j*dx, j = 0..n_points-1."""

    n_points: int = DEFAULT_N
    x_min: float = DEFAULT_X_MIN
    x_max: float = DEFAULT_X_MAX

    def __post_init__(self):
        if not is_power_of_two(int(self.n_points)) or self.n_points < 2:
            raise ValueError(f"n_points must be a power of two >= 2, got {self.n_points}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def extent(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_points) * self.dx


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Envelope samples on ``grid`` at time ``time``. Values are read-only."""

    grid: Grid1D
    time: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise NonFiniteValue("field contains NaN or Inf")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "time", float(self.time))

    def __eq__(self, other):
        if not isinstance(other, ComplexField):
            return NotImplemented
        return (
            self.grid == other.grid
            and self.time == other.time
            and np.array_equal(self.values, other.values)
        )

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    def norm2(self) -> float:
        """Discrete L2 mass, sum |psi_j|^2 dx."""
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx)


def peregrine(x, t):
    """First-order rational soliton, peak 3 at (0, 0)."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return (1.0 - 4.0 * (1.0 + 2.0j * t) / (1.0 + 4.0 * x**2 + 4.0 * t**2)) * np.exp(1j * t)


def ap_polynomials(x, t):
    """The (G, H, D) polynomials of the second-order solution."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    x2, t2 = x * x, t * t
    g = 3.0 / 8.0 - 3.0 * x2 - 2.0 * x2**2 - 9.0 * t2 - 10.0 * t2**2 - 12.0 * x2 * t2
    h = 15.0 / 4.0 + 6.0 * x2 - 4.0 * x2**2 - 2.0 * t2 - 4.0 * t2**2 - 8.0 * x2 * t2
    d = (
        3.0 / 4.0
        + 9.0 * x2
        + 4.0 * x2**2
        + 16.0 / 3.0 * x2**3
        + 33.0 * t2
        + 36.0 * t2**2
        + 16.0 / 3.0 * t2**3
        - 24.0 * t2 * x2
        + 16.0 * t2 * x2**2
        + 16.0 * t2**2 * x2
    ) / 8.0
    return g, h, d


def akhmediev_peregrine(x, t):
    """Second-order rational soliton, peak 5 at (0, 0)."""
    g, h, d = ap_polynomials(x, t)
    t = np.asarray(t, dtype=float)
    return (1.0 + (g + 1j * t * h) / d) * np.exp(1j * t)


_GENERATORS = {
    SolitonKind.PEREGRINE: peregrine,
    SolitonKind.AKHMEDIEV_PEREGRINE: akhmediev_peregrine,
}


def evaluate_field(kind: SolitonKind, grid: Grid1D, t: float, x0: float = 0.0) -> ComplexField:
    """Sample the closed form on ``grid``; ``x0`` moves the soliton center."""
    values = _GENERATORS[SolitonKind(kind)](grid.x - x0, t)
    return ComplexField(grid=grid, time=t, values=values)


def propagate_nlse(
    field: ComplexField,
    t_target: float,
    n_steps: int | None = None,
    max_step_phase: float = MAX_STEP_PHASE,
) -> ComplexField:
    """Integrate the NLSE from ``field.time`` to ``t_target``.

    Second-order Strang splitting with the dispersive half-steps done
    exactly in Fourier space; boundaries are periodic. Each sub-step is
    unitary, so the discrete L2 mass is conserved up to round-off. When
    ``n_steps`` is omitted, STEPS_PER_UNIT_TIME steps per unit time are used.
    """
    span = float(t_target) - field.time
    if span == 0.0:
        return field
    if n_steps is None:
        n_steps = max(1, math.ceil(abs(span) * STEPS_PER_UNIT_TIME))
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    dt = span / n_steps

    psi = np.array(field.values)
    peak = float(np.max(np.abs(psi) ** 2))
    if peak * abs(dt) > max_step_phase:
        raise StepTooLarge(
            f"nonlinear phase per step {peak * abs(dt):.3g} exceeds {max_step_phase}"
        )

    k = 2.0 * np.pi * np.fft.fftfreq(field.grid.n_points, d=field.grid.dx)
    half_linear = np.exp(-0.25j * k**2 * dt)
    for step in range(n_steps):
        psi = np.fft.ifft(half_linear * np.fft.fft(psi))
        psi *= np.exp(1j * np.abs(psi) ** 2 * dt)
        psi = np.fft.ifft(half_linear * np.fft.fft(psi))
        if not np.all(np.isfinite(psi)):
            raise NonFiniteValue(f"non-finite field after step {step + 1}")
    logger.debug("propagated %d steps of dt=%g", n_steps, dt)
    return ComplexField(grid=field.grid, time=float(t_target), values=psi)
