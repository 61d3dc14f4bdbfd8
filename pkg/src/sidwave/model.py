"""PDE instance, radial mesh, initial data and radial calculus.

Everything lives on a uniform radial mesh ``r_j = j*dr`` on ``[0, r_max]``.
For ``n = 1`` the half line stands for the whole line through the even
extension, so integrals carry a factor 2 there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

Field = np.ndarray
"""Samples of a radial function at the grid nodes (length ``nr + 1``)."""

NONLINEARITIES = ("abs_pow", "signed_pow", "neg_abs_pow", "none")

# omega_{n-1}: measure of the unit sphere S^{n-1}; n=1 counts both half lines.
SPHERE_MEASURE = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


class ConfigurationError(ValueError):
    """Invalid model, grid or experiment configuration."""


@dataclass(frozen=True)
class ScaleInvariant:
    """Damping ``mu / (1 + t)``."""

    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ConfigurationError(f"scale-invariant damping needs mu > 0, got {self.mu}")

    def __call__(self, t):
        return self.mu / (1.0 + t)


@dataclass(frozen=True)
class PowerLaw:
    """Damping ``(1 + t)^(-beta)`` with ``beta > 1`` (non-effective regime)."""

    beta: float

    def __post_init__(self):
        if not self.beta > 1:
            raise ConfigurationError(f"power-law damping needs beta > 1, got {self.beta}")

    def __call__(self, t):
        return (1.0 + t) ** (-self.beta)


@dataclass(frozen=True)
class Undamped:
    """``b = 0``: the free wave equation, used as a conservation reference."""

    def __call__(self, t):
        return 0.0


Damping = Union[ScaleInvariant, PowerLaw, Undamped]


def make_damping(mu: Optional[float] = None, beta: Optional[float] = None) -> Damping:
    if mu is not None and beta is not None:
        raise ConfigurationError("give either mu or beta, not both")
    if beta is not None:
        return PowerLaw(float(beta))
    if mu is None or mu == 0:
        return Undamped()
    return ScaleInvariant(float(mu))


@dataclass(frozen=True)
class ModelSpec:
    """``u_tt - Lap u + b(t) u_t = f(u) + s(t, r)`` in ``n`` radial dimensions."""

    n: int
    damping: Damping
    p: float = 2.0
    nonlinearity: str = "abs_pow"
    forcing: Optional[Callable[[float, np.ndarray], np.ndarray]] = field(
        default=None, compare=False
    )

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ConfigurationError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.nonlinearity not in NONLINEARITIES:
            raise ConfigurationError(f"unknown nonlinearity {self.nonlinearity!r}")
        if not self.p > 1:
            raise ConfigurationError(f"power must exceed 1, got {self.p}")
        if self.n == 3 and self.p > 3 and self.nonlinearity != "none":
            # energy-subcritical range p <= n/(n-2)
            raise ConfigurationError(f"n=3 requires p <= 3, got {self.p}")

    @property
    def mu(self) -> Optional[float]:
        if isinstance(self.damping, ScaleInvariant):
            return self.damping.mu
        if isinstance(self.damping, Undamped):
            return 0.0
        return None

    @property
    def is_linear(self) -> bool:
        return self.nonlinearity == "none"

    def b(self, t):
        return self.damping(t)

    def f(self, u: np.ndarray) -> np.ndarray:
        kind = self.nonlinearity
        if kind == "none":
            return np.zeros_like(u)
        a = np.abs(u) ** self.p
        if kind == "abs_pow":
            return a
        if kind == "neg_abs_pow":
            return -a
        return np.sign(u) * a

    def f_slope(self, supnorm: float) -> float:
        """Bound on ``|f'(u)|`` for ``|u| <= supnorm``."""
        if self.is_linear:
            return 0.0
        return self.p * supnorm ** (self.p - 1.0)


@dataclass(frozen=True)
class RadialGrid:
    r_max: float
    nr: int

    @property
    def dr(self) -> float:
        return self.r_max / self.nr

    @property
    def r(self) -> np.ndarray:
        return np.arange(self.nr + 1) * self.dr

    @property
    def size(self) -> int:
        return self.nr + 1

    def zeros(self) -> Field:
        return np.zeros(self.nr + 1)


def make_grid(r_max: float, nr: int) -> RadialGrid:
    if not r_max > 0:
        raise ConfigurationError(f"r_max must be positive, got {r_max}")
    if int(nr) != nr or nr < 16:
        raise ConfigurationError(f"nr must be an integer >= 16, got {nr}")
    return RadialGrid(float(r_max), int(nr))


def check_field(values: np.ndarray, grid: RadialGrid) -> Field:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (grid.size,):
        raise ValueError(f"field of shape {values.shape} does not match grid of {grid.size} nodes")
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("field has non-finite entries")
    return values


# ---------------------------------------------------------------------------
# initial data


def smoothstep(x):
    """Quintic ``6x^5 - 15x^4 + 10x^3`` clamped to [0, 1]; C^2 at both ends."""
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0)


@dataclass(frozen=True)
class PolynomialBump:
    """``(1 - (r/r0)^2)_+^k`` scaled by ``amplitude`` (u0) and ``velocity`` (u1)."""

    amplitude: float = 1.0
    r0: float = 1.0
    k: int = 3
    velocity: float = 0.0

    def __post_init__(self):
        if self.k < 2:
            raise ConfigurationError("bump smoothness k must be >= 2")
        if not self.r0 > 0:
            raise ConfigurationError("bump radius must be positive")

    @property
    def support(self) -> float:
        return self.r0

    def shape(self, r):
        r = np.asarray(r, dtype=np.float64)
        s = np.clip(1.0 - (r / self.r0) ** 2, 0.0, None)
        return np.where(r < self.r0, s**self.k, 0.0)


@dataclass(frozen=True)
class TruncatedGaussian:
    """``exp(-(r/width)^2)`` times a C^2 cutoff falling from 1 at cutoff/2 to 0 at cutoff."""

    amplitude: float = 1.0
    width: float = 0.5
    cutoff: float = 2.0
    velocity: float = 0.0

    def __post_init__(self):
        if not (self.width > 0 and self.cutoff > 0):
            raise ConfigurationError("gaussian width and cutoff must be positive")

    @property
    def support(self) -> float:
        return self.cutoff

    def shape(self, r):
        r = np.asarray(r, dtype=np.float64)
        half = 0.5 * self.cutoff
        window = 1.0 - smoothstep((r - half) / half)
        return np.where(r < self.cutoff, np.exp(-((r / self.width) ** 2)) * window, 0.0)


Profile = Union[PolynomialBump, TruncatedGaussian]


@dataclass(frozen=True)
class InitialData:
    profile: Profile
    u0: Field
    u1: Field


def sample_initial_data(profile: Profile, grid: RadialGrid) -> InitialData:
    if profile.support >= grid.r_max:
        raise ConfigurationError(
            f"data support {profile.support} does not fit inside r_max={grid.r_max}"
        )
    shape = profile.shape(grid.r)
    shape[grid.r >= profile.support] = 0.0
    return InitialData(profile, profile.amplitude * shape, profile.velocity * shape)


# ---------------------------------------------------------------------------
# radial calculus


def quadrature_weights(grid: RadialGrid, n: int) -> np.ndarray:
    """Trapezoid weights so that ``w @ f`` approximates the integral over R^n."""
    w = np.full(grid.size, grid.dr)
    w[0] *= 0.5
    w[-1] *= 0.5
    return SPHERE_MEASURE[n] * w * grid.r ** (n - 1)


def radial_integral(f: np.ndarray, grid: RadialGrid, n: int) -> float:
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (grid.size,):
        raise ValueError(f"field of shape {f.shape} does not match grid of {grid.size} nodes")
    return float(quadrature_weights(grid, n) @ f)


def radial_derivative(f: np.ndarray, grid: RadialGrid) -> Field:
    f = np.asarray(f, dtype=np.float64)
    h = grid.dr
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    d[0] = 0.0  # even symmetry
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return d
