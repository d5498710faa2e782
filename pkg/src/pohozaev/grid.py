"""Radial discretization of R^N: grids, quadrature, norms, dilations.

Functions of x in R^N are reduced to profiles u(r) on a uniform grid over
[0, R] with a far-field truncation u(R) = 0.  Integrals carry the full
surface measure omega_{N-1} r^{N-1} dr; the quadrature integrates a
piecewise-linear interpolant against that measure exactly, so the weights
are positive, the ball volume is reproduced to machine precision, and the
origin node receives a nonzero weight.

The mass-preserving dilation (u)_s(x) = s^{N/2} u(s x) is resampled back
onto the same grid with monotone cubic interpolation; its exact transform
laws on the norm quantities (grad2 -> s^2 grad2, massq -> s^{q gamma_q}
massq, mass2 invariant) are used analytically elsewhere, the resampled
profile only has to track them to interpolation accuracy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DegenerateInputError, ParameterError, ResolutionWarning

__all__ = [
    "RadialGrid",
    "RadialFunction",
    "NormProfile",
    "make_grid",
    "norms",
    "dilate",
    "project_mass",
    "sphere_area",
]


def sphere_area(N: int) -> float:
    """Surface area omega_{N-1} of the unit (N-1)-sphere in R^N."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid on [0, R] with weighted-measure quadrature.

    nodes[i] = i*R/M; quad_weights[i] integrate hat functions against
    omega_{N-1} r^{N-1} dr, so sum(quad_weights) equals the volume of the
    ball of radius R exactly.
    """

    N: int
    R: float
    M: int
    nodes: np.ndarray = field(repr=False)
    quad_weights: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return self.R / self.M

    def integrate(self, samples: np.ndarray) -> float:
        return float(np.dot(self.quad_weights, samples))

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.dot(self.quad_weights, u * v))


@dataclass(frozen=True)
class RadialFunction:
    """Sampled radial profile on a RadialGrid.

    ``admissible=True`` asserts the radial-decreasing ansatz: nonnegative
    values, nonincreasing in r.  Constructors enforce the invariants; use
    :func:`radial_function` / :meth:`from_callable` rather than bypassing
    them.
    """

    grid: RadialGrid
    values: np.ndarray = field(repr=False)
    admissible: bool = False

    def __post_init__(self):
        v = self.values
        if v.shape != (self.grid.M + 1,):
            raise ParameterError(
                f"values shape {v.shape} does not match grid with M={self.grid.M}"
            )
        if not np.all(np.isfinite(v)):
            raise ParameterError("values must be finite")
        if v[-1] != 0.0:
            raise ParameterError("far-field truncation requires u(R) = 0")
        if self.admissible:
            scale = float(np.max(np.abs(v))) if v.size else 0.0
            tol = 1e-12 * (1.0 + scale)
            if np.any(v < -tol) or np.any(np.diff(v) > tol):
                raise ParameterError(
                    "admissible profiles must be nonnegative and nonincreasing"
                )

    @classmethod
    def from_callable(cls, grid: RadialGrid, f, admissible: bool = False):
        v = np.asarray(f(grid.nodes), dtype=float).copy()
        v[-1] = 0.0
        if admissible:
            v = sanitize_admissible(v)
        return cls(grid, v, admissible)

    def mass2(self) -> float:
        return self.grid.inner(self.values, self.values)


def sanitize_admissible(values: np.ndarray) -> np.ndarray:
    """Clamp a profile onto the admissible cone (nonnegative, nonincreasing)."""
    v = np.minimum.accumulate(np.maximum(values, 0.0))
    v[-1] = 0.0
    return v


def cone_project(values: np.ndarray, grid: RadialGrid, a: float | None = None) -> np.ndarray:
    """L^2(w)-projection onto the admissible cone, optionally mass-rescaled.

    Weighted isotonic regression (PAVA) gives the closest nonincreasing
    sequence, negatives are clipped, and when ``a`` is given the result is
    rescaled onto the mass sphere.
    """
    from scipy.optimize import isotonic_regression

    v = isotonic_regression(values, weights=grid.quad_weights, increasing=False).x
    v = np.maximum(v, 0.0)
    v[-1] = 0.0
    if a is not None:
        m2 = float(np.dot(grid.quad_weights, v * v))
        if m2 <= 0.0:
            raise DegenerateInputError("cone projection produced the zero profile")
        v *= math.sqrt(a / m2)
    return v


@dataclass(frozen=True)
class NormProfile:
    """The reduced state of a profile: all fibering algebra is exact on it.

    grad2 = |grad u|_2^2, mass2 = |u|_2^2, massq = |u|_q^q, massp = |u|_p^p,
    mass2s = |u|_{2*}^{2*}.  When p = 2* the massp slot simply repeats
    mass2s.
    """

    grad2: float
    mass2: float
    massq: float
    massp: float
    mass2s: float

    def __post_init__(self):
        for name in ("grad2", "mass2", "massq", "massp", "mass2s"):
            x = getattr(self, name)
            if not math.isfinite(x) or x < 0.0:
                raise ParameterError(f"{name} must be a finite nonnegative real")


def make_grid(N: int, R: float, M: int) -> RadialGrid:
    """Build the uniform radial grid with exact-measure trapezoid weights.

    The weight of node i is the integral of its hat function against
    omega_{N-1} r^{N-1} dr, computed from the closed-form moments of
    r^{N-1} on each cell.
    """
    if int(N) != N or N < 3:
        raise ParameterError("spatial dimension N must be an integer >= 3")
    if not (R > 0 and math.isfinite(R)):
        raise ParameterError("domain radius R must be positive and finite")
    if int(M) != M or M < 16:
        raise ParameterError("grid must have at least 16 intervals")
    N, M = int(N), int(M)
    r = np.linspace(0.0, R, M + 1)
    a, b = r[:-1], r[1:]
    h = R / M
    mom0 = (b ** N - a ** N) / N                    # integral of r^{N-1}
    mom1 = (b ** (N + 1) - a ** (N + 1)) / (N + 1)  # integral of r^N
    w = np.zeros(M + 1)
    w[:-1] += (b * mom0 - mom1) / h
    w[1:] += (mom1 - a * mom0) / h
    w *= sphere_area(N)
    r.flags.writeable = False
    w.flags.writeable = False
    return RadialGrid(N=N, R=float(R), M=M, nodes=r, quad_weights=w)


def radial_derivative(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Centered-difference u'(r); even extension at r=0, one-sided at r=R."""
    h = grid.h
    g = np.empty_like(values)
    g[0] = 0.0
    g[1:-1] = (values[2:] - values[:-2]) / (2.0 * h)
    g[-1] = (values[-1] - values[-2]) / h
    return g


def kinetic_form(values: np.ndarray, grid: RadialGrid):
    """Return (|grad u|_2^2, d/du of it) for the discrete quadratic form.

    The gradient returned is the plain partial-derivative vector dA/du_j;
    divide by quad_weights for the L^2(w) Riesz representative.
    """
    h = grid.h
    w = grid.quad_weights
    g = radial_derivative(values, grid)
    A = float(np.dot(w, g * g))
    dA = np.zeros_like(values)
    wg = w * g
    dA[2:] += wg[1:-1] / h
    dA[:-2] -= wg[1:-1] / h
    dA[-1] += 2.0 * wg[-1] / h
    dA[-2] -= 2.0 * wg[-1] / h
    return A, dA


def radial_laplacian(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Second-order Delta u = u'' + (N-1) u'/r with the even extension at 0
    and a zero Dirichlet ghost beyond R."""
    h, N = grid.h, grid.N
    r = grid.nodes
    v = values
    lap = np.empty_like(v)
    lap[0] = 2.0 * N * (v[1] - v[0]) / h ** 2
    lap[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h ** 2 \
        + (N - 1) / r[1:-1] * (v[2:] - v[:-2]) / (2.0 * h)
    lap[-1] = (0.0 - 2.0 * v[-1] + v[-2]) / h ** 2 \
        + (N - 1) / r[-1] * (0.0 - v[-2]) / (2.0 * h)
    return lap


def norms(u: RadialFunction, q: float, p: float) -> NormProfile:
    """Evaluate the NormProfile of u for exponents (q, p).

    grad2 uses centered differences with u'(0) = 0; every integral uses the
    grid quadrature.  Requires 2 < q < p <= 2N/(N-2).
    """
    grid = u.grid
    two_star = 2.0 * grid.N / (grid.N - 2.0)
    if not (2.0 < q < p <= two_star + 1e-12):
        raise ParameterError(
            f"exponents must satisfy 2 < q < p <= 2N/(N-2) = {two_star}"
        )
    w = grid.quad_weights
    v = u.values
    absv = np.abs(v)
    A, _ = kinetic_form(v, grid)
    mass2 = float(np.dot(w, v * v))
    massq = float(np.dot(w, absv ** q))
    mass2s = float(np.dot(w, absv ** two_star))
    massp = mass2s if p >= two_star - 1e-12 else float(np.dot(w, absv ** p))
    return NormProfile(grad2=A, mass2=mass2, massq=massq, massp=massp,
                       mass2s=mass2s)


def dilate(u: RadialFunction, s: float) -> RadialFunction:
    """Mass-preserving dilation (u)_s(x) = s^{N/2} u(s x), resampled.

    Monotone cubic (PCHIP) interpolation keeps admissible profiles in the
    admissible cone; the grid support shrinks by 1/s, and values beyond R
    are taken as zero when s < 1.
    """
    if not (s > 0.0 and math.isfinite(s)):
        raise ParameterError("dilation parameter s must be positive")
    if s == 1.0:
        return u
    grid = u.grid
    if grid.M / s < 32:
        warnings.warn(
            f"dilation s={s:g} leaves fewer than 32 grid cells of support",
            ResolutionWarning,
            stacklevel=2,
        )
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        # flat data segments make PCHIP's internal harmonic mean overflow
        # benignly; the derivative is set to zero there anyway
        interp = PchipInterpolator(grid.nodes, u.values, extrapolate=False)
        rs = grid.nodes * s
        vals = np.where(rs <= grid.R, interp(np.minimum(rs, grid.R)), 0.0)
    vals = s ** (grid.N / 2.0) * np.nan_to_num(vals, nan=0.0)
    vals[-1] = 0.0
    if u.admissible:
        vals = sanitize_admissible(vals)
    return RadialFunction(grid, vals, u.admissible)


def project_mass(u: RadialFunction, a: float) -> RadialFunction:
    """Rescale u onto the mass sphere |u|_2^2 = a."""
    if not (a > 0.0 and math.isfinite(a)):
        raise ParameterError("target mass must be positive")
    m2 = u.mass2()
    if m2 <= 0.0:
        raise DegenerateInputError("cannot project the zero function onto a mass sphere")
    c = math.sqrt(a / m2)
    if c == 1.0:
        return u
    return RadialFunction(u.grid, c * u.values, u.admissible)
