"""Sharp constants: Sobolev, Gagliardo-Nirenberg, and the derived
threshold constants, plus the extremal bubble family.

Conventions (both verified numerically by the test suite):

    S      = inf |grad u|_2^2 / |u|_{2*}^2,  attained by the bubble family;
    C_{N,q}: the best constant in |u|_q <= C |grad u|_2^{gamma_q} |u|_2^{1-gamma_q},
             attained by the ground state of -Delta W + W = W^{q-1}.

The bundle also carries the two threshold constants built from S and
C_{N,q} whose minimum gates the small-coupling existence theory, and the
prefactor of the closed-form per-function threshold at the critical
exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError
from .grid import RadialFunction, RadialGrid, make_grid, norms
from .ode import sample_decaying, soliton_amplitude

__all__ = [
    "ConstantBundle",
    "sobolev_constant",
    "talenti_bubble",
    "gn_constant",
    "alpha_threshold",
    "critical_threshold_prefactor",
]


@dataclass(frozen=True)
class ConstantBundle:
    """Constants for one (N, q): alpha = min(C1, C2) gates existence."""

    N: int
    q: float
    S: float
    C_Nq: float
    C1: float
    C2: float
    alpha: float
    Ctilde: float


def sobolev_constant(N: int) -> float:
    """Closed-form sharp Sobolev constant pi N (N-2) (Gamma(N/2)/Gamma(N))^{2/N}."""
    if int(N) != N or N < 3:
        raise ParameterError("Sobolev constant requires integer N >= 3")
    return math.pi * N * (N - 2) * math.exp(
        (math.lgamma(N / 2.0) - math.lgamma(float(N))) * 2.0 / N
    )


def _smooth_step(x: np.ndarray) -> np.ndarray:
    # C^2 quintic ramp: 0 at 0, 1 at 1, zero first and second derivatives
    x = np.clip(x, 0.0, 1.0)
    return x ** 3 * (6.0 * x ** 2 - 15.0 * x + 10.0)


def talenti_bubble(N: int, eps: float, grid: RadialGrid, cutoff: float) -> RadialFunction:
    """Cut-off extremal bubble W_eps = chi * U_eps on the grid.

    U_eps(r) = [N(N-2)]^{(N-2)/4} (eps/(eps^2 + r^2))^{(N-2)/2}; chi is a C^2
    radial cut-off equal to 1 on [0, cutoff/2] and 0 beyond cutoff.
    """
    if not (eps > 0 and math.isfinite(eps)):
        raise ParameterError("bubble width eps must be positive")
    if not (0.0 < cutoff <= grid.R):
        raise ParameterError("cutoff must lie in (0, grid.R]")
    r = grid.nodes
    U = (N * (N - 2.0)) ** ((N - 2.0) / 4.0) * (eps / (eps ** 2 + r ** 2)) ** ((N - 2.0) / 2.0)
    chi = 1.0 - _smooth_step((r - cutoff / 2.0) / (cutoff / 2.0))
    vals = U * chi
    vals[-1] = 0.0
    return RadialFunction(grid, vals, admissible=True)


# reference grid for soliton quotients: fine enough that the quadrature
# error of the quotient sits well below 1e-6 relative
_GN_GRID = (30.0, 40000)


@lru_cache(maxsize=None)
def gn_constant(N: int, q: float) -> float:
    """Sharp Gagliardo-Nirenberg constant for |u|_q, computed numerically.

    q = 2 returns 1 exactly.  Otherwise the radial ground state of
    -Delta W + W = W^{q-1} is found by shooting on W(0) and the invariant
    quotient |W|_q / (|grad W|_2^{gamma_q} |W|_2^{1-gamma_q}) is returned.
    Results are cached per (N, q); the cache is read-only after insertion.
    """
    if int(N) != N or N < 3:
        raise ParameterError("gn_constant requires integer N >= 3")
    two_star = 2.0 * N / (N - 2.0)
    if not (2.0 <= q < two_star):
        raise ParameterError(f"gn_constant requires 2 <= q < 2* = {two_star}")
    if q == 2.0:
        return 1.0
    R, M = _GN_GRID
    _, sol = soliton_amplitude(N, q, rmax=R)
    grid = make_grid(N, R, M)
    W = RadialFunction(grid, sample_decaying(sol, grid), admissible=True)
    prof = norms(W, q=q, p=0.5 * (q + two_star))
    gq = N * (q - 2.0) / (2.0 * q)
    return prof.massq ** (1.0 / q) / (
        prof.grad2 ** (gq / 2.0) * prof.mass2 ** ((1.0 - gq) / 2.0)
    )


def critical_threshold_prefactor(N: int, q: float) -> float:
    """Prefactor of the per-function threshold at p = 2*:
    (2* - 2)(2 - q gq)^theta / (gamma_q (2* - q gq)^{theta + 1}),
    theta = (2 - q gq)/(2* - 2)."""
    from .fibering import threshold_prefactor
    from .functionals import Params

    ts = 2.0 * N / (N - 2.0)
    return threshold_prefactor(Params(N, q, ts, 1.0, 0.0))


@lru_cache(maxsize=None)
def alpha_threshold(N: int, q: float) -> ConstantBundle:
    """Evaluate the small-coupling threshold constants for (N, q).

    C1 and C2 are the two explicit expressions in S and C_{N,q} whose
    minimum alpha bounds the dimensionless coupling mu a^{q(1-gamma_q)/2}
    in the classical existence range; Ctilde is the closed-form prefactor
    of the critical per-function threshold.
    """
    if not (2.0 < q < 2.0 + 4.0 / N):
        raise ParameterError("alpha_threshold requires 2 < q < 2 + 4/N")
    ts = 2.0 * N / (N - 2.0)
    gq = N * (q - 2.0) / (2.0 * q)
    qgq = N * (q - 2.0) / 2.0
    S = sobolev_constant(N)
    C = gn_constant(N, q)
    Cq = C ** q
    theta = (2.0 - qgq) / (ts - 2.0)
    C1 = (ts * S ** (ts / 2.0) * (2.0 - qgq) / (2.0 * (ts - qgq))) ** theta \
        * q * (ts - 2.0) / (2.0 * Cq * (ts - qgq))
    C2 = (2.0 * ts / (N * gq * Cq * (ts - qgq))) \
        * (qgq * S ** (N / 2.0) / (2.0 - qgq)) ** ((2.0 - qgq) / 2.0)
    return ConstantBundle(
        N=int(N), q=float(q), S=S, C_Nq=C, C1=C1, C2=C2,
        alpha=min(C1, C2), Ctilde=critical_threshold_prefactor(N, q),
    )
