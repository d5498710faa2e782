"""The extremal coupling mu*_{a,p}: minimization of the per-function
threshold over the mass sphere, its mass-scaling law, the limit p -> 2*,
and the degenerate Euler-Lagrange residual.

mu*_{a,p} = inf over the sphere of mu_threshold(u).  The quotient is
invariant under Schwartz rearrangement in the favorable direction, so the
search is restricted to the admissible cone (nonnegative, radially
nonincreasing) without loss.  Projected gradient descent with a
backtracking line search keeps the recorded quotient history monotone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import gn_constant, sobolev_constant
from .errors import ConvergenceError, DegenerateInputError, ParameterError
from .fibering import mu_threshold, threshold_prefactor
from .functionals import Params
from .grid import (NormProfile, RadialFunction, RadialGrid, cone_project,
                   kinetic_form, radial_laplacian)

__all__ = [
    "ExtremalResult",
    "CriticalLimitResult",
    "minimize_mu",
    "mass_scaling",
    "mass_scaling_exponent",
    "critical_limit",
    "degenerate_el_residual",
    "gn_lower_bound",
]


@dataclass
class ExtremalResult:
    """Outcome of one quotient minimization."""

    mu_star: float
    minimizer: RadialFunction
    history: np.ndarray = field(repr=False)
    converged: bool
    iterations: int
    params: Params

    def threshold_of_minimizer(self) -> float:
        from .grid import norms

        prof = norms(self.minimizer, self.params.q, self.params.p)
        return mu_threshold(prof, self.params)


def _quotient_state(values, P: Params, grid: RadialGrid):
    w = grid.quad_weights
    eq, ep = P.qgq, P.pgp
    theta = (2.0 - eq) / (ep - 2.0)
    pref = threshold_prefactor(P)
    A, dA = kinetic_form(values, grid)
    B = float(np.dot(w, values ** P.q))
    p_eff = P.two_star if P.is_critical else P.p
    C = float(np.dot(w, values ** p_eff))
    if B <= 0.0 or C <= 0.0 or A <= 0.0:
        raise DegenerateInputError("quotient undefined on a degenerate profile")
    val = pref * A ** (theta + 1.0) / (B * C ** theta)
    return val, A, dA, B, C, theta, p_eff


def minimize_mu(P: Params, grid: RadialGrid, *, max_iter: int = 6000,
                rel_tol: float = 1e-10, window: int = 50,
                init: RadialFunction | None = None) -> ExtremalResult:
    """Minimize the per-function threshold over the admissible mass sphere.

    The coupling field of ``P`` plays no role (the quotient does not involve
    mu).  For p < 2* the infimum is attained and the minimizer is meaningful;
    at p = 2* the run is still performed and the value is an upper bound for
    the extremal coupling, tightening as R grows.

    Stops when the relative quotient change over ``window`` iterations drops
    below ``rel_tol``; otherwise returns converged=False with the history.
    """
    a = P.a
    if init is not None:
        u = cone_project(init.values.copy(), grid, a)
    else:
        u = cone_project(np.exp(-grid.nodes ** 2 / 2.0), grid, a)
    w = grid.quad_weights
    val, A, dA, B, C, theta, p_eff = _quotient_state(u, P, grid)
    tau = 0.1
    history = [val]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        # gradient of log(quotient) scaled back by the value; the kinetic
        # part takes the compact stencil Laplacian as its descent field
        # (consistent with dA, free of grid-parity modes)
        g = val * ((theta + 1.0) * (-2.0 * radial_laplacian(u, grid)) / A
                   - P.q * u ** (P.q - 1.0) / B
                   - theta * p_eff * u ** (p_eff - 1.0) / C)
        g -= (float(np.dot(w, g * u)) / a) * u
        accepted = False
        for _ in range(60):
            cand = cone_project(u - tau * g, grid, a)
            try:
                state = _quotient_state(cand, P, grid)
            except DegenerateInputError:
                tau *= 0.5
                continue
            if state[0] < val:
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            converged = True  # no descent direction left at line-search floor
            break
        u = cand
        val, A, dA, B, C, theta, p_eff = state
        history.append(val)
        tau *= 1.3
        if it > window and abs(history[-window] - val) <= rel_tol * abs(val):
            converged = True
            break
    minimizer = RadialFunction(grid, u, admissible=True)
    return ExtremalResult(mu_star=val, minimizer=minimizer,
                          history=np.asarray(history), converged=converged,
                          iterations=it, params=P)


def mass_scaling_exponent(P: Params) -> float:
    """Exponent e such that mu*_{a,p} = mu*_{1,p} a^{-e}.

    The underlying identity fixes (mu*)^kappa proportional to a^{-E} with
    kappa = (p gp - 2)/(p gp - q gq) and
    E = (2(1 - gamma_p) + ((p - q) N / p) kappa) * p / (N (p - 2)),
    so e = E / kappa.
    """
    eq, ep = P.qgq, P.pgp
    kappa = (ep - 2.0) / (ep - eq)
    E = (2.0 * (1.0 - P.gamma_p) + ((P.p - P.q) * P.N / P.p) * kappa) \
        * P.p / (P.N * (P.p - 2.0))
    return E / kappa


def mass_scaling(P: Params, a_from: float, a_to: float, mu_from: float) -> float:
    """Predicted mu*_{a_to,p} from mu*_{a_from,p}; strictly decreasing in a."""
    if not (a_from > 0 and a_to > 0):
        raise ParameterError("masses must be positive")
    e = mass_scaling_exponent(P)
    return mu_from * (a_to / a_from) ** (-e)


@dataclass
class CriticalLimitResult:
    """Raw subcritical thresholds along p_seq and the extrapolated limit."""

    p_seq: list
    values: list
    converged: list
    limit: float
    results: list = field(repr=False)


def critical_limit(P: Params, a: float, p_seq, grid: RadialGrid,
                   **opts) -> CriticalLimitResult:
    """Run minimize_mu along p_seq increasing to 2* and extrapolate.

    Aitken extrapolation on the last three successful values; failed members
    are recorded with value NaN and excluded.  Uses warm starts along the
    sequence.
    """
    ts = 2.0 * P.N / (P.N - 2.0)
    p_seq = list(p_seq)
    if any(p2 <= p1 for p1, p2 in zip(p_seq, p_seq[1:])) or not p_seq:
        raise ParameterError("p_seq must be strictly increasing")
    if p_seq[-1] > ts + 1e-12 or p_seq[0] <= 2.0 + 4.0 / P.N:
        raise ParameterError("p_seq must lie in (2 + 4/N, 2*]")
    values, flags, results = [], [], []
    warm = None
    for p in p_seq:
        Pp = Params(P.N, P.q, p, a, 0.0)
        try:
            res = minimize_mu(Pp, grid, init=warm, **opts)
            warm = res.minimizer
            values.append(res.mu_star)
            flags.append(res.converged)
            results.append(res)
        except (ConvergenceError, DegenerateInputError) as exc:
            values.append(float("nan"))
            flags.append(False)
            results.append(exc)
    good = [v for v in values if math.isfinite(v)]
    if len(good) >= 3:
        v1, v2, v3 = good[-3:]
        d1, d2 = v2 - v1, v3 - v2
        limit = v3 - d2 * d2 / (d2 - d1) if d2 != d1 else v3
    elif good:
        limit = good[-1]
    else:
        limit = float("nan")
    return CriticalLimitResult(p_seq=p_seq, values=values, converged=flags,
                               limit=limit, results=results)


def degenerate_el_residual(u: RadialFunction, mu_star: float, P: Params):
    """Residual of the degenerate-manifold Euler-Lagrange equation.

    L = -2 Delta u - mu* q gamma_q |u|^{q-2} u - 2* |u|^{2*-2} u should be a
    multiple of u at a minimizer of the critical quotient; lambda is fitted
    by L^2 projection and the relative L^2 residual of L - lambda u is
    returned.
    """
    if not P.is_critical:
        raise ParameterError("degenerate EL residual is defined at p = 2*")
    grid = u.grid
    v = u.values
    m2 = u.mass2()
    if m2 <= 0.0:
        raise DegenerateInputError("zero function")
    ts = P.two_star
    L = (-2.0 * radial_laplacian(v, grid)
         - mu_star * P.q * P.gamma_q * np.abs(v) ** (P.q - 2.0) * v
         - ts * np.abs(v) ** (ts - 2.0) * v)
    lam = grid.inner(L, v) / m2
    diff = L - lam * v
    num = math.sqrt(max(grid.inner(diff, diff), 0.0))
    den = math.sqrt(max(grid.inner(L, L), 1e-300))
    return num / den, lam


def gn_lower_bound(P: Params) -> float:
    """Interpolation lower bound for mu*_{a,p}.

    Bounding massq and massp by the sharp constants makes the quotient
    independent of grad2:
        mu*_{a,p} >= prefactor / (C_q^q a^{q(1-gq)/2} (K_p a^{p(1-gp)/2})^theta)
    with K_p = C_p^p for p < 2* and K_p = S^{-2*/2} at p = 2*.
    """
    eq, ep = P.qgq, P.pgp
    theta = (2.0 - eq) / (ep - 2.0)
    Cq = gn_constant(P.N, P.q) ** P.q
    if P.is_critical:
        Kp = sobolev_constant(P.N) ** (-P.two_star / 2.0)
        mass_p_factor = 1.0
    else:
        Kp = gn_constant(P.N, P.p) ** P.p
        mass_p_factor = P.a ** (P.p * (1.0 - P.gamma_p) / 2.0)
    return threshold_prefactor(P) / (
        Cq * P.a ** (P.q * (1.0 - P.gamma_q) / 2.0) * (Kp * mass_p_factor) ** theta
    )
