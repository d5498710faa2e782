"""Radial ODE machinery shared by the constants and solver modules.

Two complementary tools for -Delta v + v = sum_k c_k |v|^{p_k - 2} v on
radial profiles:

* shooting with adaptive integration (solve_ivp) and bisection, used where
  a guaranteed bracket matters (the scalar-field ground state, the
  amplitude-parametrized solution branch);
* a damped Newton iteration on the second-order finite-difference
  discretization with a banded Jacobian, used to polish profiles on a grid
  to machine-level residuals.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded

from .errors import ConvergenceError
from .grid import RadialGrid

__all__ = [
    "shoot_profile",
    "soliton_amplitude",
    "sample_decaying",
    "newton_ode",
    "ode_residual",
]


def _nonlin(W, coeffs):
    out = np.zeros_like(W)
    for c, p in coeffs:
        out += c * np.abs(W) ** (p - 2.0) * W
    return out


def shoot_profile(N, coeffs, sigma, rmax, rtol=1e-10, atol=1e-13):
    """Integrate v'' + (N-1)v'/r = v - f(v) from v(0)=sigma, v'(0)=0.

    Returns (crossed, sol): crossed is True when v hits zero from above
    before rmax (amplitude/coupling too strong), sol is the solve_ivp
    result with dense output.
    """
    def rhs(r, y):
        W, V = y
        f = W - _nonlin(np.asarray(W), coeffs)
        dV = f - (N - 1) / r * V if r > 0.0 else f / N
        return (V, float(dV))

    def cross(r, y):
        return y[0]

    cross.terminal = True
    cross.direction = -1
    sol = solve_ivp(rhs, (0.0, rmax), [sigma, 0.0], events=[cross],
                    rtol=rtol, atol=atol, dense_output=True)
    return bool(sol.t_events[0].size), sol


def soliton_amplitude(N, q, rmax=30.0, iters=70):
    """Shooting amplitude of the ground state of -Delta W + W = W^{q-1}.

    Bisects v(0) between the hovering regime (stays positive, too little
    energy) and the crossing regime.  Starts just above the constant
    equilibrium v = 1.
    """
    coeffs = ((1.0, q),)
    lo, hi = 1.1, 3.0
    while not shoot_profile(N, coeffs, hi, rmax)[0]:
        hi *= 1.4
        if hi > 1e6:
            raise ConvergenceError("failed to bracket the shooting amplitude from above")
    while shoot_profile(N, coeffs, lo, rmax)[0]:
        lo = 1.0 + 0.5 * (lo - 1.0)
        if lo - 1.0 < 1e-12:
            raise ConvergenceError("failed to bracket the shooting amplitude from below")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if shoot_profile(N, coeffs, mid, rmax)[0]:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    crossed, sol = shoot_profile(N, coeffs, lo, rmax)
    return lo, sol


def sample_decaying(sol, grid: RadialGrid) -> np.ndarray:
    """Sample a shooting trajectory onto a grid, zeroing the unstable tail.

    The bisected trajectory eventually departs from the decaying solution;
    everything after the first upturn (or past the integrated range) is
    replaced by zero, which costs only the exponentially small true tail.
    """
    rend = sol.t[-1]
    vals = sol.sol(np.minimum(grid.nodes, rend))[0]
    vals = np.where(grid.nodes <= rend, vals, 0.0)
    vals = np.maximum(vals, 0.0)
    rising = np.where(np.diff(vals) > 0.0)[0]
    if rising.size:
        vals[rising[0] + 1:] = 0.0
    vals[-1] = 0.0
    return vals


def _ode_terms(values, grid, coeffs, kappa=1.0):
    N, h, r = grid.N, grid.h, grid.nodes
    v = values
    F = np.empty_like(v)
    F[0] = 2.0 * N * (v[1] - v[0]) / h ** 2 - kappa * v[0] + _nonlin(v[:1], coeffs)[0]
    lap = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h ** 2 \
        + (N - 1) / r[1:-1] * (v[2:] - v[:-2]) / (2.0 * h)
    F[1:-1] = lap - kappa * v[1:-1] + _nonlin(v[1:-1], coeffs)
    F[-1] = 0.0  # Dirichlet node
    return F


def ode_residual(values, grid, coeffs, kappa=1.0):
    """Max-norm residual of the discretized equation, relative to max|v|."""
    F = _ode_terms(values, grid, coeffs, kappa)
    scale = float(np.max(np.abs(values))) or 1.0
    return float(np.max(np.abs(F[:-1]))) / scale


def _banded_jacobian(values, grid, coeffs, kappa=1.0):
    """Tridiagonal Jacobian of the interior equations in solve_banded layout."""
    N, h, r = grid.N, grid.h, grid.nodes
    n = grid.M
    dnl = np.zeros(n)
    for c, p in coeffs:
        dnl += c * (p - 1.0) * np.abs(values[:n]) ** (p - 2.0)
    diag = np.empty(n)
    up = np.zeros(n)
    lo = np.zeros(n)
    diag[0] = -2.0 * N / h ** 2 - kappa + dnl[0]
    up[1] = 2.0 * N / h ** 2
    ri = r[1:n]
    diag[1:] = -2.0 / h ** 2 - kappa + dnl[1:]
    up[2:] = 1.0 / h ** 2 + (N - 1) / (2.0 * h * ri[:-1])
    lo[:-1] = 1.0 / h ** 2 - (N - 1) / (2.0 * h * ri)
    return np.vstack([up, diag, lo])


def newton_ode(grid: RadialGrid, coeffs, v0, tol=1e-11, max_iter=80, kappa=1.0):
    """Damped Newton for the discretized -Delta v + kappa v = f(v), v(R) = 0.

    Unknowns are v_0..v_{M-1}; the Jacobian is tridiagonal.  Raises
    ConvergenceError when the residual does not reach tol * max|v|.
    """
    n = grid.M
    v = np.asarray(v0, dtype=float).copy()
    v[-1] = 0.0
    res_prev = np.inf
    for _ in range(max_iter):
        F = _ode_terms(v, grid, coeffs, kappa)[:n]
        scale = float(np.max(np.abs(v))) or 1.0
        res = float(np.max(np.abs(F)))
        if not np.isfinite(res):
            raise ConvergenceError("newton_ode diverged", {"residual": res})
        if res <= tol * scale:
            return v
        ab = _banded_jacobian(v, grid, coeffs, kappa)
        try:
            dv = solve_banded((1, 1), ab, -F)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("newton_ode: singular Jacobian") from exc
        # damp only while the residual is not yet contracting
        step = 1.0 if res < res_prev else 0.5
        v[:n] += step * dv
        res_prev = res
    raise ConvergenceError("newton_ode failed to converge", {"residual": res})


def normalized_newton(grid: RadialGrid, coeffs, a, values, lam, tol=1e-11,
                      max_iter=50):
    """Newton for the mass-constrained stationary equation.

    Unknowns (v_0..v_{M-1}, lambda) solve Delta v + lambda v + f(v) = 0 with
    the quadrature mass pinned to a.  The bordered tridiagonal system is
    solved with two banded solves per step.  Requires lambda < 0 throughout.
    Returns (values, lambda).
    """
    n = grid.M
    w = grid.quad_weights
    v = np.asarray(values, dtype=float).copy()
    v[-1] = 0.0
    for _ in range(max_iter):
        kappa = -lam
        F = _ode_terms(v, grid, coeffs, kappa)[:n]
        mass_res = float(np.dot(w, v * v)) - a
        scale = max(float(np.max(np.abs(v))), 1e-12)
        if max(float(np.max(np.abs(F))), abs(mass_res) / a) <= tol * scale:
            return v, lam
        ab = _banded_jacobian(v, grid, coeffs, kappa)
        b = v[:n]  # dF/dlambda
        c = 2.0 * w[:n] * v[:n]  # d(mass)/dv
        try:
            x1 = solve_banded((1, 1), ab, -F)
            x2 = solve_banded((1, 1), ab, -b)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("normalized_newton: singular Jacobian") from exc
        denom = float(np.dot(c, x2))
        if denom == 0.0:
            raise ConvergenceError("normalized_newton: degenerate border")
        dlam = (-mass_res - float(np.dot(c, x1))) / denom
        dv = x1 + dlam * x2
        damp = 1.0
        if lam + dlam >= 0.0:
            damp = min(damp, -0.5 * lam / dlam)
        v[:n] += damp * dv
        lam += damp * dlam
        if not np.all(np.isfinite(v)) or not np.isfinite(lam):
            raise ConvergenceError("normalized_newton diverged")
    raise ConvergenceError("normalized_newton failed to converge")
