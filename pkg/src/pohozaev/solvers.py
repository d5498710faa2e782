"""Ground-state and mountain-pass normalized solutions, continuation to the
critical exponent, and the dual-branch scalar formulation.

Both branches minimize the reduced functional u -> Psi((u)_{t(u)}) over the
admissible mass sphere, where t(u) is the fiber minimum t+ (ground) or the
fiber maximum t- (mountain pass).  The reduced energy is evaluated purely on
the NormProfile with analytic dilation, so no resampling error enters the
optimization; by the envelope property its gradient is the pullback of the
plain energy gradient under the dilation, which again reduces to profile
algebra.  The returned scalars (energy, multiplier, Pohozaev residual,
classification) all live on the analytically dilated profile; the returned
function is the resampled fiber point after a final re-anchoring that keeps
t within interpolation accuracy of 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .constants import sobolev_constant
from .errors import (CompactnessLossWarning, ConvergenceError,
                     DegenerateInputError, InfeasibleBranchError,
                     ParameterError, ResolutionWarning)
from .fibering import FiberCase, fiber_roots
from .functionals import (ManifoldClass, ManifoldSide, Params, classify,
                          dilate_profile, energy, pohozaev_residual,
                          second_variation)
from .grid import (NormProfile, RadialFunction, RadialGrid, cone_project,
                   dilate, kinetic_form, radial_laplacian,
                   sanitize_admissible)
from .ode import (_banded_jacobian, _nonlin, _ode_terms, newton_ode,
                  normalized_newton, ode_residual, sample_decaying,
                  soliton_amplitude)

__all__ = [
    "SolveResult",
    "DualBranchPoint",
    "DualBranchScan",
    "solve_ground",
    "solve_mp_subcritical",
    "continue_to_critical",
    "scalar_field_solve",
    "dual_branch_scan",
    "reduced_energy_gradient",
    "dual_h",
    "DEFAULT_P_SEQ_OFFSETS",
]

DEFAULT_P_SEQ_OFFSETS = (0.4, 0.2, 0.1, 0.05)


@dataclass
class SolveResult:
    """A converged (or best-effort) normalized solution on one branch.

    ``profile`` is the exact fiber-point NormProfile (mass2 == a by
    construction); ``u`` is its resampled grid representation.  ``lam`` is
    the multiplier from the integrated Euler-Lagrange identity
    lam a = grad2 - mu massq - massp; ``lam_projected`` is the cross-check
    from projecting the PDE residual of ``u`` onto ``u``.
    """

    u: RadialFunction = field(repr=False)
    lam: float
    lam_projected: float
    energy: float
    manifold: ManifoldClass
    pohozaev: float
    branch: str
    params: Params
    profile: NormProfile
    converged: bool
    iterations: int
    history: np.ndarray = field(repr=False, default=None)


def _profile_from_state(A, B, C, P: Params) -> NormProfile:
    return NormProfile(grad2=A, mass2=P.a, massq=B, massp=C,
                       mass2s=C if P.is_critical else 0.0)


def _fiber_time(A, B, C, P: Params, branch: str) -> float:
    report = fiber_roots(_profile_from_state(A, B, C, P), P)
    if report.case is FiberCase.NO_CRITICAL:
        raise InfeasibleBranchError(
            f"coupling mu={P.mu:g} exceeds the fiber threshold {report.mu_threshold:g} "
            "along the search path"
        )
    if report.case is FiberCase.DEGENERATE:
        return report.t_zero
    return report.t_plus if branch == "ground" else report.t_minus


def _reduced_state(values, P: Params, grid: RadialGrid, branch: str):
    w = grid.quad_weights
    p_eff = P.two_star if P.is_critical else P.p
    A, dA = kinetic_form(values, grid)
    B = float(np.dot(w, values ** P.q))
    C = float(np.dot(w, values ** p_eff))
    if min(A, B, C) <= 0.0:
        raise DegenerateInputError("degenerate iterate in reduced descent")
    t = _fiber_time(A, B, C, P, branch)
    eq, ep = P.qgq, P.pgp
    E = 0.5 * t ** 2 * A - (P.mu / P.q) * t ** eq * B - t ** ep * C / p_eff
    return E, t, A, dA, B, C


def reduced_energy_gradient(u: RadialFunction, P: Params, branch: str):
    """(E(u), L^2(w)-gradient of the reduced energy) at u.

    By the envelope property the t-dependence drops out:
    grad E = t^2 (dA/du)/(2w) - mu t^{q gq} u^{q-1} - t^{p gp} u^{p-1}.
    """
    grid = u.grid
    E, t, A, dA, B, C = _reduced_state(u.values, P, grid, branch)
    p_eff = P.two_star if P.is_critical else P.p
    g = t ** 2 * dA / (2.0 * grid.quad_weights) \
        - P.mu * t ** P.qgq * u.values ** (P.q - 1.0) \
        - t ** P.pgp * u.values ** (p_eff - 1.0)
    return E, g


def _pde_multiplier(values, P: Params, grid: RadialGrid) -> float:
    """L^2 projection of -Delta u - mu u^{q-1} - u^{p-1} onto u."""
    p_eff = P.two_star if P.is_critical else P.p
    res = (-radial_laplacian(values, grid)
           - P.mu * values ** (P.q - 1.0)
           - values ** (p_eff - 1.0))
    m2 = float(np.dot(grid.quad_weights, values * values))
    return grid.inner(res, values) / m2


MIN_CORE_CELLS = 6  # narrowest half-height core the descent may form


def _half_width_cells(values) -> int:
    """Index of the first node where the profile drops below half its peak."""
    peak = values[0]
    if peak <= 0.0:
        return len(values)
    below = np.nonzero(values < 0.5 * peak)[0]
    return int(below[0]) if below.size else len(values)


def _descend(values, P, grid, branch, max_iter, rel_tol, window):
    """Backtracking projected descent; returns (values, state, history, converged).

    The kinetic part of the descent direction uses the compact stencil
    Laplacian rather than the adjoint of the difference form: both are
    consistent with the same continuum gradient, but the compact stencil
    damps grid-parity modes that the centered form leaves invisible.

    A resolution guard rejects steps that sharpen the core below
    MIN_CORE_CELLS mesh cells: on coarse grids the discrete energy of a
    sub-mesh spike undershoots the true concentration cost, and an
    unguarded minus-branch descent near p = 2* would drain into it.
    """
    w = grid.quad_weights
    a = P.a
    p_eff = P.two_star if P.is_critical else P.p
    state = _reduced_state(values, P, grid, branch)
    E, t, A, dA, B, C = state
    tau = 0.05
    history = [E]
    converged = False
    guarded = False
    for it in range(1, max_iter + 1):
        g = -t ** 2 * radial_laplacian(values, grid) \
            - P.mu * t ** P.qgq * values ** (P.q - 1.0) \
            - t ** P.pgp * values ** (p_eff - 1.0)
        g -= (float(np.dot(w, g * values)) / a) * values
        # near the degenerate set the fiber maximum flattens; cap the step by
        # the relative size of the second form at the fiber point
        hat = dilate_profile(_profile_from_state(A, B, C, P), P, t)
        D = second_variation(hat, P)
        scale = hat.grad2 + P.mu * hat.massq + (hat.mass2s if P.is_critical else hat.massp)
        tau_cap = max(min(1.0, abs(D) / scale), 1e-4)
        step = min(tau, tau_cap)
        accepted = False
        hw_here = _half_width_cells(values)
        for _ in range(60):
            cand = cone_project(values - step * g, grid, a)
            hw_cand = _half_width_cells(cand)
            if hw_cand < MIN_CORE_CELLS and hw_cand < hw_here:
                guarded = True
                step *= 0.5
                continue
            try:
                st = _reduced_state(cand, P, grid, branch)
            except (DegenerateInputError, InfeasibleBranchError):
                step *= 0.5
                continue
            if st[0] < E:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        values = cand
        E, t, A, dA, B, C = st
        history.append(E)
        tau = min(step * 1.3, 1.0)
        if it > window and abs(history[-window] - E) <= rel_tol * max(abs(E), 1e-12):
            converged = True
            break
    if guarded:
        warnings.warn(
            "descent tried to concentrate below mesh resolution; refine the grid "
            "if the reported branch looks truncated",
            ResolutionWarning,
            stacklevel=3,
        )
    return values, (E, t, A, dA, B, C), history, converged


def _solve_branch(P: Params, grid: RadialGrid, branch: str, *,
                  max_iter=4000, rel_tol=1e-10, window=100,
                  u0: RadialFunction | None = None,
                  polish_iter=400, pde_polish=True) -> SolveResult:
    if P.mu <= 0.0:
        raise ParameterError("solver requires mu > 0")
    if u0 is not None:
        values = cone_project(u0.values.copy(), grid, P.a)
    else:
        values = cone_project(np.exp(-grid.nodes ** 2 / 2.0), grid, P.a)
    values, state, history, converged = _descend(
        values, P, grid, branch, max_iter, rel_tol, window)
    # re-anchor: move the iterate onto the manifold so the resampled function
    # and the analytic profile agree to interpolation accuracy, then polish
    t = state[1]
    if abs(t - 1.0) > 1e-9:
        anchored = dilate(RadialFunction(grid, values, admissible=True), t)
        values = cone_project(anchored.values, grid, P.a)
        values, state, hist2, conv2 = _descend(
            values, P, grid, branch, polish_iter, rel_tol, min(window, polish_iter // 2))
        history = history + hist2
        converged = converged and conv2
    if pde_polish:
        # mass-constrained Newton on the stationary equation turns the
        # descent iterate into a machine-residual discrete solution; on any
        # failure (or a branch flip) the descent iterate stands
        p_eff = P.two_star if P.is_critical else P.p
        prof0 = _profile_from_state(state[2], state[4], state[5], P)
        hat0 = dilate_profile(prof0, P, state[1])
        lam0 = (hat0.grad2 - P.mu * hat0.massq
                - (hat0.mass2s if P.is_critical else hat0.massp)) / P.a
        try:
            cand = dilate(RadialFunction(grid, values, admissible=True), state[1])
            vals_new, _ = normalized_newton(
                grid, ((P.mu, P.q), (1.0, p_eff)), P.a,
                np.maximum(cand.values, 0.0), min(lam0, -1e-10))
            vals_new = sanitize_admissible(vals_new)
            m2 = float(np.dot(grid.quad_weights, vals_new * vals_new))
            vals_new *= math.sqrt(P.a / m2)
            state_new = _reduced_state(vals_new, P, grid, branch)
            expected = ManifoldSide.PLUS if branch == "ground" else ManifoldSide.MINUS
            hat_new = dilate_profile(
                _profile_from_state(state_new[2], state_new[4], state_new[5], P),
                P, state_new[1])
            if classify(hat_new, P).side is expected and abs(state_new[1] - 1.0) < 0.05:
                values, state = vals_new, state_new
                converged = True
        except (ConvergenceError, DegenerateInputError, InfeasibleBranchError):
            pass
    E, t, A, dA, B, C = state
    prof_hat = dilate_profile(_profile_from_state(A, B, C, P), P, t)
    # resampling ruins the pointwise PDE residual even for t near 1 (its
    # interpolation error differentiates badly), so the base function is
    # kept whenever its fiber time is already within discretization error
    if abs(t - 1.0) <= 0.01:
        u_hat = RadialFunction(grid, values, admissible=True)
    else:
        u_hat = dilate(RadialFunction(grid, values, admissible=True), t)
    massp_hat = prof_hat.mass2s if P.is_critical else prof_hat.massp
    lam = (prof_hat.grad2 - P.mu * prof_hat.massq - massp_hat) / P.a
    lam_proj = _pde_multiplier(u_hat.values, P, grid)
    return SolveResult(
        u=u_hat,
        lam=lam,
        lam_projected=lam_proj,
        energy=energy(prof_hat, P),
        manifold=classify(prof_hat, P),
        pohozaev=pohozaev_residual(prof_hat, P),
        branch=branch,
        params=P,
        profile=prof_hat,
        converged=converged,
        iterations=len(history),
        history=np.asarray(history),
    )


def solve_ground(P: Params, grid: RadialGrid, **opts) -> SolveResult:
    """Ground-state branch: minimize Psi((u)_{t+(u)}) over the admissible
    mass sphere.  Valid for subcritical and critical p alike."""
    return _solve_branch(P, grid, "ground", **opts)


def solve_mp_subcritical(P: Params, grid: RadialGrid, **opts) -> SolveResult:
    """Mountain-pass branch at subcritical p: minimize Psi((u)_{t-(u)}).

    The critical problem is reached through continue_to_critical; direct
    p = 2* descent here is rejected.
    """
    if P.is_critical:
        raise ParameterError("solve_mp_subcritical requires p < 2*; "
                             "use continue_to_critical")
    return _solve_branch(P, grid, "mountain_pass", **opts)


def continue_to_critical(P: Params, grid: RadialGrid, p_seq=None, *,
                         u0: RadialFunction | None = None,
                         m_plus: float | None = None,
                         gap_margin: float = 0.0,
                         **opts) -> SolveResult:
    """Mountain-pass solution at p = 2* by warm-started continuation.

    Runs solve_mp_subcritical along p_seq increasing to 2* (each run warm
    starting the next) and polishes the final iterate against the critical
    reduced functional.  When ``u0`` is given the subcritical chain is
    skipped and ``u0`` seeds the critical polish directly (warm-start mode
    for parameter sweeps).

    If the final energy reaches m_plus + S^{N/2}/N - gap_margin the run is
    tagged with a CompactnessLossWarning; m_plus is computed on the fly when
    not supplied.
    """
    if not P.is_critical:
        raise ParameterError("continue_to_critical requires p = 2*")
    warm = u0
    if warm is None:
        if p_seq is None:
            p_seq = [P.two_star - d for d in DEFAULT_P_SEQ_OFFSETS]
        for p in p_seq:
            if not (2.0 + 4.0 / P.N < p < P.two_star):
                raise ParameterError("p_seq entries must lie in (2 + 4/N, 2*)")
            sub = solve_mp_subcritical(P.with_p(p), grid, u0=warm, **opts)
            warm = sub.u
    result = _solve_branch(P, grid, "mountain_pass", u0=warm, **opts)
    if m_plus is None:
        m_plus = solve_ground(P, grid, **opts).energy
    S = sobolev_constant(P.N)
    threshold = m_plus + S ** (P.N / 2.0) / P.N
    if result.energy >= threshold - gap_margin:
        warnings.warn(
            f"mountain-pass energy {result.energy:.6g} reached the concentration "
            f"threshold {threshold:.6g}",
            CompactnessLossWarning,
            stacklevel=2,
        )
    return result


# ----------------------------------------------------------------------
# dual-branch formulation


@dataclass(frozen=True)
class DualBranchPoint:
    """One solution of the unconstrained scalar-field equation: the coupling
    t, its q-norm, and the value of the matching function h."""

    t: float
    v_norm_q: float
    h: float
    sigma: float | None = None
    mass2: float | None = None


@dataclass
class DualBranchScan:
    """Solution branch walked by amplitude, with the sign structure of h.

    ``points`` are ordered along the branch (amplitude increasing), not by
    t: the branch may fold in t.  ``zero_brackets`` are consecutive-point
    t-intervals where h changes sign; ``crossover_mu`` estimates the
    coupling at which the zero count drops to zero inside the scanned
    window, reported with a coarse (grid, refined) bracket and no accuracy
    claim.
    """

    points: list
    zero_brackets: list
    zero_count: int
    crossover_mu: float
    crossover_bracket: tuple
    flagged: list
    mu: float
    mass: float


def dual_h(t: float, v_norm_q: float, N: int, q: float, a: float, mu: float) -> float:
    """Matching function h(t) = t^{2/(q gq - q) - 1} - (1-gq)/(a mu^{2/(q - q gq)}) |v_t|_q^q."""
    gq = N * (q - 2.0) / (2.0 * q)
    expo = 2.0 / (q * gq - q) - 1.0
    coef = (1.0 - gq) / (a * mu ** (2.0 / (q - q * gq)))
    return t ** expo - coef * v_norm_q


def scalar_field_solve(N: int, q: float, t: float, grid: RadialGrid, *,
                       a: float = 1.0, mu: float = 1.0,
                       descent_iter: int = 200, tol: float = 1e-11):
    """Positive radial solution of -Delta v + v = t v^{q-1} + v^{2*-1}.

    Strategy: Nehari-constrained gradient descent on the action to land in
    the right basin, then Newton on the discretized equation down to
    machine-level residual.  Returns (v, DualBranchPoint); raises
    ConvergenceError when no positive solution is found (for N = 3 the
    small-t regime genuinely lacks a ground state and is reported this way).
    """
    if t <= 0.0:
        raise ParameterError("coupling t must be positive")
    ts = 2.0 * N / (N - 2.0)
    coeffs = ((t, q), (1.0, ts))
    w = grid.quad_weights
    r = grid.nodes

    def action_parts(v):
        A, _ = kinetic_form(v, grid)
        m2 = float(np.dot(w, v * v))
        Bq = float(np.dot(w, np.abs(v) ** q))
        Cs = float(np.dot(w, np.abs(v) ** ts))
        return A, m2, Bq, Cs

    def nehari(v):
        A, m2, Bq, Cs = action_parts(v)
        if Bq <= 0.0 or Cs <= 0.0:
            raise DegenerateInputError("cannot Nehari-scale a degenerate profile")
        K = A + m2
        th = 1.0
        for _ in range(200):
            f = t * th ** (q - 2.0) * Bq + th ** (ts - 2.0) * Cs - K
            df = t * (q - 2.0) * th ** (q - 3.0) * Bq + (ts - 2.0) * th ** (ts - 3.0) * Cs
            step = f / df
            th = max(th - step, 1e-10)
            if abs(step) <= 1e-14 * th:
                break
        return v * th

    def action(v):
        A, m2, Bq, Cs = action_parts(v)
        return 0.5 * (A + m2) - (t / q) * Bq - Cs / ts

    # soliton-asymptotic initial guess, amplitude t^{-1/(q-2)} scale
    v = np.exp(-r ** 2 / 2.0) * max(2.5 * t ** (-1.0 / (q - 2.0)), 1e-3)
    v[-1] = 0.0
    v = nehari(v)
    I = action(v)
    tau = 0.1
    for _ in range(descent_iter):
        G = (-radial_laplacian(v, grid) + v - _nonlin(v, coeffs))
        accepted = False
        for _ in range(40):
            cand = np.maximum(v - tau * G, 0.0)
            cand[-1] = 0.0
            try:
                cand = nehari(cand)
            except DegenerateInputError:
                tau *= 0.5
                continue
            Ic = action(cand)
            if Ic < I:
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            break
        v, I = cand, Ic
        tau *= 1.2
    v = newton_ode(grid, coeffs, v, tol=tol)
    if np.max(v) <= 0.0 or np.min(v) < -1e-9 * np.max(np.abs(v)):
        raise ConvergenceError("scalar-field iterate is not positive")
    v = np.maximum(v, 0.0)
    v[-1] = 0.0
    vq = float(np.dot(w, v ** q))
    func = RadialFunction(grid, v)
    point = DualBranchPoint(t=t, v_norm_q=vq, h=dual_h(t, vq, N, q, a, mu),
                            sigma=float(v[0]), mass2=float(np.dot(w, v * v)))
    return func, point


def _branch_newton(grid: RadialGrid, q, ts, sigma, v, t, tol=1e-10, max_iter=40):
    """Newton for the amplitude-pinned system: ODE rows plus v(0) = sigma,
    with the coupling t as the extra unknown (bordered tridiagonal solve)."""
    n = grid.M
    v = v.copy()
    v[-1] = 0.0
    for _ in range(max_iter):
        coeffs = ((t, q), (1.0, ts))
        F = _ode_terms(v, grid, coeffs)[:n]
        pin = v[0] - sigma
        scale = max(float(np.max(np.abs(v))), 1e-12)
        if max(float(np.max(np.abs(F))), abs(pin)) <= tol * scale:
            return v, t
        ab = _banded_jacobian(v, grid, coeffs)
        b = np.abs(v[:n]) ** (q - 2.0) * v[:n]  # dF/dt
        try:
            x1 = solve_banded((1, 1), ab, -F)
            x2 = solve_banded((1, 1), ab, -b)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("branch Newton: singular Jacobian") from exc
        if x2[0] == 0.0:
            raise ConvergenceError("branch Newton: degenerate border")
        dt = (-pin - x1[0]) / x2[0]
        dv = x1 + dt * x2
        damp = 1.0
        if t + dt <= 0.0:
            damp = min(damp, -0.5 * t / dt)
        v[:n] += damp * dv
        t += damp * dt
        if not np.all(np.isfinite(v)) or not math.isfinite(t):
            raise ConvergenceError("branch Newton diverged")
    raise ConvergenceError("branch Newton failed to converge")


def dual_branch_scan(N: int, q: float, a: float, mu: float, t_grid,
                     grid: RadialGrid, *, sigma_growth: float = 1.12,
                     max_points: int = 600, tol: float = 1e-10) -> DualBranchScan:
    """Walk the scalar-field solution branch across the window of t_grid.

    The branch is parametrized by amplitude sigma = v(0) (single-valued even
    where t folds): starting on the soliton side at the amplitude matching
    max(t_grid), sigma grows geometrically until the branch leaves the
    window [min(t_grid), max(t_grid)].  h is evaluated at each converged
    point; the zero count inside the window is the numerical solution count
    of the dual formulation at coupling mu.
    """
    t_grid = np.asarray(list(t_grid), dtype=float)
    if t_grid.size < 2 or np.any(np.diff(t_grid) <= 0) or t_grid[0] <= 0:
        raise ParameterError("t_grid must be positive and increasing")
    if mu <= 0.0 or a <= 0.0:
        raise ParameterError("a and mu must be positive")
    ts = 2.0 * N / (N - 2.0)
    t_min, t_max = float(t_grid[0]), float(t_grid[-1])
    amp0, sol = soliton_amplitude(N, q, rmax=min(grid.R, 30.0))
    w_shape = sample_decaying(sol, grid)
    sigma = amp0 * t_max ** (-1.0 / (q - 2.0))
    v = w_shape * (sigma / amp0)
    t = t_max
    points, flagged = [], []
    gq = N * (q - 2.0) / (2.0 * q)
    m_exp = 2.0 / (q - q * gq)
    failures = 0
    for _ in range(max_points):
        try:
            v, t = _branch_newton(grid, q, ts, sigma, v, t, tol=tol)
            failures = 0
        except ConvergenceError:
            failures += 1
            flagged.append(sigma)
            if failures >= 3:
                break
            sigma *= sigma_growth ** 0.25
            continue
        vq = float(np.dot(grid.quad_weights, np.maximum(v, 0.0) ** q))
        m2 = float(np.dot(grid.quad_weights, v * v))
        points.append(DualBranchPoint(
            t=t, v_norm_q=vq, h=dual_h(t, vq, N, q, a, mu),
            sigma=sigma, mass2=m2))
        if len(points) > 1:
            rising = points[-1].t > points[-2].t
            if rising and t > t_max:
                break  # left the window on the post-fold side
            if not rising and t < 0.2 * t_min:
                break  # monotone branch fell far below the window
        next_sigma = sigma * sigma_growth
        v = v * (next_sigma / sigma)
        sigma = next_sigma
    if not points:
        raise ConvergenceError("dual branch scan: every point failed", {"flagged": flagged})
    in_window = [pt for pt in points if 0.98 * t_min <= pt.t <= 1.02 * t_max]
    brackets = []
    for p1, p2 in zip(in_window, in_window[1:]):
        if p1.h == 0.0 or p1.h * p2.h < 0.0:
            brackets.append((p1.t, p2.t))
    G = np.array([pt.v_norm_q * pt.t ** (m_exp + 1.0) for pt in in_window])
    if G.size == 0:
        raise ConvergenceError("dual branch scan: no points inside the window")
    imax = int(np.argmax(G))
    mu_grid = ((1.0 - gq) * G[imax] / a) ** (1.0 / m_exp)
    # parabolic refinement of the branch maximum in log-amplitude
    G_ref = float(G[imax])
    if 0 < imax < G.size - 1:
        x = np.log([in_window[imax - 1].sigma, in_window[imax].sigma,
                    in_window[imax + 1].sigma])
        y = np.array([G[imax - 1], G[imax], G[imax + 1]])
        coef = np.polyfit(x, y, 2)
        if coef[0] < 0.0:
            xv = -coef[1] / (2.0 * coef[0])
            if x[0] <= xv <= x[2]:
                G_ref = max(G_ref, float(np.polyval(coef, xv)))
    mu_ref = ((1.0 - gq) * G_ref / a) ** (1.0 / m_exp)
    return DualBranchScan(
        points=points,
        zero_brackets=brackets,
        zero_count=len(brackets),
        crossover_mu=mu_ref,
        crossover_bracket=(mu_grid, mu_ref),
        flagged=flagged,
        mu=mu,
        mass=a,
    )
