"""The verification checklist: every checkable inequality and identity of
the theory, run numerically at desk scale.

Each check returns a VerifyCheck row with the inequality text, the two
sides, a margin (positive = pass for strict inequalities; tolerance minus
error for identities), and its runtime.  ``run_verification`` executes the
whole list and aggregates a VerifyReport.  The rows are also consumed
one-by-one by the acceptance test suite.

Note: the row ``remark_bound_chain`` implements the chained lower bound for
the extremal coupling exactly as stated in its source, with the factor
(2*/2)^{+theta}.  The chain as stated overshoots the true extremal value
(the derivation supports the exponent -theta; see gn_sobolev_lower_bound,
which passes); the row is kept verbatim and is expected to fail.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import alpha_threshold, gn_constant, sobolev_constant, talenti_bubble
from .extremal import (critical_limit, gn_lower_bound, mass_scaling,
                       mass_scaling_exponent, minimize_mu)
from .fibering import (DEGENERACY_BAND, FiberCase, fiber_roots,
                       fiber_sensitivity, mu_threshold, s_star)
from .functionals import (ManifoldSide, Params, dilate_profile, energy,
                          fibering, pohozaev_residual)
from .grid import (NormProfile, RadialFunction, make_grid, norms,
                   sanitize_admissible)
from .solvers import (continue_to_critical, dual_branch_scan, solve_ground,
                      solve_mp_subcritical)

__all__ = ["VerifyCheck", "VerifyReport", "VerifyContext", "run_verification",
           "CHECKS", "check_names"]


@dataclass
class VerifyCheck:
    name: str
    statement: str
    left: float
    right: float
    margin: float
    passed: bool
    runtime: float
    details: dict = field(default_factory=dict)


@dataclass
class VerifyReport:
    checks: list
    all_passed: bool
    runtime: float
    config: dict
    schema_version: int = 1


class VerifyContext:
    """Shared lazily-computed state for the checklist (grids, constants,
    extremal estimates, reference solves)."""

    def __init__(self, N=3, q=8.0 / 3.0, mass=1.0, seed=7,
                 grid_R=40.0, grid_M=2000, extremal_R=30.0, extremal_M=1200,
                 solver_opts=None, extremal_opts=None):
        self.N, self.q, self.mass, self.seed = int(N), float(q), float(mass), int(seed)
        self.grid_R, self.grid_M = float(grid_R), int(grid_M)
        self.extremal_R, self.extremal_M = float(extremal_R), int(extremal_M)
        self.solver_opts = solver_opts or {}
        self.extremal_opts = extremal_opts or {}
        self._cache = {}

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def two_star(self):
        return 2.0 * self.N / (self.N - 2.0)

    def rng(self, salt=0):
        return np.random.default_rng(self.seed + salt)

    def grid(self):
        return self._memo("grid", lambda: make_grid(self.N, self.grid_R, self.grid_M))

    def egrid(self):
        return self._memo("egrid", lambda: make_grid(self.N, self.extremal_R, self.extremal_M))

    def bundle(self):
        return self._memo("bundle", lambda: alpha_threshold(self.N, self.q))

    def critical_limit_result(self):
        def run():
            P = Params(self.N, self.q, self.two_star, self.mass, 0.0)
            p_seq = [self.two_star - d for d in (0.4, 0.2, 0.1, 0.05)]
            return critical_limit(P, self.mass, p_seq, self.egrid(), **self.extremal_opts)
        return self._memo("critical_limit", run)

    def mu_star(self):
        """Extrapolated extremal-coupling estimate at p = 2*."""
        return self.critical_limit_result().limit

    def params_critical(self, mu_frac=0.5):
        return Params(self.N, self.q, self.two_star, self.mass,
                      mu_frac * self.mu_star())

    def ground(self):
        return self._memo("ground", lambda: solve_ground(
            self.params_critical(), self.grid(), **self.solver_opts))

    def mountain_pass(self):
        def run():
            return continue_to_critical(self.params_critical(), self.grid(),
                                        m_plus=self.ground().energy,
                                        **self.solver_opts)
        return self._memo("mp", run)

    def mp_subcritical(self):
        def run():
            P = self.params_critical().with_p(self.two_star - 0.2)
            return solve_mp_subcritical(P, self.grid(), u0=self.mountain_pass().u,
                                        **self.solver_opts)
        return self._memo("mp_sub", run)


def _random_profile(rng, lo=1e-2, hi=1e2):
    A, B, C = np.exp(rng.uniform(np.log(lo), np.log(hi), size=3))
    return NormProfile(grad2=A, mass2=1.0, massq=B, massp=C, mass2s=C)


def _random_exponents(rng, N=None):
    N = int(N if N is not None else rng.choice([3, 4, 5]))
    ts = 2.0 * N / (N - 2.0)
    qlo, qhi = 2.0, 2.0 + 4.0 / N
    q = qlo + (0.05 + 0.9 * rng.random()) * (qhi - qlo)
    p = qhi + (0.05 + 0.95 * rng.random()) * (ts - qhi)
    return N, q, p


def _check(name, statement, left, right, margin, passed, t0, **details):
    return VerifyCheck(name=name, statement=statement, left=float(left),
                       right=float(right), margin=float(margin),
                       passed=bool(passed), runtime=time.perf_counter() - t0,
                       details=details)


# ----------------------------------------------------------------------
# the checklist


def check_fiber_trichotomy(ctx: VerifyContext, n_samples=1000, n_scan=10_000):
    """Root finder against a brute-force sign scan of Phi' (strict agreement)."""
    t0 = time.perf_counter()
    rng = ctx.rng(1)
    mismatches = 0
    worst_res = 0.0
    for _ in range(n_samples):
        N, q, p = _random_exponents(rng)
        prof = _random_profile(rng)
        Pbase = Params(N, q, p, 1.0, 0.0)
        thr = mu_threshold(prof, Pbase)
        mu = thr * np.exp(rng.uniform(np.log(0.05), np.log(20.0)))
        P = Pbase.with_mu(mu)
        report = fiber_roots(prof, P)
        # independent window: t+ >= (rhs/A)^{1/(2-qgq)}, t- <= zero of h
        rhs = mu * P.gamma_q * prof.massq
        s_lo = (rhs / prof.grad2) ** (1.0 / (2.0 - P.qgq))
        s_hi = (prof.grad2 / (P.gamma_p * prof.massp)) ** (1.0 / (P.pgp - 2.0))
        s = np.geomspace(0.9 * s_lo, 1.1 * s_hi, n_scan)
        dphi = s * prof.grad2 - mu * P.gamma_q * s ** (P.qgq - 1.0) * prof.massq \
            - P.gamma_p * s ** (P.pgp - 1.0) * prof.massp
        changes = int(np.sum(np.sign(dphi[:-1]) * np.sign(dphi[1:]) < 0))
        expected = {FiberCase.TWO_CRITICAL: 2, FiberCase.NO_CRITICAL: 0,
                    FiberCase.DEGENERATE: None}[report.case]
        if expected is not None and changes != expected:
            mismatches += 1
            continue
        if report.case is FiberCase.TWO_CRITICAL:
            scale = prof.grad2 + mu * prof.massq + prof.massp
            for t in (report.t_plus, report.t_minus):
                res = abs(fibering(prof, P, t)[1]) * t / (t ** 2 * scale)
                worst_res = max(worst_res, res)
    passed = mismatches == 0 and worst_res <= 1e-12
    return _check(
        "fiber_trichotomy",
        "root classification agrees with a 10^4-point sign scan of Phi'; "
        "roots satisfy Phi'(t) = 0 to 1e-12 relative",
        mismatches + worst_res, 1e-12, 1e-12 - worst_res - mismatches, passed, t0,
        samples=n_samples, worst_residual=worst_res, mismatches=mismatches)


def check_degenerate_anchor(ctx: VerifyContext):
    """Unit-profile anchors at N=3, q=8/3, p=2*: closed forms and the root
    finder at the threshold coupling."""
    t0 = time.perf_counter()
    P = Params(3, 8.0 / 3.0, 6.0, 1.0, 0.0)
    prof = NormProfile(1.0, 1.0, 1.0, 1.0, 1.0)
    mu_exact = (32.0 / 3.0) * 5.0 ** (-1.25)
    t_exact = 0.2 ** 0.25
    err_mu = abs(mu_threshold(prof, P) - mu_exact) / mu_exact
    err_t = abs(s_star(prof, P) - t_exact) / t_exact
    report = fiber_roots(prof, P.with_mu(mu_exact))
    ok_case = report.case is FiberCase.DEGENERATE
    err_root = abs((report.t_zero or np.inf) - t_exact) / t_exact if ok_case else np.inf
    err = max(err_mu, err_t)
    passed = ok_case and err <= 1e-10 and err_root <= 1e-8
    return _check(
        "degenerate_anchor",
        "unit profile: mu_thr = (32/3) 5^{-5/4}, t0 = (1/5)^{1/4}; double root at threshold",
        err, 1e-10, 1e-10 - err, passed, t0,
        err_mu=err_mu, err_s=err_t, err_root=err_root, degenerate=ok_case)


def check_dilation_invariance(ctx: VerifyContext, n_samples=100):
    """mu_threshold is 0-homogeneous under analytic profile dilation."""
    t0 = time.perf_counter()
    rng = ctx.rng(3)
    worst = 0.0
    for _ in range(n_samples):
        N, q, p = _random_exponents(rng)
        P = Params(N, q, p, 1.0, 0.0)
        prof = _random_profile(rng)
        s = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
        base = mu_threshold(prof, P)
        scaled = mu_threshold(dilate_profile(prof, P, s), P)
        worst = max(worst, abs(scaled - base) / base)
    passed = worst <= 1e-12
    return _check(
        "dilation_invariance",
        "mu_thr((u)_s) = mu_thr(u) to machine precision on analytic scaling",
        worst, 1e-12, 1e-12 - worst, passed, t0, samples=n_samples)


def check_mass_scaling(ctx: VerifyContext):
    """Computed extremal couplings at two masses obey the exponent law."""
    t0 = time.perf_counter()
    p = 4.0 if ctx.N == 3 else 0.5 * (2.0 + 4.0 / ctx.N + ctx.two_star)
    P1 = Params(ctx.N, ctx.q, p, 1.0, 0.0)
    P2 = P1.with_mass(2.0)
    grid = ctx.egrid()
    r1 = minimize_mu(P1, grid, **ctx.extremal_opts)
    r2 = minimize_mu(P2, grid, init=r1.minimizer, **ctx.extremal_opts)
    predicted = mass_scaling(P1, 1.0, 2.0, r1.mu_star)
    err = abs(r2.mu_star - predicted) / predicted
    passed = err <= 0.02
    return _check(
        "mass_scaling_law",
        f"mu*_(a=2,p={p:g}) / mu*_(a=1,p={p:g}) = 2^(-{mass_scaling_exponent(P1):g}) within 2%",
        r2.mu_star, predicted, 0.02 - err, passed, t0,
        mu1=r1.mu_star, mu2=r2.mu_star, exponent=mass_scaling_exponent(P1),
        converged=(r1.converged, r2.converged))


def check_critical_limit(ctx: VerifyContext):
    """The p -> 2* threshold sequence trends monotonically with a small last step."""
    t0 = time.perf_counter()
    res = ctx.critical_limit_result()
    vals = np.asarray(res.values)
    finite = np.all(np.isfinite(vals))
    diffs = np.diff(vals)
    trending = finite and (np.all(diffs <= 0) or np.all(diffs >= 0))
    last_step = abs(vals[-1] - vals[-2]) / abs(vals[-1]) if finite else np.inf
    passed = bool(trending and last_step < 0.05)
    return _check(
        "critical_limit",
        "mu*_{a,p} along p = 2* - {0.4,0.2,0.1,0.05}: monotone trend, last step < 5%",
        last_step, 0.05, 0.05 - last_step, passed, t0,
        values=list(map(float, vals)), limit=res.limit, converged=res.converged)


def check_remark_bound_chain(ctx: VerifyContext):
    """The chained lower bound with the (2*/2)^{+theta} factor, verbatim.

    Expected to fail: the chain only supports the -theta exponent (see
    gn_sobolev_lower_bound).  Kept as stated for the record.
    """
    t0 = time.perf_counter()
    b = ctx.bundle()
    P = Params(ctx.N, ctx.q, ctx.two_star, ctx.mass, 0.0)
    theta = (2.0 - P.qgq) / (ctx.two_star - 2.0)
    mid = b.C1 * (2.0 / P.qgq) * (ctx.two_star / 2.0) ** theta
    lhs = ctx.mu_star() * ctx.mass ** (ctx.q * (1.0 - P.gamma_q) / 2.0)
    margin1 = lhs - mid
    margin2 = mid - b.alpha
    passed = margin1 > 0 and margin2 > 0
    return _check(
        "remark_bound_chain",
        "mu*_a a^{q(1-gq)/2} > C1 (2/(q gq)) (2*/2)^{+theta} > alpha",
        lhs, mid, min(margin1, margin2), passed, t0,
        mid=mid, alpha=b.alpha, C1=b.C1, margin_mid_alpha=margin2)


def check_gn_sobolev_lower_bound(ctx: VerifyContext):
    """Corrected chain: mu*_a a^{q(1-gq)/2} >= Ctilde S^{2*theta/2} / C_Nq^q
    = C1 (2/(q gq)) (2*/2)^{-theta} > C1 >= alpha."""
    t0 = time.perf_counter()
    b = ctx.bundle()
    P = Params(ctx.N, ctx.q, ctx.two_star, ctx.mass, 0.0)
    theta = (2.0 - P.qgq) / (ctx.two_star - 2.0)
    lb = gn_lower_bound(P) * ctx.mass ** (ctx.q * (1.0 - P.gamma_q) / 2.0)
    lb_c1_form = b.C1 * (2.0 / P.qgq) * (ctx.two_star / 2.0) ** (-theta)
    ident_err = abs(lb - lb_c1_form) / lb
    lhs = ctx.mu_star() * ctx.mass ** (ctx.q * (1.0 - P.gamma_q) / 2.0)
    margins = (lhs - lb, lb - b.alpha)
    passed = ident_err <= 1e-10 and margins[0] > 0 and margins[1] > 0
    return _check(
        "gn_sobolev_lower_bound",
        "mu*_a a^{q(1-gq)/2} > Ctilde S^{2* theta / 2}/C_Nq^q = C1 (2/(q gq)) (2*/2)^{-theta} > alpha",
        lhs, lb, min(margins), passed, t0,
        identity_error=ident_err, alpha=b.alpha, bound=lb)


def check_ground_state(ctx: VerifyContext):
    """Ground branch at mu = mu*/2: negative energy, negative multiplier,
    exact mass, tiny Pohozaev residual, Plus classification."""
    t0 = time.perf_counter()
    res = ctx.ground()
    prof = res.profile
    scale = abs(res.energy) + prof.grad2
    mass_err = abs(prof.mass2 - ctx.mass)
    poho_rel = abs(res.pohozaev) / scale
    conds = {
        "converged": res.converged,
        "energy<0": res.energy < 0,
        "lambda<0": res.lam < 0,
        "mass": mass_err <= 1e-10,
        "pohozaev": poho_rel <= 1e-6,
        "class_plus": res.manifold.side is ManifoldSide.PLUS,
    }
    passed = all(conds.values())
    return _check(
        "ground_state",
        "ground solve: E < 0, lambda < 0, |mass - a| <= 1e-10, "
        "|pohozaev| <= 1e-6 rel, class Plus",
        res.energy, 0.0, -res.energy, passed, t0,
        lam=res.lam, lam_projected=res.lam_projected, mass_err=mass_err,
        pohozaev_rel=poho_rel, conds={k: bool(v) for k, v in conds.items()})


def check_mountain_pass(ctx: VerifyContext):
    """Continued mountain pass: energy strictly inside (m+, m+ + S^{N/2}/N),
    negative multiplier, Minus classification."""
    t0 = time.perf_counter()
    m_plus = ctx.ground().energy
    res = ctx.mountain_pass()
    S = sobolev_constant(ctx.N)
    gap = S ** (ctx.N / 2.0) / ctx.N
    conds = {
        "converged": res.converged,
        "above": res.energy > m_plus,
        "below": res.energy < m_plus + gap,
        "lambda<0": res.lam < 0,
        "class_minus": res.manifold.side is ManifoldSide.MINUS,
    }
    passed = all(conds.values())
    return _check(
        "mountain_pass_gap",
        "m+ < m- < m+ + S^{N/2}/N with lambda < 0 and class Minus",
        res.energy, m_plus + gap, (m_plus + gap) - res.energy, passed, t0,
        m_plus=m_plus, gap_quantum=gap, lam=res.lam,
        conds={k: bool(v) for k, v in conds.items()})


def check_multiplier_identities(ctx: VerifyContext):
    """lambda a = mu (gq - 1) massq + (gp - 1) massp at p < 2*;
    lambda a = (gq - 1) mu massq at p = 2*; both to 1e-6 relative."""
    t0 = time.perf_counter()
    errs = {}
    crit = ctx.mountain_pass()
    P = crit.params
    rhs = P.mu * (P.gamma_q - 1.0) * crit.profile.massq
    errs["critical_mp"] = abs(crit.lam * P.a - rhs) / abs(rhs)
    g = ctx.ground()
    rhs_g = g.params.mu * (g.params.gamma_q - 1.0) * g.profile.massq
    errs["critical_ground"] = abs(g.lam * g.params.a - rhs_g) / abs(rhs_g)
    sub = ctx.mp_subcritical()
    Ps = sub.params
    rhs_s = Ps.mu * (Ps.gamma_q - 1.0) * sub.profile.massq \
        + (Ps.gamma_p - 1.0) * sub.profile.massp
    errs["subcritical_mp"] = abs(sub.lam * Ps.a - rhs_s) / abs(rhs_s)
    worst = max(errs.values())
    passed = worst <= 1e-6
    return _check(
        "multiplier_identities",
        "lambda a = mu (gq-1) |u|_q^q + (gp-1) |u|_p^p (p < 2*); "
        "lambda a = (gq-1) mu |u|_q^q (p = 2*)",
        worst, 1e-6, 1e-6 - worst, passed, t0, **errs)


def check_sensitivity(ctx: VerifyContext, n_samples=100):
    """Implicit-function sensitivities against central differences, with the
    monotonicity signs dt+/dmu > 0 > dt-/dmu and dPsi/dmu < 0."""
    t0 = time.perf_counter()
    rng = ctx.rng(10)
    worst = 0.0
    signs_ok = True
    for _ in range(n_samples):
        N, q, p = _random_exponents(rng)
        prof = _random_profile(rng, 0.3, 3.0)
        Pbase = Params(N, q, p, 1.0, 0.0)
        thr = mu_threshold(prof, Pbase)
        mu = thr * rng.uniform(0.05, 0.9)
        P = Pbase.with_mu(mu)
        h = 1e-5 * mu
        for branch, idx in (("plus", "t_plus"), ("minus", "t_minus")):
            dt, dpsi = fiber_sensitivity(prof, P, branch)
            if branch == "plus" and dt <= 0 or branch == "minus" and dt >= 0 or dpsi >= 0:
                signs_ok = False
            rp = fiber_roots(prof, P.with_mu(mu + h))
            rm = fiber_roots(prof, P.with_mu(mu - h))
            fd = (getattr(rp, idx) - getattr(rm, idx)) / (2.0 * h)
            worst = max(worst, abs(fd - dt) / abs(dt))
    passed = signs_ok and worst <= 1e-3
    return _check(
        "fiber_sensitivity_fd",
        "dt/dmu from the implicit function theorem matches central differences "
        "within 1e-3; dt+/dmu > 0, dt-/dmu < 0, dPsi/dmu < 0",
        worst, 1e-3, 1e-3 - worst, passed, t0,
        samples=n_samples, signs_ok=signs_ok)


def _mu_chain(ctx, branch, mus, a, grid):
    """Warm-started energies m_branch(mu) along an increasing mu chain.

    The first mountain-pass point runs the full subcritical continuation;
    later points warm start from their predecessor.  m_plus = -inf silences
    the concentration warning (the gap bound has its own check).
    """
    energies = []
    warm = None
    for mu in mus:
        P = Params(ctx.N, ctx.q, ctx.two_star, a, mu)
        if branch == "ground":
            res = solve_ground(P, grid, u0=warm, **ctx.solver_opts)
        else:
            res = continue_to_critical(P, grid, u0=warm, m_plus=-np.inf,
                                       **ctx.solver_opts)
        warm = res.u
        energies.append(res.energy)
    return energies


def check_monotonicity(ctx: VerifyContext, n_mu=10, n_a=5):
    """m+- nonincreasing in mu (10-point grid) and in a (5-point grid)."""
    t0 = time.perf_counter()
    grid = ctx.egrid()
    mu_star = ctx.mu_star()
    mus = np.linspace(0.15, 0.92, n_mu) * mu_star
    slack = 1e-6
    viol = {}
    curves = {}
    for branch in ("ground", "mp"):
        E = _mu_chain(ctx, branch, mus, ctx.mass, grid)
        curves[f"m_{branch}_mu"] = E
        viol[f"{branch}_mu"] = float(np.max(np.diff(E))) if len(E) > 1 else 0.0
    masses = np.array([0.6, 0.8, 1.0, 1.25, 1.5]) * ctx.mass
    masses = masses[:n_a]
    mu_fixed = 0.25 * mu_star
    for branch in ("ground", "mp"):
        E = []
        warm = None
        for a in masses:
            P = Params(ctx.N, ctx.q, ctx.two_star, float(a), mu_fixed)
            if branch == "ground":
                res = solve_ground(P, grid, u0=warm, **ctx.solver_opts)
            else:
                res = continue_to_critical(P, grid, u0=warm, m_plus=-np.inf,
                                           **ctx.solver_opts)
            warm = res.u
            E.append(res.energy)
        curves[f"m_{branch}_mass"] = E
        viol[f"{branch}_mass"] = float(np.max(np.diff(E))) if len(E) > 1 else 0.0
    worst = max(viol.values())
    scale = max(abs(v) for E in curves.values() for v in E)
    passed = worst <= slack * scale
    return _check(
        "monotonicity_sweeps",
        "m+- nonincreasing in mu and in a (violations beyond solver tolerance fail)",
        worst, slack * scale, slack * scale - worst, passed, t0,
        violations=viol, curves={k: list(map(float, v)) for k, v in curves.items()})


def check_sharp_constants(ctx: VerifyContext, n_audit=100):
    """Bubble quotient vs the closed form at two resolutions with decreasing
    error; random-function audit of the Gagliardo-Nirenberg inequality."""
    t0 = time.perf_counter()
    N = ctx.N
    S = sobolev_constant(N)
    ts = 2.0 * N / (N - 2.0)
    eps = 0.05 if N == 3 else 0.5
    errs = []
    for (R, M) in ((50.0, 10000), (50.0, 20000)):
        g = make_grid(N, R, M)
        W = talenti_bubble(N, eps, g, cutoff=R)
        prof = norms(W, q=ctx.q, p=ts)
        quot = prof.grad2 / prof.mass2s ** (2.0 / ts)
        errs.append(abs(quot - S) / S)
    bubble_ok = errs[0] < 0.01 and errs[1] < 0.01 and errs[1] < errs[0]
    # GN audit on random admissible profiles
    C = gn_constant(N, ctx.q)
    gq = N * (ctx.q - 2.0) / (2.0 * ctx.q)
    g = ctx.grid()
    rng = ctx.rng(12)
    worst_quot = 0.0
    for _ in range(n_audit):
        k = rng.integers(1, 4)
        vals = np.zeros(g.M + 1)
        for _ in range(k):
            amp = rng.uniform(0.1, 3.0)
            width = rng.uniform(0.3, 6.0)
            shape = rng.random()
            if shape < 0.5:
                vals += amp * np.exp(-(g.nodes / width) ** 2)
            else:
                vals += amp * np.exp(-g.nodes / width)
        u = RadialFunction(g, sanitize_admissible(vals), admissible=True)
        prof = norms(u, ctx.q, ts)
        quot = prof.massq ** (1.0 / ctx.q) / (
            prof.grad2 ** (gq / 2.0) * prof.mass2 ** ((1.0 - gq) / 2.0))
        worst_quot = max(worst_quot, quot / C)
    audit_ok = worst_quot <= 1.0 + 1e-8
    passed = bubble_ok and audit_ok
    return _check(
        "sharp_constants",
        "bubble quotient matches S within 1% at two resolutions with decreasing "
        "error; no random admissible profile violates the GN inequality",
        errs[1], 0.01, 0.01 - errs[1], passed, t0,
        bubble_errors=errs, eps=eps, worst_gn_ratio=worst_quot, C_Nq=C)


def check_dual_branch(ctx: VerifyContext):
    """Zeros of the dual matching function: >= 2 at moderate coupling, 0 at
    large coupling; crossover estimate at least alpha a^{-q(1-gq)/2}."""
    t0 = time.perf_counter()
    grid = ctx.egrid()
    mu_small = 0.5 * ctx.mu_star()
    t_grid = np.geomspace(2.0, 12.0, 12) if ctx.N == 3 else np.geomspace(0.5, 12.0, 12)
    scan_small = dual_branch_scan(ctx.N, ctx.q, ctx.mass, mu_small, t_grid, grid)
    mu_large = 2.0 * scan_small.crossover_mu
    scan_large = dual_branch_scan(ctx.N, ctx.q, ctx.mass, mu_large, t_grid, grid)
    b = ctx.bundle()
    gq = ctx.N * (ctx.q - 2.0) / (2.0 * ctx.q)
    floor = b.alpha * ctx.mass ** (-ctx.q * (1.0 - gq) / 2.0)
    conds = {
        "small_mu_two_zeros": scan_small.zero_count >= 2,
        "large_mu_no_zeros": scan_large.zero_count == 0,
        "crossover_above_alpha": scan_small.crossover_mu >= floor,
    }
    passed = all(conds.values())
    return _check(
        "dual_branch",
        ">= 2 zeros of h at mu = mu*/2, 0 zeros at large mu; "
        "crossover >= alpha a^{-q(1-gq)/2}",
        scan_small.zero_count, 2, scan_small.zero_count - 2, passed, t0,
        mu_small=mu_small, mu_large=mu_large,
        crossover=scan_small.crossover_mu,
        crossover_bracket=scan_small.crossover_bracket,
        alpha_floor=floor, conds={k: bool(v) for k, v in conds.items()})


def check_witness_gap(ctx: VerifyContext, eps=0.25):
    """Explicit bubble-family witness: sup_t Psi(Wbar_{eps,t}) stays below
    m+ + S^{N/2}/N, bounding the mountain-pass level away from the
    concentration threshold."""
    t0 = time.perf_counter()
    gnd = ctx.ground()
    P = gnd.params
    grid = gnd.u.grid
    S = sobolev_constant(ctx.N)
    cap = gnd.energy + S ** (ctx.N / 2.0) / ctx.N
    bubble = talenti_bubble(ctx.N, eps, grid, cutoff=grid.R)
    base = gnd.u.values
    sup_psi = -np.inf
    sup_t = 0.0
    for t in np.linspace(0.0, 2.5, 61):
        vals = base + t * bubble.values
        interp = PchipInterpolator(grid.nodes, vals, extrapolate=False)
        m2 = float(np.dot(grid.quad_weights, vals * vals))
        s = math.sqrt(m2 / P.a)
        rs = np.minimum(grid.nodes * s, grid.R)
        scaled = s ** ((ctx.N - 2.0) / 2.0) * np.where(
            grid.nodes * s <= grid.R, np.nan_to_num(interp(rs), nan=0.0), 0.0)
        scaled[-1] = 0.0
        prof = norms(RadialFunction(grid, scaled), ctx.q, ctx.two_star)
        psi = energy(prof, P)
        if psi > sup_psi:
            sup_psi, sup_t = psi, t
    margin = cap - sup_psi
    passed = margin > 0
    return _check(
        "witness_gap_bound",
        "sup_t Psi(Wbar_{eps,t}) < m+ + S^{N/2}/N for the cut-off bubble family",
        sup_psi, cap, margin, passed, t0, eps=eps, sup_t=sup_t,
        m_plus=gnd.energy)


def check_ratio_grid(ctx: VerifyContext, n=41):
    """(2/(p gp))^{2 - q gq} (2/(q gq))^{p gp - 2} >= 1 on the exponent
    rectangle, with minimum 1 on the (p, q) = (2*, 2 + 4/N) corner."""
    t0 = time.perf_counter()
    N = ctx.N
    ts = 2.0 * N / (N - 2.0)
    qs = np.linspace(2.0 + 1e-6, 2.0 + 4.0 / N, n)
    ps = np.linspace(2.0 + 4.0 / N, ts, n)
    qq, pp = np.meshgrid(qs, ps)
    qgq = N * (qq - 2.0) / 2.0
    pgp = N * (pp - 2.0) / 2.0
    ratio = (2.0 / pgp) ** (2.0 - qgq) * (2.0 / qgq) ** (pgp - 2.0)
    rmin = float(np.min(ratio))
    corner = (2.0 / ts) ** 0.0 * (2.0 / 2.0) ** (ts - 2.0)  # exactly 1
    passed = rmin >= 1.0 - 1e-12 and abs(ratio[-1, -1] - corner) <= 1e-12
    return _check(
        "improvement_ratio_grid",
        "(2/(p gp))^{2-q gq} (2/(q gq))^{p gp-2} >= 1 with minimum 1 at "
        "p = 2*, q gq = 2",
        rmin, 1.0, rmin - 1.0, passed, t0, corner_value=float(ratio[-1, -1]))


def check_kinetic_bound(ctx: VerifyContext):
    """Subcritical mountain-pass kinetic term obeys the explicit lower bound
    from the Minus-side estimate and the GN inequality."""
    t0 = time.perf_counter()
    res = ctx.mp_subcritical()
    P = res.params
    Cp = gn_constant(P.N, P.p)
    eq, ep = P.qgq, P.pgp
    bound = ((2.0 - eq) / ((ep - eq) * P.gamma_p * Cp ** P.p
                           * P.a ** (P.p * (1.0 - P.gamma_p) / 2.0))) ** (2.0 / (ep - 2.0))
    ok = res.profile.grad2 >= bound
    return _check(
        "kinetic_lower_bound",
        "|grad u|_2^2 >= ((2 - q gq)/((p gp - q gq) gp C_p^p a^{p(1-gp)/2}))^{2/(p gp - 2)} "
        "on the Minus branch",
        res.profile.grad2, bound, res.profile.grad2 - bound, ok, t0,
        p=P.p)


def check_energy_limit(ctx: VerifyContext):
    """m+- decreasing along mu_k increasing toward mu*, with the last values
    stabilizing near the threshold level."""
    t0 = time.perf_counter()
    grid = ctx.egrid()
    mu_star = ctx.mu_star()
    fracs = np.array([0.80, 0.90, 0.96, 0.99, 0.995])
    curves = {}
    for branch in ("ground", "mp"):
        curves[branch] = _mu_chain(ctx, branch, fracs * mu_star, ctx.mass, grid)
    dec = all(np.all(np.diff(E) < 1e-9) for E in curves.values())
    tail = max(abs(E[-1] - E[-2]) / max(abs(E[-1]), 1e-9) for E in curves.values())
    passed = dec and tail < 0.05
    return _check(
        "energy_limit_at_threshold",
        "m+-(mu) decrease as mu increases to mu* and stabilize at the limit level",
        tail, 0.05, 0.05 - tail, passed, t0,
        curves={k: list(map(float, v)) for k, v in curves.items()},
        mu_fractions=list(map(float, fracs)))


CHECKS = [
    ("fiber_trichotomy", check_fiber_trichotomy),
    ("degenerate_anchor", check_degenerate_anchor),
    ("dilation_invariance", check_dilation_invariance),
    ("mass_scaling_law", check_mass_scaling),
    ("critical_limit", check_critical_limit),
    ("remark_bound_chain", check_remark_bound_chain),
    ("gn_sobolev_lower_bound", check_gn_sobolev_lower_bound),
    ("ground_state", check_ground_state),
    ("mountain_pass_gap", check_mountain_pass),
    ("multiplier_identities", check_multiplier_identities),
    ("fiber_sensitivity_fd", check_sensitivity),
    ("monotonicity_sweeps", check_monotonicity),
    ("sharp_constants", check_sharp_constants),
    ("dual_branch", check_dual_branch),
    ("witness_gap_bound", check_witness_gap),
    ("improvement_ratio_grid", check_ratio_grid),
    ("kinetic_lower_bound", check_kinetic_bound),
    ("energy_limit_at_threshold", check_energy_limit),
]


def check_names():
    return [name for name, _ in CHECKS]


def run_verification(ctx: VerifyContext, only=None, skip=None,
                     progress=None) -> VerifyReport:
    """Run the checklist; individual failures never abort the suite."""
    t0 = time.perf_counter()
    skip = set(skip or ())
    rows = []
    for name, fn in CHECKS:
        if only is not None and name not in only:
            continue
        if name in skip:
            continue
        try:
            row = fn(ctx)
        except Exception as exc:  # noqa: BLE001 - a failing row must not kill the suite
            row = VerifyCheck(name=name, statement=f"aborted: {exc}",
                              left=float("nan"), right=float("nan"),
                              margin=float("-inf"), passed=False, runtime=0.0,
                              details={"error": repr(exc)})
        rows.append(row)
        if progress is not None:
            progress(row)
    return VerifyReport(
        checks=rows,
        all_passed=all(r.passed for r in rows),
        runtime=time.perf_counter() - t0,
        config={"N": ctx.N, "q": ctx.q, "mass": ctx.mass, "seed": ctx.seed,
                "grid_R": ctx.grid_R, "grid_M": ctx.grid_M,
                "extremal_R": ctx.extremal_R, "extremal_M": ctx.extremal_M},
    )
