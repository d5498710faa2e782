"""Fiber critical points: the threshold coupling, the roots t+ < t-, and
their mu-sensitivities.

For a profile with A = grad2, B = massq, P = massp, the critical points of
the fiber map solve h(s) = mu gamma_q B where

    h(s) = s^{2 - q gq} A - gamma_p s^{p gp - q gq} P

is increasing up to its single maximum at s_* and decreasing beyond it, so
the trichotomy is exact: two roots bracketing s_* while mu gamma_q B stays
below max h, a double root at equality, none above.  The threshold coupling
mu_thr(u) = max h / (gamma_q B) has the closed form implemented below and is
invariant under the mass-preserving dilation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegenerateInputError, ParameterError
from .functionals import Params
from .grid import NormProfile

__all__ = [
    "FiberCase",
    "FiberingReport",
    "s_star",
    "mu_threshold",
    "threshold_prefactor",
    "fiber_roots",
    "fiber_sensitivity",
    "tau_extension",
    "DEGENERACY_BAND",
]

# relative half-width of the coupling band classified as a double root
DEGENERACY_BAND = 1e-10


class FiberCase(enum.Enum):
    TWO_CRITICAL = "two_critical"
    DEGENERATE = "degenerate"
    NO_CRITICAL = "no_critical"


@dataclass(frozen=True)
class FiberingReport:
    """Classification of a fiber map: the case, the roots (when present),
    the maximizer s_star of h, and the threshold coupling."""

    case: FiberCase
    s_star: float
    mu_threshold: float
    t_plus: float | None = None
    t_minus: float | None = None
    t_zero: float | None = None


def _abp(np_: NormProfile, P: Params):
    A, B = np_.grad2, np_.massq
    C = np_.mass2s if P.is_critical else np_.massp
    return A, B, C


def s_star(np_: NormProfile, P: Params) -> float:
    """Maximizer of h: ((2 - q gq) A / ((p gp - q gq) gamma_p P))^{1/(p gp - 2)}."""
    A, _, C = _abp(np_, P)
    if C <= 0.0:
        raise DegenerateInputError("massp must be positive (h has no interior maximum)")
    if A <= 0.0:
        raise DegenerateInputError("grad2 must be positive")
    eq, ep = P.qgq, P.pgp
    return ((2.0 - eq) * A / ((ep - eq) * P.gamma_p * C)) ** (1.0 / (ep - 2.0))


def threshold_prefactor(P: Params) -> float:
    """Closed-form prefactor of the per-function threshold:
    (p gp - 2)(2 - q gq)^theta / (gamma_q (p gp - q gq)^{theta+1} gamma_p^theta),
    theta = (2 - q gq)/(p gp - 2)."""
    eq, ep = P.qgq, P.pgp
    theta = (2.0 - eq) / (ep - 2.0)
    return (ep - 2.0) * (2.0 - eq) ** theta / (
        P.gamma_q * (ep - eq) ** (theta + 1.0) * P.gamma_p ** theta
    )


def mu_threshold(np_: NormProfile, P: Params) -> float:
    """Threshold coupling of the profile, mu_thr = max_s h(s) / (gamma_q B).

    Closed form: prefactor * A^{theta + 1} / (B P^theta) with
    theta = (2 - q gq)/(p gp - 2).  Zero-homogeneous under dilation.
    """
    A, B, C = _abp(np_, P)
    if B <= 0.0 or C <= 0.0:
        raise DegenerateInputError("massq and massp must be positive")
    if A <= 0.0:
        raise DegenerateInputError("grad2 must be positive")
    eq, ep = P.qgq, P.pgp
    theta = (2.0 - eq) / (ep - 2.0)
    return threshold_prefactor(P) * A ** (theta + 1.0) / (B * C ** theta)


def _h_and_dh(s, A, C, eq, ep, gp):
    h = s ** (2.0 - eq) * A - gp * s ** (ep - eq) * C
    dh = (2.0 - eq) * s ** (1.0 - eq) * A - (ep - eq) * gp * s ** (ep - eq - 1.0) * C
    return h, dh


def _bracketed_root(A, C, eq, ep, gp, rhs, lo, hi):
    """Solve h(s) = rhs on [lo, hi] by bisection then Newton polish."""
    flo = _h_and_dh(lo, A, C, eq, ep, gp)[0] - rhs
    fhi = _h_and_dh(hi, A, C, eq, ep, gp)[0] - rhs
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise DegenerateInputError("root bracket lost; coupling is inside the degeneracy band")
    # bisection to ~1e-6 relative
    while (hi - lo) > 1e-6 * hi:
        mid = 0.5 * (lo + hi)
        fm = _h_and_dh(mid, A, C, eq, ep, gp)[0] - rhs
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    # Newton polish to 1e-14 relative, safeguarded by the bracket
    t = 0.5 * (lo + hi)
    for _ in range(60):
        h, dh = _h_and_dh(t, A, C, eq, ep, gp)
        f = h - rhs
        if dh == 0.0:
            break
        step = f / dh
        tn = t - step
        if not (lo <= tn <= hi):
            tn = 0.5 * (lo + hi)
        if f * flo > 0.0:
            lo = t
        else:
            hi = t
        t = tn
        if abs(step) <= 1e-14 * t:
            break
    return t


def fiber_roots(np_: NormProfile, P: Params) -> FiberingReport:
    """Classify the fiber of the profile and locate its critical points.

    Requires positive grad2, massq, massp and mu > 0 (for mu = 0 the map has
    a single critical point and no trichotomy).
    """
    A, B, C = _abp(np_, P)
    if min(A, B, C) <= 0.0:
        raise DegenerateInputError("fiber classification needs grad2, massq, massp > 0")
    if P.mu <= 0.0:
        raise ParameterError("fiber classification requires mu > 0")
    eq, ep = P.qgq, P.pgp
    gp = P.gamma_p
    sstar = s_star(np_, P)
    muthr = mu_threshold(np_, P)
    if abs(P.mu - muthr) <= DEGENERACY_BAND * muthr:
        return FiberingReport(FiberCase.DEGENERATE, sstar, muthr, t_zero=sstar)
    if P.mu > muthr:
        return FiberingReport(FiberCase.NO_CRITICAL, sstar, muthr)
    rhs = P.mu * P.gamma_q * B
    # t+ in (0, s_star): h increases from 0 through rhs
    lo = sstar * 1e-12
    while _h_and_dh(lo, A, C, eq, ep, gp)[0] >= rhs:
        lo *= 0.5
        if lo < 1e-300:
            raise DegenerateInputError("failed to bracket the lower fiber root")
    t_plus = _bracketed_root(A, C, eq, ep, gp, rhs, lo, sstar)
    # t- in (s_star, inf): h(s1) = 0 < rhs at s1 = (A/(gp P))^{1/(p gp - 2)}
    hi = (A / (gp * C)) ** (1.0 / (ep - 2.0))
    while _h_and_dh(hi, A, C, eq, ep, gp)[0] >= rhs:
        hi *= 2.0
    t_minus = _bracketed_root(A, C, eq, ep, gp, rhs, sstar, hi)
    return FiberingReport(FiberCase.TWO_CRITICAL, sstar, muthr,
                          t_plus=t_plus, t_minus=t_minus)


def fiber_sensitivity(np_: NormProfile, P: Params, branch: str):
    """(dt/dmu, dPsi/dmu) along the chosen root branch ('plus' or 'minus').

    From the implicit function theorem on Phi'(t; mu) = 0:
        dt/dmu  = gamma_q t^{q gq + 1} B / (t^2 Phi''(t)),
        dPsi/dmu = -(t^{q gq}/q) B,
    with t^2 Phi''(t) = 2 t^2 A - mu q gq^2 t^{q gq} B - p gp^2 t^{p gp} P.
    Positive for the plus branch, negative for minus; undefined at the
    degenerate coupling.
    """
    if branch not in ("plus", "minus"):
        raise ParameterError("branch must be 'plus' or 'minus'")
    report = fiber_roots(np_, P)
    if report.case is not FiberCase.TWO_CRITICAL:
        raise DegenerateInputError(
            "sensitivities need strictly nondegenerate roots (mu < mu_threshold)"
        )
    t = report.t_plus if branch == "plus" else report.t_minus
    A, B, C = _abp(np_, P)
    eq, ep = P.qgq, P.pgp
    p_eff = P.two_star if P.is_critical else P.p
    denom = 2.0 * t ** 2 * A - P.mu * P.q * P.gamma_q ** 2 * t ** eq * B \
        - p_eff * P.gamma_p ** 2 * t ** ep * C
    if denom == 0.0:
        raise DegenerateInputError("singular fiber: second derivative vanishes at the root")
    dt_dmu = P.gamma_q * t ** (eq + 1.0) * B / denom
    dpsi_dmu = -(t ** eq / P.q) * B
    return dt_dmu, dpsi_dmu


def tau_extension(np_: NormProfile, P: Params):
    """Continuous extension (tau_plus, tau_minus) of the root pair up to the
    threshold coupling: the roots themselves below it, (s_star, s_star) at it."""
    muthr = mu_threshold(np_, P)
    if P.mu > muthr * (1.0 + DEGENERACY_BAND):
        raise ParameterError("tau extension undefined for mu above the threshold")
    report = fiber_roots(np_, P)
    if report.case is FiberCase.DEGENERATE:
        return report.s_star, report.s_star
    return report.t_plus, report.t_minus
