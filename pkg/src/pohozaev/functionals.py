"""Energy, fibering map, Pohozaev residual and manifold classification.

Everything here is exact arithmetic on a NormProfile (A, B, P) =
(grad2, massq, massp):

    energy          Psi = A/2 - mu B/q - P/p
    fibering        Phi(s) = s^2 A/2 - mu s^{q gq} B/q - s^{p gp} P/p
    residual        A - mu gq B - gp P        (zero on the constraint manifold)
    second form     D = 2A - mu q gq^2 B - p gp^2 P

with gq = gamma_q = N(q-2)/(2q) and gp = gamma_p = N(p-2)/(2p); at the
critical exponent p = 2N/(N-2) one has gp = 1 and the massp slot of the
profile carries mass2s.  At a fiber critical point t, t^2 Phi''(t) equals D
of the dilated profile, which is what the Plus/Zero/Minus split measures.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ParameterError
from .grid import NormProfile

__all__ = [
    "Params",
    "ManifoldSide",
    "ManifoldClass",
    "energy",
    "fibering",
    "pohozaev_residual",
    "second_variation",
    "classify",
    "dilate_profile",
]


@dataclass(frozen=True)
class Params:
    """Problem quintuple (N, q, p, a, mu) plus derived exponents.

    Validity: integer N >= 3, 2 < q < 2 + 4/N < p <= 2* = 2N/(N-2),
    a > 0, mu >= 0.  These orderings give 0 < q*gamma_q < 2 < p*gamma_p <= 2*.
    """

    N: int
    q: float
    p: float
    a: float
    mu: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise ParameterError("N must be an integer >= 3")
        ts = self.two_star
        if not (2.0 < self.q < 2.0 + 4.0 / self.N):
            raise ParameterError(f"q must lie in (2, 2 + 4/N) = (2, {2 + 4 / self.N})")
        if not (2.0 + 4.0 / self.N < self.p <= ts + 1e-12):
            raise ParameterError(f"p must lie in (2 + 4/N, 2*] = ({2 + 4 / self.N}, {ts}]")
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ParameterError("mass a must be positive")
        if not (self.mu >= 0 and math.isfinite(self.mu)):
            raise ParameterError("coupling mu must be nonnegative")

    @property
    def two_star(self) -> float:
        return 2.0 * self.N / (self.N - 2.0)

    @property
    def gamma_q(self) -> float:
        return self.N * (self.q - 2.0) / (2.0 * self.q)

    @property
    def gamma_p(self) -> float:
        return 1.0 if self.is_critical else self.N * (self.p - 2.0) / (2.0 * self.p)

    @property
    def qgq(self) -> float:
        """q * gamma_q = N(q-2)/2, the mass-subcritical dilation exponent."""
        return self.N * (self.q - 2.0) / 2.0

    @property
    def pgp(self) -> float:
        return self.two_star if self.is_critical else self.N * (self.p - 2.0) / 2.0

    @property
    def is_critical(self) -> bool:
        return self.p >= self.two_star - 1e-12

    def with_mu(self, mu: float) -> "Params":
        return Params(self.N, self.q, self.p, self.a, mu)

    def with_p(self, p: float) -> "Params":
        return Params(self.N, self.q, p, self.a, self.mu)

    def with_mass(self, a: float) -> "Params":
        return Params(self.N, self.q, self.p, a, self.mu)


class ManifoldSide(enum.Enum):
    PLUS = "plus"
    ZERO = "zero"
    MINUS = "minus"
    OFF = "off"


@dataclass(frozen=True)
class ManifoldClass:
    """Outcome of classify(): which part of the constraint manifold, with the
    raw residual and second-form values used for the decision."""

    side: ManifoldSide
    residual: float
    second_form: float


def energy(np_: NormProfile, P: Params) -> float:
    """Psi = grad2/2 - (mu/q) massq - (1/p) massp."""
    massp = np_.mass2s if P.is_critical else np_.massp
    return 0.5 * np_.grad2 - (P.mu / P.q) * np_.massq - massp / P.p


def fibering(np_: NormProfile, P: Params, s: float):
    """Value and first two s-derivatives of the fiber map Phi at s.

    Phi(s) = Psi((u)_s) on profiles; the derivatives are the exact analytic
    ones, so Phi'(s) * s equals the Pohozaev residual of the dilated profile.
    """
    if not (s > 0.0 and math.isfinite(s)):
        raise ParameterError("fiber parameter s must be positive")
    A, B = np_.grad2, np_.massq
    C = np_.mass2s if P.is_critical else np_.massp
    gq, gp = P.gamma_q, P.gamma_p
    eq, ep = P.qgq, P.pgp
    phi = 0.5 * s ** 2 * A - (P.mu / P.q) * s ** eq * B - s ** ep * C / P.p
    dphi = s * A - P.mu * gq * s ** (eq - 1.0) * B - gp * s ** (ep - 1.0) * C
    d2phi = A - P.mu * gq * (eq - 1.0) * s ** (eq - 2.0) * B \
        - gp * (ep - 1.0) * s ** (ep - 2.0) * C
    return phi, dphi, d2phi


def pohozaev_residual(np_: NormProfile, P: Params) -> float:
    """grad2 - mu gamma_q massq - gamma_p massp; zero on the manifold."""
    massp = np_.mass2s if P.is_critical else np_.massp
    return np_.grad2 - P.mu * P.gamma_q * np_.massq - P.gamma_p * massp


def second_variation(np_: NormProfile, P: Params) -> float:
    """D = 2 grad2 - mu q gamma_q^2 massq - p gamma_p^2 massp.

    At a fiber critical point t this equals t^2 Phi''(t) of the base profile,
    so its sign separates local minima (D > 0) from local maxima (D < 0).
    """
    massp = np_.mass2s if P.is_critical else np_.massp
    p_eff = P.two_star if P.is_critical else P.p
    return 2.0 * np_.grad2 - P.mu * P.q * P.gamma_q ** 2 * np_.massq \
        - p_eff * P.gamma_p ** 2 * massp


def classify(np_: NormProfile, P: Params, tol: float = 1e-8) -> ManifoldClass:
    """Assign a profile to Plus / Zero / Minus / Off.

    Off when the Pohozaev residual exceeds tol * scale with
    scale = grad2 + mu massq + massp; otherwise the sign of the second form
    decides, with the same relative band declaring Zero.
    """
    if not tol > 0:
        raise ParameterError("classification tolerance must be positive")
    massp = np_.mass2s if P.is_critical else np_.massp
    scale = np_.grad2 + P.mu * np_.massq + massp
    res = pohozaev_residual(np_, P)
    D = second_variation(np_, P)
    if abs(res) > tol * scale:
        return ManifoldClass(ManifoldSide.OFF, res, D)
    if abs(D) <= tol * scale:
        return ManifoldClass(ManifoldSide.ZERO, res, D)
    side = ManifoldSide.PLUS if D > 0 else ManifoldSide.MINUS
    return ManifoldClass(side, res, D)


def dilate_profile(np_: NormProfile, P: Params, s: float) -> NormProfile:
    """Exact transform of a NormProfile under the dilation (u)_s."""
    if not (s > 0.0 and math.isfinite(s)):
        raise ParameterError("dilation parameter s must be positive")
    return NormProfile(
        grad2=s ** 2 * np_.grad2,
        mass2=np_.mass2,
        massq=s ** P.qgq * np_.massq,
        massp=s ** P.pgp * np_.massp,
        mass2s=s ** P.two_star * np_.mass2s,
    )
