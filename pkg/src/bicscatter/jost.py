"""Jost solutions of the untruncated problem and the embedded bound state.

The building blocks are two long closed-form polynomials-in-(k, gamma(r))
with trigonometric coefficients, u(k, r) and v(k, r). From them:

    f+-(k, r)  =  (u +- i v) e^{+-ikr} / W1(r)      (unnormalized)
    F+-(k, r)  =  f+- / (k^2 - q^2)^2               (unit flux at infinity)

The Wronskian of the unnormalized pair is -2ik(k^2-q^2)^4, so the pair
degenerates at k = q: both collapse onto one real function, which after
normalization is the square-integrable state psi_B sitting at energy q^2
inside the continuum. That collapse only happens when beta = 3*alpha*q,
which is what ``PotentialParams.bic`` pins.

u and v are polynomials in k, so every formula here accepts complex k
verbatim; the resonance machinery depends on that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .darboux import PhaseData, PotentialParams, phase_data, potential_v4, w1_bundle
from .errors import NearSpectralSingularity, NotBicMode, ValidationError
from .numerics import adaptive_quadrature

__all__ = [
    "UVBundle",
    "JostValue",
    "BoundState",
    "uv_bundle",
    "jost_value",
    "bound_state",
    "schrodinger_residual",
    "NEAR_SINGULARITY_THRESHOLD",
]

# |k^2 - q^2| below this blocks the flux-normalized F+- (their normalization
# factor has a double pole at k = +-q); the unnormalized f+- stay available.
NEAR_SINGULARITY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class UVBundle:
    """u, v and their exact r-derivatives. Real for real k."""

    u: np.ndarray
    v: np.ndarray
    u_r: np.ndarray
    v_r: np.ndarray


@dataclass(frozen=True)
class JostValue:
    """Jost solutions at one (k, r): unnormalized f+-, flux-normalized F+-.

    F_plus / F_minus are None when normalization was not requested. The
    derivative fields are for the unnormalized pair (the Wronskian identity
    is stated for that pair).
    """

    f_plus: complex
    f_minus: complex
    f_plus_r: complex
    f_minus_r: complex
    F_plus: Optional[complex]
    F_minus: Optional[complex]


def uv_bundle(params: PotentialParams, k, r) -> UVBundle:
    """Evaluate u(k, r), v(k, r) and their analytic r-derivatives.

    The radial dependence enters only through gamma = r + gamma0 (polynomial
    part) and theta = q*r + delta (trigonometric part); k enters only through
    even polynomials, except for the overall factor k in v. Broadcasting over
    both k and r works; complex k is evaluated verbatim.

    The coefficient naming below mirrors the assembled structure:

        u = U0(gamma) + Uc(gamma) cos 2theta + Us(gamma) sin 2theta
            + 3(k^4 + 6 q^2 k^2 + q^4) sin^2 2theta
        v = V0(gamma) + Vc(gamma) cos 2theta + Vs(gamma) sin 2theta
            + 6 q k (k^2 + q^2) sin 4theta

    and each derivative is taken term by term.
    """
    r = np.asarray(r)
    k = np.asarray(k)
    q = params.q
    pd = phase_data(params)
    g1, g2 = pd.gamma1, pd.gamma2
    th = q * r + pd.delta
    ga = r + pd.gamma0

    e2 = k * k - q * q
    p = k**4 + 6.0 * q * q * k * k + q**4
    mm = k**4 - 4.0 * q * q * k * k - q**4
    n = k**4 - q**4
    s2k = k * k + q * q

    c4u = 16.0 * q**4 * e2**2
    c2u = -12.0 * q**2 * p
    c1u = 8.0 * g2 * q**4 * e2**2
    c0u = -12.0 * g1**2 * q**4 * e2**2
    u0 = c4u * ga**4 + c2u * ga**2 + c1u * ga + c0u
    du0 = 4.0 * c4u * ga**3 + 2.0 * c2u * ga + c1u
    uc = 24.0 * q**2 * (mm * ga**2 + q * g1 * n * ga)
    duc = 24.0 * q**2 * (2.0 * mm * ga + q * g1 * n)
    us = (
        16.0 * q**3 * n * ga**3
        - 12.0 * q * mm * ga
        - 4.0 * g2 * q**3 * n
        - 12.0 * g1 * q**2 * mm
    )
    dus = 48.0 * q**3 * n * ga**2 - 12.0 * q * mm
    su = 3.0 * p

    v0 = (
        64.0 * q**4 * k * e2 * ga**3
        - 24.0 * q**2 * k * s2k * ga
        + 8.0 * g2 * q**4 * k * e2
        - 48.0 * g1 * q**5 * k
    )
    dv0 = 192.0 * q**4 * k * e2 * ga**2 - 24.0 * q**2 * k * s2k
    vc = (
        32.0 * q**4 * k * e2 * ga**3
        + 24.0 * q**2 * k * s2k * ga
        - 8.0 * g2 * q**4 * k * e2
        + 48.0 * g1 * q**5 * k
    )
    dvc = 96.0 * q**4 * k * e2 * ga**2 + 24.0 * q**2 * k * s2k
    vs = 96.0 * q**5 * k * ga**2 - 48.0 * g1 * q**4 * k * e2 * ga - 12.0 * q * k * s2k
    dvs = 192.0 * q**5 * k * ga - 48.0 * g1 * q**4 * k * e2
    tv = 6.0 * q * k * s2k

    s, c = np.sin(2.0 * th), np.cos(2.0 * th)
    s4, c4 = np.sin(4.0 * th), np.cos(4.0 * th)
    u = u0 + uc * c + us * s + su * s**2
    u_r = du0 + (duc + 2.0 * q * us) * c + (dus - 2.0 * q * uc) * s + 2.0 * q * su * s4
    v = v0 + vc * c + vs * s + tv * s4
    v_r = dv0 + (dvc + 2.0 * q * vs) * c + (dvs - 2.0 * q * vc) * s + 4.0 * q * tv * c4
    return UVBundle(u=u, v=v, u_r=u_r, v_r=v_r)


def jost_value(params: PotentialParams, k, r, normalized: bool = True) -> JostValue:
    """f+-(k, r) with derivatives, and (optionally) the flux-normalized F+-.

    Raises
    ------
    NearSpectralSingularity
        If ``normalized`` and |k^2 - q^2| < 1e-8: the normalization factor
        1/(k^2 - q^2)^2 has a double pole there. Re-call with
        ``normalized=False`` for the (regular) unnormalized pair.
    """
    if np.any(np.asarray(r) < 0):
        raise ValidationError("r must be nonnegative")
    b = uv_bundle(params, k, r)
    w = w1_bundle(params, r)
    ep, em = np.exp(1j * k * np.asarray(r)), np.exp(-1j * k * np.asarray(r))
    up, um = b.u + 1j * b.v, b.u - 1j * b.v
    f_plus = up * ep / w.w1
    f_minus = um * em / w.w1
    f_plus_r = ((b.u_r + 1j * b.v_r + 1j * k * up) * w.w1 - up * w.w1_r) * ep / w.w1**2
    f_minus_r = ((b.u_r - 1j * b.v_r - 1j * k * um) * w.w1 - um * w.w1_r) * em / w.w1**2
    F_plus = F_minus = None
    if normalized:
        e2 = k * k - params.q**2
        if np.any(np.abs(e2) < NEAR_SINGULARITY_THRESHOLD):
            raise NearSpectralSingularity(
                f"|k^2 - q^2| = {np.min(np.abs(e2)):.3e} < {NEAR_SINGULARITY_THRESHOLD}; "
                "flux normalization has a double pole at k = +-q "
                "(request normalized=False for f+-)"
            )
        F_plus = f_plus / e2**2
        F_minus = f_minus / e2**2
    return JostValue(
        f_plus=f_plus,
        f_minus=f_minus,
        f_plus_r=f_plus_r,
        f_minus_r=f_minus_r,
        F_plus=F_plus,
        F_minus=F_minus,
    )


@dataclass(frozen=True)
class BoundState:
    """The square-integrable state at energy q^2 (requires beta = 3*alpha*q).

    ``norm`` is the L2 norm of the raw closed-form amplitude; calling the
    object evaluates the amplitude, divided by ``norm`` when ``normalized``.
    """

    params: PotentialParams
    phase: PhaseData
    norm: float
    normalized: bool = True

    def raw(self, r):
        """Closed-form amplitude 24 q^2 X(r) / W1(r); vanishes at r = 0."""
        q = self.params.q
        th = self.phase.theta(r)
        ga = self.phase.gamma(r)
        x = (
            -2.0 * q**2 * ga**2 * np.cos(th)
            + (q * ga + q**2 * self.phase.gamma1) * np.sin(th)
            + np.sin(th) ** 2 * np.cos(th)
        )
        return 24.0 * q**2 * x / w1_bundle(self.params, r).w1

    def __call__(self, r):
        amp = self.raw(r)
        return amp / self.norm if self.normalized else amp


# psi_B integration defaults (R_cut and the envelope-fit grid density)
_R_CUT = 1000.0
_TAIL_FIT_POINTS = 2001


def bound_state(params: PotentialParams, r_cut: float = _R_CUT,
                normalized: bool = True) -> BoundState:
    """Construct psi_B with its norm.

    The norm integral is adaptive quadrature of psi^2 on [0, r_cut] (the
    range is pre-split into unit cells so the pi/q oscillation cannot alias
    a Simpson panel) plus the analytic tail of the r^-2 envelope:
    psi^2 ~ C^2 cos^2 / r^4 averages to m = C^2/2 per unit r^4, so the tail
    is m / (3 r_cut^3) with m fitted as mean(psi^2 r^4) on [r_cut/2, r_cut].

    Raises
    ------
    NotBicMode
        If beta != 3*alpha*q (no embedded bound state exists off that line).
    """
    if not params.bic_mode and params.beta != 3.0 * params.alpha * params.q:
        raise NotBicMode(
            f"bound state requires beta = 3*alpha*q "
            f"(beta={params.beta}, 3*alpha*q={3.0 * params.alpha * params.q})"
        )
    probe = BoundState(params=params, phase=phase_data(params), norm=1.0,
                       normalized=False)
    inner = adaptive_quadrature(
        lambda rr: float(probe.raw(rr)) ** 2, 0.0, r_cut, tol=1e-10,
        initial_intervals=int(r_cut),
    )
    r_fit = np.linspace(0.5 * r_cut, r_cut, _TAIL_FIT_POINTS)
    tail_scale = float(np.mean(probe.raw(r_fit) ** 2 * r_fit**4))
    tail = tail_scale / (3.0 * r_cut**3)
    return BoundState(
        params=params,
        phase=probe.phase,
        norm=math.sqrt(inner + tail),
        normalized=normalized,
    )


def schrodinger_residual(params: PotentialParams, k, evaluator: Callable,
                         grid: np.ndarray) -> float:
    """Max scaled residual of -psi'' + V psi - k^2 psi on a uniform grid.

    The second derivative is the five-point stencil
    (-psi[i-2] + 16 psi[i-1] - 30 psi[i] + 16 psi[i+1] - psi[i+2]) / (12 h^2),
    truncation O(h^4); with the closed forms' curvature near the origin a
    three-point stencil at h = 1e-3 would bottom out near 1e-4, too coarse
    to certify anything.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 5:
        raise ValidationError("grid must be 1-d with at least 5 points")
    h = grid[1] - grid[0]
    if not np.allclose(np.diff(grid), h, rtol=1e-9):
        raise ValidationError("grid must be uniform")
    psi = np.asarray(evaluator(grid))
    d2 = (
        -psi[:-4] + 16.0 * psi[1:-3] - 30.0 * psi[2:-2] + 16.0 * psi[3:-1] - psi[4:]
    ) / (12.0 * h * h)
    v = potential_v4(params, grid[2:-2])
    resid = -d2 + (v - k * k) * psi[2:-2]
    return float(np.max(np.abs(resid)) / np.max(np.abs(psi)))
