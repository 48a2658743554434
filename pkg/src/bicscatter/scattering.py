"""Scattering off the potential truncated at r = a.

Cutting the potential to zero beyond a finite radius a turns the embedded
bound state into a pair of resonances. Everything observable about the
truncated problem reduces to two real-analytic functions of k,

    d(k) and g(k),

built from the closed forms at r = 0 and r = a: the Jost function is
F(-k) = pref * e^{ika} (d + ig) with pref = W1(0) / (h(k) W1(a)^2), the
S-matrix is S = e^{-2ika} (d - ig)/(d + ig), and the phase shift is

    delta_a(k) = -arctan[(d sin ka + g cos ka) / (d cos ka - g sin ka)].

d and g carry no 1/h factor, so the phase shift and cross section stay
finite even where the boundary-condition normalizer h(k) degenerates
(near k = q); only the regular solution and the F's themselves are blocked
there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .darboux import PotentialParams, w1_bundle
from .errors import (
    DegenerateNormalizer,
    MinimaNotFound,
    UnwrapAmbiguity,
    ValidationError,
)
from .jost import uv_bundle
from .numerics import unwrap_phase

__all__ = [
    "TruncatedConfig",
    "ScatteringPoint",
    "h_normalizer",
    "regular_solution",
    "dg",
    "jost_function",
    "scattering_point",
    "phase_shift",
    "phase_shift_unwrapped",
    "cross_section",
    "sigma_landmarks",
    "phase_jump",
]

# |h(k)| below 1e-12 * scale(k) means the boundary-condition normalization
# of the regular solution has degenerated (h -> 0 like (k-q)^4 at the
# embedded-state wave number).
H_DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class TruncatedConfig:
    """Potential parameters plus the truncation radius a.

    Construction scans W1 for sign changes on [0, a] (coarse grid); the
    truncated problem is only defined while the transformation itself is
    (W1 > 0 everywhere).
    """

    params: PotentialParams
    a: float

    def __post_init__(self):
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a) and self.a > 0):
            raise ValidationError(f"cutoff a must be positive and finite, got {self.a!r}")
        if self.params.diagnostic:
            raise ValidationError("scattering requires strict-mode parameters")
        if not self.params.bic_mode:
            raise ValidationError(
                "truncated scattering is defined on the bic-mode potential "
                "(beta = 3*alpha*q); use PotentialParams.bic()"
            )
        step = max(0.01, self.a / 200_000.0)
        r = np.arange(0.0, self.a + step, step)
        w = w1_bundle(self.params, r).w1
        if np.any(w <= 0.0):
            raise ValidationError(
                f"W1 is not positive on [0, {self.a}] "
                f"(first violation near r = {float(r[np.argmax(w <= 0.0)]):.6g})"
            )


@dataclass(frozen=True)
class ScatteringPoint:
    """All real-axis scattering quantities at one wave number."""

    k: float
    d: float
    g: float
    F_minus: complex
    F_plus: complex
    S: complex
    delta_a: float
    sigma: float


def h_normalizer(params: PotentialParams, k):
    """h(k) = u v' - v u' + k (u^2 + v^2), all at r = 0.

    Normalizes the regular solution's boundary condition. Vanishes like
    (k^2 - q^2)^4 at the embedded-state wave number.
    """
    b = uv_bundle(params, k, 0.0)
    return b.u * b.v_r - b.v * b.u_r + k * (b.u**2 + b.v**2)


def _h_scale(params: PotentialParams, k) -> float:
    b = uv_bundle(params, k, 0.0)
    return max(1.0, float(np.max(np.abs(b.u) ** 2 + np.abs(b.v) ** 2)))


def _check_h(params: PotentialParams, k):
    h = h_normalizer(params, k)
    if np.min(np.abs(h)) < H_DEGENERACY_RTOL * _h_scale(params, k):
        raise DegenerateNormalizer(
            f"|h(k)| = {float(np.min(np.abs(h))):.3e} at k = {k!r}: boundary-condition "
            "normalization degenerates (k too close to the embedded-state wave number)"
        )
    return h


def regular_solution(config: TruncatedConfig, k, r):
    """The solution Phi with Phi(0) = 0, Phi'(0) = 1, and its derivative.

    Valid on 0 <= r <= a (inside the truncated well the potential is the
    full closed form). Accepts complex k; broadcasts over r.

    Raises
    ------
    DegenerateNormalizer
        If |h(k)| < 1e-12 * max(1, |u(k,0)|^2 + |v(k,0)|^2).
    """
    r = np.asarray(r)
    if np.any(r < 0) or np.any(r > config.a):
        raise ValidationError("regular solution is defined on 0 <= r <= a")
    p = config.params
    h = _check_h(p, k)
    b0 = uv_bundle(p, k, 0.0)
    b = uv_bundle(p, k, r)
    w = w1_bundle(p, r)
    w10 = w1_bundle(p, 0.0).w1
    skr, ckr = np.sin(k * r), np.cos(k * r)
    a1 = b0.u * skr - b0.v * ckr
    a2 = b0.v * skr + b0.u * ckr
    ph = (w10 / (h * w.w1)) * (b.u * a1 + b.v * a2)
    ph_r = (w10 / (h * w.w1**2)) * (
        (b.u_r * w.w1 - b.u * w.w1_r - k * b.v * w.w1) * a1
        + (b.v_r * w.w1 - b.v * w.w1_r + k * b.u * w.w1) * a2
    )
    return ph, ph_r


def dg(config: TruncatedConfig, k):
    """The pair (d(k), g(k)); real for real k, polynomial-and-trig in k.

    d + ig carries every zero of the truncated problem's Jost function
    (the prefactor of F(-k) is zero-free), which is why the resonance
    search operates on it directly.
    """
    p = config.params
    a = config.a
    b0 = uv_bundle(p, k, 0.0)
    ba = uv_bundle(p, k, a)
    wa = w1_bundle(p, a)
    ska, cka = np.sin(k * a), np.cos(k * a)
    bu = ba.u_r * wa.w1 - ba.u * wa.w1_r - k * ba.v * wa.w1
    bv = ba.v_r * wa.w1 - ba.v * wa.w1_r + k * ba.u * wa.w1
    d = bu * (b0.u * ska - b0.v * cka) + bv * (b0.u * cka + b0.v * ska)
    g = -k * wa.w1 * (ba.u * (b0.u * ska - b0.v * cka) + ba.v * (b0.v * ska + b0.u * cka))
    return d, g


def jost_function(config: TruncatedConfig, k) -> Tuple[complex, complex]:
    """(F(-k), F(k)) with the full prefactor W1(0) / (h(k) W1(a)^2).

    Raises
    ------
    DegenerateNormalizer
        Propagated from the 1/h(k) prefactor.
    """
    p = config.params
    h = _check_h(p, k)
    d, g = dg(config, k)
    w10 = w1_bundle(p, 0.0).w1
    wa = w1_bundle(p, config.a).w1
    pref = w10 / (h * wa**2)
    f_minus = pref * np.exp(1j * k * config.a) * (d + 1j * g)
    f_plus = pref * np.exp(-1j * k * config.a) * (d - 1j * g)
    return f_minus, f_plus


def _num_den(config: TruncatedConfig, k):
    """Numerator/denominator of tan(-delta_a): sin^2 delta = num^2/(num^2+den^2)."""
    d, g = dg(config, k)
    ska, cka = np.sin(k * config.a), np.cos(k * config.a)
    return d * ska + g * cka, d * cka - g * ska


def phase_shift(config: TruncatedConfig, k):
    """Principal-value phase shift delta_a(k) in (-pi/2, pi/2].

    The underlying arctan is branch-ambiguous mod pi; use
    ``phase_shift_unwrapped`` for a continuous curve on a grid.
    """
    num, den = _num_den(config, k)
    raw = np.arctan2(num, den)
    folded = raw - math.pi * np.round(raw / math.pi)
    return -folded


def phase_shift_unwrapped(config: TruncatedConfig, k_grid: np.ndarray,
                          max_step_fraction: float = 0.45) -> np.ndarray:
    """Continuous delta_a along a monotone k grid.

    Unwraps the principal values mod pi, then applies a 2*pi-level pass.

    Raises
    ------
    UnwrapAmbiguity
        If any adjusted step exceeds ``max_step_fraction * pi``: the grid
        is too coarse to track the phase through the resonances (their
        half-widths are ~1e-4 at a = 5000, so dk must be well below that).
    """
    k_grid = np.asarray(k_grid, dtype=float)
    if k_grid.ndim != 1 or k_grid.size < 2 or np.any(np.diff(k_grid) <= 0):
        raise ValidationError("k_grid must be strictly increasing, length >= 2")
    raw = phase_shift(config, k_grid)
    out = unwrap_phase(raw, period=math.pi)
    out = unwrap_phase(out, period=2.0 * math.pi)
    steps = np.abs(np.diff(out))
    if np.any(steps > max_step_fraction * math.pi):
        i = int(np.argmax(steps))
        raise UnwrapAmbiguity(
            f"unwrapped phase step {steps[i]:.3f} rad between k = {k_grid[i]:.9g} "
            f"and {k_grid[i + 1]:.9g}; refine the grid"
        )
    return out


def cross_section(config: TruncatedConfig, k):
    """sigma(k) = (4 pi / k^2) sin^2 delta_a, computed branch-free.

    sin^2 delta is evaluated as num^2 / (num^2 + den^2), so no arctan branch
    enters at all.
    """
    num, den = _num_den(config, k)
    return (4.0 * math.pi / np.asarray(k) ** 2) * num**2 / (num**2 + den**2)


def scattering_point(config: TruncatedConfig, k: float) -> ScatteringPoint:
    """Bundle every real-axis quantity at one k (requires h(k) healthy)."""
    k = float(k)
    d, g = dg(config, k)
    f_minus, f_plus = jost_function(config, k)
    s = np.exp(-2j * k * config.a) * (d - 1j * g) / (d + 1j * g)
    return ScatteringPoint(
        k=k,
        d=float(d),
        g=float(g),
        F_minus=complex(f_minus),
        F_plus=complex(f_plus),
        S=complex(s),
        delta_a=float(phase_shift(config, k)),
        sigma=float(cross_section(config, k)),
    )


@dataclass(frozen=True)
class SigmaLandmarks:
    """Transmission-zero minima of sigma and the unitary peak between them."""

    minima: Tuple[float, ...]
    peak: Optional[float]


def sigma_landmarks(config: TruncatedConfig, k_lo: float, k_hi: float,
                    dk: float = 1e-5) -> SigmaLandmarks:
    """Locate the sigma ~ 0 minima and the full-height peak on [k_lo, k_hi].

    Minima are the real zeros of the phase-shift numerator
    d sin ka + g cos ka (there sigma vanishes identically); the peak is the
    zero of the denominator between the two innermost minima (there
    delta_a = pi/2 mod pi, so sigma touches 4 pi / k^2). Both are bracketed
    on a dk grid and refined by bisection.

    d + ig also vanishes (removably, to fourth order) at the embedded-state
    wave number q, dragging both numerator and denominator through zero
    there; brackets straddling q are discarded.

    Raises
    ------
    MinimaNotFound
        If fewer than two numerator zeros survive on the window.
    """
    if not (k_lo < k_hi):
        raise ValidationError("need k_lo < k_hi")
    q = config.params.q
    grid = np.arange(k_lo, k_hi + dk, dk)
    num, den = _num_den(config, grid)

    def refine(fvec, scalar_f) -> List[float]:
        idx = np.nonzero(np.signbit(fvec[:-1]) != np.signbit(fvec[1:]))[0]
        roots = []
        for i in idx:
            lo, hi = grid[i], grid[i + 1]
            if lo - dk <= q <= hi + dk:
                continue
            roots.append(float(brentq(scalar_f, lo, hi, xtol=1e-14)))
        return roots

    minima = refine(num, lambda kk: float(_num_den(config, kk)[0]))
    if len(minima) < 2:
        raise MinimaNotFound(
            f"found {len(minima)} cross-section minima on [{k_lo}, {k_hi}]; "
            "widen the window or refine dk"
        )
    peak = None
    lo, hi = minima[0], minima[-1]
    peaks = [
        z for z in refine(den, lambda kk: float(_num_den(config, kk)[1])) if lo < z < hi
    ]
    if peaks:
        sig = [float(cross_section(config, z)) * z**2 / (4.0 * math.pi) for z in peaks]
        peak = peaks[int(np.argmax(sig))]
    return SigmaLandmarks(minima=tuple(minima), peak=peak)


def phase_jump(config: TruncatedConfig, k_lo: float, k_hi: float,
               dk: float = 1e-6) -> float:
    """Total change of the unwrapped delta_a across [k_lo, k_hi].

    Across a window containing the resonance doublet (with enough margin
    for the Breit-Wigner tails to complete) the magnitude approaches 2*pi:
    each resonance contributes a drop of pi. Grid points within 1e-5 of the
    embedded-state wave number are excised; both d and g vanish there to
    fourth order and the principal value is pure rounding noise.
    """
    grid = np.arange(k_lo, k_hi + dk, dk)
    grid = grid[np.abs(grid - config.params.q) > 1e-5]
    un = phase_shift_unwrapped(config, grid)
    return float(un[-1] - un[0])
