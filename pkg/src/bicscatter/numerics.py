"""Root finding, contour counting, quadrature, and phase unwrapping.

These are the only numerical primitives in the package that are not
closed-form physics. They are deliberately small and fully deterministic:
given the same inputs they return the same outputs bit for bit, which the
command-line layer relies on for reproducible runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousWinding,
    BoundaryZero,
    MaxDepthExceeded,
    NoConvergence,
    ValidationError,
    ZeroDerivative,
)

__all__ = [
    "Tolerance",
    "ComplexRectangle",
    "newton_complex",
    "winding_count",
    "adaptive_quadrature",
    "unwrap_phase",
]


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair plus an iteration budget."""

    abs_tol: float = 1e-13
    rel_tol: float = 1e-13
    max_iter: int = 80

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.max_iter >= 1):
            raise ValidationError("tolerances must be positive and max_iter >= 1")

    def met(self, value: float, scale: float = 1.0) -> bool:
        return abs(value) <= self.abs_tol + self.rel_tol * abs(scale)


@dataclass(frozen=True)
class ComplexRectangle:
    """Axis-aligned rectangle in the complex plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValidationError(
                f"degenerate rectangle [{self.re_min}, {self.re_max}] x "
                f"[{self.im_min}, {self.im_max}]"
            )

    @property
    def corners(self):
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (
            self.re_min + margin <= z.real <= self.re_max - margin
            and self.im_min + margin <= z.imag <= self.im_max - margin
        )

    def grid(self, n_re: int, n_im: int) -> np.ndarray:
        re = np.linspace(self.re_min, self.re_max, n_re)
        im = np.linspace(self.im_min, self.im_max, n_im)
        return re[None, :] + 1j * im[:, None]


def newton_complex(f, z0: complex, tol: Tolerance = Tolerance(),
                   step_scale: float = 1e-7):
    """Damped Newton iteration on a complex scalar function.

    The derivative is a central complex difference with step
    h = step_scale*(1+|z|) (the function is already complex-valued, so the
    imaginary-perturbation trick does not apply); the update is halved (up
    to 60 times) until |f| decreases, which keeps the iteration inside the
    basin even from seeds several linewidths away.

    Returns
    -------
    (z, fz, iterations)

    Raises
    ------
    ZeroDerivative
        If the difference quotient underflows relative to |f| (stationary
        point between the root and the seed).
    NoConvergence
        If the iteration budget leaves the step above tolerance.
    """
    z = complex(z0)
    fz = f(z)
    for it in range(tol.max_iter):
        h = step_scale * (1.0 + abs(z))
        df = (f(z + h) - f(z - h)) / (2.0 * h)
        if abs(df) * h < 1e-30 * abs(fz) or df == 0:
            raise ZeroDerivative(f"derivative vanished at {z!r} (|f| = {abs(fz):.3e})")
        step = fz / df
        damping = 1.0
        for _ in range(60):
            z_new = z - damping * step
            fz_new = f(z_new)
            if abs(fz_new) < abs(fz):
                break
            damping *= 0.5
        else:
            # no productive step of any size: either converged or stuck
            if abs(step) <= tol.abs_tol + tol.rel_tol * abs(z):
                return z, fz, it
            raise NoConvergence(f"stalled at {z!r} with |f| = {abs(fz):.3e}")
        z, fz = z_new, fz_new
        if abs(damping * step) <= tol.abs_tol + tol.rel_tol * abs(z):
            return z, fz, it + 1
    raise NoConvergence(
        f"no convergence after {tol.max_iter} iterations, |f| = {abs(fz):.3e}"
    )


# winding_count subdivision limits
_INITIAL_SEGMENTS = 64
_MAX_DEPTH = 48
_PHASE_CAP = math.pi / 4.0
_MAG_RATIO_CAP = math.log(2.0)


def winding_count(f, rect: ComplexRectangle) -> int:
    """Number of zeros of ``f`` inside ``rect``, counted with multiplicity.

    Integrates the argument of f around the boundary by adaptive edge
    subdivision. A segment's phase increment is accepted only when both

      * |delta arg| < pi/4, and
      * the endpoint magnitudes differ by less than a factor of 2,

    otherwise the segment is bisected (to depth 48). The magnitude condition
    matters: near a high-order zero just outside an edge, symmetric sample
    placement can alias a full 2*pi of phase while each naive increment
    stays small. Requiring the modulus to be resolved as well rules that
    out for zeros up to order ~4.

    Assumes ``f`` is analytic on and inside the rectangle.

    Raises
    ------
    BoundaryZero
        If a sample lands exactly on a zero (perturb the rectangle).
    AmbiguousWinding
        If the accumulated phase is not within 0.1 of an integer multiple
        of 2*pi (non-analytic integrand or an unresolvable boundary zero).
    MaxDepthExceeded
        If a segment fails both acceptance tests at depth 48.
    """
    corners = list(rect.corners) + [rect.corners[0]]
    total = 0.0
    for a, b in zip(corners[:-1], corners[1:]):
        pts = np.linspace(a, b, _INITIAL_SEGMENTS + 1)
        vals = [f(z) for z in pts]
        stack = [
            (pts[i], pts[i + 1], vals[i], vals[i + 1], 0)
            for i in range(_INITIAL_SEGMENTS)
        ]
        while stack:
            za, zb, fa, fb, depth = stack.pop()
            if fa == 0 or fb == 0:
                raise BoundaryZero(f"zero of f on the contour near {za!r}")
            dphi = np.angle(fb / fa)
            resolved = abs(dphi) < _PHASE_CAP and abs(
                math.log(abs(fb) / abs(fa))
            ) < _MAG_RATIO_CAP
            if resolved or depth >= _MAX_DEPTH:
                if not resolved:
                    raise MaxDepthExceeded(
                        f"edge segment near {za!r} not resolved at depth {_MAX_DEPTH}"
                    )
                total += dphi
            else:
                zm = 0.5 * (za + zb)
                fm = f(zm)
                stack.append((zm, zb, fm, fb, depth + 1))
                stack.append((za, zm, fa, fm, depth + 1))
    n = total / (2.0 * math.pi)
    if abs(n - round(n)) >= 0.1:
        raise AmbiguousWinding(f"winding integral gave {n:.4f}, not close to an integer")
    return int(round(n))


def adaptive_quadrature(f, a: float, b: float, tol: float = 1e-10,
                        max_depth: int = 50, initial_intervals: int = 1) -> float:
    """Adaptive Simpson integration of a real function on [a, b].

    Classic halving scheme: a panel is accepted when the two-half Simpson
    estimate agrees with the single-panel one to ``tol`` (scaled by the
    local interval fraction), with the usual |S2 - S1|/15 error model and
    Richardson extrapolation on acceptance.

    ``initial_intervals`` pre-splits the range before any adaptivity. For
    oscillatory integrands this is not an optimization but a correctness
    guard: a panel commensurate with the oscillation period can pass the
    two-half agreement test spuriously. Pre-split below the period.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValidationError("integration limits must be finite")
    if initial_intervals < 1:
        raise ValidationError("initial_intervals must be >= 1")
    if a == b:
        return 0.0

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    total = 0.0
    edges = np.linspace(a, b, initial_intervals + 1)
    cell_tol = tol / initial_intervals
    stack = []
    for x0, x2 in zip(edges[:-1], edges[1:]):
        m0 = 0.5 * (x0 + x2)
        fa, fm, fb = f(x0), f(m0), f(x2)
        stack.append((x0, x2, fa, fm, fb, simpson(x0, x2, fa, fm, fb), cell_tol, 0))
    while stack:
        x0, x2, f0, f1, f2, s_whole, tol_here, depth = stack.pop()
        xm_l = 0.5 * (x0 + 0.5 * (x0 + x2))
        xm_r = 0.5 * (0.5 * (x0 + x2) + x2)
        fl, fr = f(xm_l), f(xm_r)
        x1 = 0.5 * (x0 + x2)
        s_left = simpson(x0, x1, f0, fl, f1)
        s_right = simpson(x1, x2, f1, fr, f2)
        err = s_left + s_right - s_whole
        if abs(err) <= 15.0 * tol_here:
            total += s_left + s_right + err / 15.0
        elif depth >= max_depth:
            raise MaxDepthExceeded(
                f"quadrature panel [{x0:.6g}, {x2:.6g}] not converged at depth {max_depth}"
            )
        else:
            stack.append((x1, x2, f1, fr, f2, s_right, 0.5 * tol_here, depth + 1))
            stack.append((x0, x1, f0, fl, f1, s_left, 0.5 * tol_here, depth + 1))
    return total


def unwrap_phase(values: np.ndarray, period: float = math.pi) -> np.ndarray:
    """Make a sampled modulo-``period`` phase continuous.

    Shifts each sample by the integer multiple of ``period`` that brings
    successive differences into (-period/2, period/2]; the first value is
    preserved. Phases extracted through a tangent need period pi; a second
    pass with period 2*pi restores the physical (mod 2*pi) level. Coarse
    sampling is diagnosed by the caller, which knows the grid.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValidationError("unwrap_phase needs a 1-d array of at least 2 samples")
    if period <= 0:
        raise ValidationError("period must be positive")
    return np.unwrap(values, period=period)
