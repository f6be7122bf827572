"""Continuous sweet-spot analysis and scaling-law fits.

The overall loss of a D-hop synthesized CZ when every gate can reach r
lattice units is

    p(r) = 1 - [(1 - p_scat)(1 - p_cz(r))]^(3D/r - 2),

with the hop count treated as a real number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .physics import (
    AtomicModel,
    GateDrive,
    LPGateParams,
    PhysicsContext,
    UnreachableRadiusError,
    fit_loglog_slope,
    lp_channel,
    r_max,
    scattering_prob,
    solve_lp_params,
    stark_detuning,
)
from .router import n_graded


class DomainError(ValueError):
    pass


@dataclass
class SweetSpotCurve:
    D: float
    r: np.ndarray
    p_scat: float
    p_cz: np.ndarray
    p_overall: np.ndarray
    p_cz_fn: Callable[[float], float] | None = field(default=None, repr=False)


def overall_loss(D: float, r: float, p_scat: float, p_cz: float) -> float:
    expo = 3 * D / r - 2
    if expo < 0:
        raise DomainError(f"r={r} exceeds 3D/2={1.5 * D}: negative hop exponent")
    return -math.expm1(expo * (math.log1p(-p_scat) + math.log1p(-p_cz)))


def overall_loss_curve(
    D: float, radii: Sequence[float], p_scat: float, p_cz: Callable[[float], float]
) -> SweetSpotCurve:
    if D < 1:
        raise DomainError("D must be >= 1")
    r = np.asarray(radii, dtype=float)
    if r.size == 0 or np.any(np.diff(r) <= 0):
        raise DomainError("radius grid must be nonempty and strictly increasing")
    if r[0] < 1 or r[-1] > 1.5 * D:
        raise DomainError(f"radius grid must lie within [1, {1.5 * D}]")
    pcz = np.array([p_cz(x) for x in r])
    pov = np.array([overall_loss(D, x, p_scat, c) for x, c in zip(r, pcz)])
    return SweetSpotCurve(D, r, p_scat, pcz, pov, p_cz)


def graded_p_cz(ctx: PhysicsContext, spacing: float) -> Callable[[float], float]:
    """Field-induced CZ loss at radius r*spacing using the graded level."""

    def fn(r: float) -> float:
        n = n_graded(ctx.model, r * spacing, ctx.drive.omega, ctx.noise.k_margin)
        return ctx.p_cz(n)

    return fn


def max_supported_radius(ctx: PhysicsContext, spacing: float) -> float:
    return max(ctx.r_max_of(n) for n in ctx.model.available_n) / spacing


def radius_grid(D: float, ctx: PhysicsContext, spacing: float, points: int = 60) -> np.ndarray:
    """``points`` log-spaced radii on [1, 3D/2), keeping those some level supports."""
    top = max_supported_radius(ctx, spacing)
    if top < 1:
        raise UnreachableRadiusError(spacing, top * spacing)
    grid = np.geomspace(1.0, 1.5 * D, points + 1)[:-1]
    return grid[grid <= top * (1 + 1e-12)]


def find_optimum_radius(curve: SweetSpotCurve) -> tuple[float, float]:
    """Grid argmin, refined by a parabola through the neighbouring points."""
    y = curve.p_overall
    i = int(np.argmin(y))
    r_star, loss_star = float(curve.r[i]), float(y[i])
    if 0 < i < len(y) - 1:
        x0, x1, x2 = curve.r[i - 1 : i + 2]
        y0, y1, y2 = y[i - 1 : i + 2]
        den = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
        b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / den
        if a > 0:
            xv = -b / (2 * a)
            if x0 < xv < x2:
                if curve.p_cz_fn is not None:
                    yv = overall_loss(curve.D, xv, curve.p_scat, curve.p_cz_fn(xv))
                else:
                    c = y1 - a * x1**2 - b * x1
                    yv = a * xv**2 + b * xv + c
                if yv < loss_star:
                    r_star, loss_star = float(xv), float(yv)
    return r_star, loss_star


@dataclass(frozen=True)
class LocusPoint:
    tau_scat_us: float
    p_scat: float
    r_star: float
    loss_star: float
    grid_index: int


def sweep_scattering_times(
    D: float,
    tau_scat_us: Sequence[float],
    ctx: PhysicsContext,
    spacing: float,
    points: int = 60,
) -> tuple[list[LocusPoint], list[SweetSpotCurve]]:
    """Optimum radius per scattering time; p_scat is held fixed along each curve.

    With a fixed drive the LP gate time does not depend on the Rydberg level,
    so a per-radius p_scat would be identical.
    """
    radii = radius_grid(D, ctx, spacing, points)
    pcz = graded_p_cz(ctx, spacing)
    locus, curves = [], []
    for tau in tau_scat_us:
        if not tau > 0:
            raise ValueError("scattering times must be positive")
        ps = scattering_prob(ctx.gate_time, tau)
        curve = overall_loss_curve(D, radii, ps, pcz)
        r_star, loss_star = find_optimum_radius(curve)
        locus.append(LocusPoint(tau, ps, r_star, loss_star, int(np.argmin(curve.p_overall))))
        curves.append(curve)
    return locus, curves


@dataclass(frozen=True)
class ScalingFit:
    loss_slope: float
    r_max_slope: float

    @property
    def ratio(self) -> float:
        return self.loss_slope / self.r_max_slope


def p11_loss_vs_n(
    model: AtomicModel,
    ns: Sequence[int],
    drive: GateDrive,
    e_field: float,
    params: LPGateParams | None = None,
) -> np.ndarray:
    params = params or solve_lp_params(drive)
    return np.array(
        [1.0 - lp_channel(drive, params, stark_detuning(model.alpha(n), e_field)).p11 for n in ns]
    )


def fit_scaling_exponents(
    model: AtomicModel,
    ns: Sequence[int],
    drive: GateDrive | None = None,
    e_field: float = 0.01,
    k_margin: float = 10.0,
) -> ScalingFit:
    """Log-log slopes of |11> loss and r_max against n."""
    ns = list(ns)
    if len(ns) < 5:
        raise ValueError("need at least five levels to fit")
    drive = drive or GateDrive()
    loss = p11_loss_vs_n(model, ns, drive, e_field)
    rm = [r_max(model.c6(n), drive.omega, k_margin) for n in ns]
    if np.ptp(loss) == 0:
        return ScalingFit(0.0, fit_loglog_slope(ns, rm))
    if np.any(loss <= 0):
        raise ValueError("loss vanished for some level; cannot take logarithms")
    return ScalingFit(fit_loglog_slope(ns, loss), fit_loglog_slope(ns, rm))
