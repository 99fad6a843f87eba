"""Window functions on R^k: Gaussians, compactly supported Gevrey bumps,
pairing (synthesis-window) checks and a finite-difference seminorm probe.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .grids import Grid, Signal, evaluate_trig, inner_product


class WindowKind(enum.Enum):
    GAUSSIAN = "gaussian"
    GEVREY_BUMP = "gevrey_bump"
    CUSTOM = "custom"


# Default relative pairing threshold: below quadrature noise the 1/(g, phi)
# reconstruction factor is unusable.
EPS_PAIR = 1e-8


@dataclass
class Window:
    grid: Grid
    values: np.ndarray = field(repr=False)
    kind: WindowKind = WindowKind.CUSTOM
    alpha: float | None = None
    support_radius: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.counts:
            vals = vals.reshape(self.grid.counts)
        if not np.all(np.isfinite(vals)):
            raise ValueError("window values must be finite")
        if not np.any(vals):
            raise ValueError("window must not be identically zero")
        self.values = vals

    def as_signal(self) -> Signal:
        return Signal(self.grid, self.values)

    @property
    def meta(self) -> dict:
        return {
            "kind": self.kind.value,
            "alpha": self.alpha,
            "support_radius": self.support_radius,
            "counts": list(self.grid.counts),
        }


@dataclass(frozen=True)
class PairingCert:
    value: complex
    magnitude: float
    admissible: bool


def gaussian_window(grid: Grid, sigma) -> Window:
    """g(t) = prod_j exp(-pi t_j^2 / sigma_j^2); strictly positive, g(0) = 1."""
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    if sigma.shape[0] != grid.dim:
        raise ValueError("sigma length must match grid dimension")
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    vals = np.ones(grid.counts)
    for j in range(grid.dim):
        axis = grid.axis(j)
        shape = [1] * grid.dim
        shape[j] = len(axis)
        vals = vals * np.exp(-np.pi * (axis / sigma[j]) ** 2).reshape(shape)
    return Window(grid, vals, WindowKind.GAUSSIAN)


def gevrey_bump(grid: Grid, radius: float, alpha: float) -> Window:
    """Compactly supported Gevrey-class bump, zero for ||t|| >= radius.

    b(t) = exp(-(1 - ||t/r||^2)^(-q)) with q = 1/(alpha - 1), so b(0) = 1/e.
    """
    if alpha <= 1:
        raise ValueError("Gevrey index alpha must exceed 1")
    if radius <= 0:
        raise ValueError("radius must be positive")
    lo = np.asarray(grid.origin)
    hi = np.asarray(grid.upper)
    half_extent = min(float(np.min(-lo)), float(np.min(hi)))
    if radius >= half_extent:
        raise ValueError(
            f"bump radius {radius} does not fit strictly inside the grid "
            f"(half extent {half_extent})"
        )
    q = 1.0 / (alpha - 1.0)
    pts = grid.points()
    rho2 = np.sum((pts / radius) ** 2, axis=-1)
    vals = np.zeros(pts.shape[0])
    inside = rho2 < 1.0
    vals[inside] = np.exp(-((1.0 - rho2[inside]) ** (-q)))
    return Window(grid, vals.reshape(grid.counts), WindowKind.GEVREY_BUMP,
                  alpha=alpha, support_radius=radius)


def shifted(w: Window, delta) -> Window:
    """Window translated by a lattice-commensurate vector (values resampled
    by trigonometric interpolation when the shift is off-lattice)."""
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    pts = w.grid.points() - delta
    vals = window_at(w, pts).reshape(w.grid.counts)
    return Window(w.grid, vals, WindowKind.CUSTOM, alpha=w.alpha,
                  support_radius=0.0)


def window_at(w: Window, pts: np.ndarray, spectrum=None) -> np.ndarray:
    """Evaluate a window at arbitrary k-dim points.

    Lattice hits are gathered exactly; otherwise trigonometric interpolation
    of the periodized window is used (the same rule as the signal pullback).
    Points outside the grid box are 0, as are points outside the support
    radius of a compactly supported bump.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    inside = w.grid.contains(pts)
    idx = w.grid.lattice_index(pts)
    if idx is not None:
        out = np.zeros(pts.shape[0], dtype=complex)
        if np.any(inside):
            clipped = idx[inside]
            flat = np.ravel_multi_index(clipped.T, w.grid.counts)
            out[inside] = w.values.ravel()[flat]
    else:
        out = evaluate_trig(w.as_signal(), pts, outside_zero=True,
                            spectrum=spectrum)
    if w.kind is WindowKind.GEVREY_BUMP and w.support_radius > 0:
        out = np.where(np.linalg.norm(pts, axis=-1) >= w.support_radius, 0.0, out)
    return out


def pairing_check(g: Window, phi: Window, eps_pair: float = EPS_PAIR) -> PairingCert:
    """Certify (g, phi) != 0 so phi can act as a synthesis window for g."""
    if g.grid != phi.grid:
        raise ValueError("pairing_check requires identical window grids")
    value = inner_product(g.as_signal(), phi.as_signal())
    ng = math.sqrt(abs(inner_product(g.as_signal(), g.as_signal())))
    np_ = math.sqrt(abs(inner_product(phi.as_signal(), phi.as_signal())))
    threshold = eps_pair * ng * np_
    mag = abs(value)
    return PairingCert(value=value, magnitude=mag, admissible=mag >= threshold)


def tensor_window(parts: list) -> Window:
    """Assemble the product window g(s) = g_1(s_1) ... g_k(s_k) explicitly."""
    if not parts:
        raise ValueError("tensor_window needs at least one factor")
    for p in parts:
        if p.grid.dim != 1:
            raise ValueError("tensor_window factors must be one-dimensional")
    grid = Grid(
        tuple(p.grid.origin[0] for p in parts),
        tuple(p.grid.spacing[0] for p in parts),
        tuple(p.grid.counts[0] for p in parts),
    )
    vals = parts[0].values
    for p in parts[1:]:
        vals = np.multiply.outer(vals, p.values)
    kind = WindowKind.CUSTOM
    alpha = None
    if all(p.kind is WindowKind.GAUSSIAN for p in parts):
        kind = WindowKind.GAUSSIAN
    return Window(grid, vals, kind, alpha=alpha)


def _diff4(vals: np.ndarray, axis: int, h: float) -> np.ndarray:
    """4th-order central first derivative along one axis (periodic roll;
    windows are assumed negligible at the grid boundary)."""
    f1 = np.roll(vals, -1, axis=axis)
    f2 = np.roll(vals, -2, axis=axis)
    b1 = np.roll(vals, 1, axis=axis)
    b2 = np.roll(vals, 2, axis=axis)
    return (-f2 + 8 * f1 - 8 * b1 + b2) / (12 * h)


def gs_seminorm_probe(w: Window, a: float, alpha: float, beta: float,
                      p_max: int, q_max: int) -> float:
    """Diagnostic truncation of the factorial-weighted seminorm

        sup over t, |p| and |q| of a^(|p|+|q|) / (p!^beta q!^alpha)
            * |t^p d^q w(t)|

    with derivatives by 4th-order central finite differences.  Caps above 4
    are rejected: higher orders are numerically meaningless at double
    precision.  Monotone nondecreasing in both caps.
    """
    if p_max > 4 or q_max > 4:
        raise ValueError("finite-difference stability cap: p_max, q_max <= 4")
    if p_max < 0 or q_max < 0:
        raise ValueError("caps must be nonnegative")
    if a <= 0:
        raise ValueError("a must be positive")
    k = w.grid.dim
    pts = w.grid.points()

    # All multi-indices with every component <= cap.
    def multi_indices(cap):
        ranges = [range(cap + 1)] * k
        out = [()]
        for r in ranges:
            out = [m + (i,) for m in out for i in r]
        return out

    derivs = {(0,) * k: np.asarray(w.values, dtype=complex)}
    for q in sorted(multi_indices(q_max), key=sum):
        if q in derivs:
            continue
        j = next(i for i, qi in enumerate(q) if qi > 0)
        prev = tuple(qi - (1 if i == j else 0) for i, qi in enumerate(q))
        derivs[q] = _diff4(derivs[prev], j, w.grid.spacing[j])

    best = 0.0
    for p in multi_indices(p_max):
        tp = np.prod(pts ** np.asarray(p, dtype=float), axis=-1)
        pfac = np.prod([math.factorial(pi) for pi in p])
        for q, dq in derivs.items():
            qfac = np.prod([math.factorial(qi) for qi in q])
            weight = a ** (sum(p) + sum(q)) / (pfac ** beta * qfac ** alpha)
            cand = weight * float(np.max(np.abs(tp * dq.ravel())))
            best = max(best, cand)
    return best
