"""Directional microlocal regularity testing and wavefront-set estimation.

A position/direction pair (ball of y~ positions, frequency cone) is regular
when the field decays like C exp(-N |xi|^(1/alpha)) over the ball x cone with
a rate N above threshold.  The rate is estimated by regressing dyadic-shell
suprema of log |F| against |xi|^(1/alpha).

The model bound is one-sided: decay faster than the model (a Gaussian field,
say) produces a concave log-magnitude curve whose linear-fit residual is
large even though the bound trivially holds.  The classifier therefore also
accepts entries whose pairwise secant slopes all stay above threshold, and
entries whose cone values sit entirely below the floating-point dynamic
range.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .direction import DirectionFrame
from .grids import Grid, Signal, dft
from .transform import DstftField, dstft_fast
from .windows import Window, WindowKind, window_at

LOG_FLOOR = 1e-300          # floor before taking logs (exact zeros)
DYNAMIC_RANGE_FLOOR = 1e-280  # below this a shell is "fully decayed"
NOISE_FLOOR_REL = 1e-12     # relative to the cell's peak magnitude; shell
                            # suprema below this are FFT rounding, not signal
N_HAT_SATURATED = 1e6       # reported rate when decay exhausts the range
DEFAULT_RESIDUAL_CAP = 0.5  # log-units
DEFAULT_THRESHOLD_N = 1.0
MIN_CONE_POINTS = 8


class WindowClassWarning(UserWarning):
    """Non-compactly-supported window used for a wavefront scan."""


@dataclass(frozen=True)
class ConeSpec:
    """Frequencies within half_angle of a unit center direction, |xi| >= r_min."""

    center: tuple
    half_angle: float
    r_min: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > 1e-12:
            if norm == 0:
                raise ValueError("cone center must be a nonzero direction")
            c = c / norm
        object.__setattr__(self, "center", tuple(c))
        if not 0 < self.half_angle < np.pi / 2:
            raise ValueError("half_angle must lie in (0, pi/2)")
        if self.r_min <= 0:
            raise ValueError("r_min must be positive")

    def contains(self, xi: np.ndarray) -> np.ndarray:
        xi = np.atleast_2d(xi)
        norms = np.linalg.norm(xi, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            cosang = (xi @ np.asarray(self.center)) / norms
        return (norms >= self.r_min) & (cosang >= math.cos(self.half_angle))


@dataclass(frozen=True)
class BallSpec:
    """Euclidean ball enclosing the product of k per-coordinate balls of
    radius `radius` (so the effective Euclidean radius is radius * sqrt(k))."""

    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    def contains(self, y: np.ndarray) -> np.ndarray:
        y = np.atleast_2d(y)
        k = len(self.center)
        r_eff = self.radius * math.sqrt(k)
        return np.linalg.norm(y - np.asarray(self.center), axis=-1) <= r_eff + 1e-12


@dataclass(frozen=True)
class DecayFit:
    N_hat: float
    logC_hat: float
    residual: float
    n_points: int
    alpha: float
    n_shells: int = 0
    slope_floor: float = 0.0


@dataclass(frozen=True)
class ScanEntry:
    y_cell: BallSpec
    cone: ConeSpec
    fit: DecayFit
    regular: bool


@dataclass
class WavefrontReport:
    entries: list
    threshold_N: float
    window_meta: dict
    residual_cap: float = DEFAULT_RESIDUAL_CAP

    @property
    def singular(self) -> list:
        return [e for e in self.entries if not e.regular]


def _shell_points(xi_pts: np.ndarray, mags: np.ndarray, cone: ConeSpec, alpha: float,
                  ref: float | None = None):
    """Dyadic-shell suprema: (x, y) pairs with x = |xi*|^(1/alpha) at the
    argmax, y = log sup |F|, plus the in-cone point count.

    ref is the magnitude against which the rounding-noise floor is measured;
    it must be the global peak of the transform the magnitudes came from,
    because FFT rounding noise scales with the global peak, not the local
    one."""
    mask = cone.contains(xi_pts)
    n_points = int(np.count_nonzero(mask))
    if n_points < MIN_CONE_POINTS:
        raise ValueError(
            f"only {n_points} frequency lattice points in the cone "
            f"(need >= {MIN_CONE_POINTS})"
        )
    norms = np.linalg.norm(xi_pts[mask], axis=-1)
    vals = np.maximum(mags[mask], LOG_FLOOR)
    if ref is None:
        ref = float(np.max(mags))
    floor = max(DYNAMIC_RANGE_FLOOR, NOISE_FLOOR_REL * ref)
    r_max = float(norms.max())
    edges = [cone.r_min]
    while edges[-1] < r_max * (1 + 1e-12):
        edges.append(edges[-1] * 2)
    xs, ys, decayed = [], [], 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (norms >= lo) & (norms < hi)
        if lo == edges[-2]:
            sel = (norms >= lo) & (norms <= r_max)
        if not np.any(sel):
            continue
        j = np.argmax(vals[sel])
        s = float(vals[sel][j])
        if s <= floor:
            decayed += 1
            continue
        xs.append(float(norms[sel][j]) ** (1.0 / alpha))
        ys.append(math.log(s))
    return np.asarray(xs), np.asarray(ys), n_points, decayed


def _fit(xs: np.ndarray, ys: np.ndarray, n_points: int, decayed: int,
         alpha: float) -> DecayFit:
    if len(xs) < 2:
        if decayed > 0:
            # the cone decays below the floating-point dynamic range
            return DecayFit(N_HAT_SATURATED, 0.0, 0.0, n_points, alpha,
                            n_shells=len(xs) + decayed,
                            slope_floor=N_HAT_SATURATED)
        raise ValueError("fewer than 2 usable dyadic shells in the cone")
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    floor = math.inf
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if xs[j] > xs[i] + 1e-12:
                floor = min(floor, -(ys[j] - ys[i]) / (xs[j] - xs[i]))
    if not math.isfinite(floor):
        floor = -slope
    return DecayFit(float(-slope), float(intercept), resid, n_points, alpha,
                    n_shells=len(xs) + decayed, slope_floor=float(floor))


def _classify(fit: DecayFit, threshold_N: float, residual_cap: float) -> bool:
    if fit.N_hat >= N_HAT_SATURATED:
        return True
    if fit.N_hat >= threshold_N and fit.residual <= residual_cap:
        return True
    # one-sided bound: uniformly steep secants mean faster-than-model decay
    return fit.slope_floor >= threshold_N


def fit_spectrum_decay(xi_pts: np.ndarray, mags: np.ndarray, cone: ConeSpec,
                       alpha: float, ref: float | None = None) -> DecayFit:
    """Decay fit of raw magnitudes over a frequency cone."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    xs, ys, n_points, decayed = _shell_points(xi_pts, mags, cone, alpha, ref=ref)
    return _fit(xs, ys, n_points, decayed, alpha)


def decay_fit(F: DstftField, ball: BallSpec, cone: ConeSpec, alpha: float) -> DecayFit:
    """Fit the decay rate of sup over the ball of |F| over the cone."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    Y = F.y_grid.points()
    ymask = ball.contains(Y)
    if not np.any(ymask):
        raise ValueError("no y~ lattice points inside the ball")
    flat = np.abs(F.values.reshape(F.y_size, F.xi_size))
    sup = flat[ymask].max(axis=0)
    return fit_spectrum_decay(F.xi_grid.points(), sup, cone, alpha,
                              ref=float(flat.max()))


def regular_point_test(F: DstftField, ball: BallSpec, cone: ConeSpec, alpha: float,
                       threshold_N: float = DEFAULT_THRESHOLD_N,
                       residual_cap: float = DEFAULT_RESIDUAL_CAP) -> bool:
    fit = decay_fit(F, ball, cone, alpha)
    return _classify(fit, threshold_N, residual_cap)


def _check_scan_window(g: Window, strict: bool):
    ok = g.kind is WindowKind.GEVREY_BUMP and g.support_radius > 0
    origin_val = window_at(g, np.zeros((1, g.grid.dim)))[0]
    if ok and origin_val == 0:
        raise ValueError("scan window must not vanish at the origin")
    if not ok:
        msg = ("wavefront scan expects a compactly supported Gevrey bump "
               f"window, got kind {g.kind.value!r}")
        if strict:
            raise ValueError(msg + " (strict mode)")
        warnings.warn(msg, WindowClassWarning, stacklevel=3)


def wavefront_scan(f: Signal, g: Window, frame: DirectionFrame, alpha: float,
                   y_cells: list, cones: list,
                   threshold_N: float = DEFAULT_THRESHOLD_N,
                   residual_cap: float = DEFAULT_RESIDUAL_CAP,
                   y_grid: Grid | None = None, strict: bool = True,
                   threads: int = 1) -> WavefrontReport:
    """Exhaustive regular-point test over a (cell, cone) dictionary.

    The field is computed once; the singular set is the complement of the
    regular entries.
    """
    _check_scan_window(g, strict)
    F = dstft_fast(f, g, frame, y_grid=y_grid, threads=threads)
    Y = F.y_grid.points()
    flat = np.abs(F.values.reshape(F.y_size, F.xi_size))
    global_ref = float(flat.max())
    xi_pts = F.xi_grid.points()
    entries = []
    for cell in y_cells:
        ymask = cell.contains(Y)
        if not np.any(ymask):
            raise ValueError(f"no y~ lattice points inside cell {cell}")
        sup = flat[ymask].max(axis=0)
        for cone in cones:
            fit = fit_spectrum_decay(xi_pts, sup, cone, alpha, ref=global_ref)
            entries.append(ScanEntry(cell, cone, fit,
                                     _classify(fit, threshold_N, residual_cap)))
    return WavefrontReport(entries, threshold_N, g.meta, residual_cap)


def partial_wf_test(f: Signal, chi: Window, y0, cone: ConeSpec, alpha: float,
                    threshold_N: float = DEFAULT_THRESHOLD_N,
                    residual_cap: float = DEFAULT_RESIDUAL_CAP) -> bool:
    """Cut-off variant: multiply f by chi(t~ - y0) extended constantly in the
    trailing coordinates, take the full Fourier transform and threshold the
    cone decay of the spectrum."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    k = chi.grid.dim
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    if y0.shape[0] != k:
        raise ValueError("y0 must have length k")
    if window_at(chi, np.zeros((1, k)))[0] == 0:
        raise ValueError("cut-off must not vanish at its center")
    T = f.grid.points()[:, :k]
    ext = window_at(chi, T - y0).reshape(f.grid.counts)
    cut = Signal(f.grid, f.values * ext)
    spec = dft(cut)
    fit = fit_spectrum_decay(spec.freq_grid.points(), np.abs(spec.values.ravel()),
                             cone, alpha)
    return _classify(fit, threshold_N, residual_cap)


def cone_dictionary_2d(count: int = 16, r_min: float = 0.5,
                       half_angle: float | None = None) -> list:
    """Evenly spaced covering dictionary of cones on the circle."""
    if count < 2:
        raise ValueError("need at least 2 cones")
    half = math.pi / count if half_angle is None else half_angle
    cones = []
    for j in range(count):
        theta = 2 * math.pi * j / count
        cones.append(ConeSpec((math.cos(theta), math.sin(theta)), half, r_min))
    return cones


def global_regularity_check(report: WavefrontReport, samples: int = 1440) -> bool:
    """True iff every entry is regular; requires the cones to cover the sphere."""
    if not report.entries:
        raise ValueError("empty report")
    n = len(report.entries[0].cone.center)
    if n == 2:
        angles = np.linspace(0, 2 * math.pi, samples, endpoint=False)
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    else:
        rng = np.random.default_rng(0)
        dirs = rng.normal(size=(4096, n))
        dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    cones = {e.cone for e in report.entries}
    covered = np.zeros(len(dirs), dtype=bool)
    for cone in cones:
        cos = dirs @ np.asarray(cone.center)
        covered |= cos >= math.cos(cone.half_angle) - 1e-12
    if not np.all(covered):
        bad = dirs[~covered][0]
        raise ValueError(f"cone dictionary does not cover direction {tuple(bad)}")
    return all(e.regular for e in report.entries)
