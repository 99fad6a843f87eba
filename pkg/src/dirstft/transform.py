"""Forward k-directional short-time Fourier transform.

DS_{g,u^k} f(y~, xi) = integral f(t) conj(g((u_1.t, ..., u_k.t) - y~))
                       exp(-2 pi i t . xi) dt

sampled on a y~-grid in R^k and the DFT-dual frequency lattice in R^n.  The
fast path assembles the windowed signal per y~ slice and hands it to the FFT
quadrature; the direct path is the brute-force oracle and also accepts
arbitrary off-lattice frequencies.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .direction import DirectionFrame
from .grids import Grid, Signal, dft
from .windows import Window, WindowKind, tensor_window, window_at

DIRECT_WORK_CAP = 2 ** 27


@dataclass
class DstftField:
    """Samples of DS f on y_grid x xi_grid; values shaped y_counts + xi_counts."""

    y_grid: Grid
    xi_grid: Grid
    values: np.ndarray = field(repr=False)
    frame: DirectionFrame = None
    window_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        expected = self.y_grid.counts + self.xi_grid.counts
        if vals.shape != expected:
            vals = vals.reshape(expected)
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        self.values = vals

    @property
    def y_size(self) -> int:
        return self.y_grid.size

    @property
    def xi_size(self) -> int:
        return self.xi_grid.size

    def slice_at(self, y_flat_index: int) -> np.ndarray:
        return self.values.reshape(self.y_size, *self.xi_grid.counts)[y_flat_index]

    def inner_product(self, other: "DstftField") -> complex:
        """Quadrature L2 inner product over (y~, xi)."""
        if self.y_grid != other.y_grid or self.xi_grid != other.xi_grid:
            raise ValueError("field inner product requires identical grids")
        weight = self.y_grid.cell_volume * self.xi_grid.cell_volume
        return complex(weight * np.vdot(other.values, self.values))


def default_y_grid(grid: Grid, k: int) -> Grid:
    """First-k-axes projection of the signal grid (lattice-exact window
    evaluation for the e^k frame)."""
    return Grid(grid.origin[:k], grid.spacing[:k], grid.counts[:k])


def _window_slices(f: Signal, g: Window, frame: DirectionFrame, y_grid: Grid):
    """Yield (flat y index, window values conj-ready on the t lattice)."""
    T = f.grid.points()
    proj = T @ frame.u.T                     # (Nt, k)
    Y = y_grid.points()
    spectrum = None
    # Precompute the window spectrum once when interpolation will be needed.
    if g.grid.lattice_index(proj - Y[0]) is None:
        spectrum = dft(g.as_signal())
    for iy in range(Y.shape[0]):
        w = window_at(g, proj - Y[iy], spectrum=spectrum)
        yield iy, w


def dstft_fast(f: Signal, g: Window, frame: DirectionFrame,
               y_grid: Grid | None = None, threads: int = 1) -> DstftField:
    """FFT-quadrature k-DSTFT on the dual frequency lattice."""
    if f.grid.dim != frame.n:
        raise ValueError("signal dimension must match frame n")
    if g.grid.dim != frame.k:
        raise ValueError("window dimension must match frame k")
    y_grid = default_y_grid(f.grid, frame.k) if y_grid is None else y_grid
    xi_grid = f.grid.dual()
    flat_f = f.values.ravel()
    out = np.empty((y_grid.size,) + xi_grid.counts, dtype=complex)

    slices = list(_window_slices(f, g, frame, y_grid))

    def run(item):
        iy, w = item
        windowed = Signal(f.grid, (flat_f * np.conj(w)).reshape(f.grid.counts))
        out[iy] = dft(windowed).values

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, slices))
    else:
        for item in slices:
            run(item)
    return DstftField(y_grid, xi_grid, out.reshape(y_grid.counts + xi_grid.counts),
                      frame=frame, window_meta=g.meta)


def dstft_direct(f: Signal, g: Window, frame: DirectionFrame,
                 y_grid: Grid | None = None,
                 work_cap: int = DIRECT_WORK_CAP) -> DstftField:
    """Brute-force quadrature oracle on the dual lattice."""
    y_grid = default_y_grid(f.grid, frame.k) if y_grid is None else y_grid
    xi_grid = f.grid.dual()
    work = f.grid.size * y_grid.size * xi_grid.size
    if work > work_cap:
        raise ValueError(f"direct-path work {work} exceeds cap {work_cap}")
    vals = dstft_direct_at(f, g, frame, y_grid.points(), xi_grid.points())
    return DstftField(y_grid, xi_grid, vals.reshape(y_grid.counts + xi_grid.counts),
                      frame=frame, window_meta=g.meta)


def dstft_direct_at(f: Signal, g: Window, frame: DirectionFrame,
                    y_pts: np.ndarray, xi_pts: np.ndarray) -> np.ndarray:
    """Direct quadrature at arbitrary (y~, xi) points; shape (Ny, Nxi)."""
    if f.grid.dim != frame.n or g.grid.dim != frame.k:
        raise ValueError("grid dimensions must match the frame")
    y_pts = np.atleast_2d(np.asarray(y_pts, dtype=float))
    xi_pts = np.atleast_2d(np.asarray(xi_pts, dtype=float))
    T = f.grid.points()
    proj = T @ frame.u.T
    flat_f = f.values.ravel()
    vol = f.grid.cell_volume
    spectrum = None
    if g.grid.lattice_index(proj - y_pts[0]) is None:
        spectrum = dft(g.as_signal())
    out = np.empty((y_pts.shape[0], xi_pts.shape[0]), dtype=complex)
    phases = np.exp(-2j * np.pi * (xi_pts @ T.T))   # (Nxi, Nt)
    for iy in range(y_pts.shape[0]):
        w = window_at(g, proj - y_pts[iy], spectrum=spectrum)
        out[iy] = vol * (phases @ (flat_f * np.conj(w)))
    return out


def partial_stft(f: Signal, g_list: list, frame: DirectionFrame,
                 y_grid: Grid | None = None, threads: int = 1) -> DstftField:
    """Partial STFT: tensor-product window g(s) = g_1(s_1) ... g_k(s_k)."""
    if len(g_list) != frame.k:
        raise ValueError("need exactly k one-dimensional windows")
    g = tensor_window(list(g_list))
    return dstft_fast(f, g, frame, y_grid=y_grid, threads=threads)
