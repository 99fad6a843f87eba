"""Direction frames u^k = (u_1, ..., u_k) of unit vectors, the associated
linear coordinate change (B maps t to s = (u_1.t, ..., u_k.t, t_{k+1}, ...),
C = B^-1) and the signal pullback h(s) = |det C| f(Cs)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .grids import CoverageWarning, Grid, Signal, dft, evaluate_trig

SINGULARITY_THRESHOLD = 1e-10
COVERAGE_WARN_FRACTION = 0.01


@dataclass(frozen=True)
class DirectionFrame:
    n: int
    k: int
    u: np.ndarray = field(repr=False)   # (k, n), unit rows
    B: np.ndarray = field(repr=False)   # (n, n)
    C: np.ndarray = field(repr=False)   # (n, n) = B^-1
    det_C: float = 0.0

    @property
    def is_identity(self) -> bool:
        return np.allclose(self.B, np.eye(self.n), atol=1e-14)


def build_frame(u_rows) -> DirectionFrame:
    """Normalize the direction rows and assemble B = [u; e_{k+1} ... e_n].

    Note the construction is degenerate (singular B) when a direction lies in
    the span of the trailing coordinate axes even if the rows themselves are
    independent; that case is rejected with a message naming the constraint.
    """
    u = np.atleast_2d(np.asarray(u_rows, dtype=float))
    k, n = u.shape
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    norms = np.linalg.norm(u, axis=1)
    if np.any(norms == 0):
        bad = int(np.argmin(norms))
        raise ValueError(f"direction row {bad} is zero and cannot be normalized")
    u = u / norms[:, None]
    B = np.eye(n)
    B[:k, :] = u
    det_B = np.linalg.det(B)
    if abs(det_B) < SINGULARITY_THRESHOLD:
        raise ValueError(
            "dependent directions: |det B| below threshold -- the frame matrix "
            "[u; e_{k+1}..e_n] is singular (this also happens when some u_i "
            "lies in span(e_{k+1}, ..., e_n))"
        )
    C = np.linalg.inv(B)
    return DirectionFrame(n=n, k=k, u=u, B=B, C=C, det_C=1.0 / det_B)


def identity_frame(n: int, k: int) -> DirectionFrame:
    return build_frame(np.eye(n)[:k])


def frequency_map(xi, frame: DirectionFrame) -> np.ndarray:
    """eta = C^T xi, so that t . xi = s . eta whenever t = C s."""
    xi = np.asarray(xi, dtype=float)
    return xi @ frame.C


def pullback(f: Signal, frame: DirectionFrame, out_grid: Grid,
             interpolation: str = "trig") -> Signal:
    """Sample h(s) = |det C| f(Cs) on out_grid.

    Interpolation of f at Cs is trigonometric by default (exact for
    band-limited periodized signals); "linear" multilinear interpolation is
    the fallback.  Points mapping outside f's grid evaluate to 0; a coverage
    warning fires when more than 1% of the mass-weighted samples are exterior.
    """
    if out_grid.dim != frame.n:
        raise ValueError("out_grid dimension must equal the frame dimension n")
    if frame.is_identity and out_grid == f.grid:
        return Signal(f.grid, f.values.copy())
    S = out_grid.points()
    T = S @ frame.C.T
    inside = f.grid.contains(T)
    if interpolation == "trig":
        spec = dft(f)
        raw = evaluate_trig(f, T, outside_zero=False, spectrum=spec)
    elif interpolation == "linear":
        raw = _multilinear(f, T)
    else:
        raise ValueError(f"unknown interpolation {interpolation!r}")
    total = float(np.sum(np.abs(raw)))
    exterior = float(np.sum(np.abs(raw[~inside])))
    if total > 0 and exterior / total > COVERAGE_WARN_FRACTION:
        warnings.warn(
            f"pullback maps {exterior / total:.2%} of mass outside the source grid",
            CoverageWarning,
            stacklevel=2,
        )
    vals = np.where(inside, raw, 0.0) * abs(frame.det_C)
    return Signal(out_grid, vals.reshape(out_grid.counts))


def _multilinear(f: Signal, pts: np.ndarray) -> np.ndarray:
    """Multilinear interpolation with zero extension outside the grid box."""
    d = f.grid.dim
    frac = (pts - np.asarray(f.grid.origin)) / np.asarray(f.grid.spacing)
    base = np.floor(frac).astype(int)
    w = frac - base
    out = np.zeros(pts.shape[0], dtype=complex)
    counts = np.asarray(f.grid.counts)
    for corner in range(1 << d):
        offs = np.array([(corner >> j) & 1 for j in range(d)])
        idx = base + offs
        valid = np.all((idx >= 0) & (idx < counts), axis=-1)
        weight = np.prod(np.where(offs, w, 1.0 - w), axis=-1)
        if np.any(valid):
            flat = np.ravel_multi_index(idx[valid].T, f.grid.counts)
            out[valid] += weight[valid] * f.values.ravel()[flat]
    return out
