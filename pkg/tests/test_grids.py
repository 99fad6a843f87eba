import numpy as np
import pytest

from dirstft import (Grid, Signal, Spectrum, dft, dft_oracle, idft,
                     inner_product, inner_product_spectrum)
from dirstft.fixtures import gaussian, random_bandlimited
from dirstft.grids import (BoundaryMassWarning, boundary_mass_fraction,
                           check_boundary_mass, relative_error)


def test_grid_basic_geometry():
    g = Grid.from_bounds([-8, -8], [8, 8], [32, 32])
    assert g.dim == 2
    assert g.spacing == (0.5, 0.5)
    assert g.cell_volume == pytest.approx(0.25)
    axes = g.axes()
    assert axes[0][0] == -8.0
    assert axes[0][-1] == pytest.approx(7.5)


def test_grid_dual_lattice():
    g = Grid.from_bounds([-8], [8], [32])
    d = g.dual()
    # spacing 1/(N Delta), centered at zero
    assert d.spacing[0] == pytest.approx(1 / (32 * 0.5))
    assert d.origin[0] == pytest.approx(-(32 // 2) * d.spacing[0])
    assert 0.0 in set(d.axes()[0])


def test_dft_delta_is_constant():
    g = Grid.from_bounds([-4], [4], [16])
    vals = np.zeros(16, dtype=complex)
    i0 = g.lattice_index(np.array([[0.0]]))[0]
    vals[i0] = 1.0 / g.cell_volume
    spec = dft(Signal(g, vals))
    assert np.allclose(spec.values, 1.0, atol=1e-12)


def test_dft_gaussian_at_zero():
    g = Grid.from_bounds([-8, -8], [8, 8], [256, 256])
    f = gaussian(g, sigma=1.0)
    spec = dft(f)
    i0 = tuple(spec.freq_grid.lattice_index(np.array([[0.0, 0.0]]))[0])
    assert abs(spec.values[i0] - 1.0) <= 1e-12


def test_dft_gaussian_pair_closed_form():
    # e^{-pi |t|^2} is its own transform under this convention
    g = Grid.from_bounds([-8, -8], [8, 8], [256, 256])
    f = gaussian(g, sigma=1.0)
    spec = dft(f)
    xi = spec.freq_grid.points()
    want = np.exp(-np.pi * np.sum(xi ** 2, axis=-1))
    mask = np.linalg.norm(xi, axis=-1) <= 4.0
    err = np.abs(spec.values.ravel()[mask] - want[mask])
    assert err.max() <= 1e-9


@pytest.mark.parametrize("counts", [(16, 16), (64,), (8, 8, 8)])
def test_dft_matches_oracle(counts):
    g = Grid.from_bounds([-4] * len(counts), [4] * len(counts), counts)
    f = random_bandlimited(g, 3, band=0.8)
    fast = dft(f)
    slow = dft_oracle(f)
    assert relative_error(fast.values, slow.values) < 1e-10


def test_oracle_zero_signal():
    g = Grid.from_bounds([-4], [4], [16])
    f = Signal(g, np.zeros(16, dtype=complex))
    assert np.all(dft_oracle(f).values == 0)


def test_oracle_shifted_delta_pure_phase():
    g = Grid.from_bounds([-4], [4], [16])
    vals = np.zeros(16, dtype=complex)
    t0 = 1.5
    i0 = g.lattice_index(np.array([[t0]]))[0]
    vals[i0] = 1.0 / g.cell_volume
    spec = dft_oracle(Signal(g, vals))
    xi = spec.freq_grid.points()[:, 0]
    want = np.exp(-2j * np.pi * xi * t0)
    assert np.allclose(spec.values.ravel(), want, atol=1e-12)


def test_oracle_cap_rejected():
    g = Grid.from_bounds([-4], [4], [1024])
    f = Signal(g, np.ones(1024, dtype=complex))
    with pytest.raises(ValueError):
        dft_oracle(f, cap=512)


def test_inner_product_hermitian_real():
    g = Grid.from_bounds([-8], [8], [64])
    f = gaussian(g, sigma=1.0)
    v = inner_product(f, f)
    assert v.real > 0
    assert abs(v.imag) < 1e-15


def test_inner_product_disjoint_supports():
    g = Grid.from_bounds([-8], [8], [64])
    a = np.zeros(64, dtype=complex)
    b = np.zeros(64, dtype=complex)
    a[:32] = 1.0
    b[32:] = 1.0
    assert inner_product(Signal(g, a), Signal(g, b)) == 0


def test_inner_product_gaussian_closed_form():
    # integral of e^{-2 pi t^2} = 2^{-1/2}
    g = Grid.from_bounds([-8], [8], [1024])
    f = gaussian(g, sigma=1.0)
    assert abs(inner_product(f, f) - 2 ** -0.5) <= 1e-9


def test_idft_inverts_dft():
    g = Grid.from_bounds([-8, -8], [8, 8], [32, 32])
    f = random_bandlimited(g, 5)
    back = idft(dft(f), g)
    assert relative_error(back.values, f.values) < 1e-10


def test_plancherel():
    g = Grid.from_bounds([-8, -8], [8, 8], [32, 32])
    f = random_bandlimited(g, 1, band=0.5)
    h = random_bandlimited(g, 2, band=0.5)
    lhs = inner_product(f, h)
    rhs = inner_product_spectrum(dft(f), dft(h))
    assert abs(lhs - rhs) / abs(rhs) < 1e-8


def test_dft_linearity():
    g = Grid.from_bounds([-4], [4], [32])
    f = random_bandlimited(g, 7)
    h = random_bandlimited(g, 8)
    a, b = 2.5 - 1j, -0.25 + 3j
    lhs = dft(Signal(g, a * f.values + b * h.values)).values
    rhs = a * dft(f).values + b * dft(h).values
    assert relative_error(lhs, rhs) < 1e-12


def test_boundary_mass_warning():
    g = Grid.from_bounds([-2], [2], [32])
    wide = gaussian(g, sigma=4.0)       # nowhere near decayed at the edge
    assert boundary_mass_fraction(wide) > 1e-9
    with pytest.warns(BoundaryMassWarning):
        check_boundary_mass(wide)
    narrow = gaussian(g, sigma=0.25)
    check_boundary_mass(narrow)         # no warning


def test_signal_rejects_nonfinite():
    g = Grid.from_bounds([-4], [4], [16])
    vals = np.ones(16, dtype=complex)
    vals[3] = np.nan
    with pytest.raises(ValueError):
        Signal(g, vals)
